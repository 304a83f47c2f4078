#include "aitrace/utf8.hpp"

#include <gtest/gtest.h>

namespace u8 = aitrace::utf8;

TEST(Utf8, EncodesEachLengthClass) {
    EXPECT_EQ(u8::encode(U"A"), "A");
    EXPECT_EQ(u8::encode(U"é"), "\xC3\xA9");
    EXPECT_EQ(u8::encode(U"“"), "\xE2\x80\x9C");
    EXPECT_EQ(u8::encode(U"\U0001F600"), "\xF0\x9F\x98\x80");
}

TEST(Utf8, AppendDropsSurrogatesAndOutOfRange) {
    std::string s;
    u8::append(s, 0xD800);
    u8::append(s, 0x110000);
    EXPECT_TRUE(s.empty());
}

TEST(Utf8, NextDecodesAndAdvances) {
    const std::string s = "a\xE2\x80\x99" "b";
    std::size_t pos = 0;
    EXPECT_EQ(u8::next(s, pos), U'a');
    EXPECT_EQ(u8::next(s, pos), char32_t{0x2019});
    EXPECT_EQ(pos, 4u);
    EXPECT_EQ(u8::next(s, pos), U'b');
    EXPECT_EQ(pos, s.size());
}

TEST(Utf8, MalformedSequencesAdvanceOneByte) {
    const std::vector<std::string> bad = {
        "\x80",              // lone continuation
        "\xC0\xAF",          // overlong '/'
        "\xE0\x80\x80",      // overlong NUL
        "\xED\xA0\x80",      // encoded surrogate
        "\xF4\x90\x80\x80",  // past U+10FFFF
        "\xE2\x80",          // truncated
    };
    for (const auto& s : bad) {
        std::size_t pos = 0;
        EXPECT_EQ(u8::next(s, pos), u8::kInvalid) << testing::PrintToString(s);
        EXPECT_EQ(pos, 1u);
        EXPECT_FALSE(u8::is_valid(s));
    }
}

TEST(Utf8, SanitizeReplacesOnlyBadBytes) {
    EXPECT_EQ(u8::sanitize("ok \xE2\x80\x9C"), "ok \xE2\x80\x9C");
    EXPECT_EQ(u8::sanitize("a\xFF" "b"), "a\xEF\xBF\xBD" "b");
    EXPECT_TRUE(u8::is_valid(u8::sanitize("\xC3\x28\xA0\xA1")));
}
