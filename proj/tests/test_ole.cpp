#include "aitrace/ole.hpp"

#include "support/ole_writer.hpp"

#include <gtest/gtest.h>

#include <algorithm>

namespace ole = aitrace::ole;

namespace {

std::span<const std::byte> view(const std::string& s) {
    return {reinterpret_cast<const std::byte*>(s.data()), s.size()};
}

}  // namespace

TEST(Ole, ReadsMiniAndRegularStreams) {
    fixture::OleWriter w;
    const std::string small = "tiny stream";
    std::string large(9000, '\0');
    for (std::size_t i = 0; i < large.size(); ++i) large[i] = static_cast<char>(i * 7);
    w.add_stream("Small", small);
    w.add_stream("Large", large);
    const std::string bytes = w.bytes();
    ASSERT_TRUE(ole::has_ole_magic(view(bytes)));
    ole::CompoundFile cf(view(bytes));
    const auto names = cf.stream_names();
    EXPECT_NE(std::find(names.begin(), names.end(), "Small"), names.end());
    EXPECT_EQ(cf.read_stream("Small"), small);
    EXPECT_EQ(cf.read_stream("large"), large);  // case-insensitive
    EXPECT_FALSE(cf.read_stream("Absent"));
}

TEST(Ole, PaddedStreamsSkipMiniStream) {
    fixture::OleWriter w;
    w.add_stream("S", "abc");
    const std::string bytes = w.bytes(true);
    ole::CompoundFile cf(view(bytes));
    const auto s = cf.read_stream("S");
    ASSERT_TRUE(s);
    EXPECT_EQ(s->substr(0, 3), "abc");
    EXPECT_GE(s->size(), 4096u);
}

TEST(Ole, DamageIsReported) {
    EXPECT_FALSE(ole::has_ole_magic(view(std::string("PK\x03\x04"))));
    fixture::OleWriter w;
    w.add_stream("S", "abc");
    std::string bytes = w.bytes().substr(0, 600);
    EXPECT_THROW(ole::CompoundFile{view(bytes)}, ole::OleError);
}
