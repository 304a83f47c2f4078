#include "aitrace/detect.hpp"

#include "support/docx_writer.hpp"
#include "support/tempdir.hpp"
#include "support/corpus.hpp"

#include <gtest/gtest.h>

using namespace aitrace;

namespace {

MentionFlags scan(std::string_view text, MatchMode mode = MatchMode::WordBoundary) {
    static const ToolSet tools = ToolSet::defaults();
    return detect_mentions(text, tools, mode);
}

DocumentRecord docx_record(const std::string& name = "essay.docx") {
    DocumentRecord r;
    r.path = name;
    r.file_name = name;
    r.extension = extension_of(name);
    r.last_modified = default_threshold();
    return r;
}

}  // namespace

TEST(Census, CountsEachCategory) {
    const auto c = census_characters("\"a\" 'b' “c” ‘d’ — – … \xC2\xA0");
    EXPECT_EQ(c.ascii_double, 2u);
    EXPECT_EQ(c.ascii_single, 2u);
    EXPECT_EQ(c.curly_double, 2u);
    EXPECT_EQ(c.curly_single, 2u);
    EXPECT_EQ(c.aux_count(AuxPunct::EmDash), 1u);
    EXPECT_EQ(c.aux_count(AuxPunct::EnDash), 1u);
    EXPECT_EQ(c.aux_count(AuxPunct::Ellipsis), 1u);
    EXPECT_EQ(c.aux_count(AuxPunct::Nbsp), 1u);
    EXPECT_EQ(count_traces(c), 4u);
}

TEST(Census, LookalikesAreNotCounted) {
    // Low-9 quotes, guillemets, primes, backtick and acute accent.
    const auto c = census_characters("‚„«»′″`´");
    EXPECT_EQ(c, CharCensus{});
}

TEST(Census, MalformedBytesCountAsNothing) {
    const auto c = census_characters("\xE2\x80" "\"\xFF'");
    EXPECT_EQ(c.ascii_double, 1u);
    EXPECT_EQ(c.ascii_single, 1u);
    EXPECT_EQ(c.curly_total(), 0u);
}

TEST(Mentions, ChatGptSpellings) {
    for (const char* s : {"ChatGPT", "chatgpt", "Chat gpt", "CHAT  GPT", "chat\tgpt", "(ChatGPT)", "ChatGPT-4o"}) {
        EXPECT_TRUE(scan(s)["chatgpt"]) << s;
    }
    EXPECT_FALSE(scan("chat about gpt")["chatgpt"]);
}

TEST(Mentions, WordBoundaryRejectsEmbeddedNames) {
    const auto f = scan("A metaphor about metadata, a category of grokking.");
    EXPECT_FALSE(f.any());
    EXPECT_TRUE(scan("Meta's Llama model")["llama_meta"]);
    EXPECT_TRUE(scan("used Copilot.")["copilot"]);
    EXPECT_TRUE(scan("llama3")["llama_meta"]);  // digits are boundaries
}

TEST(Mentions, NaiveModeMatchesSubstrings) {
    EXPECT_TRUE(scan("metaphor", MatchMode::Naive)["llama_meta"]);
    EXPECT_TRUE(scan("grokking", MatchMode::Naive)["grok"]);
    EXPECT_FALSE(scan("category", MatchMode::Naive).any());
}

TEST(Mentions, NbspBetweenWordsStillMatches) {
    EXPECT_TRUE(scan("chat\xC2\xA0gpt")["chatgpt"]);
}

TEST(Mentions, FlagsFollowToolOrder) {
    const auto f = scan("Claude and Gemini");
    ASSERT_EQ(f.entries.size(), 8u);
    EXPECT_EQ(f.entries[0].id, "chatgpt");
    EXPECT_EQ(f.entries[7].id, "deepseek");
    EXPECT_TRUE(f["claude"]);
    EXPECT_TRUE(f["gemini"]);
    EXPECT_FALSE(f["chatgpt"]);
    EXPECT_FALSE(f["unknown_tool"]);
}

TEST(Classify, RulesInOrder) {
    auto census = [](std::size_t ascii, std::size_t curly) {
        CharCensus c;
        c.ascii_single = ascii;
        c.curly_double = curly;
        return c;
    };
    const auto none = scan("");
    const auto ack = scan("ChatGPT");
    EXPECT_EQ(classify(census(0, 3), ack), Verdict::NoTraces);
    EXPECT_EQ(classify(census(2, 0), none), Verdict::AllAscii);
    EXPECT_EQ(classify(census(2, 0), ack), Verdict::AllAscii);
    EXPECT_EQ(classify(census(2, 1), ack), Verdict::Acknowledged);
    EXPECT_EQ(classify(census(2, 1), none), Verdict::Unacknowledged);
    EXPECT_EQ(color_of(Verdict::Unacknowledged), Color::Red);
    EXPECT_EQ(color_of(Verdict::Acknowledged), Color::Green);
    EXPECT_EQ(color_of(Verdict::NoTraces), Color::Green);
    EXPECT_EQ(color_of(Verdict::AllAscii), Color::Grey);
}

TEST(ToolConfig, ParsesFileFormat) {
    const auto set = ToolSet::parse("\xEF\xBB\xBF# comment\n\nPerplexity = word:perplexity|pplx\r\n"
                                    "Mistral AI = regex:mistral\\s*ai\n");
    ASSERT_EQ(set.size(), 2u);
    EXPECT_EQ(set.tools()[0].id, "perplexity");
    EXPECT_EQ(set.tools()[1].id, "mistral_ai");
    EXPECT_EQ(set.tools()[1].label, "Mistral AI");
    EXPECT_TRUE(detect_mentions("used PPLX", set)["perplexity"]);
    EXPECT_TRUE(detect_mentions("MISTRAL   AI", set)["mistral_ai"]);
}

TEST(ToolConfig, ShippedConfigEqualsDefaults) {
    const auto shipped = ToolSet::load(std::filesystem::path(AITRACE_SOURCE_DIR) / "config" / "tools.conf");
    const auto builtin = ToolSet::defaults();
    ASSERT_EQ(shipped.size(), builtin.size());
    for (std::size_t i = 0; i < shipped.size(); ++i) {
        EXPECT_EQ(shipped.tools()[i].label, builtin.tools()[i].label);
        EXPECT_EQ(shipped.tools()[i].source, builtin.tools()[i].source);
    }
}

TEST(ToolConfig, ErrorsNameTheLine) {
    auto message = [](std::string_view cfg) {
        try {
            ToolSet::parse(cfg);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    EXPECT_EQ(message("A = word:a\nnot a rule"), "line 2: expected 'Label = kind:pattern'");
    EXPECT_NE(message("A = glob:a").find("unknown pattern kind"), std::string::npos);
    EXPECT_NE(message("A = regex:(unclosed").find("line 1: invalid regex"), std::string::npos);
    EXPECT_NE(message("A = word:a\nA = word:b").find("duplicate"), std::string::npos);
    EXPECT_NE(message("A = word:a||b").find("empty alternative"), std::string::npos);
    EXPECT_EQ(message("# only comments\n"), "tool list is empty");
    EXPECT_EQ(tool_id("Llama/Meta"), "llama_meta");
}

TEST(ScanDocument, FullPipeline) {
    const std::string docx = fixture::make_docx({"He said \"yes\" — it’s “done”.", "Thanks to Claude."});
    const auto r = scan_document(docx_record(), as_bytes(docx));
    ASSERT_FALSE(r.error);
    EXPECT_EQ(r.ai_traces, 2u);
    EXPECT_EQ(r.verdict, Verdict::Acknowledged);
    EXPECT_TRUE(r.mentions["claude"]);
    ASSERT_FALSE(r.warnings.empty());
    EXPECT_EQ(r.warnings.back(), "non-ASCII punctuation: em_dash x1");
}

TEST(ScanDocument, GateFailureSkipsExtraction) {
    auto rec = docx_record("old.docx");
    rec.last_modified -= std::chrono::seconds(1);
    const auto r = scan_document(rec, as_bytes("not even a zip"));
    ASSERT_TRUE(r.error);
    EXPECT_EQ(r.error->kind_name(), "PreChatGPTDate");
    EXPECT_FALSE(r.verdict);
    EXPECT_FALSE(r.ai_traces);
}

TEST(ScanDocument, ExtractionErrorBecomesErrorRow) {
    const auto r = scan_document(docx_record(), as_bytes("not even a zip"));
    ASSERT_TRUE(r.error);
    EXPECT_EQ(r.error->kind_name(), "CorruptContainer");
    EXPECT_FALSE(r.mentions.any());
    EXPECT_EQ(r.mentions.entries.size(), 8u);
}

TEST(ScanFile, ReadsFromDisk) {
    fixture::TempDir dir;
    fixture::write_bytes(dir / "a.docx", fixture::make_docx({"Mixed \"straight\" and “curly”."}));
    const auto r = scan_file(DocumentRecord::from_path(dir / "a.docx"));
    ASSERT_FALSE(r.error);
    EXPECT_EQ(r.verdict, Verdict::Unacknowledged);
    EXPECT_EQ(r.ai_traces, 2u);
}

TEST(ScanFile, VanishedFileIsUnreadable) {
    fixture::TempDir dir;
    auto rec = docx_record("gone.docx");
    rec.path = dir / "gone.docx";
    const auto r = scan_file(rec);
    ASSERT_TRUE(r.error);
    EXPECT_EQ(r.error->kind_name(), "Unreadable");
}
