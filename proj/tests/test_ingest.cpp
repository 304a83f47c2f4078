#include "aitrace/ingest.hpp"

#include "support/corpus.hpp"
#include "support/tempdir.hpp"

#include <gtest/gtest.h>

namespace fs = std::filesystem;
using namespace aitrace;
using namespace std::chrono;

namespace {

DocumentRecord record(const std::string& name, Timestamp modified) {
    DocumentRecord r;
    r.path = name;
    r.file_name = name;
    r.extension = extension_of(name);
    r.last_modified = modified;
    return r;
}

}  // namespace

TEST(Ingest, ExtensionIsFinalSuffixLowercased) {
    EXPECT_EQ(extension_of("Essay.PDF"), "pdf");
    EXPECT_EQ(extension_of("archive.tar.gz"), "gz");
    EXPECT_EQ(extension_of("README"), "");
    EXPECT_EQ(extension_of("trailing."), "");
    EXPECT_EQ(extension_of("report.DocX"), "docx");
}

TEST(Ingest, ParseDate) {
    EXPECT_EQ(parse_date("2022-11-22"), sys_seconds{sys_days{2022y / November / 22}});
    EXPECT_EQ(parse_date("2024-02-29"), sys_seconds{sys_days{2024y / February / 29}});
    EXPECT_FALSE(parse_date("2023-02-29"));
    EXPECT_FALSE(parse_date("2022-13-01"));
    EXPECT_FALSE(parse_date("2022/11/22"));
    EXPECT_FALSE(parse_date("22-11-2022"));
    EXPECT_FALSE(parse_date("2022-1-22"));
    EXPECT_FALSE(parse_date("2022-11-2x"));
}

TEST(Ingest, DefaultThresholdIsChatGptRelease) {
    EXPECT_EQ(format_date(default_threshold()), "2022-11-22 00:00:00 UTC");
}

TEST(Ingest, ExtensionGateComesFirst) {
    const auto old = sys_seconds{sys_days{2020y / January / 1}};
    const auto err = gate_file(record("notes.txt", old));
    ASSERT_TRUE(err);
    EXPECT_EQ(err->kind, GateErrorKind::UnsupportedExtension);
    EXPECT_EQ(gate_file(record("noext", default_threshold()))->kind, GateErrorKind::UnsupportedExtension);
}

TEST(Ingest, DateGateIsInclusiveOfThreshold) {
    const auto t = default_threshold();
    EXPECT_EQ(gate_file(record("a.pdf", t - seconds(1)))->kind, GateErrorKind::PreChatGPTDate);
    EXPECT_FALSE(gate_file(record("a.pdf", t)));
    EXPECT_FALSE(gate_file(record("a.DOC", t + hours(1))));
    const auto custom = *parse_date("2024-01-01");
    EXPECT_EQ(gate_file(record("a.docx", t), custom)->kind, GateErrorKind::PreChatGPTDate);
}

TEST(Ingest, FromPathReadsFilesystemMtime) {
    fixture::TempDir dir;
    const auto p = dir / "Essay.Docx";
    fixture::write_bytes(p, "x");
    const auto when = sys_seconds{sys_days{2023y / March / 4}} + hours(5) + minutes(6) + seconds(7);
    fs::last_write_time(p, file_clock::from_sys(when));
    const auto r = DocumentRecord::from_path(p);
    EXPECT_EQ(r.file_name, "Essay.Docx");
    EXPECT_EQ(r.extension, "docx");
    EXPECT_EQ(r.last_modified, when);
    EXPECT_EQ(format_date(r.last_modified), "2023-03-04 05:06:07 UTC");
}

TEST(Ingest, DiscoveryNonRecursiveSkipsDirectories) {
    fixture::TempDir dir;
    fixture::write_bytes(dir / "a.pdf", "x");
    fs::create_directories(dir / "sub");
    fixture::write_bytes(dir / "sub" / "b.pdf", "x");
    const std::vector<fs::path> inputs = {dir.path(), dir / "a.pdf"};
    const auto d = discover_files(inputs, false);
    ASSERT_EQ(d.records.size(), 1u);
    EXPECT_EQ(d.records[0].file_name, "a.pdf");
    ASSERT_EQ(d.issues.size(), 1u);
    EXPECT_FALSE(d.issues[0].error);
}

TEST(Ingest, DiscoveryRecursiveSortsAndDeduplicates) {
    fixture::TempDir dir;
    fixture::write_bytes(dir / "z.docx", "x");
    fixture::write_bytes(dir / "notes.txt", "x");
    fs::create_directories(dir / "sub");
    fixture::write_bytes(dir / "sub" / "a.pdf", "x");
    const std::vector<fs::path> inputs = {dir.path(), dir / "z.docx"};
    const auto d = discover_files(inputs, true);
    ASSERT_EQ(d.records.size(), 3u);  // unsupported files are still records; the gate rejects them
    for (std::size_t i = 1; i < d.records.size(); ++i) EXPECT_LT(d.records[i - 1].path, d.records[i].path);
    EXPECT_TRUE(d.issues.empty());
}

TEST(Ingest, MissingInputBecomesUnreadableIssue) {
    fixture::TempDir dir;
    const std::vector<fs::path> inputs = {dir / "gone.pdf"};
    const auto d = discover_files(inputs, true);
    EXPECT_TRUE(d.records.empty());
    ASSERT_EQ(d.issues.size(), 1u);
    ASSERT_TRUE(d.issues[0].error);
    EXPECT_EQ(d.issues[0].error->kind, GateErrorKind::Unreadable);
}
