#include "aitrace/report.hpp"

#include "aitrace/utf8.hpp"
#include "aitrace/xml.hpp"
#include "aitrace/zip.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <system_error>

namespace aitrace {

namespace {

// XML 1.0 cannot carry most C0 controls, and a bare CR does not survive a
// round trip through a spreadsheet reader, so both exports see the same
// cleaned text.
std::string clean_cell(std::string_view raw) {
    const std::string valid = utf8::sanitize(raw);
    std::string out;
    out.reserve(valid.size());
    std::size_t pos = 0;
    while (pos < valid.size()) {
        const char32_t c = utf8::next(valid, pos);
        const bool bad_control = c < 0x20 && c != '\t' && c != '\n';
        if (bad_control || c == 0x7F || c == 0xFFFE || c == 0xFFFF) {
            utf8::append(out, 0xFFFD);
        } else {
            utf8::append(out, c);
        }
    }
    return out;
}

std::string verdict_cell(const ScanResult& r) {
    if (r.error) return "ERROR: " + std::string(r.error->kind_name());
    return r.verdict ? std::string(to_string(*r.verdict)) : std::string();
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += sep;
        out += parts[i];
    }
    return out;
}

bool result_less(const ScanResult& a, const ScanResult& b) {
    if (a.file_name != b.file_name) return a.file_name < b.file_name;
    return a.path.native() < b.path.native();
}

void write_file(const std::filesystem::path& out, std::string_view data) {
    std::filesystem::path tmp = out;
    tmp += ".part";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw ExportError("cannot create " + tmp.string());
        f.write(data.data(), static_cast<std::streamsize>(data.size()));
        f.flush();
        if (!f) {
            f.close();
            std::error_code ignored;
            std::filesystem::remove(tmp, ignored);
            throw ExportError("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, out, ec);
    if (ec) {
        std::error_code ignored;
        std::filesystem::remove(tmp, ignored);
        throw ExportError("cannot move report into place at " + out.string() + ": " + ec.message());
    }
}

void csv_field(std::string& out, std::string_view cell) {
    const bool quote = cell.find_first_of(",\"\r\n") != std::string_view::npos;
    if (!quote) {
        out += cell;
        return;
    }
    out.push_back('"');
    for (const char c : cell) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
}

// Style indices into cellXfs below.
enum Style : int { kDefault = 0, kHeader = 1, kGreen = 2, kRed = 3, kGrey = 4 };

int verdict_style(const std::optional<Verdict>& v) {
    if (!v) return kDefault;
    switch (color_of(*v)) {
        case Color::Green:
            return kGreen;
        case Color::Red:
            return kRed;
        case Color::Grey:
            return kGrey;
    }
    return kDefault;
}

constexpr std::string_view kContentTypes =
    R"(<?xml version="1.0" encoding="UTF-8" standalone="yes"?>)"
    "\n"
    R"(<Types xmlns="http://schemas.openxmlformats.org/package/2006/content-types">)"
    R"(<Default Extension="rels" ContentType="application/vnd.openxmlformats-package.relationships+xml"/>)"
    R"(<Default Extension="xml" ContentType="application/xml"/>)"
    R"(<Override PartName="/xl/workbook.xml" ContentType="application/vnd.openxmlformats-officedocument.spreadsheetml.sheet.main+xml"/>)"
    R"(<Override PartName="/xl/worksheets/sheet1.xml" ContentType="application/vnd.openxmlformats-officedocument.spreadsheetml.worksheet+xml"/>)"
    R"(<Override PartName="/xl/styles.xml" ContentType="application/vnd.openxmlformats-officedocument.spreadsheetml.styles+xml"/>)"
    R"(</Types>)";

constexpr std::string_view kRootRels =
    R"(<?xml version="1.0" encoding="UTF-8" standalone="yes"?>)"
    "\n"
    R"(<Relationships xmlns="http://schemas.openxmlformats.org/package/2006/relationships">)"
    R"(<Relationship Id="rId1" Type="http://schemas.openxmlformats.org/officeDocument/2006/relationships/officeDocument" Target="xl/workbook.xml"/>)"
    R"(</Relationships>)";

constexpr std::string_view kWorkbookRels =
    R"(<?xml version="1.0" encoding="UTF-8" standalone="yes"?>)"
    "\n"
    R"(<Relationships xmlns="http://schemas.openxmlformats.org/package/2006/relationships">)"
    R"(<Relationship Id="rId1" Type="http://schemas.openxmlformats.org/officeDocument/2006/relationships/worksheet" Target="worksheets/sheet1.xml"/>)"
    R"(<Relationship Id="rId2" Type="http://schemas.openxmlformats.org/officeDocument/2006/relationships/styles" Target="styles.xml"/>)"
    R"(</Relationships>)";

std::string styles_xml() {
    std::string s =
        R"(<?xml version="1.0" encoding="UTF-8" standalone="yes"?>)"
        "\n"
        R"(<styleSheet xmlns="http://schemas.openxmlformats.org/spreadsheetml/2006/main">)"
        R"(<fonts count="2">)"
        R"(<font><sz val="11"/><name val="Calibri"/><family val="2"/></font>)"
        R"(<font><b/><sz val="11"/><name val="Calibri"/><family val="2"/></font>)"
        R"(</fonts>)"
        R"(<fills count="5">)"
        R"(<fill><patternFill patternType="none"/></fill>)"
        R"(<fill><patternFill patternType="gray125"/></fill>)";
    for (const std::string_view argb : {kFillGreen, kFillRed, kFillGrey}) {
        s += R"(<fill><patternFill patternType="solid"><fgColor rgb=")";
        s += argb;
        s += R"("/><bgColor indexed="64"/></patternFill></fill>)";
    }
    s += R"(</fills>)"
         R"(<borders count="1"><border><left/><right/><top/><bottom/><diagonal/></border></borders>)"
         R"(<cellStyleXfs count="1"><xf numFmtId="0" fontId="0" fillId="0" borderId="0"/></cellStyleXfs>)"
         R"(<cellXfs count="5">)"
         R"(<xf numFmtId="0" fontId="0" fillId="0" borderId="0" xfId="0"/>)"
         R"(<xf numFmtId="0" fontId="1" fillId="0" borderId="0" xfId="0" applyFont="1"/>)"
         R"(<xf numFmtId="0" fontId="0" fillId="2" borderId="0" xfId="0" applyFill="1"/>)"
         R"(<xf numFmtId="0" fontId="0" fillId="3" borderId="0" xfId="0" applyFill="1"/>)"
         R"(<xf numFmtId="0" fontId="0" fillId="4" borderId="0" xfId="0" applyFill="1"/>)"
         R"(</cellXfs>)"
         R"(<cellStyles count="1"><cellStyle name="Normal" xfId="0" builtinId="0"/></cellStyles>)"
         R"(</styleSheet>)";
    return s;
}

std::string quoted_sheet_ref(std::size_t last_col, std::size_t last_row) {
    std::string name(kSheetName);
    std::string quoted = "'";
    for (const char c : name) {
        if (c == '\'') quoted.push_back('\'');
        quoted.push_back(c);
    }
    quoted += "'!$A$1:$" + column_letters(last_col) + "$" + std::to_string(last_row);
    return quoted;
}

std::string workbook_xml(std::size_t last_col, std::size_t last_row) {
    std::string s =
        R"(<?xml version="1.0" encoding="UTF-8" standalone="yes"?>)"
        "\n"
        R"(<workbook xmlns="http://schemas.openxmlformats.org/spreadsheetml/2006/main" )"
        R"(xmlns:r="http://schemas.openxmlformats.org/officeDocument/2006/relationships">)"
        R"(<sheets><sheet name=")";
    s += xml::escape(kSheetName, true);
    s += R"(" sheetId="1" r:id="rId1"/></sheets>)";
    s += R"(<definedNames><definedName name="_xlnm._FilterDatabase" localSheetId="0" hidden="1">)";
    s += xml::escape(quoted_sheet_ref(last_col, last_row));
    s += R"(</definedName></definedNames></workbook>)";
    return s;
}

void inline_string_cell(std::string& s, const std::string& ref, int style, std::string_view text) {
    s += R"(<c r=")" + ref + R"(" t="inlineStr")";
    if (style != kDefault) s += R"( s=")" + std::to_string(style) + '"';
    s += R"(><is><t xml:space="preserve">)";
    s += xml::escape(text);
    s += "</t></is></c>";
}

std::string sheet_xml(const ReportTable& table) {
    const std::size_t ncols = table.columns.size();
    const std::size_t last_col = ncols == 0 ? 0 : ncols - 1;
    const std::size_t last_row = table.rows.size() + 1;
    const std::string range = "A1:" + column_letters(last_col) + std::to_string(last_row);

    std::string s =
        R"(<?xml version="1.0" encoding="UTF-8" standalone="yes"?>)"
        "\n"
        R"(<worksheet xmlns="http://schemas.openxmlformats.org/spreadsheetml/2006/main">)";
    s += R"(<dimension ref=")" + range + R"("/>)";
    s += R"(<sheetViews><sheetView workbookViewId="0">)"
         R"(<pane ySplit="1" topLeftCell="A2" activePane="bottomLeft" state="frozen"/>)"
         R"(</sheetView></sheetViews>)";
    s += R"(<sheetFormatPr defaultRowHeight="15"/>)";
    if (ncols > 0) {
        s += "<cols>";
        for (std::size_t c = 0; c < ncols; ++c) {
            const char* width = c == 0 ? "36" : (c + 1 == ncols ? "60" : "20");
            s += R"(<col min=")" + std::to_string(c + 1) + R"(" max=")" + std::to_string(c + 1) + R"(" width=")" +
                 width + R"(" customWidth="1"/>)";
        }
        s += "</cols>";
    }
    s += "<sheetData>";
    s += R"(<row r="1">)";
    for (std::size_t c = 0; c < ncols; ++c) {
        inline_string_cell(s, column_letters(c) + "1", kHeader, table.columns[c]);
    }
    s += "</row>";
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const ReportRow& row = table.rows[r];
        const std::string rownum = std::to_string(r + 2);
        s += R"(<row r=")" + rownum + R"(">)";
        for (std::size_t c = 0; c < row.cells.size() && c < ncols; ++c) {
            const std::string& text = row.cells[c];
            const std::string ref = column_letters(c) + rownum;
            int style = kDefault;
            if (c == 0) {
                style = verdict_style(row.verdict);
            } else if (table.is_mention_column(c)) {
                style = text == "Yes" ? kGreen : kRed;
            }
            if (c == 1 && row.ai_traces) {
                s += R"(<c r=")" + ref + R"("><v>)" + std::to_string(*row.ai_traces) + "</v></c>";
                continue;
            }
            if (text.empty() && style == kDefault) continue;
            inline_string_cell(s, ref, style, text);
        }
        s += "</row>";
    }
    s += "</sheetData>";
    if (ncols > 0) s += R"(<autoFilter ref=")" + range + R"("/>)";
    s += R"(<pageMargins left="0.7" right="0.7" top="0.75" bottom="0.75" header="0.3" footer="0.3"/>)";
    s += "</worksheet>";
    return s;
}

}  // namespace

void sort_results(std::vector<ScanResult>& results) { std::stable_sort(results.begin(), results.end(), result_less); }

ReportTable build_table(std::span<const ScanResult> results, const ToolSet& tools) {
    ReportTable table;
    table.columns = {"File Name", "AI Traces"};
    for (const auto& t : tools.tools()) table.columns.push_back(t.label + " Mentioned");
    table.columns.emplace_back("Verdict");
    table.columns.emplace_back("Warnings");
    table.first_mention_column = 2;
    table.mention_columns = tools.size();
    for (auto& c : table.columns) c = clean_cell(c);

    std::vector<const ScanResult*> ordered;
    ordered.reserve(results.size());
    for (const auto& r : results) ordered.push_back(&r);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const ScanResult* a, const ScanResult* b) { return result_less(*a, *b); });

    for (const ScanResult* r : ordered) {
        ReportRow row;
        row.verdict = r->error ? std::nullopt : r->verdict;
        row.ai_traces = r->error ? std::nullopt : r->ai_traces;
        row.cells.push_back(clean_cell(r->file_name));
        row.cells.push_back(row.ai_traces ? std::to_string(*row.ai_traces) : std::string());
        for (const auto& t : tools.tools()) {
            row.cells.emplace_back(!r->error && r->mentions[t.id] ? "Yes" : "No");
        }
        row.cells.push_back(verdict_cell(*r));
        std::vector<std::string> notes;
        if (r->error) notes.push_back(r->error->detail);
        notes.insert(notes.end(), r->warnings.begin(), r->warnings.end());
        row.cells.push_back(clean_cell(join(notes, "; ")));
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string to_csv(const ReportTable& table) {
    std::string out;
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i > 0) out.push_back(',');
            csv_field(out, cells[i]);
        }
        out += "\r\n";
    };
    line(table.columns);
    for (const auto& row : table.rows) line(row.cells);
    return out;
}

std::vector<std::byte> to_xlsx(const ReportTable& table) {
    const std::size_t last_col = table.columns.empty() ? 0 : table.columns.size() - 1;
    const std::size_t last_row = table.rows.size() + 1;
    zip::Writer zip;
    zip.add("[Content_Types].xml", kContentTypes);
    zip.add("_rels/.rels", kRootRels);
    zip.add("xl/workbook.xml", workbook_xml(last_col, last_row));
    zip.add("xl/_rels/workbook.xml.rels", kWorkbookRels);
    zip.add("xl/styles.xml", styles_xml());
    zip.add("xl/worksheets/sheet1.xml", sheet_xml(table));
    return zip.finish();
}

std::size_t write_csv(const ReportTable& table, const std::filesystem::path& out) {
    const std::string data = to_csv(table);
    write_file(out, data);
    return data.size();
}

std::size_t write_xlsx(const ReportTable& table, const std::filesystem::path& out) {
    const std::vector<std::byte> data = to_xlsx(table);
    write_file(out, {reinterpret_cast<const char*>(data.data()), data.size()});
    return data.size();
}

std::string render_terminal_summary(std::span<const ScanResult> results, const ToolSet& tools,
                                    const TerminalOptions& options) {
    std::vector<const ScanResult*> ordered;
    for (const auto& r : results) ordered.push_back(&r);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const ScanResult* a, const ScanResult* b) { return result_less(*a, *b); });

    auto paint = [&](std::string_view code, std::string_view text) {
        if (!options.color) return std::string(text);
        return "\x1b[" + std::string(code) + "m" + std::string(text) + "\x1b[0m";
    };

    std::size_t red = 0, green = 0, grey = 0, errors = 0;
    std::string out;
    for (const ScanResult* r : ordered) {
        const std::string name = clean_cell(r->file_name);
        if (r->error) {
            ++errors;
            out += paint("1;35", "[ERROR]") + " " + name + "  " + std::string(r->error->kind_name()) + ": " +
                   clean_cell(r->error->detail) + "\n";
            continue;
        }
        const Verdict v = r->verdict.value_or(Verdict::NoTraces);
        std::string tag;
        switch (color_of(v)) {
            case Color::Green:
                ++green;
                tag = paint("32", "[GREEN]");
                break;
            case Color::Red:
                ++red;
                tag = paint("31", "[RED]  ");
                break;
            case Color::Grey:
                ++grey;
                tag = paint("90", "[GREY] ");
                break;
        }
        out += tag + " " + name + "  traces=" + std::to_string(r->ai_traces.value_or(0)) + "  " +
               std::string(to_string(v));
        std::vector<std::string> named;
        for (const auto& t : tools.tools()) {
            if (r->mentions[t.id]) named.push_back(t.label);
        }
        if (!named.empty()) out += "  mentions: " + clean_cell(join(named, ", "));
        out += "\n";
    }
    out += std::to_string(ordered.size()) + " scanned, " + std::to_string(red) + " red, " + std::to_string(green) +
           " green, " + std::to_string(grey) + " ambiguous, " + std::to_string(errors) + " errors\n";
    return out;
}

std::string default_report_stem(Timestamp now) {
    const auto day = std::chrono::floor<std::chrono::days>(now);
    const std::chrono::year_month_day ymd{day};
    const std::chrono::hh_mm_ss<std::chrono::seconds> tod{now - day};
    char buf[64];
    std::snprintf(buf, sizeof buf, "ai_detection_results-%04d%02u%02u-%02d%02d%02d", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                  static_cast<int>(tod.seconds().count()));
    return buf;
}

std::string column_letters(std::size_t index) {
    std::string s;
    ++index;
    while (index > 0) {
        const std::size_t rem = (index - 1) % 26;
        s.insert(s.begin(), static_cast<char>('A' + rem));
        index = (index - 1) / 26;
    }
    return s;
}

}  // namespace aitrace
