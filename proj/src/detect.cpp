#include "aitrace/detect.hpp"

#include "aitrace/utf8.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace aitrace {

namespace {

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool is_unicode_space(char32_t c) {
    return c == 0x00A0 || c == 0x1680 || (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 ||
           c == 0x202F || c == 0x205F || c == 0x3000;
}

// Rough letter test. Tool names are ASCII, so what matters is that accented
// and non-Latin letters glued to a name block the match while punctuation,
// digits and symbols do not.
bool is_letter(char32_t c) {
    if (c < 0x80) return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
    if (c == utf8::kInvalid) return false;
    if (c < 0xC0) return c == 0xAA || c == 0xB5 || c == 0xBA;
    if (c == 0xD7 || c == 0xF7) return false;
    if (c >= 0x2000 && c <= 0x2BFF) return false;  // punctuation, symbols, arrows, dingbats
    if (c >= 0x3000 && c <= 0x303F) return false;
    if (c >= 0xFE30 && c <= 0xFE4F) return false;
    if (c >= 0xFF00 && c <= 0xFF20) return false;
    if (c >= 0xFFF0) return false;
    return true;
}

// ASCII-lowercased copy with Unicode spaces turned into ' ', so that the
// same patterns apply to "Chat GPT" typed with a no-break space.
std::string matching_text(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto b = static_cast<unsigned char>(text[pos]);
        if (b < 0x80) {
            out.push_back(ascii_lower(static_cast<char>(b)));
            ++pos;
            continue;
        }
        const std::size_t start = pos;
        const char32_t c = utf8::next(text, pos);
        if (is_unicode_space(c)) {
            out.push_back(' ');
        } else {
            out.append(text.substr(start, pos - start));
        }
    }
    return out;
}

char32_t codepoint_before(std::string_view text, std::size_t pos) {
    if (pos == 0) return ' ';
    std::size_t start = pos - 1;
    while (start > 0 && pos - start < 4 && (static_cast<unsigned char>(text[start]) & 0xC0) == 0x80) --start;
    std::size_t p = start;
    const char32_t c = utf8::next(text, p);
    return p == pos ? c : utf8::kInvalid;
}

char32_t codepoint_at(std::string_view text, std::size_t pos) {
    if (pos >= text.size()) return ' ';
    return utf8::next(text, pos);
}

bool word_match(std::string_view haystack, std::string_view word, MatchMode mode) {
    if (word.empty()) return false;
    std::size_t pos = 0;
    while ((pos = haystack.find(word, pos)) != std::string_view::npos) {
        if (mode == MatchMode::Naive) return true;
        if (!is_letter(codepoint_before(haystack, pos)) && !is_letter(codepoint_at(haystack, pos + word.size()))) {
            return true;
        }
        ++pos;
    }
    return false;
}

}  // namespace

char32_t codepoint_of(AuxPunct p) {
    switch (p) {
        case AuxPunct::EmDash:
            return 0x2014;
        case AuxPunct::EnDash:
            return 0x2013;
        case AuxPunct::Ellipsis:
            return 0x2026;
        case AuxPunct::Nbsp:
            return 0x00A0;
    }
    return 0;
}

std::string_view to_string(AuxPunct p) {
    switch (p) {
        case AuxPunct::EmDash:
            return "em_dash";
        case AuxPunct::EnDash:
            return "en_dash";
        case AuxPunct::Ellipsis:
            return "ellipsis";
        case AuxPunct::Nbsp:
            return "nbsp";
    }
    return "";
}

CharCensus& CharCensus::operator+=(const CharCensus& other) {
    ascii_double += other.ascii_double;
    ascii_single += other.ascii_single;
    curly_double += other.curly_double;
    curly_single += other.curly_single;
    for (std::size_t i = 0; i < aux.size(); ++i) aux[i] += other.aux[i];
    return *this;
}

CharCensus census_characters(std::string_view text) {
    CharCensus c;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto b = static_cast<unsigned char>(text[pos]);
        if (b < 0x80) {
            if (b == 0x22) ++c.ascii_double;
            if (b == 0x27) ++c.ascii_single;
            ++pos;
            continue;
        }
        switch (utf8::next(text, pos)) {
            case 0x201C:
            case 0x201D:
                ++c.curly_double;
                break;
            case 0x2018:
            case 0x2019:
                ++c.curly_single;
                break;
            case 0x2014:
                ++c.aux[static_cast<std::size_t>(AuxPunct::EmDash)];
                break;
            case 0x2013:
                ++c.aux[static_cast<std::size_t>(AuxPunct::EnDash)];
                break;
            case 0x2026:
                ++c.aux[static_cast<std::size_t>(AuxPunct::Ellipsis)];
                break;
            case 0x00A0:
                ++c.aux[static_cast<std::size_t>(AuxPunct::Nbsp)];
                break;
            default:
                break;
        }
    }
    return c;
}

std::size_t count_traces(const CharCensus& census) { return census.ascii_double + census.ascii_single; }

std::string tool_id(std::string_view label) {
    std::string id;
    for (const char c : label) {
        const char l = ascii_lower(c);
        const bool alnum = (l >= 'a' && l <= 'z') || (l >= '0' && l <= '9');
        if (alnum) {
            id.push_back(l);
        } else if (!id.empty() && id.back() != '_') {
            id.push_back('_');
        }
    }
    while (!id.empty() && id.back() == '_') id.pop_back();
    return id;
}

void ToolSet::add(std::string label, MatchKind kind, std::string pattern) {
    ToolPattern tool;
    tool.id = tool_id(label);
    if (tool.id.empty()) throw ConfigError("tool label '" + label + "' has no letters or digits");
    for (const auto& t : tools_) {
        if (t.id == tool.id) throw ConfigError("duplicate tool '" + label + "'");
    }
    tool.label = std::move(label);
    tool.kind = kind;
    tool.source = pattern;
    if (kind == MatchKind::Word) {
        std::string_view rest = pattern;
        while (true) {
            const auto bar = rest.find('|');
            const std::string_view alt = trim(rest.substr(0, bar));
            if (alt.empty()) throw ConfigError("empty alternative in pattern '" + pattern + "'");
            std::string lowered;
            for (const char c : alt) lowered.push_back(ascii_lower(c));
            tool.words.push_back(std::move(lowered));
            if (bar == std::string_view::npos) break;
            rest.remove_prefix(bar + 1);
        }
    } else {
        if (pattern.empty()) throw ConfigError("empty regex for tool '" + tool.label + "'");
        try {
            tool.regex.emplace(pattern, std::regex::ECMAScript | std::regex::icase | std::regex::optimize);
        } catch (const std::regex_error& e) {
            throw ConfigError("invalid regex '" + pattern + "': " + e.what());
        }
    }
    tools_.push_back(std::move(tool));
}

ToolSet ToolSet::defaults() {
    ToolSet set;
    set.add("ChatGPT", MatchKind::Regex, R"(chat\s*gpt)");
    set.add("Grammarly", MatchKind::Word, "grammarly");
    set.add("Claude", MatchKind::Word, "claude");
    set.add("Gemini", MatchKind::Word, "gemini");
    set.add("Llama/Meta", MatchKind::Word, "llama|meta");
    set.add("Copilot", MatchKind::Word, "copilot");
    set.add("Grok", MatchKind::Word, "grok");
    set.add("DeepSeek", MatchKind::Word, "deepseek");
    return set;
}

ToolSet ToolSet::parse(std::string_view config) {
    ToolSet set;
    std::size_t line_no = 0;
    while (!config.empty()) {
        ++line_no;
        const auto nl = config.find('\n');
        std::string_view line = trim(config.substr(0, nl));
        config = nl == std::string_view::npos ? std::string_view{} : config.substr(nl + 1);
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line = trim(line.substr(3));
        if (line.empty() || line.front() == '#') continue;

        const std::string where = "line " + std::to_string(line_no) + ": ";
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(where + "expected 'Label = kind:pattern'");
        const std::string_view label = trim(line.substr(0, eq));
        const std::string_view spec = trim(line.substr(eq + 1));
        const auto colon = spec.find(':');
        if (label.empty()) throw ConfigError(where + "missing label");
        if (colon == std::string_view::npos) throw ConfigError(where + "expected kind:pattern after '='");
        const std::string_view kind = trim(spec.substr(0, colon));
        const std::string_view pattern = trim(spec.substr(colon + 1));
        MatchKind mk;
        if (kind == "word") {
            mk = MatchKind::Word;
        } else if (kind == "regex") {
            mk = MatchKind::Regex;
        } else {
            throw ConfigError(where + "unknown pattern kind '" + std::string(kind) + "' (use word or regex)");
        }
        try {
            set.add(std::string(label), mk, std::string(pattern));
        } catch (const ConfigError& e) {
            throw ConfigError(where + e.what());
        }
    }
    if (set.tools_.empty()) throw ConfigError("tool list is empty");
    return set;
}

ToolSet ToolSet::load(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigError("cannot open tools file " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse(buf.str());
    } catch (const ConfigError& e) {
        throw ConfigError(file.string() + ": " + e.what());
    }
}

bool MentionFlags::operator[](std::string_view id) const {
    for (const auto& e : entries) {
        if (e.id == id) return e.found;
    }
    return false;
}

bool MentionFlags::any() const {
    return std::any_of(entries.begin(), entries.end(), [](const Entry& e) { return e.found; });
}

MentionFlags MentionFlags::none(const ToolSet& tools) {
    MentionFlags flags;
    for (const auto& t : tools.tools()) flags.entries.push_back({t.id, false});
    return flags;
}

MentionFlags detect_mentions(std::string_view text, const ToolSet& tools, MatchMode mode) {
    const std::string haystack = matching_text(text);
    MentionFlags flags;
    flags.entries.reserve(tools.size());
    for (const auto& tool : tools.tools()) {
        bool found = false;
        if (tool.kind == MatchKind::Word) {
            found = std::any_of(tool.words.begin(), tool.words.end(),
                                [&](const std::string& w) { return word_match(haystack, w, mode); });
        } else if (tool.regex) {
            found = std::regex_search(haystack, *tool.regex);
        }
        flags.entries.push_back({tool.id, found});
    }
    return flags;
}

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::NoTraces:
            return "NoTraces";
        case Verdict::Acknowledged:
            return "Acknowledged";
        case Verdict::Unacknowledged:
            return "Unacknowledged";
        case Verdict::AllAscii:
            return "AllAscii";
    }
    return "";
}

Color color_of(Verdict v) {
    switch (v) {
        case Verdict::NoTraces:
        case Verdict::Acknowledged:
            return Color::Green;
        case Verdict::Unacknowledged:
            return Color::Red;
        case Verdict::AllAscii:
            return Color::Grey;
    }
    return Color::Grey;
}

Verdict classify(const CharCensus& census, const MentionFlags& mentions) {
    if (census.ascii_total() == 0) return Verdict::NoTraces;
    if (census.curly_total() == 0) return Verdict::AllAscii;
    if (mentions.any()) return Verdict::Acknowledged;
    return Verdict::Unacknowledged;
}

std::string_view ScanError::kind_name() const {
    return std::visit([](auto k) { return to_string(k); }, kind);
}

namespace {

ScanResult blank_result(const DocumentRecord& record, const ToolSet& tools) {
    ScanResult r;
    r.path = record.path;
    r.file_name = record.file_name;
    r.mentions = MentionFlags::none(tools);
    return r;
}

std::string aux_warning(const CharCensus& census) {
    std::string parts;
    for (const AuxPunct p : kAuxPuncts) {
        const std::size_t n = census.aux_count(p);
        if (n == 0) continue;
        if (!parts.empty()) parts += ", ";
        parts += std::string(to_string(p)) + " x" + std::to_string(n);
    }
    return parts.empty() ? parts : "non-ASCII punctuation: " + parts;
}

ScanResult scan_gated(const DocumentRecord& record, Bytes bytes, const ScanOptions& options, const ToolSet& tools) {
    ScanResult r = blank_result(record, tools);
    try {
        ExtractedText extracted = extract(record, bytes);
        r.warnings = std::move(extracted.warnings);
        r.census = census_characters(extracted.text);
        r.mentions = detect_mentions(extracted.text, tools, options.mode);
        r.ai_traces = count_traces(r.census);
        r.verdict = classify(r.census, r.mentions);
        if (std::string aux = aux_warning(r.census); !aux.empty()) r.warnings.push_back(std::move(aux));
    } catch (const ExtractError& e) {
        r.error = ScanError{e.kind(), e.what()};
    } catch (const std::bad_alloc&) {
        r.error = ScanError{ExtractErrorKind::UnsupportedFeature, "document too large to process"};
    } catch (const std::exception& e) {
        r.error = ScanError{ExtractErrorKind::CorruptContainer, e.what()};
    }
    if (r.error) {
        r.mentions = MentionFlags::none(tools);
        r.ai_traces.reset();
        r.verdict.reset();
        r.census = {};
    }
    return r;
}

}  // namespace

ScanResult scan_document(const DocumentRecord& record, Bytes bytes, const ScanOptions& options) {
    const ToolSet fallback = options.tools ? ToolSet{} : ToolSet::defaults();
    const ToolSet& tools = options.tools ? *options.tools : fallback;
    if (auto gate = gate_file(record, options.threshold)) {
        ScanResult r = blank_result(record, tools);
        r.error = ScanError{gate->kind, gate->detail};
        return r;
    }
    return scan_gated(record, bytes, options, tools);
}

ScanResult scan_file(const DocumentRecord& record, const ScanOptions& options) {
    const ToolSet fallback = options.tools ? ToolSet{} : ToolSet::defaults();
    const ToolSet& tools = options.tools ? *options.tools : fallback;
    ScanResult r = blank_result(record, tools);
    if (auto gate = gate_file(record, options.threshold)) {
        r.error = ScanError{gate->kind, gate->detail};
        return r;
    }

    std::error_code ec;
    const std::uintmax_t size = std::filesystem::file_size(record.path, ec);
    if (ec) {
        r.error = ScanError{GateErrorKind::Unreadable, "cannot stat file: " + ec.message()};
        return r;
    }
    if (size > kMaxFileSize) {
        r.error = ScanError{GateErrorKind::Unreadable,
                            "file is larger than " + std::to_string(kMaxFileSize >> 20) + " MB"};
        return r;
    }
    std::string data;
    try {
        std::ifstream in(record.path, std::ios::binary);
        if (!in) {
            r.error = ScanError{GateErrorKind::Unreadable, "cannot open file for reading"};
            return r;
        }
        data.resize(static_cast<std::size_t>(size));
        in.read(data.data(), static_cast<std::streamsize>(data.size()));
        data.resize(static_cast<std::size_t>(in.gcount()));
        if (in.bad()) {
            r.error = ScanError{GateErrorKind::Unreadable, "read error"};
            return r;
        }
    } catch (const std::exception& e) {
        r.error = ScanError{GateErrorKind::Unreadable, e.what()};
        return r;
    }
    return scan_gated(record, as_bytes(data), options, tools);
}

ScanResult error_result(const std::filesystem::path& path, const GateError& error, const ToolSet& tools) {
    ScanResult r;
    r.path = path;
    r.file_name = path.filename().string();
    if (r.file_name.empty()) r.file_name = path.string();
    r.mentions = MentionFlags::none(tools);
    r.error = ScanError{error.kind, error.detail};
    return r;
}

}  // namespace aitrace
