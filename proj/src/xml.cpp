#include "aitrace/xml.hpp"

#include "aitrace/utf8.hpp"

#include <charconv>

namespace aitrace::xml {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

bool is_name_char(char c) {
    return !(is_space(c) || c == '>' || c == '/' || c == '=' || c == '<' || c == '"' || c == '\'' || c == '\0');
}

std::pair<std::string_view, std::string_view> split_qname(std::string_view qname) {
    const auto colon = qname.find(':');
    if (colon == std::string_view::npos) return {{}, qname};
    return {qname.substr(0, colon), qname.substr(colon + 1)};
}

constexpr std::string_view kXmlNs = "http://www.w3.org/XML/1998/namespace";

}  // namespace

const Attribute* Event::attribute(std::string_view ns_uri, std::string_view local_name) const {
    for (const auto& a : attributes) {
        if (a.local == local_name && a.ns == ns_uri) return &a;
    }
    return nullptr;
}

std::string decode_entities(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    std::size_t pos = 0;
    while (pos < raw.size()) {
        const auto amp = raw.find('&', pos);
        if (amp == std::string_view::npos) {
            out.append(raw.substr(pos));
            break;
        }
        out.append(raw.substr(pos, amp - pos));
        const auto semi = raw.find(';', amp);
        if (semi == std::string_view::npos || semi - amp > 12) throw XmlError("unterminated entity reference");
        const std::string_view name = raw.substr(amp + 1, semi - amp - 1);
        if (name == "lt") {
            out.push_back('<');
        } else if (name == "gt") {
            out.push_back('>');
        } else if (name == "amp") {
            out.push_back('&');
        } else if (name == "quot") {
            out.push_back('"');
        } else if (name == "apos") {
            out.push_back('\'');
        } else if (name.size() > 1 && name[0] == '#') {
            const bool hex = name[1] == 'x' || name[1] == 'X';
            const std::string_view digits = name.substr(hex ? 2 : 1);
            std::uint32_t cp = 0;
            const auto res = std::from_chars(digits.data(), digits.data() + digits.size(), cp, hex ? 16 : 10);
            if (digits.empty() || res.ec != std::errc{} || res.ptr != digits.data() + digits.size() ||
                cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
                throw XmlError("invalid character reference &" + std::string(name) + ";");
            }
            utf8::append(out, static_cast<char32_t>(cp));
        } else {
            throw XmlError("unknown entity &" + std::string(name) + ";");
        }
        pos = semi + 1;
    }
    return out;
}

std::string escape(std::string_view text, bool attribute) {
    std::string out;
    out.reserve(text.size() + text.size() / 8);
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"':
                if (attribute) {
                    out += "&quot;";
                } else {
                    out.push_back(c);
                }
                break;
            default: out.push_back(c);
        }
    }
    return out;
}

PullParser::PullParser(std::string_view doc) : doc_(doc) {
    if (doc_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
}

void PullParser::fail(const std::string& what) const {
    throw XmlError(what + " at offset " + std::to_string(pos_));
}

std::string PullParser::resolve(std::string_view prefix, bool is_attribute) const {
    if (prefix == "xml") return std::string(kXmlNs);
    if (prefix.empty() && is_attribute) return {};
    for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) {
        for (const auto& [p, uri] : it->ns_decls) {
            if (p == prefix) return uri;
        }
    }
    return {};
}

const Event& PullParser::next() {
    if (pending_end_) {
        pending_end_ = false;
        event_.type = EventType::EndElement;
        event_.attributes.clear();
        stack_.pop_back();
        return event_;
    }
    while (true) {
        if (pos_ >= doc_.size()) {
            if (!stack_.empty()) fail("unexpected end of document inside <" + stack_.back().qname + ">");
            if (!seen_root_) fail("no root element");
            event_ = Event{};
            return event_;
        }
        if (doc_[pos_] != '<') {
            parse_text();
            if (stack_.empty()) {
                for (char c : event_.text) {
                    if (!is_space(c)) fail("character data outside the root element");
                }
                continue;
            }
            return event_;
        }
        const std::string_view rest = doc_.substr(pos_);
        if (rest.starts_with("<!--")) {
            const auto end = doc_.find("-->", pos_ + 4);
            if (end == std::string_view::npos) fail("unterminated comment");
            pos_ = end + 3;
            continue;
        }
        if (rest.starts_with("<![CDATA[")) {
            if (stack_.empty()) fail("CDATA outside the root element");
            const auto end = doc_.find("]]>", pos_ + 9);
            if (end == std::string_view::npos) fail("unterminated CDATA section");
            event_ = Event{};
            event_.type = EventType::Text;
            event_.text.assign(doc_.substr(pos_ + 9, end - pos_ - 9));
            pos_ = end + 3;
            return event_;
        }
        if (rest.starts_with("<?")) {
            const auto end = doc_.find("?>", pos_ + 2);
            if (end == std::string_view::npos) fail("unterminated processing instruction");
            pos_ = end + 2;
            continue;
        }
        if (rest.starts_with("<!")) {
            // DOCTYPE, possibly with an internal subset.
            int bracket = 0;
            std::size_t i = pos_ + 2;
            for (; i < doc_.size(); ++i) {
                if (doc_[i] == '[') ++bracket;
                if (doc_[i] == ']') --bracket;
                if (doc_[i] == '>' && bracket <= 0) break;
            }
            if (i >= doc_.size()) fail("unterminated declaration");
            pos_ = i + 1;
            continue;
        }
        if (rest.starts_with("</")) {
            parse_end_tag();
            return event_;
        }
        parse_tag();
        return event_;
    }
}

void PullParser::parse_text() {
    const auto lt = doc_.find('<', pos_);
    const std::size_t end = lt == std::string_view::npos ? doc_.size() : lt;
    event_ = Event{};
    event_.type = EventType::Text;
    try {
        event_.text = decode_entities(doc_.substr(pos_, end - pos_));
    } catch (const XmlError& e) {
        fail(e.what());
    }
    pos_ = end;
}

void PullParser::parse_end_tag() {
    std::size_t i = pos_ + 2;
    const std::size_t name_start = i;
    while (i < doc_.size() && is_name_char(doc_[i])) ++i;
    const std::string_view qname = doc_.substr(name_start, i - name_start);
    while (i < doc_.size() && is_space(doc_[i])) ++i;
    if (i >= doc_.size() || doc_[i] != '>') fail("malformed end tag");
    if (stack_.empty() || stack_.back().qname != qname) {
        fail("mismatched end tag </" + std::string(qname) + ">");
    }
    event_ = Event{};
    event_.type = EventType::EndElement;
    event_.qname.assign(qname);
    const auto [prefix, local] = split_qname(qname);
    event_.local.assign(local);
    event_.ns = resolve(prefix, false);
    stack_.pop_back();
    pos_ = i + 1;
}

void PullParser::parse_tag() {
    if (stack_.empty() && seen_root_) fail("content after the root element");
    std::size_t i = pos_ + 1;
    const std::size_t name_start = i;
    while (i < doc_.size() && is_name_char(doc_[i])) ++i;
    if (i == name_start) fail("empty element name");

    Frame frame;
    frame.qname.assign(doc_.substr(name_start, i - name_start));
    std::vector<Attribute> attrs;
    bool self_closing = false;
    while (true) {
        while (i < doc_.size() && is_space(doc_[i])) ++i;
        if (i >= doc_.size()) fail("unterminated start tag");
        if (doc_[i] == '>') {
            ++i;
            break;
        }
        if (doc_[i] == '/') {
            if (i + 1 >= doc_.size() || doc_[i + 1] != '>') fail("malformed empty-element tag");
            self_closing = true;
            i += 2;
            break;
        }
        const std::size_t an_start = i;
        while (i < doc_.size() && is_name_char(doc_[i])) ++i;
        if (i == an_start) fail("malformed attribute");
        Attribute attr;
        attr.qname.assign(doc_.substr(an_start, i - an_start));
        while (i < doc_.size() && is_space(doc_[i])) ++i;
        if (i >= doc_.size() || doc_[i] != '=') fail("attribute without value");
        ++i;
        while (i < doc_.size() && is_space(doc_[i])) ++i;
        if (i >= doc_.size() || (doc_[i] != '"' && doc_[i] != '\'')) fail("unquoted attribute value");
        const char quote = doc_[i++];
        const auto close = doc_.find(quote, i);
        if (close == std::string_view::npos) fail("unterminated attribute value");
        try {
            attr.value = decode_entities(doc_.substr(i, close - i));
        } catch (const XmlError& e) {
            fail(e.what());
        }
        i = close + 1;
        if (attr.qname == "xmlns") {
            frame.ns_decls.emplace_back("", attr.value);
        } else if (attr.qname.starts_with("xmlns:")) {
            frame.ns_decls.emplace_back(attr.qname.substr(6), attr.value);
        }
        attrs.push_back(std::move(attr));
    }
    pos_ = i;
    seen_root_ = true;

    stack_.push_back(std::move(frame));
    event_ = Event{};
    event_.type = EventType::StartElement;
    event_.qname = stack_.back().qname;
    const auto [prefix, local] = split_qname(event_.qname);
    event_.local.assign(local);
    event_.ns = resolve(prefix, false);
    for (auto& a : attrs) {
        const auto [ap, al] = split_qname(a.qname);
        a.local.assign(al);
        a.ns = resolve(ap, true);
    }
    event_.attributes = std::move(attrs);
    pending_end_ = self_closing;
}

void PullParser::skip_element() {
    const std::size_t target = stack_.size() - 1;
    while (true) {
        const Event& e = next();
        if (e.type == EventType::EndElement && stack_.size() == target) return;
        if (e.type == EventType::EndDocument) return;
    }
}

}  // namespace aitrace::xml
