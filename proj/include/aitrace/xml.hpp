#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace aitrace::xml {

class XmlError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Attribute {
    std::string qname;
    std::string local;
    std::string ns;
    std::string value;
};

enum class EventType { StartElement, EndElement, Text, EndDocument };

struct Event {
    EventType type = EventType::EndDocument;
    std::string qname;   // elements
    std::string local;   // elements
    std::string ns;      // resolved namespace URI, elements
    std::vector<Attribute> attributes;
    std::string text;    // Text: entity-decoded character data (CDATA included)

    const Attribute* attribute(std::string_view ns_uri, std::string_view local_name) const;
};

/// Non-validating pull parser for UTF-8 XML. Checks tag balance and entity
/// syntax; skips comments, processing instructions and DOCTYPE. A
/// self-closing element produces a StartElement immediately followed by an
/// EndElement.
class PullParser {
public:
    explicit PullParser(std::string_view doc);

    /// Throws XmlError on malformed input.
    const Event& next();

    std::size_t depth() const { return stack_.size(); }

    /// Consumes events until the element most recently started is closed.
    void skip_element();

private:
    struct Frame {
        std::string qname;
        std::vector<std::pair<std::string, std::string>> ns_decls;
    };

    void parse_tag();
    void parse_end_tag();
    void parse_text();
    std::string resolve(std::string_view prefix, bool is_attribute) const;
    [[noreturn]] void fail(const std::string& what) const;

    std::string_view doc_;
    std::size_t pos_ = 0;
    std::vector<Frame> stack_;
    Event event_;
    bool pending_end_ = false;
    bool seen_root_ = false;
};

/// Decodes the predefined and numeric character references in `raw`.
std::string decode_entities(std::string_view raw);

/// Escapes &, <, > and, when `attribute` is set, double quotes.
std::string escape(std::string_view text, bool attribute = false);

}  // namespace aitrace::xml
