#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace aitrace::pdf {

class PdfError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Object;

struct Null {};

struct Ref {
    std::uint32_t num = 0;
    std::uint16_t gen = 0;
    friend bool operator==(const Ref&, const Ref&) = default;
};

struct Name {
    std::string value;
};

struct String {
    std::string bytes;
};

using Array = std::vector<Object>;

struct Dict {
    std::vector<std::pair<std::string, Object>> entries;

    const Object* get(std::string_view key) const;
    void set(std::string key, Object value);
};

struct Stream {
    Dict dict;
    std::span<const std::byte> raw;
};

/// Keyword tokens only occur inside content streams (operators).
struct Keyword {
    std::string value;
};

struct Object {
    std::variant<Null, bool, std::int64_t, double, String, Name, Array, Dict, Stream, Ref, Keyword> value;

    Object() = default;
    template <typename T>
    Object(T v) : value(std::move(v)) {}

    template <typename T>
    bool is() const {
        return std::holds_alternative<T>(value);
    }
    template <typename T>
    const T* as() const {
        return std::get_if<T>(&value);
    }

    bool is_null() const { return is<Null>(); }
    std::optional<double> number() const;
    std::optional<std::int64_t> integer() const;
    /// Name value, or empty when not a name.
    std::string_view name() const;
};

bool is_pdf_space(unsigned char c);
bool is_pdf_delimiter(unsigned char c);

/// Tokenizer and object parser over a byte range. Used for the file body,
/// object streams, content streams and CMaps.
class Parser {
public:
    explicit Parser(std::span<const std::byte> data, std::size_t pos = 0) : data_(data), pos_(pos) {}

    std::size_t pos() const { return pos_; }
    void seek(std::size_t pos) { pos_ = pos; }
    bool at_end();
    std::span<const std::byte> data() const { return data_; }

    void skip_space();

    /// Parses one object. Bare keywords are returned as Keyword. When
    /// `allow_refs` is set, "n g R" is folded into a Ref.
    Object parse_object(bool allow_refs, int depth = 0);

    /// Reads the next keyword or returns empty when the next token is not
    /// a keyword. Position is unchanged in that case.
    std::string peek_keyword();

private:
    std::string read_literal_string();
    std::string read_hex_string();
    std::string read_name();
    std::string read_regular();
    unsigned char byte(std::size_t i) const { return std::to_integer<unsigned char>(data_[i]); }

    std::span<const std::byte> data_;
    std::size_t pos_;
};

}  // namespace aitrace::pdf
