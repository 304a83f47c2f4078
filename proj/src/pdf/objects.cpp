#include "pdf/objects.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

namespace aitrace::pdf {

namespace {

constexpr int kMaxNesting = 64;

int hex_value(unsigned char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

std::optional<Object> parse_number(std::string_view token) {
    if (token.empty()) return std::nullopt;
    bool has_digit = false;
    bool has_dot = false;
    for (std::size_t i = 0; i < token.size(); ++i) {
        const char c = token[i];
        if (c >= '0' && c <= '9') {
            has_digit = true;
        } else if (c == '.') {
            if (has_dot) return std::nullopt;
            has_dot = true;
        } else if ((c == '-' || c == '+') && i == 0) {
        } else {
            return std::nullopt;
        }
    }
    if (!has_digit) return std::nullopt;
    std::string_view body = token;
    bool negative = false;
    if (body.front() == '+' || body.front() == '-') {
        negative = body.front() == '-';
        body.remove_prefix(1);
    }
    if (!has_dot) {
        std::int64_t v = 0;
        const auto res = std::from_chars(body.data(), body.data() + body.size(), v);
        if (res.ec == std::errc{}) return Object{negative ? -v : v};
        return Object{negative ? -1e18 : 1e18};
    }
    const double v = std::strtod(std::string(body).c_str(), nullptr);
    return Object{negative ? -v : v};
}

}  // namespace

const Object* Dict::get(std::string_view key) const {
    for (const auto& [k, v] : entries) {
        if (k == key) return &v;
    }
    return nullptr;
}

void Dict::set(std::string key, Object value) {
    for (auto& [k, v] : entries) {
        if (k == key) {
            v = std::move(value);
            return;
        }
    }
    entries.emplace_back(std::move(key), std::move(value));
}

std::optional<double> Object::number() const {
    if (const auto* i = as<std::int64_t>()) return static_cast<double>(*i);
    if (const auto* d = as<double>()) return *d;
    return std::nullopt;
}

std::optional<std::int64_t> Object::integer() const {
    if (const auto* i = as<std::int64_t>()) return *i;
    if (const auto* d = as<double>()) {
        if (std::isfinite(*d) && std::floor(*d) == *d) return static_cast<std::int64_t>(*d);
    }
    return std::nullopt;
}

std::string_view Object::name() const {
    if (const auto* n = as<Name>()) return n->value;
    return {};
}

bool is_pdf_space(unsigned char c) {
    return c == 0 || c == '\t' || c == '\n' || c == '\f' || c == '\r' || c == ' ';
}

bool is_pdf_delimiter(unsigned char c) {
    return c == '(' || c == ')' || c == '<' || c == '>' || c == '[' || c == ']' || c == '{' || c == '}' ||
           c == '/' || c == '%';
}

bool Parser::at_end() {
    skip_space();
    return pos_ >= data_.size();
}

void Parser::skip_space() {
    while (pos_ < data_.size()) {
        const unsigned char c = byte(pos_);
        if (is_pdf_space(c)) {
            ++pos_;
        } else if (c == '%') {
            while (pos_ < data_.size() && byte(pos_) != '\n' && byte(pos_) != '\r') ++pos_;
        } else {
            break;
        }
    }
}

std::string Parser::read_regular() {
    const std::size_t start = pos_;
    while (pos_ < data_.size() && !is_pdf_space(byte(pos_)) && !is_pdf_delimiter(byte(pos_))) ++pos_;
    return {reinterpret_cast<const char*>(data_.data() + start), pos_ - start};
}

std::string Parser::read_literal_string() {
    // Positioned after '('.
    std::string out;
    int depth = 1;
    while (pos_ < data_.size()) {
        unsigned char c = byte(pos_++);
        if (c == '(') {
            ++depth;
        } else if (c == ')') {
            if (--depth == 0) return out;
        } else if (c == '\\') {
            if (pos_ >= data_.size()) break;
            c = byte(pos_++);
            switch (c) {
                case 'n': out.push_back('\n'); continue;
                case 'r': out.push_back('\r'); continue;
                case 't': out.push_back('\t'); continue;
                case 'b': out.push_back('\b'); continue;
                case 'f': out.push_back('\f'); continue;
                case '\r':
                    if (pos_ < data_.size() && byte(pos_) == '\n') ++pos_;
                    continue;
                case '\n': continue;
                default: break;
            }
            if (c >= '0' && c <= '7') {
                int v = c - '0';
                for (int k = 0; k < 2 && pos_ < data_.size() && byte(pos_) >= '0' && byte(pos_) <= '7'; ++k) {
                    v = v * 8 + (byte(pos_++) - '0');
                }
                out.push_back(static_cast<char>(v & 0xFF));
                continue;
            }
            out.push_back(static_cast<char>(c));
            continue;
        } else if (c == '\r') {
            if (pos_ < data_.size() && byte(pos_) == '\n') ++pos_;
            out.push_back('\n');
            continue;
        }
        out.push_back(static_cast<char>(c));
    }
    throw PdfError("unterminated string");
}

std::string Parser::read_hex_string() {
    // Positioned after '<'.
    std::string out;
    int pending = -1;
    while (pos_ < data_.size()) {
        const unsigned char c = byte(pos_++);
        if (c == '>') {
            if (pending >= 0) out.push_back(static_cast<char>(pending << 4));
            return out;
        }
        if (is_pdf_space(c)) continue;
        const int v = hex_value(c);
        if (v < 0) throw PdfError("invalid hex string");
        if (pending < 0) {
            pending = v;
        } else {
            out.push_back(static_cast<char>((pending << 4) | v));
            pending = -1;
        }
    }
    throw PdfError("unterminated hex string");
}

std::string Parser::read_name() {
    // Positioned after '/'.
    std::string raw = read_regular();
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        if (raw[i] == '#' && i + 2 < raw.size()) {
            const int hi = hex_value(static_cast<unsigned char>(raw[i + 1]));
            const int lo = hex_value(static_cast<unsigned char>(raw[i + 2]));
            if (hi >= 0 && lo >= 0) {
                out.push_back(static_cast<char>((hi << 4) | lo));
                i += 2;
                continue;
            }
        }
        out.push_back(raw[i]);
    }
    return out;
}

std::string Parser::peek_keyword() {
    skip_space();
    const std::size_t save = pos_;
    if (pos_ >= data_.size() || is_pdf_delimiter(byte(pos_))) return {};
    std::string tok = read_regular();
    if (tok.empty() || parse_number(tok)) {
        pos_ = save;
        return {};
    }
    pos_ = save;
    return tok;
}

Object Parser::parse_object(bool allow_refs, int depth) {
    if (depth > kMaxNesting) throw PdfError("objects nested too deeply");
    skip_space();
    if (pos_ >= data_.size()) throw PdfError("unexpected end of data");
    const unsigned char c = byte(pos_);

    if (c == '(') {
        ++pos_;
        return String{read_literal_string()};
    }
    if (c == '<') {
        if (pos_ + 1 < data_.size() && byte(pos_ + 1) == '<') {
            pos_ += 2;
            Dict dict;
            while (true) {
                skip_space();
                if (pos_ >= data_.size()) throw PdfError("unterminated dictionary");
                if (byte(pos_) == '>' && pos_ + 1 < data_.size() && byte(pos_ + 1) == '>') {
                    pos_ += 2;
                    return dict;
                }
                if (byte(pos_) != '/') {
                    // Skip a stray token rather than abandoning the dictionary.
                    parse_object(allow_refs, depth + 1);
                    continue;
                }
                ++pos_;
                std::string key = read_name();
                skip_space();
                if (pos_ < data_.size() && byte(pos_) == '>' && pos_ + 1 < data_.size() && byte(pos_ + 1) == '>') {
                    dict.set(std::move(key), Null{});
                    continue;
                }
                Object value = parse_object(allow_refs, depth + 1);
                dict.set(std::move(key), std::move(value));
            }
        }
        ++pos_;
        return String{read_hex_string()};
    }
    if (c == '[') {
        ++pos_;
        Array arr;
        while (true) {
            skip_space();
            if (pos_ >= data_.size()) throw PdfError("unterminated array");
            if (byte(pos_) == ']') {
                ++pos_;
                return arr;
            }
            arr.push_back(parse_object(allow_refs, depth + 1));
        }
    }
    if (c == '/') {
        ++pos_;
        return Name{read_name()};
    }
    if (c == ')' || c == '>' || c == ']' || c == '{' || c == '}') {
        ++pos_;
        return Keyword{std::string(1, static_cast<char>(c))};
    }

    std::string tok = read_regular();
    if (tok.empty()) {
        ++pos_;
        return Keyword{};
    }
    if (auto num = parse_number(tok)) {
        if (allow_refs && num->is<std::int64_t>()) {
            const std::size_t save = pos_;
            skip_space();
            std::string gen_tok = read_regular();
            auto gen = parse_number(gen_tok);
            if (gen && gen->is<std::int64_t>()) {
                skip_space();
                if (read_regular() == "R") {
                    const auto n = *num->as<std::int64_t>();
                    const auto g = *gen->as<std::int64_t>();
                    if (n >= 0 && n <= 0xFFFFFFFFLL && g >= 0 && g <= 0xFFFF) {
                        return Ref{static_cast<std::uint32_t>(n), static_cast<std::uint16_t>(g)};
                    }
                    return Null{};
                }
            }
            pos_ = save;
        }
        return std::move(*num);
    }
    if (tok == "true") return true;
    if (tok == "false") return false;
    if (tok == "null") return Null{};
    return Keyword{std::move(tok)};
}

}  // namespace aitrace::pdf
