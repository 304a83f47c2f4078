#pragma once

#include "pdf/document.hpp"

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace aitrace::pdf {

/// Character-code map parsed from a CMap program: codespace ranges plus
/// bfchar/bfrange mappings to Unicode.
class CMap {
public:
    static CMap parse(std::string_view program);

    bool has_codespace() const { return !codespace_.empty(); }

    /// Byte length of the code starting at `pos`, per the codespace ranges.
    /// Falls back to `fallback` when no range matches.
    std::size_t code_length(std::string_view bytes, std::size_t pos, std::size_t fallback) const;

    const std::u32string* lookup(std::uint32_t code, std::size_t length) const;

    std::size_t size() const { return map_.size(); }

private:
    struct Range {
        std::size_t length;
        std::uint32_t low;
        std::uint32_t high;
    };
    static std::uint64_t key(std::uint32_t code, std::size_t length) {
        return (std::uint64_t{length} << 32) | code;
    }

    std::vector<Range> codespace_;
    std::unordered_map<std::uint64_t, std::u32string> map_;
};

/// Unicode value of an Adobe glyph name, including uniXXXX and uXXXX forms.
std::optional<char32_t> glyph_to_unicode(std::string_view name);

class Font {
public:
    /// Builds a decoder from a font dictionary. Never throws for font
    /// damage; problems are reported through `problem()`.
    static Font load(Document& doc, const Dict& font);

    /// False when the codes cannot be mapped to Unicode at all (composite
    /// fonts without a ToUnicode map).
    bool usable() const { return usable_; }
    const std::string& problem() const { return problem_; }

    /// Appends the decoded UTF-8 text of a shown string. Returns the number
    /// of codes that had no Unicode mapping; those emit nothing.
    std::size_t decode(std::string_view codes, std::string& out) const;

private:
    bool composite_ = false;
    bool usable_ = true;
    bool ucs2_ = false;
    std::string problem_;
    std::optional<CMap> to_unicode_;
    std::optional<CMap> encoding_cmap_;
    std::array<char32_t, 256> simple_{};
};

}  // namespace aitrace::pdf
