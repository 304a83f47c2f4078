#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace aitrace::utf8 {

inline constexpr char32_t kInvalid = 0xFFFFFFFF;

/// Appends the UTF-8 encoding of `cp`. Surrogates and values past U+10FFFF
/// are ignored.
void append(std::string& out, char32_t cp);

std::string encode(std::u32string_view text);

/// Decodes one codepoint starting at `pos` and advances `pos` past it.
/// Malformed sequences yield kInvalid and advance by one byte.
char32_t next(std::string_view text, std::size_t& pos);

bool is_valid(std::string_view text);

/// Replaces malformed sequences with U+FFFD.
std::string sanitize(std::string_view text);

}  // namespace aitrace::utf8
