#pragma once

#include <string>
#include <string_view>

namespace arsip::utf8 {

/// Decodes UTF-8 into Unicode scalar values. Ill-formed sequences, surrogates
/// and overlong encodings each decode to U+FFFD.
std::u32string decode(std::string_view bytes);

/// Encodes scalar values as UTF-8. Values outside the scalar range are
/// written as U+FFFD.
std::string encode(std::u32string_view text);

void append(std::string& out, char32_t ch);

/// Simple (one-to-one) Unicode lowercase mapping.
char32_t to_lower(char32_t ch) noexcept;

/// True for Unicode letters and digits.
bool is_alnum(char32_t ch) noexcept;

}  // namespace arsip::utf8
