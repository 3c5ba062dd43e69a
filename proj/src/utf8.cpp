#include "arsip/utf8.hpp"

#include <algorithm>
#include <cwctype>
#include <locale.h>

namespace arsip::utf8 {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

// glibc's C.UTF-8 locale carries the full Unicode ctype tables; using it via
// the *_l functions keeps results independent of the process-global locale.
locale_t utf8_ctype() {
  static const locale_t loc = [] {
    locale_t l = newlocale(LC_CTYPE_MASK, "C.UTF-8", static_cast<locale_t>(nullptr));
    if (l == static_cast<locale_t>(nullptr)) {
      l = newlocale(LC_CTYPE_MASK, "C.utf8", static_cast<locale_t>(nullptr));
    }
    return l;
  }();
  return loc;
}

bool is_scalar(char32_t ch) { return ch < 0xD800 || (ch > 0xDFFF && ch <= 0x10FFFF); }

}  // namespace

std::u32string decode(std::string_view bytes) {
  std::u32string out;
  out.reserve(bytes.size());
  std::size_t i = 0;
  while (i < bytes.size()) {
    const auto lead = static_cast<unsigned char>(bytes[i]);
    if (lead < 0x80) {
      out.push_back(lead);
      ++i;
      continue;
    }
    int extra = 0;
    char32_t cp = 0;
    char32_t min = 0;
    if ((lead & 0xE0) == 0xC0) {
      extra = 1;
      cp = lead & 0x1F;
      min = 0x80;
    } else if ((lead & 0xF0) == 0xE0) {
      extra = 2;
      cp = lead & 0x0F;
      min = 0x800;
    } else if ((lead & 0xF8) == 0xF0) {
      extra = 3;
      cp = lead & 0x07;
      min = 0x10000;
    } else {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    bool ok = true;
    for (int n = 0; n < extra; ++n, ++j) {
      if (j >= bytes.size() || (static_cast<unsigned char>(bytes[j]) & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (static_cast<unsigned char>(bytes[j]) & 0x3F);
    }
    if (!ok || cp < min || !is_scalar(cp)) {
      out.push_back(kReplacement);
      i = ok ? j : std::max(j, i + 1);
      continue;
    }
    out.push_back(cp);
    i = j;
  }
  return out;
}

void append(std::string& out, char32_t ch) {
  if (!is_scalar(ch)) ch = kReplacement;
  if (ch < 0x80) {
    out.push_back(static_cast<char>(ch));
  } else if (ch < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (ch >> 6)));
    out.push_back(static_cast<char>(0x80 | (ch & 0x3F)));
  } else if (ch < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (ch >> 12)));
    out.push_back(static_cast<char>(0x80 | ((ch >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (ch & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (ch >> 18)));
    out.push_back(static_cast<char>(0x80 | ((ch >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((ch >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (ch & 0x3F)));
  }
}

std::string encode(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t ch : text) append(out, ch);
  return out;
}

char32_t to_lower(char32_t ch) noexcept {
  if (ch < 0x80) return (ch >= 'A' && ch <= 'Z') ? ch + ('a' - 'A') : ch;
  const locale_t loc = utf8_ctype();
  if (loc == static_cast<locale_t>(nullptr)) return ch;
  return static_cast<char32_t>(towlower_l(static_cast<wint_t>(ch), loc));
}

bool is_alnum(char32_t ch) noexcept {
  if (ch < 0x80) {
    return (ch >= '0' && ch <= '9') || (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z');
  }
  const locale_t loc = utf8_ctype();
  if (loc == static_cast<locale_t>(nullptr)) return false;
  return iswalnum_l(static_cast<wint_t>(ch), loc) != 0;
}

}  // namespace arsip::utf8
