#include "arsip/category.hpp"

#include <string>

#include "arsip/error.hpp"

namespace arsip {

std::string_view label(Category c) noexcept {
  switch (c) {
    case Category::kArtikel:
      return "Artikel";
    case Category::kSuratKeluar:
      return "Dokumen Surat Keluar";
    case Category::kSuratMasuk:
      return "Dokumen Surat Masuk";
    case Category::kGambar:
      return "Gambar";
  }
  return "";
}

std::optional<Category> parse_category(std::string_view text) noexcept {
  for (Category c : kAllCategories) {
    if (label(c) == text) return c;
  }
  return std::nullopt;
}

Category require_category(std::string_view text) {
  if (auto c = parse_category(text)) return *c;
  throw Error(ErrorCode::kInvalidCategory, "unknown category '" + std::string(text) +
                                               "'; expected one of: " +
                                               std::string(category_list()));
}

std::string_view category_list() noexcept {
  return "Artikel, Dokumen Surat Keluar, Dokumen Surat Masuk, Gambar";
}

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kNotFound:
      return "not_found";
    case ErrorCode::kConflict:
      return "conflict";
    case ErrorCode::kValidation:
      return "validation";
    case ErrorCode::kInvalidCategory:
      return "invalid_category";
    case ErrorCode::kMalformedScript:
      return "malformed_script";
    case ErrorCode::kCorruptLog:
      return "corrupt_log";
    case ErrorCode::kUnsupportedVersion:
      return "unsupported_version";
    case ErrorCode::kIo:
      return "io";
  }
  return "unknown";
}

}  // namespace arsip
