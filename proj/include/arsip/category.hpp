#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace arsip {

/// The four fixed archive roots.
enum class Category { kArtikel, kSuratKeluar, kSuratMasuk, kGambar };

inline constexpr std::array<Category, 4> kAllCategories = {
    Category::kArtikel, Category::kSuratKeluar, Category::kSuratMasuk, Category::kGambar};

std::string_view label(Category c) noexcept;

/// Exact, case-sensitive match against the four labels.
std::optional<Category> parse_category(std::string_view text) noexcept;

/// Throws Error(kInvalidCategory) naming the accepted labels.
Category require_category(std::string_view text);

/// "Artikel, Dokumen Surat Keluar, Dokumen Surat Masuk, Gambar"
std::string_view category_list() noexcept;

}  // namespace arsip
