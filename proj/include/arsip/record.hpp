#pragma once

#include <chrono>
#include <cstdint>
#include <string>

#include "arsip/category.hpp"

namespace arsip {

using DocumentId = std::uint64_t;
using UserId = std::uint64_t;
using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

/// One archived letter or file.
struct DocumentRecord {
  DocumentId id = 0;
  std::string perihal;    // subject
  std::string no_surat;   // letter number
  std::string deskripsi;  // may be empty
  Category kategori = Category::kArtikel;
  std::string file_name;
  std::string file_ref;  // relative to the data directory
  std::string content_type;
  std::uint64_t file_size = 0;
  UserId uploaded_by = 0;
  Timestamp uploaded_at{};
  bool deleted = false;

  friend bool operator==(const DocumentRecord&, const DocumentRecord&) = default;
};

/// ISO-8601 UTC with millisecond precision, e.g. 2016-05-01T08:30:00.000Z.
std::string format_timestamp(Timestamp t);

}  // namespace arsip
