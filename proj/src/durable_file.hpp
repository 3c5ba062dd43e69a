#pragma once

#include <filesystem>
#include <string>
#include <string_view>

// Small POSIX helpers for crash-safe writes.
namespace arsip::detail {

/// Append-only file handle; each append is written fully and fsync'ed.
class AppendFile {
 public:
  explicit AppendFile(const std::filesystem::path& path);
  ~AppendFile();
  AppendFile(const AppendFile&) = delete;
  AppendFile& operator=(const AppendFile&) = delete;

  void append(std::string_view bytes);

 private:
  std::filesystem::path path_;
  int fd_ = -1;
};

/// Writes to a temporary sibling, fsyncs, then renames over `path`.
void write_file_atomically(const std::filesystem::path& path, std::string_view bytes);

std::string read_file(const std::filesystem::path& path);

void fsync_directory(const std::filesystem::path& dir);

}  // namespace arsip::detail
