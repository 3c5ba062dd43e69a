#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "arsip/archive_store.hpp"
#include "arsip/auth.hpp"

namespace arsip {

struct ApiConfig {
  std::chrono::milliseconds session_ttl = std::chrono::hours(8);
  /// Allows read endpoints without a session.
  bool public_read = false;
  /// Static web client served at "/" when set.
  std::optional<std::filesystem::path> webui_dir;
  std::size_t default_page_limit = 50;
  std::size_t max_page_limit = 500;
  std::size_t suggestion_limit = 10;
};

/// HTTP/JSON front end over the archive and user stores.
///
///   GET    /api/health
///   POST   /api/login                 {username, password} -> {token, role, ...}
///   POST   /api/logout
///   GET    /api/me
///   GET    /api/categories
///   GET    /api/explore/{category}    ?offset=&limit=
///   GET    /api/search                ?q=&category=
///   GET    /api/suggest               ?q=&limit=
///   POST   /api/documents             multipart: perihal, no_surat, deskripsi, kategori, file
///   GET    /api/documents/{id}
///   PUT    /api/documents/{id}        JSON: perihal, no_surat, deskripsi, kategori
///   DELETE /api/documents/{id}
///   GET    /api/documents/{id}/file
///
/// Errors share one envelope: {"error": {"code": ..., "message": ...}}.
class ApiServer {
 public:
  ApiServer(ArchiveStore& store, UserStore& users, ApiConfig config = {}, Clock clock = system_now);
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  bool bind(const std::string& host, int port);
  /// Returns the chosen port, or -1.
  int bind_to_any_port(const std::string& host);
  /// Blocks until stop() is called.
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

  SessionTable& sessions() noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace arsip
