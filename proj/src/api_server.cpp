#include "arsip/api_server.hpp"

#include <charconv>

#include <spdlog/spdlog.h>

#include "httplib.h"
#include "json.hpp"

#include "arsip/error.hpp"
#include "arsip/record_json.hpp"

namespace arsip {

using nlohmann::json;

namespace {

enum class Access { kOpen, kRead, kAdmin };

struct HttpError {
  int status;
  std::string code;
  std::string message;
};

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json; charset=utf-8");
}

void send_error(httplib::Response& res, int status, std::string_view code, std::string_view message) {
  send_json(res, status, {{"error", {{"code", code}, {"message", message}}}});
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kConflict:
      return 409;
    case ErrorCode::kValidation:
    case ErrorCode::kInvalidCategory:
    case ErrorCode::kMalformedScript:
      return 400;
    default:
      return 500;
  }
}

std::string_view reason_code(int status) {
  switch (status) {
    case 400:
      return "bad_request";
    case 401:
      return "unauthorized";
    case 403:
      return "forbidden";
    case 404:
      return "not_found";
    case 405:
      return "method_not_allowed";
    case 409:
      return "conflict";
    default:
      return status >= 500 ? "internal" : "error";
  }
}

std::size_t parse_count(const httplib::Request& req, const char* name, std::size_t fallback) {
  if (!req.has_param(name)) return fallback;
  const std::string v = req.get_param_value(name);
  std::size_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
    throw HttpError{400, "bad_request", std::string("query parameter '") + name +
                                            "' must be a non-negative integer"};
  }
  return out;
}

DocumentId path_id(const httplib::Request& req) {
  DocumentId id = 0;
  const std::string s = req.matches[1];
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), id);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw Error(ErrorCode::kNotFound, "document " + s + " not found");
  }
  return id;
}

std::string bearer_token(const httplib::Request& req) {
  const std::string header = req.get_header_value("Authorization");
  constexpr std::string_view kPrefix = "Bearer ";
  if (header.size() > kPrefix.size() && header.compare(0, kPrefix.size(), kPrefix) == 0) {
    return header.substr(kPrefix.size());
  }
  return {};
}

std::string required_string(const json& body, const char* key) {
  if (!body.contains(key) || !body[key].is_string()) {
    throw HttpError{400, "bad_request", std::string("field '") + key + "' must be a string"};
  }
  return body[key].get<std::string>();
}

std::string form_value(const httplib::Request& req, const char* key, bool required) {
  if (!req.has_file(key)) {
    if (!required) return {};
    throw HttpError{400, "bad_request", std::string("missing form part '") + key + "'"};
  }
  return req.get_file_value(key).content;
}

json hit_json(const ResolvedHit& h) {
  json terms = json::array();
  for (const auto& t : h.hit.matched_terms) {
    terms.push_back({{"query_token", t.query_token},
                     {"matched_token", t.matched_token},
                     {"distance", t.distance}});
  }
  return {{"document_id", h.hit.document_id},
          {"score", h.hit.score},
          {"matched_terms", std::move(terms)},
          {"document", to_api_json(h.record)}};
}

json suggestion_json(const Suggestion& s) {
  return {{"candidate", s.candidate}, {"distance", s.distance}, {"frequency", s.frequency}};
}

std::string content_disposition(std::string_view file_name) {
  std::string safe;
  for (char c : file_name) {
    if (c == '"' || c == '\\' || static_cast<unsigned char>(c) < 0x20) continue;
    safe.push_back(c);
  }
  return "attachment; filename=\"" + safe + "\"";
}

}  // namespace

struct ApiServer::Impl {
  Impl(ArchiveStore& s, UserStore& u, ApiConfig c, Clock clock)
      : store(s), users(u), config(std::move(c)), sessions(config.session_ttl, std::move(clock)) {
    // SO_REUSEADDR only: the library default (SO_REUSEPORT) would let a second
    // server silently share a busy port.
    http.set_socket_options([](socket_t sock) {
      int yes = 1;
      ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    install_routes();
  }

  ArchiveStore& store;
  UserStore& users;
  ApiConfig config;
  SessionTable sessions;
  httplib::Server http;

  using Handler =
      std::function<void(const httplib::Request&, httplib::Response&, const std::optional<Session>&)>;

  // Authenticates, authorizes and maps exceptions onto the error envelope.
  httplib::Server::Handler guarded(Access access, Handler handler) {
    return [this, access, handler = std::move(handler)](const httplib::Request& req,
                                                        httplib::Response& res) {
      try {
        std::optional<Session> session;
        if (access != Access::kOpen) {
          const std::string token = bearer_token(req);
          if (!token.empty()) session = sessions.authenticate(token);
          const bool anonymous_ok = access == Access::kRead && config.public_read && token.empty();
          if (!session && !anonymous_ok) {
            send_error(res, 401, "unauthorized", "authentication required");
            return;
          }
          if (access == Access::kAdmin && session->role != Role::kAdmin) {
            send_error(res, 403, "forbidden", "admin role required");
            return;
          }
        }
        handler(req, res, session);
      } catch (const HttpError& e) {
        send_error(res, e.status, e.code, e.message);
      } catch (const Error& e) {
        const int status = status_for(e.code());
        if (status >= 500) spdlog::error("{} {}: {}", req.method, req.path, e.what());
        send_error(res, status, to_string(e.code()), status >= 500 ? "internal error" : e.what());
      } catch (const json::exception& e) {
        send_error(res, 400, "bad_request", std::string("malformed JSON body: ") + e.what());
      }
    };
  }

  void install_routes() {
    http.set_error_handler([](const httplib::Request&, httplib::Response& res) {
      if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
      send_error(res, res.status, reason_code(res.status),
                 res.status == 404 ? "no such route" : "request failed");
      return httplib::Server::HandlerResponse::Handled;
    });
    http.set_exception_handler(
        [](const httplib::Request& req, httplib::Response& res, std::exception_ptr ep) {
          try {
            std::rethrow_exception(ep);
          } catch (const std::exception& e) {
            spdlog::error("{} {}: {}", req.method, req.path, e.what());
          } catch (...) {
          }
          send_error(res, 500, "internal", "internal error");
        });

    http.Get("/api/health", guarded(Access::kOpen, [](auto&, auto& res, auto&) {
               send_json(res, 200, {{"status", "ok"}});
             }));

    http.Post("/api/login", guarded(Access::kOpen, [this](auto& req, auto& res, auto&) {
                const json body = json::parse(req.body);
                if (!body.is_object()) throw HttpError{400, "bad_request", "expected a JSON object"};
                const std::string username = required_string(body, "username");
                const std::string password = required_string(body, "password");
                const auto account = users.verify(username, password);
                if (!account) {
                  send_error(res, 401, "unauthorized", "invalid credentials");
                  return;
                }
                const Session s = sessions.issue(*account);
                send_json(res, 200,
                          {{"token", s.token},
                           {"role", to_string(s.role)},
                           {"username", s.username},
                           {"expires_at", format_timestamp(s.expires_at)}});
              }));

    http.Post("/api/logout", guarded(Access::kRead, [this](auto& req, auto& res, auto&) {
                sessions.revoke(bearer_token(req));
                send_json(res, 200, {{"ok", true}});
              }));

    http.Get("/api/me", guarded(Access::kRead, [](auto&, auto& res, const auto& session) {
               if (!session) {
                 send_json(res, 200, {{"username", nullptr}, {"role", nullptr}});
                 return;
               }
               send_json(res, 200,
                         {{"username", session->username},
                          {"role", to_string(session->role)},
                          {"expires_at", format_timestamp(session->expires_at)}});
             }));

    http.Get("/api/categories", guarded(Access::kRead, [this](auto&, auto& res, auto&) {
               json out = json::array();
               for (Category c : kAllCategories) {
                 out.push_back({{"label", label(c)}, {"count", store.count_in_category(c)}});
               }
               send_json(res, 200, out);
             }));

    http.Get(R"(/api/explore/([^/]+))", guarded(Access::kRead, [this](auto& req, auto& res, auto&) {
               const Category category = require_category(req.matches[1].str());
               const std::size_t offset = parse_count(req, "offset", 0);
               const std::size_t limit = std::clamp<std::size_t>(
                   parse_count(req, "limit", config.default_page_limit), 1, config.max_page_limit);
               json out = json::array();
               for (const auto& r : store.list_by_category(category, {offset, limit})) {
                 out.push_back(to_api_json(r));
               }
               res.set_header("X-Total-Count", std::to_string(store.count_in_category(category)));
               send_json(res, 200, out);
             }));

    http.Get("/api/search", guarded(Access::kRead, [this](auto& req, auto& res, auto&) {
               std::optional<Category> category;
               if (req.has_param("category") && !req.get_param_value("category").empty()) {
                 category = require_category(req.get_param_value("category"));
               }
               const std::string q = req.get_param_value("q");
               const SearchOutcome outcome = store.search(q, category, 1);
               json hits = json::array();
               for (const auto& h : outcome.hits) hits.push_back(hit_json(h));
               json suggestions = json::array();
               for (const auto& s : outcome.suggestions) {
                 json entry = suggestion_json(s.suggestion);
                 entry["token"] = s.token;
                 suggestions.push_back(std::move(entry));
               }
               send_json(res, 200,
                         {{"query", q},
                          {"category", category ? json(label(*category)) : json(nullptr)},
                          {"hits", std::move(hits)},
                          {"suggestions", std::move(suggestions)}});
             }));

    http.Get("/api/suggest", guarded(Access::kRead, [this](auto& req, auto& res, auto&) {
               const std::string q = req.get_param_value("q");
               const std::size_t limit = std::clamp<std::size_t>(
                   parse_count(req, "limit", config.suggestion_limit), 1, config.max_page_limit);
               json out = json::array();
               for (const auto& s : store.suggest(q, limit)) out.push_back(suggestion_json(s));
               send_json(res, 200, {{"token", q}, {"suggestions", std::move(out)}});
             }));

    http.Post("/api/documents", guarded(Access::kAdmin, [this](auto& req, auto& res,
                                                               const auto& session) {
                if (!req.is_multipart_form_data()) {
                  throw HttpError{400, "bad_request", "expected multipart/form-data"};
                }
                DocumentMeta meta;
                meta.perihal = form_value(req, "perihal", true);
                meta.no_surat = form_value(req, "no_surat", true);
                meta.deskripsi = form_value(req, "deskripsi", false);
                meta.kategori = require_category(form_value(req, "kategori", true));
                if (!req.has_file("file")) {
                  throw HttpError{400, "bad_request", "missing form part 'file'"};
                }
                const auto part = req.get_file_value("file");
                const auto record = store.create_document(
                    meta, {part.content, part.filename, part.content_type}, session->user_id);
                send_json(res, 201, to_api_json(record));
              }));

    http.Get(R"(/api/documents/(\d+))", guarded(Access::kRead, [this](auto& req, auto& res, auto&) {
               send_json(res, 200, to_api_json(store.get_document(path_id(req))));
             }));

    http.Put(R"(/api/documents/(\d+))", guarded(Access::kAdmin, [this](auto& req, auto& res,
                                                                      const auto& session) {
               const json body = json::parse(req.body);
               if (!body.is_object()) throw HttpError{400, "bad_request", "expected a JSON object"};
               DocumentMeta meta;
               meta.perihal = required_string(body, "perihal");
               meta.no_surat = required_string(body, "no_surat");
               meta.deskripsi = body.contains("deskripsi") ? required_string(body, "deskripsi") : "";
               meta.kategori = require_category(required_string(body, "kategori"));
               send_json(res, 200,
                         to_api_json(store.update_document(path_id(req), meta, session->user_id)));
             }));

    http.Delete(R"(/api/documents/(\d+))", guarded(Access::kAdmin, [this](auto& req, auto& res,
                                                                         const auto& session) {
                  const DocumentId id = path_id(req);
                  store.delete_document(id, session->user_id);
                  send_json(res, 200, {{"deleted", id}});
                }));

    http.Get(R"(/api/documents/(\d+)/file)",
             guarded(Access::kRead, [this](auto& req, auto& res, auto&) {
               const DocumentId id = path_id(req);
               const DocumentRecord record = store.get_document(id);
               std::string bytes = store.read_blob(id);
               res.set_header("Content-Disposition", content_disposition(record.file_name));
               res.status = 200;
               res.set_content(std::move(bytes), record.content_type);
             }));

    // Anything else under /api is a JSON 404, never the web client.
    const auto api_not_found = [](const httplib::Request&, httplib::Response& res) {
      send_error(res, 404, "not_found", "no such route");
    };
    http.Get(R"(/api(/.*)?)", api_not_found);
    http.Post(R"(/api(/.*)?)", api_not_found);
    http.Put(R"(/api(/.*)?)", api_not_found);
    http.Delete(R"(/api(/.*)?)", api_not_found);
    http.Patch(R"(/api(/.*)?)", api_not_found);

    if (config.webui_dir) {
      if (!http.set_mount_point("/", config.webui_dir->string())) {
        spdlog::warn("web client directory {} not found; serving API only",
                     config.webui_dir->string());
      }
    }
  }
};

ApiServer::ApiServer(ArchiveStore& store, UserStore& users, ApiConfig config, Clock clock)
    : impl_(std::make_unique<Impl>(store, users, std::move(config), std::move(clock))) {}

ApiServer::~ApiServer() { stop(); }

bool ApiServer::bind(const std::string& host, int port) {
  return impl_->http.bind_to_port(host, port);
}

int ApiServer::bind_to_any_port(const std::string& host) {
  return impl_->http.bind_to_any_port(host);
}

bool ApiServer::listen_after_bind() { return impl_->http.listen_after_bind(); }

void ApiServer::stop() {
  if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

void ApiServer::wait_until_ready() const { impl_->http.wait_until_ready(); }

SessionTable& ApiServer::sessions() noexcept { return impl_->sessions; }

}  // namespace arsip
