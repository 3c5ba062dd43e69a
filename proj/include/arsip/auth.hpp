#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "arsip/archive_store.hpp"
#include "arsip/record.hpp"

namespace arsip {

enum class Role { kAdmin, kStaff };

std::string_view to_string(Role role) noexcept;
/// Accepts "Admin"/"Staff", case-insensitive.
std::optional<Role> parse_role(std::string_view text) noexcept;

struct UserAccount {
  UserId id = 0;
  std::string username;
  std::string password_hash;  // argon2id string, salt embedded
  Role role = Role::kStaff;
};

/// Work factor of new password hashes. kMinimal is only meant for tests;
/// verification always honours whatever parameters a stored hash carries.
enum class HashStrength { kInteractive, kMinimal };

std::string hash_password(std::string_view password, HashStrength strength);
bool verify_password(std::string_view hash, std::string_view password);

/// Accounts persisted in <data_dir>/users.log, one JSON object per line.
class UserStore {
 public:
  static constexpr int kLogVersion = 1;

  static std::unique_ptr<UserStore> open(const std::filesystem::path& data_dir,
                                         HashStrength strength = HashStrength::kInteractive);
  ~UserStore();
  UserStore(const UserStore&) = delete;
  UserStore& operator=(const UserStore&) = delete;

  /// Throws Error(kConflict) for a taken username, Error(kValidation) for an
  /// empty username or password.
  UserAccount add_user(std::string_view username, std::string_view password, Role role);

  /// The account when the password verifies; nullopt otherwise, without
  /// revealing which part failed.
  std::optional<UserAccount> verify(std::string_view username, std::string_view password) const;

  std::optional<UserAccount> find(UserId id) const;
  std::optional<UserAccount> find_by_name(std::string_view username) const;
  std::size_t size() const;

 private:
  class LogWriter;
  UserStore(std::filesystem::path data_dir, HashStrength strength);
  void replay();

  std::filesystem::path data_dir_;
  HashStrength strength_;
  std::unique_ptr<LogWriter> log_;
  mutable std::shared_mutex mu_;
  std::map<UserId, UserAccount> users_;
  std::map<std::string, UserId, std::less<>> by_name_;
};

struct Session {
  std::string token;
  UserId user_id = 0;
  std::string username;
  Role role = Role::kStaff;
  Timestamp expires_at{};
};

/// 32 random bytes, base64url without padding.
std::string random_token();

/// Server-side session table. Internally synchronized.
class SessionTable {
 public:
  SessionTable(std::chrono::milliseconds ttl, Clock clock = system_now);

  Session issue(const UserAccount& account);
  /// nullopt for unknown or expired tokens; expired entries are dropped.
  std::optional<Session> authenticate(std::string_view token);
  void revoke(std::string_view token);
  std::size_t size() const;

  std::chrono::milliseconds ttl() const noexcept { return ttl_; }

 private:
  std::chrono::milliseconds ttl_;
  Clock clock_;
  mutable std::mutex mu_;
  std::unordered_map<std::string, Session> sessions_;
};

}  // namespace arsip
