#include "arsip/auth.hpp"

#include <sodium.h>

#include <algorithm>
#include <cctype>

#include "json.hpp"

#include "arsip/error.hpp"
#include "durable_file.hpp"

namespace arsip {

namespace fs = std::filesystem;

namespace {

constexpr const char* kUsersFile = "users.log";

void ensure_sodium() {
  static const bool ready = sodium_init() >= 0;
  if (!ready) throw Error(ErrorCode::kIo, "libsodium failed to initialize");
}

}  // namespace

std::string_view to_string(Role role) noexcept {
  return role == Role::kAdmin ? "Admin" : "Staff";
}

std::optional<Role> parse_role(std::string_view text) noexcept {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "admin") return Role::kAdmin;
  if (lower == "staff") return Role::kStaff;
  return std::nullopt;
}

std::string hash_password(std::string_view password, HashStrength strength) {
  ensure_sodium();
  const bool minimal = strength == HashStrength::kMinimal;
  char out[crypto_pwhash_STRBYTES];
  if (crypto_pwhash_str(out, password.data(), password.size(),
                        minimal ? crypto_pwhash_OPSLIMIT_MIN : crypto_pwhash_OPSLIMIT_INTERACTIVE,
                        minimal ? crypto_pwhash_MEMLIMIT_MIN
                                : crypto_pwhash_MEMLIMIT_INTERACTIVE) != 0) {
    throw Error(ErrorCode::kIo, "password hashing ran out of memory");
  }
  return out;
}

bool verify_password(std::string_view hash, std::string_view password) {
  ensure_sodium();
  const std::string h(hash);
  return crypto_pwhash_str_verify(h.c_str(), password.data(), password.size()) == 0;
}

class UserStore::LogWriter : public detail::AppendFile {
 public:
  using AppendFile::AppendFile;
};

UserStore::UserStore(fs::path data_dir, HashStrength strength)
    : data_dir_(std::move(data_dir)), strength_(strength) {}

UserStore::~UserStore() = default;

std::unique_ptr<UserStore> UserStore::open(const fs::path& data_dir, HashStrength strength) {
  std::error_code ec;
  fs::create_directories(data_dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIo, "cannot create data directory " + data_dir.string() + ": " +
                                    ec.message());
  }
  std::unique_ptr<UserStore> store(new UserStore(data_dir, strength));
  store->replay();
  store->log_ = std::make_unique<LogWriter>(data_dir / kUsersFile);
  return store;
}

void UserStore::replay() {
  const fs::path path = data_dir_ / kUsersFile;
  if (!fs::exists(path)) return;
  const std::string content = detail::read_file(path);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    ++line_no;
    const std::string where = path.string() + ": line " + std::to_string(line_no) + ": ";
    const std::size_t nl = content.find('\n', pos);
    if (nl == std::string::npos) {
      throw Error(ErrorCode::kCorruptLog, where + "truncated record (missing newline)");
    }
    const std::string_view line(content.data() + pos, nl - pos);
    pos = nl + 1;
    UserAccount account;
    try {
      const auto j = nlohmann::json::parse(line);
      if (j.at("v").get<int>() != kLogVersion) {
        throw Error(ErrorCode::kUnsupportedVersion, where + "unsupported log version " +
                                                        j.at("v").dump());
      }
      account.id = j.at("id").get<UserId>();
      account.username = j.at("username").get<std::string>();
      account.password_hash = j.at("password_hash").get<std::string>();
      const auto role = parse_role(j.at("role").get<std::string>());
      if (!role) throw Error(ErrorCode::kCorruptLog, where + "unknown role");
      account.role = *role;
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kCorruptLog, where + e.what());
    }
    if (users_.contains(account.id) || by_name_.contains(account.username)) {
      throw Error(ErrorCode::kCorruptLog, where + "duplicate user '" + account.username + "'");
    }
    by_name_.emplace(account.username, account.id);
    users_.emplace(account.id, std::move(account));
  }
}

UserAccount UserStore::add_user(std::string_view username, std::string_view password, Role role) {
  if (username.empty()) throw Error(ErrorCode::kValidation, "username must not be empty");
  if (password.empty()) throw Error(ErrorCode::kValidation, "password must not be empty");
  std::string hash = hash_password(password, strength_);

  std::unique_lock lock(mu_);
  if (by_name_.contains(username)) {
    throw Error(ErrorCode::kConflict, "user '" + std::string(username) + "' already exists");
  }
  UserAccount account{users_.empty() ? 1 : users_.rbegin()->first + 1, std::string(username),
                      std::move(hash), role};
  const nlohmann::json line = {{"v", kLogVersion},
                               {"id", account.id},
                               {"username", account.username},
                               {"password_hash", account.password_hash},
                               {"role", to_string(role)}};
  log_->append(line.dump() + "\n");
  by_name_.emplace(account.username, account.id);
  users_.emplace(account.id, account);
  return account;
}

std::optional<UserAccount> UserStore::verify(std::string_view username,
                                             std::string_view password) const {
  auto account = find_by_name(username);
  if (!account) {
    // Burn comparable time so response latency does not reveal which
    // usernames exist.
    static const std::string dummy = hash_password("dummy-password", strength_);
    verify_password(dummy, password);
    return std::nullopt;
  }
  if (!verify_password(account->password_hash, password)) return std::nullopt;
  return account;
}

std::optional<UserAccount> UserStore::find(UserId id) const {
  std::shared_lock lock(mu_);
  auto it = users_.find(id);
  if (it == users_.end()) return std::nullopt;
  return it->second;
}

std::optional<UserAccount> UserStore::find_by_name(std::string_view username) const {
  std::shared_lock lock(mu_);
  auto it = by_name_.find(username);
  if (it == by_name_.end()) return std::nullopt;
  return users_.at(it->second);
}

std::size_t UserStore::size() const {
  std::shared_lock lock(mu_);
  return users_.size();
}

std::string random_token() {
  ensure_sodium();
  unsigned char bytes[32];
  randombytes_buf(bytes, sizeof bytes);
  char out[sodium_base64_ENCODED_LEN(sizeof bytes, sodium_base64_VARIANT_URLSAFE_NO_PADDING)];
  sodium_bin2base64(out, sizeof out, bytes, sizeof bytes, sodium_base64_VARIANT_URLSAFE_NO_PADDING);
  return out;
}

SessionTable::SessionTable(std::chrono::milliseconds ttl, Clock clock)
    : ttl_(ttl), clock_(std::move(clock)) {}

Session SessionTable::issue(const UserAccount& account) {
  Session s{random_token(), account.id, account.username, account.role, clock_() + ttl_};
  std::lock_guard lock(mu_);
  sessions_[s.token] = s;
  return s;
}

std::optional<Session> SessionTable::authenticate(std::string_view token) {
  if (token.empty()) return std::nullopt;
  const Timestamp now = clock_();
  std::lock_guard lock(mu_);
  auto it = sessions_.find(std::string(token));
  if (it == sessions_.end()) return std::nullopt;
  if (now >= it->second.expires_at) {
    sessions_.erase(it);
    return std::nullopt;
  }
  return it->second;
}

void SessionTable::revoke(std::string_view token) {
  std::lock_guard lock(mu_);
  sessions_.erase(std::string(token));
}

std::size_t SessionTable::size() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

}  // namespace arsip
