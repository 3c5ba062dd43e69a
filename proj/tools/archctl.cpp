#include "archctl.hpp"

#include <pthread.h>
#include <signal.h>
#include <termios.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "arsip/api_server.hpp"
#include "arsip/archive_store.hpp"
#include "arsip/auth.hpp"
#include "arsip/error.hpp"
#include "arsip/kernels.hpp"
#include "arsip/utf8.hpp"

namespace arsip::cli {

namespace {

namespace fs = std::filesystem;

struct UsageError {
  std::string message;
};

struct CommandError {
  std::string code;
  std::string message;
};

std::string default_data_dir() {
  if (const char* env = std::getenv("ARSIP_DATA_DIR"); env && *env) return env;
  return "./data";
}

Category category_arg(const std::string& text) {
  if (auto c = parse_category(text)) return *c;
  throw UsageError{"unknown category '" + text + "'; expected one of: " +
                   std::string(category_list())};
}

std::chrono::milliseconds parse_duration(const std::string& text) {
  std::size_t value = 0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr == begin) throw UsageError{"invalid duration '" + text + "'"};
  const std::string_view unit(ptr, static_cast<std::size_t>(end - ptr));
  const auto v = static_cast<std::int64_t>(value);
  if (unit.empty() || unit == "s") return std::chrono::seconds(v);
  if (unit == "ms") return std::chrono::milliseconds(v);
  if (unit == "m") return std::chrono::minutes(v);
  if (unit == "h") return std::chrono::hours(v);
  throw UsageError{"invalid duration unit in '" + text + "' (use ms, s, m or h)"};
}

std::pair<std::string, int> parse_addr(const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos) throw UsageError{"--addr must be host:port"};
  int port = 0;
  const std::string p = addr.substr(colon + 1);
  const auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), port);
  if (ec != std::errc{} || ptr != p.data() + p.size() || port < 0 || port > 65535) {
    throw UsageError{"invalid port in --addr '" + addr + "'"};
  }
  return {addr.substr(0, colon), port};
}

std::string infer_content_type(const fs::path& file) {
  std::string ext = file.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".pdf") return "application/pdf";
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  return "application/octet-stream";
}

std::string read_password(std::ostream& err) {
  if (const char* env = std::getenv("ARCHCTL_PASSWORD"); env && *env) return env;
  std::string password;
  if (::isatty(STDIN_FILENO)) {
    err << "Password: " << std::flush;
    termios old{};
    ::tcgetattr(STDIN_FILENO, &old);
    termios silent = old;
    silent.c_lflag &= ~static_cast<tcflag_t>(ECHO);
    ::tcsetattr(STDIN_FILENO, TCSANOW, &silent);
    std::getline(std::cin, password);
    ::tcsetattr(STDIN_FILENO, TCSANOW, &old);
    err << "\n";
  } else {
    std::getline(std::cin, password);
  }
  return password;
}

std::unique_ptr<ArchiveStore> open_store(const std::string& data_dir, const std::string& policy) {
  StoreOptions options;
  if (!policy.empty()) {
    try {
      options.policy = DistancePolicy::parse(policy);
    } catch (const Error& e) {
      throw UsageError{e.what()};
    }
  }
  return ArchiveStore::open(data_dir, std::move(options));
}

// --- serve -----------------------------------------------------------------

struct ServeArgs {
  std::string addr = "127.0.0.1:8080";
  std::string data_dir = default_data_dir();
  std::string session_ttl = "8h";
  bool public_read = false;
  std::string webui_dir;
  std::string policy;
};

int serve(const ServeArgs& args, std::ostream& out) {
  const auto [host, port] = parse_addr(args.addr);
  ApiConfig config;
  config.session_ttl = parse_duration(args.session_ttl);
  config.public_read = args.public_read;
  if (!args.webui_dir.empty()) config.webui_dir = args.webui_dir;

  auto store = open_store(args.data_dir, args.policy);
  auto users = UserStore::open(args.data_dir);
  ApiServer server(*store, *users, config);

  // Signals are taken synchronously by a watcher thread; the mask is set
  // before any server thread exists so they all inherit it.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  sigaddset(&signals, SIGUSR1);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  if (!server.bind(host, port)) {
    pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
    throw CommandError{"bind", "cannot listen on " + args.addr};
  }
  std::thread watcher([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  });
  out << "listening on http://" << args.addr << " (data dir " << args.data_dir << ", "
      << store->live_count() << " documents)" << std::endl;
  server.listen_after_bind();
  pthread_kill(watcher.native_handle(), SIGUSR1);
  watcher.join();
  pthread_sigmask(SIG_UNBLOCK, &signals, nullptr);
  return kExitOk;
}

// --- user add --------------------------------------------------------------

int user_add(const std::string& data_dir, const std::string& username, const std::string& role_text,
             std::ostream& out, std::ostream& err) {
  const auto role = parse_role(role_text);
  if (!role) throw UsageError{"unknown role '" + role_text + "'; expected Admin or Staff"};
  auto users = UserStore::open(data_dir);
  if (users->find_by_name(username)) {
    throw CommandError{"conflict", "user '" + username + "' already exists"};
  }
  const std::string password = read_password(err);
  const auto account = users->add_user(username, password, *role);
  out << "added user " << account.username << " (id " << account.id << ", role "
      << to_string(account.role) << ")\n";
  return kExitOk;
}

// --- ingest ----------------------------------------------------------------

struct IngestArgs {
  std::string data_dir = default_data_dir();
  std::string file;
  std::string perihal;
  std::string no_surat;
  std::string deskripsi;
  std::string kategori;
  std::string as_user;
  std::string content_type;
};

int ingest(const IngestArgs& args, std::ostream& out) {
  const Category category = category_arg(args.kategori);
  if (!fs::is_regular_file(args.file)) throw UsageError{"no such file: " + args.file};
  auto users = UserStore::open(args.data_dir);
  const auto actor = users->find_by_name(args.as_user);
  if (!actor) throw CommandError{"not_found", "unknown user '" + args.as_user + "'"};
  if (actor->role != Role::kAdmin) {
    throw CommandError{"forbidden", "user '" + args.as_user + "' is not an Admin"};
  }

  std::ifstream in(args.file, std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), {});
  auto store = ArchiveStore::open(args.data_dir);
  const auto record = store->create_document(
      {args.perihal, args.no_surat, args.deskripsi, category},
      {std::move(bytes), fs::path(args.file).filename().string(),
       args.content_type.empty() ? infer_content_type(args.file) : args.content_type},
      actor->id);
  out << record.id << "\n";
  return kExitOk;
}

// --- search / suggest ------------------------------------------------------

std::string format_score(double score) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(4) << score;
  return s.str();
}

int search(const std::string& data_dir, const std::string& policy, const std::string& query,
           const std::string& category_text, std::ostream& out) {
  std::optional<Category> category;
  if (!category_text.empty()) category = category_arg(category_text);
  auto store = open_store(data_dir, policy);
  const SearchOutcome outcome = store->search(query, category, 1);
  if (outcome.hits.empty()) {
    out << "no matches\n";
  } else {
    out << std::left << std::setw(8) << "id" << std::setw(10) << "score"
        << "perihal\n";
    for (const auto& h : outcome.hits) {
      out << std::left << std::setw(8) << h.record.id << std::setw(10) << format_score(h.hit.score)
          << h.record.perihal << "\n";
    }
  }
  for (const auto& s : outcome.suggestions) {
    out << "did you mean: " << s.token << " -> " << s.suggestion.candidate << "\n";
  }
  return kExitOk;
}

int suggest(const std::string& data_dir, const std::string& policy, const std::string& token,
            std::size_t limit, std::ostream& out) {
  auto store = open_store(data_dir, policy);
  const auto suggestions = store->suggest(token, limit);
  if (suggestions.empty()) {
    out << "no matches\n";
    return kExitOk;
  }
  out << std::left << std::setw(24) << "candidate" << std::setw(10) << "distance"
      << "frequency\n";
  for (const auto& s : suggestions) {
    out << std::left << std::setw(24) << s.candidate << std::setw(10) << s.distance << s.frequency
        << "\n";
  }
  return kExitOk;
}

// --- bench -----------------------------------------------------------------

struct BenchArgs {
  std::size_t pairs = 10000;
  std::size_t min_len = 200;
  std::size_t max_len = 200;
  std::string algo;
  std::uint64_t seed = 42;
};

std::vector<kernels::StringPair> bench_pairs(const BenchArgs& args) {
  std::mt19937_64 rng(args.seed);
  std::uniform_int_distribution<std::size_t> len(args.min_len, args.max_len);
  std::uniform_int_distribution<int> letter(0, 25);
  auto word = [&] {
    std::u32string s(len(rng), U'a');
    for (auto& c : s) c = static_cast<char32_t>(U'a' + letter(rng));
    return s;
  };
  std::vector<kernels::StringPair> pairs(args.pairs);
  for (auto& p : pairs) {
    p.a = word();
    p.b = word();
  }
  return pairs;
}

std::uint64_t digest(const std::vector<kernels::StringPair>& pairs) {
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a
  auto mix = [&h](const std::u32string& s) {
    for (char32_t c : s) {
      h ^= c;
      h *= 1099511628211ull;
    }
    h ^= 0xFF;
    h *= 1099511628211ull;
  };
  for (const auto& p : pairs) {
    mix(p.a);
    mix(p.b);
  }
  return h;
}

int bench(const BenchArgs& args, std::ostream& out) {
  using kernels::Algorithm;
  if (args.pairs == 0) throw UsageError{"--pairs must be at least 1"};
  if (args.min_len > args.max_len) throw UsageError{"--min-len must not exceed --max-len"};
  std::vector<Algorithm> algos = {Algorithm::kDp, Algorithm::kBanded, Algorithm::kBitParallel};
  if (!args.algo.empty()) {
    const auto a = kernels::parse_algorithm(args.algo);
    if (!a) throw UsageError{"unknown --algo '" + args.algo + "'; expected dp, banded or bitparallel"};
    algos = {*a};
  }

  const auto pairs = bench_pairs(args);
  out << "pairs=" << pairs.size() << " len=[" << args.min_len << "," << args.max_len
      << "] seed=" << args.seed << " threads=" << kernels::max_threads() << " digest=" << std::hex
      << digest(pairs) << std::dec << "\n";

  const auto reference = kernels::distances_serial(pairs, Algorithm::kDp);
  auto time_it = [&](auto&& fn) {
    const auto start = std::chrono::steady_clock::now();
    auto result = fn();
    const auto ns = std::chrono::duration<double, std::nano>(std::chrono::steady_clock::now() - start);
    return std::pair{std::move(result), ns.count()};
  };

  out << std::left << std::setw(13) << "algo" << std::right << std::setw(14) << "serial ns/op"
      << std::setw(14) << "pairs/s" << std::setw(16) << "parallel ns/op" << std::setw(14)
      << "pairs/s" << "\n";
  bool agree = true;
  std::optional<double> dp_ns;
  std::optional<double> bp_ns;
  const double n = static_cast<double>(pairs.size());
  for (Algorithm algo : algos) {
    auto [serial, serial_ns] = time_it([&] { return kernels::distances_serial(pairs, algo); });
    auto [parallel, parallel_ns] = time_it([&] { return kernels::distances_parallel(pairs, algo); });
    agree = agree && serial == reference && parallel == reference;
    if (algo == Algorithm::kDp) dp_ns = serial_ns;
    if (algo == Algorithm::kBitParallel) bp_ns = serial_ns;
    out << std::left << std::setw(13) << kernels::to_string(algo) << std::right << std::fixed
        << std::setprecision(1) << std::setw(14) << serial_ns / n << std::setw(14)
        << std::setprecision(0) << n / (serial_ns * 1e-9) << std::setw(16) << std::setprecision(1)
        << parallel_ns / n << std::setw(14) << std::setprecision(0)
        << n / (parallel_ns * 1e-9) << "\n";
  }
  if (dp_ns && bp_ns) {
    out << "speedup bitparallel/dp: " << std::setprecision(2) << *dp_ns / *bp_ns << "x\n";
  }
  out.unsetf(std::ios::floatfield);
  if (!agree) throw CommandError{"mismatch", "algorithms disagree with the dp reference"};
  out << "OK\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"archctl: operate the document archive (serve, users, ingest, search, bench)",
               "archctl"};
  app.require_subcommand(1);

  ServeArgs serve_args;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP API server");
  serve_cmd->add_option("--addr", serve_args.addr, "Listen address host:port")->capture_default_str();
  serve_cmd->add_option("--data-dir", serve_args.data_dir, "Data directory")->capture_default_str();
  serve_cmd->add_option("--session-ttl", serve_args.session_ttl, "Session lifetime (e.g. 8h, 30m)")
      ->capture_default_str();
  serve_cmd->add_flag("--public-read", serve_args.public_read, "Allow reads without login");
  serve_cmd->add_option("--webui-dir", serve_args.webui_dir, "Static web client to serve at /");
  serve_cmd->add_option("--threshold-policy", serve_args.policy,
                        "Distance budgets by token length, e.g. 4:1,8:2,*:3");

  std::string user_data_dir = default_data_dir();
  std::string username;
  std::string role;
  auto* user_cmd = app.add_subcommand("user", "Manage user accounts");
  user_cmd->require_subcommand(1);
  auto* user_add_cmd = user_cmd->add_subcommand("add", "Add an account (password from ARCHCTL_PASSWORD or prompt)");
  user_add_cmd->add_option("--username", username, "Login name")->required();
  user_add_cmd->add_option("--role", role, "Admin or Staff")->required();
  user_add_cmd->add_option("--data-dir", user_data_dir, "Data directory")->capture_default_str();

  IngestArgs ingest_args;
  auto* ingest_cmd = app.add_subcommand("ingest", "Archive a file directly into the store");
  ingest_cmd->add_option("--file", ingest_args.file, "File to archive")->required();
  ingest_cmd->add_option("--perihal", ingest_args.perihal, "Subject")->required();
  ingest_cmd->add_option("--no-surat", ingest_args.no_surat, "Letter number")->required();
  ingest_cmd->add_option("--deskripsi", ingest_args.deskripsi, "Description");
  ingest_cmd->add_option("--kategori", ingest_args.kategori, category_list().data())->required();
  ingest_cmd->add_option("--as", ingest_args.as_user, "Admin username performing the upload")
      ->required();
  ingest_cmd->add_option("--content-type", ingest_args.content_type,
                         "MIME type (default: from the file extension)");
  ingest_cmd->add_option("--data-dir", ingest_args.data_dir, "Data directory")->capture_default_str();

  std::string query_data_dir = default_data_dir();
  std::string query_policy;
  std::string query;
  std::string category;
  auto* search_cmd = app.add_subcommand("search", "Typo-tolerant search over document metadata");
  search_cmd->add_option("query", query, "Query text")->required();
  search_cmd->add_option("--category", category, "Restrict to one root");
  search_cmd->add_option("--data-dir", query_data_dir, "Data directory")->capture_default_str();
  search_cmd->add_option("--threshold-policy", query_policy, "Distance budgets by token length");

  std::string token;
  std::size_t limit = 10;
  auto* suggest_cmd = app.add_subcommand("suggest", "Did-you-mean candidates for one token");
  suggest_cmd->add_option("token", token, "Token")->required();
  suggest_cmd->add_option("--limit", limit, "Maximum candidates")->capture_default_str();
  suggest_cmd->add_option("--data-dir", query_data_dir, "Data directory")->capture_default_str();
  suggest_cmd->add_option("--threshold-policy", query_policy, "Distance budgets by token length");

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "Time and cross-check the distance kernels");
  bench_cmd->add_option("--pairs", bench_args.pairs, "Number of random pairs")->capture_default_str();
  bench_cmd->add_option("--min-len", bench_args.min_len, "Minimum length")->capture_default_str();
  bench_cmd->add_option("--max-len", bench_args.max_len, "Maximum length")->capture_default_str();
  bench_cmd->add_option("--algo", bench_args.algo, "dp, banded or bitparallel (default: all)");
  bench_cmd->add_option("--seed", bench_args.seed, "Pair generator seed")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*serve_cmd) return serve(serve_args, out);
    if (*user_add_cmd) return user_add(user_data_dir, username, role, out, err);
    if (*ingest_cmd) return ingest(ingest_args, out);
    if (*search_cmd) return search(query_data_dir, query_policy, query, category, out);
    if (*suggest_cmd) return suggest(query_data_dir, query_policy, token, limit, out);
    if (*bench_cmd) return bench(bench_args, out);
  } catch (const UsageError& e) {
    err << "error: usage: " << e.message << "\n";
    return kExitUsage;
  } catch (const CommandError& e) {
    err << "error: " << e.code << ": " << e.message << "\n";
    return kExitFailure;
  } catch (const Error& e) {
    err << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace arsip::cli
