#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "httplib.h"

#include "archctl.hpp"
#include "arsip/archive_store.hpp"
#include "temp_dir.hpp"

extern char** environ;

namespace {

using arsip::testing::TempDir;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result archctl(std::vector<std::string> args) {
  args.insert(args.begin(), "archctl");
  std::ostringstream out;
  std::ostringstream err;
  const int code = arsip::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

// Every failure is exactly one "error: ..." line.
void check_single_error_line(const Result& r) {
  CHECK(r.err.rfind("error: ", 0) == 0);
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);
}

std::string write_file(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream(p, std::ios::binary) << bytes;
  return p.string();
}

struct Archive {
  TempDir dir;
  std::string data() const { return dir.path().string(); }

  Archive() {
    ::setenv("ARCHCTL_PASSWORD", "kata-sandi", 1);
    REQUIRE(archctl({"user", "add", "--username", "admin", "--role", "Admin", "--data-dir", data()})
                .code == 0);
    REQUIRE(archctl({"user", "add", "--username", "staff", "--role", "staff", "--data-dir", data()})
                .code == 0);
    ::unsetenv("ARCHCTL_PASSWORD");
  }

  Result ingest(const std::string& perihal, const std::string& no_surat,
                const std::string& kategori = "Dokumen Surat Masuk",
                const std::string& file_name = "surat.pdf", const std::string& as = "admin") {
    const auto file = write_file(dir.path() / file_name, "%PDF-1.4 " + perihal);
    return archctl({"ingest", "--file", file, "--perihal", perihal, "--no-surat", no_surat,
                    "--deskripsi", "arsip kantor", "--kategori", kategori, "--as", as,
                    "--data-dir", data()});
  }
};

}  // namespace

TEST_CASE("usage errors exit 2 with a single error line") {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {},
           {"frobnicate"},
           {"bench", "--pairs", "0"},
           {"bench", "--algo", "quantum"},
           {"bench", "--min-len", "9", "--max-len", "3"},
           {"user", "add", "--username", "x", "--role", "Boss", "--data-dir", "/nonexistent"},
           {"search"},
       }) {
    CAPTURE(args.size());
    const auto r = archctl(args);
    CHECK(r.code == arsip::cli::kExitUsage);
    check_single_error_line(r);
  }
}

TEST_CASE("help goes to stdout and exits 0") {
  const auto r = archctl({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("ingest") != std::string::npos);
  CHECK(r.err.empty());
}

TEST_CASE("user add rejects duplicates") {
  Archive a;
  ::setenv("ARCHCTL_PASSWORD", "lain", 1);
  const auto r = archctl({"user", "add", "--username", "admin", "--role", "Staff", "--data-dir", a.data()});
  ::unsetenv("ARCHCTL_PASSWORD");
  CHECK(r.code == arsip::cli::kExitFailure);
  CHECK(r.err.find("conflict") != std::string::npos);
  check_single_error_line(r);
}

TEST_CASE("ingest prints ids, infers content type and enforces constraints") {
  Archive a;
  auto r = a.ingest("Undangan rapat koordinasi", "001/UND/2024");
  REQUIRE(r.code == 0);
  CHECK(r.out == "1\n");
  CHECK(a.ingest("Laporan keuangan", "002").out == "2\n");

  SUBCASE("duplicate no_surat in the same category is a conflict") {
    r = a.ingest("Lain", "001/UND/2024");
    CHECK(r.code == arsip::cli::kExitFailure);
    CHECK(r.err.rfind("error: conflict: ", 0) == 0);
    check_single_error_line(r);
    // Same number in another root is fine.
    CHECK(a.ingest("Lain", "001/UND/2024", "Dokumen Surat Keluar").code == 0);
  }
  SUBCASE("unknown category lists the four roots") {
    r = a.ingest("Lain", "003", "Surat");
    CHECK(r.code == arsip::cli::kExitUsage);
    for (const char* root : {"Artikel", "Dokumen Surat Keluar", "Dokumen Surat Masuk", "Gambar"}) {
      CHECK(r.err.find(root) != std::string::npos);
    }
    check_single_error_line(r);
  }
  SUBCASE("images only in Gambar") {
    CHECK(a.ingest("Foto kegiatan", "F1", "Gambar", "foto.PNG").code == 0);
    r = a.ingest("Foto kegiatan", "F2", "Artikel", "foto.jpg");
    CHECK(r.code == arsip::cli::kExitFailure);
    check_single_error_line(r);
  }
  SUBCASE("staff cannot ingest") {
    r = a.ingest("Lain", "004", "Artikel", "x.pdf", "staff");
    CHECK(r.code == arsip::cli::kExitFailure);
    CHECK(r.err.find("forbidden") != std::string::npos);
  }
  SUBCASE("stored records carry the inferred type") {
    auto store = arsip::ArchiveStore::open(a.dir.path());
    CHECK(store->get_document(1).content_type == "application/pdf");
    CHECK(store->get_document(1).file_name == "surat.pdf");
  }
}

TEST_CASE("search prints a deterministic table and did-you-mean lines") {
  Archive a;
  REQUIRE(a.ingest("Undangan rapat koordinasi", "001").code == 0);
  REQUIRE(a.ingest("Notulen rapat anggaran", "002").code == 0);

  const auto r = archctl({"search", "undngan rapt", "--data-dir", a.data()});
  REQUIRE(r.code == 0);
  const auto again = archctl({"search", "undngan rapt", "--data-dir", a.data()});
  CHECK(r.out == again.out);

  std::istringstream lines(r.out);
  std::string header, first, second;
  std::getline(lines, header);
  std::getline(lines, first);
  std::getline(lines, second);
  CHECK(header.rfind("id", 0) == 0);
  CHECK(first.rfind("1 ", 0) == 0);
  CHECK(first.find("Undangan rapat koordinasi") != std::string::npos);
  CHECK(second.rfind("2 ", 0) == 0);
  CHECK(r.out.find("did you mean: undngan -> undangan") != std::string::npos);
  CHECK(r.out.find("did you mean: rapt -> rapat") != std::string::npos);

  // Scores are printed to four decimals.
  CHECK(first.find('.') != std::string::npos);
  CHECK(first.substr(first.find('.') + 1, 5).find(' ') == 4);

  const auto filtered = archctl({"search", "rapat", "--category", "Artikel", "--data-dir", a.data()});
  CHECK(filtered.code == 0);
  CHECK(filtered.out == "no matches\n");

  const auto none = archctl({"search", "xyzzyq", "--data-dir", a.data()});
  CHECK(none.code == 0);
  CHECK(none.out.rfind("no matches\n", 0) == 0);

  const auto bad = archctl({"search", "rapat", "--threshold-policy", "4:x", "--data-dir", a.data()});
  CHECK(bad.code == arsip::cli::kExitUsage);
}

TEST_CASE("suggest lists candidates with distance and frequency") {
  Archive a;
  REQUIRE(a.ingest("Undangan rapat", "001").code == 0);
  REQUIRE(a.ingest("Rapat dinas", "002").code == 0);
  const auto r = archctl({"suggest", "rapt", "--data-dir", a.data()});
  CHECK(r.code == 0);
  CHECK(r.out.find("rapat") != std::string::npos);
  std::istringstream lines(r.out);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  std::istringstream fields(row);
  std::string cand;
  int dist = -1, freq = -1;
  fields >> cand >> dist >> freq;
  CHECK(cand == "rapat");
  CHECK(dist == 1);
  CHECK(freq == 2);
}

TEST_CASE("bench is reproducible and cross-checks algorithms") {
  const std::vector<std::string> args = {"bench", "--pairs", "200", "--min-len", "60",
                                         "--max-len", "70", "--seed", "7"};
  const auto r = archctl(args);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("OK\n") != std::string::npos);
  CHECK(r.out.find("speedup bitparallel/dp") != std::string::npos);
  const auto digest_line = [](const std::string& s) { return s.substr(0, s.find('\n')); };
  CHECK(digest_line(archctl(args).out) == digest_line(r.out));
  const auto other = archctl({"bench", "--pairs", "200", "--min-len", "60", "--max-len", "70",
                              "--seed", "8", "--algo", "banded"});
  CHECK(other.code == 0);
  CHECK(digest_line(other.out) != digest_line(r.out));
}

// --- serve runs as a real process ------------------------------------------

namespace {

struct Child {
  pid_t pid = -1;
  int err_fd = -1;

  ~Child() {
    if (pid > 0) {
      ::kill(pid, SIGKILL);
      ::waitpid(pid, nullptr, 0);
    }
    if (err_fd >= 0) ::close(err_fd);
  }

  int wait() {
    int status = 0;
    ::waitpid(pid, &status, 0);
    pid = -1;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string drain_err() {
    std::string s;
    char buf[512];
    ssize_t n;
    while ((n = ::read(err_fd, buf, sizeof buf)) > 0) s.append(buf, static_cast<std::size_t>(n));
    return s;
  }
};

std::unique_ptr<Child> spawn_archctl(const std::vector<std::string>& args) {
  std::vector<std::string> all = {ARCHCTL_BIN};
  all.insert(all.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : all) argv.push_back(a.data());
  argv.push_back(nullptr);

  int pipefd[2];
  REQUIRE(::pipe(pipefd) == 0);
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, pipefd[1], STDERR_FILENO);
  posix_spawn_file_actions_addclose(&actions, pipefd[0]);
  posix_spawn_file_actions_addopen(&actions, STDOUT_FILENO, "/dev/null", O_WRONLY, 0);
  auto child = std::make_unique<Child>();
  REQUIRE(::posix_spawn(&child->pid, ARCHCTL_BIN, &actions, nullptr, argv.data(), environ) == 0);
  posix_spawn_file_actions_destroy(&actions);
  ::close(pipefd[1]);
  child->err_fd = pipefd[0];
  return child;
}

int free_port() {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  REQUIRE(::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  ::close(fd);
  return ntohs(addr.sin_port);
}

bool wait_for_health(int port) {
  httplib::Client c("127.0.0.1", port);
  c.set_connection_timeout(std::chrono::milliseconds(200));
  for (int i = 0; i < 100; ++i) {
    if (auto res = c.Get("/api/health"); res && res->status == 200) return true;
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  return false;
}

}  // namespace

TEST_CASE("serve answers health, refuses a busy port and stops on SIGTERM") {
  Archive a;
  REQUIRE(a.ingest("Undangan rapat", "001").code == 0);
  const int port = free_port();
  const std::string addr = "127.0.0.1:" + std::to_string(port);

  auto server = spawn_archctl({"serve", "--addr", addr, "--data-dir", a.data()});
  if (!wait_for_health(port)) {
    ::kill(server->pid, SIGTERM);
    server->wait();
    FAIL("server never became healthy: " << server->drain_err());
  }

  auto second = spawn_archctl({"serve", "--addr", addr, "--data-dir", a.data()});
  CHECK(second->wait() == 1);
  const auto err = second->drain_err();
  CHECK(err.rfind("error: ", 0) == 0);
  CHECK(err.find(addr) != std::string::npos);

  REQUIRE(wait_for_health(port));
  ::kill(server->pid, SIGTERM);
  CHECK(server->wait() == 0);
}

TEST_CASE("serve refuses a corrupt log and names the line") {
  Archive a;
  REQUIRE(a.ingest("Satu", "001").code == 0);
  REQUIRE(a.ingest("Dua", "002").code == 0);
  {
    std::ofstream log(a.dir.path() / "documents.log", std::ios::app);
    log << "{\"v\":1,\"op\":\"create\",\"rec";
  }
  auto server = spawn_archctl(
      {"serve", "--addr", "127.0.0.1:" + std::to_string(free_port()), "--data-dir", a.data()});
  CHECK(server->wait() == 1);
  const auto err = server->drain_err();
  CHECK(err.find("corrupt_log") != std::string::npos);
  CHECK(err.find("line 3") != std::string::npos);
}
