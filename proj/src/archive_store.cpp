#include "arsip/archive_store.hpp"

#include <algorithm>
#include <cctype>
#include <mutex>
#include <set>

#include <spdlog/spdlog.h>

#include "arsip/error.hpp"
#include "arsip/record_json.hpp"
#include "durable_file.hpp"

namespace arsip {

namespace fs = std::filesystem;

Timestamp system_now() {
  return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

namespace {

constexpr const char* kLogFile = "documents.log";
constexpr const char* kBlobDir = "blobs";

std::string trim(std::string_view s) {
  const auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
  while (!s.empty() && is_space(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::string media_type(std::string_view content_type) {
  std::string out = trim(content_type.substr(0, content_type.find(';')));
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

DocumentMeta normalized(const DocumentMeta& meta) {
  DocumentMeta out{trim(meta.perihal), trim(meta.no_surat), trim(meta.deskripsi), meta.kategori};
  if (out.perihal.empty()) throw Error(ErrorCode::kValidation, "perihal must not be empty");
  if (out.no_surat.empty()) throw Error(ErrorCode::kValidation, "no_surat must not be empty");
  return out;
}

std::string base_name(std::string_view name) {
  const auto slash = name.find_last_of("/\\");
  if (slash != std::string_view::npos) name.remove_prefix(slash + 1);
  std::string out = trim(name);
  return out.empty() ? "file" : out;
}

void require_actor(UserId actor) {
  if (actor == 0) throw Error(ErrorCode::kValidation, "mutation requires an acting user");
}

}  // namespace

bool content_type_allowed(Category category, std::string_view content_type) {
  const std::string type = media_type(content_type);
  if (type == "application/pdf") return true;
  return category == Category::kGambar && (type == "image/png" || type == "image/jpeg");
}

class ArchiveStore::LogWriter : public detail::AppendFile {
 public:
  using AppendFile::AppendFile;
};

ArchiveStore::ArchiveStore(fs::path data_dir, StoreOptions options)
    : data_dir_(std::move(data_dir)),
      clock_(std::move(options.clock)),
      index_(std::move(options.policy)) {}

ArchiveStore::~ArchiveStore() = default;

std::unique_ptr<ArchiveStore> ArchiveStore::open(const fs::path& data_dir, StoreOptions options) {
  std::error_code ec;
  fs::create_directories(data_dir / kBlobDir, ec);
  if (ec) {
    throw Error(ErrorCode::kIo, "cannot create data directory " + data_dir.string() + ": " +
                                    ec.message());
  }
  std::unique_ptr<ArchiveStore> store(new ArchiveStore(data_dir, std::move(options)));
  store->replay();
  store->log_ = std::make_unique<LogWriter>(data_dir / kLogFile);
  return store;
}

void ArchiveStore::replay() {
  const fs::path log_path = data_dir_ / kLogFile;
  std::string content;
  if (fs::exists(log_path)) content = detail::read_file(log_path);

  const auto corrupt = [&](std::size_t line_no, const std::string& why) {
    return Error(ErrorCode::kCorruptLog,
                 log_path.string() + ": line " + std::to_string(line_no) + ": " + why);
  };

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < content.size()) {
    ++line_no;
    const std::size_t nl = content.find('\n', pos);
    if (nl == std::string::npos) throw corrupt(line_no, "truncated record (missing newline)");
    const std::string_view line(content.data() + pos, nl - pos);
    pos = nl + 1;

    nlohmann::json event;
    try {
      event = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw corrupt(line_no, std::string("unparseable record: ") + e.what());
    }
    if (!event.is_object() || !event.contains("v") || !event["v"].is_number_integer()) {
      throw corrupt(line_no, "missing version field 'v'");
    }
    if (event["v"].get<int>() != kLogVersion) {
      throw Error(ErrorCode::kUnsupportedVersion,
                  log_path.string() + ": line " + std::to_string(line_no) +
                      ": unsupported log version " + event["v"].dump());
    }

    std::string op;
    DocumentRecord record;
    try {
      op = event.at("op").get<std::string>();
      record = from_log_json(event.at("record"));
    } catch (const std::exception& e) {
      throw corrupt(line_no, std::string("bad record payload: ") + e.what());
    }
    const bool known = records_.contains(record.id);
    if (op == "create") {
      if (known) throw corrupt(line_no, "duplicate create for id " + std::to_string(record.id));
    } else if (op == "update" || op == "delete") {
      if (!known) throw corrupt(line_no, op + " of unknown id " + std::to_string(record.id));
    } else {
      throw corrupt(line_no, "unknown op '" + op + "'");
    }
    if ((op == "delete") != record.deleted) {
      throw corrupt(line_no, "op '" + op + "' disagrees with the record's deleted flag");
    }
    records_[record.id] = std::move(record);
  }

  next_id_ = records_.empty() ? 1 : records_.rbegin()->first + 1;
  std::set<std::string> live_blobs;
  for (const auto& [id, record] : records_) {
    if (record.deleted) continue;
    if (!fs::exists(blob_path(id))) {
      throw Error(ErrorCode::kCorruptLog, "missing blob for live document " + std::to_string(id) +
                                              " (" + blob_path(id).string() + ")");
    }
    live_blobs.insert(blob_path(id).filename().string());
    const auto [it, inserted] = live_numbers_.try_emplace({record.kategori, record.no_surat}, id);
    if (!inserted) {
      throw Error(ErrorCode::kCorruptLog,
                  "documents " + std::to_string(it->second) + " and " + std::to_string(id) +
                      " share no_surat '" + record.no_surat + "' in " +
                      std::string(label(record.kategori)));
    }
    index_.index_document(record);
  }

  // Blobs not owned by a live record come from a write that never reached
  // the log, or a delete interrupted after its tombstone.
  for (const auto& entry : fs::directory_iterator(data_dir_ / kBlobDir)) {
    const std::string name = entry.path().filename().string();
    if (!live_blobs.contains(name)) {
      spdlog::warn("removing orphaned blob {}", entry.path().string());
      fs::remove(entry.path());
    }
  }
}

fs::path ArchiveStore::blob_path(DocumentId id) const {
  return data_dir_ / kBlobDir / std::to_string(id);
}

void ArchiveStore::append_event(std::string_view op, const DocumentRecord& record) {
  const nlohmann::json event = {{"v", kLogVersion}, {"op", op}, {"record", to_log_json(record)}};
  log_->append(event.dump() + "\n");
}

const DocumentRecord& ArchiveStore::live_record(DocumentId id) const {
  auto it = records_.find(id);
  if (it == records_.end() || it->second.deleted) {
    throw Error(ErrorCode::kNotFound, "document " + std::to_string(id) + " not found");
  }
  return it->second;
}

DocumentRecord ArchiveStore::create_document(const DocumentMeta& meta, const FileUpload& file,
                                             UserId actor) {
  require_actor(actor);
  const DocumentMeta m = normalized(meta);
  if (file.bytes.empty()) throw Error(ErrorCode::kValidation, "file must not be empty");
  if (!content_type_allowed(m.kategori, file.content_type)) {
    throw Error(ErrorCode::kValidation, "content type '" + file.content_type +
                                            "' is not accepted for " +
                                            std::string(label(m.kategori)));
  }

  std::unique_lock lock(mu_);
  if (live_numbers_.contains({m.kategori, m.no_surat})) {
    throw Error(ErrorCode::kConflict, "no_surat '" + m.no_surat + "' already exists in " +
                                          std::string(label(m.kategori)));
  }

  DocumentRecord record;
  record.id = next_id_;
  record.perihal = m.perihal;
  record.no_surat = m.no_surat;
  record.deskripsi = m.deskripsi;
  record.kategori = m.kategori;
  record.file_name = base_name(file.file_name);
  record.file_ref = std::string(kBlobDir) + "/" + std::to_string(record.id);
  record.content_type = media_type(file.content_type);
  record.file_size = file.bytes.size();
  record.uploaded_by = actor;
  record.uploaded_at = clock_();

  // Blob first: a crash before the log append leaves only an orphan, which
  // the next open removes.
  detail::write_file_atomically(blob_path(record.id), file.bytes);
  try {
    append_event("create", record);
  } catch (...) {
    fs::remove(blob_path(record.id));
    throw;
  }
  ++next_id_;
  live_numbers_.emplace(std::pair{record.kategori, record.no_surat}, record.id);
  records_.emplace(record.id, record);
  index_.index_document(record);
  return record;
}

DocumentRecord ArchiveStore::get_document(DocumentId id) const {
  std::shared_lock lock(mu_);
  return live_record(id);
}

std::string ArchiveStore::read_blob(DocumentId id) const {
  std::shared_lock lock(mu_);
  live_record(id);
  return detail::read_file(blob_path(id));
}

DocumentRecord ArchiveStore::update_document(DocumentId id, const DocumentMeta& meta,
                                             UserId actor) {
  require_actor(actor);
  const DocumentMeta m = normalized(meta);

  std::unique_lock lock(mu_);
  const DocumentRecord& current = live_record(id);
  if (auto it = live_numbers_.find({m.kategori, m.no_surat});
      it != live_numbers_.end() && it->second != id) {
    throw Error(ErrorCode::kConflict, "no_surat '" + m.no_surat + "' already exists in " +
                                          std::string(label(m.kategori)));
  }
  if (!content_type_allowed(m.kategori, current.content_type)) {
    throw Error(ErrorCode::kValidation, "stored file type '" + current.content_type +
                                            "' is not accepted for " +
                                            std::string(label(m.kategori)));
  }

  DocumentRecord updated = current;
  updated.perihal = m.perihal;
  updated.no_surat = m.no_surat;
  updated.deskripsi = m.deskripsi;
  updated.kategori = m.kategori;
  if (updated == current) return updated;

  append_event("update", updated);
  live_numbers_.erase({current.kategori, current.no_surat});
  live_numbers_.emplace(std::pair{updated.kategori, updated.no_surat}, id);
  records_[id] = updated;
  index_.index_document(updated);
  return updated;
}

void ArchiveStore::delete_document(DocumentId id, UserId actor) {
  require_actor(actor);
  std::unique_lock lock(mu_);
  DocumentRecord tombstone = live_record(id);
  tombstone.deleted = true;
  append_event("delete", tombstone);
  live_numbers_.erase({tombstone.kategori, tombstone.no_surat});
  records_[id] = tombstone;
  index_.deindex_document(id);
  std::error_code ec;
  fs::remove(blob_path(id), ec);
  if (ec) spdlog::warn("could not remove blob of deleted document {}: {}", id, ec.message());
}

std::vector<DocumentRecord> ArchiveStore::list_by_category(Category category, Page page) const {
  std::shared_lock lock(mu_);
  std::vector<const DocumentRecord*> live;
  for (const auto& [id, record] : records_) {
    if (!record.deleted && record.kategori == category) live.push_back(&record);
  }
  std::stable_sort(live.begin(), live.end(), [](const DocumentRecord* a, const DocumentRecord* b) {
    return a->uploaded_at > b->uploaded_at;
  });
  std::vector<DocumentRecord> out;
  for (std::size_t i = page.offset; i < live.size() && out.size() < page.limit; ++i) {
    out.push_back(*live[i]);
  }
  return out;
}

std::size_t ArchiveStore::count_in_category(Category category) const {
  std::shared_lock lock(mu_);
  return static_cast<std::size_t>(std::count_if(records_.begin(), records_.end(), [&](const auto& kv) {
    return !kv.second.deleted && kv.second.kategori == category;
  }));
}

std::vector<DocumentRecord> ArchiveStore::all_records() const {
  std::shared_lock lock(mu_);
  std::vector<DocumentRecord> out;
  out.reserve(records_.size());
  for (const auto& [id, record] : records_) out.push_back(record);
  return out;
}

std::size_t ArchiveStore::live_count() const {
  std::shared_lock lock(mu_);
  return live_numbers_.size();
}

SearchOutcome ArchiveStore::search(std::string_view query, std::optional<Category> category,
                                   std::size_t suggestions_per_token) const {
  std::shared_lock lock(mu_);
  SearchOutcome out;
  for (auto& hit : index_.search(query, category)) {
    const DocumentRecord& record = records_.at(hit.document_id);
    out.hits.push_back({std::move(hit), record});
  }
  if (suggestions_per_token > 0) {
    std::set<std::string> seen;
    for (const std::string& token : tokenize(query)) {
      if (!seen.insert(token).second || index_.contains_token(token)) continue;
      for (auto& s : index_.suggest(token, suggestions_per_token)) {
        out.suggestions.push_back({token, std::move(s)});
      }
    }
  }
  return out;
}

std::vector<Suggestion> ArchiveStore::suggest(std::string_view token, std::size_t limit) const {
  std::shared_lock lock(mu_);
  const auto tokens = tokenize(token);
  if (tokens.size() != 1) return {};
  return index_.suggest(tokens.front(), limit);
}

}  // namespace arsip
