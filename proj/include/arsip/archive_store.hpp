#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <utility>
#include <vector>

#include "arsip/category.hpp"
#include "arsip/fuzzy_index.hpp"
#include "arsip/record.hpp"

namespace arsip {

using Clock = std::function<Timestamp()>;

/// Wall clock truncated to milliseconds.
Timestamp system_now();

/// Editable metadata of a document.
struct DocumentMeta {
  std::string perihal;
  std::string no_surat;
  std::string deskripsi;
  Category kategori = Category::kArtikel;
};

struct FileUpload {
  std::string bytes;
  std::string file_name;
  std::string content_type;
};

struct Page {
  std::size_t offset = 0;
  std::size_t limit = 50;
};

/// True when `content_type` (parameters ignored, case-insensitive) may be
/// stored under `category`: application/pdf everywhere, plus image/png and
/// image/jpeg for Gambar.
bool content_type_allowed(Category category, std::string_view content_type);

struct ResolvedHit {
  SearchHit hit;
  DocumentRecord record;
};

/// "Did you mean" entry for a query token that is not in the vocabulary.
struct TokenSuggestion {
  std::string token;
  Suggestion suggestion;
};

struct SearchOutcome {
  std::vector<ResolvedHit> hits;
  std::vector<TokenSuggestion> suggestions;
};

struct StoreOptions {
  DistancePolicy policy{};
  Clock clock = system_now;
};

/// Documents and their blobs under one data directory:
///
///   <data_dir>/documents.log   one JSON event per line (create/update/delete)
///   <data_dir>/blobs/<id>      raw file bytes of live documents
///
/// Mutations are serialized; reads run concurrently and always see a fully
/// applied state of both the records and the fuzzy index.
class ArchiveStore {
 public:
  static constexpr int kLogVersion = 1;

  /// Replays the log, verifies blobs, drops orphaned blobs left by an
  /// interrupted write and rebuilds the index. Throws Error(kCorruptLog) or
  /// Error(kUnsupportedVersion) naming the offending line.
  static std::unique_ptr<ArchiveStore> open(const std::filesystem::path& data_dir,
                                            StoreOptions options = {});

  ~ArchiveStore();
  ArchiveStore(const ArchiveStore&) = delete;
  ArchiveStore& operator=(const ArchiveStore&) = delete;

  DocumentRecord create_document(const DocumentMeta& meta, const FileUpload& file, UserId actor);
  DocumentRecord get_document(DocumentId id) const;
  std::string read_blob(DocumentId id) const;
  DocumentRecord update_document(DocumentId id, const DocumentMeta& meta, UserId actor);
  void delete_document(DocumentId id, UserId actor);

  /// Live records of one category, newest first, ties by ascending id.
  std::vector<DocumentRecord> list_by_category(Category category, Page page) const;
  std::size_t count_in_category(Category category) const;

  /// Every record ever written, tombstones included, by ascending id.
  std::vector<DocumentRecord> all_records() const;
  std::size_t live_count() const;

  SearchOutcome search(std::string_view query, std::optional<Category> category = std::nullopt,
                       std::size_t suggestions_per_token = 1) const;
  std::vector<Suggestion> suggest(std::string_view token, std::size_t limit) const;

  const FuzzyIndex& index() const noexcept { return index_; }
  const std::filesystem::path& data_dir() const noexcept { return data_dir_; }

 private:
  class LogWriter;

  ArchiveStore(std::filesystem::path data_dir, StoreOptions options);

  void replay();
  void append_event(std::string_view op, const DocumentRecord& record);
  const DocumentRecord& live_record(DocumentId id) const;
  std::filesystem::path blob_path(DocumentId id) const;

  std::filesystem::path data_dir_;
  Clock clock_;
  std::unique_ptr<LogWriter> log_;
  mutable std::shared_mutex mu_;
  std::map<DocumentId, DocumentRecord> records_;
  std::map<std::pair<Category, std::string>, DocumentId> live_numbers_;
  DocumentId next_id_ = 1;
  FuzzyIndex index_;
};

}  // namespace arsip
