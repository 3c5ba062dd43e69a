#include "arsip/record_json.hpp"

#include "arsip/error.hpp"

namespace arsip {

nlohmann::json to_log_json(const DocumentRecord& r) {
  return {
      {"id", r.id},
      {"perihal", r.perihal},
      {"no_surat", r.no_surat},
      {"deskripsi", r.deskripsi},
      {"kategori", label(r.kategori)},
      {"file_name", r.file_name},
      {"file_ref", r.file_ref},
      {"content_type", r.content_type},
      {"file_size", r.file_size},
      {"uploaded_by", r.uploaded_by},
      {"uploaded_at_ms", r.uploaded_at.time_since_epoch().count()},
      {"deleted", r.deleted},
  };
}

DocumentRecord from_log_json(const nlohmann::json& j) {
  DocumentRecord r;
  r.id = j.at("id").get<DocumentId>();
  r.perihal = j.at("perihal").get<std::string>();
  r.no_surat = j.at("no_surat").get<std::string>();
  r.deskripsi = j.at("deskripsi").get<std::string>();
  const auto kategori = parse_category(j.at("kategori").get<std::string>());
  if (!kategori) throw Error(ErrorCode::kCorruptLog, "unknown kategori in record");
  r.kategori = *kategori;
  r.file_name = j.at("file_name").get<std::string>();
  r.file_ref = j.at("file_ref").get<std::string>();
  r.content_type = j.at("content_type").get<std::string>();
  r.file_size = j.at("file_size").get<std::uint64_t>();
  r.uploaded_by = j.at("uploaded_by").get<UserId>();
  r.uploaded_at = Timestamp{std::chrono::milliseconds{j.at("uploaded_at_ms").get<std::int64_t>()}};
  r.deleted = j.at("deleted").get<bool>();
  return r;
}

nlohmann::json to_api_json(const DocumentRecord& r) {
  return {
      {"id", r.id},
      {"perihal", r.perihal},
      {"no_surat", r.no_surat},
      {"deskripsi", r.deskripsi},
      {"kategori", label(r.kategori)},
      {"file_name", r.file_name},
      {"content_type", r.content_type},
      {"file_size", r.file_size},
      {"uploaded_by", r.uploaded_by},
      {"uploaded_at", format_timestamp(r.uploaded_at)},
  };
}

}  // namespace arsip
