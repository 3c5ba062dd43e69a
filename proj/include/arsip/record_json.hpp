#pragma once

#include "json.hpp"

#include "arsip/record.hpp"

namespace arsip {

/// Full record as persisted in documents.log.
nlohmann::json to_log_json(const DocumentRecord& record);

/// Throws nlohmann::json::exception or Error(kCorruptLog) on missing or
/// ill-typed fields.
DocumentRecord from_log_json(const nlohmann::json& j);

/// Client-facing view: no blob reference, ISO-8601 timestamp.
nlohmann::json to_api_json(const DocumentRecord& record);

}  // namespace arsip
