#pragma once

// JSON (de)serialization for the core domain types. Field names here are the
// wire names used by the gateway API, the event log, and the line-record
// file formats.

#include "revguard/core/types.h"

#include <json.hpp>

namespace revguard {

void to_json(nlohmann::json& j, const CommentRecord& c);
void from_json(const nlohmann::json& j, CommentRecord& c);

void to_json(nlohmann::json& j, const Verdict& v);
void from_json(const nlohmann::json& j, Verdict& v);

void to_json(nlohmann::json& j, const CategoryAssignment& a);
void from_json(const nlohmann::json& j, CategoryAssignment& a);

void to_json(nlohmann::json& j, const RewriteResult& r);
void from_json(const nlohmann::json& j, RewriteResult& r);

void to_json(nlohmann::json& j, const PipelineOutcome& o);
void from_json(const nlohmann::json& j, PipelineOutcome& o);

// Removes latency_ms / stage_timings (recursively) so two outcomes can be
// compared byte-for-byte.
nlohmann::json strip_timing_fields(nlohmann::json j);

}  // namespace revguard
