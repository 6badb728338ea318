#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "minklab/asymptotics.hpp"
#include "minklab/solver.hpp"

namespace minklab {

using json = nlohmann::json;

// document <-> struct conversions; every document carries "schema" and "dim"
json grid_spec_to_json(const GridSpec& spec);
GridSpec grid_spec_from_json(const json& j);

json measure_to_json(const DiscreteMeasure& mu);
DiscreteMeasure measure_from_json(const json& j);

json star_body_to_json(const StarBody& body);
StarBody star_body_from_json(const json& j);

json polytope_to_json(const SupportPolytope& k);
SupportPolytope polytope_from_json(const json& j);

json config_to_json(const SolveConfig& config);
SolveConfig config_from_json(const json& j);

json precondition_report_to_json(const PreconditionReport& report);
json solve_report_to_json(const SolveReport& report);

std::string trace_to_csv(const std::vector<TracePoint>& trace);
std::string sweep_to_csv(const SweepReport& report);

/// Canonical text form: compact dump with sorted keys (the object storage is
/// ordered), suitable for hashing.
std::string canonical_dump(const json& j);

/// FNV-1a digest of the canonical dump, as a 16-char hex string.
std::string document_digest(const json& j);

std::string grid_kind_name(GridKind kind);
GridKind grid_kind_from_name(const std::string& name);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);
json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

} // namespace minklab
