#ifndef SLDS_IO_HPP
#define SLDS_IO_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "slds/gibbs.hpp"
#include "slds/model.hpp"

namespace slds {

using Json = nlohmann::json;

// Observation CSV: header naming the components, T rows by d columns.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m,
                      const std::vector<std::string>& column_names = {});
Matrix read_matrix_csv(const std::filesystem::path& path);

// Mode labels: single column, 1-based on disk.
void write_labels_csv(const std::filesystem::path& path, const IndexVec& z);
IndexVec read_labels_csv(const std::filesystem::path& path);

// Trace serialization: JSON-lines, one record per stored iteration.
void write_trace_jsonl(const std::filesystem::path& path, int chain,
                       const std::vector<TraceRecord>& trace);
std::vector<TraceRecord> read_trace_jsonl(const std::filesystem::path& path);
Json trace_record_to_json(const TraceRecord& rec, int chain);
TraceRecord trace_record_from_json(const Json& j);

// Run configuration: schema-validated, unknown keys rejected.
struct RunConfig {
  ModelFamily family = ModelFamily::Ar;
  PriorFamily prior = PriorFamily::Mniw;
  Json raw;  // canonical parsed form, for hashing and the manifest

  std::string data_path;
  std::string context_path;
  std::string supervision_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  int chains = 1;
  int threads = 1;

  ModelConfig model;  // priors may still need data-driven filling
  double s0_fraction = -1.0;
  double r0_fraction = 0.075;
  double mniw_n0_override = -1.0;
  std::vector<std::string> preprocess_ops;
  double scale_target = 10.0;
};

RunConfig parse_run_config(const Json& j);
RunConfig load_run_config(const std::filesystem::path& path);

// Stable 64-bit FNV-1a hash of the canonical config dump.
std::uint64_t config_hash(const Json& config);

void write_manifest(const std::filesystem::path& path, const Json& config,
                    std::uint64_t seed);

// Preprocessing transforms; metadata captures enough to invert where defined.
struct PreprocessResult {
  Matrix y;
  Json metadata;
};
PreprocessResult center_and_scale(const Matrix& y, double target_range);
Matrix invert_center_and_scale(const Matrix& y, const Json& metadata);
PreprocessResult first_difference_op(const Matrix& y);
// log(y^2) with zero returns clamped at 1e-12.
PreprocessResult log_squared_returns(const Matrix& y);

}  // namespace slds

#endif  // SLDS_IO_HPP
