#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tkml::cli {

/// First line of a results file: the run's identity.
struct ResultsHeader {
  std::string attack;
  int k = 0;
  std::optional<std::string> strategy;
  double epsilon = 0.0;
  double eta = 0.0;
  int max_iter = 0;
  double beta = 0.0;
  bool projection = true;
  std::uint64_t seed = 0;
  std::vector<int> k_prime;
  int input_dim = 0;
  int num_labels = 0;

  friend bool operator==(const ResultsHeader&, const ResultsHeader&) = default;
};

struct InstanceRecord {
  std::int64_t instance = 0;
  bool success = false;
  double l2_norm = 0.0;
  int input_dim = 0;
  int iterations = 0;
  std::vector<int> truth;
  std::vector<int> top_k;
  std::vector<int> target;  // targeted modes only
  std::map<int, bool> success_at;
};

/// The single shared perturbation of a universal run.
struct UniversalRecord {
  std::vector<double> z;
  double l2_norm = 0.0;
  double training_uasr = 0.0;
  int epochs_used = 0;
  bool reached_epoch_cap = false;
  int train_instances = 0;
};

struct ResultsFile {
  std::filesystem::path path;
  ResultsHeader header;
  std::optional<UniversalRecord> universal;
  std::vector<InstanceRecord> instances;
};

std::string to_json_line(const ResultsHeader& header);
std::string to_json_line(const InstanceRecord& record);
std::string to_json_line(const UniversalRecord& record);

/// Throws IoError when unreadable and ParseError (naming the file and line)
/// on schema violations.
ResultsFile read_results(const std::filesystem::path& path);

/// One row of a Pert/ASR table.
struct ReportRow {
  std::string attack;
  int k = 0;
  std::string strategy;  // "-" for untargeted modes
  int k_prime = 0;
  std::size_t n = 0;
  std::optional<double> pert;
  double asr = 0.0;
};

/// Groups records by (attack, k, strategy, k') across files and computes
/// Pert and ASR per group. Rows are sorted by key.
std::vector<ReportRow> aggregate(const std::vector<ResultsFile>& files);

void write_report_csv(const std::vector<ReportRow>& rows, std::ostream& out);
void write_report_json(const std::vector<ReportRow>& rows, std::ostream& out);

}  // namespace tkml::cli
