#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tkml/attacks.hpp"
#include "tkml/dataset.hpp"
#include "tkml/evaluation.hpp"
#include "tkml/predictor.hpp"

namespace tkml::cli {

enum ExitCode : int {
  kOk = 0,
  kParameterError = 1,
  kIoError = 2,
  kInvariantViolation = 3,
};

/// An attack produced a state that breaks a guaranteed property (budget,
/// box feasibility, lambda range).
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class AttackMode { kUntargeted, kUniversal, kTargeted, kMlap };

std::string mode_name(AttackMode mode);
AttackMode mode_from_name(const std::string& name);

/// Every knob of a run. Populated from defaults, then a config file, then
/// command-line flags (flags win).
struct ExperimentConfig {
  // dataset
  int num_labels = 10;
  int input_dim = 20;
  int num_instances = 2000;
  double avg_labels = 1.5;
  double noise = 1.5;
  double prototype_scale = 1.0;
  int max_labels = 0;  // 0 means m - 1
  double label_skew = 0.0;
  double train_fraction = 0.5;

  // victim
  int epochs = 30;
  double learning_rate = 0.05;
  int batch_size = 32;
  std::vector<int> hidden{64};
  std::string activation = "tanh";

  // attack
  AttackMode mode = AttackMode::kUntargeted;
  int k = 3;
  std::vector<int> k_prime;  // empty: {k}
  std::optional<double> epsilon;  // unset: per-mode default
  double eta = 0.01;
  int max_iter = 1000;
  double beta = 0.0;
  bool projection = true;
  double xi = 0.7;
  int max_epochs = 20;
  int universal_train = 200;
  TargetStrategy strategy = TargetStrategy::kBest;
  bool early_exit = false;
  int limit = 0;  // 0: every eligible instance
  int threads = 1;
  bool resume = false;

  // paths
  std::filesystem::path data;
  std::filesystem::path model;
  std::filesystem::path out;
  std::filesystem::path dump_z;
  std::filesystem::path json_out;
  std::vector<std::filesystem::path> results;

  std::uint64_t seed = 0;

  double resolved_epsilon() const;
  std::vector<int> resolved_k_prime() const;
  AttackConfig attack_config() const;
  TrainConfig train_config() const;
  SyntheticOptions synthetic_options() const;

  /// Throws ParameterError naming the offending field.
  void validate() const;
};

/// Keys accepted in a config file, in documentation order.
const std::vector<std::string>& config_keys();

/// Sets one field from its textual value. Keys use underscores or dashes.
/// Throws ParameterError on an unknown key or unparsable value.
void apply_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Flat `key = value` lines; '#' starts a comment.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

/// Deterministic per-instance seed derived from the global seed.
std::uint64_t instance_seed(std::uint64_t global_seed, std::int64_t instance_id);

/// Splits a dataset file into its training and evaluation parts.
struct Split {
  Dataset train;
  Dataset test;
  std::size_t test_offset;
};
Split split_dataset(const Dataset& data, double train_fraction);

void cmd_gen_data(const ExperimentConfig& cfg, std::ostream& log);
void cmd_train(const ExperimentConfig& cfg, std::ostream& log);
void cmd_attack(const ExperimentConfig& cfg, std::ostream& log);
void cmd_report(const ExperimentConfig& cfg, std::ostream& out);

/// Parses argv and dispatches to a subcommand. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tkml::cli
