#include "cli/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <mutex>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "cli/results.hpp"
#include "tkml/errors.hpp"

namespace tkml::cli {
namespace {

std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '-', '_');
  return key;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

int parse_int(const std::string& key, const std::string& value) {
  int out = 0;
  const std::string v = trim(value);
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
    throw ParameterError("invalid integer '" + value + "' for " + key);
  }
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const std::string v = trim(value);
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty()) {
    throw ParameterError("invalid unsigned integer '" + value + "' for " + key);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ParameterError("invalid number '" + value + "' for " + key);
  }
  if (used != v.size() || !std::isfinite(out)) {
    throw ParameterError("invalid number '" + value + "' for " + key);
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ParameterError("invalid boolean '" + value + "' for " + key);
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!trim(item).empty()) out.push_back(parse_int(key, item));
  }
  if (out.empty()) throw ParameterError("empty list for " + key);
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"m", [](auto& c, auto& k, auto& v) { c.num_labels = parse_int(k, v); }},
      {"d", [](auto& c, auto& k, auto& v) { c.input_dim = parse_int(k, v); }},
      {"n", [](auto& c, auto& k, auto& v) { c.num_instances = parse_int(k, v); }},
      {"avg_labels", [](auto& c, auto& k, auto& v) { c.avg_labels = parse_double(k, v); }},
      {"noise", [](auto& c, auto& k, auto& v) { c.noise = parse_double(k, v); }},
      {"prototype_scale", [](auto& c, auto& k, auto& v) { c.prototype_scale = parse_double(k, v); }},
      {"max_labels", [](auto& c, auto& k, auto& v) { c.max_labels = parse_int(k, v); }},
      {"label_skew", [](auto& c, auto& k, auto& v) { c.label_skew = parse_double(k, v); }},
      {"train_fraction", [](auto& c, auto& k, auto& v) { c.train_fraction = parse_double(k, v); }},
      {"epochs", [](auto& c, auto& k, auto& v) { c.epochs = parse_int(k, v); }},
      {"lr", [](auto& c, auto& k, auto& v) { c.learning_rate = parse_double(k, v); }},
      {"batch_size", [](auto& c, auto& k, auto& v) { c.batch_size = parse_int(k, v); }},
      {"hidden", [](auto& c, auto& k, auto& v) { c.hidden = parse_int_list(k, v); }},
      {"activation", [](auto& c, auto&, auto& v) {
         activation_from_name(trim(v));
         c.activation = trim(v);
       }},
      {"mode", [](auto& c, auto&, auto& v) { c.mode = mode_from_name(trim(v)); }},
      {"k", [](auto& c, auto& k, auto& v) { c.k = parse_int(k, v); }},
      {"k_prime", [](auto& c, auto& k, auto& v) {
         for (int kp : parse_int_list(k, v)) c.k_prime.push_back(kp);
       }},
      {"epsilon", [](auto& c, auto& k, auto& v) { c.epsilon = parse_double(k, v); }},
      {"eta", [](auto& c, auto& k, auto& v) { c.eta = parse_double(k, v); }},
      {"max_iter", [](auto& c, auto& k, auto& v) { c.max_iter = parse_int(k, v); }},
      {"beta", [](auto& c, auto& k, auto& v) { c.beta = parse_double(k, v); }},
      {"projection", [](auto& c, auto& k, auto& v) { c.projection = parse_bool(k, v); }},
      {"xi", [](auto& c, auto& k, auto& v) { c.xi = parse_double(k, v); }},
      {"max_epochs", [](auto& c, auto& k, auto& v) { c.max_epochs = parse_int(k, v); }},
      {"universal_train", [](auto& c, auto& k, auto& v) { c.universal_train = parse_int(k, v); }},
      {"strategy", [](auto& c, auto&, auto& v) { c.strategy = strategy_from_name(trim(v)); }},
      {"early_exit", [](auto& c, auto& k, auto& v) { c.early_exit = parse_bool(k, v); }},
      {"limit", [](auto& c, auto& k, auto& v) { c.limit = parse_int(k, v); }},
      {"threads", [](auto& c, auto& k, auto& v) { c.threads = parse_int(k, v); }},
      {"resume", [](auto& c, auto& k, auto& v) { c.resume = parse_bool(k, v); }},
      {"data", [](auto& c, auto&, auto& v) { c.data = trim(v); }},
      {"model", [](auto& c, auto&, auto& v) { c.model = trim(v); }},
      {"out", [](auto& c, auto&, auto& v) { c.out = trim(v); }},
      {"dump_z", [](auto& c, auto&, auto& v) { c.dump_z = trim(v); }},
      {"json", [](auto& c, auto&, auto& v) { c.json_out = trim(v); }},
      {"seed", [](auto& c, auto& k, auto& v) { c.seed = parse_u64(k, v); }},
  };
  return table;
}

bool is_targeted(AttackMode mode) {
  return mode == AttackMode::kTargeted || mode == AttackMode::kMlap;
}

std::vector<int> to_vector(const LabelSet& s) { return s.indices(); }

// Runs `work(i)` for i in [0, count) on up to `threads` workers and returns
// the results in index order. The first exception is rethrown.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t count, int threads, Fn&& work) {
  std::vector<std::optional<T>> slots(count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        slots[i] = work(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<T> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

struct Outcome {
  InstanceRecord record;
  Vector z;
};

void check_invariants(const AttackConfig& acfg, const Vector& x, const AttackResult& r,
                      std::int64_t id) {
  const Vector adv = x + r.perturbation.z;
  if (acfg.projection && r.perturbation.l2_norm > acfg.epsilon + 1e-9) {
    throw InvariantError("instance " + std::to_string(id) + ": perturbation exceeds epsilon");
  }
  if ((adv.array() < acfg.clip_low - 1e-12).any() || (adv.array() > acfg.clip_high + 1e-12).any()) {
    throw InvariantError("instance " + std::to_string(id) + ": adversarial input leaves the box");
  }
  if (!(r.final_lambda >= 0.0 && r.final_lambda <= 1.0)) {
    throw InvariantError("instance " + std::to_string(id) + ": lambda left [0, 1]");
  }
}

void write_z_row(std::ostream& out, const std::string& id, const Vector& z) {
  out << id;
  char buf[40];
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    std::snprintf(buf, sizeof buf, ",%.17g", z[i]);
    out << buf;
  }
  out << '\n';
}

std::set<std::int64_t> completed_instances(const std::filesystem::path& path,
                                           const ResultsHeader& expected) {
  const ResultsFile existing = read_results(path);
  if (!(existing.header == expected)) {
    throw ParameterError("cannot resume '" + path.string() +
                         "': its header does not match the current configuration");
  }
  std::set<std::int64_t> done;
  for (const auto& r : existing.instances) done.insert(r.instance);
  return done;
}

}  // namespace

std::string mode_name(AttackMode mode) {
  switch (mode) {
    case AttackMode::kUntargeted:
      return "untargeted";
    case AttackMode::kUniversal:
      return "universal";
    case AttackMode::kTargeted:
      return "targeted";
    case AttackMode::kMlap:
      return "mlap";
  }
  return "untargeted";
}

AttackMode mode_from_name(const std::string& name) {
  if (name == "untargeted") return AttackMode::kUntargeted;
  if (name == "universal") return AttackMode::kUniversal;
  if (name == "targeted") return AttackMode::kTargeted;
  if (name == "mlap") return AttackMode::kMlap;
  throw ParameterError("unknown mode '" + name + "' (untargeted|universal|targeted|mlap)");
}

double ExperimentConfig::resolved_epsilon() const {
  if (epsilon) return *epsilon;
  switch (mode) {
    case AttackMode::kUniversal:
      return AttackConfig::universal_defaults().epsilon;
    case AttackMode::kTargeted:
    case AttackMode::kMlap:
      return AttackConfig::targeted_defaults().epsilon;
    case AttackMode::kUntargeted:
      break;
  }
  return AttackConfig::untargeted_defaults().epsilon;
}

std::vector<int> ExperimentConfig::resolved_k_prime() const {
  if (k_prime.empty()) return {k};
  std::vector<int> out = k_prime;
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

AttackConfig ExperimentConfig::attack_config() const {
  AttackConfig a;
  a.k = k;
  a.eta = eta;
  a.max_iter = max_iter;
  a.beta = beta;
  a.epsilon = resolved_epsilon();
  a.projection = projection;
  a.seed = seed;
  a.early_exit = early_exit;
  return a;
}

TrainConfig ExperimentConfig::train_config() const {
  TrainConfig t;
  t.epochs = epochs;
  t.learning_rate = learning_rate;
  t.batch_size = batch_size;
  t.seed = seed;
  t.hidden_widths = hidden;
  t.activation = activation_from_name(activation);
  return t;
}

SyntheticOptions ExperimentConfig::synthetic_options() const {
  SyntheticOptions o;
  o.noise = noise;
  o.prototype_scale = prototype_scale;
  o.max_labels = max_labels;
  o.label_skew = label_skew;
  return o;
}

void ExperimentConfig::validate() const {
  if (num_labels < 4) throw ParameterError("m must be at least 4");
  if (input_dim < 2) throw ParameterError("d must be at least 2");
  if (num_instances < 1) throw ParameterError("n must be at least 1");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ParameterError("train_fraction must lie in (0, 1)");
  }
  if (k < 1 || k >= num_labels) throw ParameterError("k must satisfy 1 <= k < m");
  for (int kp : k_prime) {
    if (kp < 1 || kp >= num_labels) throw ParameterError("k_prime entries must satisfy 1 <= k' < m");
  }
  if (threads < 1) throw ParameterError("threads must be at least 1");
  if (limit < 0) throw ParameterError("limit must be non-negative");
  if (universal_train < 1) throw ParameterError("universal_train must be at least 1");
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& [name, setter] : setters()) out.push_back(name);
    return out;
  }();
  return keys;
}

void apply_config_value(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  const std::string name = normalize_key(key);
  for (const auto& [k, setter] : setters()) {
    if (k == name) {
      setter(cfg, name, value);
      return;
    }
  }
  throw ParameterError("unknown config key '" + key + "'");
}

std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(path.string() + ": expected key = value", lineno);
    }
    out[normalize_key(trim(line.substr(0, eq)))] = trim(line.substr(eq + 1));
  }
  return out;
}

std::uint64_t instance_seed(std::uint64_t global_seed, std::int64_t instance_id) {
  // splitmix64 over the pair.
  std::uint64_t z = global_seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(instance_id) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Split split_dataset(const Dataset& data, double train_fraction) {
  const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(data.size())));
  if (n_train == 0 || n_train >= data.size()) {
    throw ParameterError("train_fraction leaves an empty training or evaluation split");
  }
  return Split{data.slice(0, n_train), data.slice(n_train, data.size()), n_train};
}

void cmd_gen_data(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.validate();
  if (cfg.out.empty()) throw ParameterError("--out is required");
  const Dataset data = generate_synthetic(cfg.num_labels, cfg.input_dim, cfg.num_instances,
                                          cfg.avg_labels, cfg.seed, cfg.synthetic_options());
  save_dataset(data, cfg.out);
  log << "wrote " << data.size() << " instances (m=" << data.num_labels()
      << ", d=" << data.input_dim() << ") to " << cfg.out.string() << '\n';
}

void cmd_train(const ExperimentConfig& cfg, std::ostream& log) {
  if (cfg.data.empty()) throw ParameterError("--data is required");
  if (cfg.out.empty()) throw ParameterError("--out is required");
  const Dataset data = load_dataset(cfg.data);
  if (cfg.k < 1 || cfg.k >= data.num_labels()) throw ParameterError("k must satisfy 1 <= k < m");
  const Split split = split_dataset(data, cfg.train_fraction);
  const MlpModel model = train_victim(split.train, cfg.train_config());
  save_model(model, cfg.out);
  char buf[160];
  std::snprintf(buf, sizeof buf, "subset accuracy (k=%d): train %.4f, test %.4f\n", cfg.k,
                subset_accuracy(model, split.train, cfg.k), subset_accuracy(model, split.test, cfg.k));
  log << buf;
}

void cmd_attack(const ExperimentConfig& cfg, std::ostream& log) {
  if (cfg.data.empty() || cfg.model.empty()) throw ParameterError("--data and --model are required");
  if (cfg.out.empty()) throw ParameterError("--out is required");
  const Dataset data = load_dataset(cfg.data);
  const MlpModel model = load_model(cfg.model);
  if (model.input_dim() != data.input_dim() || model.num_labels() != data.num_labels()) {
    throw ParameterError("model shape does not match the dataset");
  }
  const int m = data.num_labels();
  const AttackConfig acfg = cfg.attack_config();
  acfg.validate(m);
  if (cfg.threads < 1) throw ParameterError("threads must be at least 1");
  const std::vector<int> k_primes = cfg.resolved_k_prime();
  for (int kp : k_primes) {
    if (kp < 1 || kp >= m) throw ParameterError("k_prime entries must satisfy 1 <= k' < m");
  }
  if (is_targeted(cfg.mode) && (k_primes.size() != 1 || k_primes.front() != cfg.k)) {
    throw ParameterError("k_prime only applies to untargeted and universal modes");
  }

  const Split split = split_dataset(data, cfg.train_fraction);

  ResultsHeader header;
  header.attack = mode_name(cfg.mode);
  header.k = cfg.k;
  if (is_targeted(cfg.mode)) header.strategy = std::string(strategy_name(cfg.strategy));
  header.epsilon = acfg.epsilon;
  header.eta = acfg.eta;
  header.max_iter = acfg.max_iter;
  header.beta = acfg.beta;
  header.projection = acfg.projection;
  header.seed = cfg.seed;
  header.k_prime = k_primes;
  header.input_dim = data.input_dim();
  header.num_labels = m;

  // Protocol: only instances the victim gets right at z = 0.
  std::vector<std::int64_t> eligible;
  std::size_t skipped_targets = 0;
  for (std::size_t i = 0; i < split.test.size(); ++i) {
    const auto& inst = split.test[i];
    if (consistency_at(inst.truth, model.predict(inst.x), cfg.k) != 1) continue;
    if (is_targeted(cfg.mode) && m - inst.truth.size() < cfg.k) {
      ++skipped_targets;
      continue;
    }
    eligible.push_back(static_cast<std::int64_t>(split.test_offset + i));
    if (cfg.limit > 0 && static_cast<int>(eligible.size()) >= cfg.limit) break;
  }
  auto instance_at = [&](std::int64_t id) -> const Instance& {
    return data[static_cast<std::size_t>(id)];
  };

  if (cfg.mode == AttackMode::kUniversal) {
    Dataset fit_set(m, data.input_dim(), data.seed());
    for (const auto& inst : split.train.instances()) {
      if (static_cast<int>(fit_set.size()) >= cfg.universal_train) break;
      if (consistency_at(inst.truth, model.predict(inst.x), cfg.k) == 1) fit_set.add(inst);
    }
    if (fit_set.empty()) throw ParameterError("no correctly classified training instances");
    const UniversalResult uni = attack_universal(model, fit_set, acfg, cfg.xi, cfg.max_epochs);
    if (uni.z.l2_norm > acfg.epsilon + 1e-9) throw InvariantError("universal z exceeds epsilon");

    std::ofstream out(cfg.out, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + cfg.out.string() + "' for writing");
    out << to_json_line(header) << '\n';
    UniversalRecord ur;
    ur.z.assign(uni.z.z.data(), uni.z.z.data() + uni.z.z.size());
    ur.l2_norm = uni.z.l2_norm;
    ur.training_uasr = uni.training_uasr;
    ur.epochs_used = uni.epochs_used;
    ur.reached_epoch_cap = uni.reached_epoch_cap;
    ur.train_instances = static_cast<int>(fit_set.size());
    out << to_json_line(ur) << '\n';

    std::size_t fooled = 0;
    for (std::int64_t id : eligible) {
      const Instance& inst = instance_at(id);
      const ScoreVector scores =
          model.predict(clip_to_box(inst.x + uni.z.z, acfg.clip_low, acfg.clip_high));
      InstanceRecord rec;
      rec.instance = id;
      rec.l2_norm = uni.z.l2_norm;
      rec.input_dim = data.input_dim();
      rec.iterations = uni.epochs_used;
      rec.truth = to_vector(inst.truth);
      rec.top_k = to_vector(top_k_set(scores, cfg.k));
      for (int kp : k_primes) rec.success_at[kp] = consistency_at(inst.truth, scores, kp) == 0;
      rec.success = consistency_at(inst.truth, scores, cfg.k) == 0;
      fooled += rec.success ? 1 : 0;
      out << to_json_line(rec) << '\n';
    }
    if (!cfg.dump_z.empty()) {
      std::ofstream zs(cfg.dump_z, std::ios::binary | std::ios::trunc);
      if (!zs) throw IoError("cannot open '" + cfg.dump_z.string() + "' for writing");
      write_z_row(zs, "universal", uni.z.z);
    }
    if (!out) throw IoError("failed writing '" + cfg.out.string() + "'");
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "universal: training UASR %.4f after %d epoch(s)%s, |z| = %.4f, held-out UASR %.4f "
                  "over %zu instances\n",
                  uni.training_uasr, uni.epochs_used, uni.reached_epoch_cap ? " (epoch cap)" : "",
                  uni.z.l2_norm, eligible.empty() ? 0.0 : static_cast<double>(fooled) / eligible.size(),
                  eligible.size());
    log << buf;
    return;
  }

  std::set<std::int64_t> done;
  const bool resuming = cfg.resume && std::filesystem::exists(cfg.out);
  if (resuming) done = completed_instances(cfg.out, header);
  std::vector<std::int64_t> pending;
  for (std::int64_t id : eligible) {
    if (!done.count(id)) pending.push_back(id);
  }

  std::ofstream out(cfg.out, std::ios::binary | (resuming ? std::ios::app : std::ios::trunc));
  if (!out) throw IoError("cannot open '" + cfg.out.string() + "' for writing");
  if (!resuming) out << to_json_line(header) << '\n';
  std::ofstream zs;
  if (!cfg.dump_z.empty()) {
    zs.open(cfg.dump_z, std::ios::binary | (resuming ? std::ios::app : std::ios::trunc));
    if (!zs) throw IoError("cannot open '" + cfg.dump_z.string() + "' for writing");
  }

  auto attack_one = [&](std::size_t idx) -> Outcome {
    const std::int64_t id = pending[idx];
    const Instance& inst = instance_at(id);
    AttackResult result;
    std::vector<int> target_labels;
    if (cfg.mode == AttackMode::kUntargeted) {
      result = attack_untargeted(model, inst.x, inst.truth, acfg);
    } else {
      const TargetSet target = select_targets(model.predict(inst.x), inst.truth, cfg.k,
                                              cfg.strategy, instance_seed(cfg.seed, id));
      target_labels = target.labels().indices();
      result = cfg.mode == AttackMode::kTargeted ? attack_targeted(model, inst.x, target, acfg)
                                                 : attack_mlap(model, inst.x, target, acfg);
      if (result.success && top_k_set(result.final_scores, cfg.k) != target.labels()) {
        throw InvariantError("instance " + std::to_string(id) + ": success without hitting the target");
      }
    }
    check_invariants(acfg, inst.x, result, id);

    Outcome o;
    InstanceRecord& rec = o.record;
    rec.instance = id;
    rec.success = result.success;
    rec.l2_norm = result.perturbation.l2_norm;
    rec.input_dim = data.input_dim();
    rec.iterations = result.iterations_used;
    rec.truth = to_vector(inst.truth);
    rec.top_k = to_vector(top_k_set(result.final_scores, cfg.k));
    rec.target = std::move(target_labels);
    if (is_targeted(cfg.mode)) {
      rec.success_at[cfg.k] = result.success;
    } else {
      for (int kp : k_primes) {
        rec.success_at[kp] = consistency_at(inst.truth, result.final_scores, kp) == 0;
      }
    }
    o.z = std::move(result.perturbation.z);
    return o;
  };

  // Chunks keep the file append-only and ordered while workers run ahead.
  const std::size_t chunk = static_cast<std::size_t>(std::max(32, 8 * cfg.threads));
  std::size_t successes = 0;
  for (std::size_t start = 0; start < pending.size(); start += chunk) {
    const std::size_t count = std::min(chunk, pending.size() - start);
    const auto outcomes = parallel_map<Outcome>(count, cfg.threads,
                                                [&](std::size_t i) { return attack_one(start + i); });
    for (const auto& o : outcomes) {
      out << to_json_line(o.record) << '\n';
      if (zs.is_open()) write_z_row(zs, std::to_string(o.record.instance), o.z);
      successes += o.record.success ? 1 : 0;
    }
    out.flush();
    if (!out) throw IoError("failed writing '" + cfg.out.string() + "'");
  }

  char buf[200];
  std::snprintf(buf, sizeof buf, "%s: %zu/%zu successful (%zu already present)",
                header.attack.c_str(), successes, pending.size(), done.size());
  log << buf;
  if (skipped_targets > 0) log << ", " << skipped_targets << " skipped (too few non-true labels)";
  log << '\n';
}

void cmd_report(const ExperimentConfig& cfg, std::ostream& out) {
  if (cfg.results.empty()) throw ParameterError("report needs at least one results file");
  std::vector<ResultsFile> files;
  for (const auto& path : cfg.results) files.push_back(read_results(path));
  const std::vector<ReportRow> rows = aggregate(files);
  if (cfg.out.empty()) {
    write_report_csv(rows, out);
  } else {
    std::ofstream csv(cfg.out, std::ios::binary | std::ios::trunc);
    if (!csv) throw IoError("cannot open '" + cfg.out.string() + "' for writing");
    write_report_csv(rows, csv);
  }
  if (!cfg.json_out.empty()) {
    std::ofstream js(cfg.json_out, std::ios::binary | std::ios::trunc);
    if (!js) throw IoError("cannot open '" + cfg.json_out.string() + "' for writing");
    write_report_json(rows, js);
  }
}

}  // namespace tkml::cli
