#include <memory>
#include <ostream>

#include <CLI11.hpp>

#include "cli/experiment.hpp"
#include "tkml/errors.hpp"

namespace tkml::cli {
namespace {

std::string dashed(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

// A string-valued flag that feeds apply_config_value.
struct Slot {
  std::string key;
  std::vector<std::string> values;
  CLI::Option* option = nullptr;
  bool is_flag = false;
  std::string flag_value;
};

class Subcommand {
 public:
  Subcommand(CLI::App& app, const std::string& name, const std::string& help)
      : app_(app.add_subcommand(name, help)) {
    app_->add_option("--config", config_path_, "Flat key = value config file; flags override it");
    value("seed", "Global seed");
    value("out", "Output path");
  }

  void value(const std::string& key, const std::string& help, bool repeatable = false) {
    auto slot = std::make_unique<Slot>();
    slot->key = key;
    slot->option = app_->add_option("--" + dashed(key), slot->values, help);
    slot->option->allow_extra_args(false);
    if (!repeatable) slot->option->expected(1);
    slots_.push_back(std::move(slot));
  }

  void flag(const std::string& name, const std::string& key, const std::string& value,
            const std::string& help) {
    auto slot = std::make_unique<Slot>();
    slot->key = key;
    slot->is_flag = true;
    slot->flag_value = value;
    slot->option = app_->add_flag("--" + name, help);
    slots_.push_back(std::move(slot));
  }

  CLI::App* app() const { return app_; }
  bool parsed() const { return app_->parsed(); }

  ExperimentConfig build() const {
    ExperimentConfig cfg;
    if (!config_path_.empty()) {
      for (const auto& [key, val] : read_config_file(config_path_)) {
        if (!given(key)) apply_config_value(cfg, key, val);
      }
    }
    for (const auto& slot : slots_) {
      if (slot->option->count() == 0) continue;
      if (slot->is_flag) {
        apply_config_value(cfg, slot->key, slot->flag_value);
      } else {
        for (const auto& v : slot->values) apply_config_value(cfg, slot->key, v);
      }
    }
    return cfg;
  }

 private:
  bool given(const std::string& key) const {
    for (const auto& slot : slots_) {
      if (slot->key == key && slot->option->count() > 0) return true;
    }
    return false;
  }

  CLI::App* app_;
  std::string config_path_;
  std::vector<std::unique_ptr<Slot>> slots_;
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Top-k multi-label adversarial perturbation experiments"};
  app.require_subcommand(1);

  Subcommand gen(app, "gen-data", "Generate a synthetic multi-label dataset (JSON lines)");
  for (const char* key : {"m", "d", "n", "avg_labels", "noise", "prototype_scale", "max_labels",
                          "label_skew"}) {
    gen.value(key, "dataset parameter");
  }

  Subcommand train(app, "train", "Train an MLP victim on the training split");
  for (const char* key : {"data", "train_fraction", "epochs", "lr", "batch_size", "hidden",
                          "activation", "k"}) {
    train.value(key, "training parameter");
  }

  Subcommand attack(app, "attack", "Attack correctly classified evaluation instances");
  for (const char* key : {"data", "model", "train_fraction", "mode", "k", "epsilon", "eta",
                          "max_iter", "strategy", "xi", "beta", "max_epochs", "universal_train",
                          "limit", "threads", "dump_z"}) {
    attack.value(key, "attack parameter");
  }
  attack.value("k_prime", "Cutoff at which success is also evaluated (repeatable)", true);
  attack.flag("no-projection", "projection", "false", "Disable the l2 projection (use beta instead)");
  attack.flag("early-exit", "early_exit", "true", "Targeted modes: stop at the first success");
  attack.flag("resume", "resume", "true", "Skip instances already present in --out");

  Subcommand report(app, "report", "Aggregate results files into Pert/ASR tables");
  report.value("json", "Also write the table as JSON to this path");
  std::vector<std::string> result_paths;
  report.app()->add_option("results", result_paths, "Results files (JSON lines)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kParameterError;
  }

  try {
    if (gen.parsed()) {
      cmd_gen_data(gen.build(), out);
    } else if (train.parsed()) {
      cmd_train(train.build(), out);
    } else if (attack.parsed()) {
      cmd_attack(attack.build(), out);
    } else if (report.parsed()) {
      ExperimentConfig cfg = report.build();
      for (const auto& p : result_paths) cfg.results.emplace_back(p);
      cmd_report(cfg, out);
    }
  } catch (const InvariantError& e) {
    err << "invariant violation: " << e.what() << '\n';
    return kInvariantViolation;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIoError;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::invalid_argument& e) {
    // ParameterError, ShapeError, InvalidInputError.
    err << "parameter error: " << e.what() << '\n';
    return kParameterError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInvariantViolation;
  }
  return kOk;
}

}  // namespace tkml::cli
