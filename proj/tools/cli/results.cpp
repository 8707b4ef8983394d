#include "cli/results.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <tuple>

#include <json.hpp>

#include "tkml/errors.hpp"
#include "tkml/evaluation.hpp"
#include "tkml/label_set.hpp"

namespace tkml::cli {
namespace {

using nlohmann::json;

json success_map(const std::map<int, bool>& m) {
  json obj = json::object();
  for (const auto& [k, v] : m) obj[std::to_string(k)] = v;
  return obj;
}

ResultsHeader parse_header(const json& j) {
  ResultsHeader h;
  h.attack = j.at("attack").get<std::string>();
  h.k = j.at("k").get<int>();
  if (!j.at("strategy").is_null()) h.strategy = j.at("strategy").get<std::string>();
  h.epsilon = j.at("epsilon").get<double>();
  h.eta = j.at("eta").get<double>();
  h.max_iter = j.at("max_iter").get<int>();
  h.beta = j.at("beta").get<double>();
  h.projection = j.at("projection").get<bool>();
  h.seed = j.at("seed").get<std::uint64_t>();
  h.k_prime = j.at("k_prime").get<std::vector<int>>();
  h.input_dim = j.at("input_dim").get<int>();
  h.num_labels = j.at("num_labels").get<int>();
  return h;
}

InstanceRecord parse_instance(const json& j) {
  InstanceRecord r;
  r.instance = j.at("instance").get<std::int64_t>();
  r.success = j.at("success").get<bool>();
  r.l2_norm = j.at("l2_norm").get<double>();
  r.input_dim = j.at("input_dim").get<int>();
  r.iterations = j.at("iterations").get<int>();
  r.truth = j.at("truth").get<std::vector<int>>();
  r.top_k = j.at("top_k").get<std::vector<int>>();
  if (j.contains("target")) r.target = j.at("target").get<std::vector<int>>();
  for (const auto& [key, value] : j.at("success_at").items()) {
    r.success_at[std::stoi(key)] = value.get<bool>();
  }
  return r;
}

UniversalRecord parse_universal(const json& j) {
  UniversalRecord u;
  u.z = j.at("z").get<std::vector<double>>();
  u.l2_norm = j.at("l2_norm").get<double>();
  u.training_uasr = j.at("training_uasr").get<double>();
  u.epochs_used = j.at("epochs_used").get<int>();
  u.reached_epoch_cap = j.at("reached_epoch_cap").get<bool>();
  u.train_instances = j.at("train_instances").get<int>();
  return u;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_json_line(const ResultsHeader& h) {
  json j;
  j["type"] = "header";
  j["attack"] = h.attack;
  j["k"] = h.k;
  j["strategy"] = h.strategy ? json(*h.strategy) : json(nullptr);
  j["epsilon"] = h.epsilon;
  j["eta"] = h.eta;
  j["max_iter"] = h.max_iter;
  j["beta"] = h.beta;
  j["projection"] = h.projection;
  j["seed"] = h.seed;
  j["k_prime"] = h.k_prime;
  j["input_dim"] = h.input_dim;
  j["num_labels"] = h.num_labels;
  return j.dump();
}

std::string to_json_line(const InstanceRecord& r) {
  json j;
  j["type"] = "instance";
  j["instance"] = r.instance;
  j["success"] = r.success;
  j["l2_norm"] = r.l2_norm;
  j["input_dim"] = r.input_dim;
  j["iterations"] = r.iterations;
  j["truth"] = r.truth;
  j["top_k"] = r.top_k;
  if (!r.target.empty()) j["target"] = r.target;
  j["success_at"] = success_map(r.success_at);
  return j.dump();
}

std::string to_json_line(const UniversalRecord& u) {
  json j;
  j["type"] = "universal";
  j["l2_norm"] = u.l2_norm;
  j["training_uasr"] = u.training_uasr;
  j["epochs_used"] = u.epochs_used;
  j["reached_epoch_cap"] = u.reached_epoch_cap;
  j["train_instances"] = u.train_instances;
  j["z"] = u.z;
  return j.dump();
}

ResultsFile read_results(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open results file '" + path.string() + "'");
  ResultsFile file;
  file.path = path;
  bool have_header = false;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) {
    return ParseError(path.string() + ":" + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error&) {
      throw fail("invalid JSON");
    }
    try {
      const std::string type = j.at("type").get<std::string>();
      if (!have_header) {
        if (type != "header") throw fail("expected a header record first");
        file.header = parse_header(j);
        have_header = true;
      } else if (type == "instance") {
        file.instances.push_back(parse_instance(j));
      } else if (type == "universal") {
        if (file.universal) throw fail("more than one universal record");
        file.universal = parse_universal(j);
      } else {
        throw fail("unknown record type '" + type + "'");
      }
    } catch (const json::exception& e) {
      throw fail(std::string("schema mismatch: ") + e.what());
    } catch (const std::invalid_argument& e) {
      throw fail(std::string("schema mismatch: ") + e.what());
    }
  }
  if (!have_header) throw ParseError(path.string() + ": missing header record");
  return file;
}

std::vector<ReportRow> aggregate(const std::vector<ResultsFile>& files) {
  using Key = std::tuple<std::string, int, std::string, int>;
  std::map<Key, std::vector<EvalRecord>> groups;
  for (const auto& file : files) {
    const auto& h = file.header;
    const std::string strategy = h.strategy.value_or("-");
    for (const auto& rec : file.instances) {
      for (const auto& [kp, ok] : rec.success_at) {
        EvalRecord e;
        e.instance_id = rec.instance;
        e.success = ok;
        e.perturbation_norm = rec.l2_norm;
        e.input_dim = rec.input_dim;
        groups[Key{h.attack, h.k, strategy, kp}].push_back(std::move(e));
      }
    }
  }
  std::vector<ReportRow> rows;
  for (const auto& [key, records] : groups) {
    ReportRow row;
    std::tie(row.attack, row.k, row.strategy, row.k_prime) = key;
    row.n = records.size();
    row.asr = asr(records);
    row.pert = pert(records);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_report_csv(const std::vector<ReportRow>& rows, std::ostream& out) {
  out << "attack,k,strategy,k_prime,n,pert,asr\n";
  for (const auto& r : rows) {
    out << r.attack << ',' << r.k << ',' << r.strategy << ',' << r.k_prime << ',' << r.n << ','
        << (r.pert ? format_double(*r.pert) : std::string()) << ',' << format_double(r.asr) << '\n';
  }
}

void write_report_json(const std::vector<ReportRow>& rows, std::ostream& out) {
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"attack", r.attack},
                   {"k", r.k},
                   {"strategy", r.strategy},
                   {"k_prime", r.k_prime},
                   {"n", r.n},
                   {"pert", r.pert ? json(*r.pert) : json(nullptr)},
                   {"asr", r.asr}});
  }
  out << arr.dump(2) << '\n';
}

}  // namespace tkml::cli
