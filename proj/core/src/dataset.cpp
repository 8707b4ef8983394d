#include "tkml/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <string>

#include <json.hpp>

#include "tkml/errors.hpp"

namespace tkml {

Dataset::Dataset(int num_labels, int input_dim, std::uint64_t seed)
    : num_labels_(num_labels), input_dim_(input_dim), seed_(seed) {
  if (num_labels < 2) throw ParameterError("a dataset needs at least two labels");
  if (input_dim < 1) throw ParameterError("input dimension must be positive");
}

void Dataset::add(Instance instance) {
  if (instance.x.size() != input_dim_) {
    throw ShapeError("instance has dimension " + std::to_string(instance.x.size()) +
                     ", dataset expects " + std::to_string(input_dim_));
  }
  if (instance.truth.num_labels() != num_labels_) {
    throw ShapeError("instance label universe does not match the dataset");
  }
  if (instance.truth.empty()) throw ParameterError("ground-truth label set is empty");
  if (!instance.x.allFinite()) throw ParameterError("instance input is not finite");
  instances_.push_back(std::move(instance));
}

Dataset Dataset::slice(std::size_t first, std::size_t count) const {
  Dataset out(num_labels_, input_dim_, seed_);
  const std::size_t end = std::min(instances_.size(), first + count);
  for (std::size_t i = first; i < end; ++i) out.instances_.push_back(instances_[i]);
  return out;
}

Normalizer::Normalizer(Vector lo, Vector hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (lo_.size() != hi_.size()) throw ShapeError("normaliser bounds differ in length");
  if (!lo_.allFinite() || !hi_.allFinite() || (hi_.array() < lo_.array()).any()) {
    throw ParameterError("normaliser bounds must be finite with lo <= hi");
  }
}

Normalizer Normalizer::fit(std::span<const Vector> rows) {
  if (rows.empty()) throw ParameterError("cannot fit a normaliser on no rows");
  Vector lo = rows.front();
  Vector hi = rows.front();
  for (const auto& r : rows) {
    if (r.size() != lo.size()) throw ShapeError("rows differ in length");
    lo = lo.cwiseMin(r);
    hi = hi.cwiseMax(r);
  }
  return Normalizer(std::move(lo), std::move(hi));
}

Vector Normalizer::apply(const Vector& x_raw) const {
  if (x_raw.size() != lo_.size()) throw ShapeError("input does not match the normaliser");
  Vector out(x_raw.size());
  for (Eigen::Index i = 0; i < x_raw.size(); ++i) {
    const double span = hi_[i] - lo_[i];
    out[i] = span > 0.0 ? std::clamp(2.0 * (x_raw[i] - lo_[i]) / span - 1.0, -1.0, 1.0) : 0.0;
  }
  return out;
}

Dataset generate_synthetic(int num_labels, int input_dim, int count, double avg_labels,
                           std::uint64_t seed, const SyntheticOptions& options) {
  if (num_labels < 4) throw ParameterError("m must be at least 4");
  if (input_dim < 2) throw ParameterError("d must be at least 2");
  if (count < 1) throw ParameterError("n must be at least 1");
  if (!(avg_labels >= 1.0 && avg_labels < num_labels)) {
    throw ParameterError("avg_labels must lie in [1, m)");
  }
  if (!(options.prototype_scale > 0.0) || !(options.noise >= 0.0) || !(options.label_skew >= 0.0)) {
    throw ParameterError("prototype scale must be positive, noise and label skew non-negative");
  }
  const int max_labels = options.max_labels == 0 ? num_labels - 1 : options.max_labels;
  if (max_labels < 1 || max_labels > num_labels - 1) {
    throw ParameterError("max_labels must lie in [1, m - 1]");
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Matrix prototypes(num_labels, input_dim);
  for (int j = 0; j < num_labels; ++j)
    for (int i = 0; i < input_dim; ++i) prototypes(j, i) = options.prototype_scale * gauss(rng);

  std::binomial_distribution<int> extra(num_labels - 1, (avg_labels - 1.0) / (num_labels - 1));
  std::vector<double> weights(static_cast<std::size_t>(num_labels));
  for (int j = 0; j < num_labels; ++j) weights[static_cast<std::size_t>(j)] = std::pow(j + 1.0, -options.label_skew);

  std::vector<Vector> raw;
  std::vector<LabelSet> truths;
  raw.reserve(static_cast<std::size_t>(count));
  truths.reserve(static_cast<std::size_t>(count));
  for (int n = 0; n < count; ++n) {
    const int labels = std::min(1 + extra(rng), max_labels);
    // Sequential weighted draws without replacement.
    std::vector<double> remaining = weights;
    std::vector<int> chosen;
    for (int t = 0; t < labels; ++t) {
      std::discrete_distribution<int> pick(remaining.begin(), remaining.end());
      const int j = pick(rng);
      chosen.push_back(j);
      remaining[static_cast<std::size_t>(j)] = 0.0;
    }
    LabelSet truth(num_labels, chosen);

    Vector x = Vector::Zero(input_dim);
    for (int j : truth.indices()) x += prototypes.row(j).transpose();
    for (int i = 0; i < input_dim; ++i) x[i] += options.noise * gauss(rng);
    raw.push_back(std::move(x));
    truths.push_back(std::move(truth));
  }

  const Normalizer norm = Normalizer::fit(raw);
  Dataset data(num_labels, input_dim, seed);
  for (std::size_t n = 0; n < raw.size(); ++n) data.add({norm.apply(raw[n]), std::move(truths[n])});
  return data;
}

void save_dataset(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  nlohmann::json header{{"m", data.num_labels()},
                        {"d", data.input_dim()},
                        {"seed", data.seed()},
                        {"n", data.size()}};
  out << header.dump() << '\n';
  for (const auto& inst : data.instances()) {
    nlohmann::json rec;
    rec["x"] = std::vector<double>(inst.x.data(), inst.x.data() + inst.x.size());
    rec["y"] = inst.truth.indices();
    out << rec.dump() << '\n';
  }
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open dataset file '" + path.string() + "'");

  std::string line;
  std::size_t lineno = 0;
  std::optional<Dataset> data;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw ParseError("invalid JSON", lineno);
    }
    try {
      if (!data) {
        const int m = rec.at("m").get<int>();
        const int d = rec.at("d").get<int>();
        const auto seed = rec.value("seed", std::uint64_t{0});
        try {
          data.emplace(m, d, seed);
        } catch (const ParameterError& e) {
          throw ParseError(std::string("bad header: ") + e.what(), lineno);
        }
        continue;
      }
      const auto xs = rec.at("x").get<std::vector<double>>();
      const auto ys = rec.at("y").get<std::vector<int>>();
      if (static_cast<int>(xs.size()) != data->input_dim()) {
        throw ParseError("x has " + std::to_string(xs.size()) + " entries, header says d = " +
                             std::to_string(data->input_dim()),
                         lineno);
      }
      for (int y : ys) {
        if (y < 0 || y >= data->num_labels()) {
          throw ParseError("label " + std::to_string(y) + " outside [0, " +
                               std::to_string(data->num_labels()) + ")",
                           lineno);
        }
      }
      if (ys.empty()) throw ParseError("empty label set", lineno);
      Vector x = Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
      if (!x.allFinite()) throw ParseError("non-finite input value", lineno);
      data->add({std::move(x), LabelSet(data->num_labels(), ys)});
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("malformed record: ") + e.what(), lineno);
    }
  }
  if (!data) throw ParseError("missing header line", lineno);
  if (data->empty()) throw ParameterError("dataset file '" + path.string() + "' has no instances");
  return std::move(*data);
}

}  // namespace tkml
