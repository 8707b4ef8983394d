#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "tkml/errors.hpp"
#include "tkml/predictor.hpp"

namespace tkml {
namespace {

using nlohmann::json;

constexpr const char* kFormat = "tkml-mlp";
constexpr int kVersion = 1;

}  // namespace

std::string model_to_json(const MlpModel& model) {
  json doc;
  doc["format"] = kFormat;
  doc["version"] = kVersion;
  doc["input_dim"] = model.input_dim();
  doc["num_labels"] = model.num_labels();
  doc["activation"] = std::string(activation_name(model.hidden_activation()));
  json layers = json::array();
  for (const auto& layer : model.layers()) {
    json weights = json::array();
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) weights.push_back(layer.weights(r, c));
    json bias = json::array();
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) bias.push_back(layer.bias[r]);
    layers.push_back({{"rows", layer.weights.rows()},
                      {"cols", layer.weights.cols()},
                      {"weights", std::move(weights)},
                      {"bias", std::move(bias)}});
  }
  doc["layers"] = std::move(layers);
  return doc.dump();
}

MlpModel model_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (doc.at("format").get<std::string>() != kFormat) {
      throw ParseError("unexpected model format '" + doc.at("format").get<std::string>() + "'");
    }
    const Activation act = activation_from_name(doc.at("activation").get<std::string>());
    std::vector<DenseLayer> layers;
    for (const auto& entry : doc.at("layers")) {
      const auto rows = entry.at("rows").get<Eigen::Index>();
      const auto cols = entry.at("cols").get<Eigen::Index>();
      const auto& w = entry.at("weights");
      const auto& b = entry.at("bias");
      if (rows < 1 || cols < 1 || w.size() != static_cast<std::size_t>(rows * cols) ||
          b.size() != static_cast<std::size_t>(rows)) {
        throw ParseError("layer weight/bias arrays do not match the declared shape");
      }
      DenseLayer layer{Matrix(rows, cols), Vector(rows)};
      std::size_t idx = 0;
      for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) layer.weights(r, c) = w[idx++].get<double>();
      for (Eigen::Index r = 0; r < rows; ++r) layer.bias[r] = b[static_cast<std::size_t>(r)].get<double>();
      layers.push_back(std::move(layer));
    }
    MlpModel model(std::move(layers), act);
    if (model.input_dim() != doc.at("input_dim").get<int>() ||
        model.num_labels() != doc.at("num_labels").get<int>()) {
      throw ParseError("declared model shape does not match its layers");
    }
    return model;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed model document: ") + e.what());
  } catch (const ShapeError& e) {
    throw ParseError(std::string("inconsistent model layers: ") + e.what());
  }
}

void save_model(const MlpModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << model_to_json(model) << '\n';
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

MlpModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace tkml
