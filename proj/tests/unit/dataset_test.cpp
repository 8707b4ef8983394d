#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "tkml/dataset.hpp"
#include "tkml/errors.hpp"

namespace tkml {
namespace {

namespace fs = std::filesystem;

class TempFile {
 public:
  explicit TempFile(const std::string& name) : path_(fs::temp_directory_path() / name) {}
  ~TempFile() { fs::remove(path_); }
  const fs::path& path() const { return path_; }
  void write(const std::string& text) const {
    std::ofstream out(path_, std::ios::binary);
    out << text;
  }

 private:
  fs::path path_;
};

int parse_error_line(const fs::path& path) {
  try {
    load_dataset(path);
  } catch (const ParseError& e) {
    return e.line();
  }
  return -1;
}

TEST(Synthetic, DegenerateSingleInstance) {
  const Dataset ds = generate_synthetic(4, 2, 1, 1.0, 3);
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds[0].truth.size(), 1);
}

TEST(Synthetic, AverageLabelCountMatchesTarget) {
  const Dataset ds = generate_synthetic(20, 16, 5000, 1.43, 11);
  double total = 0.0;
  for (const auto& inst : ds.instances()) total += inst.truth.size();
  EXPECT_NEAR(total / 5000.0, 1.43, 0.1);
}

TEST(Synthetic, InvariantsHold) {
  SyntheticOptions opts;
  opts.max_labels = 4;
  opts.label_skew = 1.5;
  const Dataset ds = generate_synthetic(10, 8, 500, 2.0, 4, opts);
  EXPECT_EQ(ds.num_labels(), 10);
  EXPECT_EQ(ds.input_dim(), 8);
  for (const auto& inst : ds.instances()) {
    ASSERT_EQ(inst.x.size(), 8);
    ASSERT_GE(inst.truth.size(), 1);
    ASSERT_LE(inst.truth.size(), 4);
    ASSERT_LE(inst.x.maxCoeff(), 1.0);
    ASSERT_GE(inst.x.minCoeff(), -1.0);
  }
}

TEST(Synthetic, SkewFavoursLowIndices) {
  SyntheticOptions opts;
  opts.label_skew = 2.0;
  const Dataset ds = generate_synthetic(8, 4, 2000, 1.5, 4, opts);
  std::vector<int> counts(8, 0);
  for (const auto& inst : ds.instances()) {
    for (int j : inst.truth.indices()) ++counts[static_cast<std::size_t>(j)];
  }
  EXPECT_GT(counts[0], counts[3]);
  EXPECT_GT(counts[3], counts[7]);
}

TEST(Synthetic, DeterministicPerSeed) {
  const Dataset a = generate_synthetic(6, 5, 50, 1.5, 9);
  const Dataset b = generate_synthetic(6, 5, 50, 1.5, 9);
  const Dataset c = generate_synthetic(6, 5, 50, 1.5, 10);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ASSERT_EQ(a[i].x, b[i].x);
    ASSERT_EQ(a[i].truth, b[i].truth);
    differs = differs || a[i].x != c[i].x;
  }
  EXPECT_TRUE(differs);
}

TEST(Synthetic, ParameterValidation) {
  EXPECT_THROW(generate_synthetic(3, 5, 10, 1.5, 0), ParameterError);
  EXPECT_THROW(generate_synthetic(6, 1, 10, 1.5, 0), ParameterError);
  EXPECT_THROW(generate_synthetic(6, 5, 0, 1.5, 0), ParameterError);
  EXPECT_THROW(generate_synthetic(6, 5, 10, 0.5, 0), ParameterError);
  EXPECT_THROW(generate_synthetic(6, 5, 10, 6.0, 0), ParameterError);
}

TEST(Normalizer, Endpoints) {
  Vector lo(3), hi(3);
  lo << -2.0, 0.0, 5.0;
  hi << 2.0, 10.0, 5.0;
  const Normalizer n(lo, hi);
  EXPECT_EQ(n.apply(lo).head(2), Vector::Constant(2, -1.0));
  EXPECT_EQ(n.apply(hi).head(2), Vector::Constant(2, 1.0));
  Vector mid(3);
  mid << 0.0, 5.0, 5.0;
  EXPECT_EQ(n.apply(mid), Vector::Zero(3));
  EXPECT_EQ(n.apply(lo)[2], 0.0);
  EXPECT_EQ(n.apply(hi)[2], 0.0);
}

TEST(Normalizer, FitUsesColumnExtremes) {
  std::vector<Vector> rows(3, Vector(2));
  rows[0] << 1.0, 4.0;
  rows[1] << 3.0, 4.0;
  rows[2] << 2.0, 4.0;
  const Normalizer n = Normalizer::fit(rows);
  EXPECT_EQ(n.apply(rows[0])[0], -1.0);
  EXPECT_EQ(n.apply(rows[1])[0], 1.0);
  EXPECT_EQ(n.apply(rows[2])[0], 0.0);
  EXPECT_EQ(n.apply(rows[2])[1], 0.0);
}

TEST(Dataset, AddValidates) {
  Dataset ds(4, 2);
  EXPECT_THROW(ds.add({Vector::Zero(3), LabelSet(4, {0})}), ShapeError);
  EXPECT_THROW(ds.add({Vector::Zero(2), LabelSet(5, {0})}), ShapeError);
  EXPECT_THROW(ds.add({Vector::Zero(2), LabelSet(4, std::initializer_list<int>{})}),
               ParameterError);
  EXPECT_THROW(Dataset(1, 2), ParameterError);
}

TEST(Persistence, RoundTrip) {
  SyntheticOptions opts;
  opts.max_labels = 3;
  const Dataset ds = generate_synthetic(7, 6, 120, 1.8, 21, opts);
  TempFile file("tkml_dataset_roundtrip.jsonl");
  save_dataset(ds, file.path());
  const Dataset back = load_dataset(file.path());
  EXPECT_EQ(back.num_labels(), 7);
  EXPECT_EQ(back.input_dim(), 6);
  EXPECT_EQ(back.seed(), 21u);
  ASSERT_EQ(back.size(), ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) {
    ASSERT_LE((back[i].x - ds[i].x).cwiseAbs().maxCoeff(), 1e-12);
    ASSERT_EQ(back[i].truth, ds[i].truth);
  }
}

TEST(Persistence, HeaderOnlyIsParameterError) {
  TempFile file("tkml_dataset_header_only.jsonl");
  file.write("{\"m\":4,\"d\":2,\"seed\":0}\n");
  EXPECT_THROW(load_dataset(file.path()), ParameterError);
}

TEST(Persistence, LabelOutOfRangeReportsLine) {
  TempFile file("tkml_dataset_bad_label.jsonl");
  file.write(
      "{\"m\":4,\"d\":2,\"seed\":0}\n"
      "{\"x\":[0.1,0.2],\"y\":[0]}\n"
      "{\"x\":[0.1,0.2],\"y\":[4]}\n");
  EXPECT_EQ(parse_error_line(file.path()), 3);
}

TEST(Persistence, MalformedLinesReportLine) {
  TempFile file("tkml_dataset_malformed.jsonl");
  file.write("{\"m\":4,\"d\":2,\"seed\":0}\n{\"x\":[0.1,0.2],\"y\":[1]}\n{\"x\":[0.1,\n");
  EXPECT_EQ(parse_error_line(file.path()), 3);
  file.write("{\"m\":4,\"d\":2,\"seed\":0}\n{\"x\":[0.1],\"y\":[1]}\n");
  EXPECT_EQ(parse_error_line(file.path()), 2);
  file.write("{\"m\":4,\"d\":2,\"seed\":0}\n{\"x\":[0.1,0.3],\"y\":[]}\n");
  EXPECT_EQ(parse_error_line(file.path()), 2);
  file.write("{\"x\":[0.1,0.3],\"y\":[1]}\n");
  EXPECT_EQ(parse_error_line(file.path()), 1);
  file.write("");
  EXPECT_THROW(load_dataset(file.path()), ParseError);
}

TEST(Persistence, MissingFileIsIoError) {
  EXPECT_THROW(load_dataset("/nonexistent/tkml/data.jsonl"), IoError);
}

TEST(Slice, CopiesRange) {
  const Dataset ds = generate_synthetic(5, 3, 20, 1.5, 2);
  const Dataset part = ds.slice(5, 10);
  ASSERT_EQ(part.size(), 10u);
  EXPECT_EQ(part[0].x, ds[5].x);
  EXPECT_EQ(part[9].truth, ds[14].truth);
}

}  // namespace
}  // namespace tkml
