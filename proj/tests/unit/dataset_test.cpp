#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <set>
#include <sstream>

#include "clplu/dataset.hpp"
#include "clplu/error.hpp"
#include "clplu/synthetic.hpp"

using namespace clplu;

namespace {

MultiLabelDataset parse(const std::string& text, DataFormat fmt = DataFormat::SparseMl) {
  std::istringstream in(text);
  return read_dataset(in, fmt, "test");
}

}  // namespace

TEST(SparseFormat, ThreeInstanceTranscription) {
  const auto ds = parse("#n=3 d=2 L=3\n0,2|0:1.5\n1|1:-2\n|\n");
  ASSERT_EQ(ds.num_instances(), 3u);
  ASSERT_EQ(ds.num_features(), 2u);
  ASSERT_EQ(ds.num_labels(), 3u);
  const std::uint8_t want[3][3] = {{1, 0, 1}, {0, 1, 0}, {0, 0, 0}};
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(ds.labels()(i, j), want[i][j]) << i << "," << j;
  }
  EXPECT_EQ(ds.features()(0, 0), 1.5);
  EXPECT_EQ(ds.features()(0, 1), 0.0);
  EXPECT_EQ(ds.features()(1, 1), -2.0);
  EXPECT_EQ(ds.label_names()[2], "label_2");
}

TEST(SparseFormat, AllEmptyLabelListsGiveZeroMatrix) {
  const auto ds = parse("#n=2 d=1 L=4\n|0:1\n|\n");
  for (const auto v : ds.labels().values()) EXPECT_EQ(v, 0);
  EXPECT_EQ(label_cardinality(ds), 0.0);
}

TEST(SparseFormat, LabelNamesLine) {
  const auto ds = parse("#n=1 d=1 L=2\n#labels smoking,glasses\n1|0:1\n");
  EXPECT_EQ(ds.label_names(), (std::vector<std::string>{"smoking", "glasses"}));
}

TEST(SparseFormat, HeaderShapeMatches) {
  SyntheticSpec spec;
  spec.n = 50;
  spec.d = 103;
  spec.L = 14;
  spec.seed = 4;
  const auto ds = make_synthetic(spec);
  std::stringstream buf;
  write_dataset(ds, buf, DataFormat::SparseMl);
  std::string header;
  std::getline(buf, header);
  EXPECT_EQ(header, "#n=50 d=103 L=14");
}

TEST(SparseFormat, MalformedLinesReportLineNumbers) {
  auto expect_line = [](const std::string& text, std::size_t line) {
    try {
      parse(text);
      FAIL() << "expected ParseError for: " << text;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.line(), line) << e.what();
    }
  };
  expect_line("#n=2 d=2 L=2\n0|0:1\n5|0:1\n", 3);        // label index >= L
  expect_line("#n=1 d=2 L=2\n0|0:nan\n", 2);             // non-finite feature
  expect_line("#n=1 d=2 L=2\n0|2:1\n", 2);               // feature index >= d
  expect_line("#n=1 d=2 L=2\n0 0:1\n", 2);               // missing separator
  expect_line("#n=1 d=2 L=2\n0|0:1|9\n", 2);             // trailing segment
  expect_line("#n=x d=2 L=2\n", 1);                      // bad header
}

TEST(SparseFormat, RowCountMustMatchHeader) {
  EXPECT_THROW(parse("#n=3 d=1 L=2\n0|0:1\n"), DataError);
}

TEST(SparseFormat, MissingFileIsAnError) {
  EXPECT_THROW(load_dataset("/nonexistent/file.sparse", DataFormat::SparseMl), DataError);
}

TEST(DenseCsv, ReadsLabelsThenFeatures) {
  const auto ds = parse("y0,y1,x0,x1,x2\n1,0,0.5,1,2\n0,1,3,4,5\n", DataFormat::DenseCsv);
  EXPECT_EQ(ds.num_labels(), 2u);
  EXPECT_EQ(ds.num_features(), 3u);
  EXPECT_EQ(ds.labels()(1, 1), 1);
  EXPECT_EQ(ds.features()(1, 2), 5.0);
}

TEST(DenseCsv, RejectsNonBinaryLabels) {
  EXPECT_THROW(parse("y0,y1,x0\n2,0,1\n", DataFormat::DenseCsv), DataError);
}

TEST(MultiLabelDataset, ValidatesInvariants) {
  EXPECT_THROW(MultiLabelDataset(RealMatrix(1, 1), BinaryMatrix(1, 1)), DataError);  // L < 2
  EXPECT_THROW(MultiLabelDataset(RealMatrix(0, 1), BinaryMatrix(0, 2)), DataError);  // n < 1
  BinaryMatrix bad(1, 2);
  bad(0, 0) = 3;
  EXPECT_THROW(MultiLabelDataset(RealMatrix(1, 1), bad), DataError);
  RealMatrix inf(1, 1);
  inf(0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(MultiLabelDataset(inf, BinaryMatrix(1, 2)), DataError);
}

TEST(Split, ExactDivision) {
  const auto s = split_indices(100, {0.8, 0.1, 0.1, 7});
  EXPECT_EQ(s.train.size(), 80u);
  EXPECT_EQ(s.val.size(), 10u);
  EXPECT_EQ(s.test.size(), 10u);
}

TEST(Split, RemainderGoesToTrain) {
  const auto s = split_indices(2417, {0.8, 0.1, 0.1, 1});
  EXPECT_EQ(s.train.size(), 1935u);
  EXPECT_EQ(s.val.size(), 241u);
  EXPECT_EQ(s.test.size(), 241u);
}

TEST(Split, SameSeedSamePartition) {
  const SplitSpec spec{0.8, 0.1, 0.1, 99};
  const auto a = split_indices(500, spec);
  const auto b = split_indices(500, spec);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.val, b.val);
  EXPECT_EQ(a.test, b.test);
  const auto c = split_indices(500, {0.8, 0.1, 0.1, 100});
  EXPECT_NE(a.test, c.test);
}

TEST(Split, TooSmallToSplit) {
  EXPECT_THROW(split_indices(5, {0.8, 0.1, 0.1, 0}), DataError);
}

TEST(Split, SpecValidation) {
  EXPECT_THROW((SplitSpec{0.8, 0.1, 0.2, 0}.validate()), ConfigError);
  EXPECT_THROW((SplitSpec{1.0, 0.0, 0.0, 0}.validate()), ConfigError);
  EXPECT_NO_THROW((SplitSpec{0.7, 0.2, 0.1, 0}.validate()));
}

TEST(LabelCardinality, Arithmetic) {
  BinaryMatrix z(2, 4);
  z(0, 1) = 1;
  z(1, 0) = z(1, 2) = z(1, 3) = 1;
  EXPECT_EQ(label_cardinality(MultiLabelDataset(RealMatrix(2, 1), z)), 2.0);
}

TEST(MinMax, FitOnOneApplyToAnother) {
  RealMatrix train(2, 2, {0.0, 5.0, 10.0, 5.0});
  const auto scaling = fit_minmax(train);
  const auto scaled = apply_minmax(RealMatrix(1, 2, {5.0, 7.0}), scaling);
  EXPECT_EQ(scaled(0, 0), 0.5);
  EXPECT_EQ(scaled(0, 1), 0.0);  // constant feature
}

TEST(Synthetic, DeterministicAndShaped) {
  SyntheticSpec spec;
  spec.seed = 12;
  const auto a = make_synthetic(spec);
  const auto b = make_synthetic(spec);
  EXPECT_EQ(a.features(), b.features());
  EXPECT_EQ(a.labels(), b.labels());
  EXPECT_EQ(a.num_instances(), spec.n);
  EXPECT_NEAR(label_cardinality(a), spec.cardinality, 0.3);
}
