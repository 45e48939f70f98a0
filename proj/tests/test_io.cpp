#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "rmslca/io.hpp"
#include "support.hpp"

using namespace rmslca;

namespace {

std::string write_temp(const std::string& name, const std::string& body) {
  const auto path = std::filesystem::temp_directory_path() / ("rmslca_io_" + name);
  std::ofstream(path) << body;
  return path.string();
}

}  // namespace

TEST(BlockSpec, Parses) {
  EXPECT_EQ(parse_block_spec("1,1,2"), (std::vector<int>{1, 1, 2}));
  EXPECT_EQ(parse_block_spec(" 2 , 1 "), (std::vector<int>{2, 1}));
  EXPECT_THROW(parse_block_spec("1,,2"), InvalidArgument);
  EXPECT_THROW(parse_block_spec("1,0"), InvalidArgument);
  EXPECT_THROW(parse_block_spec("a"), InvalidArgument);
  EXPECT_EQ(parse_dims("2,3").dims(), (std::vector<int>{2, 3}));
}

TEST(LoadCsv, ThreeColumnsTwoBlocks) {
  const auto path = write_temp("a.csv", "x,y,z\n1,2,3\n4,5,6\n");
  const Dataset d = load_csv(path, {1, 1, 2});
  EXPECT_EQ(d.structure.dims(), (std::vector<int>{2, 1}));
  EXPECT_EQ(d.rows(1, 2), 6.0);
  EXPECT_EQ(d.column_names, (std::vector<std::string>{"x", "y", "z"}));
}

TEST(LoadCsv, ReordersColumnsStably) {
  const auto path = write_temp("b.csv", "a,b,c,d\n1,2,3,4\n5,6,7,8\n");
  const Dataset d = load_csv(path, {2, 1, 2, 1});
  EXPECT_EQ(d.column_names, (std::vector<std::string>{"b", "d", "a", "c"}));
  EXPECT_EQ(d.block_assignment, (std::vector<int>{0, 0, 1, 1}));
  EXPECT_EQ(d.rows.row(0), Eigen::RowVector4d(2, 4, 1, 3));
}

TEST(LoadCsv, QuotedFieldsAndBlankLines) {
  const auto path = write_temp("c.csv", "\"first, col\",\"b\"\"q\"\n1.5,-2e-3\n\n\"3\",+4\n");
  const Dataset d = load_csv(path, {1, 2});
  EXPECT_EQ(d.column_names[0], "first, col");
  EXPECT_EQ(d.column_names[1], "b\"q");
  EXPECT_EQ(d.rows.rows(), 2);
  EXPECT_EQ(d.rows(0, 1), -2e-3);
  EXPECT_EQ(d.rows(1, 1), 4.0);
}

TEST(LoadCsv, NonNumericCellNamesLocation) {
  const auto path = write_temp("d.csv", "x,y\n1,2\n3,abc\n");
  try {
    load_csv(path, {1, 2});
    FAIL();
  } catch (const NonNumericCell& e) {
    EXPECT_EQ(e.row(), 3u);
    EXPECT_EQ(e.col(), 2u);
    EXPECT_NE(std::string(e.what()).find("abc"), std::string::npos);
  }
  EXPECT_THROW(load_csv(write_temp("e.csv", "x,y\n1,\n"), {1, 2}), NonNumericCell);
  EXPECT_THROW(load_csv(write_temp("f.csv", "x,y\n1,nan\n2,3\n"), {1, 2}), NonNumericCell);
}

TEST(LoadCsv, StructuralErrors) {
  EXPECT_THROW(load_csv(write_temp("g.csv", "x,y\n1,2\n3\n"), {1, 2}), MissingColumn);
  EXPECT_THROW(load_csv(write_temp("h.csv", "x,y\n1,2\n3,4\n"), {1, 2, 2}), MissingColumn);
  EXPECT_THROW(load_csv(write_temp("i.csv", "x,y\n1,2\n3,4\n"), {1, 3}), InvalidArgument);
  EXPECT_THROW(load_csv(write_temp("j.csv", "x,y\n1,2\n"), {1, 2}), InvalidArgument);
  EXPECT_THROW(load_csv("/nonexistent/file.csv", {1}), ParseError);
  EXPECT_THROW(load_csv(write_temp("k.csv", "x,\"y\n1,2\n"), {1, 2}), ParseError);
}

TEST(WriteCsv, RoundTripIsBitExact) {
  std::mt19937_64 rng(1);
  Matrix m = rmslca::testing::random_matrix(30, 3, rng);
  m(0, 0) = 1.0 / 3.0;
  m(1, 1) = 1e-300;
  m(2, 2) = -123456789.123456789;
  const auto path = (std::filesystem::temp_directory_path() / "rmslca_io_round.csv").string();
  write_csv(path, m, {"a", "b", "c"});
  const Dataset d = load_csv(path, {1, 1, 2});
  EXPECT_EQ(d.rows, m);
  EXPECT_THROW(write_csv(path, m, {"a"}), InvalidArgument);
}

TEST(Whiten, ClassicalBlocksBecomeIdentity) {
  std::mt19937_64 rng(2);
  const BlockStructure bs({2, 3});
  const Matrix v = rmslca::testing::random_spd(5, rng);
  const Matrix raw = sample(EllipticalModel::gaussian(v), 500, std::uint64_t{3});
  const Dataset ds = make_dataset(raw, {}, {1, 1, 2, 2, 2});
  const auto w = whiten(ds, Estimator::classical);
  const Matrix c = sample_covariance(w.data.rows);
  for (int k = 0; k < 2; ++k) {
    EXPECT_LT((c.block(bs.offset(k), bs.offset(k), bs.dim(k), bs.dim(k)) - Matrix::Identity(bs.dim(k), bs.dim(k))).norm(),
              1e-10);
  }
  EXPECT_LT(w.data.rows.colwise().mean().norm(), 1e-12);
  const Matrix ws = w.transform.whitened_scatter(bs);
  EXPECT_LT((ws - c).norm(), 1e-10);
}

TEST(Whiten, AlreadyWhiteDataGivesNearIdentity) {
  const Matrix raw = sample(EllipticalModel::gaussian(4), 20000, std::uint64_t{4});
  const Dataset ds = make_dataset(raw, {}, {1, 1, 2, 2});
  const auto w = whiten(ds, Estimator::classical);
  EXPECT_LT((w.transform.w - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 0.05);
  McdOptions opt;
  opt.restarts = 10;
  const auto m = whiten(ds, Estimator::mcd, 0.75, opt);
  EXPECT_LT((m.transform.w - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 0.08);
}

TEST(Whiten, DirectionsMapBackToRawFit) {
  std::mt19937_64 rng(5);
  const BlockStructure bs({2, 2});
  const Matrix v = rmslca::testing::random_spd(4, rng);
  const Matrix raw = sample(EllipticalModel::gaussian(v), 400, std::uint64_t{6});
  const Dataset ds = make_dataset(raw, {}, {1, 1, 2, 2});
  const auto w = whiten(ds, Estimator::classical);
  const auto fw = classical_fit(w.data.rows, bs);
  const auto fr = classical_fit(ds.rows, bs);
  EXPECT_LT((fw.rho - fr.rho).cwiseAbs().maxCoeff(), 1e-10);
  for (int j = 0; j < 4; ++j) {
    Vector a = w.transform.map_direction(fw.alpha.col(j));
    if (a.dot(fr.alpha.col(j)) < 0.0) a = -a;
    EXPECT_LT((a - fr.alpha.col(j)).norm(), 1e-8);
  }
}
