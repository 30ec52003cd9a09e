#include <doctest.h>

#include <cmath>
#include <vector>

#include "ecx/model.hpp"
#include "ecx/oracle.hpp"
#include "ecx/pipeline.hpp"
#include "ecx/rng.hpp"

using namespace ecx;

namespace {

// Projection of the ladder pattern through the floating pipeline.
Mat pipeline_projection(int nc, int np) {
  const OutputMatrix y = output_single(gen_linspace(nc), gen_linspace(np));
  return project_economies(binarize(rca(y))).values;
}

Mat pattern_values(int nc, int np) {
  const OutputMatrix y = output_single(gen_linspace(nc), gen_linspace(np));
  return binarize(rca(y)).values;
}

}  // namespace

TEST_CASE("parity case layout from dimensions") {
  const ParityCase ee = ParityCase::from_dims(4, 6);
  CHECK(ee.kind == ParityKind::even_even);
  CHECK(!ee.at_mean_row.has_value());
  CHECK(!ee.at_mean_col.has_value());

  const ParityCase oe = ParityCase::from_dims(5, 6);
  CHECK(oe.kind == ParityKind::odd_even);
  REQUIRE(oe.at_mean_row.has_value());
  CHECK(*oe.at_mean_row == 2);
  CHECK(!oe.at_mean_col.has_value());

  const ParityCase eo = ParityCase::from_dims(4, 7);
  CHECK(eo.kind == ParityKind::odd_even);
  CHECK(!eo.at_mean_row.has_value());
  REQUIRE(eo.at_mean_col.has_value());
  CHECK(*eo.at_mean_col == 3);

  const ParityCase oo = ParityCase::from_dims(5, 7);
  CHECK(oo.kind == ParityKind::odd_odd);
  CHECK(*oo.at_mean_row == 2);
  CHECK(*oo.at_mean_col == 3);

  CHECK_THROWS_AS(ParityCase::from_dims(1, 5), ValidationError);
  CHECK_THROWS_AS(ParityCase::from_dims(5, 1), ValidationError);
}

TEST_CASE("quadrant pattern with rows and columns at the center") {
  Vec r(3);
  r << 0.9, 0.5, 0.1;  // mean 0.5 hits the middle row exactly
  Vec q(4);
  q << 0.0, 0.2, 0.8, 1.0;  // mean 0.5, no column at it
  const SpecializationMatrix m = oracle_mcp(r, q);
  // high-r economy pairs with high-q activities
  Mat want(3, 4);
  want << 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0;
  CHECK((m.values - want).cwiseAbs().maxCoeff() == 0.0);
  CHECK(m.diversity(1) == 4.0);
  CHECK(m.ubiquity(0) == 2.0);
  CHECK(m.economy_ids.size() == 3);

  // median centering moves the split on skewed data
  Vec skew(3);
  skew << 0.0, 0.1, 1.0;  // mean 0.3667, median 0.1
  const SpecializationMatrix med = oracle_mcp(skew, q, Center::median);
  CHECK(med.values(1, 0) == 1.0);  // at the median, fully filled row
  CHECK(med.values(1, 3) == 1.0);
}

TEST_CASE("frozen even-even projection") {
  const Mat got = oracle_mcc(ParityCase::from_dims(4, 6));
  Mat want(4, 4);
  want << 0.5, 0.5, 0.0, 0.0,
          0.5, 0.5, 0.0, 0.0,
          0.0, 0.0, 0.5, 0.5,
          0.0, 0.0, 0.5, 0.5;
  CHECK((got - want).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("frozen odd-even projection") {
  const Mat got = oracle_mcc(ParityCase::from_dims(5, 6));
  const double third = 1.0 / 3.0;
  const double sixth = 1.0 / 6.0;
  Mat want(5, 5);
  want << third, third, third, 0.0,   0.0,
          third, third, third, 0.0,   0.0,
          sixth, sixth, third, sixth, sixth,
          0.0,   0.0,   third, third, third,
          0.0,   0.0,   third, third, third;
  CHECK((got - want).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("frozen even-odd projection") {
  const Mat got = oracle_mcc(ParityCase::from_dims(4, 7));
  // h = 3 strict activities a side, same-group weight (h/2 + 1/4) / 4
  const double same = 7.0 / 16.0;
  const double cross = 1.0 / 16.0;
  Mat want(4, 4);
  want << same,  same,  cross, cross,
          same,  same,  cross, cross,
          cross, cross, same,  same,
          cross, cross, same,  same;
  CHECK((got - want).cwiseAbs().maxCoeff() < 1e-16);
  for (int i = 0; i < 4; ++i) CHECK(got.row(i).sum() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("frozen odd-odd projection") {
  const Mat got = oracle_mcc(ParityCase::from_dims(5, 7));
  const double same = 3.0 / 10.0;
  const double cross = 1.0 / 20.0;
  const double mid_row = 6.0 / 35.0;
  const double mid_diag = 11.0 / 35.0;
  Mat want(5, 5);
  want << same,    same,    same,    cross,    cross,
          same,    same,    same,    cross,    cross,
          mid_row, mid_row, mid_diag, mid_row, mid_row,
          cross,   cross,   same,    same,     same,
          cross,   cross,   same,    same,     same;
  CHECK((got - want).cwiseAbs().maxCoeff() < 1e-16);
  for (int i = 0; i < 5; ++i) CHECK(got.row(i).sum() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("expected score sign patterns") {
  const Vec ee = oracle_eci(ParityCase::from_dims(4, 6));
  CHECK(ee(0) == 1.0);
  CHECK(ee(1) == 1.0);
  CHECK(ee(2) == -1.0);
  CHECK(ee(3) == -1.0);

  const Vec oo = oracle_eci(ParityCase::from_dims(5, 7));
  CHECK(oo(0) == 1.0);
  CHECK(oo(1) == 1.0);
  CHECK(oo(2) == 0.0);
  CHECK(oo(3) == -1.0);
  CHECK(oo(4) == -1.0);
}

TEST_CASE("pipeline, closed form, and exact rationals agree on ladders") {
  const int dims[][2] = {{4, 6}, {5, 6}, {4, 7}, {5, 7}, {10, 20}, {11, 20}, {15, 17}};
  for (const auto& d : dims) {
    CAPTURE(d[0]);
    CAPTURE(d[1]);
    const Mat pattern = pattern_values(d[0], d[1]);
    const SpecializationMatrix want =
        oracle_mcp(output_single(gen_linspace(d[0]), gen_linspace(d[1])).row_param,
                   gen_linspace(d[1]));
    CHECK((pattern - want.values).cwiseAbs().maxCoeff() == 0.0);

    const Mat p = pipeline_projection(d[0], d[1]);
    const Mat closed = oracle_mcc(ParityCase::from_dims(d[0], d[1]));
    const Mat exact = exact_projection_economies(pattern);
    CHECK((p - closed).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((p - exact).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((closed - exact).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("exact rational projection checks arbitrary patterns") {
  Rng rng(1234);
  for (int trial = 0; trial < 20; ++trial) {
    const int nc = 3 + static_cast<int>(rng.uniform01() * 10);
    const int np = 4 + static_cast<int>(rng.uniform01() * 14);
    Mat m01(nc, np);
    for (int i = 0; i < nc; ++i)
      for (int j = 0; j < np; ++j) m01(i, j) = rng.uniform01() < 0.4 ? 1.0 : 0.0;
    // guarantee defined marginals
    for (int i = 0; i < nc; ++i) m01(i, i % np) = 1.0;
    for (int j = 0; j < np; ++j) m01(j % nc, j) = 1.0;

    SpecializationMatrix m;
    m.values = m01;
    m.diversity = m01.rowwise().sum();
    m.ubiquity = m01.colwise().sum().transpose();
    const Mat viaPipeline = project_economies(m).values;
    const Mat viaRationals = exact_projection_economies(m01);
    CHECK((viaPipeline - viaRationals).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("exact projection rejects bad input") {
  Mat m(2, 2);
  m << 1.0, 0.5, 0.0, 1.0;
  CHECK_THROWS_AS(exact_projection_economies(m), ValidationError);
  m << 1.0, 1.0, 0.0, 0.0;  // zero-diversity row
  CHECK_THROWS_AS(exact_projection_economies(m), ValidationError);
}

TEST_CASE("separable output shows no revealed advantage anywhere") {
  Rng rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    const int nc = 2 + static_cast<int>(rng.uniform01() * 30);
    const int np = 2 + static_cast<int>(rng.uniform01() * 40);
    Vec f(nc), g(np);
    for (int i = 0; i < nc; ++i) f(i) = 0.1 + 3.0 * rng.uniform01();
    for (int j = 0; j < np; ++j) g(j) = 0.1 + 3.0 * rng.uniform01();
    const SeparableCheck chk = check_separable_rca(f, g);
    CHECK(chk.separable);
    CHECK(chk.max_abs_deviation < 1e-12);
  }
  Vec bad(2);
  bad << 1.0, -1.0;
  Vec g(2);
  g << 1.0, 2.0;
  CHECK_THROWS_AS(check_separable_rca(bad, g), ValidationError);
}

TEST_CASE("shifted condition on a worked example") {
  Vec f(3);
  f << 1.0, 2.0, 3.0;  // mean 2
  Vec g(2);
  g << 1.0, 4.0;  // mean 2.5
  const Mat cond = shifted_condition(f, g);
  Mat want(3, 2);
  want << 1.0, 0.0,  // below-mean f pairs with below-mean g
          1.0, 1.0,  // f at its mean: condition holds both ways
          0.0, 1.0;
  CHECK((cond - want).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("shifted output binarizes to the factor sign condition") {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const int nc = 3 + static_cast<int>(rng.uniform01() * 12);
    const int np = 3 + static_cast<int>(rng.uniform01() * 12);
    FactorVectors fv;
    fv.f = Vec(nc);
    fv.g = Vec(np);
    for (int i = 0; i < nc; ++i) fv.f(i) = 0.2 + 2.0 * rng.uniform01();
    for (int j = 0; j < np; ++j) fv.g(j) = 0.2 + 2.0 * rng.uniform01();
    fv.shift = 0.5 + 2.0 * rng.uniform01();
    const SpecializationMatrix m = binarize(rca(output_shifted(fv)));
    const Mat want = shifted_condition(fv.f, fv.g);
    CHECK((m.values - want).cwiseAbs().maxCoeff() == 0.0);
  }
}
