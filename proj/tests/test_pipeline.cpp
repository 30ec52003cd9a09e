#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "ecx/model.hpp"
#include "ecx/oracle.hpp"
#include "ecx/pipeline.hpp"

using namespace ecx;

namespace {

OutputMatrix make_output(const Mat& values) {
  OutputMatrix y;
  y.values = values;
  for (int i = 0; i < values.rows(); ++i) y.economy_ids.push_back("c" + std::to_string(i));
  for (int j = 0; j < values.cols(); ++j) y.activity_ids.push_back("p" + std::to_string(j));
  y.row_param = Vec::Zero(values.rows());
  y.col_param = Vec::Zero(values.cols());
  return y;
}

SpecializationMatrix parity_pattern(int nc, int np) {
  const OutputMatrix y = output_single(gen_linspace(nc), gen_linspace(np));
  return binarize(rca(y));
}

}  // namespace

TEST_CASE("revealed advantage on a worked 2x2 instance") {
  Mat v(2, 2);
  v << 1.0, 2.0, 3.0, 4.0;
  const RcaMatrix r = rca(make_output(v));
  CHECK(r.values(0, 0) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
  CHECK(r.values(0, 1) == doctest::Approx(10.0 / 9.0).epsilon(1e-15));
  CHECK(r.values(1, 0) == doctest::Approx(15.0 / 14.0).epsilon(1e-15));
  CHECK(r.values(1, 1) == doctest::Approx(20.0 / 21.0).epsilon(1e-15));
  CHECK(r.undefined_rows.empty());
  CHECK(r.undefined_cols.empty());
}

TEST_CASE("share-weighted advantage averages to one in every column") {
  Rng rng(21);
  Mat v(5, 8);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 8; ++j) v(i, j) = 0.1 + rng.uniform01();
  const RcaMatrix r = rca(make_output(v));
  const double total = v.sum();
  for (int j = 0; j < 8; ++j) {
    double acc = 0.0;
    for (int i = 0; i < 5; ++i) acc += v.row(i).sum() / total * r.values(i, j);
    CHECK(acc == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("binarize applies the tie band at one") {
  Mat v(1, 5);
  v << 1.0, 1.0 - 1e-10, 1.0 - 1e-6, 0.5, 2.0;
  RcaMatrix r;
  r.values = v;
  r.economy_ids = {"c0"};
  r.activity_ids = {"p0", "p1", "p2", "p3", "p4"};
  const SpecializationMatrix m = binarize(r);
  CHECK(m.values(0, 0) == 1.0);
  CHECK(m.values(0, 1) == 1.0);  // within the tie band
  CHECK(m.values(0, 2) == 0.0);
  CHECK(m.values(0, 3) == 0.0);
  CHECK(m.values(0, 4) == 1.0);
  CHECK(m.diversity(0) == 3.0);
  CHECK(m.ubiquity(2) == 0.0);
}

TEST_CASE("zero marginals are flagged, rejected, then dropped") {
  Mat v(3, 3);
  v << 1.0, 0.0, 2.0, 0.0, 0.0, 0.0, 3.0, 0.0, 4.0;
  const RcaMatrix r = rca(make_output(v));
  CHECK(r.undefined_rows == std::vector<int>{1});
  CHECK(r.undefined_cols == std::vector<int>{1});
  CHECK(std::isnan(r.values(1, 0)));
  CHECK(std::isnan(r.values(0, 1)));
  CHECK_THROWS_AS(binarize(r), ValidationError);

  const RcaMatrix clean = drop_undefined(r);
  CHECK(clean.values.rows() == 2);
  CHECK(clean.values.cols() == 2);
  CHECK(clean.economy_ids == std::vector<std::string>{"c0", "c2"});
  CHECK(clean.activity_ids == std::vector<std::string>{"p0", "p2"});
  CHECK_NOTHROW(binarize(clean));
}

TEST_CASE("projections are row stochastic with a uniform right eigenvector") {
  const SpecializationMatrix m = parity_pattern(5, 7);
  const ProjectionMatrix pc = project_economies(m);
  const ProjectionMatrix pp = project_activities(m);
  const Vec ones_c = Vec::Ones(5);
  const Vec ones_p = Vec::Ones(7);
  CHECK((pc.values.rowwise().sum() - ones_c).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((pp.values.rowwise().sum() - ones_p).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((pc.values * ones_c - ones_c).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(pc.side == ProjectionSide::economies);
  CHECK(pp.side == ProjectionSide::activities);
}

TEST_CASE("projection drops empty rows and columns with bookkeeping") {
  SpecializationMatrix m;
  m.values = Mat(3, 3);
  m.values << 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0;
  m.economy_ids = {"c0", "c1", "c2"};
  m.activity_ids = {"p0", "p1", "p2"};
  m.diversity = m.values.rowwise().sum();
  m.ubiquity = m.values.colwise().sum().transpose();
  const ProjectionMatrix pc = project_economies(m);
  CHECK(pc.values.rows() == 2);
  CHECK(pc.kept == std::vector<int>{0, 2});
  CHECK(pc.ids == std::vector<std::string>{"c0", "c2"});
  CHECK(pc.dropped_ids == std::vector<std::string>{"c1"});

  m.values.setZero();
  m.diversity.setZero();
  m.ubiquity.setZero();
  CHECK_THROWS_AS(project_economies(m), ValidationError);
}

TEST_CASE("odd-size ladders score positive, zero, negative") {
  const SpecializationMatrix m = parity_pattern(5, 6);
  const ComplexityResult eci = eci_eigen(project_economies(m));
  CHECK(!eci.degenerate);
  CHECK(eci.lambda2 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  const Vec expect = oracle_eci(ParityCase::from_dims(5, 6));
  for (int i = 0; i < 5; ++i) {
    if (expect(i) == 0.0) {
      CHECK(std::abs(eci.z(i)) < 1e-9);
    } else {
      CHECK(eci.z(i) * expect(i) > 0.0);
    }
  }
}

TEST_CASE("even split collapses to the two-level degenerate scores") {
  const SpecializationMatrix m = parity_pattern(4, 6);
  const ComplexityResult eci = eci_eigen(project_economies(m));
  CHECK(eci.degenerate);
  const Vec expect = oracle_eci(ParityCase::from_dims(4, 6));
  for (int i = 0; i < 4; ++i) CHECK(eci.z(i) == doctest::Approx(expect(i)).epsilon(1e-12));
}

TEST_CASE("both-odd ladder keeps the halved spectral gap") {
  const SpecializationMatrix m = parity_pattern(5, 7);
  const ComplexityResult eci = eci_eigen(project_economies(m));
  CHECK(!eci.degenerate);
  CHECK(eci.lambda2 == doctest::Approx(0.5).epsilon(1e-12));
  const ComplexityResult pci = eci_eigen(project_activities(m));
  CHECK(pci.z(0) > 0.0);
  CHECK(std::abs(pci.z(3)) < 1e-9);
  CHECK(pci.z(6) < 0.0);
}

TEST_CASE("reflection scores rank identically to the eigenvector") {
  Rng rng_r(41), rng_q(42);
  const EndowmentMatrix re = mix_endowments(gen_linspace(12), 1.0, 5, rng_r);
  const RequirementMatrix qr = mix_requirements(gen_linspace(30), 1.0, 5, rng_q);
  const SpecializationMatrix m = binarize(drop_undefined(rca(output_multi(re, qr))));
  const ComplexityResult eig = eci_eigen(project_economies(m));
  const ComplexityResult ref = eci_reflections(m, 64);
  REQUIRE(!eig.degenerate);
  REQUIRE(!ref.degenerate);
  const auto rho = spearman(eig.z, ref.z);
  REQUIRE(rho.has_value());
  CHECK(*rho == 1.0);
}

TEST_CASE("reflections reproduce the two-level pattern after reseeding") {
  const SpecializationMatrix m = parity_pattern(4, 6);
  const ComplexityResult ref = eci_reflections(m, 8);
  CHECK(!ref.degenerate);
  CHECK(ref.z(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ref.z(1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ref.z(2) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(ref.z(3) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("reflections go degenerate when every economy looks alike") {
  SpecializationMatrix m;
  m.values = Mat::Ones(3, 4);
  m.economy_ids = {"c0", "c1", "c2"};
  m.activity_ids = {"p0", "p1", "p2", "p3"};
  m.diversity = m.values.rowwise().sum();
  m.ubiquity = m.values.colwise().sum().transpose();
  const ComplexityResult ref = eci_reflections(m, 8);
  CHECK(ref.degenerate);
  CHECK(ref.z.cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(eci_reflections(m, 7), ValidationError);
}

TEST_CASE("large projections route through the deflated power method") {
  Rng rng_r(1), rng_q(2);
  const EndowmentMatrix re = mix_endowments(gen_linspace(600), 1.0, 10, rng_r);
  const RequirementMatrix qr = mix_requirements(gen_linspace(900), 1.0, 10, rng_q);
  const SpecializationMatrix m = binarize(drop_undefined(rca(output_multi(re, qr))));
  const ProjectionMatrix pc = project_economies(m);
  REQUIRE(pc.values.rows() > 512);
  const ComplexityResult eci = eci_eigen(pc);
  CHECK(!eci.degenerate);
  CHECK(eci.converged);
  CHECK(eci.method == ComplexityMethod::eigen);
  CHECK(eci.lambda2 > 0.0);
  CHECK(eci.lambda2 < 1.0);
  // raw scores satisfy P v = lambda2 v + const * ones
  const Vec resid = pc.values * eci.raw - eci.lambda2 * eci.raw;
  CHECK(stddev_of(resid) < 1e-8);
}

TEST_CASE("rank averaging spreads ties evenly") {
  Vec v(5);
  v << 3.0, 1.0, 4.0, 1.0, 5.0;
  const Vec ranks = average_ranks(v);
  CHECK(ranks(0) == 3.0);
  CHECK(ranks(1) == 1.5);
  CHECK(ranks(2) == 4.0);
  CHECK(ranks(3) == 1.5);
  CHECK(ranks(4) == 5.0);
}

TEST_CASE("rank correlation on small worked examples") {
  Vec x(3), y(3);
  x << 1.0, 2.0, 3.0;
  y << 1.0, 3.0, 2.0;
  auto rho = spearman(x, y);
  REQUIRE(rho.has_value());
  CHECK(*rho == doctest::Approx(0.5).epsilon(1e-15));

  Vec tied(3);
  tied << 1.0, 1.0, 2.0;
  rho = spearman(tied, x);
  REQUIRE(rho.has_value());
  CHECK(*rho == doctest::Approx(0.5 * std::sqrt(3.0)).epsilon(1e-12));

  const Vec flat = Vec::Ones(3);
  CHECK(!spearman(flat, x).has_value());

  Vec shorter(2);
  shorter << 1.0, 2.0;
  CHECK_THROWS_AS(spearman(shorter, x), ValidationError);
}

TEST_CASE("eigen scoring validates its input") {
  ProjectionMatrix p;
  p.values = Mat::Ones(2, 3);
  p.ids = {"c0", "c1"};
  CHECK_THROWS_AS(eci_eigen(p), ValidationError);

  p.values = Mat(2, 2);
  p.values << 0.9, 0.9, 0.1, 0.1;  // rows do not sum to one
  CHECK_THROWS_AS(eci_eigen(p), NumericalError);
}
