#include "ecx/equilibrium.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace ecx {

namespace {

void check_unit_interval(const Vec& v, const char* name) {
  for (int i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v(i)) || v(i) < 0.0 || v(i) > 1.0) {
      throw ValidationError(std::string(name) + " entry " + std::to_string(i) +
                            " outside [0, 1]");
    }
  }
}

void check_positive(const Vec& v, const char* name) {
  for (int i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v(i)) || v(i) <= 0.0) {
      throw ValidationError(std::string(name) + " entry " + std::to_string(i) +
                            " must be strictly positive");
    }
  }
}

int side_of(double x, double center) {
  const double band = tol::kAtMean * std::max(1.0, std::abs(center));
  if (std::abs(x - center) <= band) return 0;
  return x < center ? -1 : 1;
}

// Linear clearing map pi -> (<pi> s - <q pi> t) / d, with
//   s_p = sum_c B_cp / <B_c.>          (taste mass on p)
//   t_p = sum_c (1 - r_c) B_cp / <B_c.>
//   d_p = N_c (1 - q_p (1 - <r>))      (physical supply of p)
// The map preserves sum_p d_p pi_p, so eigenvalue 1 is exact.
struct PriceMap {
  Vec s;
  Vec t;
  Vec d;
  Vec q;

  Vec apply(const Vec& pi) const {
    const double a = pi.mean();
    const double m = (q.array() * pi.array()).mean();
    return ((a * s - m * t).array() / d.array()).matrix();
  }
};

PriceMap build_price_map(const PreferenceMatrix& b, const Vec& q,
                         const Vec& r) {
  const int nc = static_cast<int>(r.size());
  const int np = static_cast<int>(q.size());
  if (nc < 2 || np < 2) {
    throw ValidationError("price map: need at least 2 economies and 2 activities");
  }
  if (b.values.rows() != nc || b.values.cols() != np) {
    throw ValidationError("price map: preference matrix shape mismatch");
  }
  check_unit_interval(q, "q");
  check_unit_interval(r, "r");
  if ((b.values.array() <= 0.0).any() || !b.values.allFinite()) {
    throw ValidationError("price map: preferences must be strictly positive");
  }

  const Vec row_mean = b.values.rowwise().mean();
  const Mat wb = b.values.array().colwise() / row_mean.array();

  PriceMap map;
  map.q = q;
  map.s = wb.colwise().sum().transpose();
  map.t = (wb.array().colwise() * (1.0 - r.array())).colwise().sum().transpose();
  map.d = static_cast<double>(nc) *
          (1.0 - q.array() * (1.0 - r.mean())).matrix();
  for (int p = 0; p < np; ++p) {
    if (map.d(p) <= 0.0) {
      throw ValidationError(
          "price map: activity " + std::to_string(p) +
          " has no positive supply, needs 1 - q_p (1 - <r>) > 0");
    }
  }
  return map;
}

double sup_residual(const PriceMap& map, const Vec& pi) {
  return (map.apply(pi) - pi).cwiseAbs().maxCoeff();
}

}  // namespace

WageResult equilibrium_wages(const PriceVector& prices, const Vec& q,
                             const Vec& r, const Vec& labor) {
  const int np = static_cast<int>(q.size());
  if (prices.pi.size() != np) {
    throw ValidationError("equilibrium_wages: price/q size mismatch");
  }
  if (labor.size() != r.size()) {
    throw ValidationError("equilibrium_wages: labor/r size mismatch");
  }
  check_positive(prices.pi, "pi");
  check_positive(labor, "labor");
  check_unit_interval(q, "q");
  check_unit_interval(r, "r");

  const double pi_mean = prices.pi.mean();
  const double qpi_mean = (q.array() * prices.pi.array()).mean();

  WageResult out;
  out.income =
      static_cast<double>(np) *
      (pi_mean + qpi_mean * (r.array() - 1.0)).matrix();
  out.wages = out.income.array() / labor.array();
  out.slope = static_cast<double>(np) * qpi_mean / labor.array();
  return out;
}

Vec wage_relaxation_step(const Vec& w, const Vec& w_star, double eta,
                         double dt) {
  if (w.size() != w_star.size()) {
    throw ValidationError("wage_relaxation_step: size mismatch");
  }
  if (!(eta > 0.0) || !(dt > 0.0)) {
    throw ValidationError("wage_relaxation_step: eta and dt must be positive");
  }
  if (eta * dt >= 1.0) {
    std::fprintf(stderr,
                 "wage_relaxation_step: eta*dt = %g >= 1, step no longer "
                 "contracts toward the target\n",
                 eta * dt);
  }
  return w - eta * dt * (w - w_star);
}

PricedSpecialization priced_specialization(const Vec& r, const Vec& q,
                                           const PriceVector& prices) {
  const int nc = static_cast<int>(r.size());
  const int np = static_cast<int>(q.size());
  if (prices.pi.size() != np) {
    throw ValidationError("priced_specialization: price/q size mismatch");
  }
  if (nc < 2 || np < 2) {
    throw ValidationError("priced_specialization: need at least 2x2");
  }
  check_positive(prices.pi, "pi");

  const double pi_mean = prices.pi.mean();
  const double qpi_mean = (q.array() * prices.pi.array()).mean();
  const double r_mean = r.mean();

  PricedSpecialization out;
  // q_p pi-weighted break-even point; equals <q> under flat prices
  out.threshold = qpi_mean / pi_mean;

  out.m.economy_ids = index_ids('c', nc);
  out.m.activity_ids = index_ids('p', np);
  out.m.values.resize(nc, np);
  for (int i = 0; i < nc; ++i) {
    const int si = side_of(r(i), r_mean);
    for (int j = 0; j < np; ++j) {
      const int sj = side_of(q(j), out.threshold);
      out.m.values(i, j) = si * sj >= 0 ? 1.0 : 0.0;
    }
  }
  out.m.diversity = out.m.values.rowwise().sum();
  out.m.ubiquity = out.m.values.colwise().sum();
  return out;
}

ConsumptionMatrix consumption(const PreferenceMatrix& b,
                              const PriceVector& prices, const Vec& q,
                              const Vec& r) {
  const int nc = static_cast<int>(r.size());
  const int np = static_cast<int>(q.size());
  if (prices.pi.size() != np) {
    throw ValidationError("consumption: price/q size mismatch");
  }
  if (b.values.rows() != nc || b.values.cols() != np) {
    throw ValidationError("consumption: preference matrix shape mismatch");
  }
  if ((b.values.array() <= 0.0).any()) {
    throw ValidationError("consumption: preferences must be strictly positive");
  }
  check_positive(prices.pi, "pi");

  const double pi_mean = prices.pi.mean();
  const double qpi_mean = (q.array() * prices.pi.array()).mean();
  const Vec row_mean = b.values.rowwise().mean();

  ConsumptionMatrix out;
  out.values.resize(nc, np);
  for (int i = 0; i < nc; ++i) {
    const double spend = pi_mean - (1.0 - r(i)) * qpi_mean;
    if (spend <= 0.0) {
      throw ValidationError("consumption: economy " + std::to_string(i) +
                            " has nonpositive income at these prices");
    }
    for (int j = 0; j < np; ++j) {
      out.values(i, j) = b.values(i, j) * spend / (prices.pi(j) * row_mean(i));
    }
  }
  return out;
}

PriceSolve solve_prices(const PreferenceMatrix& b, const Vec& q, const Vec& r,
                        const Vec& init) {
  const PriceMap map = build_price_map(b, q, r);
  const int np = static_cast<int>(q.size());

  Vec pi;
  if (init.size() == 0) {
    pi = Vec::Ones(np);
  } else {
    if (init.size() != np) {
      throw ValidationError("solve_prices: init size mismatch");
    }
    const double m0 = init.mean();
    if (!std::isfinite(m0) || std::abs(m0) < 1e-300) {
      throw ValidationError("solve_prices: init must have nonzero mean");
    }
    pi = init / m0;
  }

  PriceSolve out;
  bool stable = false;
  for (int it = 0; it < tol::kMaxPriceIters; ++it) {
    Vec z = map.apply(pi);
    const double zm = z.mean();
    out.iterations = it + 1;
    if (!z.allFinite() || std::abs(zm) < 1e-300) break;
    z /= zm;
    const double diff = (z - pi).cwiseAbs().maxCoeff();
    pi = z;
    if (diff < tol::kPriceSupNorm) {
      stable = true;
      break;
    }
  }

  double residual = stable ? sup_residual(map, pi)
                           : std::numeric_limits<double>::infinity();
  if (!stable || residual > tol::kEigenSolve) {
    // Direction stalled or the stalled direction is not a fixed point: the
    // map is rank two in (mean, q-weighted mean), so solve that system.
    const Vec u = (map.s.array() / map.d.array()).matrix();
    const Vec v = (-map.t.array() / map.d.array()).matrix();
    Eigen::Matrix2d k;
    k(0, 0) = u.mean();
    k(0, 1) = v.mean();
    k(1, 0) = (map.q.array() * u.array()).mean();
    k(1, 1) = (map.q.array() * v.array()).mean();

    Eigen::EigenSolver<Eigen::Matrix2d> es(k);
    int best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 2; ++i) {
      const double dist = std::abs(es.eigenvalues()(i) - 1.0);
      if (dist < best_dist) {
        best_dist = dist;
        best = i;
      }
    }
    if (best_dist > 1e-6) {
      throw NumericalError(
          "solve_prices: reduced system has no unit eigenvalue, closest is " +
          std::to_string(best_dist) + " away");
    }
    const Eigen::Vector2cd evec = es.eigenvectors().col(best);  // col() must not bind a temporary
    if (std::abs(evec(0).imag()) > 1e-12 || std::abs(evec(1).imag()) > 1e-12) {
      throw NumericalError("solve_prices: reduced eigenvector is complex");
    }
    pi = evec(0).real() * u + evec(1).real() * v;
    const double pm = pi.mean();
    if (!std::isfinite(pm) || std::abs(pm) < 1e-300) {
      throw NumericalError("solve_prices: degenerate fallback direction");
    }
    pi /= pm;
    out.used_fallback = true;
    residual = sup_residual(map, pi);
  }

  if ((pi.array() <= 0.0).any()) {
    throw NumericalError(
        "solve_prices: clearing prices are not strictly positive, min is " +
        std::to_string(pi.minCoeff()));
  }
  out.prices.pi = pi;
  out.fixed_point_residual = residual;
  out.converged = residual <= tol::kEigenSolve;
  if (!out.converged) {
    std::fprintf(stderr,
                 "solve_prices: fixed point residual %g above %g after %d "
                 "iterations\n",
                 residual, tol::kEigenSolve, out.iterations);
  }
  return out;
}

OutputMatrix priced_output(const PriceVector& prices, const Vec& q,
                           const Vec& r) {
  const int nc = static_cast<int>(r.size());
  const int np = static_cast<int>(q.size());
  if (prices.pi.size() != np) {
    throw ValidationError("priced_output: price/q size mismatch");
  }
  check_positive(prices.pi, "pi");
  check_unit_interval(q, "q");
  check_unit_interval(r, "r");

  OutputMatrix out;
  out.scale = 1.0;
  out.economy_ids = index_ids('c', nc);
  out.activity_ids = index_ids('p', np);
  out.row_param = r;
  out.col_param = q;
  out.values.resize(nc, np);
  for (int i = 0; i < nc; ++i) {
    for (int j = 0; j < np; ++j) {
      out.values(i, j) = prices.pi(j) * (1.0 - q(j) * (1.0 - r(i)));
    }
  }
  return out;
}

Vec activity_supply(const Vec& q, const Vec& r) {
  check_unit_interval(q, "q");
  check_unit_interval(r, "r");
  return static_cast<double>(r.size()) *
         (1.0 - q.array() * (1.0 - r.mean())).matrix();
}

EquilibriumResiduals equilibrium_residuals(const PreferenceMatrix& b,
                                           const PriceVector& prices,
                                           const Vec& q, const Vec& r,
                                           const ConsumptionMatrix& c) {
  const int nc = static_cast<int>(r.size());
  const int np = static_cast<int>(q.size());
  if (c.values.rows() != nc || c.values.cols() != np) {
    throw ValidationError("equilibrium_residuals: consumption shape mismatch");
  }
  const PriceMap map = build_price_map(b, q, r);

  const double pi_mean = prices.pi.mean();
  const double qpi_mean = (q.array() * prices.pi.array()).mean();

  EquilibriumResiduals out;

  const Vec spending = c.values * prices.pi;
  const Vec income =
      static_cast<double>(np) *
      (pi_mean + qpi_mean * (r.array() - 1.0)).matrix();
  out.budget_max = (spending - income).cwiseAbs().maxCoeff();

  const Vec consumed = c.values.colwise().sum().transpose();
  out.clearing_max = (consumed - map.d).cwiseAbs().maxCoeff();

  out.fixed_point = sup_residual(map, prices.pi);

  const Vec own_output =
      static_cast<double>(np) *
      (1.0 - q.mean() * (1.0 - r.array())).matrix();
  out.supply_identity_max =
      (c.values.rowwise().sum() - own_output).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace ecx
