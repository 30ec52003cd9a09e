#pragma once

#include <string>
#include <vector>

#include "ecx/common.hpp"
#include "ecx/model.hpp"
#include "ecx/pipeline.hpp"

namespace ecx {

// Prices normalized so their mean is 1.
struct PriceVector {
  Vec pi;
};

// Taste weights, economies x activities, strictly positive.
struct PreferenceMatrix {
  Mat values;
};

struct ConsumptionMatrix {
  Mat values;  // economies x activities, physical quantities
};

struct WageResult {
  Vec wages;      // w*_c = N_p (<pi> + <q pi> (r_c - 1)) / L_c
  Vec slope;      // d w*_c / d r_c = N_p <q pi> / L_c
  Vec income;     // w*_c L_c
};

// Market-clearing wages for given prices; labor must be strictly positive.
WageResult equilibrium_wages(const PriceVector& prices, const Vec& q,
                             const Vec& r, const Vec& labor);

// One relaxation step w <- w - eta*dt*(w - w_star). Warns (via stderr) when
// eta*dt >= 1, where the plain recurrence stops contracting.
Vec wage_relaxation_step(const Vec& w, const Vec& w_star, double eta,
                         double dt);

struct PricedSpecialization {
  SpecializationMatrix m;   // entry 1 iff (r_c - <r>)(q_p <pi> - <q pi>) >= 0
  double threshold;         // <q> + cov(q, pi) / <pi>
};

PricedSpecialization priced_specialization(const Vec& r, const Vec& q,
                                           const PriceVector& prices);

// Log-utility demand: C_cp = B_cp (<pi> - (1 - r_c) <q pi>) / (pi_p <B_c>).
ConsumptionMatrix consumption(const PreferenceMatrix& b,
                              const PriceVector& prices, const Vec& q,
                              const Vec& r);

struct PriceSolve {
  PriceVector prices;
  int iterations = 0;
  bool converged = false;
  bool used_fallback = false;
  double fixed_point_residual = 0.0;  // sup |pi - map(pi)|
};

// Clearing prices as the eigenvalue-1 fixed point of the linear price map,
// by power iteration with per-step mean normalization; falls back to a dense
// solve of the rank-two reduced system when iteration stalls. Requires
// 1 - q_p (1 - <r>) > 0 for every activity. An empty init means all-ones.
PriceSolve solve_prices(const PreferenceMatrix& b, const Vec& q, const Vec& r,
                        const Vec& init = Vec());

// Y_cp = pi_p (1 - q_p (1 - r_c)), in caller order.
OutputMatrix priced_output(const PriceVector& prices, const Vec& q,
                           const Vec& r);

// Physical supply per activity, y_p = N_c (1 - q_p (1 - <r>)).
Vec activity_supply(const Vec& q, const Vec& r);

// Diagnostics reported (not enforced) for a solved scenario.
struct EquilibriumResiduals {
  double budget_max = 0.0;        // max_c |sum_p pi_p C_cp - income_c|
  double clearing_max = 0.0;      // max_p |sum_c C_cp - y_p|
  double fixed_point = 0.0;       // price map residual
  double supply_identity_max = 0.0;  // max_c |sum_p C_cp - y_c|, reported only
};

EquilibriumResiduals equilibrium_residuals(const PreferenceMatrix& b,
                                           const PriceVector& prices,
                                           const Vec& q, const Vec& r,
                                           const ConsumptionMatrix& c);

}  // namespace ecx
