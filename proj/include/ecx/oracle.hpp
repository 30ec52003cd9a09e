#pragma once

#include <optional>
#include <string>

#include "ecx/common.hpp"
#include "ecx/pipeline.hpp"

namespace ecx {

enum class ParityKind { even_even, odd_even, odd_odd };

// Closed-form case layout for linearly spaced parameters sorted the
// conventional way (rows by r descending, columns by q ascending).
struct ParityCase {
  ParityKind kind = ParityKind::even_even;
  int n_economies = 0;
  int n_activities = 0;
  std::optional<int> at_mean_row;  // middle economy when n_economies is odd
  std::optional<int> at_mean_col;  // middle activity when n_activities is odd

  static ParityCase from_dims(int n_economies, int n_activities);
};

enum class Center { mean, median };

// Quadrant specialization pattern: entry 1 iff
// (r_c - center(r)) * (q_p - center(q)) >= 0, so rows/columns at the center
// come out fully filled. Inputs are taken in caller order.
SpecializationMatrix oracle_mcp(const Vec& r, const Vec& q,
                                Center center = Center::mean);

// Closed-form economy projection for a parity case, exact rationals evaluated
// at the last step.
Mat oracle_mcc(const ParityCase& pc);

// Expected second-eigenvector sign pattern: +1 block, optional 0 middle,
// -1 block.
Vec oracle_eci(const ParityCase& pc);

// Exact rational economy-side projection of an arbitrary 0/1 matrix;
// independent ground truth for the floating-point pipeline.
Mat exact_projection_economies(const Mat& m01);

struct SeparableCheck {
  bool separable = false;
  double max_abs_deviation = 0.0;
};

// Runs the advantage ratios on Y = f g' and reports the largest deviation
// from 1. Separable output must show none beyond rounding.
SeparableCheck check_separable_rca(const Vec& f, const Vec& g,
                                   double tolerance = 1e-10);

// Sign condition for shifted output Y = B + f g': entry 1 iff
// (f_c - <f>) * (g_p - <g>) >= 0.
Mat shifted_condition(const Vec& f, const Vec& g);

}  // namespace ecx
