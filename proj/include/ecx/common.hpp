#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace ecx {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Malformed input or contract violation. Maps to CLI exit code 1.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Solver failure (non-convergence, unusable spectrum, negative iterates).
// Maps to CLI exit code 2.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace tol {

// Projection rows must sum to 1 within this bound.
inline constexpr double kRowStochastic = 1e-12;

// |R - 1| band treated as a tie at 1 when binarizing. Ties generated by the
// closed-form models sit at 1 up to accumulated rounding, which is orders of
// magnitude below this band; genuine off-tie values sit far above it.
inline constexpr double kBinarizeTie = 1e-9;

// Relative half-width for detecting parameters exactly at their mean.
inline constexpr double kAtMean = 1e-12;

// Top-eigenvalue gap below which the top eigenspace is treated as degenerate.
inline constexpr double kEigenDegenerate = 1e-9;

// Direction tolerance for iterative eigensolvers.
inline constexpr double kEigenSolve = 1e-10;

// Reject a second eigenvalue whose imaginary part exceeds this relative bound.
inline constexpr double kComplexPart = 1e-8;

inline constexpr int kMaxEigenIters = 10000;

// Price solver: sup-norm tolerance on the normalized iterate.
inline constexpr double kPriceSupNorm = 1e-12;
inline constexpr int kMaxPriceIters = 10000;

}  // namespace tol

// "c0", "c1", ... / "p0", "p1", ...
std::vector<std::string> index_ids(char prefix, int n);

double mean_of(const Vec& v);
// Population standard deviation.
double stddev_of(const Vec& v);
// Population covariance.
double covariance_of(const Vec& a, const Vec& b);

// (v - mean) / population std. Sets *collapsed when the variance is too small
// to rescale; the returned vector is then all zeros.
Vec zscore(const Vec& v, bool* collapsed = nullptr);

}  // namespace ecx
