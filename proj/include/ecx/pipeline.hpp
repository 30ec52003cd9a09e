#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ecx/common.hpp"
#include "ecx/model.hpp"

namespace ecx {

// Revealed-advantage ratios. Rows/columns with zero output marginals are
// undefined: their entries are NaN and their indices recorded.
struct RcaMatrix {
  Mat values;
  std::vector<std::string> economy_ids;
  std::vector<std::string> activity_ids;
  std::vector<int> undefined_rows;
  std::vector<int> undefined_cols;
};

// 0/1 specialization matrix plus its marginals.
struct SpecializationMatrix {
  Mat values;  // exact 0.0 / 1.0
  Vec diversity;
  Vec ubiquity;
  std::vector<std::string> economy_ids;
  std::vector<std::string> activity_ids;
};

enum class ProjectionSide { economies, activities };

// Row-stochastic similarity projection of a specialization matrix.
//
// orientation_seed is the diversity-rooted reference direction used to fix
// the sign of the second eigenvector: for the economy side it is P * diversity
// (the even reflection of the diversity seed), for the activity side the mean
// producer diversity. kept maps rows of `values` back to rows/columns of the
// specialization matrix they came from.
struct ProjectionMatrix {
  Mat values;
  ProjectionSide side = ProjectionSide::economies;
  Vec orientation_seed;
  std::vector<int> kept;
  std::vector<std::string> ids;
  std::vector<std::string> dropped_ids;
};

enum class ComplexityMethod { eigen, reflections };

struct ComplexityResult {
  Vec raw;          // unit-norm eigenvector (or final iterate), sign-anchored
  Vec z;            // z-scored scores
  Vec eigenvalues;  // real parts, descending (iterative paths: {lambda1, lambda2})
  double lambda2 = 0.0;
  bool degenerate = false;
  bool converged = true;
  double ortho_residual = 0.0;  // |phi' raw| against the stationary weights
  ComplexityMethod method = ComplexityMethod::eigen;
  std::string sign_anchor;  // which orientation rule fired
  std::vector<std::string> notes;
  std::vector<std::string> ids;
};

RcaMatrix rca(const OutputMatrix& y);

// Removes undefined rows/columns; no-op when none are flagged.
RcaMatrix drop_undefined(const RcaMatrix& r);

// M_cp = 1 iff R_cp >= 1, where values within tol::kBinarizeTie of 1 count as
// ties at 1 (specialized). Requires a fully defined RCA matrix.
SpecializationMatrix binarize(const RcaMatrix& r);

// Economy-side projection D_c^-1 M D_p^-1 M'. Zero-diversity rows and
// zero-ubiquity columns are dropped with a warning before projecting.
ProjectionMatrix project_economies(const SpecializationMatrix& m);

// Activity-side projection D_p^-1 M' D_c^-1 M.
ProjectionMatrix project_activities(const SpecializationMatrix& m);

// Scores from the second eigenvector of the projection. Dense solve up to 512
// rows, deflated power iteration above. A top eigenvalue gap below
// tol::kEigenDegenerate switches to the top-eigenspace direction orthogonal
// to the all-ones vector, flagged degenerate.
ComplexityResult eci_eigen(const ProjectionMatrix& p);

// Reciprocal-averaging scores: each round reflects the economy scores through
// the activity side and back (one round = two averaging passes), z-scoring the
// result, seeded with diversity. `iterations` must be even and >= 2; rounds =
// iterations / 2. A collapsed iterate is reseeded once with a deterministic
// index ramp; a second collapse flags the result degenerate.
ComplexityResult eci_reflections(const SpecializationMatrix& m, int iterations);

// Ranks with ties sharing their average rank (1-based).
Vec average_ranks(const Vec& v);

// Rank correlation with average-rank ties; nullopt when either rank vector
// has zero variance.
std::optional<double> spearman(const Vec& x, const Vec& y);

}  // namespace ecx
