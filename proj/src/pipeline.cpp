#include "ecx/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numeric>

namespace ecx {

RcaMatrix rca(const OutputMatrix& y) {
  const Mat& v = y.values;
  if (v.rows() < 1 || v.cols() < 1) throw ValidationError("rca: empty output");
  if ((v.array() < 0.0).any()) throw ValidationError("rca: negative output");

  Vec row_sum = v.rowwise().sum();
  Vec col_sum = v.colwise().sum();
  const double total = row_sum.sum();
  if (total <= 0.0) throw ValidationError("rca: all-zero output matrix");

  RcaMatrix out;
  out.economy_ids = y.economy_ids;
  out.activity_ids = y.activity_ids;
  out.values.resize(v.rows(), v.cols());
  for (int i = 0; i < v.rows(); ++i) {
    if (row_sum(i) == 0.0) out.undefined_rows.push_back(i);
  }
  for (int j = 0; j < v.cols(); ++j) {
    if (col_sum(j) == 0.0) out.undefined_cols.push_back(j);
  }
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < v.rows(); ++i) {
    for (int j = 0; j < v.cols(); ++j) {
      if (row_sum(i) == 0.0 || col_sum(j) == 0.0) {
        out.values(i, j) = nan;
      } else {
        out.values(i, j) = v(i, j) * total / (row_sum(i) * col_sum(j));
      }
    }
  }
  return out;
}

RcaMatrix drop_undefined(const RcaMatrix& r) {
  if (r.undefined_rows.empty() && r.undefined_cols.empty()) return r;

  std::vector<int> keep_rows;
  std::vector<int> keep_cols;
  for (int i = 0; i < r.values.rows(); ++i) {
    if (!std::binary_search(r.undefined_rows.begin(), r.undefined_rows.end(), i))
      keep_rows.push_back(i);
  }
  for (int j = 0; j < r.values.cols(); ++j) {
    if (!std::binary_search(r.undefined_cols.begin(), r.undefined_cols.end(), j))
      keep_cols.push_back(j);
  }
  if (keep_rows.empty() || keep_cols.empty()) {
    throw ValidationError("drop_undefined: nothing left after dropping");
  }
  RcaMatrix out;
  out.values.resize(static_cast<int>(keep_rows.size()),
                    static_cast<int>(keep_cols.size()));
  for (std::size_t i = 0; i < keep_rows.size(); ++i) {
    out.economy_ids.push_back(r.economy_ids[static_cast<std::size_t>(keep_rows[i])]);
    for (std::size_t j = 0; j < keep_cols.size(); ++j) {
      out.values(static_cast<int>(i), static_cast<int>(j)) =
          r.values(keep_rows[i], keep_cols[j]);
    }
  }
  for (int j : keep_cols) out.activity_ids.push_back(r.activity_ids[static_cast<std::size_t>(j)]);
  std::cerr << "note: dropped " << r.undefined_rows.size() << " undefined rows, "
            << r.undefined_cols.size() << " undefined columns before binarizing\n";
  return out;
}

SpecializationMatrix binarize(const RcaMatrix& r) {
  if (!r.undefined_rows.empty() || !r.undefined_cols.empty()) {
    throw ValidationError(
        "binarize: RCA has undefined rows/columns; drop them first");
  }
  SpecializationMatrix m;
  m.economy_ids = r.economy_ids;
  m.activity_ids = r.activity_ids;
  m.values.resize(r.values.rows(), r.values.cols());
  for (int i = 0; i < r.values.rows(); ++i) {
    for (int j = 0; j < r.values.cols(); ++j) {
      m.values(i, j) = r.values(i, j) >= 1.0 - tol::kBinarizeTie ? 1.0 : 0.0;
    }
  }
  m.diversity = m.values.rowwise().sum();
  m.ubiquity = m.values.colwise().sum();
  return m;
}

namespace {

struct CleanedSpec {
  Mat m;
  Vec diversity;
  Vec ubiquity;
  std::vector<int> kept_rows;
  std::vector<int> kept_cols;
  std::vector<std::string> row_ids;
  std::vector<std::string> col_ids;
  std::vector<std::string> dropped_row_ids;
  std::vector<std::string> dropped_col_ids;
};

CleanedSpec clean_specialization(const SpecializationMatrix& m) {
  CleanedSpec c;
  for (int i = 0; i < m.values.rows(); ++i) {
    if (m.diversity(i) > 0.0) {
      c.kept_rows.push_back(i);
      c.row_ids.push_back(m.economy_ids.empty() ? "c" + std::to_string(i)
                                                : m.economy_ids[static_cast<std::size_t>(i)]);
    } else {
      c.dropped_row_ids.push_back(m.economy_ids.empty()
                                      ? "c" + std::to_string(i)
                                      : m.economy_ids[static_cast<std::size_t>(i)]);
    }
  }
  for (int j = 0; j < m.values.cols(); ++j) {
    if (m.ubiquity(j) > 0.0) {
      c.kept_cols.push_back(j);
      c.col_ids.push_back(m.activity_ids.empty() ? "p" + std::to_string(j)
                                                 : m.activity_ids[static_cast<std::size_t>(j)]);
    } else {
      c.dropped_col_ids.push_back(m.activity_ids.empty()
                                      ? "p" + std::to_string(j)
                                      : m.activity_ids[static_cast<std::size_t>(j)]);
    }
  }
  if (c.kept_rows.empty() || c.kept_cols.empty()) {
    throw ValidationError("projection: specialization matrix is all zeros");
  }
  if (!c.dropped_row_ids.empty() || !c.dropped_col_ids.empty()) {
    std::cerr << "note: projection dropped " << c.dropped_row_ids.size()
              << " zero-diversity rows and " << c.dropped_col_ids.size()
              << " zero-ubiquity columns\n";
  }
  c.m.resize(static_cast<int>(c.kept_rows.size()),
             static_cast<int>(c.kept_cols.size()));
  for (std::size_t i = 0; i < c.kept_rows.size(); ++i) {
    for (std::size_t j = 0; j < c.kept_cols.size(); ++j) {
      c.m(static_cast<int>(i), static_cast<int>(j)) =
          m.values(c.kept_rows[i], c.kept_cols[j]);
    }
  }
  c.diversity = c.m.rowwise().sum();
  c.ubiquity = c.m.colwise().sum();
  return c;
}

void check_row_stochastic(const Mat& p, const char* what) {
  for (int i = 0; i < p.rows(); ++i) {
    if (std::abs(p.row(i).sum() - 1.0) > tol::kRowStochastic) {
      throw NumericalError(std::string(what) +
                           ": projection row does not sum to 1");
    }
  }
}

}  // namespace

ProjectionMatrix project_economies(const SpecializationMatrix& m) {
  CleanedSpec c = clean_specialization(m);
  // D_c^-1 M D_p^-1 M'
  Mat mu = c.m.array().rowwise() / c.ubiquity.transpose().array();
  Mat p = (c.m * mu.transpose()).array().colwise() / c.diversity.array();
  check_row_stochastic(p, "project_economies");

  ProjectionMatrix out;
  out.side = ProjectionSide::economies;
  out.orientation_seed = p * c.diversity;  // diversity seed, even reflection
  out.values = std::move(p);
  out.kept = std::move(c.kept_rows);
  out.ids = std::move(c.row_ids);
  out.dropped_ids = std::move(c.dropped_row_ids);
  return out;
}

ProjectionMatrix project_activities(const SpecializationMatrix& m) {
  CleanedSpec c = clean_specialization(m);
  // D_p^-1 M' D_c^-1 M
  Mat md = c.m.array().colwise() / c.diversity.array();
  Mat p = (c.m.transpose() * md).array().colwise() / c.ubiquity.array();
  check_row_stochastic(p, "project_activities");

  ProjectionMatrix out;
  out.side = ProjectionSide::activities;
  // mean producer diversity: the diversity seed reflected once onto activities
  out.orientation_seed =
      (c.m.transpose() * c.diversity).array() / c.ubiquity.array();
  out.values = std::move(p);
  out.kept = std::move(c.kept_cols);
  out.ids = std::move(c.col_ids);
  out.dropped_ids = std::move(c.dropped_col_ids);
  return out;
}

namespace {

// Left Perron vector of a row-stochastic matrix, normalized to sum 1.
Vec left_stationary(const Mat& p, bool* ok) {
  const int n = static_cast<int>(p.rows());
  Vec phi = Vec::Constant(n, 1.0 / n);
  *ok = false;
  for (int it = 0; it < tol::kMaxEigenIters; ++it) {
    Vec next = p.transpose() * phi;
    const double s = next.sum();
    if (!(s > 0.0)) return phi;
    next /= s;
    const double err = (next - phi).cwiseAbs().maxCoeff();
    phi = next;
    if (err < 1e-13) {
      *ok = true;
      break;
    }
  }
  return phi;
}

void apply_sign_anchor(Vec& v, const Vec& seed, ComplexityResult& res) {
  double corr = 0.0;
  const double sv = stddev_of(v);
  if (seed.size() == v.size()) {
    // A seed that is constant up to rounding has no usable direction; its
    // normalized correlation would be pure noise of magnitude up to 1.
    const double sa = stddev_of(seed);
    if (sv > 0.0 && sa > 1e-12 * (1.0 + std::abs(mean_of(seed)))) {
      corr = covariance_of(v, seed) / (sv * sa);
    }
  }
  if (corr > 1e-9) {
    res.sign_anchor = "diversity-seeded correlation positive, kept";
  } else if (corr < -1e-9) {
    v = -v;
    res.sign_anchor = "diversity-seeded correlation negative, flipped";
  } else {
    // tie: make the first clearly nonzero component positive
    const double scale = v.cwiseAbs().maxCoeff();
    for (int i = 0; i < v.size(); ++i) {
      if (std::abs(v(i)) > 1e-9 * scale) {
        if (v(i) < 0.0) v = -v;
        break;
      }
    }
    res.sign_anchor = "tie: first nonzero component made positive";
  }
}

ComplexityResult eci_dense(const ProjectionMatrix& p) {
  ComplexityResult res;
  res.method = ComplexityMethod::eigen;
  res.ids = p.ids;
  const int n = static_cast<int>(p.values.rows());

  Eigen::EigenSolver<Mat> es(p.values, /*computeEigenvectors=*/true);
  if (es.info() != Eigen::Success) {
    throw NumericalError("eci_eigen: dense eigensolver failed");
  }
  Eigen::VectorXcd vals = es.eigenvalues();
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (vals(a).real() != vals(b).real()) return vals(a).real() > vals(b).real();
    return std::abs(vals(a).imag()) < std::abs(vals(b).imag());
  });

  res.eigenvalues.resize(n);
  for (int i = 0; i < n; ++i) res.eigenvalues(i) = vals(order[static_cast<std::size_t>(i)]).real();

  const double top = res.eigenvalues(0);
  std::vector<int> top_group;
  for (int i = 0; i < n; ++i) {
    if (top - res.eigenvalues(i) < tol::kEigenDegenerate) {
      top_group.push_back(order[static_cast<std::size_t>(i)]);
    }
  }

  Vec v;
  if (top_group.size() >= 2) {
    // Degenerate top eigenspace: take the direction orthogonal to all-ones.
    res.degenerate = true;
    res.lambda2 = top;
    Mat basis(n, static_cast<int>(top_group.size()));
    const Eigen::MatrixXcd evecs = es.eigenvectors();  // col() must not bind a temporary
    for (std::size_t k = 0; k < top_group.size(); ++k) {
      const Eigen::VectorXcd col = evecs.col(top_group[k]);
      if (col.imag().cwiseAbs().maxCoeff() >
          tol::kComplexPart * (std::abs(top) + 1.0)) {
        throw NumericalError(
            "eci_eigen: complex eigenvector in degenerate top eigenspace");
      }
      basis.col(static_cast<int>(k)) = col.real();
    }
    double best_norm = -1.0;
    for (int k = 0; k < basis.cols(); ++k) {
      Vec w = basis.col(k);
      w.array() -= w.mean();  // remove the all-ones component
      const double nw = w.norm();
      if (nw > best_norm) {
        best_norm = nw;
        v = w;
      }
    }
    if (best_norm < 1e-12) {
      throw NumericalError(
          "eci_eigen: degenerate top eigenspace has no direction orthogonal "
          "to the all-ones vector");
    }
    res.notes.push_back("top eigenvalue degenerate; used in-eigenspace "
                        "direction orthogonal to the all-ones vector");
  } else {
    if (n < 2) throw ValidationError("eci_eigen: need at least 2 rows");
    const auto l2 = vals(order[1]);
    res.lambda2 = l2.real();
    if (std::abs(l2.imag()) > tol::kComplexPart * std::abs(l2)) {
      throw NumericalError(
          "eci_eigen: second eigenvalue is materially complex (re=" +
          std::to_string(l2.real()) + ", im=" + std::to_string(l2.imag()) + ")");
    }
    v = es.eigenvectors().col(order[1]).real();
  }
  v.normalize();
  apply_sign_anchor(v, p.orientation_seed, res);
  res.raw = v;
  bool collapsed = false;
  res.z = zscore(v, &collapsed);
  if (collapsed) res.notes.push_back("score vector has zero variance");

  bool phi_ok = false;
  Vec phi = left_stationary(p.values, &phi_ok);
  res.ortho_residual = std::abs(phi.dot(res.raw));
  if (!phi_ok) res.notes.push_back("stationary weights did not converge");
  res.converged = true;
  return res;
}

ComplexityResult eci_power(const ProjectionMatrix& p) {
  ComplexityResult res;
  res.method = ComplexityMethod::eigen;
  res.ids = p.ids;
  const int n = static_cast<int>(p.values.rows());

  bool phi_ok = false;
  Vec phi = left_stationary(p.values, &phi_ok);
  if (!phi_ok) {
    throw NumericalError("eci_eigen: stationary weights did not converge");
  }

  // Seed with the orientation reference (or a ramp) minus its ones-component.
  Vec v;
  if (p.orientation_seed.size() == n && stddev_of(p.orientation_seed) > 0.0) {
    v = p.orientation_seed;
  } else {
    v.resize(n);
    for (int i = 0; i < n; ++i) v(i) = static_cast<double>(i);
  }
  v.array() -= phi.dot(v);  // deflate the all-ones right eigenvector
  if (v.norm() < 1e-300) v(0) += 1.0;
  v.normalize();

  double lambda = 0.0;
  bool converged = false;
  for (int it = 0; it < tol::kMaxEigenIters; ++it) {
    Vec w = p.values * v;
    w.array() -= phi.dot(w);
    const double nw = w.norm();
    if (nw < 1e-300) {
      throw NumericalError("eci_eigen: power iteration collapsed to zero");
    }
    lambda = v.dot(w);
    w /= nw;
    const double err = std::min((w - v).cwiseAbs().maxCoeff(),
                                (w + v).cwiseAbs().maxCoeff());
    v = w;
    if (err < tol::kEigenSolve) {
      converged = true;
      res.eigenvalues = Vec(2);
      res.eigenvalues << 1.0, lambda;
      break;
    }
  }
  if (!converged) {
    throw NumericalError(
        "eci_eigen: power iteration did not converge (possible complex pair)");
  }
  res.lambda2 = lambda;
  if (std::abs(1.0 - lambda) < tol::kEigenDegenerate) {
    res.degenerate = true;
    res.notes.push_back("second eigenvalue within degeneracy tolerance of 1");
  }
  apply_sign_anchor(v, p.orientation_seed, res);
  res.raw = v;
  bool collapsed = false;
  res.z = zscore(v, &collapsed);
  if (collapsed) res.notes.push_back("score vector has zero variance");
  res.ortho_residual = std::abs(phi.dot(res.raw));
  res.converged = true;
  return res;
}

}  // namespace

ComplexityResult eci_eigen(const ProjectionMatrix& p) {
  if (p.values.rows() != p.values.cols() || p.values.rows() < 2) {
    throw ValidationError("eci_eigen: projection must be square, n >= 2");
  }
  check_row_stochastic(p.values, "eci_eigen");
  return p.values.rows() <= 512 ? eci_dense(p) : eci_power(p);
}

ComplexityResult eci_reflections(const SpecializationMatrix& m,
                                 int iterations) {
  if (iterations < 2 || iterations % 2 != 0) {
    throw ValidationError("eci_reflections: iterations must be even and >= 2");
  }
  CleanedSpec c = clean_specialization(m);
  const int nc = static_cast<int>(c.m.rows());

  ComplexityResult res;
  res.method = ComplexityMethod::reflections;
  res.sign_anchor = "diversity seed, scores read at an even iteration";
  res.ids = c.row_ids;

  // Deterministic fallback when an iterate loses all variance. The ramp
  // follows the descending-r row convention, so the recovered direction keeps
  // the diversity-rooted orientation.
  Vec ramp_c(nc);
  for (int i = 0; i < nc; ++i) ramp_c(i) = static_cast<double>(-i);

  bool reseeded = false;
  bool dead = false;
  auto rescale = [&](Vec v) {
    bool collapsed = false;
    Vec z = zscore(v, &collapsed);
    if (!collapsed) return z;
    if (!reseeded) {
      reseeded = true;
      return zscore(ramp_c);
    }
    dead = true;
    return Vec(Vec::Zero(v.size()));
  };

  // Scores at even depth depend on the diversity seed only; each round below
  // is one full reciprocal update (two half-reflections through activities).
  Vec x = rescale(c.diversity);
  Vec x_raw = c.diversity;
  const int rounds = iterations / 2;
  for (int t = 0; t < rounds && !dead; ++t) {
    Vec u = (c.m.transpose() * x).array() / c.ubiquity.array();
    Vec y = (c.m * u).array() / c.diversity.array();
    x_raw = y;
    Vec x_next = rescale(std::move(y));
    if (dead) break;
    if ((x_next - x).cwiseAbs().maxCoeff() < 1e-12) {
      x = std::move(x_next);
      res.converged = true;
      break;
    }
    x = std::move(x_next);
    res.converged = false;
  }
  if (reseeded) {
    res.notes.push_back("collapsed iterate reseeded with the index ramp");
  }
  if (dead) {
    res.degenerate = true;
    res.converged = false;
    res.notes.push_back("iterates lost all variance; no separation exists");
    res.raw = Vec::Zero(nc);
    res.z = Vec::Zero(nc);
    return res;
  }
  if (!res.converged) {
    std::cerr << "warning: eci_reflections did not converge in " << iterations
              << " iterations; returning last iterate\n";
    res.notes.push_back("iteration budget exhausted before convergence");
  }
  res.raw = x_raw;
  res.z = x;
  return res;
}

Vec average_ranks(const Vec& v) {
  const int n = static_cast<int>(v.size());
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return v(a) < v(b); });
  Vec ranks(n);
  int i = 0;
  while (i < n) {
    int j = i;
    while (j + 1 < n && v(order[static_cast<std::size_t>(j + 1)]) ==
                            v(order[static_cast<std::size_t>(i)])) {
      ++j;
    }
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (int k = i; k <= j; ++k) ranks(order[static_cast<std::size_t>(k)]) = avg;
    i = j + 1;
  }
  return ranks;
}

std::optional<double> spearman(const Vec& x, const Vec& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw ValidationError("spearman: size mismatch or too short");
  }
  Vec rx = average_ranks(x);
  Vec ry = average_ranks(y);
  const double sx = stddev_of(rx);
  const double sy = stddev_of(ry);
  if (sx == 0.0 || sy == 0.0) return std::nullopt;
  // identical (or exactly reversed) rank vectors are +-1 by definition; the
  // float formula would miss exactness by an ulp
  const double n1 = static_cast<double>(x.size()) + 1.0;
  bool same = true;
  bool reversed = true;
  for (int i = 0; i < rx.size(); ++i) {
    if (rx(i) != ry(i)) same = false;
    if (rx(i) != n1 - ry(i)) reversed = false;
  }
  if (same) return 1.0;
  if (reversed) return -1.0;
  return std::clamp(covariance_of(rx, ry) / (sx * sy), -1.0, 1.0);
}

}  // namespace ecx
