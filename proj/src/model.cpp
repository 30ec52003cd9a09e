#include "ecx/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ecx {

const char* generator_kind_name(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::linspace: return "linspace";
    case GeneratorKind::gaussian_minmax: return "gaussian-minmax";
    case GeneratorKind::mixed: return "mixed";
    case GeneratorKind::circulant: return "circulant";
    case GeneratorKind::block: return "block";
  }
  return "unknown";
}

std::optional<GeneratorKind> generator_kind_from_name(const std::string& name) {
  if (name == "linspace") return GeneratorKind::linspace;
  if (name == "gaussian-minmax" || name == "gaussian_minmax")
    return GeneratorKind::gaussian_minmax;
  if (name == "mixed") return GeneratorKind::mixed;
  if (name == "circulant") return GeneratorKind::circulant;
  if (name == "block") return GeneratorKind::block;
  return std::nullopt;
}

Vec gen_linspace(int n) {
  if (n < 2) throw ValidationError("gen_linspace: need n >= 2");
  Vec v(n);
  for (int i = 0; i < n; ++i) {
    v(i) = static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

Vec gen_gaussian_minmax(int n, Rng& rng) {
  if (n < 2) throw ValidationError("gen_gaussian_minmax: need n >= 2");
  Vec v(n);
  for (int attempt = 0; attempt < 64; ++attempt) {
    for (int i = 0; i < n; ++i) v(i) = rng.normal();
    const double lo = v.minCoeff();
    const double hi = v.maxCoeff();
    if (hi > lo) {
      return (v.array() - lo) / (hi - lo);
    }
    // all draws identical: keep drawing from the same stream (it has fresh
    // state by construction, so this terminates immediately in practice)
  }
  throw NumericalError("gen_gaussian_minmax: degenerate draws persisted");
}

std::vector<int> sort_permutation(const Vec& v, bool descending) {
  std::vector<int> perm(static_cast<std::size_t>(v.size()));
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
    return descending ? v(a) > v(b) : v(a) < v(b);
  });
  return perm;
}

namespace {

// alpha * base + (1 - alpha) * U(0,1) draws, one row per base entry.
Mat mixed_rows(const Vec& base, double alpha, int n_b, Rng& rng) {
  if (n_b < 1) throw ValidationError("mixing: need n_capabilities >= 1");
  if (alpha < 0.0 || alpha > 1.0) {
    throw ValidationError("mixing: alpha must lie in [0, 1]");
  }
  const int n = static_cast<int>(base.size());
  Mat m(n, n_b);
  for (int i = 0; i < n; ++i) {
    for (int b = 0; b < n_b; ++b) {
      if (alpha == 1.0) {
        m(i, b) = base(i);  // bit-exact reproduction of the base
      } else {
        m(i, b) = alpha * base(i) + (1.0 - alpha) * rng.uniform01();
      }
    }
  }
  return m;
}

struct SortedRows {
  Mat values;
  std::vector<std::string> ids;
};

SortedRows sort_rows_by_mean(const Mat& m, char prefix, bool descending) {
  Vec means = m.rowwise().mean();
  auto perm = sort_permutation(means, descending);
  Mat sorted(m.rows(), m.cols());
  std::vector<std::string> ids;
  ids.reserve(perm.size());
  for (int i = 0; i < m.rows(); ++i) {
    sorted.row(i) = m.row(perm[static_cast<std::size_t>(i)]);
    ids.push_back(prefix + std::to_string(perm[static_cast<std::size_t>(i)]));
  }
  return {std::move(sorted), std::move(ids)};
}

}  // namespace

EndowmentMatrix mix_endowments(const Vec& base, double alpha,
                               int n_capabilities, Rng& rng) {
  Mat m = mixed_rows(base, alpha, n_capabilities, rng);
  auto sorted = sort_rows_by_mean(m, 'c', /*descending=*/true);
  return {std::move(sorted.values), std::move(sorted.ids)};
}

RequirementMatrix mix_requirements(const Vec& base, double alpha,
                                   int n_capabilities, Rng& rng) {
  Mat m = mixed_rows(base, alpha, n_capabilities, rng);
  auto sorted = sort_rows_by_mean(m, 'p', /*descending=*/false);
  return {std::move(sorted.values), std::move(sorted.ids)};
}

Vec tent_profile(int n, int halfwidth) {
  if (n < 2) throw ValidationError("tent_profile: need n >= 2");
  if (halfwidth <= 0) halfwidth = n / 2;
  Vec p(n);
  const int center = n / 2;
  for (int j = 0; j < n; ++j) {
    int d = std::abs(j - center);
    d = std::min(d, n - d);  // circular distance
    p(j) = std::max(0.0, 1.0 - static_cast<double>(d) /
                               static_cast<double>(halfwidth));
  }
  return p;
}

Vec trapezoid_profile(int n, int plateau, int halfwidth) {
  if (n < 2) throw ValidationError("trapezoid_profile: need n >= 2");
  if (halfwidth <= 0) halfwidth = n / 2;
  if (plateau < 0 || plateau >= halfwidth) {
    throw ValidationError(
        "trapezoid_profile: need 0 <= plateau < halfwidth");
  }
  Vec p(n);
  const int center = n / 2;
  const double falloff = halfwidth - plateau;
  for (int j = 0; j < n; ++j) {
    int d = std::abs(j - center);
    d = std::min(d, n - d);  // circular distance
    p(j) = d <= plateau
               ? 1.0
               : std::max(0.0, 1.0 - static_cast<double>(d - plateau) /
                                         falloff);
  }
  return p;
}

namespace {

Mat circulant_core(int n, const Vec& profile, double alpha, Rng& rng) {
  const int n_b = static_cast<int>(profile.size());
  if (n < 1 || n_b < 2) throw ValidationError("circulant: bad dimensions");
  if (alpha < 0.0 || alpha > 1.0) {
    throw ValidationError("circulant: alpha must lie in [0, 1]");
  }
  for (int j = 0; j < n_b; ++j) {
    if (std::abs(profile(j) - profile((n_b - j) % n_b)) > 1e-12) {
      throw ValidationError("circulant: profile is not circularly symmetric");
    }
    if (profile(j) < 0.0 || profile(j) > 1.0) {
      throw ValidationError("circulant: profile values must lie in [0, 1]");
    }
  }
  Mat m(n, n_b);
  for (int i = 0; i < n; ++i) {
    // rotate by i, rescaled when the row count differs from the profile size
    const int shift = static_cast<int>(
        (static_cast<long long>(i) * n_b) / n);
    for (int j = 0; j < n_b; ++j) {
      const double structured = profile((j - shift + n_b) % n_b);
      m(i, j) = alpha == 1.0
                    ? structured
                    : alpha * structured + (1.0 - alpha) * rng.uniform01();
    }
  }
  return m;
}

}  // namespace

EndowmentMatrix gen_circulant_endowments(int n, const Vec& profile,
                                         double alpha, Rng& rng) {
  return {circulant_core(n, profile, alpha, rng), index_ids('c', n)};
}

RequirementMatrix gen_circulant_requirements(int n, const Vec& profile,
                                             double alpha, Rng& rng) {
  return {circulant_core(n, profile, alpha, rng), index_ids('p', n)};
}

int block_label(int i, int n, int k) {
  const int base = n / k;  // remainder rows fall into the last block
  return std::min(i / base, k - 1);
}

namespace {

Mat block_core(int n, int n_b, int k, double alpha, Rng& rng) {
  if (k < 1 || k > std::min(n, n_b)) {
    throw ValidationError("block: need 1 <= k <= min(n, n_capabilities)");
  }
  if (alpha < 0.0 || alpha > 1.0) {
    throw ValidationError("block: alpha must lie in [0, 1]");
  }
  Mat m(n, n_b);
  for (int i = 0; i < n; ++i) {
    const int gi = block_label(i, n, k);
    for (int b = 0; b < n_b; ++b) {
      const double structured = block_label(b, n_b, k) == gi ? 1.0 : 0.0;
      m(i, b) = alpha * structured + (1.0 - alpha) * rng.uniform01();
    }
  }
  return m;
}

}  // namespace

EndowmentMatrix gen_block_endowments(int n, int n_b, int k, double alpha,
                                     Rng& rng) {
  return {block_core(n, n_b, k, alpha, rng), index_ids('c', n)};
}

RequirementMatrix gen_block_requirements(int n, int n_b, int k, double alpha,
                                         Rng& rng) {
  return {block_core(n, n_b, k, alpha, rng), index_ids('p', n)};
}

namespace {

void check_unit_interval(const Vec& v, const char* what) {
  for (int i = 0; i < v.size(); ++i) {
    if (!(v(i) >= 0.0 && v(i) <= 1.0)) {
      throw ValidationError(std::string(what) +
                            ": values must lie in [0, 1]");
    }
  }
}

}  // namespace

OutputMatrix output_single(const Vec& r, const Vec& q, double scale) {
  if (r.size() < 1 || q.size() < 1) {
    throw ValidationError("output_single: empty parameter vector");
  }
  if (!(scale > 0.0)) throw ValidationError("output_single: scale must be > 0");
  check_unit_interval(r, "output_single r");
  check_unit_interval(q, "output_single q");

  auto pr = sort_permutation(r, /*descending=*/true);
  auto pq = sort_permutation(q, /*descending=*/false);
  const int nc = static_cast<int>(r.size());
  const int np = static_cast<int>(q.size());

  OutputMatrix out;
  out.scale = scale;
  out.values.resize(nc, np);
  out.row_param.resize(nc);
  out.col_param.resize(np);
  out.economy_ids.reserve(static_cast<std::size_t>(nc));
  out.activity_ids.reserve(static_cast<std::size_t>(np));
  for (int i = 0; i < nc; ++i) {
    out.row_param(i) = r(pr[static_cast<std::size_t>(i)]);
    out.economy_ids.push_back('c' + std::to_string(pr[static_cast<std::size_t>(i)]));
  }
  for (int j = 0; j < np; ++j) {
    out.col_param(j) = q(pq[static_cast<std::size_t>(j)]);
    out.activity_ids.push_back('p' + std::to_string(pq[static_cast<std::size_t>(j)]));
  }
  for (int i = 0; i < nc; ++i) {
    const double one_minus_r = 1.0 - out.row_param(i);
    for (int j = 0; j < np; ++j) {
      out.values(i, j) = scale * (1.0 - out.col_param(j) * one_minus_r);
    }
  }
  return out;
}

OutputMatrix output_multi(const EndowmentMatrix& r, const RequirementMatrix& q,
                          double scale) {
  if (r.values.cols() != q.values.cols()) {
    throw ValidationError(
        "output_multi: endowment and requirement capability counts differ");
  }
  if (r.values.rows() < 1 || q.values.rows() < 1 || r.values.cols() < 1) {
    throw ValidationError("output_multi: empty input");
  }
  if (!(scale > 0.0)) throw ValidationError("output_multi: scale must be > 0");
  for (int i = 0; i < r.values.rows(); ++i) {
    for (int b = 0; b < r.values.cols(); ++b) {
      if (!(r.values(i, b) >= 0.0 && r.values(i, b) <= 1.0)) {
        throw ValidationError("output_multi: endowments must lie in [0, 1]");
      }
    }
  }
  for (int i = 0; i < q.values.rows(); ++i) {
    for (int b = 0; b < q.values.cols(); ++b) {
      if (!(q.values(i, b) >= 0.0 && q.values(i, b) <= 1.0)) {
        throw ValidationError("output_multi: requirements must lie in [0, 1]");
      }
    }
  }

  const int nc = static_cast<int>(r.values.rows());
  const int np = static_cast<int>(q.values.rows());
  const int nb = static_cast<int>(r.values.cols());

  OutputMatrix out;
  out.scale = scale;
  out.economy_ids = r.economy_ids.empty() ? index_ids('c', nc) : r.economy_ids;
  out.activity_ids = q.activity_ids.empty() ? index_ids('p', np) : q.activity_ids;
  out.row_param = r.values.rowwise().mean();
  out.col_param = q.values.rowwise().mean();
  out.values = Mat::Constant(nc, np, scale);
  for (int b = 0; b < nb; ++b) {
    // Y <- Y .* (1 - (1 - r_b) q_b') accumulated over capabilities
    Vec one_minus_r = 1.0 - r.values.col(b).array();
    Vec qb = q.values.col(b);
    out.values.array() *= (1.0 - (one_minus_r * qb.transpose()).array());
  }
  return out;
}

OutputMatrix output_shifted(const FactorVectors& fv) {
  if (fv.f.size() < 1 || fv.g.size() < 1) {
    throw ValidationError("output_shifted: empty factor vector");
  }
  OutputMatrix out;
  out.scale = 1.0;
  out.economy_ids = index_ids('c', static_cast<int>(fv.f.size()));
  out.activity_ids = index_ids('p', static_cast<int>(fv.g.size()));
  out.row_param = fv.f;
  out.col_param = fv.g;
  out.values = (fv.f * fv.g.transpose()).array() + fv.shift;
  if ((out.values.array() < 0.0).any()) {
    throw ValidationError("output_shifted: negative output entry");
  }
  return out;
}

}  // namespace ecx
