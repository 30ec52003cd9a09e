#include "ecx/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "ecx/model.hpp"

namespace ecx {

namespace {

// Exact rational arithmetic; intermediates go through 128-bit so the
// projection sums (denominators are lcms of small marginals) cannot
// silently wrap.
struct Rat {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rat() = default;
  Rat(std::int64_t n, std::int64_t d) { assign(n, d); }

  static std::int64_t narrow(__int128 v) {
    if (v > static_cast<__int128>(INT64_MAX) ||
        v < static_cast<__int128>(INT64_MIN)) {
      throw NumericalError("rational overflow");
    }
    return static_cast<std::int64_t>(v);
  }

  void assign(__int128 n, __int128 d) {
    if (d == 0) throw NumericalError("rational division by zero");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 a = n < 0 ? -n : n;
    __int128 b = d;
    while (b != 0) {
      const __int128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) {
      n /= a;
      d /= a;
    }
    if (n == 0) d = 1;
    num = narrow(n);
    den = narrow(d);
  }

  Rat operator+(const Rat& o) const {
    Rat r;
    r.assign(static_cast<__int128>(num) * o.den +
                 static_cast<__int128>(o.num) * den,
             static_cast<__int128>(den) * o.den);
    return r;
  }
  Rat operator*(const Rat& o) const {
    Rat r;
    r.assign(static_cast<__int128>(num) * o.num,
             static_cast<__int128>(den) * o.den);
    return r;
  }
  double value() const {
    return static_cast<double>(num) / static_cast<double>(den);
  }
};

double center_of(const Vec& v, Center center) {
  if (center == Center::mean) return v.mean();
  Vec s = v;
  std::sort(s.data(), s.data() + s.size());
  const int n = static_cast<int>(s.size());
  return n % 2 == 1 ? s(n / 2) : 0.5 * (s(n / 2 - 1) + s(n / 2));
}

// Signed position of x against the center: -1 below, 0 at the center (within
// the relative at-mean band), +1 above.
int side_of(double x, double center) {
  const double band = tol::kAtMean * std::max(1.0, std::abs(center));
  if (std::abs(x - center) <= band) return 0;
  return x < center ? -1 : 1;
}

}  // namespace

ParityCase ParityCase::from_dims(int n_economies, int n_activities) {
  if (n_economies < 2 || n_activities < 2) {
    throw ValidationError("ParityCase: need at least 2x2");
  }
  ParityCase pc;
  pc.n_economies = n_economies;
  pc.n_activities = n_activities;
  const bool odd_c = n_economies % 2 == 1;
  const bool odd_p = n_activities % 2 == 1;
  if (odd_c) pc.at_mean_row = (n_economies - 1) / 2;
  if (odd_p) pc.at_mean_col = (n_activities - 1) / 2;
  if (odd_c && odd_p) {
    pc.kind = ParityKind::odd_odd;
  } else if (!odd_c && !odd_p) {
    pc.kind = ParityKind::even_even;
  } else {
    pc.kind = ParityKind::odd_even;
  }
  return pc;
}

SpecializationMatrix oracle_mcp(const Vec& r, const Vec& q, Center center) {
  if (r.size() < 2 || q.size() < 2) {
    throw ValidationError("oracle_mcp: need at least 2x2");
  }
  const double cr = center_of(r, center);
  const double cq = center_of(q, center);

  SpecializationMatrix m;
  m.economy_ids = index_ids('c', static_cast<int>(r.size()));
  m.activity_ids = index_ids('p', static_cast<int>(q.size()));
  m.values.resize(r.size(), q.size());
  for (int i = 0; i < r.size(); ++i) {
    const int si = side_of(r(i), cr);
    for (int j = 0; j < q.size(); ++j) {
      const int sj = side_of(q(j), cq);
      m.values(i, j) = si * sj >= 0 ? 1.0 : 0.0;
    }
  }
  m.diversity = m.values.rowwise().sum();
  m.ubiquity = m.values.colwise().sum();
  return m;
}

Mat oracle_mcc(const ParityCase& pc) {
  const int nc = pc.n_economies;
  const int np = pc.n_activities;
  Mat out(nc, nc);

  switch (pc.kind) {
    case ParityKind::even_even: {
      // two blocks of 1 / ubiquity, ubiquity = nc / 2
      const Rat v(2, nc);
      const int half = nc / 2;
      out.setZero();
      for (int i = 0; i < nc; ++i) {
        for (int j = 0; j < nc; ++j) {
          if ((i < half) == (j < half)) out(i, j) = v.value();
        }
      }
      break;
    }
    case ParityKind::odd_even: {
      if (nc % 2 == 1) {
        // odd economies, even activities: middle economy fully diversified
        const int mid = nc / 2;
        const Rat in_group(1, mid + 1);       // 1 / ubiquity
        const Rat mid_row(1, 2 * (mid + 1));  // half overlap at full diversity
        out.setZero();
        for (int i = 0; i < nc; ++i) {
          for (int j = 0; j < nc; ++j) {
            if (i == mid && j == mid) {
              out(i, j) = in_group.value();
            } else if (i == mid) {
              out(i, j) = mid_row.value();
            } else if (j == mid) {
              out(i, j) = in_group.value();
            } else if ((i < mid) == (j < mid)) {
              out(i, j) = in_group.value();
            }
          }
        }
      } else {
        // even economies, odd activities: the middle activity is produced by
        // everyone and couples the two halves
        const int half = nc / 2;
        const int h = (np - 1) / 2;       // activities per quadrant
        const Rat div(h + 1, 1);          // diversity of every economy
        const Rat same = Rat(h, half) + Rat(1, nc);  // h/(nc/2) + 1/nc, / div
        const Rat cross(1, nc);
        for (int i = 0; i < nc; ++i) {
          for (int j = 0; j < nc; ++j) {
            const Rat shared = (i < half) == (j < half) ? same : cross;
            out(i, j) = Rat(shared.num, shared.den * div.num).value();
          }
        }
      }
      break;
    }
    case ParityKind::odd_odd: {
      const int mid = nc / 2;
      const int h = (np - 1) / 2;           // own-quadrant activities
      const std::int64_t mp = (nc + 1) / 2; // ubiquity of a quadrant activity
      const std::int64_t mc = (np + 1) / 2; // diversity of an off-mean economy
      const Rat same_num = Rat(h, mp) + Rat(1, nc);
      const Rat same(same_num.num, same_num.den * mc);
      const Rat cross(1, mc * nc);
      const Rat mid_row_num = Rat(h, mp) + Rat(1, nc);
      const Rat mid_row(mid_row_num.num, mid_row_num.den * np);
      const Rat mid_diag_num = Rat(2 * h, mp) + Rat(1, nc);
      const Rat mid_diag(mid_diag_num.num, mid_diag_num.den * np);
      for (int i = 0; i < nc; ++i) {
        for (int j = 0; j < nc; ++j) {
          if (i == mid && j == mid) {
            out(i, j) = mid_diag.value();
          } else if (i == mid) {
            out(i, j) = mid_row.value();
          } else if (j == mid) {
            out(i, j) = same.value();
          } else if ((i < mid) == (j < mid)) {
            out(i, j) = same.value();
          } else {
            out(i, j) = cross.value();
          }
        }
      }
      break;
    }
  }
  return out;
}

Vec oracle_eci(const ParityCase& pc) {
  const int nc = pc.n_economies;
  Vec v(nc);
  if (nc % 2 == 0) {
    for (int i = 0; i < nc; ++i) v(i) = i < nc / 2 ? 1.0 : -1.0;
  } else {
    const int mid = nc / 2;
    for (int i = 0; i < nc; ++i) {
      v(i) = i == mid ? 0.0 : (i < mid ? 1.0 : -1.0);
    }
  }
  return v;
}

Mat exact_projection_economies(const Mat& m01) {
  const int nc = static_cast<int>(m01.rows());
  const int np = static_cast<int>(m01.cols());
  std::vector<std::int64_t> div(static_cast<std::size_t>(nc), 0);
  std::vector<std::int64_t> ubi(static_cast<std::size_t>(np), 0);
  for (int i = 0; i < nc; ++i) {
    for (int j = 0; j < np; ++j) {
      const double v = m01(i, j);
      if (v != 0.0 && v != 1.0) {
        throw ValidationError("exact_projection_economies: matrix is not 0/1");
      }
      if (v == 1.0) {
        ++div[static_cast<std::size_t>(i)];
        ++ubi[static_cast<std::size_t>(j)];
      }
    }
  }
  Mat out(nc, nc);
  for (int i = 0; i < nc; ++i) {
    if (div[static_cast<std::size_t>(i)] == 0) {
      throw ValidationError("exact_projection_economies: zero-diversity row");
    }
    for (int j = 0; j < nc; ++j) {
      Rat acc(0, 1);
      for (int p = 0; p < np; ++p) {
        if (m01(i, p) == 1.0 && m01(j, p) == 1.0) {
          acc = acc + Rat(1, static_cast<std::int64_t>(
                                 ubi[static_cast<std::size_t>(p)]));
        }
      }
      out(i, j) = Rat(acc.num, acc.den * div[static_cast<std::size_t>(i)]).value();
    }
  }
  return out;
}

SeparableCheck check_separable_rca(const Vec& f, const Vec& g,
                                   double tolerance) {
  if ((f.array() <= 0.0).any() || (g.array() <= 0.0).any()) {
    throw ValidationError("check_separable_rca: factors must be positive");
  }
  OutputMatrix y;
  y.values = f * g.transpose();
  y.economy_ids = index_ids('c', static_cast<int>(f.size()));
  y.activity_ids = index_ids('p', static_cast<int>(g.size()));
  RcaMatrix r = rca(y);
  SeparableCheck out;
  out.max_abs_deviation = (r.values.array() - 1.0).abs().maxCoeff();
  out.separable = out.max_abs_deviation < tolerance;
  return out;
}

Mat shifted_condition(const Vec& f, const Vec& g) {
  if (f.size() < 2 || g.size() < 2) {
    throw ValidationError("shifted_condition: need at least 2x2");
  }
  const double mf = f.mean();
  const double mg = g.mean();
  Mat out(f.size(), g.size());
  for (int i = 0; i < f.size(); ++i) {
    for (int j = 0; j < g.size(); ++j) {
      out(i, j) = (f(i) - mf) * (g(j) - mg) >= 0.0 ? 1.0 : 0.0;
    }
  }
  return out;
}

}  // namespace ecx
