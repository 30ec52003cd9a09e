#include "ecx/common.hpp"

#include <cmath>

namespace ecx {

std::vector<std::string> index_ids(char prefix, int n) {
  std::vector<std::string> ids;
  ids.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ids.push_back(prefix + std::to_string(i));
  return ids;
}

double mean_of(const Vec& v) { return v.size() > 0 ? v.mean() : 0.0; }

double stddev_of(const Vec& v) {
  if (v.size() == 0) return 0.0;
  const double m = v.mean();
  return std::sqrt((v.array() - m).square().sum() / static_cast<double>(v.size()));
}

double covariance_of(const Vec& a, const Vec& b) {
  if (a.size() != b.size() || a.size() == 0) {
    throw ValidationError("covariance_of: size mismatch");
  }
  const double ma = a.mean();
  const double mb = b.mean();
  return ((a.array() - ma) * (b.array() - mb)).sum() /
         static_cast<double>(a.size());
}

Vec zscore(const Vec& v, bool* collapsed) {
  const double m = mean_of(v);
  const double s = stddev_of(v);
  if (s <= 1e-12 * (1.0 + std::abs(m))) {
    if (collapsed) *collapsed = true;
    return Vec::Zero(v.size());
  }
  if (collapsed) *collapsed = false;
  return (v.array() - m) / s;
}

}  // namespace ecx
