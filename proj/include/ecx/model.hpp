#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ecx/common.hpp"
#include "ecx/rng.hpp"

namespace ecx {

// Capability endowments, economies x capabilities, entries in [0, 1].
struct EndowmentMatrix {
  Mat values;
  std::vector<std::string> economy_ids;
};

// Capability requirements, activities x capabilities, entries in [0, 1].
struct RequirementMatrix {
  Mat values;
  std::vector<std::string> activity_ids;
};

// Output levels, economies x activities, entries >= 0.
//
// row_param / col_param carry the per-row endowment summary (r or its
// capability mean) and per-column requirement summary aligned with the stored
// order, so downstream rank comparisons need no external bookkeeping.
struct OutputMatrix {
  Mat values;
  double scale = 1.0;
  std::vector<std::string> economy_ids;
  std::vector<std::string> activity_ids;
  Vec row_param;
  Vec col_param;
};

// Separable / shifted production data: output = shift + f(K_c) * g(K_p).
struct FactorVectors {
  Vec f;
  Vec g;
  double shift = 0.0;
};

enum class GeneratorKind {
  linspace,
  gaussian_minmax,
  mixed,
  circulant,
  block,
};

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::linspace;
  int n_economies = 10;
  int n_activities = 20;
  int n_capabilities = 1;
  std::uint64_t seed = 0;
  double alpha = 1.0;        // mixing weight on the structured part
  double scale = 1.0;        // overall output scale
  int profile_halfwidth = 0; // circulant profile half-width; 0 means n_b / 2
  int profile_plateau = 0;   // flat-top radius inside the half-width
  int blocks = 2;            // planted block count
};

const char* generator_kind_name(GeneratorKind kind);
std::optional<GeneratorKind> generator_kind_from_name(const std::string& name);

// n evenly spaced values covering [0, 1]; n >= 2.
Vec gen_linspace(int n);

// Normal draws rescaled to span [0, 1] exactly (min maps to 0, max to 1).
// Degenerate batches are retried on a perturbed substream.
Vec gen_gaussian_minmax(int n, Rng& rng);

// r_{c,b} = alpha * base_c + (1 - alpha) * uniform(0,1). Rows are emitted
// sorted by their capability mean, descending, with ids recording the
// original positions.
EndowmentMatrix mix_endowments(const Vec& base, double alpha,
                               int n_capabilities, Rng& rng);

// Same construction for activities; rows sorted by capability mean ascending.
RequirementMatrix mix_requirements(const Vec& base, double alpha,
                                   int n_capabilities, Rng& rng);

// Symmetric tent profile of given circular half-width, peak 1 at index n/2.
Vec tent_profile(int n, int halfwidth);

// Flat-top variant: value 1 within `plateau` of the center, then linear decay
// reaching 0 at circular distance `halfwidth`. plateau == 0 gives the tent.
Vec trapezoid_profile(int n, int plateau, int halfwidth);

// Row i is the profile rotated by i (scaled when n != profile size), mixed
// with uniform noise: alpha * rotated + (1 - alpha) * uniform(0,1).
// The profile must be circularly symmetric; rows keep structural order.
EndowmentMatrix gen_circulant_endowments(int n, const Vec& profile,
                                         double alpha, Rng& rng);
RequirementMatrix gen_circulant_requirements(int n, const Vec& profile,
                                             double alpha, Rng& rng);

// k planted blocks over n rows and n_b capability columns; block membership
// contributes alpha, noise contributes (1 - alpha) * uniform(0,1). Rows keep
// structural order. Remainder rows/columns go to the last block.
EndowmentMatrix gen_block_endowments(int n, int n_b, int k, double alpha,
                                     Rng& rng);
RequirementMatrix gen_block_requirements(int n, int n_b, int k, double alpha,
                                         Rng& rng);

// Planted block label of row i when n rows are split into k blocks.
int block_label(int i, int n, int k);

// Y_cp = scale * (1 - q_p (1 - r_c)), rows sorted by r descending, columns by
// q ascending (stable, original ids preserved).
OutputMatrix output_single(const Vec& r, const Vec& q, double scale = 1.0);

// Y_cp = scale * prod_b (1 - q_pb (1 - r_cb)). Row/column order is taken from
// the inputs (generators already emit the conventional order).
OutputMatrix output_multi(const EndowmentMatrix& R, const RequirementMatrix& Q,
                          double scale = 1.0);

// Y_cp = shift + f_c * g_p, in caller order. Negative entries are rejected.
OutputMatrix output_shifted(const FactorVectors& fv);

// Stable sort permutation of v (descending or ascending).
std::vector<int> sort_permutation(const Vec& v, bool descending);

}  // namespace ecx
