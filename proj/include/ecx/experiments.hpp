#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ecx/common.hpp"
#include "ecx/model.hpp"
#include "ecx/netgen.hpp"
#include "ecx/pipeline.hpp"

namespace ecx {

// Everything produced by one model run, aligned with the kept economy rows.
struct RunArtifacts {
  GeneratorSpec spec;
  OutputMatrix output;
  RcaMatrix advantage;
  SpecializationMatrix specialization;
  ProjectionMatrix economy_projection;
  ProjectionMatrix activity_projection;
  ComplexityResult eci;
  ComplexityResult pci;
  ComplexityResult eci_reflect;
  Vec kept_row_param;  // row_param restricted to surviving economies
  std::optional<double> spearman_eci_vs_param;
  std::vector<std::string> written_files;
};

// Generates the model, runs the full pipeline (both score routes), and when
// out_dir is nonempty writes the matrix panel (output, advantage,
// specialization, both projections) as CSV, score/diversity tables, a JSON
// summary, and SVG heatmaps.
RunArtifacts run_model(const GeneratorSpec& spec, const std::string& out_dir);

struct SweepResult {
  Vec alpha_grid;
  int replicates = 0;
  int n_economies = 0;
  int n_activities = 0;
  int n_capabilities = 0;
  std::uint64_t seed = 0;
  Vec corr_mean;               // mean |rank corr(ECI, <r>_c)| per alpha
  Vec corr_std;                // sample std per alpha (0 when < 2 valid)
  std::vector<int> n_valid;    // replicates with a defined correlation
  std::vector<int> n_degenerate;
};

// Mixing sweep: for each alpha and replicate, draw endowments/requirements on
// substreams keyed by (alpha index, replicate, role), run the pipeline, and
// record |rank corr(ECI, <r>_c)|. Tasks run on `threads` workers and results
// are merged by (alpha index, replicate), so any thread count gives
// bit-identical output.
SweepResult run_phase_sweep(const Vec& alpha_grid, int replicates,
                            int n_economies, int n_activities,
                            int n_capabilities, std::uint64_t seed,
                            int threads);

void write_sweep_csv(const SweepResult& s, const std::string& path);
void write_sweep_json(const SweepResult& s, const std::string& path);

struct HeatmapInfo {
  int nan_count = 0;
};

// Deterministic SVG heatmap; NaN cells use a designated error color and are
// counted. Palettes: "viridis" (default), "gray".
HeatmapInfo render_heatmap(const Mat& m, const std::string& palette,
                           const std::string& path);

// Desk-scale and full-scale sweep settings.
struct SweepSettings {
  int grid_points = 20;
  double alpha_min = 0.01;
  double alpha_max = 1.0;
  int replicates = 20;
  int n_economies = 50;
  int n_activities = 300;
  int n_capabilities = 10;
};
SweepSettings desk_sweep_settings();
SweepSettings full_sweep_settings();

}  // namespace ecx
