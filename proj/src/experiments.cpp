#include "ecx/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <thread>
#include <vector>

#include "ecx/io.hpp"
#include "ecx/rng.hpp"

namespace ecx {

namespace {

std::vector<int> surviving_indices(int n, const std::vector<int>& dropped) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (!std::binary_search(dropped.begin(), dropped.end(), i)) {
      out.push_back(i);
    }
  }
  return out;
}

OutputMatrix generate_output(const GeneratorSpec& spec) {
  Rng rng_r(spec.seed, {stream::kEndowment});
  Rng rng_q(spec.seed, {stream::kRequirement});

  switch (spec.kind) {
    case GeneratorKind::linspace: {
      const EndowmentMatrix r = mix_endowments(
          gen_linspace(spec.n_economies), 1.0, spec.n_capabilities, rng_r);
      const RequirementMatrix q = mix_requirements(
          gen_linspace(spec.n_activities), 1.0, spec.n_capabilities, rng_q);
      return output_multi(r, q, spec.scale);
    }
    case GeneratorKind::gaussian_minmax: {
      const Vec base_r = gen_gaussian_minmax(spec.n_economies, rng_r);
      const Vec base_q = gen_gaussian_minmax(spec.n_activities, rng_q);
      const EndowmentMatrix r =
          mix_endowments(base_r, spec.alpha, spec.n_capabilities, rng_r);
      const RequirementMatrix q =
          mix_requirements(base_q, spec.alpha, spec.n_capabilities, rng_q);
      return output_multi(r, q, spec.scale);
    }
    case GeneratorKind::mixed: {
      const EndowmentMatrix r =
          mix_endowments(gen_linspace(spec.n_economies), spec.alpha,
                         spec.n_capabilities, rng_r);
      const RequirementMatrix q =
          mix_requirements(gen_linspace(spec.n_activities), spec.alpha,
                           spec.n_capabilities, rng_q);
      return output_multi(r, q, spec.scale);
    }
    case GeneratorKind::circulant: {
      const int half = spec.profile_halfwidth > 0 ? spec.profile_halfwidth
                                                  : spec.n_capabilities / 2;
      const Vec profile =
          trapezoid_profile(spec.n_capabilities, spec.profile_plateau, half);
      const EndowmentMatrix r = gen_circulant_endowments(
          spec.n_economies, profile, spec.alpha, rng_r);
      // requirements stay exact rotations; alpha perturbs the endowment side
      const RequirementMatrix q = gen_circulant_requirements(
          spec.n_activities, profile, 1.0, rng_q);
      return output_multi(r, q, spec.scale);
    }
    case GeneratorKind::block: {
      const EndowmentMatrix r =
          gen_block_endowments(spec.n_economies, spec.n_capabilities,
                               spec.blocks, spec.alpha, rng_r);
      const RequirementMatrix q =
          gen_block_requirements(spec.n_activities, spec.n_capabilities,
                                 spec.blocks, spec.alpha, rng_q);
      return output_multi(r, q, spec.scale);
    }
  }
  throw ValidationError("generate_output: unknown generator kind");
}

std::string join_path(const std::string& dir, const std::string& name) {
  if (dir.empty() || dir.back() == '/') return dir + name;
  return dir + "/" + name;
}

void write_complexity_json(JsonWriter& j, const std::string& key,
                           const ComplexityResult& c) {
  j.key(key).begin_object();
  j.kv("method", c.method == ComplexityMethod::eigen ? "eigen" : "reflections");
  j.kv("lambda2", c.lambda2);
  j.kv("degenerate", c.degenerate);
  j.kv("converged", c.converged);
  j.kv("ortho_residual", c.ortho_residual);
  j.kv("sign_anchor", c.sign_anchor);
  j.kv("eigenvalues", c.eigenvalues);
  j.kv("scores", c.z);
  j.begin_array("notes");
  for (const std::string& n : c.notes) j.value(n);
  j.end_array();
  j.end_object();
}

struct SweepSlot {
  double abs_corr = 0.0;
  bool valid = false;
  bool degenerate = false;
};

SweepSlot sweep_task(double alpha, int nc, int np, int nb, std::uint64_t seed,
                     std::uint64_t alpha_idx, std::uint64_t rep) {
  SweepSlot slot;
  try {
    Rng rng_r(seed, {stream::kSweep, alpha_idx, rep, stream::kEndowment});
    Rng rng_q(seed, {stream::kSweep, alpha_idx, rep, stream::kRequirement});
    const EndowmentMatrix r =
        mix_endowments(gen_linspace(nc), alpha, nb, rng_r);
    const RequirementMatrix q =
        mix_requirements(gen_linspace(np), alpha, nb, rng_q);
    const OutputMatrix y = output_multi(r, q);

    RcaMatrix raw_adv = rca(y);
    const std::vector<int> rows = surviving_indices(nc, raw_adv.undefined_rows);
    const SpecializationMatrix m = binarize(drop_undefined(raw_adv));
    const ProjectionMatrix proj = project_economies(m);
    const ComplexityResult eci = eci_eigen(proj);
    Vec kept_param(static_cast<int>(proj.kept.size()));
    for (std::size_t i = 0; i < proj.kept.size(); ++i) {
      kept_param(static_cast<int>(i)) = y.row_param(
          rows[static_cast<std::size_t>(proj.kept[i])]);
    }

    slot.degenerate = eci.degenerate;
    const std::optional<double> corr = spearman(eci.z, kept_param);
    if (corr.has_value() && !eci.degenerate) {
      slot.abs_corr = std::abs(*corr);
      slot.valid = true;
    }
  } catch (const std::exception&) {
    slot.degenerate = true;
  }
  return slot;
}

struct PaletteStop {
  double t;
  int r;
  int g;
  int b;
};

std::string palette_color(double t, const std::string& palette) {
  static const std::vector<PaletteStop> viridis = {
      {0.0, 0x44, 0x01, 0x54},      {1.0 / 7.0, 0x46, 0x32, 0x7e},
      {2.0 / 7.0, 0x36, 0x5c, 0x8d}, {3.0 / 7.0, 0x27, 0x7f, 0x8e},
      {4.0 / 7.0, 0x1f, 0xa1, 0x87}, {5.0 / 7.0, 0x4a, 0xc1, 0x6d},
      {6.0 / 7.0, 0xa0, 0xda, 0x39}, {1.0, 0xfd, 0xe7, 0x25}};
  static const std::vector<PaletteStop> gray = {{0.0, 0x00, 0x00, 0x00},
                                                {1.0, 0xff, 0xff, 0xff}};
  const std::vector<PaletteStop>& stops =
      palette == "gray" ? gray : viridis;

  t = std::min(1.0, std::max(0.0, t));
  std::size_t hi = 1;
  while (hi + 1 < stops.size() && stops[hi].t < t) ++hi;
  const PaletteStop& a = stops[hi - 1];
  const PaletteStop& b = stops[hi];
  const double span = b.t - a.t;
  const double u = span > 0.0 ? (t - a.t) / span : 0.0;
  const int rr = static_cast<int>(std::lround(a.r + u * (b.r - a.r)));
  const int gg = static_cast<int>(std::lround(a.g + u * (b.g - a.g)));
  const int bb = static_cast<int>(std::lround(a.b + u * (b.b - a.b)));
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rr, gg, bb);
  return buf;
}

}  // namespace

RunArtifacts run_model(const GeneratorSpec& spec, const std::string& out_dir) {
  RunArtifacts art;
  art.spec = spec;
  art.output = generate_output(spec);

  RcaMatrix raw_adv = rca(art.output);
  const std::vector<int> rows =
      surviving_indices(static_cast<int>(art.output.values.rows()),
                        raw_adv.undefined_rows);
  const std::vector<int> cols =
      surviving_indices(static_cast<int>(art.output.values.cols()),
                        raw_adv.undefined_cols);
  art.advantage = drop_undefined(raw_adv);
  art.specialization = binarize(art.advantage);
  art.economy_projection = project_economies(art.specialization);
  art.activity_projection = project_activities(art.specialization);
  art.eci = eci_eigen(art.economy_projection);
  art.pci = eci_eigen(art.activity_projection);
  art.eci_reflect = eci_reflections(art.specialization, 64);

  art.kept_row_param.resize(static_cast<int>(art.economy_projection.kept.size()));
  for (std::size_t i = 0; i < art.economy_projection.kept.size(); ++i) {
    art.kept_row_param(static_cast<int>(i)) = art.output.row_param(
        rows[static_cast<std::size_t>(art.economy_projection.kept[i])]);
  }
  art.spearman_eci_vs_param = spearman(art.eci.z, art.kept_row_param);

  if (out_dir.empty()) return art;

  ensure_directory(out_dir);
  const auto save_matrix = [&](const std::string& name, const Mat& m,
                               const std::vector<std::string>& rid,
                               const std::vector<std::string>& cid) {
    const std::string path = join_path(out_dir, name);
    write_matrix_csv(path, m, rid, cid);
    art.written_files.push_back(path);
  };

  save_matrix("output.csv", art.output.values, art.output.economy_ids,
              art.output.activity_ids);
  save_matrix("advantage.csv", art.advantage.values, art.advantage.economy_ids,
              art.advantage.activity_ids);
  save_matrix("specialization.csv", art.specialization.values,
              art.specialization.economy_ids, art.specialization.activity_ids);
  save_matrix("economy_projection.csv", art.economy_projection.values,
              art.economy_projection.ids, art.economy_projection.ids);
  save_matrix("activity_projection.csv", art.activity_projection.values,
              art.activity_projection.ids, art.activity_projection.ids);

  {
    Vec diversity(static_cast<int>(art.economy_projection.kept.size()));
    for (std::size_t i = 0; i < art.economy_projection.kept.size(); ++i) {
      diversity(static_cast<int>(i)) =
          art.specialization.diversity(art.economy_projection.kept[i]);
    }
    const std::string path = join_path(out_dir, "economy_scores.csv");
    write_table_csv(path, art.economy_projection.ids,
                    {"eci_raw", "eci_z", "eci_reflect_z", "diversity",
                     "row_param"},
                    {art.eci.raw, art.eci.z, art.eci_reflect.z, diversity,
                     art.kept_row_param});
    art.written_files.push_back(path);
  }
  {
    Vec ubiquity(static_cast<int>(art.activity_projection.kept.size()));
    Vec col_param(static_cast<int>(art.activity_projection.kept.size()));
    for (std::size_t i = 0; i < art.activity_projection.kept.size(); ++i) {
      ubiquity(static_cast<int>(i)) =
          art.specialization.ubiquity(art.activity_projection.kept[i]);
      col_param(static_cast<int>(i)) = art.output.col_param(
          cols[static_cast<std::size_t>(art.activity_projection.kept[i])]);
    }
    const std::string path = join_path(out_dir, "activity_scores.csv");
    write_table_csv(path, art.activity_projection.ids,
                    {"pci_raw", "pci_z", "ubiquity", "col_param"},
                    {art.pci.raw, art.pci.z, ubiquity, col_param});
    art.written_files.push_back(path);
  }

  {
    const std::string path = join_path(out_dir, "output_heatmap.svg");
    render_heatmap(art.output.values, "viridis", path);
    art.written_files.push_back(path);
  }
  {
    const std::string path = join_path(out_dir, "specialization_heatmap.svg");
    render_heatmap(art.specialization.values, "gray", path);
    art.written_files.push_back(path);
  }

  {
    JsonWriter j;
    j.begin_object();
    j.kv("kind", generator_kind_name(spec.kind));
    j.kv("n_economies", spec.n_economies);
    j.kv("n_activities", spec.n_activities);
    j.kv("n_capabilities", spec.n_capabilities);
    j.kv("seed", spec.seed);
    j.kv("alpha", spec.alpha);
    j.kv("scale", spec.scale);
    j.kv("profile_halfwidth", spec.profile_halfwidth);
    j.kv("profile_plateau", spec.profile_plateau);
    j.kv("blocks", spec.blocks);
    j.kv("kept_economies",
         static_cast<int>(art.economy_projection.kept.size()));
    j.kv("kept_activities",
         static_cast<int>(art.activity_projection.kept.size()));
    if (art.spearman_eci_vs_param.has_value()) {
      j.kv("spearman_eci_vs_param", *art.spearman_eci_vs_param);
    } else {
      j.kv("spearman_eci_vs_param", "undefined");
    }
    write_complexity_json(j, "eci", art.eci);
    write_complexity_json(j, "pci", art.pci);
    write_complexity_json(j, "eci_reflect", art.eci_reflect);
    j.kv("diversity", art.specialization.diversity);
    j.kv("ubiquity", art.specialization.ubiquity);
    j.end_object();
    const std::string path = join_path(out_dir, "summary.json");
    j.write(path);
    art.written_files.push_back(path);
  }
  return art;
}

SweepResult run_phase_sweep(const Vec& alpha_grid, int replicates,
                            int n_economies, int n_activities,
                            int n_capabilities, std::uint64_t seed,
                            int threads) {
  if (alpha_grid.size() < 1 || replicates < 1) {
    throw ValidationError("run_phase_sweep: empty grid or no replicates");
  }
  for (int i = 0; i < alpha_grid.size(); ++i) {
    if (alpha_grid(i) < 0.0 || alpha_grid(i) > 1.0) {
      throw ValidationError("run_phase_sweep: alpha outside [0, 1]");
    }
  }

  const int n_alpha = static_cast<int>(alpha_grid.size());
  const int n_tasks = n_alpha * replicates;
  std::vector<SweepSlot> slots(static_cast<std::size_t>(n_tasks));

  int workers = threads > 0
                    ? threads
                    : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = std::min(workers, n_tasks);

  std::atomic<int> next{0};
  const auto worker = [&]() {
    while (true) {
      const int t = next.fetch_add(1);
      if (t >= n_tasks) break;
      const int ai = t / replicates;
      const int rep = t % replicates;
      slots[static_cast<std::size_t>(t)] = sweep_task(
          alpha_grid(ai), n_economies, n_activities, n_capabilities, seed,
          static_cast<std::uint64_t>(ai), static_cast<std::uint64_t>(rep));
    }
  };

  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }

  SweepResult res;
  res.alpha_grid = alpha_grid;
  res.replicates = replicates;
  res.n_economies = n_economies;
  res.n_activities = n_activities;
  res.n_capabilities = n_capabilities;
  res.seed = seed;
  res.corr_mean = Vec::Zero(n_alpha);
  res.corr_std = Vec::Zero(n_alpha);
  res.n_valid.assign(static_cast<std::size_t>(n_alpha), 0);
  res.n_degenerate.assign(static_cast<std::size_t>(n_alpha), 0);

  for (int ai = 0; ai < n_alpha; ++ai) {
    double sum = 0.0;
    int n = 0;
    for (int rep = 0; rep < replicates; ++rep) {
      const SweepSlot& s = slots[static_cast<std::size_t>(ai * replicates + rep)];
      if (s.degenerate) ++res.n_degenerate[static_cast<std::size_t>(ai)];
      if (s.valid) {
        sum += s.abs_corr;
        ++n;
      }
    }
    res.n_valid[static_cast<std::size_t>(ai)] = n;
    if (n > 0) {
      const double mean = sum / n;
      res.corr_mean(ai) = mean;
      if (n > 1) {
        double ss = 0.0;
        for (int rep = 0; rep < replicates; ++rep) {
          const SweepSlot& s =
              slots[static_cast<std::size_t>(ai * replicates + rep)];
          if (s.valid) ss += (s.abs_corr - mean) * (s.abs_corr - mean);
        }
        res.corr_std(ai) = std::sqrt(ss / (n - 1));
      }
    }
  }
  return res;
}

void write_sweep_csv(const SweepResult& s, const std::string& path) {
  std::ostringstream out;
  out << "alpha,corr_mean,corr_std,n_valid,n_degenerate\n";
  for (int i = 0; i < s.alpha_grid.size(); ++i) {
    out << format_double(s.alpha_grid(i)) << ','
        << format_double(s.corr_mean(i)) << ',' << format_double(s.corr_std(i))
        << ',' << s.n_valid[static_cast<std::size_t>(i)] << ','
        << s.n_degenerate[static_cast<std::size_t>(i)] << '\n';
  }
  write_text_file(path, out.str());
}

void write_sweep_json(const SweepResult& s, const std::string& path) {
  JsonWriter j;
  j.begin_object();
  j.kv("replicates", s.replicates);
  j.kv("n_economies", s.n_economies);
  j.kv("n_activities", s.n_activities);
  j.kv("n_capabilities", s.n_capabilities);
  j.kv("seed", s.seed);
  j.kv("alpha_grid", s.alpha_grid);
  j.kv("corr_mean", s.corr_mean);
  j.kv("corr_std", s.corr_std);
  j.begin_array("n_valid");
  for (int v : s.n_valid) j.value(v);
  j.end_array();
  j.begin_array("n_degenerate");
  for (int v : s.n_degenerate) j.value(v);
  j.end_array();
  j.end_object();
  j.write(path);
}

HeatmapInfo render_heatmap(const Mat& m, const std::string& palette,
                           const std::string& path) {
  if (m.rows() < 1 || m.cols() < 1) {
    throw ValidationError("render_heatmap: empty matrix");
  }
  if (palette != "viridis" && palette != "gray") {
    throw ValidationError("render_heatmap: unknown palette " + palette);
  }

  const int rows = static_cast<int>(m.rows());
  const int cols = static_cast<int>(m.cols());
  int cell = 800 / std::max(rows, cols);
  cell = std::max(1, std::min(16, cell));

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const double v = m(i, j);
      if (std::isfinite(v)) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    }
  }
  const bool flat = !(hi > lo);

  HeatmapInfo info;
  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << cols * cell
      << "\" height=\"" << rows * cell << "\">\n";
  out << "<!-- rows=" << rows << " cols=" << cols << " min="
      << (std::isfinite(lo) ? format_double(lo) : "none") << " max="
      << (std::isfinite(hi) ? format_double(hi) : "none") << " palette="
      << palette << " -->\n";
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const double v = m(i, j);
      std::string color;
      if (!std::isfinite(v)) {
        color = "#ff00ff";
        ++info.nan_count;
      } else {
        const double t = flat ? 0.5 : (v - lo) / (hi - lo);
        color = palette_color(t, palette);
      }
      out << "<rect x=\"" << j * cell << "\" y=\"" << i * cell << "\" width=\""
          << cell << "\" height=\"" << cell << "\" fill=\"" << color
          << "\"/>\n";
    }
  }
  out << "</svg>\n";
  write_text_file(path, out.str());
  return info;
}

SweepSettings desk_sweep_settings() { return SweepSettings{}; }

SweepSettings full_sweep_settings() {
  SweepSettings s;
  s.grid_points = 50;
  s.replicates = 250;
  s.n_economies = 100;
  s.n_activities = 1000;
  s.n_capabilities = 10;
  return s;
}

}  // namespace ecx
