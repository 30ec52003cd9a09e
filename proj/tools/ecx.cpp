#include <CLI11.hpp>
#include <cstdio>
#include <string>

#include "ecx/equilibrium.hpp"
#include "ecx/experiments.hpp"
#include "ecx/io.hpp"
#include "ecx/model.hpp"
#include "ecx/netgen.hpp"
#include "ecx/oracle.hpp"
#include "ecx/pipeline.hpp"
#include "ecx/rng.hpp"

namespace {

using namespace ecx;

struct ModelArgs {
  GeneratorSpec spec;
  std::string kind_name = "linspace";
  std::string config_path;
  std::string out_dir;
};

void add_model_options(CLI::App* cmd, ModelArgs& a, bool with_kind) {
  if (with_kind) {
    cmd->add_option("--kind", a.kind_name,
                    "generator: linspace, gaussian_minmax, mixed, circulant, "
                    "block")
        ->capture_default_str();
  }
  cmd->add_option("--config", a.config_path, "key = value config file");
  cmd->add_option("-c,--economies", a.spec.n_economies, "number of economies")
      ->capture_default_str();
  cmd->add_option("-p,--activities", a.spec.n_activities,
                  "number of activities")
      ->capture_default_str();
  cmd->add_option("-b,--capabilities", a.spec.n_capabilities,
                  "number of capabilities")
      ->capture_default_str();
  cmd->add_option("--seed", a.spec.seed, "rng seed")->capture_default_str();
  cmd->add_option("--alpha", a.spec.alpha, "mixing weight on structure")
      ->capture_default_str();
  cmd->add_option("--scale", a.spec.scale, "output scale")
      ->capture_default_str();
  cmd->add_option("--halfwidth", a.spec.profile_halfwidth,
                  "circulant profile half-width (0 = capabilities/2)")
      ->capture_default_str();
  cmd->add_option("--plateau", a.spec.profile_plateau,
                  "circulant profile flat-top radius")
      ->capture_default_str();
  cmd->add_option("--blocks", a.spec.blocks, "planted block count")
      ->capture_default_str();
  cmd->add_option("-o,--out", a.out_dir, "output directory");
}

GeneratorSpec resolve_spec(const ModelArgs& a) {
  GeneratorSpec spec = a.spec;
  const auto kind = generator_kind_from_name(a.kind_name);
  if (!kind.has_value()) {
    throw ValidationError("unknown generator kind: " + a.kind_name);
  }
  spec.kind = *kind;
  if (!a.config_path.empty()) {
    spec = spec_from_config(parse_config_file(a.config_path), spec);
  }
  return spec;
}

void report_run(const RunArtifacts& art) {
  std::printf("kind=%s economies=%d activities=%d capabilities=%d seed=%llu\n",
              generator_kind_name(art.spec.kind), art.spec.n_economies,
              art.spec.n_activities, art.spec.n_capabilities,
              static_cast<unsigned long long>(art.spec.seed));
  std::printf("kept %d economies, %d activities; lambda2 = %s%s\n",
              static_cast<int>(art.economy_projection.kept.size()),
              static_cast<int>(art.activity_projection.kept.size()),
              format_double(art.eci.lambda2).c_str(),
              art.eci.degenerate ? " (degenerate)" : "");
  if (art.spearman_eci_vs_param.has_value()) {
    std::printf("rank corr(score, endowment) = %s\n",
                format_double(*art.spearman_eci_vs_param).c_str());
  } else {
    std::printf("rank corr(score, endowment) undefined\n");
  }
  for (const std::string& f : art.written_files) {
    std::printf("wrote %s\n", f.c_str());
  }
}

int run_single(ModelArgs& a) {
  GeneratorSpec spec = resolve_spec(a);
  spec.kind = GeneratorKind::linspace;
  spec.n_capabilities = 1;
  report_run(run_model(spec, a.out_dir));
  return 0;
}

int run_multi(ModelArgs& a) {
  report_run(run_model(resolve_spec(a), a.out_dir));
  return 0;
}

struct SweepArgs {
  SweepSettings settings = desk_sweep_settings();
  bool full_scale = false;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out_dir = "sweep_out";
};

int run_sweep(SweepArgs& a) {
  SweepSettings s = a.full_scale ? full_sweep_settings() : a.settings;
  Vec grid(s.grid_points);
  for (int i = 0; i < s.grid_points; ++i) {
    grid(i) = s.grid_points == 1
                  ? s.alpha_min
                  : s.alpha_min + (s.alpha_max - s.alpha_min) * i /
                                      (s.grid_points - 1);
  }
  const SweepResult res =
      run_phase_sweep(grid, s.replicates, s.n_economies, s.n_activities,
                      s.n_capabilities, a.seed, a.threads);
  ensure_directory(a.out_dir);
  const std::string csv = a.out_dir + "/sweep.csv";
  const std::string json = a.out_dir + "/sweep.json";
  write_sweep_csv(res, csv);
  write_sweep_json(res, json);
  std::printf("wrote %s\nwrote %s\n", csv.c_str(), json.c_str());
  for (int i = 0; i < res.alpha_grid.size(); ++i) {
    std::printf("alpha=%.4f mean|rho|=%.4f std=%.4f valid=%d\n",
                res.alpha_grid(i), res.corr_mean(i), res.corr_std(i),
                res.n_valid[static_cast<std::size_t>(i)]);
  }
  return 0;
}

struct EquilibriumArgs {
  int n_economies = 20;
  int n_activities = 50;
  std::uint64_t seed = 0;
  std::string out_dir;
};

int run_equilibrium(EquilibriumArgs& a) {
  Rng rng_r(a.seed, {stream::kEndowment});
  Rng rng_q(a.seed, {stream::kRequirement});
  Rng rng_b(a.seed, {stream::kPreference});

  Vec r(a.n_economies);
  for (int i = 0; i < a.n_economies; ++i) r(i) = rng_r.uniform(0.25, 1.0);
  Vec q(a.n_activities);
  for (int j = 0; j < a.n_activities; ++j) q(j) = rng_q.uniform(0.0, 0.95);
  PreferenceMatrix b;
  b.values.resize(a.n_economies, a.n_activities);
  for (int i = 0; i < a.n_economies; ++i) {
    for (int j = 0; j < a.n_activities; ++j) {
      b.values(i, j) = rng_b.uniform(0.5, 1.5);
    }
  }
  Vec labor(a.n_economies);
  Rng rng_l(a.seed, {stream::kLabor});
  for (int i = 0; i < a.n_economies; ++i) labor(i) = rng_l.uniform(0.5, 1.5);

  const PriceSolve solve = solve_prices(b, q, r);
  const WageResult wages = equilibrium_wages(solve.prices, q, r, labor);
  const ConsumptionMatrix cons = consumption(b, solve.prices, q, r);
  const EquilibriumResiduals resid =
      equilibrium_residuals(b, solve.prices, q, r, cons);
  const PricedSpecialization ps = priced_specialization(r, q, solve.prices);

  std::printf("prices solved in %d iterations%s, residual %s\n",
              solve.iterations, solve.used_fallback ? " (fallback)" : "",
              format_double(solve.fixed_point_residual).c_str());
  std::printf("budget %s  clearing %s  threshold %s\n",
              format_double(resid.budget_max).c_str(),
              format_double(resid.clearing_max).c_str(),
              format_double(ps.threshold).c_str());

  if (!a.out_dir.empty()) {
    ensure_directory(a.out_dir);
    JsonWriter j;
    j.begin_object();
    j.kv("n_economies", a.n_economies);
    j.kv("n_activities", a.n_activities);
    j.kv("seed", a.seed);
    j.kv("iterations", solve.iterations);
    j.kv("used_fallback", solve.used_fallback);
    j.kv("fixed_point_residual", solve.fixed_point_residual);
    j.kv("budget_max", resid.budget_max);
    j.kv("clearing_max", resid.clearing_max);
    j.kv("supply_identity_max", resid.supply_identity_max);
    j.kv("threshold", ps.threshold);
    j.kv("prices", solve.prices.pi);
    j.kv("wages", wages.wages);
    j.kv("income", wages.income);
    j.kv("r", r);
    j.kv("q", q);
    j.end_object();
    const std::string path = a.out_dir + "/equilibrium.json";
    j.write(path);
    write_matrix_csv(a.out_dir + "/consumption.csv", cons.values,
                     index_ids('c', a.n_economies),
                     index_ids('p', a.n_activities));
    write_matrix_csv(a.out_dir + "/priced_specialization.csv", ps.m.values,
                     ps.m.economy_ids, ps.m.activity_ids);
    std::printf("wrote %s\n", path.c_str());
  }
  return 0;
}

struct NetworkArgs {
  ModelArgs model;
  std::string proximity_kind = "min_conditional";
};

int run_network(NetworkArgs& a) {
  GeneratorSpec spec = resolve_spec(a.model);
  const std::string out_dir =
      a.model.out_dir.empty() ? "network_out" : a.model.out_dir;

  const RunArtifacts art = run_model(spec, "");
  ProximityKind kind;
  if (a.proximity_kind == "min_conditional") {
    kind = ProximityKind::min_conditional;
  } else if (a.proximity_kind == "cooccurrence") {
    kind = ProximityKind::cooccurrence;
  } else {
    throw ValidationError("unknown proximity kind: " + a.proximity_kind);
  }

  const ProximityMatrix phi = proximity(art.specialization, kind);
  RelatednessGraph g = backbone(phi);

  Vec pci_full = Vec::Zero(g.n_nodes);
  for (std::size_t i = 0; i < art.activity_projection.kept.size(); ++i) {
    pci_full(art.activity_projection.kept[i]) = art.pci.z(static_cast<int>(i));
  }
  attach_node_attributes(g, pci_full, phi.ubiquity);

  ensure_directory(out_dir);
  export_graph(g, GraphFormat::edge_csv, out_dir + "/graph_edges.csv");
  export_graph(g, GraphFormat::graphml, out_dir + "/graph.graphml");
  export_graph(g, GraphFormat::dot, out_dir + "/graph.dot");

  const std::vector<int> comp = connected_components(g, false);
  const int n_comp =
      comp.empty() ? 0 : 1 + *std::max_element(comp.begin(), comp.end());
  const std::vector<int> ring = find_ring_cycle(g);

  JsonWriter j;
  j.begin_object();
  j.kv("nodes", g.n_nodes);
  j.kv("edges", static_cast<int>(g.edges.size()));
  j.kv("backbone_edges", g.backbone_edge_count);
  j.kv("strong_threshold", g.strong_threshold);
  j.kv("components", n_comp);
  j.kv("ring_cycle_length", static_cast<int>(ring.size()));
  if (g.n_nodes >= 4) {
    const QuartileDegrees qd = degree_by_pci_quartile(g);
    j.kv("top_quartile_degree", qd.top);
    j.kv("bottom_quartile_degree", qd.bottom);
  }
  j.end_object();
  j.write(out_dir + "/network.json");

  std::printf("nodes=%d edges=%d backbone=%d components=%d ring=%d\n",
              g.n_nodes, static_cast<int>(g.edges.size()),
              g.backbone_edge_count, n_comp, static_cast<int>(ring.size()));
  std::printf("wrote %s\n", (out_dir + "/graph.graphml").c_str());
  return 0;
}

struct OracleArgs {
  int n_economies = 5;
  int n_activities = 7;
};

int run_oracle_check(OracleArgs& a) {
  const ParityCase pc = ParityCase::from_dims(a.n_economies, a.n_activities);
  const Vec r = gen_linspace(a.n_economies);
  const Vec q = gen_linspace(a.n_activities);

  const OutputMatrix y = output_single(r, q);
  const SpecializationMatrix m = binarize(rca(y));
  const SpecializationMatrix expected = oracle_mcp(
      Vec(r.reverse()), q, Center::mean);  // output_single sorts r descending

  const double m_dev = (m.values - expected.values).cwiseAbs().maxCoeff();

  const ProjectionMatrix proj = project_economies(m);
  const Mat closed = oracle_mcc(pc);
  const Mat exact = exact_projection_economies(m.values);
  const double p_dev = (proj.values - closed).cwiseAbs().maxCoeff();
  const double x_dev = (proj.values - exact).cwiseAbs().maxCoeff();

  std::printf("case %dx%d: pattern dev %s, closed-form dev %s, exact dev %s\n",
              a.n_economies, a.n_activities, format_double(m_dev).c_str(),
              format_double(p_dev).c_str(), format_double(x_dev).c_str());
  if (m_dev != 0.0 || p_dev > 1e-12 || x_dev > 1e-12) {
    std::fprintf(stderr, "oracle check failed\n");
    return 1;
  }
  std::printf("oracle check passed\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"capability-driven specialization and complexity toolkit"};
  app.require_subcommand(1);

  ModelArgs single_args;
  CLI::App* single = app.add_subcommand(
      "single", "one-capability model on evenly spaced parameters");
  add_model_options(single, single_args, false);

  ModelArgs multi_args;
  multi_args.spec.n_capabilities = 10;
  CLI::App* multi =
      app.add_subcommand("multi", "multi-capability model run");
  add_model_options(multi, multi_args, true);

  SweepArgs sweep_args;
  CLI::App* sweep =
      app.add_subcommand("sweep", "mixing sweep of rank correlation");
  sweep->add_flag("--full-scale", sweep_args.full_scale,
                  "use the large preregistered scale");
  sweep->add_option("--grid", sweep_args.settings.grid_points, "alpha points")
      ->capture_default_str();
  sweep->add_option("--replicates", sweep_args.settings.replicates,
                    "replicates per alpha")
      ->capture_default_str();
  sweep->add_option("-c,--economies", sweep_args.settings.n_economies, "")
      ->capture_default_str();
  sweep->add_option("-p,--activities", sweep_args.settings.n_activities, "")
      ->capture_default_str();
  sweep->add_option("-b,--capabilities", sweep_args.settings.n_capabilities,
                    "")
      ->capture_default_str();
  sweep->add_option("--seed", sweep_args.seed, "rng seed")
      ->capture_default_str();
  sweep->add_option("--threads", sweep_args.threads,
                    "worker threads (0 = hardware)")
      ->capture_default_str();
  sweep->add_option("-o,--out", sweep_args.out_dir, "output directory")
      ->capture_default_str();

  EquilibriumArgs eq_args;
  CLI::App* equilibrium =
      app.add_subcommand("equilibrium", "price and wage clearing scenario");
  equilibrium->add_option("-c,--economies", eq_args.n_economies, "")
      ->capture_default_str();
  equilibrium->add_option("-p,--activities", eq_args.n_activities, "")
      ->capture_default_str();
  equilibrium->add_option("--seed", eq_args.seed, "rng seed")
      ->capture_default_str();
  equilibrium->add_option("-o,--out", eq_args.out_dir, "output directory");

  NetworkArgs net_args;
  net_args.model.kind_name = "circulant";
  net_args.model.spec.n_capabilities = 16;
  net_args.model.spec.alpha = 0.8;
  CLI::App* network =
      app.add_subcommand("network", "activity relatedness graph");
  add_model_options(network, net_args.model, true);
  network
      ->add_option("--proximity", net_args.proximity_kind,
                   "min_conditional or cooccurrence")
      ->capture_default_str();

  OracleArgs oracle_args;
  CLI::App* oracle_check = app.add_subcommand(
      "oracle-check", "compare the pipeline against closed forms");
  oracle_check->add_option("-c,--economies", oracle_args.n_economies, "")
      ->capture_default_str();
  oracle_check->add_option("-p,--activities", oracle_args.n_activities, "")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
    if (single->parsed()) return run_single(single_args);
    if (multi->parsed()) return run_multi(multi_args);
    if (sweep->parsed()) return run_sweep(sweep_args);
    if (equilibrium->parsed()) return run_equilibrium(eq_args);
    if (network->parsed()) return run_network(net_args);
    if (oracle_check->parsed()) return run_oracle_check(oracle_args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const ecx::ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return 1;
  } catch (const ecx::NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 2;
  }
  return 0;
}
