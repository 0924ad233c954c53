// mtinsar command line: simulate synthetic stacks, run the processing
// chain, and work with the velocity products.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "mtinsar/mtinsar.hpp"

namespace fs = std::filesystem;
using namespace mtinsar;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

int exit_code_for(const Error& e) {
  return e.is_validation() ? kExitValidation : kExitRuntime;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed, bool verbose) {
  SceneConfig sc = load_scene_config(config_path);
  if (seed) sc.seed = *seed;
  const BuiltScene scene = build_scene(sc);
  const PairSet pairs =
      select_pairs(scene.catalog, 1e9, 1e9);  // all pairs; run re-filters
  const SimulatedStack sim =
      generate_stack(scene.truth, scene.catalog, pairs, scene.radar, true);

  fs::create_directories(out_dir);
  const auto dir = fs::path(out_dir);
  save_catalog(scene.catalog, (dir / "catalog.txt").string());
  save_stack(sim.stack, (dir / "stack.bin").string());
  {
    std::string truth = "# pixel_id,lon,lat,velocity_mm_yr\n";
    char line[128];
    for (std::size_t p = 0; p < scene.truth.pixels.size(); ++p) {
      std::snprintf(line, sizeof line, "%zu,%.9f,%.9f,%.6f\n", p,
                    scene.truth.pixels[p].lon, scene.truth.pixels[p].lat,
                    scene.truth.velocity_mm_yr[p]);
      truth += line;
    }
    write_file_atomic((dir / "truth.csv").string(), truth);
  }
  if (verbose)
    std::cout << "simulated " << sim.stack.pairs.size() << " pairs x "
              << sim.stack.pixels.size() << " pixels (seed " << sc.seed
              << ")\n";
  std::cout << "wrote " << (dir / "stack.bin").string() << ", "
            << (dir / "catalog.txt").string() << ", "
            << (dir / "truth.csv").string() << "\n";
  return kExitOk;
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            const std::string& out_dir, bool skip_gia, bool verbose) {
  PipelineConfig cfg = load_pipeline_config(config_path);
  if (seed) cfg.seed = *seed;
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  if (skip_gia) cfg.subtract_gia_flag = false;
  const PipelineResult res = run_pipeline(cfg, verbose ? &std::cout : nullptr);
  std::printf("pixels: %zu   median: %.3f mm/yr   min: %.3f   max: %.3f\n",
              res.product.n_ok(), res.stats.median, res.stats.min,
              res.stats.max);
  std::cout << "products in " << cfg.output_dir << "\n";
  return kExitOk;
}

FieldStats stats_of_csv(const std::string& csv_path) {
  const auto rows = load_csv(csv_path);
  if (rows.empty()) throw Error(ErrorCode::EmptyProduct, "CSV has no rows");
  DisplacementProduct prod;
  prod.solutions.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    prod.solutions[i].pixel_id = static_cast<int>(i);
    prod.solutions[i].lon = rows[i].lon;
    prod.solutions[i].lat = rows[i].lat;
    prod.solutions[i].incidence_deg = rows[i].incidence_deg;
    prod.solutions[i].rate_mm_yr = rows[i].rate_cm_yr * 10.0;
    prod.solutions[i].std_mm_yr = rows[i].std_cm_yr * 10.0;
  }
  return field_stats(prod);
}

int cmd_stats(const std::string& csv_path) {
  const FieldStats st = stats_of_csv(csv_path);
  std::printf("n:      %zu\n", st.cdf.size());
  std::printf("median: %.4f mm/yr (%.5f cm/yr)\n", st.median, st.median * 0.1);
  std::printf("min:    %.4f mm/yr\n", st.min);
  std::printf("max:    %.4f mm/yr\n", st.max);
  return kExitOk;
}

int cmd_export(const std::string& product_path, const std::string& csv_path) {
  const auto rows = load_product_table(product_path);
  if (rows.empty())
    throw Error(ErrorCode::EmptyProduct, "product table has no rows");
  DisplacementProduct prod;
  prod.solutions.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& s = prod.solutions[i];
    s.pixel_id = rows[i].pixel_id;
    s.lon = rows[i].lon;
    s.lat = rows[i].lat;
    s.incidence_deg = rows[i].incidence_deg;
    s.rate_mm_yr = rows[i].rate_mm_yr;
    s.std_mm_yr = rows[i].std_mm_yr;
  }
  write_csv(prod, csv_path);
  std::cout << "wrote " << csv_path << " (" << rows.size() << " rows)\n";
  return kExitOk;
}

int cmd_plot(const std::string& csv_path, const std::string& out_dir) {
  const auto rows = load_csv(csv_path);
  if (rows.empty()) throw Error(ErrorCode::EmptyProduct, "CSV has no rows");
  fs::create_directories(out_dir);
  const FieldStats st = stats_of_csv(csv_path);
  std::string cdf = "# los_rate_mm_yr,fraction\n";
  char line[80];
  for (const auto& [v, f] : st.cdf) {
    std::snprintf(line, sizeof line, "%.6f,%.8f\n", v, f);
    cdf += line;
  }
  write_file_atomic((fs::path(out_dir) / "cdf.csv").string(), cdf);
  std::string map = "# lon,lat,los_rate_mm_yr\n";
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%.6f,%.6f,%.6f\n", r.lon, r.lat,
                  r.rate_cm_yr * 10.0);
    map += line;
  }
  write_file_atomic((fs::path(out_dir) / "velocity_map.csv").string(), map);
  std::cout << "wrote " << (fs::path(out_dir) / "cdf.csv").string() << " and "
            << (fs::path(out_dir) / "velocity_map.csv").string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multitemporal InSAR time-series processing"};
  app.require_subcommand(1);

  std::string config_path, out_dir, csv_path, product_path;
  std::uint64_t seed_value = 0;
  bool skip_gia = false, verbose = false;

  auto* sim = app.add_subcommand("simulate",
                                 "Generate a synthetic stack from a scene config");
  sim->add_option("--config", config_path, "scene config (JSON)")->required();
  sim->add_option("--output", out_dir, "output directory")->default_val("sim");
  auto* sim_seed = sim->add_option("--seed", seed_value, "override scene seed");
  sim->add_flag("--verbose", verbose, "chatty progress output");

  auto* run = app.add_subcommand("run", "Run the full processing chain");
  run->add_option("--config", config_path, "pipeline config (JSON)")->required();
  auto* run_seed = run->add_option("--seed", seed_value, "override config seed");
  run->add_option("--output", out_dir, "override output directory");
  run->add_flag("--skip-gia", skip_gia, "skip GIA subtraction");
  run->add_flag("--verbose", verbose, "chatty progress output");

  auto* stats = app.add_subcommand("stats", "Summary statistics of a velocity CSV");
  stats->add_option("--csv", csv_path, "5-column velocity CSV")->required();

  auto* exp = app.add_subcommand("export", "Convert a product table to the 5-column CSV");
  exp->add_option("--product", product_path, "product table (MTPROD)")->required();
  exp->add_option("--csv", csv_path, "output CSV path")->required();

  auto* plot = app.add_subcommand("plot",
                                  "Emit CDF and velocity-map tables for plotting");
  plot->add_option("--csv", csv_path, "5-column velocity CSV")->required();
  plot->add_option("--output", out_dir, "output directory")->default_val("plot");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (sim->parsed())
      return cmd_simulate(config_path, out_dir,
                          sim_seed->count() ? std::optional(seed_value)
                                            : std::nullopt,
                          verbose);
    if (run->parsed())
      return cmd_run(config_path,
                     run_seed->count() ? std::optional(seed_value)
                                       : std::nullopt,
                     out_dir, skip_gia, verbose);
    if (stats->parsed()) return cmd_stats(csv_path);
    if (exp->parsed()) return cmd_export(product_path, csv_path);
    if (plot->parsed()) return cmd_plot(csv_path, out_dir);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
