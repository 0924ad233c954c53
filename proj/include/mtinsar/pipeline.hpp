#pragma once

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mtinsar/calibration.hpp"
#include "mtinsar/catalog.hpp"
#include "mtinsar/coherence.hpp"
#include "mtinsar/corrections.hpp"
#include "mtinsar/errors.hpp"
#include "mtinsar/inversion.hpp"
#include "mtinsar/jsonutil.hpp"
#include "mtinsar/pairs.hpp"
#include "mtinsar/product.hpp"
#include "mtinsar/simulate.hpp"
#include "mtinsar/stack.hpp"
#include "mtinsar/triangulation.hpp"
#include "mtinsar/unwrap.hpp"

namespace mtinsar {

struct PipelineConfig {
  // inputs: exactly one of scene/stack; stack mode also needs a catalog file
  std::string scene_path;
  std::string stack_path;
  std::string catalog_path;
  std::string gnss_path;
  std::string gia_path;
  std::string output_dir = "out";
  std::optional<std::uint64_t> seed;  // overrides the scene seed when set
  // pair selection
  double perp_max_m = 150.0;
  double temp_max_days = 400.0;
  // elite pixels
  double coherence_threshold = 0.7;
  double rate_scan_mm_yr = 40.0;
  // unwrapping
  EdgeCostModel cost_model = EdgeCostModel::inverse_length;
  // corrections
  bool correct_atmosphere = true;
  bool correct_orbit = true;
  int atmo_levels = 4;
  bool robust_corrections = true;
  // inversion
  InversionOptions inversion;
  // calibration / GIA
  double gnss_radius_m = 200.0;
  bool subtract_gia_flag = true;
  // geometry fallback for stack mode (scene mode uses the scene's values)
  ViewGeometry geometry{};
  RadarConstants radar{};
};

inline PipelineConfig parse_pipeline_config(const Json& j) {
  check_keys(j, "config",
             {"version", "seed", "inputs", "output_dir", "pairs", "elite",
              "unwrap", "corrections", "inversion", "calibration", "gia",
              "geometry"});
  if (get_or<int>(j, "config", "version", 1) != 1)
    throw Error(ErrorCode::InvalidConfig, "unsupported config version");
  PipelineConfig c;
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();

  const auto& in = j.contains("inputs") ? j.at("inputs") : Json::object();
  check_keys(in, "inputs", {"scene", "stack", "catalog", "gnss", "gia_grid"});
  c.scene_path = get_or<std::string>(in, "inputs", "scene", "");
  c.stack_path = get_or<std::string>(in, "inputs", "stack", "");
  c.catalog_path = get_or<std::string>(in, "inputs", "catalog", "");
  c.gnss_path = get_or<std::string>(in, "inputs", "gnss", "");
  c.gia_path = get_or<std::string>(in, "inputs", "gia_grid", "");
  if (c.scene_path.empty() == c.stack_path.empty())
    throw Error(ErrorCode::InvalidConfig,
                "inputs must set exactly one of scene or stack");
  if (!c.stack_path.empty() && c.catalog_path.empty())
    throw Error(ErrorCode::InvalidConfig,
                "inputs.catalog is required with inputs.stack");
  c.output_dir = get_or<std::string>(j, "config", "output_dir", "out");
  if (c.output_dir.empty())
    throw Error(ErrorCode::InvalidConfig, "output_dir must not be empty");

  if (j.contains("pairs")) {
    const auto& p = j.at("pairs");
    check_keys(p, "pairs", {"perp_max_m", "temp_max_days"});
    c.perp_max_m = get_or<double>(p, "pairs", "perp_max_m", 150.0);
    c.temp_max_days = get_or<double>(p, "pairs", "temp_max_days", 400.0);
    require_positive(c.perp_max_m, "pairs.perp_max_m");
    require_positive(c.temp_max_days, "pairs.temp_max_days");
  }
  if (j.contains("elite")) {
    const auto& p = j.at("elite");
    check_keys(p, "elite", {"coherence_threshold", "rate_scan_mm_yr"});
    c.coherence_threshold =
        get_or<double>(p, "elite", "coherence_threshold", 0.7);
    c.rate_scan_mm_yr = get_or<double>(p, "elite", "rate_scan_mm_yr", 40.0);
    if (c.coherence_threshold < 0.0 || c.coherence_threshold > 1.0)
      throw Error(ErrorCode::InvalidConfig,
                  "elite.coherence_threshold must be in [0, 1]");
    require_positive(c.rate_scan_mm_yr, "elite.rate_scan_mm_yr");
  }
  if (j.contains("unwrap")) {
    const auto& p = j.at("unwrap");
    check_keys(p, "unwrap", {"cost_model"});
    const auto model =
        get_or<std::string>(p, "unwrap", "cost_model", "inverse_length");
    if (model == "inverse_length")
      c.cost_model = EdgeCostModel::inverse_length;
    else if (model == "unit")
      c.cost_model = EdgeCostModel::unit;
    else
      throw Error(ErrorCode::InvalidConfig,
                  "unwrap.cost_model must be inverse_length|unit");
  }
  if (j.contains("corrections")) {
    const auto& p = j.at("corrections");
    check_keys(p, "corrections", {"atmosphere", "orbit", "levels", "robust"});
    c.correct_atmosphere = get_or<bool>(p, "corrections", "atmosphere", true);
    c.correct_orbit = get_or<bool>(p, "corrections", "orbit", true);
    c.atmo_levels = get_or<int>(p, "corrections", "levels", 4);
    c.robust_corrections = get_or<bool>(p, "corrections", "robust", true);
    if (c.atmo_levels < 1)
      throw Error(ErrorCode::InvalidConfig, "corrections.levels must be >= 1");
  }
  if (j.contains("inversion")) {
    const auto& p = j.at("inversion");
    check_keys(p, "inversion", {"max_iter", "weight_tol", "tukey_c"});
    c.inversion.max_iter = get_or<int>(p, "inversion", "max_iter", 30);
    c.inversion.weight_tol = get_or<double>(p, "inversion", "weight_tol", 1e-6);
    c.inversion.tukey_c = get_or<double>(p, "inversion", "tukey_c", kTukeyC);
    if (c.inversion.max_iter < 1)
      throw Error(ErrorCode::InvalidConfig, "inversion.max_iter must be >= 1");
    require_positive(c.inversion.weight_tol, "inversion.weight_tol");
    require_positive(c.inversion.tukey_c, "inversion.tukey_c");
  }
  if (j.contains("calibration")) {
    const auto& p = j.at("calibration");
    check_keys(p, "calibration", {"radius_m"});
    c.gnss_radius_m = get_or<double>(p, "calibration", "radius_m", 200.0);
    require_positive(c.gnss_radius_m, "calibration.radius_m");
  }
  if (j.contains("gia")) {
    const auto& p = j.at("gia");
    check_keys(p, "gia", {"subtract"});
    c.subtract_gia_flag = get_or<bool>(p, "gia", "subtract", true);
  }
  if (j.contains("geometry")) {
    const auto& p = j.at("geometry");
    check_keys(p, "geometry", {"incidence_deg", "heading_deg", "wavelength_m"});
    c.geometry = ViewGeometry(
        get_or<double>(p, "geometry", "incidence_deg", 38.9),
        get_or<double>(p, "geometry", "heading_deg", 347.0));
    c.radar = RadarConstants(
        get_or<double>(p, "geometry", "wavelength_m", kDefaultWavelengthM));
  }
  return c;
}

inline PipelineConfig load_pipeline_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open config " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidConfig,
                std::string("config parse error: ") + e.what());
  }
  return parse_pipeline_config(j);
}

struct PipelineResult {
  DisplacementProduct product;  // calibrated, GIA still included
  std::optional<DisplacementProduct> product_gia_removed;
  FieldStats stats;
  std::optional<FieldStats> stats_gia_removed;
  Json report;
  std::vector<std::string> files_written;
};

namespace pipeline_detail {

/// Stage wrapper: failures carry the stage name and a remediation hint.
template <class Fn>
auto run_stage(const std::string& stage, const std::string& hint, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), "[stage " + stage + "] " + e.what() +
                              (hint.empty() ? "" : " (hint: " + hint + ")"));
  }
}

}  // namespace pipeline_detail

/// Execute the full chain: pairs -> stack -> elite -> unwrap -> atmosphere ->
/// orbit -> invert -> calibrate -> GIA -> stats -> products.
/// Every stage appends a report object; reports and products land in
/// cfg.output_dir. Deterministic for a fixed config and seed.
inline PipelineResult run_pipeline(const PipelineConfig& cfg,
                                   std::ostream* log = nullptr) {
  using pipeline_detail::run_stage;
  namespace fs = std::filesystem;

  PipelineResult result;
  Json& report = result.report;
  report["version"] = 1;
  report["stages"] = Json::array();
  auto say = [&](const std::string& msg) {
    if (log) (*log) << msg << "\n";
  };

  fs::create_directories(cfg.output_dir);
  fs::create_directories(fs::path(cfg.output_dir) / "reports");
  int stage_no = 0;
  auto emit_report = [&](const std::string& stage, Json body) {
    body["stage"] = stage;
    report["stages"].push_back(body);
    char name[64];
    std::snprintf(name, sizeof name, "%02d_%s.json", ++stage_no, stage.c_str());
    const auto path = (fs::path(cfg.output_dir) / "reports" / name).string();
    write_file_atomic(path, body.dump(2) + "\n");
    result.files_written.push_back(path);
  };

  // -- scene / catalog ------------------------------------------------------
  ViewGeometry geom = cfg.geometry;
  RadarConstants radar = cfg.radar;
  std::optional<BuiltScene> scene;
  AcquisitionCatalog catalog = run_stage(
      "catalog", "check inputs.scene / inputs.catalog paths", [&] {
        if (!cfg.scene_path.empty()) {
          SceneConfig sc = load_scene_config(cfg.scene_path);
          if (cfg.seed) sc.seed = *cfg.seed;
          scene = build_scene(sc);
          geom = scene->geometry;
          radar = scene->radar;
          return scene->catalog;
        }
        return load_catalog(cfg.catalog_path);
      });
  emit_report("catalog",
              {{"n_acquisitions", catalog.size()},
               {"first_date", format_date(catalog.date(0))},
               {"last_date", format_date(catalog.date(catalog.size() - 1))}});
  say("catalog: " + std::to_string(catalog.size()) + " acquisitions");

  // -- pair selection -------------------------------------------------------
  PairSet pairs = run_stage("pairs", "relax pairs.* thresholds", [&] {
    return select_pairs(catalog, cfg.perp_max_m, cfg.temp_max_days);
  });
  auto comps = connected_components(pairs, static_cast<int>(catalog.size()));
  std::vector<int> kept_acqs;
  if (comps.size() > 1) {
    // invert the largest component; report the rest as excluded
    std::size_t best = 0;
    for (std::size_t c = 1; c < comps.size(); ++c)
      if (comps[c].size() > comps[best].size()) best = c;
    kept_acqs = comps[best];
  } else {
    kept_acqs = comps.empty() ? std::vector<int>{} : comps[0];
  }
  {
    Json rep{{"n_pairs", pairs.size()},
             {"perp_max_m", cfg.perp_max_m},
             {"temp_max_days", cfg.temp_max_days},
             {"n_components", comps.size()},
             {"n_acquisitions_kept", kept_acqs.size()}};
    if (comps.size() > 1) {
      Json excluded = Json::array();
      for (std::size_t c = 0; c < comps.size(); ++c)
        if (comps[c] != kept_acqs)
          for (int a : comps[c]) excluded.push_back(a);
      rep["excluded_acquisitions"] = excluded;
    }
    emit_report("pairs", rep);
  }
  say("pairs: " + std::to_string(pairs.size()) + " interferograms, " +
      std::to_string(comps.size()) + " component(s)");

  // reduce catalog / pairs to the kept component
  AcquisitionCatalog sub_catalog = catalog;
  PairSet sub_pairs = pairs;
  std::vector<int> acq_new_index(catalog.size(), -1);
  if (kept_acqs.size() != catalog.size()) {
    std::vector<Acquisition> acqs;
    for (std::size_t k = 0; k < kept_acqs.size(); ++k) {
      Acquisition a = catalog[static_cast<std::size_t>(kept_acqs[k])];
      acq_new_index[static_cast<std::size_t>(kept_acqs[k])] =
          static_cast<int>(k);
      a.id = static_cast<int>(k);
      acqs.push_back(a);
    }
    sub_catalog = AcquisitionCatalog(std::move(acqs));
    sub_pairs.pairs.clear();
    for (const auto& [i, j] : pairs.pairs)
      if (acq_new_index[i] >= 0 && acq_new_index[j] >= 0)
        sub_pairs.pairs.emplace_back(acq_new_index[i], acq_new_index[j]);
  } else {
    for (std::size_t a = 0; a < catalog.size(); ++a)
      acq_new_index[a] = static_cast<int>(a);
  }
  if (sub_catalog.size() < 2)
    throw Error(ErrorCode::DisconnectedNetwork,
                "[stage pairs] fewer than 2 connected acquisitions "
                "(hint: relax pairs.* thresholds)");

  // -- stack (simulate or load) --------------------------------------------
  InterferogramStack stack = run_stage(
      "stack", "check the stack file and its pair indices", [&] {
        if (scene) {
          auto sim = generate_stack(scene->truth, sub_catalog, sub_pairs,
                                    radar, true);
          return std::move(sim.stack);
        }
        InterferogramStack loaded = load_stack(cfg.stack_path);
        // keep rows that survive both thresholds and the kept component
        std::vector<std::size_t> keep_rows;
        PairSet remapped;
        remapped.perp_max_m = cfg.perp_max_m;
        remapped.temp_max_days = cfg.temp_max_days;
        for (std::size_t k = 0; k < loaded.pairs.size(); ++k) {
          const auto& [i, j] = loaded.pairs.pairs[k];
          if (i < 0 || j < 0 || i >= static_cast<int>(catalog.size()) ||
              j >= static_cast<int>(catalog.size()))
            throw Error(ErrorCode::InvalidArgument,
                        "stack pair index outside catalog");
          const bool selected =
              std::binary_search(pairs.pairs.begin(), pairs.pairs.end(),
                                 std::make_pair(i, j));
          if (!selected || acq_new_index[i] < 0 || acq_new_index[j] < 0)
            continue;
          keep_rows.push_back(k);
          remapped.pairs.emplace_back(acq_new_index[i], acq_new_index[j]);
        }
        InterferogramStack out;
        out.pairs = remapped;
        out.pixels = loaded.pixels;
        out.wrapped = loaded.wrapped;
        out.phase.resize(static_cast<Eigen::Index>(keep_rows.size()),
                         loaded.phase.cols());
        out.weights.resize(static_cast<Eigen::Index>(keep_rows.size()),
                           loaded.weights.cols());
        for (std::size_t r = 0; r < keep_rows.size(); ++r) {
          out.phase.row(static_cast<Eigen::Index>(r)) =
              loaded.phase.row(static_cast<Eigen::Index>(keep_rows[r]));
          out.weights.row(static_cast<Eigen::Index>(r)) =
              loaded.weights.row(static_cast<Eigen::Index>(keep_rows[r]));
        }
        return out;
      });
  stack.check_consistent();
  emit_report("stack", {{"source", scene ? "simulated" : "loaded"},
                        {"n_pairs", stack.pairs.size()},
                        {"n_pixels", stack.pixels.size()},
                        {"wrapped", stack.wrapped}});
  say("stack: " + std::to_string(stack.pairs.size()) + " x " +
      std::to_string(stack.pixels.size()) + (stack.wrapped ? " (wrapped)" : ""));

  // -- elite pixel selection --------------------------------------------
  CoherenceOptions copt;
  copt.rate_scan_mm_yr = cfg.rate_scan_mm_yr;
  copt.radar = radar;
  std::vector<double> coh = run_stage(
      "elite", "lower elite.coherence_threshold", [&] {
        return bootstrap_coherence(stack, sub_catalog, copt);
      });
  const auto quality = make_quality(coh, cfg.coherence_threshold);
  const std::vector<int> elite = select_elite(quality, cfg.coherence_threshold);
  if (elite.size() < 3)
    throw Error(ErrorCode::InsufficientPixels,
                "[stage elite] only " + std::to_string(elite.size()) +
                    " pixels pass coherence " +
                    std::to_string(cfg.coherence_threshold) +
                    " (hint: lower elite.coherence_threshold)");
  InterferogramStack elite_stack = stack.subset_pixels(elite);
  emit_report("elite", {{"n_pixels_in", stack.pixels.size()},
                        {"n_pixels_out", elite.size()},
                        {"threshold", cfg.coherence_threshold}});
  say("elite: " + std::to_string(elite.size()) + " / " +
      std::to_string(stack.pixels.size()) + " pixels kept");

  // -- unwrap ----------------------------------------------------------
  std::vector<TriPoint> points(elite_stack.pixels.size());
  for (std::size_t p = 0; p < points.size(); ++p)
    points[p] = {elite_stack.pixels[p].x, elite_stack.pixels[p].y};
  const TriNetwork net = run_stage(
      "unwrap", "elite pixels may be collinear; check scene geometry",
      [&] { return triangulate(points); });
  long total_residues = 0;
  run_stage("unwrap", "", [&] {
    const auto costs = edge_costs(net, cfg.cost_model);
    std::vector<double> row(points.size());
    for (Eigen::Index k = 0; k < elite_stack.n_pairs(); ++k) {
      for (std::size_t p = 0; p < points.size(); ++p)
        row[p] = elite_stack.phase(k, static_cast<Eigen::Index>(p));
      const auto residues = compute_residues(net, row);
      for (int r : residues) total_residues += std::abs(r);
      const auto flow = solve_mcf(net, residues, costs);
      const auto unw = integrate_unwrapped(net, row, flow, 0);
      for (std::size_t p = 0; p < points.size(); ++p)
        elite_stack.phase(k, static_cast<Eigen::Index>(p)) = unw[p];
    }
    elite_stack.wrapped = false;
    return 0;
  });
  emit_report("unwrap", {{"n_nodes", net.nodes.size()},
                         {"n_edges", net.edges.size()},
                         {"n_triangles", net.triangles.size()},
                         {"total_abs_residues", total_residues},
                         {"cost_model", cfg.cost_model == EdgeCostModel::unit
                                            ? "unit"
                                            : "inverse_length"}});
  say("unwrap: " + std::to_string(net.triangles.size()) + " triangles, |residues| = " +
      std::to_string(total_residues));

  // -- atmospheric correction -------------------------------------------
  if (cfg.correct_atmosphere) {
    std::vector<double> elevation(elite_stack.pixels.size());
    for (std::size_t p = 0; p < elevation.size(); ++p)
      elevation[p] = elite_stack.pixels[p].elevation_m;
    Json per_pair = Json::array();
    run_stage("atmosphere", "set corrections.atmosphere=false to skip", [&] {
      AtmoOptions aopt;
      aopt.levels = cfg.atmo_levels;
      aopt.robust = cfg.robust_corrections;
      const AtmoEstimator estimator(net, elevation, aopt);
      std::vector<double> row(elevation.size());
      for (Eigen::Index k = 0; k < elite_stack.n_pairs(); ++k) {
        for (std::size_t p = 0; p < elevation.size(); ++p)
          row[p] = elite_stack.phase(k, static_cast<Eigen::Index>(p));
        const AtmoModel model = estimator.estimate(row);
        const auto corrected = apply_atmo_correction(model, row);
        for (std::size_t p = 0; p < elevation.size(); ++p)
          elite_stack.phase(k, static_cast<Eigen::Index>(p)) = corrected[p];
        per_pair.push_back({{"pair", k},
                            {"aggregate_coeff_rad_per_m", model.aggregate_coeff},
                            {"identifiable", model.identifiable},
                            {"residual_rms_rad", model.residual_rms}});
      }
      return 0;
    });
    emit_report("atmosphere",
                {{"levels", cfg.atmo_levels},
                 {"robust", cfg.robust_corrections},
                 {"interferograms", per_pair}});
    say("atmosphere: corrected " + std::to_string(elite_stack.n_pairs()) +
        " interferograms");
  }

  // -- orbital ramp correction --------------------------------------------
  if (cfg.correct_orbit) {
    Json per_pair = Json::array();
    run_stage("orbit", "set corrections.orbit=false to skip", [&] {
      RampOptions ropt;
      ropt.robust = cfg.robust_corrections;
      std::vector<double> row(points.size());
      for (Eigen::Index k = 0; k < elite_stack.n_pairs(); ++k) {
        for (std::size_t p = 0; p < points.size(); ++p)
          row[p] = elite_stack.phase(k, static_cast<Eigen::Index>(p));
        const RampModel ramp = estimate_ramp(row, points, ropt);
        const auto corrected = apply_ramp_correction(ramp, row, points);
        for (std::size_t p = 0; p < points.size(); ++p)
          elite_stack.phase(k, static_cast<Eigen::Index>(p)) = corrected[p];
        per_pair.push_back({{"pair", k},
                            {"a0_rad", ramp.a0},
                            {"a1_rad_per_px", ramp.a1},
                            {"a2_rad_per_px", ramp.a2},
                            {"residual_rms_rad", ramp.residual_rms}});
      }
      return 0;
    });
    emit_report("orbit", {{"robust", cfg.robust_corrections},
                          {"interferograms", per_pair}});
    say("orbit: corrected " + std::to_string(elite_stack.n_pairs()) +
        " interferograms");
  }

  // -- inversion ---------------------------------------------------------
  DisplacementProduct product = run_stage(
      "inversion", "network may be rank deficient; check pair thresholds",
      [&] {
        const DesignMatrix dm = design_matrix(
            sub_pairs, static_cast<int>(sub_catalog.size()), 0);
        return invert_stack(elite_stack, sub_catalog, dm, geom, radar,
                            cfg.inversion);
      });
  emit_report("inversion", {{"n_pixels", product.solutions.size()},
                            {"n_ok", product.n_ok()},
                            {"n_flagged",
                             product.solutions.size() - product.n_ok()},
                            {"n_epochs", product.epochs.size()},
                            {"ref_epoch", format_date(product.epochs[0])}});
  say("inversion: " + std::to_string(product.n_ok()) + " pixels inverted");

  // -- GNSS calibration -----------------------------------------------------
  if (!cfg.gnss_path.empty()) {
    const CalibrationResult cal = run_stage(
        "calibration", "increase calibration.radius_m", [&] {
          const GnssTie tie = load_gnss_tie(cfg.gnss_path);
          return calibrate_to_gnss(product, tie, geom, cfg.gnss_radius_m);
        });
    emit_report("calibration", {{"offset_mm_yr", cal.offset_mm_yr},
                                {"target_los_mm_yr", cal.target_los_mm_yr},
                                {"n_pixels_used", cal.n_pixels_used},
                                {"radius_m", cfg.gnss_radius_m}});
    say("calibration: offset " + std::to_string(cal.offset_mm_yr) + " mm/yr");
  }

  // -- GIA removal ----------------------------------------------------------
  if (!cfg.gia_path.empty() && cfg.subtract_gia_flag) {
    result.product_gia_removed = run_stage(
        "gia", "grid must cover the product extent", [&] {
          const GiaGrid grid = load_gia_grid(cfg.gia_path);
          DisplacementProduct residual = product;
          subtract_gia(residual, grid, geom);
          return residual;
        });
    emit_report("gia", {{"grid", cfg.gia_path}, {"subtracted", true}});
    say("gia: residual product computed");
  }

  // -- statistics -----------------------------------------------------------
  result.stats = run_stage("stats", "", [&] { return field_stats(product); });
  Json stats_rep{{"median_mm_yr", result.stats.median},
                 {"min_mm_yr", result.stats.min},
                 {"max_mm_yr", result.stats.max},
                 {"n_pixels", product.n_ok()}};
  if (result.product_gia_removed) {
    result.stats_gia_removed = field_stats(*result.product_gia_removed);
    stats_rep["gia_removed"] = {{"median_mm_yr", result.stats_gia_removed->median},
                                {"min_mm_yr", result.stats_gia_removed->min},
                                {"max_mm_yr", result.stats_gia_removed->max}};
  }
  emit_report("stats", stats_rep);
  say("stats: median " + std::to_string(result.stats.median) + " mm/yr");

  // -- products ---------------------------------------------------------
  run_stage("export", "", [&] {
    const auto dir = fs::path(cfg.output_dir);
    write_csv(product, (dir / "velocity.csv").string());
    result.files_written.push_back((dir / "velocity.csv").string());
    write_product_table(product, (dir / "product.txt").string());
    result.files_written.push_back((dir / "product.txt").string());
    write_timeseries_table(product, (dir / "timeseries.txt").string());
    result.files_written.push_back((dir / "timeseries.txt").string());
    if (result.product_gia_removed) {
      write_csv(*result.product_gia_removed,
                (dir / "velocity_gia_removed.csv").string());
      result.files_written.push_back((dir / "velocity_gia_removed.csv").string());
      write_product_table(*result.product_gia_removed,
                          (dir / "product_gia_removed.txt").string());
      result.files_written.push_back(
          (dir / "product_gia_removed.txt").string());
    }
    return 0;
  });
  write_file_atomic((fs::path(cfg.output_dir) / "report.json").string(),
                    report.dump(2) + "\n");
  result.files_written.push_back(
      (fs::path(cfg.output_dir) / "report.json").string());
  result.product = std::move(product);
  return result;
}

}  // namespace mtinsar
