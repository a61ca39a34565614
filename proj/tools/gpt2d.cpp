// Command-line front end: forward GPT computation, inversion, roundtrip
// sweeps, and shape export.  Exit codes: 0 ok, 2 config error, 3 numerical
// failure.

#include <chrono>
#include <filesystem>
#include <future>
#include <iostream>
#include <random>

#include <CLI11.hpp>

#include "gpt2d/gpt2d.hpp"

namespace fs = std::filesystem;
using namespace gpt2d;

namespace {

struct ExperimentConfig {
  std::string shape = "kite";
  int nodes = 1024;
  int corner_depth = 12;
  std::string center = "0,0";
  double radius = 1.0;
  std::string map_file;
  int random_coeffs = 4;

  double sigma_c = 3.0;
  double sigma_m = 1.0;
  std::vector<int> ords{10};
  std::string route = "nystrom";
  double tol = 1e-10;
  int max_iter = 200;
  std::string out = "out";
  std::uint64_t seed = 1;
  int jobs = 1;
  int svg_points = 512;
  bool verbose = false;
};

Complex parse_complex_pair(const std::string& s) {
  const size_t comma = s.find(',');
  if (comma == std::string::npos) throw ConfigError("expected complex as re,im: " + s);
  try {
    return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
  } catch (const std::exception&) {
    throw ConfigError("expected complex as re,im: " + s);
  }
}

void apply_config_file(ExperimentConfig& c, const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (j.contains("shape")) c.shape = j.at("shape").get<std::string>();
  if (j.contains("nodes")) c.nodes = j.at("nodes").get<int>();
  if (j.contains("corner_depth")) c.corner_depth = j.at("corner_depth").get<int>();
  if (j.contains("center")) {
    const Complex z = detail::complex_from_json(j.at("center"));
    c.center = std::to_string(z.real()) + "," + std::to_string(z.imag());
  }
  if (j.contains("radius")) c.radius = j.at("radius").get<double>();
  if (j.contains("map_file")) c.map_file = j.at("map_file").get<std::string>();
  if (j.contains("random_coeffs")) c.random_coeffs = j.at("random_coeffs").get<int>();
  if (j.contains("sigma_c")) c.sigma_c = j.at("sigma_c").get<double>();
  if (j.contains("sigma_m")) c.sigma_m = j.at("sigma_m").get<double>();
  if (j.contains("ord")) {
    c.ords.clear();
    if (j.at("ord").is_array())
      for (const Json& o : j.at("ord")) c.ords.push_back(o.get<int>());
    else
      c.ords.push_back(j.at("ord").get<int>());
  }
  if (j.contains("route")) c.route = j.at("route").get<std::string>();
  if (j.contains("tol")) c.tol = j.at("tol").get<double>();
  if (j.contains("max_iter")) c.max_iter = j.at("max_iter").get<int>();
  if (j.contains("out")) c.out = j.at("out").get<std::string>();
  if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("jobs")) c.jobs = j.at("jobs").get<int>();
  if (j.contains("svg_points")) c.svg_points = j.at("svg_points").get<int>();
}

void validate(const ExperimentConfig& c) {
  if (c.ords.empty()) throw ConfigError("ord list must be nonempty");
  for (int o : c.ords)
    if (o < 2) throw ConfigError("every ord must be >= 2");
  if (c.route != "nystrom" && c.route != "analytic")
    throw ConfigError("route must be nystrom or analytic");
  if (c.jobs < 1) throw ConfigError("jobs must be >= 1");
  if (c.svg_points < 3) throw ConfigError("svg_points must be >= 3");
}

// Ground truth for an experiment: a shape spec and, when the shape is
// map-generated, the exact exterior map.
struct Truth {
  ShapeSpec spec;
  bool has_map = false;
  ConformalMap map;
};

Truth resolve_shape(const ExperimentConfig& c) {
  Truth t;
  t.spec.nodes = c.nodes;
  t.spec.corner_depth = c.corner_depth;
  if (c.shape == "random") {
    std::mt19937_64 rng(c.seed);
    t.map = random_map(rng, c.random_coeffs);
    t.has_map = true;
    t.spec.shape = Shape::from_conformal;
    t.spec.map = t.map;
    return t;
  }
  t.spec.shape = shape_from_name(c.shape);
  if (t.spec.shape == Shape::disk) {
    t.spec.center = parse_complex_pair(c.center);
    t.spec.radius = c.radius;
    t.map.gamma = c.radius;
    t.map.a0 = t.spec.center;
    t.has_map = true;
  }
  if (t.spec.shape == Shape::from_conformal) {
    if (c.map_file.empty()) throw ConfigError("from_conformal needs --map <file.json>");
    t.map = conformal_map_from_json(Json::parse(read_text_file(c.map_file)));
    t.spec.map = t.map;
    t.has_map = true;
  }
  return t;
}

GptSet run_forward(const ExperimentConfig& c, const Truth& t, int ord, std::ostream* warn) {
  if (c.route == "analytic") {
    if (!t.has_map)
      throw ConfigError("analytic route needs a map-generated shape (disk, from_conformal, random)");
    return gpt_analytic(t.map, Material::from_sigma(c.sigma_c, c.sigma_m), ord);
  }
  const BoundaryCurve curve = make_curve(t.spec, warn);
  return gpt_nystrom(curve, Material::from_sigma(c.sigma_c, c.sigma_m), ord, warn);
}

void write_overlay(const fs::path& path, const Truth& t, const ConformalMap& recovered,
                   int svg_points) {
  std::vector<SvgPolyline> lines;
  SvgPolyline truth;
  ShapeSpec plot_spec = t.spec;
  if (!plot_spec.has_corners() && !detail::is_pow2(plot_spec.nodes)) plot_spec.nodes = 1024;
  const BoundaryCurve tc = make_curve(plot_spec);
  for (int j = 0; j < tc.size(); ++j) truth.points.push_back(tc.nodes(j));
  lines.push_back(truth);

  SvgPolyline recon;
  recon.stroke = "#cc0000";
  recon.dashed = true;
  const BoundaryCurve rc = map_boundary(recovered, svg_points);
  for (int j = 0; j < rc.size(); ++j) recon.points.push_back(rc.nodes(j));
  lines.push_back(recon);

  std::ostringstream os;
  write_svg(os, lines);
  write_text_file(path.string(), os.str());
}

void log_gpt_diagnostics(const GptSet& g, std::ostream& err) {
  err << "gpt: ord=" << g.ord << " N1 symmetry residual=" << g.n1_symmetry_residual()
      << " N2 Hermitian residual=" << g.n2_hermitian_residual();
  try {
    err << " N2 condition=" << ModifiedGptEvaluator(g).n2_condition();
  } catch (const NumericalError&) {
    err << " N2 condition=singular";
  }
  err << "\n";
}

int cmd_shapes(const ExperimentConfig& c, bool shape_given) {
  if (!shape_given) {
    std::cout << "kite\nstarfish\ncap\nperturbed_ellipse\ndisk\nfrom_conformal\n";
    return 0;
  }
  const Truth t = resolve_shape(c);
  const BoundaryCurve curve = make_curve(t.spec, c.verbose ? &std::cerr : nullptr);
  std::ostringstream os;
  write_curve_csv(os, curve);
  if (c.out == "-")
    std::cout << os.str();
  else {
    write_text_file(c.out, os.str());
    std::cerr << "wrote " << c.out << " (" << curve.size() << " nodes)\n";
  }
  return 0;
}

int cmd_forward(const ExperimentConfig& c, const std::string& dump_curve) {
  validate(c);
  const Truth t = resolve_shape(c);
  const int ord = *std::max_element(c.ords.begin(), c.ords.end());
  std::ostream* warn = c.verbose ? &std::cerr : nullptr;

  const GptSet g = run_forward(c, t, ord, warn);
  log_gpt_diagnostics(g, std::cerr);

  fs::create_directories(c.out);
  write_text_file((fs::path(c.out) / "gpt.json").string(), to_json(g).dump(2) + "\n");
  std::ostringstream csv;
  write_gpt_csv(csv, g);
  write_text_file((fs::path(c.out) / "gpt.csv").string(), csv.str());
  if (!dump_curve.empty()) {
    std::ostringstream cs;
    write_curve_csv(cs, make_curve(t.spec));
    write_text_file(dump_curve, cs.str());
  }
  std::cout << "wrote " << (fs::path(c.out) / "gpt.json").string() << " and gpt.csv (ord " << ord
            << ", " << provenance_name(g.provenance) << ")\n";
  return 0;
}

int cmd_invert(const ExperimentConfig& c, const std::string& input, bool shape_given,
               bool ord_given) {
  validate(c);
  GptSet g = read_measurement_file(input);
  if (g.ord < 2) throw ConfigError("measurement file must have ord >= 2");
  if (ord_given) {
    const int ord = std::min(g.ord, *std::max_element(c.ords.begin(), c.ords.end()));
    if (ord < g.ord) g = g.truncated(ord);
  }

  InversionOptions opts;
  opts.tol = c.tol;
  opts.max_iter = c.max_iter;
  opts.sigma_m = c.sigma_m;
  opts.warn = &std::cerr;
  const ReconstructionResult r = reconstruct(g, opts);

  fs::create_directories(c.out);
  write_text_file((fs::path(c.out) / "result.json").string(), to_json(r).dump(2) + "\n");
  std::ostringstream trace;
  trace << "iteration,relative_step\n";
  for (size_t k = 0; k < r.residual_trace.size(); ++k)
    trace << k + 1 << ',' << detail::fmt17(r.residual_trace[k]) << '\n';
  write_text_file((fs::path(c.out) / "trace.csv").string(), trace.str());

  if (shape_given) {
    const Truth t = resolve_shape(c);
    write_overlay(fs::path(c.out) / "overlay.svg", t, r.map_rec, c.svg_points);
  } else {
    SvgPolyline recon;
    recon.stroke = "#cc0000";
    recon.dashed = true;
    const BoundaryCurve rc = map_boundary(r.map_rec, c.svg_points);
    for (int j = 0; j < rc.size(); ++j) recon.points.push_back(rc.nodes(j));
    std::ostringstream os;
    write_svg(os, {recon});
    write_text_file((fs::path(c.out) / "overlay.svg").string(), os.str());
  }

  std::cout << "lambda_rec = " << r.lambda_rec << "  sigma_rec = " << r.sigma_rec
            << "  iterations = " << r.iterations << "\n";
  return 0;
}

struct SweepRow {
  int ord = 0;
  ReconstructionResult res;
  double distance = 0.0;
  double ms = 0.0;
};

int cmd_roundtrip(const ExperimentConfig& c) {
  validate(c);
  const Truth t = resolve_shape(c);
  const double lambda_true = Material::from_sigma(c.sigma_c, c.sigma_m).lambda;
  const int ord_max = *std::max_element(c.ords.begin(), c.ords.end());
  std::ostream* warn = c.verbose ? &std::cerr : nullptr;

  const auto t0 = std::chrono::steady_clock::now();
  const GptSet full = run_forward(c, t, ord_max, warn);
  const double forward_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  log_gpt_diagnostics(full, std::cerr);

  const BoundaryCurve truth_curve = make_curve(t.spec);

  auto run_one = [&](int ord) {
    const auto s = std::chrono::steady_clock::now();
    InversionOptions opts;
    opts.tol = c.tol;
    opts.max_iter = c.max_iter;
    opts.sigma_m = c.sigma_m;
    SweepRow row;
    row.ord = ord;
    row.res = reconstruct(full.truncated(ord), opts);
    row.distance = shape_distance(truth_curve, map_boundary(row.res.map_rec, c.svg_points));
    row.ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - s).count();
    return row;
  };

  // items are pure over the shared forward data; results land in ord order
  std::vector<SweepRow> rows(c.ords.size());
  for (size_t base = 0; base < c.ords.size(); base += static_cast<size_t>(c.jobs)) {
    std::vector<std::future<SweepRow>> batch;
    for (size_t k = base; k < std::min(c.ords.size(), base + static_cast<size_t>(c.jobs)); ++k)
      batch.push_back(std::async(std::launch::async, run_one, c.ords[k]));
    for (size_t k = 0; k < batch.size(); ++k) rows[base + k] = batch[k].get();
  }

  fs::create_directories(c.out);
  std::ostringstream csv;
  csv << "ord,lambda_rec,lambda_abs_err,shape_distance,iterations,n2_condition\n";
  std::cout << "forward: " << forward_ms << " ms (" << provenance_name(full.provenance) << ", ord "
            << ord_max << ")\n";
  std::cout << "ord  lambda_rec   |err|      shape_dist  iters  runtime_ms\n";
  for (const SweepRow& row : rows) {
    csv << row.ord << ',' << detail::fmt17(row.res.lambda_rec) << ','
        << detail::fmt17(std::abs(row.res.lambda_rec - lambda_true)) << ','
        << detail::fmt17(row.distance) << ',' << row.res.iterations << ','
        << detail::fmt17(row.res.n2_condition) << '\n';
    char line[160];
    std::snprintf(line, sizeof line, "%-4d %-12.6f %-10.2e %-11.4e %-6d %.1f", row.ord,
                  row.res.lambda_rec, std::abs(row.res.lambda_rec - lambda_true), row.distance,
                  row.res.iterations, row.ms);
    std::cout << line << "\n";

    write_text_file(
        (fs::path(c.out) / ("result_ord" + std::to_string(row.ord) + ".json")).string(),
        to_json(row.res).dump(2) + "\n");
    write_overlay(fs::path(c.out) / ("overlay_ord" + std::to_string(row.ord) + ".svg"), t,
                  row.res.map_rec, c.svg_points);
  }
  write_text_file((fs::path(c.out) / "summary.csv").string(), csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"planar conductivity-inclusion toolkit: forward GPTs and conformal-map inversion"};
  app.require_subcommand(1);

  ExperimentConfig cfg;
  std::string config_file, input_file, dump_curve;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_file, "JSON experiment config; flags override");
    sub->add_option("--shape", cfg.shape,
                    "kite|starfish|cap|perturbed_ellipse|disk|from_conformal|random");
    sub->add_option("--nodes", cfg.nodes, "boundary node budget");
    sub->add_option("--corner-depth", cfg.corner_depth, "dyadic grading depth at corners");
    sub->add_option("--center", cfg.center, "disk center re,im");
    sub->add_option("--radius", cfg.radius, "disk radius");
    sub->add_option("--map", cfg.map_file, "conformal map JSON for from_conformal");
    sub->add_option("--coeffs", cfg.random_coeffs, "coefficient count for random maps");
    sub->add_option("--sigma-c", cfg.sigma_c, "inclusion conductivity (0 or inf for extremes)");
    sub->add_option("--sigma-m", cfg.sigma_m, "background conductivity");
    sub->add_option("--ord", cfg.ords, "GPT truncation order(s)")->delimiter(',');
    sub->add_option("--route", cfg.route, "nystrom|analytic");
    sub->add_option("--tol", cfg.tol, "fixed-point relative tolerance");
    sub->add_option("--max-iter", cfg.max_iter, "fixed-point iteration cap");
    sub->add_option("--out", cfg.out, "output directory (or file for shapes)");
    sub->add_option("--jobs", cfg.jobs, "parallel sweep items");
    sub->add_option("--seed", cfg.seed, "seed for random maps");
    sub->add_option("--svg-points", cfg.svg_points, "reconstructed boundary sample count");
    sub->add_flag("-v,--verbose", cfg.verbose, "diagnostics to stderr");
  };

  CLI::App* fwd = app.add_subcommand("forward", "compute GPTs and write a measurement file");
  add_common(fwd);
  fwd->add_option("--dump-curve", dump_curve, "also export the discretized boundary CSV");

  CLI::App* inv =
      app.add_subcommand("invert", "reconstruct contrast and shape from a measurement file");
  add_common(inv);
  inv->add_option("--in", input_file, "measurement file (JSON or CSV)")->required();

  CLI::App* rt = app.add_subcommand("roundtrip", "forward then invert across an ord sweep");
  add_common(rt);

  CLI::App* sh = app.add_subcommand("shapes", "list built-in shapes or export one as CSV");
  add_common(sh);
  (void)rt;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    if (!config_file.empty()) {
      // config file first, explicit flags on top
      ExperimentConfig from_file = cfg;
      apply_config_file(from_file, config_file);
      ExperimentConfig merged = from_file;
      auto flagged = [&](const std::string& name) { return sub->count(name) > 0; };
      if (flagged("--shape")) merged.shape = cfg.shape;
      if (flagged("--nodes")) merged.nodes = cfg.nodes;
      if (flagged("--corner-depth")) merged.corner_depth = cfg.corner_depth;
      if (flagged("--center")) merged.center = cfg.center;
      if (flagged("--radius")) merged.radius = cfg.radius;
      if (flagged("--map")) merged.map_file = cfg.map_file;
      if (flagged("--coeffs")) merged.random_coeffs = cfg.random_coeffs;
      if (flagged("--sigma-c")) merged.sigma_c = cfg.sigma_c;
      if (flagged("--sigma-m")) merged.sigma_m = cfg.sigma_m;
      if (flagged("--ord")) merged.ords = cfg.ords;
      if (flagged("--route")) merged.route = cfg.route;
      if (flagged("--tol")) merged.tol = cfg.tol;
      if (flagged("--max-iter")) merged.max_iter = cfg.max_iter;
      if (flagged("--out")) merged.out = cfg.out;
      if (flagged("--jobs")) merged.jobs = cfg.jobs;
      if (flagged("--seed")) merged.seed = cfg.seed;
      if (flagged("--svg-points")) merged.svg_points = cfg.svg_points;
      merged.verbose = cfg.verbose;
      cfg = merged;
    }

    const bool shape_given = sub->count("--shape") > 0 || !config_file.empty();
    const bool ord_given = sub->count("--ord") > 0 || !config_file.empty();
    if (app.got_subcommand("shapes")) return cmd_shapes(cfg, shape_given);
    if (app.got_subcommand("forward")) return cmd_forward(cfg, dump_curve);
    if (app.got_subcommand("invert")) return cmd_invert(cfg, input_file, shape_given, ord_given);
    if (app.got_subcommand("roundtrip")) return cmd_roundtrip(cfg);
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
