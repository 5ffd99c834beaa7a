// hullpeel: simulate power-law Poisson processes, peel their convex layers
// and run the limit-shape / scaling-exponent experiments.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "hullpeel/hullpeel.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hullpeel;

namespace {

constexpr const char* tool_version = "0.1.0";

enum ExitCode : int { ok = 0, config_error = 2, numerical_error = 3, check_failed = 4 };

struct CommonFlags {
  double alpha = 1.0;
  std::string measure = "uniform";
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  unsigned threads = 1;
  bool dry_run = false;
  std::string sampler = "series";
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--alpha", f.alpha, "tail exponent alpha in [0.3, 3]");
  cmd->add_option("--measure", f.measure, "'uniform' or path to a measure JSON file");
  cmd->add_option("--seed", f.seed, "master RNG seed");
  cmd->add_option("--out-dir", f.out_dir, "output directory");
  cmd->add_option("--threads", f.threads, "replication worker threads")->check(CLI::PositiveNumber);
  cmd->add_flag("--dry-run", f.dry_run, "validate configuration and write the manifest only");
  cmd->add_option("--sampler", f.sampler, "series | per-ray (atomic measures only)")
      ->check(CLI::IsMember({"series", "per-ray"}));
}

// Collects outputs and writes the manifest last.
class Run {
 public:
  Run(std::string command, const CommonFlags& flags)
      : command_(std::move(command)), dir_(flags.out_dir), start_(std::chrono::steady_clock::now()) {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    started_at_ = buf;
    fs::create_directories(dir_);
  }

  fs::path path(const std::string& name) const {
    fs::path p(name);
    return p.is_absolute() ? p : dir_ / p;
  }

  std::ofstream open(const std::string& name) {
    const fs::path p = path(name);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + p.string());
    outputs_.push_back(p.string());
    spdlog::debug("writing {}", p.string());
    return out;
  }

  void write_json(const std::string& name, const json& j) { open(name) << j.dump(2) << '\n'; }

  void finish(const json& config, const json& seeds) {
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    json m{{"command", command_},
           {"config", config},
           {"rng_name", std::string(RngStream::algorithm_name)},
           {"seeds", seeds},
           {"tool_version", tool_version},
           {"started_at", started_at_},
           {"wall_clock_seconds", secs},
           {"outputs", outputs_}};
    std::ofstream out(dir_ / "manifest.json", std::ios::binary);
    out << m.dump(2) << '\n';
    spdlog::info("{} finished in {:.2f}s, {} output file(s)", command_, secs, outputs_.size());
  }

 private:
  std::string command_;
  fs::path dir_;
  std::chrono::steady_clock::time_point start_;
  std::string started_at_;
  std::vector<std::string> outputs_;
};

void check_alpha(double alpha) {
  if (!(alpha >= min_alpha && alpha <= max_alpha))
    throw Error(ErrorKind::InvalidArgument, "--alpha " + io::format_double(alpha) + " is outside [0.3, 3]");
}

ProcessConfig load_config(const CommonFlags& f) {
  check_alpha(f.alpha);
  return ProcessConfig::make(f.alpha, io::load_measure(f.measure), f.seed);
}

Sampler sampler_of(const CommonFlags& f) { return f.sampler == "per-ray" ? Sampler::PerRay : Sampler::Series; }

json common_json(const CommonFlags& f, const SpectralMeasure& m) {
  return json{{"alpha", f.alpha},        {"measure", io::measure_to_json(m)}, {"measure_source", f.measure},
              {"seed", f.seed},          {"threads", f.threads},             {"sampler", f.sampler},
              {"dry_run", f.dry_run}};
}

// ---------------------------------------------------------------------------

struct SimulateFlags {
  std::size_t n = 1000;
};

int cmd_simulate(const CommonFlags& f, const SimulateFlags& s) {
  const ProcessConfig config = load_config(f);
  if (s.n == 0) throw Error(ErrorKind::InvalidArgument, "--n must be positive");
  Run run("simulate", f);
  json cfg = common_json(f, config.measure);
  cfg["n"] = s.n;
  if (!f.dry_run) {
    PointSeq seq = make_sequence(config, 0, sampler_of(f));
    seq.extend(s.n);
    auto out = run.open("points.csv");
    io::write_points_csv(out, seq.points());
    run.write_json("points_meta.json", io::points_metadata(config, seq.size()));
  }
  run.finish(cfg, json::array({f.seed}));
  return ok;
}

// ---------------------------------------------------------------------------

struct PeelFlags {
  std::size_t layers = 100;
  std::string svg;
  bool normalize = false;
  bool overlay_circle = false;
  std::vector<std::size_t> svg_layers{25, 50, 100, 150};
  bool polygons = false;
  std::size_t buffer_cap = StreamOptions{}.buffer_cap;
};

int cmd_peel(const CommonFlags& f, const PeelFlags& p) {
  const ProcessConfig config = load_config(f);
  if (p.layers == 0) throw Error(ErrorKind::InvalidArgument, "--layers must be positive");
  Run run("peel", f);
  json cfg = common_json(f, config.measure);
  cfg.update({{"layers", p.layers}, {"svg", p.svg}, {"normalize", p.normalize}, {"overlay_circle", p.overlay_circle},
              {"svg_layers", p.svg_layers}, {"polygons", p.polygons}, {"buffer_cap", p.buffer_cap}});
  if (!f.dry_run) {
    PointSeq seq = make_sequence(config, 0, sampler_of(f));
    std::vector<LayerRecord> layers;
    try {
      layers = peel_stream(seq, p.layers, StreamOptions{p.buffer_cap});
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::BufferExplosion)
        spdlog::error("buffer cap hit; the measure may be close to unilateral, or raise --buffer-cap");
      throw;
    }
    {
      auto out = run.open("layers.csv");
      io::write_layers_csv(out, layers);
    }
    if (p.polygons) run.write_json("polygons.json", io::layers_polygons_json(layers));
    if (!p.svg.empty()) {
      std::vector<io::SvgLayer> picked;
      for (std::size_t k : p.svg_layers)
        if (k >= 1 && k <= layers.size()) {
          const auto& l = layers[k - 1];
          picked.push_back({p.normalize ? scale(l.polygon, 1.0 / l.rho) : l.polygon, "k=" + std::to_string(k)});
        }
      if (picked.empty()) picked.push_back({p.normalize ? scale(layers.back().polygon, 1.0 / layers.back().rho)
                                                        : layers.back().polygon,
                                            "k=" + std::to_string(layers.size())});
      auto out = run.open(p.svg);
      io::write_svg(out, picked, io::SvgOptions{p.overlay_circle});
    }
  }
  run.finish(cfg, json::array({f.seed}));
  return ok;
}

// ---------------------------------------------------------------------------

struct EstimateFlags {
  std::string config_file;
  std::vector<double> alphas;
  std::size_t k_min = default_burn_in;
  std::size_t k_max = 500;
  std::size_t replications = 200;
  bool check = false;
  std::vector<std::string> outputs;
};

struct Tolerances {
  static constexpr double gamma_n = 0.1;
  static constexpr double gamma_rel = 0.15;
  static constexpr double ratio = 0.1;
  static constexpr double slope = 0.1;
  static constexpr double mult_l = 0.2;
  static constexpr double mult_a = 0.3;
  static constexpr double mult_n = 0.1;
};

json estimate_checks(const ExponentEstimate& e) {
  const double cl = 1.5 / e.alpha, ca = 3.0 / e.alpha;
  const double ratio = e.gamma_a / e.gamma_l;
  json j{{"gamma_n", std::abs(e.gamma_n - 0.5) <= Tolerances::gamma_n},
         {"gamma_l", std::abs(e.gamma_l / cl - 1.0) <= Tolerances::gamma_rel},
         {"gamma_a", std::abs(e.gamma_a / ca - 1.0) <= Tolerances::gamma_rel},
         {"ratio", std::abs(ratio - 2.0) <= Tolerances::ratio}};
  return j;
}

bool all_true(const json& j) {
  for (const auto& [k, v] : j.items())
    if (v.is_boolean() && !v.get<bool>()) return false;
  return true;
}

int cmd_estimate(CommonFlags f, EstimateFlags e, const CLI::App& app) {
  // Config file first, explicit flags override it.
  std::string measure_src = f.measure;
  json file_measure;
  if (!e.config_file.empty()) {
    const json c = io::read_json_file(e.config_file);
    auto given = [&](const char* flag) { return app.count(flag) > 0; };
    if (c.contains("alphas") && !given("--alphas") && !given("--alpha")) e.alphas = c["alphas"].get<std::vector<double>>();
    if (c.contains("alpha") && !given("--alphas") && !given("--alpha")) e.alphas = {c["alpha"].get<double>()};
    if (c.contains("k_min") && !given("--k-min")) e.k_min = c["k_min"].get<std::size_t>();
    if (c.contains("k_max") && !given("--k-max")) e.k_max = c["k_max"].get<std::size_t>();
    if (c.contains("replications") && !given("--replications")) e.replications = c["replications"].get<std::size_t>();
    if (c.contains("seed") && !given("--seed")) f.seed = c["seed"].get<std::uint64_t>();
    if (c.contains("outputs") && !given("--outputs")) e.outputs = c["outputs"].get<std::vector<std::string>>();
    if (c.contains("measure") && !given("--measure")) {
      if (c["measure"].is_string()) measure_src = c["measure"].get<std::string>();
      else file_measure = c["measure"];
    }
  } else if (app.count("--alpha") && e.alphas.empty()) {
    e.alphas = {f.alpha};
  }
  if (e.alphas.empty()) throw Error(ErrorKind::InvalidArgument, "no alpha values given (--alphas, --alpha or config)");
  for (double a : e.alphas) check_alpha(a);
  if (e.replications == 0) throw Error(ErrorKind::InvalidArgument, "--replications must be positive");
  if (e.k_min < 1 || e.k_max < e.k_min + 2) throw Error(ErrorKind::InvalidArgument, "need 1 <= k_min and k_min + 2 <= k_max");
  const SpectralMeasure measure = file_measure.is_null() ? io::load_measure(measure_src) : io::measure_from_json(file_measure);
  if (e.outputs.empty()) e.outputs = {"exponents", "replications", "summary"};
  for (const auto& o : e.outputs)
    if (o != "exponents" && o != "replications" && o != "summary")
      throw Error(ErrorKind::InvalidArgument, "unknown output '" + o + "'");
  auto wants = [&](const char* o) { return std::find(e.outputs.begin(), e.outputs.end(), o) != e.outputs.end(); };

  Run run("estimate", f);
  f.measure = measure_src;
  json cfg = common_json(f, measure);
  cfg.update({{"alphas", e.alphas}, {"k_min", e.k_min}, {"k_max", e.k_max}, {"replications", e.replications},
              {"check", e.check}, {"outputs", e.outputs}});
  if (!e.config_file.empty()) cfg["config_file"] = e.config_file;
  if (f.dry_run) {
    run.finish(cfg, json::array({f.seed}));
    return ok;
  }

  std::vector<ExponentEstimate> estimates;
  for (double a : e.alphas) {
    spdlog::info("alpha={} : {} replication(s), k in [{}, {}]", a, e.replications, e.k_min, e.k_max);
    estimates.push_back(estimate_exponents(a, measure, {e.k_min, e.k_max}, e.replications, f.seed, f.threads));
  }

  if (wants("exponents")) {
    auto out = run.open("exponents.csv");
    out << "alpha,gamma_l,stderr_l,gamma_a,stderr_a,gamma_n,stderr_n,k_min,k_max,replications\n";
    for (const auto& x : estimates)
      out << io::format_double(x.alpha) << ',' << io::format_double(x.gamma_l) << ',' << io::format_double(x.stderr_l)
          << ',' << io::format_double(x.gamma_a) << ',' << io::format_double(x.stderr_a) << ','
          << io::format_double(x.gamma_n) << ',' << io::format_double(x.stderr_n) << ',' << x.k_range.k_min << ','
          << x.k_range.k_max << ',' << x.replications << '\n';
  }
  if (wants("replications")) {
    auto out = run.open("replications.csv");
    out << "alpha,replication,gamma_l,gamma_a,gamma_n\n";
    for (const auto& x : estimates)
      for (std::size_t r = 0; r < x.per_replication.size(); ++r) {
        const auto& p = x.per_replication[r];
        out << io::format_double(x.alpha) << ',' << r << ',' << io::format_double(p.gamma_l) << ','
            << io::format_double(p.gamma_a) << ',' << io::format_double(p.gamma_n) << '\n';
      }
  }

  json summary{{"estimates", json::array()},
               {"conjectured", {{"gamma_l", "3/(2 alpha)"}, {"gamma_a", "3/alpha"}, {"gamma_n", 0.5}}},
               {"tolerances",
                {{"gamma_n_abs", Tolerances::gamma_n},
                 {"gamma_l_rel", Tolerances::gamma_rel},
                 {"gamma_a_rel", Tolerances::gamma_rel},
                 {"ratio_abs", Tolerances::ratio},
                 {"regression_slope_abs", Tolerances::slope},
                 {"multiplier_abs", {{"l", Tolerances::mult_l}, {"a", Tolerances::mult_a}, {"n", Tolerances::mult_n}}}}}};
  bool pass = true;
  for (const auto& x : estimates) {
    json checks = estimate_checks(x);
    pass = pass && all_true(checks);
    summary["estimates"].push_back({{"alpha", x.alpha},
                                    {"gamma_l", x.gamma_l},
                                    {"stderr_l", x.stderr_l},
                                    {"gamma_a", x.gamma_a},
                                    {"stderr_a", x.stderr_a},
                                    {"gamma_n", x.gamma_n},
                                    {"stderr_n", x.stderr_n},
                                    {"ratio_a_over_l", x.gamma_a / x.gamma_l},
                                    {"pass", checks}});
  }
  summary["regression"] = nullptr;
  try {
    const AlphaRegression reg = exponent_alpha_regression(estimates);
    auto line = [](const PowerLawFit& p) {
      return json{{"slope", p.slope}, {"intercept", p.intercept}, {"multiplier", p.multiplier}};
    };
    json checks{{"l_slope", std::abs(reg.perimeter.slope + 1.0) <= Tolerances::slope},
                {"a_slope", std::abs(reg.area.slope + 1.0) <= Tolerances::slope},
                {"n_slope", std::abs(reg.vertices.slope) <= Tolerances::slope},
                {"l_multiplier", std::abs(reg.perimeter.multiplier - 1.5) <= Tolerances::mult_l},
                {"a_multiplier", std::abs(reg.area.multiplier - 3.0) <= Tolerances::mult_a},
                {"n_multiplier", std::abs(reg.vertices.multiplier - 0.5) <= Tolerances::mult_n}};
    pass = pass && all_true(checks);
    summary["regression"] = {{"perimeter", line(reg.perimeter)}, {"area", line(reg.area)},
                             {"vertices", line(reg.vertices)}, {"pass", checks}};
  } catch (const Error& err) {
    if (err.kind() != ErrorKind::DegenerateRegression) throw;
    spdlog::info("alpha regression skipped: {}", err.what());
  }
  summary["pass"] = pass;
  if (wants("summary")) run.write_json("summary.json", summary);
  run.finish(cfg, json::array({f.seed}));
  if (e.check && !pass) {
    spdlog::error("estimate: one or more checks failed against the conjectured exponents");
    return check_failed;
  }
  return ok;
}

// ---------------------------------------------------------------------------

struct LimitFlags {
  std::size_t layers = 2000;
  std::size_t replications = 1;
  std::size_t burn_in = default_burn_in;
  bool check = false;
};

int cmd_limit_check(const CommonFlags& f, const LimitFlags& l) {
  const ProcessConfig config = load_config(f);
  if (!config.measure.is_atomic()) throw Error(ErrorKind::NotAtomic, "limit-check needs an atomic measure file");
  if (l.replications == 0) throw Error(ErrorKind::InvalidArgument, "--replications must be positive");
  if (l.layers < l.burn_in + 2) throw Error(ErrorKind::InvalidArgument, "--layers must exceed the burn-in by 2");
  const LimitPolytope limit = limit_polytope(config.measure, config.alpha);
  Run run("limit-check", f);
  json cfg = common_json(f, config.measure);
  cfg.update({{"layers", l.layers}, {"replications", l.replications}, {"burn_in", l.burn_in}, {"check", l.check}});
  if (f.dry_run) {
    run.finish(cfg, json::array({f.seed}));
    return ok;
  }

  struct Rep {
    RateCheck rate;
    FunctionalScaling functional;
    DeletedPointsCheck deleted;
  };
  const Sampler sampler = sampler_of(f);
  auto reps = replicate(l.replications, f.threads, [&](std::size_t r) {
    std::vector<LayerRecord> layers;
    auto rows = limit_trajectory(config, l.layers, r, sampler, &layers);
    FunctionalScaling fs = functional_scaling_from(rows);
    DeletedPointsCheck dp = deleted_points_check(layers, config.alpha, l.burn_in);
    return Rep{rate_from_rows(std::move(rows), limit.is_extreme_input, l.burn_in), fs, std::move(dp)};
  });

  {
    auto out = run.open("rate.csv");
    out << "replication,k,hausdorff,perimeter_ratio,area_ratio,n_vertices,rho\n";
    for (std::size_t r = 0; r < reps.size(); ++r)
      for (const LimitRow& row : reps[r].rate.rows)
        out << r << ',' << row.k << ',' << io::format_double(row.hausdorff) << ','
            << io::format_double(row.perimeter_ratio) << ',' << io::format_double(row.area_ratio) << ','
            << row.n_vertices << ',' << io::format_double(row.rho) << '\n';
  }

  std::vector<double> slopes, perr, aerr;
  std::size_t converging = 0;
  json per = json::array();
  for (std::size_t r = 0; r < reps.size(); ++r) {
    const Rep& x = reps[r];
    slopes.push_back(x.rate.tail_fit.slope);
    perr.push_back(x.functional.perimeter_rel_err);
    aerr.push_back(x.functional.area_rel_err);
    converging += x.rate.converging ? 1 : 0;
    per.push_back({{"replication", r},
                   {"tail_slope", x.rate.tail_fit.slope},
                   {"converging", x.rate.converging},
                   {"perimeter_rel_err", x.functional.perimeter_rel_err},
                   {"area_rel_err", x.functional.area_rel_err},
                   {"cumulative_vertex_slope", x.deleted.cumulative_fit.slope},
                   {"rho_slope", x.deleted.rho_fit.slope}});
  }
  const double mean_slope = stats::mean(slopes);
  const double conv_frac = static_cast<double>(converging) / static_cast<double>(reps.size());
  json flags{{"convergence", conv_frac >= 0.95}};
  if (limit.is_extreme_input) flags["rate"] = std::abs(mean_slope + 0.5) <= 0.15;
  else flags["rate"] = "skipped";
  json summary{{"limit_polygon", io::polygon_to_json(limit.polygon)},
               {"is_extreme_input", limit.is_extreme_input},
               {"mean_tail_slope", mean_slope},
               {"tail_slope_stderr", stats::standard_error(slopes)},
               {"converging_fraction", conv_frac},
               {"median_perimeter_rel_err", stats::median(perr)},
               {"median_area_rel_err", stats::median(aerr)},
               {"replications", per},
               {"flags", flags}};
  run.write_json("limit_summary.json", summary);
  run.finish(cfg, json::array({f.seed}));
  const bool pass = all_true(flags);
  if (l.check && !pass) {
    spdlog::error("limit-check: convergence or rate flag failed");
    return check_failed;
  }
  return ok;
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("hullpeel");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* lvl = std::getenv("PEEL_LOG")) spdlog::set_level(spdlog::level::from_str(lvl));
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Convex-hull peeling of power-law Poisson point processes"};
  app.require_subcommand(1);

  CommonFlags common;

  auto* sim = app.add_subcommand("simulate", "write the first n points of the process");
  SimulateFlags sim_flags;
  add_common(sim, common);
  sim->add_option("--n", sim_flags.n, "number of points");

  auto* peel = app.add_subcommand("peel", "peel the first convex layers of the process");
  PeelFlags peel_flags;
  add_common(peel, common);
  peel->add_option("--layers", peel_flags.layers, "number of layers");
  peel->add_option("--svg", peel_flags.svg, "SVG file for selected layers");
  peel->add_option("--svg-layers", peel_flags.svg_layers, "layer indices drawn in the SVG")->delimiter(',');
  peel->add_flag("--normalize", peel_flags.normalize, "draw each layer divided by its max norm");
  peel->add_flag("--overlay-circle", peel_flags.overlay_circle, "draw the unit circle");
  peel->add_flag("--polygons", peel_flags.polygons, "also write polygons.json");
  peel->add_option("--buffer-cap", peel_flags.buffer_cap, "max active points before giving up");

  auto* est = app.add_subcommand("estimate", "estimate scaling exponents of perimeter, area, vertex count");
  EstimateFlags est_flags;
  add_common(est, common);
  est->add_option("--config", est_flags.config_file, "experiment config JSON");
  est->add_option("--alphas", est_flags.alphas, "comma-separated alpha grid")->delimiter(',');
  est->add_option("--k-min", est_flags.k_min, "first layer of the regression window");
  est->add_option("--k-max", est_flags.k_max, "last layer of the regression window");
  est->add_option("--replications", est_flags.replications, "independent replications per alpha");
  est->add_option("--outputs", est_flags.outputs, "subset of exponents,replications,summary")->delimiter(',');
  est->add_flag("--check", est_flags.check, "exit 4 if estimates miss the conjectured values");

  auto* lim = app.add_subcommand("limit-check", "convergence to the limit polytope of an atomic measure");
  LimitFlags lim_flags;
  add_common(lim, common);
  lim->add_option("--layers", lim_flags.layers, "number of layers k_max");
  lim->add_option("--replications", lim_flags.replications, "independent replications");
  lim->add_option("--burn-in", lim_flags.burn_in, "first layer used in slope fits");
  lim->add_flag("--check", lim_flags.check, "exit 4 if the rate or convergence flag fails");

  auto* ver = app.add_subcommand("version", "print the tool version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? ok : config_error;
  }

  try {
    if (*ver) {
      std::cout << "hullpeel " << tool_version << " (rng " << RngStream::algorithm_name << ")\n";
      return ok;
    }
    if (*sim) return cmd_simulate(common, sim_flags);
    if (*peel) return cmd_peel(common, peel_flags);
    if (*est) return cmd_estimate(common, est_flags, *est);
    if (*lim) return cmd_limit_check(common, lim_flags);
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return e.is_numerical() ? numerical_error : config_error;
  } catch (const nlohmann::json::exception& e) {
    spdlog::error("config: {}", e.what());
    return config_error;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return config_error;
  }
  return ok;
}
