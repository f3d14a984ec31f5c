// memlab command-line tool. Results go to --out (or stdout); errors go to
// stderr as one JSON object and the exit status is nonzero.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "memlab/config.hpp"
#include "memlab/counting.hpp"
#include "memlab/error.hpp"
#include "memlab/fitting.hpp"
#include "memlab/io.hpp"
#include "memlab/models.hpp"
#include "memlab/noise_fit.hpp"
#include "memlab/report.hpp"
#include "memlab/sweep.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace memlab;

namespace {

constexpr int kExitInternal = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitCompute = 4;

struct Options {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  int jobs = 0;
  std::string svg;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* jobs_opt = nullptr;
};

struct Context {
  config::RunConfig cfg;
  std::uint64_t seed = 0;
  int jobs = 1;
  std::string out;
  std::string svg;
};

Context load(const Options& o) {
  Context ctx;
  ctx.cfg = o.config.empty() ? config::parse_config("{}") : config::validate_config(o.config);
  std::optional<std::uint64_t> cli_seed;
  if (o.seed_opt->count() > 0) cli_seed = o.seed;
  ctx.seed = config::resolve_seed(cli_seed, ctx.cfg);
  ctx.jobs = o.jobs_opt->count() > 0 ? o.jobs : ctx.cfg.jobs;
  if (ctx.jobs < 1) throw ConfigError("--jobs", "must be >= 1, got " + std::to_string(ctx.jobs));
  ctx.out = o.out.empty() ? ctx.cfg.output : o.out;
  ctx.svg = o.svg;
  return ctx;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void emit(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
  } else {
    io::write_text(out, text);
  }
}

fs::path output_dir(const Context& ctx) {
  if (ctx.out.empty()) throw ConfigError("--out", "output directory required");
  fs::create_directories(ctx.out);
  return ctx.out;
}

void write_svg(const Context& ctx, const std::vector<double>& x, const std::vector<double>& y,
               const std::string& title, const std::string& xl, const std::string& yl) {
  if (ctx.svg.empty()) return;
  io::write_text(ctx.svg, report::svg_polyline(x, y, title, xl, yl));
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

void require_input(const std::string& path, const std::string& key) {
  if (path.empty()) throw ConfigError(key, "input file required");
}

json components_json(const models::NoiseComponents& n) {
  return {{"fwm", number(n.fwm)},
          {"srs", number(n.srs)},
          {"fluorescence", number(n.fluorescence)},
          {"total", number(n.total())}};
}

// ---- commands

void cmd_models_eval(const Context& ctx) {
  const auto& c = ctx.cfg;
  const auto& op = c.operating_point;
  const double alpha2 = c.signal.photons;
  json j;
  j["schema"] = "memlab.models/1";
  j["operating_point"] = {{"pulse_width_ns", op.pulse_width_ns},
                          {"control_energy_pj", op.control_energy_pj},
                          {"detuning_mhz", op.detuning_mhz}};
  const auto a = counting::calibrate_alpha2(c.calibration);
  j["alpha2_calibrated"] = {{"value", number(a.value)}, {"rel_uncertainty", number(a.rel_uncertainty)}};
  j["alpha2"] = alpha2;

  const std::pair<models::SweepAxis, double> axes[] = {
      {models::SweepAxis::PulseWidth, op.pulse_width_ns},
      {models::SweepAxis::ControlEnergy, op.control_energy_pj},
      {models::SweepAxis::Detuning, op.detuning_mhz}};
  json by_axis = json::object();
  for (const auto& [axis, x] : axes) {
    json r;
    const double eta = models::efficiency_model(axis, x, c.efficiency);
    r["eta_e2e"] = number(eta);
    r["eta_mem"] = number(models::eta_mem_from_e2e(eta, c.calibration.filter_signal_transmission));
    r["noise_total"] = number(models::noise_model(axis, x, c.noise, op));
    try {
      const double snr = models::snr_model(axis, x, alpha2, c.calibration, c.efficiency, c.noise, op);
      r["snr"] = number(snr);
      r["mu1"] = snr > 0.0 ? number(models::mu_one(alpha2, snr)) : json(nullptr);
    } catch (const UndefinedSnrError&) {
      r["snr"] = nullptr;
      r["mu1"] = nullptr;
    }
    by_axis[config::axis_key(axis)] = r;
  }
  j["axes"] = by_axis;
  j["noise_vs_energy"] = components_json(models::noise_components_vs_energy(op.control_energy_pj, c.noise));
  j["noise_vs_detuning"] = components_json(models::noise_components_vs_detuning(op.detuning_mhz, c.noise));
  emit(ctx.out, j.dump(2));

  if (!ctx.svg.empty()) {
    const auto xs = config::resolve_sweep(c.sweep);
    std::vector<double> ys;
    for (double x : xs) ys.push_back(models::efficiency_model(c.sweep.axis, x, c.efficiency));
    write_svg(ctx, xs, ys, "efficiency model", config::axis_key(c.sweep.axis), "eta_e2e");
  }
}

void cmd_sim_run(const Context& ctx) {
  const fs::path dir = output_dir(ctx);
  const sweep::Envelopes env = sweep::simulated_envelopes(ctx.cfg);
  io::write_envelope(dir / "retrieved.csv", env.retrieved);
  io::write_envelope(dir / "leak.csv", env.leak);
  json j;
  j["schema"] = "memlab.sim/1";
  j["photons_in"] = ctx.cfg.signal.photons;
  j["eta_mem"] = number(env.eta_mem);
  j["retrieved_photons"] = number(env.retrieved.photon_number());
  j["leak_photons"] = number(env.leak.photon_number());
  io::write_text(dir / "sim.json", j.dump(2) + "\n");

  std::vector<double> p;
  for (const auto& a : env.retrieved.amplitude) p.push_back(std::norm(a));
  write_svg(ctx, env.retrieved.time_ns, p, "retrieved signal", "time_ns", "photons_per_ns");
}

sweep::Envelopes synth_envelopes(const config::RunConfig& c) {
  if (!c.inputs.signal_envelope.empty()) {
    sweep::Envelopes env;
    env.retrieved = io::read_envelope(c.inputs.signal_envelope);
    if (!c.inputs.leak_envelope.empty()) env.leak = io::read_envelope(c.inputs.leak_envelope);
    env.eta_mem = env.retrieved.photon_number() / c.signal.photons;
    return env;
  }
  if (c.synth.source == config::Source::Simulator) return sweep::simulated_envelopes(c);
  return sweep::model_envelopes(c, c.synth.eta_e2e);
}

void cmd_counts_synth(const Context& ctx) {
  const fs::path dir = output_dir(ctx);
  const sweep::Envelopes env = synth_envelopes(ctx.cfg);
  const sweep::HistogramPair h =
      sweep::synthesize_pair(ctx.cfg, env, ctx.cfg.synth.noise_per_attempt, ctx.seed);
  io::write_histogram(dir / "signal.csv", h.signal);
  io::write_histogram(dir / "noise.csv", h.noise);

  std::vector<double> t, y;
  for (std::size_t i = 0; i < h.signal.size(); ++i) {
    t.push_back(h.signal.bin_time(i));
    y.push_back(static_cast<double>(h.signal.counts[i]));
  }
  write_svg(ctx, t, y, "signal histogram", "time_ns", "counts");
}

void cmd_analyze(const Context& ctx) {
  const auto& c = ctx.cfg;
  require_input(c.inputs.signal_histogram, "inputs.signal_histogram");
  require_input(c.inputs.noise_histogram, "inputs.noise_histogram");
  const auto sig = io::read_histogram(c.inputs.signal_histogram);
  const auto noise = io::read_histogram(c.inputs.noise_histogram);
  const counting::Alpha2 alpha2 = sweep::synthetic_alpha2(c);
  const counting::Analysis a =
      counting::analyze(sig, noise, alpha2, c.calibration, c.timing, c.analysis.t_max_ns);
  std::vector<counting::TradeoffPoint> tradeoff;
  if (!c.analysis.tradeoff_t_max_ns.empty() && a.metrics.window) {
    tradeoff = counting::window_tradeoff(sig, noise, alpha2.value, c.calibration,
                                         a.metrics.window->t_min_ns, c.analysis.tradeoff_t_max_ns);
  }
  emit(ctx.out, report::analysis_json(a, tradeoff));

  const auto diff = counting::noise_correct(sig, noise);
  std::vector<double> t;
  for (std::size_t i = 0; i < diff.size(); ++i) t.push_back(diff.bin_time(i));
  write_svg(ctx, t, diff.values, "noise-corrected histogram", "time_ns", "counts");
}

void cmd_fit_noise_energy(const Context& ctx) {
  const auto& c = ctx.cfg;
  require_input(c.inputs.dataset, "inputs.dataset");
  const fit::Dataset d = io::read_dataset(c.inputs.dataset);
  const fit::NoiseEnergyFit f = fit::fit_noise_energy(d);
  emit(ctx.out, report::noise_energy_fit_json(f));

  if (!ctx.svg.empty()) {
    const fit::Model m = fit::make_model("noise_energy");
    const double x_max = *std::max_element(d.x.begin(), d.x.end());
    const auto xs = linspace(0.0, x_max, 200);
    std::vector<double> ys;
    for (double x : xs) ys.push_back(m.value(x, f.fit.params));
    write_svg(ctx, xs, ys, "noise vs control energy", "control_energy_pj", "counts_per_attempt");
  }
}

void cmd_fit_noise_detuning(const Context& ctx) {
  const auto& c = ctx.cfg;
  const double g = c.noise.voigt_gauss_fwhm_mhz;
  const double l = c.noise.voigt_lorentz_fwhm_mhz;
  std::vector<fit::DetuningPoint> points;
  fit::TotalNoiseFit total;
  if (!c.inputs.scan.empty()) {
    const auto rows = fit::decompose_vs_detuning(io::read_scan(c.inputs.scan), ctx.jobs);
    points = fit::detuning_points(rows);
    total = fit::fit_total_noise(points, g, l);
    emit(ctx.out, report::decomposition_json(rows, total));
  } else if (!c.inputs.dataset.empty()) {
    const fit::Dataset d = io::read_dataset(c.inputs.dataset);
    for (std::size_t i = 0; i < d.size(); ++i) points.push_back({d.x[i], d.y[i], d.sigma_y[i], {}});
    total = fit::fit_total_noise(points, g, l);
    emit(ctx.out, report::total_noise_fit_json(total));
  } else {
    throw ConfigError("inputs.scan", "input file required (or inputs.dataset with totals)");
  }

  if (!ctx.svg.empty() && !points.empty()) {
    double lo = points.front().delta_mhz, hi = lo;
    for (const auto& p : points) {
      lo = std::min(lo, p.delta_mhz);
      hi = std::max(hi, p.delta_mhz);
    }
    models::NoiseParams np = c.noise;
    np.n_srs = total.params[0];
    np.n_fl = total.params[1];
    np.n_fwm = total.params[2];
    const auto xs = linspace(lo, hi, 200);
    std::vector<double> ys;
    for (double x : xs) ys.push_back(models::noise_vs_detuning(x, np));
    write_svg(ctx, xs, ys, "noise vs detuning", "detuning_mhz", "counts_per_attempt");
  }
}

void cmd_fit(const Context& ctx) {
  if (!ctx.cfg.inputs.scan.empty()) {
    cmd_fit_noise_detuning(ctx);
  } else {
    cmd_fit_noise_energy(ctx);
  }
}

void cmd_sweep(const Context& ctx) {
  const auto rows = sweep::run_sweep(ctx.cfg, ctx.seed, ctx.jobs);
  emit(ctx.out, sweep::sweep_csv(ctx.cfg, rows));

  if (!ctx.svg.empty()) {
    std::vector<double> xs, ys;
    for (const auto& r : rows) {
      if (!r.eta_e2e) continue;
      xs.push_back(r.x);
      ys.push_back(*r.eta_e2e);
    }
    write_svg(ctx, xs, ys, "end-to-end efficiency", config::axis_key(ctx.cfg.sweep.axis), "eta_e2e");
  }
}

void cmd_report(const Context& ctx) {
  const auto& c = ctx.cfg;
  std::optional<models::MetricsReport> metrics;
  std::string metrics_text;
  if (!c.inputs.metrics.empty()) {
    metrics_text = io::read_text(c.inputs.metrics);
    metrics = report::parse_metrics(metrics_text);
  }
  std::vector<std::string> fits;
  for (const auto& f : c.inputs.fits) fits.push_back(io::read_text(f));
  emit(ctx.out, report::emit_report(metrics ? &*metrics : nullptr, fits));

  if (!ctx.svg.empty()) {
    std::vector<double> xs, ys;
    if (!metrics_text.empty()) {
      const json j = json::parse(metrics_text, nullptr, false);
      if (j.is_object() && j.contains("tradeoff") && j["tradeoff"].is_array()) {
        for (const auto& p : j["tradeoff"]) {
          if (!p["t_max_ns"].is_number() || !p["eta_e2e"].is_number()) continue;
          xs.push_back(p["t_max_ns"].get<double>());
          ys.push_back(p["eta_e2e"].get<double>());
        }
      }
    }
    if (xs.size() < 2)
      throw ConfigError("--svg", "report plot needs a metrics file with >= 2 trade-off points");
    write_svg(ctx, xs, ys, "window trade-off", "t_max_ns", "eta_e2e");
  }
}

void cmd_config_validate(const Context& ctx) { emit(ctx.out, config::dump_config(ctx.cfg)); }

void cmd_run(const Context& ctx) {
  switch (ctx.cfg.mode) {
    case config::Mode::Simulate: return cmd_sim_run(ctx);
    case config::Mode::Synth: return cmd_counts_synth(ctx);
    case config::Mode::Analyze: return cmd_analyze(ctx);
    case config::Mode::Fit: return cmd_fit(ctx);
    case config::Mode::Sweep: return cmd_sweep(ctx);
  }
}

// ---- errors

int fail(const std::string& kind, const std::string& message, const std::string& where,
         int code) {
  json e;
  e["kind"] = kind;
  e["message"] = message;
  e["where"] = where.empty() ? json(nullptr) : json(where);
  std::cerr << json{{"error", e}}.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"memlab: warm-vapor quantum memory models, simulation and analysis"};
  app.require_subcommand(1);
  Options opt;
  std::function<void(const Context&)> action;

  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help,
                  void (*fn)(const Context&)) {
    CLI::App* sub = parent->add_subcommand(name, help);
    sub->add_option("--config", opt.config, "JSON run configuration");
    sub->add_option("--out", opt.out, "Output file or directory");
    opt.seed_opt = sub->add_option("--seed", opt.seed, "Random seed");
    opt.jobs_opt = sub->add_option("--jobs", opt.jobs, "Worker threads");
    sub->add_option("--svg", opt.svg, "Also write an SVG line plot here");
    sub->callback([&action, fn] { action = fn; });
    return sub;
  };

  auto* models_cmd = app.add_subcommand("models", "Closed-form models")->require_subcommand(1);
  leaf(models_cmd, "eval", "Evaluate all models at the operating point", cmd_models_eval);
  auto* sim_cmd = app.add_subcommand("sim", "Maxwell-Bloch simulation")->require_subcommand(1);
  leaf(sim_cmd, "run", "Store and retrieve the configured signal", cmd_sim_run);
  auto* counts_cmd = app.add_subcommand("counts", "Photon-counting histograms")->require_subcommand(1);
  leaf(counts_cmd, "synth", "Synthesize signal and noise histograms", cmd_counts_synth);
  leaf(&app, "analyze", "Analyze a signal/noise histogram pair", cmd_analyze);
  auto* fit_cmd = app.add_subcommand("fit", "Noise model fits")->require_subcommand(1);
  leaf(fit_cmd, "noise-energy", "Fit noise versus control energy", cmd_fit_noise_energy);
  leaf(fit_cmd, "noise-detuning", "Decompose noise versus detuning", cmd_fit_noise_detuning);
  leaf(&app, "sweep", "Batch evaluation over the configured axis", cmd_sweep);
  leaf(&app, "report", "Versioned JSON report from metrics and fits", cmd_report);
  auto* config_cmd = app.add_subcommand("config", "Configuration files")->require_subcommand(1);
  leaf(config_cmd, "validate", "Validate and echo the fully defaulted config",
       cmd_config_validate);
  leaf(&app, "run", "Run the config's mode", cmd_run);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), "", kExitUsage);
  }

  // Only the selected leaf's options were parsed; re-bind the seed and jobs
  // options of that leaf.
  for (CLI::App* sub = &app; !sub->get_subcommands().empty();) {
    sub = sub->get_subcommands().front();
    if (sub->get_subcommands().empty()) {
      opt.seed_opt = sub->get_option("--seed");
      opt.jobs_opt = sub->get_option("--jobs");
    }
  }

  try {
    action(load(opt));
  } catch (const ConfigError& e) {
    return fail("config", e.what(), e.where(), kExitInput);
  } catch (const AnalysisError& e) {
    return fail("analysis", e.what(), "", kExitCompute);
  } catch (const UndefinedSnrError& e) {
    return fail("undefined_snr", e.what(), "", kExitCompute);
  } catch (const ResolutionError& e) {
    return fail("resolution", e.what(), "", kExitCompute);
  } catch (const DomainError& e) {
    return fail("domain", e.what(), "", kExitCompute);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), "", kExitInternal);
  }
  return 0;
}
