#include "memlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <functional>

#include "json.hpp"
#include "memlab/error.hpp"
#include "memlab/io.hpp"

namespace memlab::config {

namespace {

using json = nlohmann::ordered_json;

struct Field {
  std::string key;
  std::function<void(const json&, const std::string&)> read;
  std::function<json()> write;
};

struct Section {
  std::string name;
  std::vector<Field> fields;
};

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path, what);
}

Field num(std::string key, double& v) {
  return {key,
          [&v](const json& j, const std::string& path) {
            if (!j.is_number()) fail(path, "expected a number");
            v = j.get<double>();
          },
          [&v] { return json(v); }};
}

Field integer(std::string key, int& v) {
  return {key,
          [&v](const json& j, const std::string& path) {
            if (!j.is_number_integer()) fail(path, "expected an integer");
            v = j.get<int>();
          },
          [&v] { return json(v); }};
}

Field seed_field(std::string key, std::uint64_t& v) {
  return {key,
          [&v](const json& j, const std::string& path) {
            if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
              fail(path, "expected a non-negative integer");
            v = j.get<std::uint64_t>();
          },
          [&v] { return json(v); }};
}

Field boolean(std::string key, bool& v) {
  return {key,
          [&v](const json& j, const std::string& path) {
            if (!j.is_boolean()) fail(path, "expected true or false");
            v = j.get<bool>();
          },
          [&v] { return json(v); }};
}

Field text(std::string key, std::string& v) {
  return {key,
          [&v](const json& j, const std::string& path) {
            if (!j.is_string()) fail(path, "expected a string");
            v = j.get<std::string>();
          },
          [&v] { return json(v); }};
}

Field numbers(std::string key, std::vector<double>& v) {
  return {key,
          [&v](const json& j, const std::string& path) {
            if (!j.is_array()) fail(path, "expected an array of numbers");
            v.clear();
            for (const auto& e : j) {
              if (!e.is_number()) fail(path, "expected an array of numbers");
              v.push_back(e.get<double>());
            }
          },
          [&v] { return json(v); }};
}

Field texts(std::string key, std::vector<std::string>& v) {
  return {key,
          [&v](const json& j, const std::string& path) {
            if (!j.is_array()) fail(path, "expected an array of strings");
            v.clear();
            for (const auto& e : j) {
              if (!e.is_string()) fail(path, "expected an array of strings");
              v.push_back(e.get<std::string>());
            }
          },
          [&v] { return json(v); }};
}

template <class E>
Field choice(std::string key, E& v, std::vector<std::pair<std::string, E>> options) {
  return {key,
          [&v, options](const json& j, const std::string& path) {
            std::string names;
            for (const auto& [n, e] : options) {
              if (j.is_string() && j.get<std::string>() == n) {
                v = e;
                return;
              }
              names += (names.empty() ? "" : ", ") + n;
            }
            fail(path, "expected one of: " + names);
          },
          [&v, options] {
            for (const auto& [n, e] : options)
              if (e == v) return json(n);
            return json(nullptr);
          }};
}

const std::vector<std::pair<std::string, Mode>> kModes{{"simulate", Mode::Simulate},
                                                        {"synth", Mode::Synth},
                                                        {"analyze", Mode::Analyze},
                                                        {"fit", Mode::Fit},
                                                        {"sweep", Mode::Sweep}};
const std::vector<std::pair<std::string, Source>> kSources{{"model", Source::Model},
                                                            {"simulator", Source::Simulator}};
const std::vector<std::pair<std::string, models::SweepAxis>> kAxes{
    {"pulse_width_ns", models::SweepAxis::PulseWidth},
    {"control_energy_pj", models::SweepAxis::ControlEnergy},
    {"detuning_mhz", models::SweepAxis::Detuning}};

std::vector<Field> top_level(RunConfig& c) {
  return {choice("mode", c.mode, kModes), seed_field("seed", c.seed), integer("jobs", c.jobs),
          text("output", c.output)};
}

std::vector<Section> sections(RunConfig& c) {
  auto& m = c.medium;
  auto& ct = c.control;
  auto& t = c.timing;
  auto& cal = c.calibration;
  auto& e = c.efficiency;
  auto& n = c.noise;
  auto& op = c.operating_point;
  auto& sy = c.synth;
  auto& an = c.analysis;
  auto& sw = c.sweep;
  auto& in = c.inputs;
  return {
      {"medium",
       {num("optical_depth", m.optical_depth), num("pumping_efficiency", m.pumping_efficiency),
        num("natural_half_width_mhz", m.natural_half_width_mhz),
        num("pressure_coeff_mhz_per_torr", m.pressure_coeff_mhz_per_torr),
        num("pressure_torr", m.pressure_torr),
        num("ground_decoherence_mhz", m.ground_decoherence_mhz),
        num("one_photon_detuning_mhz", m.one_photon_detuning_mhz),
        num("two_photon_detuning_mhz", m.two_photon_detuning_mhz),
        num("cell_length_m", m.cell_length_m)}},
      {"control",
       {num("fwhm_ns", ct.fwhm_ns), num("energy_pj", ct.energy_pj),
        num("ref_power_mw", ct.ref_power_mw), num("ref_rabi_mhz", ct.ref_rabi_mhz)}},
      {"signal", {num("fwhm_ns", c.signal.fwhm_ns), num("photons", c.signal.photons)}},
      {"timing",
       {num("pump_duration_us", t.pump_duration_us), num("write_time_ns", t.write_time_ns),
        num("signal_delay_ns", t.signal_delay_ns), num("read_delay_ns", t.read_delay_ns),
        num("rep_period_us", t.rep_period_us)}},
      {"calibration",
       {num("split_ratio_sigma", cal.split_ratio_sigma), num("apd_efficiency", cal.apd_efficiency),
        num("rep_rate_hz", cal.rep_rate_hz), num("integration_time_s", cal.integration_time_s),
        num("monitor_rate_cps", cal.monitor_rate_cps),
        num("filter_signal_transmission", cal.filter_signal_transmission),
        num("split_ratio_rel_unc", cal.split_ratio_rel_unc),
        num("apd_efficiency_rel_unc", cal.apd_efficiency_rel_unc)}},
      {"efficiency",
       {num("eta0_width", e.eta0_width), num("mem_bandwidth_fwhm_mhz", e.mem_bandwidth_fwhm_mhz),
        num("eta0_energy", e.eta0_energy), num("energy_scale_a_pj", e.energy_scale_a_pj),
        num("eta0_detuning", e.eta0_detuning), num("lorentz_fwhm_mhz", e.lorentz_fwhm_mhz),
        num("lorentz_center_mhz", e.lorentz_center_mhz),
        num("lorentz_peak_absorbance", e.lorentz_peak_absorbance)}},
      {"noise",
       {num("fwm_quad_b", n.fwm_quad_b), num("srs_lin_c", n.srs_lin_c),
        num("fl_amp_d", n.fl_amp_d), num("fl_sat_e_pj", n.fl_sat_e_pj), num("n_srs", n.n_srs),
        num("n_fl", n.n_fl), num("n_fwm", n.n_fwm),
        num("voigt_gauss_fwhm_mhz", n.voigt_gauss_fwhm_mhz),
        num("voigt_lorentz_fwhm_mhz", n.voigt_lorentz_fwhm_mhz)}},
      {"operating_point",
       {num("pulse_width_ns", op.pulse_width_ns), num("control_energy_pj", op.control_energy_pj),
        num("detuning_mhz", op.detuning_mhz)}},
      {"synth",
       {choice("source", sy.source, kSources), num("eta_e2e", sy.eta_e2e),
        num("leak_fraction", sy.leak_fraction), num("retrieval_fwhm_ns", sy.retrieval_fwhm_ns),
        num("noise_per_attempt", sy.noise_per_attempt)}},
      {"analysis",
       {num("t_max_ns", an.t_max_ns), num("bin_width_ns", an.bin_width_ns),
        numbers("tradeoff_t_max_ns", an.tradeoff_t_max_ns)}},
      {"sweep",
       {choice("axis", sw.axis, kAxes), num("start", sw.start), num("stop", sw.stop),
        integer("steps", sw.steps), choice("source", sw.source, kSources),
        boolean("synthesize_counts", sw.synthesize_counts)}},
      {"inputs",
       {text("signal_histogram", in.signal_histogram), text("noise_histogram", in.noise_histogram),
        text("dataset", in.dataset), text("scan", in.scan),
        text("signal_envelope", in.signal_envelope), text("leak_envelope", in.leak_envelope),
        text("metrics", in.metrics), texts("fits", in.fits)}},
  };
}

void check(bool ok, const std::string& path, const std::string& what, double got) {
  if (!ok) fail(path, what + ", got " + io::format_double(got));
}

void positive(double v, const std::string& path) { check(v > 0.0, path, "must be > 0", v); }
void non_negative(double v, const std::string& path) { check(v >= 0.0, path, "must be >= 0", v); }
void unit_closed(double v, const std::string& path) {
  check(v >= 0.0 && v <= 1.0, path, "must be in [0, 1]", v);
}
void unit_open_left(double v, const std::string& path) {
  check(v > 0.0 && v <= 1.0, path, "must be in (0, 1]", v);
}

void resolve_path(std::string& p, const std::filesystem::path& base) {
  if (!p.empty() && !base.empty() && std::filesystem::path(p).is_relative())
    p = (base / p).lexically_normal().string();
}

}  // namespace

std::string to_string(Mode m) {
  for (const auto& [n, e] : kModes)
    if (e == m) return n;
  return "";
}

std::string to_string(Source s) {
  for (const auto& [n, e] : kSources)
    if (e == s) return n;
  return "";
}

std::string axis_key(models::SweepAxis a) {
  for (const auto& [n, e] : kAxes)
    if (e == a) return n;
  return "";
}

sim::MediumParams MediumConfig::params() const {
  sim::MediumParams p;
  p.optical_depth = optical_depth;
  p.pumping_efficiency = pumping_efficiency;
  p.excited_decay_gamma =
      sim::polarization_decay_rate(natural_half_width_mhz, pressure_coeff_mhz_per_torr, pressure_torr);
  p.ground_decoherence = sim::mhz_to_rad_s(ground_decoherence_mhz);
  p.one_photon_detuning = sim::mhz_to_rad_s(one_photon_detuning_mhz);
  p.two_photon_detuning = sim::mhz_to_rad_s(two_photon_detuning_mhz);
  p.cell_length_m = cell_length_m;
  return p;
}

sim::ControlCalibration ControlConfig::calibration() const {
  return {ref_power_mw, sim::mhz_to_rad_s(ref_rabi_mhz)};
}

sim::ControlPulse ControlConfig::pulse(double center_ns, double energy) const {
  sim::ControlPulse p;
  p.fwhm_ns = fwhm_ns;
  p.center_ns = center_ns;
  p.peak_rabi = calibration().rabi_for_energy(energy, fwhm_ns);
  return p;
}

RunConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail("", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("", "config must be a JSON object");
  RunConfig c;
  const auto top = top_level(c);
  const auto secs = sections(c);
  for (const auto& [key, value] : doc.items()) {
    bool found = false;
    for (const auto& f : top) {
      if (f.key == key) {
        f.read(value, key);
        found = true;
      }
    }
    for (const auto& s : secs) {
      if (s.name != key) continue;
      found = true;
      if (!value.is_object()) fail(key, "expected an object");
      for (const auto& [k, v] : value.items()) {
        const auto it = std::find_if(s.fields.begin(), s.fields.end(),
                                     [&](const Field& f) { return f.key == k; });
        if (it == s.fields.end()) fail(key + "." + k, "unknown key");
        it->read(v, key + "." + k);
      }
    }
    if (!found) fail(key, "unknown key");
  }
  auto& in = c.inputs;
  for (std::string* p : {&in.signal_histogram, &in.noise_histogram, &in.dataset, &in.scan,
                         &in.signal_envelope, &in.leak_envelope, &in.metrics})
    resolve_path(*p, base_dir);
  for (auto& p : in.fits) resolve_path(p, base_dir);
  validate(c);
  return c;
}

RunConfig validate_config(const std::filesystem::path& path) {
  return parse_config(io::read_text(path), path.parent_path());
}

void validate(const RunConfig& c) {
  check(c.jobs >= 1, "jobs", "must be >= 1", c.jobs);

  const auto& m = c.medium;
  non_negative(m.optical_depth, "medium.optical_depth");
  unit_open_left(m.pumping_efficiency, "medium.pumping_efficiency");
  non_negative(m.natural_half_width_mhz, "medium.natural_half_width_mhz");
  non_negative(m.pressure_coeff_mhz_per_torr, "medium.pressure_coeff_mhz_per_torr");
  non_negative(m.pressure_torr, "medium.pressure_torr");
  non_negative(m.ground_decoherence_mhz, "medium.ground_decoherence_mhz");
  positive(m.cell_length_m, "medium.cell_length_m");

  positive(c.control.fwhm_ns, "control.fwhm_ns");
  non_negative(c.control.energy_pj, "control.energy_pj");
  positive(c.control.ref_power_mw, "control.ref_power_mw");
  positive(c.control.ref_rabi_mhz, "control.ref_rabi_mhz");

  positive(c.signal.fwhm_ns, "signal.fwhm_ns");
  non_negative(c.signal.photons, "signal.photons");

  const auto& t = c.timing;
  positive(t.pump_duration_us, "timing.pump_duration_us");
  positive(t.write_time_ns, "timing.write_time_ns");
  non_negative(t.signal_delay_ns, "timing.signal_delay_ns");
  check(t.read_delay_ns > t.signal_delay_ns, "timing.read_delay_ns",
        "must exceed timing.signal_delay_ns", t.read_delay_ns);
  positive(t.rep_period_us, "timing.rep_period_us");
  try {
    t.validate();
  } catch (const DomainError&) {
    fail("timing.rep_period_us", "must exceed pump + read delay + 3 write_time_ns");
  }

  const auto& cal = c.calibration;
  positive(cal.split_ratio_sigma, "calibration.split_ratio_sigma");
  unit_open_left(cal.apd_efficiency, "calibration.apd_efficiency");
  positive(cal.rep_rate_hz, "calibration.rep_rate_hz");
  positive(cal.integration_time_s, "calibration.integration_time_s");
  non_negative(cal.monitor_rate_cps, "calibration.monitor_rate_cps");
  unit_open_left(cal.filter_signal_transmission, "calibration.filter_signal_transmission");
  non_negative(cal.split_ratio_rel_unc, "calibration.split_ratio_rel_unc");
  non_negative(cal.apd_efficiency_rel_unc, "calibration.apd_efficiency_rel_unc");

  const auto& e = c.efficiency;
  unit_closed(e.eta0_width, "efficiency.eta0_width");
  positive(e.mem_bandwidth_fwhm_mhz, "efficiency.mem_bandwidth_fwhm_mhz");
  unit_closed(e.eta0_energy, "efficiency.eta0_energy");
  positive(e.energy_scale_a_pj, "efficiency.energy_scale_a_pj");
  unit_closed(e.eta0_detuning, "efficiency.eta0_detuning");
  positive(e.lorentz_fwhm_mhz, "efficiency.lorentz_fwhm_mhz");
  non_negative(e.lorentz_peak_absorbance, "efficiency.lorentz_peak_absorbance");

  const auto& n = c.noise;
  non_negative(n.fwm_quad_b, "noise.fwm_quad_b");
  non_negative(n.srs_lin_c, "noise.srs_lin_c");
  non_negative(n.fl_amp_d, "noise.fl_amp_d");
  non_negative(n.fl_sat_e_pj, "noise.fl_sat_e_pj");
  non_negative(n.n_srs, "noise.n_srs");
  non_negative(n.n_fl, "noise.n_fl");
  non_negative(n.n_fwm, "noise.n_fwm");
  positive(n.voigt_gauss_fwhm_mhz, "noise.voigt_gauss_fwhm_mhz");
  positive(n.voigt_lorentz_fwhm_mhz, "noise.voigt_lorentz_fwhm_mhz");

  positive(c.operating_point.pulse_width_ns, "operating_point.pulse_width_ns");
  positive(c.operating_point.control_energy_pj, "operating_point.control_energy_pj");

  unit_closed(c.synth.eta_e2e, "synth.eta_e2e");
  unit_closed(c.synth.leak_fraction, "synth.leak_fraction");
  positive(c.synth.retrieval_fwhm_ns, "synth.retrieval_fwhm_ns");
  non_negative(c.synth.noise_per_attempt, "synth.noise_per_attempt");

  const auto& an = c.analysis;
  positive(an.bin_width_ns, "analysis.bin_width_ns");
  check(an.t_max_ns > t.retrieval_split_ns(), "analysis.t_max_ns",
        "must exceed the retrieval split (read center - 20 ns)", an.t_max_ns);
  for (double v : an.tradeoff_t_max_ns)
    check(v > t.retrieval_split_ns(), "analysis.tradeoff_t_max_ns",
          "entries must exceed the retrieval split", v);

  const auto& sw = c.sweep;
  check(sw.steps >= 1, "sweep.steps", "must be >= 1", sw.steps);
  check(sw.stop >= sw.start, "sweep.stop", "must be >= sweep.start", sw.stop);
  if (sw.axis != models::SweepAxis::Detuning) positive(sw.start, "sweep.start");

  const auto& in = c.inputs;
  const std::pair<const char*, const std::string*> files[] = {
      {"inputs.signal_histogram", &in.signal_histogram},
      {"inputs.noise_histogram", &in.noise_histogram},
      {"inputs.dataset", &in.dataset},
      {"inputs.scan", &in.scan},
      {"inputs.signal_envelope", &in.signal_envelope},
      {"inputs.leak_envelope", &in.leak_envelope},
      {"inputs.metrics", &in.metrics}};
  for (const auto& [key, p] : files)
    if (!p->empty() && !std::filesystem::exists(*p)) fail(key, "file not found: " + *p);
  for (const auto& p : in.fits)
    if (!std::filesystem::exists(p)) fail("inputs.fits", "file not found: " + p);
}

std::string dump_config(const RunConfig& c) {
  RunConfig copy = c;
  json doc = json::object();
  for (const auto& f : top_level(copy)) doc[f.key] = f.write();
  for (const auto& s : sections(copy)) {
    json sec = json::object();
    for (const auto& f : s.fields) sec[f.key] = f.write();
    doc[s.name] = sec;
  }
  return doc.dump(2) + "\n";
}

std::vector<double> resolve_sweep(const SweepConfig& s) {
  detail::require(s.steps >= 1 && s.stop >= s.start, "resolve_sweep: invalid grid");
  if (s.steps == 1) return {s.start};
  std::vector<double> v(static_cast<std::size_t>(s.steps));
  for (int i = 0; i < s.steps; ++i)
    v[static_cast<std::size_t>(i)] = s.start + (s.stop - s.start) * i / (s.steps - 1);
  v.back() = s.stop;
  return v;
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> cli, const RunConfig& c) {
  if (cli) return *cli;
  if (const char* env = std::getenv("MEMLAB_SEED"); env && *env) {
    const std::string_view sv(env);
    std::uint64_t v = 0;
    const auto res = std::from_chars(sv.data(), sv.data() + sv.size(), v);
    if (res.ec != std::errc() || res.ptr != sv.data() + sv.size())
      fail("MEMLAB_SEED", "expected a non-negative integer");
    return v;
  }
  return c.seed;
}

}  // namespace memlab::config
