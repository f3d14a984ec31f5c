#include <benchmark/benchmark.h>

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "memlab/config.hpp"
#include "memlab/counting.hpp"
#include "memlab/fitting.hpp"
#include "memlab/mbsim.hpp"
#include "memlab/models.hpp"
#include "memlab/noise_fit.hpp"
#include "memlab/sweep.hpp"
#include "memlab/voigt.hpp"

using namespace memlab;

static void BM_VoigtUnitPeak(benchmark::State& state) {
  double d = -5000.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(voigt::voigt_unit_peak(d, 380.0, 920.0));
    d = d > 5000.0 ? -5000.0 : d + 7.3;
  }
}
BENCHMARK(BM_VoigtUnitPeak);

static void BM_Faddeeva(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> x(-30.0, 30.0), y(0.0, 10.0);
  std::vector<std::complex<double>> z;
  for (int i = 0; i < 1024; ++i) z.emplace_back(x(rng), y(rng));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(voigt::faddeeva(z[i]));
    i = (i + 1) & 1023;
  }
}
BENCHMARK(BM_Faddeeva);

static void BM_NoiseEnergyFit(benchmark::State& state) {
  std::mt19937_64 rng(5);
  const double attempts = 60.0 / 11e-6;
  std::vector<double> x, y;
  for (int j = 1; j <= 8; ++j) {
    const double e = 70.0 * j;
    std::poisson_distribution<long> draw((4e-5 * e + 7e-3 * e / (16.0 + e)) * attempts);
    x.push_back(e);
    y.push_back(static_cast<double>(draw(rng)) / attempts);
  }
  const fit::Dataset d = fit::Dataset::with_poisson_sigma(x, y, attempts);
  for (auto _ : state) benchmark::DoNotOptimize(fit::fit_noise_energy(d));
}
BENCHMARK(BM_NoiseEnergyFit)->Unit(benchmark::kMicrosecond);

static void BM_SynthesizeAndAnalyze(benchmark::State& state) {
  const config::RunConfig c = config::parse_config("{}");
  const auto env = sweep::model_envelopes(c, c.synth.eta_e2e);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const auto h = sweep::synthesize_pair(c, env, c.synth.noise_per_attempt, seed++);
    benchmark::DoNotOptimize(counting::analyze(h.signal, h.noise, sweep::synthetic_alpha2(c),
                                               c.calibration, c.timing, 155.0));
  }
}
BENCHMARK(BM_SynthesizeAndAnalyze)->Unit(benchmark::kMicrosecond);

static void BM_SimulateStorage(benchmark::State& state) {
  sim::MediumParams m;
  m.optical_depth = static_cast<double>(state.range(0));
  sim::ControlPulse c;
  c.fwhm_ns = 40.0;
  c.center_ns = -20.0;
  const auto sig = sim::gaussian_envelope(25.0, 0.0, 1.0, -100.0, 60.0, 1601);
  const sim::SimGrid g = sim::auto_grid(m, c, -100.0, 60.0);
  for (auto _ : state) benchmark::DoNotOptimize(sim::simulate_storage(sig, c, m, g));
  state.counters["nz"] = g.nz;
  state.counters["nt"] = g.nt;
}
BENCHMARK(BM_SimulateStorage)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
