#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "memlab/config.hpp"
#include "memlab/counting.hpp"
#include "memlab/error.hpp"
#include "memlab/sweep.hpp"

using namespace memlab;
using namespace memlab::counting;

namespace {

ArrivalHistogram make_hist(std::vector<std::int64_t> counts, double t0 = -100.0) {
  ArrivalHistogram h;
  h.t0_ns = t0;
  h.counts = std::move(counts);
  return h;
}

// Histogram with the given (time, counts) spikes on a zero background, 1 ns bins.
ArrivalHistogram spikes(std::initializer_list<std::pair<double, std::int64_t>> s,
                        double t0 = -100.0, std::size_t n = 340) {
  std::vector<std::int64_t> c(n, 0);
  for (auto [t, v] : s) c[static_cast<std::size_t>(t - t0)] = v;
  return make_hist(std::move(c), t0);
}

// Noise-free histogram pair: expected counts rounded to integers.
std::pair<ArrivalHistogram, ArrivalHistogram> rounded_pair(const config::RunConfig& c,
                                                           double window_noise) {
  const auto env = sweep::model_envelopes(c, c.synth.eta_e2e);
  const auto [t0, t1] = default_span(c.timing);
  const double noise = sweep::span_noise(c, window_noise);
  auto round_all = [&](const std::vector<double>& v) {
    ArrivalHistogram h;
    h.t0_ns = t0;
    h.rep_rate_hz = c.calibration.rep_rate_hz;
    h.integration_time_s = c.calibration.integration_time_s;
    for (double x : v) h.counts.push_back(std::llround(x));
    return h;
  };
  const auto sig = expected_counts(env.retrieved, env.leak, noise, c.calibration, t0, t1, 1.0);
  const auto bg = expected_counts({}, {}, noise, c.calibration, t0, t1, 1.0);
  return {round_all(sig), round_all(bg)};
}

}  // namespace

TEST_CASE("alpha2 calibration") {
  Calibration cal;
  const Alpha2 a = calibrate_alpha2(cal);
  CHECK(a.value == doctest::Approx(3333.0 * 9.0 * 11e-6 / 0.33).epsilon(1e-14));
  CHECK(a.value == doctest::Approx(1.0).epsilon(1e-3));
  const double rel = std::sqrt(0.05 * 0.05 + (0.05 / 0.33) * (0.05 / 0.33) + 1.0 / (3333.0 * 60.0));
  CHECK(a.rel_uncertainty == doctest::Approx(rel).epsilon(1e-14));
  cal.monitor_rate_cps = 2 * 3333.0;
  CHECK(calibrate_alpha2(cal).value == doctest::Approx(2.0 * a.value).epsilon(1e-15));
  cal.monitor_rate_cps = 0.0;
  CHECK(calibrate_alpha2(cal).value == 0.0);
  cal = Calibration{};
  cal.rep_rate_hz = 0.0;
  CHECK_THROWS_AS(calibrate_alpha2(cal), DomainError);
  cal = Calibration{};
  cal.apd_efficiency = 0.0;
  CHECK_THROWS_AS(calibrate_alpha2(cal), DomainError);
}

TEST_CASE("expected counts at the operating point") {
  const config::RunConfig c = config::parse_config("{}");
  const auto env = sweep::model_envelopes(c, 0.13);
  const Calibration& cal = c.calibration;
  const auto v = expected_counts(env.retrieved, {}, 0.0, cal, 120.0, 155.0, 1.0);
  double sum = 0.0;
  for (double x : v) sum += x;
  CHECK(sum == doctest::Approx(0.13 * 0.33 * cal.attempts()).epsilon(0.01));
  CHECK(sum == doctest::Approx(2.3e5).epsilon(0.02));

  const auto span = default_span(c.timing);
  CHECK(span.first == -100.0);
  CHECK(span.second == doctest::Approx(240.0));
  const auto noise = expected_counts({}, {}, 1e-3, cal, span.first, span.second, 1.0);
  double total = 0.0;
  for (double x : noise) total += x;
  CHECK(total == doctest::Approx(1e-3 * cal.attempts()).epsilon(1e-12));
  CHECK_THROWS_AS(expected_counts({}, {}, -1.0, cal, 0.0, 10.0, 1.0), DomainError);
}

TEST_CASE("synthesis") {
  const config::RunConfig c = config::parse_config("{}");
  const Calibration& cal = c.calibration;
  const auto zero = synthesize_histogram({}, {}, 0.0, cal, c.timing, 1.0, 7);
  CHECK(std::all_of(zero.counts.begin(), zero.counts.end(), [](auto v) { return v == 0; }));

  const auto env = sweep::model_envelopes(c, 0.13);
  const auto a = synthesize_histogram(env.retrieved, env.leak, 3e-3, cal, c.timing, 1.0, 42);
  const auto b = synthesize_histogram(env.retrieved, env.leak, 3e-3, cal, c.timing, 1.0, 42);
  const auto d = synthesize_histogram(env.retrieved, env.leak, 3e-3, cal, c.timing, 1.0, 43);
  CHECK(a.counts == b.counts);
  CHECK(a.counts != d.counts);
  CHECK(a.t0_ns == -100.0);
  CHECK(a.rep_rate_hz == cal.rep_rate_hz);
  CHECK(a.integration_time_s == cal.integration_time_s);
}

TEST_CASE("flat noise totals concentrate") {
  const config::RunConfig c = config::parse_config("{}");
  const double r = 3.06e-3;
  const double n_expected = r * c.calibration.attempts();
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto h = synthesize_histogram({}, {}, r, c.calibration, c.timing, 1.0, seed);
    double total = 0.0;
    for (auto v : h.counts) total += static_cast<double>(v);
    CHECK(std::abs(total / n_expected - 1.0) < 4.0 / std::sqrt(n_expected));
  }
}

TEST_CASE("Poisson dispersion per bin") {
  const config::RunConfig c = config::parse_config("{}");
  const double r = 3.06e-3;
  const int seeds = 2000;
  const std::size_t bins[] = {0, 37, 101, 170, 250, 339};
  std::vector<double> s(6, 0.0), s2(6, 0.0);
  double lambda = 0.0;
  for (int seed = 0; seed < seeds; ++seed) {
    const auto h = synthesize_histogram({}, {}, r, c.calibration, c.timing, 1.0, seed);
    lambda = r * c.calibration.attempts() / static_cast<double>(h.size());
    for (int k = 0; k < 6; ++k) {
      const double v = static_cast<double>(h.counts[bins[k]]);
      s[k] += v;
      s2[k] += v * v;
    }
  }
  CHECK(lambda >= 10.0);
  for (int k = 0; k < 6; ++k) {
    const double mean = s[k] / seeds;
    const double var = (s2[k] - seeds * mean * mean) / (seeds - 1);
    CAPTURE(bins[k]);
    CHECK(var / mean >= 0.9);
    CHECK(var / mean <= 1.1);
  }
}

TEST_CASE("storage time extraction") {
  CHECK(extract_storage_time(spikes({{0.0, 500}, {140.0, 300}}), 120.0) == 140.0);
  CHECK(extract_storage_time(spikes({{0.0, 1}, {80.0, 1}}), 60.0) == 80.0);
  CHECK(extract_storage_time(spikes({{0.0, 500}, {140.0, 300}, {160.0, 300}}), 120.0) == 140.0);
  CHECK_THROWS_AS(extract_storage_time(spikes({{0.0, 5}}), -100.0), AnalysisError);
  CHECK_THROWS_AS(extract_storage_time(spikes({{0.0, 5}}), 500.0), AnalysisError);
  CHECK(argmax(std::vector<double>{1, 3, 3, 2}, 0, 4) == 1);
  // Rounding-level differences between mathematically equal bins are ties.
  CHECK(argmax(std::vector<double>{1, 27136.0, 27136.0 * (1 + 4e-16), 2}, 0, 4) == 1);
  CHECK(argmax(std::vector<double>{1, 27136.0, 27137.0, 2}, 0, 4) == 2);
}

TEST_CASE("default window") {
  std::vector<std::int64_t> valley(340, 0);
  for (int t = 0; t < 140; ++t) valley[t + 100] = 10 + std::abs(t - 110);
  valley[100] = 2000;
  valley[240] = 2000;
  const DetectionWindow w = default_window(make_hist(valley), 155.0, 120.0);
  CHECK(w.t_min_ns == 110.0);
  CHECK(w.t_max_ns == 155.0);

  std::vector<std::int64_t> rise(340, 0);
  for (int t = 1; t < 140; ++t) rise[t + 100] = t;
  rise[100] = 5000;
  rise[240] = 5000;
  CHECK(default_window(make_hist(rise), 155.0, 120.0).t_min_ns == 1.0);

  CHECK_THROWS_AS(default_window(spikes({{0.0, 9}, {1.0, 10}}), 155.0, 1.0), AnalysisError);
}

TEST_CASE("counts in window use whole bins") {
  const auto h = make_hist(std::vector<std::int64_t>(10, 1), 0.0);
  CHECK(counts_in_window(h, {2.0, 5.0}) == 3);
  CHECK(counts_in_window(h, {2.5, 5.0}) == 2);
  CHECK(counts_in_window(h, {-3.0, 30.0}) == 10);
}

TEST_CASE("end-to-end efficiency from counts") {
  Calibration cal;
  cal.rep_rate_hz = 1.0 / 11e-6;
  cal.integration_time_s = 60.0;
  CHECK(eta_e2e_from_counts(2.34e5 + 1000.0, 1000.0, 1.0, cal) == doctest::Approx(0.130).epsilon(1e-3));
  CHECK(eta_e2e_from_counts(500.0, 500.0, 1.0, cal) == 0.0);
  const double e1 = eta_e2e_from_counts(3000.0, 1000.0, 1.0, cal);
  CHECK(eta_e2e_from_counts(5000.0, 1000.0, 1.0, cal) == doctest::Approx(2.0 * e1).epsilon(1e-15));
  Calibration twice = cal;
  twice.integration_time_s *= 2.0;
  CHECK(eta_e2e_from_counts(6000.0, 2000.0, 1.0, twice) == doctest::Approx(e1).epsilon(1e-15));
  CHECK(eta_e2e_from_counts(100.0, 1000.0, 1.0, cal) < 0.0);
  CHECK_THROWS_AS(eta_e2e_from_counts(1.0, 0.0, 0.0, cal), DomainError);
}

TEST_CASE("SNR from counts") {
  CHECK(snr_from_counts(15.0 * 1234.0, 1234.0) == doctest::Approx(14.0).epsilon(1e-15));
  CHECK(snr_from_counts(77.0, 77.0) == 0.0);
  CHECK(snr_from_counts(2.0 * 50.0, 50.0) == 1.0);
  CHECK(snr_from_counts(0.0, 50.0) == -1.0);
  CHECK_THROWS_AS(snr_from_counts(10.0, 0.0), UndefinedSnrError);
}

TEST_CASE("noise correction") {
  const auto s = make_hist({10, 4, 0, 7});
  const auto zero = make_hist({0, 0, 0, 0});
  const RealHistogram id = noise_correct(s, zero);
  CHECK(id.values == std::vector<double>{10, 4, 0, 7});
  const RealHistogram none = noise_correct(s, s);
  CHECK(none.values == std::vector<double>{0, 0, 0, 0});
  const RealHistogram d = noise_correct(s, make_hist({3, 5, 0, 0}));
  CHECK(d.values[0] == 7.0);
  CHECK(d.values[1] == -1.0);
  CHECK_THROWS_AS(noise_correct(s, make_hist({0, 0, 0})), DomainError);
  CHECK_THROWS_AS(noise_correct(s, make_hist({0, 0, 0, 0}, -99.0)), DomainError);
  ArrivalHistogram other = zero;
  other.integration_time_s = 30.0;
  CHECK_THROWS_AS(noise_correct(s, other), DomainError);
}

TEST_CASE("window trade-off") {
  const config::RunConfig c = config::parse_config("{}");
  const auto [sig, bg] = rounded_pair(c, 3.06e-3);
  const std::vector<double> t_max{150, 152, 155, 160, 170, 180, 200, 230};
  const auto rows = window_tradeoff(sig, bg, 1.0, c.calibration, 120.0, t_max);
  REQUIRE(rows.size() == t_max.size());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].eta_e2e >= rows[i - 1].eta_e2e);
    CHECK(*rows[i].snr <= *rows[i - 1].snr);
  }
  CHECK(rows.back().eta_e2e / rows[3].eta_e2e - 1.0 < 1e-3);
  CHECK(*rows.back().snr < 0.6 * *rows[3].snr);

  const auto& at155 = rows[2];
  CHECK(at155.t_max_ns == 155.0);
  CHECK(at155.eta_e2e == eta_e2e_from_counts(at155.n_signal, at155.n_noise, 1.0, c.calibration));
  const double n_sig = static_cast<double>(counts_in_window(sig, {120.0, 155.0}));
  CHECK(at155.n_signal == n_sig);

  const auto [quiet, empty] = rounded_pair(c, 0.0);
  const auto q = window_tradeoff(quiet, empty, 1.0, c.calibration, 120.0, t_max);
  CHECK_FALSE(q[2].snr.has_value());
  CHECK(q[2].eta_e2e > 0.12);
}

TEST_CASE("analysis of a noise-free pair") {
  const config::RunConfig c = config::parse_config("{}");
  const auto [sig, bg] = rounded_pair(c, 3.06e-3);
  const Analysis a = analyze(sig, bg, {1.0, 0.1}, c.calibration, c.timing, 155.0);
  CHECK(a.metrics.eta_e2e == doctest::Approx(0.13).epsilon(0.01));
  CHECK(a.metrics.eta_mem == doctest::Approx(0.325).epsilon(0.01));
  CHECK(*a.metrics.storage_time_ns == 140.0);
  CHECK(a.metrics.window->t_max_ns == 155.0);
  CHECK(*a.metrics.mu1 == doctest::Approx(1.0 / *a.metrics.snr).epsilon(1e-15));
  CHECK(a.metrics.eta_mem >= a.metrics.eta_e2e);
  CHECK_FALSE(a.eta_nonpositive);
  CHECK(a.eta_e2e_sigma > 0.1 * a.metrics.eta_e2e);
}

TEST_CASE("round trip over seeds with the matched window") {
  const config::RunConfig c = config::parse_config("{}");
  const auto env = sweep::model_envelopes(c, c.synth.eta_e2e);
  const double attempts = c.calibration.attempts();
  const double sigma = 8.0 / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  const double eta_true =
      0.13 * 0.5 * (std::erf(15.0 / (sigma * std::sqrt(2.0))) + std::erf(20.0 / (sigma * std::sqrt(2.0))));
  const double snr_true = eta_true * 0.33 / 3.06e-3;
  int eta_ok = 0, snr_ok = 0;
  const int seeds = 30;
  for (int seed = 0; seed < seeds; ++seed) {
    const auto h = sweep::synthesize_pair(c, env, 3.06e-3, seed);
    const double ns = static_cast<double>(counts_in_window(h.signal, {120.0, 155.0}));
    const double nn = static_cast<double>(counts_in_window(h.noise, {120.0, 155.0}));
    const double eta = eta_e2e_from_counts(ns, nn, 1.0, c.calibration);
    const double snr = snr_from_counts(ns, nn);
    const double s = ns - nn;
    const double eta_se = std::sqrt(ns + nn) / (0.33 * attempts);
    const double snr_se = std::sqrt(s / (nn * nn) + s * s / (nn * nn * nn));
    eta_ok += std::abs(eta - eta_true) <= 3.0 * eta_se;
    snr_ok += std::abs(snr - snr_true) <= 3.0 * snr_se;
  }
  CHECK(eta_ok >= seeds - 2);
  CHECK(snr_ok >= seeds - 2);
}
