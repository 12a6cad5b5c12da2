// Acceptance suite. Prints one PASS/FAIL line per criterion.
//
// Exit status is 0 when every criterion ran to completion; pass --strict to
// also fail on any FAIL line.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <thread>
#include <unistd.h>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "oracles.hpp"
#include "sphens/analytics.hpp"
#include "sphens/errors.hpp"
#include "sphens/estimators.hpp"
#include "sphens/experiments.hpp"
#include "sphens/geometry.hpp"
#include "sphens/gof.hpp"
#include "sphens/hull.hpp"
#include "sphens/rng.hpp"
#include "sphens/samplers.hpp"

using namespace sphens;

namespace {

// Tolerances and sizes.
constexpr double kZ = 4.0;
constexpr double kChiSquareMinP = 1e-3;
constexpr double kVarianceRelTol = 0.10;
constexpr double kModuliKsMax = 0.02;
constexpr double kNnKsMax = 0.02;
constexpr double kSpacingTol = 0.03;
constexpr double kEnsembleSlopeLo = 0.10, kEnsembleSlopeHi = 0.40;
constexpr double kIidSlopeLo = 0.35, kIidSlopeHi = 0.65;
constexpr double kStolarskyRelTol = 1e-9;
constexpr double kQuadratureRelTol = 1e-3;
constexpr double kEmptyCapBandLo = 0.6, kEmptyCapBandHi = 1.4;
constexpr double kCriterion9Seconds = 1800.0;
constexpr double kCriterion1Seconds = 60.0;

std::size_t g_threads = 1;
std::filesystem::path g_data_dir;
std::filesystem::path g_work_dir;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Runs one harness group and returns its summary with the exact comparison.
SummaryRecord mc(SamplerKind sampler, std::size_t n, std::size_t replicates, const char* stat,
                 std::uint64_t seed) {
  ExperimentConfig c;
  c.base_seed = seed;
  c.samplers = {sampler};
  c.n_values = {n};
  c.replicates = replicates;
  c.statistics = {StatisticSpec::parse(stat)};
  c.output_dir = g_work_dir / fmt("mc_%s_%zu_%llu", stat, n, static_cast<unsigned long long>(seed));
  const auto result = run_experiment(c, g_threads);
  std::filesystem::remove_all(c.output_dir);
  if (!result.errors.empty()) throw Error("replicate errors in " + std::string(stat));
  return result.summaries.at(0);
}

std::string z_detail(const SummaryRecord& r) {
  return fmt("mean %.6g exact %.6g z %.2f (%zu reps)", r.mean, *r.exact_value, *r.z_score,
             r.replicates);
}

bool z_ok(const SummaryRecord& r) { return r.z_score && std::abs(*r.z_score) <= kZ; }

// ------------------------------------------------------------------ criteria

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const double exact = expected_riesz_energy(2, 1.0);
  const bool exact_ok = std::abs(exact - 4.0 / 3.0) <= 1e-12;
  const auto r = mc(SamplerKind::MatrixModel, 2, 200000, "riesz_energy:s=1", 101);
  const double secs = seconds_since(t0);
  return {exact_ok && z_ok(r) && secs < kCriterion1Seconds,
          fmt("exact %.17g; ", exact) + z_detail(r) + fmt("; %.1f s", secs)};
}

Outcome criterion2() {
  long double worst = 0.0L;
  bool bound_ok = true;
  for (std::size_t n = 2; n <= 64; ++n) {
    const long double err = std::abs(riesz_s2_expansion_error(n));
    const long double bound = 1.0L / (480.0L * n * n);
    bound_ok = bound_ok && err <= bound;
    worst = std::max(worst, err / bound);
  }
  const auto r = mc(SamplerKind::HkpvDpp, 8, 100000, "riesz_energy:s=2", 102);
  return {bound_ok && z_ok(r),
          fmt("max |error| / bound %.6f; ", static_cast<double>(worst)) + z_detail(r)};
}

Outcome criterion3() {
  const double h = 1e-6;
  double worst = 0.0;
  for (std::size_t n : {2u, 8u, 32u, 128u}) {
    const double deriv =
        (expected_riesz_energy(n, h) - expected_riesz_energy(n, -h)) / (2.0 * h);
    const double closed = expected_log_energy(n);
    worst = std::max(worst, std::abs(deriv - closed) / std::abs(closed));
  }
  const double gap = std::abs(expected_log_energy(128) - expected_log_energy_asymptotic(128));
  return {worst <= 1e-6 && gap <= 2.0 / 128.0,
          fmt("max relative derivative error %.3g; |exact - asymptotic| at n=128 %.3g (bound %.3g)",
              worst, gap, 2.0 / 128.0)};
}

Outcome criterion4() {
  const std::size_t n = 16, reps = 10000;
  const double alpha = 0.2;
  const auto pmf = cap_count_pmf(n, alpha);
  const double exact_var = count_variance_exact(n, alpha);
  bool pass = true;
  std::string detail;
  for (auto kind : {SamplerKind::MatrixModel, SamplerKind::HkpvDpp}) {
    std::vector<long> counts;
    counts.reserve(reps);
    double s = 0.0, s2 = 0.0;
    const auto spec = StatisticSpec::parse("cap_count:alpha=0.2");
    for (std::size_t r = 0; r < reps; ++r) {
      const auto v = evaluate_statistic(spec, sample(kind, n, replicate_seed(104, kind, n, r)));
      counts.push_back(static_cast<long>(v));
      s += v;
      s2 += v * v;
    }
    const double mean = s / reps;
    const double var = (s2 - reps * mean * mean) / (reps - 1);
    const auto chi = chi_square_test(counts, pmf);
    const double rel = std::abs(var / exact_var - 1.0);
    pass = pass && chi.p_value > kChiSquareMinP && rel <= kVarianceRelTol;
    detail += fmt("%s: chi2 p %.4f, var %.4f vs %.4f; ", std::string(sampler_name(kind)).c_str(),
                  chi.p_value, var, exact_var);
  }
  return {pass, detail};
}

Outcome criterion5() {
  const auto t0 = std::chrono::steady_clock::now();
  bool pass = true;
  std::string detail;
  for (double alpha : {0.3, 0.5}) {
    const double ratio = count_variance_exact(4096, alpha) /
                         count_variance_asymptotic(4096, 4.0 * std::numbers::pi * alpha);
    pass = pass && ratio >= 0.99 && ratio <= 1.01;
    detail += fmt("alpha %.1f ratio %.6f; ", alpha, ratio);
  }
  const double secs = seconds_since(t0);
  return {pass && secs < 1.0, detail + fmt("%.3f s", secs)};
}

Outcome criterion6() {
  const auto r = mc(SamplerKind::MatrixModel, 16, 100000, "hole_indicator:alpha=0.2", 106);
  // Binomial stderr of the frequency around the exact probability.
  const double p = hole_probability(16, 0.2);
  const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(r.replicates));
  const double z = (r.mean - p) / se;
  bool pass = std::abs(z) <= kZ;
  std::string detail = fmt("freq %.6g exact %.6g binomial z %.2f; ", r.mean, p, z);
  for (auto [n, alpha] : {std::pair<std::size_t, double>{256, 0.1}, {1024, 0.05}}) {
    const double gap = std::abs(log_hole_probability(n, alpha) - hole_probability_asymptotic(n, alpha));
    const double na = static_cast<double>(n) * alpha;
    const double bound = 5.0 * na * std::log(na);
    pass = pass && gap <= bound;
    detail += fmt("n=%zu gap %.4g bound %.4g; ", n, gap, bound);
  }
  return {pass, detail};
}

Outcome criterion7() {
  const std::size_t n = 16, reps = 10000;
  std::vector<double> moduli;
  moduli.reserve(n * reps);
  for (std::size_t r = 0; r < reps; ++r) {
    const auto c = sample_matrix_model(n, replicate_seed(107, SamplerKind::MatrixModel, n, r));
    for (const auto& p : c.points()) {
      // |w|^2 of the plane preimage, from the height alone.
      moduli.push_back((1.0 + p.z()) / (1.0 - p.z()));
    }
  }
  auto mixture = [n](double x) {
    if (x <= 0.0) return 0.0;
    const double u = x / (1.0 + x);
    double total = 0.0;
    // P(BetaPrime(k+1, n-k) <= x) = P(Bin(n, u) > k).
    for (std::size_t k = 0; k < n; ++k) total += binom_tail(BinomialLaw(n, u), k);
    return total / static_cast<double>(n);
  };
  const auto ks = ks_test(moduli, mixture);
  return {ks.statistic <= kModuliKsMax, fmt("pooled KS distance %.5f over %zu values", ks.statistic,
                                            moduli.size())};
}

Outcome criterion8() {
  const std::size_t n = 256, reps = 200;
  std::vector<double> values;
  for (std::size_t r = 0; r < reps; ++r) {
    const auto c = sample_matrix_model(n, replicate_seed(108, SamplerKind::MatrixModel, n, r));
    const auto v = nn_spacing_values(c);
    values.insert(values.end(), v.begin(), v.end());
  }
  const auto ks = ks_test(values, [n](double x) { return x <= 0 ? 0.0 : 1.0 - gap_cdf_finite(n, x); });
  bool pass = ks.statistic <= kNnKsMax;
  std::string detail = fmt("pooled ECDF sup distance %.5f; ", ks.statistic);
  for (std::size_t m : {64u, 256u, 1024u}) {
    const double md = static_cast<double>(m);
    const double err = std::abs(conditional_hole_probability(m, 1.0 / md) - gap_cdf_finite(m, 1.0));
    const double ratio = err / (std::log(md) / md);
    pass = pass && ratio <= 10.0;
    detail += fmt("n=%zu error/(log n/n) %.3f; ", m, ratio);
  }
  return {pass, detail};
}

Outcome criterion9() {
  const auto dir = g_data_dir / "min_spacing_n1024";
  const auto config = ExperimentConfig::load(dir / "config.json");
  std::ifstream min(dir / "manifest.json");
  const auto manifest = nlohmann::json::parse(min);
  const auto rows = read_raw_csv(dir / "raw.csv");
  const std::size_t n = config.n_values.at(0);

  std::vector<double> spacing, pairs;
  for (const auto& r : rows) {
    if (r.statistic == "scaled_min_spacing") spacing.push_back(std::stod(r.value));
    if (r.statistic == "pair_count") pairs.push_back(std::stod(r.value));
  }
  bool pass = spacing.size() == config.replicates && pairs.size() == config.replicates;
  std::string detail = fmt("%zu replicates; ", spacing.size());
  for (double x : {1.0, 1.5, 2.0}) {
    const double freq = static_cast<double>(std::count_if(spacing.begin(), spacing.end(),
                                                          [x](double v) { return v > x; })) /
                        static_cast<double>(spacing.size());
    const double limit = std::exp(-std::pow(x, 4) / 64.0);
    pass = pass && std::abs(freq - limit) <= kSpacingTol;
    detail += fmt("P(>%.1f) %.4f vs %.4f; ", x, freq, limit);
  }
  const auto pair_summary =
      compare_to_exact({summarize(StatisticSpec::parse("pair_count:x=2"), n, config.samplers[0], pairs)});
  pass = pass && z_ok(pair_summary[0]);
  detail += "pair count " + z_detail(pair_summary[0]) + "; ";

  const auto report = verify_raw(config, dir / "raw.csv", 0.01, g_threads);
  pass = pass && report.ok();
  detail += fmt("recomputed %zu replicates, %zu mismatches; ", report.replicates_checked,
                report.mismatches);

  const double wall = manifest.at("wall_seconds").get<double>();
  const bool fast_enough = wall <= kCriterion9Seconds;
  detail += fmt("generation wall time %.0f s (limit %.0f s, %s threads); ", wall, kCriterion9Seconds,
                manifest.value("threads", nlohmann::json("?")).dump().c_str());
  detail += std::string("statistics ") + (pass ? "ok" : "out of tolerance") + ", runtime " +
            (fast_enough ? "ok" : "over limit");
  return {pass && fast_enough, detail};
}

double fitted_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += std::log(xs[i]);
    my += std::log(ys[i]);
  }
  mx /= xs.size();
  my /= ys.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = std::log(xs[i]) - mx;
    sxy += dx * (std::log(ys[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

Outcome criterion10() {
  const std::size_t reps = 30;
  const std::vector<double> ns{64, 128, 256};
  DiscrepancyOptions opt;
  opt.threads = g_threads;
  std::string detail;
  bool pass = true;
  for (auto kind : {SamplerKind::MatrixModel, SamplerKind::UniformIid}) {
    std::vector<double> medians;
    for (double nd : ns) {
      const auto n = static_cast<std::size_t>(nd);
      std::vector<double> v;
      for (std::size_t r = 0; r < reps; ++r) {
        const auto c = sample(kind, n, replicate_seed(110, kind, n, r));
        v.push_back(cap_discrepancy(c, DiscrepancyMode::CandidateExact, opt).value);
      }
      std::sort(v.begin(), v.end());
      medians.push_back(quantile_type7(v, 0.5));
    }
    const double slope = fitted_slope(ns, medians);
    const bool iid = kind == SamplerKind::UniformIid;
    const double lo = iid ? kIidSlopeLo : kEnsembleSlopeLo, hi = iid ? kIidSlopeHi : kEnsembleSlopeHi;
    pass = pass && slope >= lo && slope <= hi;
    detail += fmt("%s medians %.3f %.3f %.3f slope %.3f in [%.2f, %.2f]; ",
                  std::string(sampler_name(kind)).c_str(), medians[0], medians[1], medians[2], slope,
                  lo, hi);
  }
  return {pass, detail};
}

Outcome criterion11() {
  Rng rng(111);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform() * 300.0);
    std::vector<SpherePoint> pts;
    for (std::size_t i = 0; i < n; ++i) pts.emplace_back(rng.normal(), rng.normal(), rng.normal());
    const Configuration c(std::move(pts), "random", 0);
    long double pair_sum = 0.0L;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) pair_sum += chord_distance(c[i], c[j]);
    const double lhs = l2_discrepancy_sq(c) + static_cast<double>(pair_sum);
    const double rhs = 2.0 / 3.0 * static_cast<double>(n) * static_cast<double>(n);
    worst = std::max(worst, std::abs(lhs - rhs) / rhs);
  }
  const auto fixed = sample_uniform_iid(8, 2024);
  const double quad = oracles::l2_quadrature(fixed, 200000);
  const double quad_rel = std::abs(l2_discrepancy_sq(fixed) / quad - 1.0);
  const auto r = mc(SamplerKind::MatrixModel, 8, 100000, "l2_discrepancy_sq", 111);
  const double closed = std::tgamma(1.5) * std::tgamma(8.0) * 64.0 / std::tgamma(9.5);
  const bool closed_ok = std::abs(*r.exact_value - closed) <= 1e-12 * closed;
  return {worst <= kStolarskyRelTol && quad_rel <= kQuadratureRelTol && closed_ok && z_ok(r),
          fmt("Stolarsky max rel error %.3g; quadrature rel error %.3g; ", worst, quad_rel) +
              z_detail(r)};
}

Outcome criterion12() {
  Rng rng(112);
  std::size_t agree = 0;
  double worst_gap = 0.0;
  for (int i = 0; i < 100; ++i) {
    std::vector<SpherePoint> pts;
    for (int k = 0; k < 64; ++k) pts.emplace_back(rng.normal(), rng.normal(), rng.normal());
    const Configuration c(std::move(pts), "random", 0);
    const auto exact = largest_empty_cap(c, EmptyCapMode::Exact);
    const auto grid = largest_empty_cap(c, EmptyCapMode::Grid);
    const double gap = exact.chord_radius - grid.chord_radius;
    worst_gap = std::max(worst_gap, gap / grid.radius_tolerance);
    if (gap >= -kEmptyCapTolerance && gap <= grid.radius_tolerance) ++agree;
  }
  const auto rows = read_raw_csv(g_data_dir / "min_spacing_n1024" / "raw.csv");
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& r : rows) {
    if (r.statistic == "scaled_largest_empty_cap" && r.replicate < 100) {
      sum += std::stod(r.value);
      ++count;
    }
  }
  const double mean = sum / static_cast<double>(count);
  return {agree == 100 && count == 100 && mean >= kEmptyCapBandLo && mean <= kEmptyCapBandHi,
          fmt("exact/grid agree on %zu/100 (max gap/tolerance %.3f); n=1024 mean of scaled M_n "
              "%.4f over %zu replicates",
              agree, worst_gap, mean, count)};
}

Outcome criterion13() {
  std::size_t pos_ok = 0, neg_ok = 0;
  for (int k = 1; k <= 1999; ++k) {
    const double s = 2.0 * k / 2000.0;
    const auto b = energy_bounds(s);
    if (b.corollary_coeff > b.rsz_coeff) ++pos_ok;
    const auto c = energy_bounds(-s);
    if (c.corollary_coeff < c.rsz_coeff) ++neg_ok;
  }
  return {pos_ok == 1999 && neg_ok == 1999,
          fmt("s in (0,2): %zu/1999 ordered; s in (-2,0): %zu/1999 reversed", pos_ok, neg_ok)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  bool strict = false;
  std::vector<int> only;
  std::string data_dir = SPHENS_TEST_DATA_DIR;
  app.add_flag("--strict", strict, "Exit nonzero when any criterion fails");
  app.add_option("--only", only, "Run only these criteria")->check(CLI::Range(1, 13));
  app.add_option("--data", data_dir, "Directory holding cached experiment data");
  app.add_option("--threads", g_threads, "Worker threads (0 = all cores)");
  CLI11_PARSE(app, argc, argv);
  if (g_threads == 0) g_threads = std::max(1u, std::thread::hardware_concurrency());
  g_data_dir = data_dir;
  g_work_dir = std::filesystem::temp_directory_path() / ("sphens_acceptance_" + std::to_string(::getpid()));
  std::filesystem::create_directories(g_work_dir);

  const std::vector<std::function<Outcome()>> criteria = {
      criterion1, criterion2, criterion3,  criterion4,  criterion5,  criterion6, criterion7,
      criterion8, criterion9, criterion10, criterion11, criterion12, criterion13};
  const std::set<int> selected(only.begin(), only.end());
  int failures = 0, errors = 0;
  for (int i = 1; i <= 13; ++i) {
    if (!selected.empty() && !selected.count(i)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i - 1]();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
      ++errors;
    }
    if (!o.pass) ++failures;
    std::printf("criterion %2d: %s  %s [%.1f s]\n", i, o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  std::filesystem::remove_all(g_work_dir);
  std::printf("%d failing criteria\n", failures);
  if (errors > 0) return 2;
  return strict && failures > 0 ? 1 : 0;
}
