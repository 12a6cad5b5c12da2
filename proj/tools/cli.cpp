#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "plot.hpp"
#include "sphens/analytics.hpp"
#include "sphens/errors.hpp"
#include "sphens/estimators.hpp"
#include "sphens/experiments.hpp"
#include "sphens/hull.hpp"
#include "sphens/point_io.hpp"
#include "sphens/samplers.hpp"

namespace sphens::cli {

namespace {

using nlohmann::json;

struct Params {
  std::size_t n = 0;
  std::size_t k = 0;
  double s = 0.0;
  double alpha = 0.0;
  double x = 0.0;
  double t = 0.0;
};

struct Quantity {
  std::string name;
  std::vector<std::string> params;
  std::string description;
  // Returns an object with "value" and optionally "log_value" or extra keys.
  std::function<json(const Params&)> eval;
};

json value_only(double v) { return {{"value", v}}; }

json with_log(double log_value) { return {{"value", std::exp(log_value)}, {"log_value", log_value}}; }

double cap_area(double alpha) { return 4.0 * kPi * alpha; }

const std::vector<Quantity>& quantities() {
  static const std::vector<Quantity> table = {
      {"riesz-energy", {"n", "s"}, "expected Riesz s-energy of the ensemble",
       [](const Params& p) { return value_only(expected_riesz_energy(p.n, p.s)); }},
      {"riesz-energy-s2", {"n"}, "expected Riesz 2-energy, (n^2/4) H_{n-1}",
       [](const Params& p) { return value_only(expected_riesz_energy_s2(p.n)); }},
      {"riesz-energy-s2-expansion", {"n"}, "four-term expansion of the Riesz 2-energy",
       [](const Params& p) {
         json r = value_only(expected_riesz_energy_s2_expansion(p.n));
         r["error"] = static_cast<double>(riesz_s2_expansion_error(p.n));
         return r;
       }},
      {"log-energy", {"n"}, "expected logarithmic energy",
       [](const Params& p) { return value_only(expected_log_energy(p.n)); }},
      {"log-energy-asymptotic", {"n"}, "asymptotic logarithmic energy",
       [](const Params& p) { return value_only(expected_log_energy_asymptotic(p.n)); }},
      {"binomial-tail", {"n", "alpha", "k"}, "P(Bin(n, alpha) > k)",
       [](const Params& p) { return value_only(binom_tail(BinomialLaw(p.n, p.alpha), p.k)); }},
      {"cap-count-pmf", {"n", "alpha"}, "pmf of the number of points in a cap of area fraction alpha",
       [](const Params& p) { return json{{"value", cap_count_pmf(p.n, p.alpha)}}; }},
      {"count-mean", {"n", "alpha"}, "mean cap count",
       [](const Params& p) { return value_only(cap_count_law(p.n, p.alpha).mean()); }},
      {"count-variance", {"n", "alpha"}, "exact cap-count variance",
       [](const Params& p) { return value_only(count_variance_exact(p.n, p.alpha)); }},
      {"count-variance-asymptotic", {"n", "alpha"}, "leading-order cap-count variance",
       [](const Params& p) { return value_only(count_variance_asymptotic(p.n, cap_area(p.alpha))); }},
      {"clt-normalizer", {"n", "alpha"}, "normalizer of the cap-count central limit theorem",
       [](const Params& p) { return value_only(clt_normalizer(p.n, cap_area(p.alpha))); }},
      {"hole", {"n", "alpha"}, "probability that a cap of area fraction alpha is empty",
       [](const Params& p) { return with_log(log_hole_probability(p.n, p.alpha)); }},
      {"hole-asymptotic", {"n", "alpha"}, "leading-order log hole probability",
       [](const Params& p) { return json{{"log_value", hole_probability_asymptotic(p.n, p.alpha)}}; }},
      {"conditional-hole", {"n", "alpha"}, "hole probability given a point at the cap center",
       [](const Params& p) { return with_log(log_conditional_hole_probability(p.n, p.alpha)); }},
      {"gap-finite", {"n", "x"}, "finite-n nearest-neighbour gap function E_n(x)",
       [](const Params& p) { return with_log(GapFunctions::log_finite(p.n, p.x)); }},
      {"gap-limit", {"x"}, "limiting gap function E(x)",
       [](const Params& p) { return value_only(gap_cdf_limit(p.x)); }},
      {"gap-density", {"x"}, "limiting nearest-neighbour spacing density Q(x)",
       [](const Params& p) { return value_only(gap_density(p.x)); }},
      {"pair-count", {"n", "t"}, "expected number of pairs closer than t",
       [](const Params& p) { return value_only(expected_pair_count(p.n, p.t)); }},
      {"pair-count-threshold", {"n", "x"}, "distance threshold x n^(-3/4)",
       [](const Params& p) { return value_only(pair_count_threshold(p.n, p.x)); }},
      {"min-spacing-limit", {"x"}, "limit of P(n^(3/4) m_n > x)",
       [](const Params& p) { return value_only(min_spacing_limit_cdf(p.x)); }},
      {"iid-min-spacing-limit", {"x"}, "limit of P(n m_n > x) for independent points",
       [](const Params& p) { return value_only(iid_min_spacing_limit_cdf(p.x)); }},
      {"energy-bounds", {"s"}, "the two second-order energy coefficients",
       [](const Params& p) {
         const auto b = energy_bounds(p.s);
         return json{{"value", {{"corollary_coeff", b.corollary_coeff}, {"rsz_coeff", b.rsz_coeff}}}};
       }},
      {"l2-discrepancy", {"n"}, "expected squared L2 cap discrepancy and its bound",
       [](const Params& p) {
         const auto e = expected_l2_discrepancy_sq(p.n);
         return json{{"value", e.value}, {"bound", e.bound}};
       }},
      {"iid-riesz-energy", {"n", "s"}, "expected Riesz s-energy of independent uniform points",
       [](const Params& p) { return value_only(iid::expected_riesz_energy(p.n, p.s)); }},
      {"iid-log-energy", {"n"}, "expected logarithmic energy of independent uniform points",
       [](const Params& p) { return value_only(iid::expected_log_energy(p.n)); }},
      {"iid-l2-discrepancy", {"n"}, "expected squared L2 discrepancy of independent uniform points",
       [](const Params& p) { return value_only(iid::expected_l2_discrepancy_sq(p.n)); }},
      {"iid-pair-count", {"n", "t"}, "expected close-pair count of independent uniform points",
       [](const Params& p) { return value_only(iid::expected_pair_count(p.n, p.t)); }},
      {"iid-hole", {"n", "alpha"}, "hole probability of independent uniform points",
       [](const Params& p) { return value_only(iid::hole_probability(p.n, p.alpha)); }},
  };
  return table;
}

std::string help_footer() {
  std::ostringstream os;
  os << "Exact quantities (sphens exact <quantity> --help):\n";
  for (const auto& q : quantities()) os << "  " << q.name << "  " << q.description << "\n";
  os << "\nStatistics (sphens stats --stat id[:param=value]):\n";
  for (const auto& s : statistic_registry()) {
    os << "  " << s.id;
    for (const auto& p : s.params) os << " [" << p << "]";
    os << "  " << s.description << "\n";
  }
  os << "\nSamplers: matrix, dpp, iid. Plot presets:";
  for (const auto& p : plot::preset_names()) os << ' ' << p;
  os << "\nExit codes: 0 success, 1 runtime error, 2 usage or domain error.\n";
  return os.str();
}

json point_json(const SpherePoint& p) { return json::array({p.x(), p.y(), p.z()}); }

std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

json stat_record(const StatisticSpec& spec, const Configuration& config, std::size_t threads) {
  json r{{"statistic", spec.id}, {"params", spec.params_string()}};
  if (spec.id == "cap_discrepancy") {
    DiscrepancyOptions opt;
    opt.threads = threads;
    const auto d = cap_discrepancy(config, *parse_discrepancy_mode(spec.mode), opt);
    r["value"] = d.value;
    r["witness"] = {{"center", point_json(d.witness_cap.center())},
                    {"chord_radius", d.witness_cap.chord_radius()},
                    {"threshold", d.threshold},
                    {"boundary_open", d.boundary_open},
                    {"count", d.witness_count},
                    {"area_fraction", d.witness_cap.area_fraction()}};
    return r;
  }
  if (spec.id == "largest_empty_cap" || spec.id == "scaled_largest_empty_cap") {
    const auto cap = largest_empty_cap(config);
    r["value"] = evaluate_statistic(spec, config);
    r["center"] = point_json(cap.center);
    r["chord_radius"] = cap.chord_radius;
    r["area"] = cap.area;
    return r;
  }
  const double v = evaluate_statistic(spec, config);
  r["value"] = std::isfinite(v) ? json(v) : json(nullptr);
  return r;
}

class Cli {
 public:
  Cli(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(std::vector<std::string> args) {
    CLI::App app{"Sampling, exact analytics and estimators for the spherical ensemble", "sphens"};
    app.set_version_flag("--version", std::string(software_version()));
    app.footer(help_footer());
    app.require_subcommand(1);
    app.add_flag("--json", json_, "Print machine-readable JSON on stdout");
    auto* threads_opt =
        app.add_option("--threads", threads_, "Worker threads (0 = all cores; env SPHENS_THREADS)")
            ->check(CLI::NonNegativeNumber);

    add_sample(app);
    add_exact(app);
    add_stats(app);
    add_experiment(app);
    add_plot(app);

    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
      if (threads_opt->count() == 0) threads_from_env();
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out_, err_);
      return code == 0 ? kExitOk : kExitUsage;
    }
    try {
      return action_();
    } catch (const DomainError& e) {
      err_ << "error: " << e.what() << "\n";
      return kExitUsage;
    } catch (const std::exception& e) {
      err_ << "error: " << e.what() << "\n";
      return kExitRuntime;
    }
  }

 private:
  void threads_from_env() {
    const char* env = std::getenv("SPHENS_THREADS");
    if (env == nullptr || *env == '\0') return;
    const std::string text(env);
    if (text.find_first_not_of("0123456789") != std::string::npos || text.size() > 6) {
      throw CLI::ValidationError("SPHENS_THREADS", "expected a non-negative integer, got '" + text + "'");
    }
    threads_ = std::stoul(text);
  }

  void add_sample(CLI::App& app) {
    auto* sub = app.add_subcommand("sample", "Draw one configuration");
    sub->add_option("--sampler", sampler_, "matrix, dpp or iid")
        ->required()
        ->check(CLI::IsMember({"matrix", "dpp", "iid"}));
    sub->add_option("--n", n_, "Number of points")->required();
    sub->add_option("--seed", seed_, "Seed")->required();
    sub->add_option("--out", out_path_, "Output file; stdout when omitted");
    sub->add_option("--format", format_, "csv or json (default: from --out extension)")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->callback([this] { action_ = [this] { return cmd_sample(); }; });
  }

  void add_exact(CLI::App& app) {
    auto* sub = app.add_subcommand("exact", "Evaluate an exact or asymptotic analytic quantity");
    sub->require_subcommand(1);
    for (const auto& q : quantities()) {
      auto* qc = sub->add_subcommand(q.name, q.description);
      for (const auto& p : q.params) {
        if (p == "n") qc->add_option("--n", params_.n, "Number of points")->required();
        if (p == "k") qc->add_option("--k", params_.k, "Count threshold")->required();
        if (p == "s") qc->add_option("--s", params_.s, "Energy exponent")->required();
        if (p == "alpha") qc->add_option("--alpha", params_.alpha, "Cap area fraction")->required();
        if (p == "x") qc->add_option("--x", params_.x, "Scaled argument")->required();
        if (p == "t") qc->add_option("--t", params_.t, "Chord distance")->required();
      }
      const Quantity* qp = &q;
      qc->callback([this, qp] { action_ = [this, qp] { return cmd_exact(*qp); }; });
    }
  }

  void add_stats(CLI::App& app) {
    auto* sub = app.add_subcommand("stats", "Run estimators on a point file");
    sub->add_option("--in", in_path_, "Point file (CSV or JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--stat", stat_texts_, "Statistic id, optionally id:param=value")->required();
    sub->callback([this] { action_ = [this] { return cmd_stats(); }; });
  }

  void add_experiment(CLI::App& app) {
    auto* sub = app.add_subcommand("experiment", "Run or verify an experiment config");
    sub->add_option("--config", config_path_, "Experiment config JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_path_, "Override the config's output_dir");
    sub->add_flag("--verify", verify_, "Recompute a fraction of an existing run and compare");
    sub->add_option("--fraction", fraction_, "Fraction of replicates to verify")
        ->check(CLI::Range(1e-6, 1.0));
    sub->callback([this] { action_ = [this] { return cmd_experiment(); }; });
  }

  void add_plot(CLI::App& app) {
    auto* sub = app.add_subcommand("plot", "Render a plot spec to SVG");
    auto* spec = sub->add_option("--spec", spec_path_, "Plot spec JSON")->check(CLI::ExistingFile);
    auto* pre = sub->add_option("--preset", preset_, "Named preset")->excludes(spec);
    spec->excludes(pre);
    sub->add_option("--out", out_path_, "SVG output; stdout when omitted");
    sub->callback([this, spec, pre] {
      if (spec->count() + pre->count() != 1) {
        throw CLI::ValidationError("plot", "exactly one of --spec and --preset is required");
      }
      action_ = [this] { return cmd_plot(); };
    });
  }

  int cmd_sample() {
    const auto kind = *parse_sampler(sampler_);
    if (n_ < 1) throw DomainError("sample: --n must be at least 1");
    const auto config = sample(kind, n_, seed_);
    PointFormat fmt = PointFormat::Csv;
    if (!format_.empty()) {
      fmt = format_ == "json" ? PointFormat::Json : PointFormat::Csv;
    } else if (!out_path_.empty()) {
      fmt = format_for_path(out_path_);
    }
    auto write = [&](std::ostream& os) {
      if (fmt == PointFormat::Json) {
        write_points_json(os, config.points());
      } else {
        write_points_csv(os, config.points());
      }
    };
    if (out_path_.empty()) {
      if (json_ && fmt == PointFormat::Csv) {
        write_points_json(out_, config.points());
      } else {
        write(out_);
      }
      return kExitOk;
    }
    {
      std::ofstream os(out_path_);
      if (!os) throw IoError("cannot write " + out_path_);
      write(os);
      if (!os) throw IoError("write failed: " + out_path_);
    }
    const auto manifest = write_sample_manifest(out_path_, config);
    if (json_) {
      out_ << json{{"output", out_path_}, {"manifest", manifest.string()}, {"n", n_}}.dump() << "\n";
    } else {
      out_ << "wrote " << n_ << " points to " << out_path_ << "\n";
    }
    return kExitOk;
  }

  int cmd_exact(const Quantity& q) {
    json params = json::object();
    for (const auto& p : q.params) {
      if (p == "n") params["n"] = params_.n;
      if (p == "k") params["k"] = params_.k;
      if (p == "s") params["s"] = params_.s;
      if (p == "alpha") params["alpha"] = params_.alpha;
      if (p == "x") params["x"] = params_.x;
      if (p == "t") params["t"] = params_.t;
    }
    json record{{"quantity", q.name}, {"params", params}};
    const json result = q.eval(params_);
    for (const auto& [key, value] : result.items()) {
      record[key] = value.is_number_float() && !std::isfinite(value.get<double>()) ? json(nullptr) : value;
    }
    out_ << record.dump() << "\n";
    return kExitOk;
  }

  int cmd_stats() {
    std::vector<StatisticSpec> specs;
    for (const auto& text : stat_texts_) {
      specs.push_back(StatisticSpec::parse(text));
      validate_statistic(specs.back());
    }
    const Configuration config(load_points(in_path_), "file", 0);
    const std::size_t threads = resolve_threads(threads_);
    json results = json::array();
    for (const auto& spec : specs) results.push_back(stat_record(spec, config, threads));
    out_ << json{{"input", in_path_}, {"n", config.size()}, {"results", results}}.dump() << "\n";
    return kExitOk;
  }

  int cmd_experiment() {
    auto config = ExperimentConfig::load(config_path_);
    if (!out_path_.empty()) config.output_dir = out_path_;
    const std::size_t threads = resolve_threads(threads_ > 0 ? threads_ : config.parallelism);
    if (verify_) {
      const auto report = verify_raw(config, config.output_dir / "raw.csv", fraction_, threads);
      if (json_) {
        out_ << json{{"replicates_checked", report.replicates_checked},
                     {"values_checked", report.values_checked},
                     {"mismatches", report.mismatches},
                     {"details", report.details},
                     {"ok", report.ok()}}
                    .dump()
             << "\n";
      } else {
        out_ << "verified " << report.replicates_checked << " replicates (" << report.values_checked
             << " values): " << (report.ok() ? "ok" : "MISMATCH") << "\n";
        for (const auto& d : report.details) out_ << "  " << d << "\n";
      }
      return report.ok() ? kExitOk : kExitRuntime;
    }
    const auto result = run_experiment(config, threads);
    if (json_) {
      json summaries = json::array();
      for (const auto& s : result.summaries) summaries.push_back(s.to_json());
      out_ << json{{"raw", result.raw_path.string()},
                   {"summary", result.summary_path.string()},
                   {"manifest", result.manifest_path.string()},
                   {"error_count", result.errors.size()},
                   {"wall_seconds", result.wall_seconds},
                   {"summaries", summaries}}
                  .dump()
           << "\n";
    } else {
      out_ << "raw: " << result.raw_path.string() << "\nsummary: " << result.summary_path.string()
           << "\nmanifest: " << result.manifest_path.string() << "\nerrors: " << result.errors.size()
           << "\n";
    }
    for (const auto& e : result.errors) {
      err_ << "replicate " << e.replicate << " (" << sampler_name(e.sampler) << ", n=" << e.n
           << (e.statistic.empty() ? "" : ", " + e.statistic) << "): " << e.message << "\n";
    }
    return result.errors.empty() ? kExitOk : kExitRuntime;
  }

  int cmd_plot() {
    plot::PlotSpec spec;
    if (!preset_.empty()) {
      spec = plot::preset(preset_);
    } else {
      std::ifstream in(spec_path_);
      json j;
      try {
        in >> j;
      } catch (const json::exception& e) {
        throw IoError(spec_path_ + ": " + e.what());
      }
      spec = plot::PlotSpec::from_json(j);
    }
    if (!out_path_.empty()) spec.output = out_path_;
    const std::string svg = plot::render_svg(spec);
    if (spec.output.empty()) {
      if (json_) {
        out_ << json{{"svg", svg}}.dump() << "\n";
      } else {
        out_ << svg;
      }
      return kExitOk;
    }
    std::ofstream os(spec.output);
    if (!os) throw IoError("cannot write " + spec.output.string());
    os << svg;
    if (!os) throw IoError("write failed: " + spec.output.string());
    if (json_) {
      out_ << json{{"output", spec.output.string()}, {"series", spec.series.size()}}.dump() << "\n";
    } else {
      out_ << "wrote " << spec.output.string() << "\n";
    }
    return kExitOk;
  }

  std::ostream& out_;
  std::ostream& err_;
  std::function<int()> action_;

  bool json_ = false;
  std::size_t threads_ = 0;

  std::string sampler_;
  std::size_t n_ = 0;
  std::uint64_t seed_ = 0;
  std::string out_path_;
  std::string format_;

  Params params_;

  std::string in_path_;
  std::vector<std::string> stat_texts_;

  std::string config_path_;
  bool verify_ = false;
  double fraction_ = 0.01;

  std::string spec_path_;
  std::string preset_;
};

}  // namespace

std::vector<std::string> exact_quantity_names() {
  std::vector<std::string> names;
  for (const auto& q : quantities()) names.push_back(q.name);
  return names;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Cli cli(out, err);
  return cli.run(args);
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, out, err);
}

}  // namespace sphens::cli
