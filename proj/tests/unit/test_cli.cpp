#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "cli.hpp"
#include "sphens/analytics.hpp"
#include "sphens/experiments.hpp"
#include "sphens/geometry.hpp"
#include "sphens/point_io.hpp"
#include "testkit.hpp"

using namespace sphens;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

json cli_json(std::vector<std::string> args) {
  args.insert(args.begin(), "--json");
  const auto r = run(std::move(args));
  EXPECT_EQ(r.code, cli::kExitOk) << r.err;
  return json::parse(r.out);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> attr_numbers(const std::string& svg, const std::string& label,
                                 const std::string& attr) {
  const auto at = svg.find("data-label=\"" + label + "\"");
  EXPECT_NE(at, std::string::npos) << label;
  const auto start = svg.find(attr + "=\"", at) + attr.size() + 2;
  const auto end = svg.find('"', start);
  std::istringstream in(svg.substr(start, end - start));
  std::vector<double> v;
  for (double x; in >> x;) v.push_back(x);
  return v;
}

}  // namespace

TEST(Cli, ExactQuantities) {
  auto j = cli_json({"exact", "riesz-energy", "--n", "2", "--s", "1"});
  EXPECT_EQ(j["quantity"], "riesz-energy");
  EXPECT_NEAR(j["value"].get<double>(), 4.0 / 3.0, 1e-15);
  j = cli_json({"exact", "hole", "--n", "1", "--alpha", "0.25"});
  EXPECT_NEAR(j["value"].get<double>(), 0.75, 1e-15);
  EXPECT_TRUE(j.contains("log_value"));
  j = cli_json({"exact", "cap-count-pmf", "--n", "3", "--alpha", "0.5"});
  ASSERT_EQ(j["value"].size(), 4u);
  double total = 0.0;
  for (double p : j["value"]) total += p;
  EXPECT_NEAR(total, 1.0, 1e-14);
  j = cli_json({"exact", "gap-density", "--x", "1"});
  EXPECT_EQ(j["value"].get<double>(), gap_density(1.0));
  j = cli_json({"exact", "energy-bounds", "--s", "1"});
  EXPECT_TRUE(j["value"].is_object());
}

TEST(Cli, ExactDomainErrorsExitTwo) {
  EXPECT_EQ(run({"exact", "riesz-energy", "--n", "8", "--s", "5"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"exact", "energy-bounds", "--s", "0"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"exact", "hole", "--n", "3"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"exact", "no-such-quantity"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"bogus"}).code, cli::kExitUsage);
  EXPECT_EQ(run({}).code, cli::kExitUsage);
}

TEST(Cli, HelpListsEverything) {
  const auto r = run({"--help"});
  EXPECT_EQ(r.code, cli::kExitOk);
  for (const auto& name : cli::exact_quantity_names()) {
    EXPECT_NE(r.out.find("  " + name + "  "), std::string::npos) << name;
  }
  for (const auto& info : statistic_registry()) {
    EXPECT_NE(r.out.find("  " + info.id), std::string::npos) << info.id;
  }
  for (const char* s : {"matrix", "dpp", "iid", "gap-density", "energy-bounds"}) {
    EXPECT_NE(r.out.find(s), std::string::npos) << s;
  }
}

TEST(Cli, SampleToStdoutAndFile) {
  auto r = run({"sample", "--sampler", "iid", "--n", "4", "--seed", "7"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  std::istringstream csv(r.out);
  const auto pts = read_points_csv(csv);
  ASSERT_EQ(pts.size(), 4u);

  const auto j = cli_json({"sample", "--sampler", "iid", "--n", "4", "--seed", "7"});
  ASSERT_EQ(j.size(), 4u);
  EXPECT_EQ(j[2][1].get<double>(), pts[2].y());

  const auto dir = testkit::temp_dir("cli_sample");
  const auto path = dir / "pts.json";
  r = run({"sample", "--sampler", "matrix", "--n", "5", "--seed", "3", "--out", path.string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(load_points(path).size(), 5u);
  std::ifstream in(dir / "pts.json.manifest.json");
  const auto m = json::parse(in);
  EXPECT_EQ(m["sampler"], "matrix");
  EXPECT_EQ(m["seed"], 3);
  std::filesystem::remove_all(dir);

  EXPECT_EQ(run({"sample", "--sampler", "matrix", "--n", "0", "--seed", "1"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"sample", "--sampler", "ginibre", "--n", "3", "--seed", "1"}).code,
            cli::kExitUsage);
}

TEST(Cli, StatsOnTwoPoints) {
  const auto dir = testkit::temp_dir("cli_stats");
  const auto path = dir / "two.csv";
  const SpherePoint a(0.0, 0.0, 1.0), b(1.0, 0.0, 0.0);
  save_points(path, std::vector<SpherePoint>{a, b});
  const auto j = cli_json({"stats", "--in", path.string(), "--stat", "min_spacing", "--stat",
                           "cap_discrepancy:mode=exact", "--stat", "riesz_energy:s=1"});
  EXPECT_EQ(j["n"], 2);
  ASSERT_EQ(j["results"].size(), 3u);
  EXPECT_DOUBLE_EQ(j["results"][0]["value"].get<double>(), chord_distance(a, b));
  EXPECT_TRUE(j["results"][1].contains("witness"));
  EXPECT_DOUBLE_EQ(j["results"][2]["value"].get<double>(), 2.0 / std::sqrt(2.0));

  EXPECT_EQ(run({"stats", "--in", path.string(), "--stat", "nope"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"stats", "--in", (dir / "missing.csv").string(), "--stat", "min_spacing"}).code,
            cli::kExitUsage);
  std::filesystem::remove_all(dir);
}

TEST(Cli, ThreadsFromEnvironment) {
  const auto dir = testkit::temp_dir("cli_env");
  const auto path = dir / "p.csv";
  Rng rng(8);
  save_points(path, testkit::random_points(rng, 30));
  const std::vector<std::string> args{"--json", "stats", "--in", path.string(), "--stat",
                                      "cap_discrepancy:mode=exact"};
  ::setenv("SPHENS_THREADS", "1", 1);
  const auto one = run(args);
  ::setenv("SPHENS_THREADS", "3", 1);
  const auto three = run(args);
  EXPECT_EQ(one.code, cli::kExitOk);
  EXPECT_EQ(one.out, three.out);
  ::setenv("SPHENS_THREADS", "abc", 1);
  EXPECT_EQ(run(args).code, cli::kExitUsage);
  ::unsetenv("SPHENS_THREADS");
  EXPECT_EQ(run({"--threads", "-1", "exact", "gap-limit", "--x", "1"}).code, cli::kExitUsage);
  std::filesystem::remove_all(dir);
}

TEST(Cli, ExperimentRoundTrip) {
  const auto dir = testkit::temp_dir("cli_experiment");
  const json config = {{"experiment_schema", 1},
                       {"base_seed", 2},
                       {"samplers", {"dpp"}},
                       {"n_values", {6}},
                       {"replicates", 4},
                       {"statistics", {{{"id", "log_energy"}}}},
                       {"output_dir", "unused"}};
  const auto cfg = dir / "config.json";
  std::ofstream(cfg) << config.dump();
  const auto out = dir / "out";
  auto j = cli_json({"experiment", "--config", cfg.string(), "--out", out.string()});
  EXPECT_EQ(j["error_count"], 0);
  ASSERT_EQ(j["summaries"].size(), 1u);
  EXPECT_TRUE(j["summaries"][0].contains("exact_value"));
  EXPECT_EQ(read_raw_csv(out / "raw.csv").size(), 4u);
  EXPECT_FALSE(std::filesystem::exists(dir / "unused"));

  auto r = run({"experiment", "--config", cfg.string(), "--out", out.string(), "--verify",
                "--fraction", "0.5"});
  EXPECT_EQ(r.code, cli::kExitOk) << r.out << r.err;

  auto text = slurp(out / "raw.csv");
  const auto first_value = read_raw_csv(out / "raw.csv")[0].value;
  text.replace(text.find(first_value), first_value.size(), "0.5");
  std::ofstream(out / "raw.csv", std::ios::trunc) << text;
  r = run({"experiment", "--config", cfg.string(), "--out", out.string(), "--verify",
           "--fraction", "0.5"});
  EXPECT_EQ(r.code, cli::kExitRuntime);
  std::filesystem::remove_all(dir);
}

TEST(Cli, PlotGapDensityCarriesData) {
  const auto r = run({"plot", "--preset", "gap-density"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_NE(r.out.find("<svg"), std::string::npos);
  const auto xs = attr_numbers(r.out, "Q(x)", "data-x");
  const auto ys = attr_numbers(r.out, "Q(x)", "data-y");
  ASSERT_EQ(xs.size(), 201u);
  ASSERT_EQ(ys.size(), 201u);
  for (std::size_t i = 0; i < xs.size(); ++i) EXPECT_NEAR(ys[i], gap_density(xs[i]), 1e-6);
  const auto es = attr_numbers(r.out, "exp(-x)", "data-y");
  EXPECT_NEAR(es.back(), std::exp(-4.0), 1e-12);
}

TEST(Cli, PlotMatchesGoldenFile) {
  const auto r = run({"plot", "--preset", "gap-density"});
  ASSERT_EQ(r.code, cli::kExitOk);
  EXPECT_EQ(r.out, slurp(std::filesystem::path(SPHENS_TEST_DATA_DIR) / "gap_density.svg"));
}

TEST(Cli, PlotSpecsAndErrors) {
  const auto dir = testkit::temp_dir("cli_plot");
  auto write_spec = [&](const json& spec) {
    const auto p = dir / "spec.json";
    std::ofstream(p, std::ios::trunc) << spec.dump();
    return p.string();
  };
  const auto svg_path = dir / "h.svg";
  auto spec = write_spec({{"kind", "histogram"},
                          {"bins", 5},
                          {"series", {{{"label", "v"}, {"source", {{"values", {1, 2, 2, 3, 4}}}}}}}});
  auto r = run({"plot", "--spec", spec, "--out", svg_path.string()});
  EXPECT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_NE(slurp(svg_path).find("class=\"series\""), std::string::npos);

  spec = write_spec({{"kind", "curve"}, {"series", json::array()}});
  EXPECT_EQ(run({"plot", "--spec", spec}).code, cli::kExitUsage);
  spec = write_spec({{"kind", "histogram"},
                     {"bins", 0},
                     {"series", {{{"label", "v"}, {"source", {{"values", {1, 2}}}}}}}});
  EXPECT_EQ(run({"plot", "--spec", spec}).code, cli::kExitUsage);
  EXPECT_EQ(run({"plot", "--preset", "gap-density", "--spec", spec}).code, cli::kExitUsage);
  EXPECT_EQ(run({"plot"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"plot", "--preset", "nope"}).code, cli::kExitUsage);
  std::filesystem::remove_all(dir);
}

TEST(Cli, JsonOutputsParse) {
  for (const auto& name : cli::exact_quantity_names()) {
    const auto r = run({"--json", "exact", name, "--help"});
    EXPECT_EQ(r.code, cli::kExitOk) << name;
  }
  const auto j = cli_json({"exact", "binomial-tail", "--n", "10", "--alpha", "0.3", "--k", "4"});
  EXPECT_NEAR(j["value"].get<double>(), binom_tail(BinomialLaw{10, 0.3}, 4), 1e-15);
}

TEST(Cli, LeavesNoStrayFiles) {
  const auto dir = testkit::temp_dir("cli_cwd");
  const auto old = std::filesystem::current_path();
  std::filesystem::current_path(dir);
  run({"exact", "gap-limit", "--x", "0.5"});
  run({"sample", "--sampler", "dpp", "--n", "3", "--seed", "1"});
  run({"plot", "--preset", "energy-bounds"});
  EXPECT_TRUE(std::filesystem::is_empty(dir));
  std::filesystem::current_path(old);
  std::filesystem::remove_all(dir);
}
