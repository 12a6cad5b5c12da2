#include "sphens/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "sphens/analytics.hpp"
#include "sphens/compensated.hpp"
#include "sphens/errors.hpp"
#include "sphens/estimators.hpp"
#include "sphens/hull.hpp"
#include "sphens/point_io.hpp"

namespace sphens {

namespace {

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

const StatisticInfo* find_info(std::string_view id) {
  for (const auto& info : statistic_registry()) {
    if (info.id == id) return &info;
  }
  return nullptr;
}

Cap fixed_cap(double alpha) { return cap_from_area(SpherePoint(), 4.0 * kPi * alpha); }

double scaled_n(std::size_t n, double power) { return std::pow(static_cast<double>(n), power); }

double pair_threshold(const StatisticSpec& spec, std::size_t n) {
  return spec.param_name == "x" ? pair_count_threshold(n, spec.param_value) : spec.param_value;
}

std::size_t resolve_threads(std::size_t requested, std::size_t configured) {
  std::size_t t = requested != 0 ? requested : configured;
  if (t == 0) t = std::max(1u, std::thread::hardware_concurrency());
  return t;
}

}  // namespace

std::string StatisticSpec::params_string() const {
  if (!mode.empty()) return "mode=" + mode;
  if (param_name.empty()) return "";
  return param_name + "=" + shortest(param_value);
}

std::string StatisticSpec::label() const {
  const std::string p = params_string();
  return p.empty() ? id : id + "{" + p + "}";
}

nlohmann::json StatisticSpec::to_json() const {
  nlohmann::json j = {{"id", id}};
  if (!mode.empty()) j["mode"] = mode;
  if (!param_name.empty()) j[param_name] = param_value;
  return j;
}

StatisticSpec StatisticSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("id") || !j["id"].is_string()) {
    throw IoError("statistic entry must be an object with a string 'id'");
  }
  StatisticSpec spec;
  spec.id = j["id"].get<std::string>();
  for (const auto& [key, value] : j.items()) {
    if (key == "id") continue;
    if (key == "mode") {
      if (!value.is_string()) throw IoError("statistic mode must be a string");
      spec.mode = value.get<std::string>();
      continue;
    }
    if (!value.is_number()) throw IoError("statistic parameter '" + key + "' must be a number");
    if (!spec.param_name.empty()) throw IoError("statistic '" + spec.id + "' takes one parameter");
    spec.param_name = key;
    spec.param_value = value.get<double>();
  }
  validate_statistic(spec);
  return spec;
}

StatisticSpec StatisticSpec::parse(std::string_view text) {
  StatisticSpec spec;
  const auto colon = text.find(':');
  spec.id = std::string(text.substr(0, colon));
  if (colon != std::string_view::npos) {
    const std::string_view rest = text.substr(colon + 1);
    const auto eq = rest.find('=');
    if (eq == std::string_view::npos) throw DomainError("statistic parameter must be name=value");
    const std::string name(rest.substr(0, eq));
    const std::string value(rest.substr(eq + 1));
    if (name == "mode") {
      spec.mode = value;
    } else {
      spec.param_name = name;
      try {
        std::size_t used = 0;
        spec.param_value = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
      } catch (const std::exception&) {
        throw DomainError("bad numeric value '" + value + "' for " + name);
      }
    }
  }
  validate_statistic(spec);
  return spec;
}

const std::vector<StatisticInfo>& statistic_registry() {
  static const std::vector<StatisticInfo> registry = {
      {"riesz_energy", {"s"}, "sum over i != j of |x_i - x_j|^-s"},
      {"log_energy", {}, "sum over i != j of log 1/|x_i - x_j|"},
      {"l2_discrepancy_sq", {}, "squared L2 cap discrepancy"},
      {"min_spacing", {}, "minimum chord distance m_n"},
      {"scaled_min_spacing", {}, "n^(3/4) m_n"},
      {"pair_count", {"t", "x"}, "pairs within chord distance t (or t = x n^(-3/4))"},
      {"cap_count", {"alpha"}, "points in a fixed cap of area fraction alpha"},
      {"cap_count_sq_dev", {"alpha"}, "(N_D - n alpha)^2 for the fixed cap"},
      {"hole_indicator", {"alpha"}, "1 if the fixed cap is empty"},
      {"cap_discrepancy", {"mode"}, "sup cap discrepancy, mode grid or exact"},
      {"largest_empty_cap", {}, "area M_n of the largest empty cap"},
      {"scaled_largest_empty_cap", {}, "n M_n / (8 pi sqrt(log n))"},
      {"nn_fraction_below", {"x"}, "fraction of points with (n/4) d_j^2 <= x"},
  };
  return registry;
}

void validate_statistic(const StatisticSpec& spec) {
  const StatisticInfo* info = find_info(spec.id);
  if (info == nullptr) throw DomainError("unknown statistic '" + spec.id + "'");
  const bool wants_mode = spec.id == "cap_discrepancy";
  if (wants_mode) {
    if (!parse_discrepancy_mode(spec.mode)) {
      throw DomainError("cap_discrepancy needs mode=grid or mode=exact");
    }
    if (!spec.param_name.empty()) throw DomainError("cap_discrepancy takes only a mode");
    return;
  }
  if (!spec.mode.empty()) throw DomainError(spec.id + " takes no mode");
  if (info->params.empty()) {
    if (!spec.param_name.empty()) throw DomainError(spec.id + " takes no parameter");
    return;
  }
  if (std::find(info->params.begin(), info->params.end(), spec.param_name) == info->params.end()) {
    throw DomainError(spec.id + " needs parameter " + info->params.front());
  }
  const double v = spec.param_value;
  if (!std::isfinite(v)) throw DomainError(spec.id + ": parameter must be finite");
  if (spec.param_name == "alpha" && !(v > 0.0 && v < 1.0)) {
    throw DomainError(spec.id + ": alpha must lie in (0, 1)");
  }
  if (spec.param_name == "t" && !(v > 0.0 && v < 2.0)) {
    throw DomainError(spec.id + ": t must lie in (0, 2)");
  }
  if (spec.param_name == "x" && !(v > 0.0)) throw DomainError(spec.id + ": x must be positive");
}

double evaluate_statistic(const StatisticSpec& spec, const Configuration& config) {
  const std::size_t n = config.size();
  const double nd = static_cast<double>(n);
  const std::string& id = spec.id;
  if (id == "riesz_energy") return riesz_energy(config, spec.param_value);
  if (id == "log_energy") return log_energy(config);
  if (id == "l2_discrepancy_sq") return l2_discrepancy_sq(config);
  if (id == "min_spacing") return min_spacing(config);
  if (id == "scaled_min_spacing") return scaled_n(n, 0.75) * min_spacing(config);
  if (id == "pair_count") {
    return static_cast<double>(pair_count(config, pair_threshold(spec, n)));
  }
  if (id == "cap_count") return static_cast<double>(count_in_cap(config, fixed_cap(spec.param_value)));
  if (id == "cap_count_sq_dev") {
    const double dev =
        static_cast<double>(count_in_cap(config, fixed_cap(spec.param_value))) - nd * spec.param_value;
    return dev * dev;
  }
  if (id == "hole_indicator") {
    return count_in_cap(config, fixed_cap(spec.param_value)) == 0 ? 1.0 : 0.0;
  }
  if (id == "cap_discrepancy") {
    return cap_discrepancy(config, *parse_discrepancy_mode(spec.mode)).value;
  }
  if (id == "largest_empty_cap") return largest_empty_cap(config).area;
  if (id == "scaled_largest_empty_cap") {
    return nd * largest_empty_cap(config).area / (8.0 * kPi * std::sqrt(std::log(nd)));
  }
  if (id == "nn_fraction_below") {
    const auto values = nn_spacing_values(config);
    const auto below = std::count_if(values.begin(), values.end(),
                                     [&](double v) { return v <= spec.param_value; });
    return static_cast<double>(below) / nd;
  }
  throw DomainError("unknown statistic '" + id + "'");
}

// ---------------------------------------------------------------------------

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw IoError("experiment config must be a JSON object");
  if (!j.contains("experiment_schema") || j["experiment_schema"] != kSchema) {
    throw IoError("experiment config needs experiment_schema = 1");
  }
  static const std::vector<std::string> known = {
      "experiment_schema", "base_seed",  "samplers",   "n_values",   "replicates",
      "first_replicate",   "statistics", "output_dir", "parallelism"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw IoError("unknown experiment config key '" + key + "'");
    }
  }
  ExperimentConfig c;
  try {
    c.base_seed = j.at("base_seed").get<std::uint64_t>();
    for (const auto& s : j.at("samplers")) {
      const auto kind = parse_sampler(s.get<std::string>());
      if (!kind) throw DomainError("unknown sampler '" + s.get<std::string>() + "'");
      c.samplers.push_back(*kind);
    }
    for (const auto& n : j.at("n_values")) c.n_values.push_back(n.get<std::size_t>());
    c.replicates = j.at("replicates").get<std::size_t>();
    c.first_replicate = j.value("first_replicate", std::size_t{0});
    for (const auto& s : j.at("statistics")) c.statistics.push_back(StatisticSpec::from_json(s));
    if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("parallelism")) {
      const auto& p = j["parallelism"];
      if (p.is_string()) {
        if (p.get<std::string>() != "auto") throw IoError("parallelism must be an integer or \"auto\"");
        c.parallelism = 0;
      } else {
        c.parallelism = p.get<std::size_t>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError(std::string("experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("invalid JSON in " + path.string() + ": " + e.what());
  }
  return from_json(j);
}

nlohmann::json ExperimentConfig::canonical_json() const {
  nlohmann::json j;
  j["experiment_schema"] = kSchema;
  j["base_seed"] = base_seed;
  j["samplers"] = nlohmann::json::array();
  for (auto s : samplers) j["samplers"].push_back(std::string(sampler_name(s)));
  j["n_values"] = n_values;
  j["replicates"] = replicates;
  j["first_replicate"] = first_replicate;
  j["statistics"] = nlohmann::json::array();
  for (const auto& s : statistics) j["statistics"].push_back(s.to_json());
  return j;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j = canonical_json();
  j["output_dir"] = output_dir.string();
  if (parallelism == 0) {
    j["parallelism"] = "auto";
  } else {
    j["parallelism"] = parallelism;
  }
  return j;
}

std::string ExperimentConfig::hash() const {
  const std::string text = canonical_json().dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void ExperimentConfig::validate() const {
  if (samplers.empty()) throw DomainError("experiment: at least one sampler is required");
  if (n_values.empty()) throw DomainError("experiment: at least one n is required");
  if (replicates < 1) throw DomainError("experiment: replicates must be at least 1");
  if (statistics.empty()) throw DomainError("experiment: at least one statistic is required");
  for (std::size_t n : n_values) {
    if (n < 1) throw DomainError("experiment: n must be at least 1");
  }
  for (const auto& s : statistics) validate_statistic(s);
}

std::uint64_t replicate_seed(std::uint64_t base_seed, SamplerKind kind, std::size_t n,
                             std::size_t replicate) noexcept {
  return mix_seed(base_seed, sampler_tag(kind), n, replicate);
}

// ---------------------------------------------------------------------------

nlohmann::json SummaryRecord::to_json() const {
  nlohmann::json j = {{"statistic", statistic.id},
                      {"params", statistic.params_string()},
                      {"n", n},
                      {"sampler", std::string(sampler_name(sampler))},
                      {"replicates", replicates},
                      {"mean", mean},
                      {"sample_variance", sample_variance},
                      {"stderr", stderr_},
                      {"q01", q01},
                      {"q50", q50},
                      {"q99", q99}};
  if (exact_value) j["exact_value"] = *exact_value;
  if (z_score) {
    j["z_score"] = *z_score;
    j["flagged"] = flagged;
  }
  return j;
}

double quantile_type7(const std::vector<double>& sorted, double prob) {
  if (sorted.empty()) return std::nan("");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

SummaryRecord summarize(const StatisticSpec& spec, std::size_t n, SamplerKind sampler,
                        const std::vector<double>& values) {
  SummaryRecord r;
  r.statistic = spec;
  r.n = n;
  r.sampler = sampler;
  std::vector<double> finite;
  finite.reserve(values.size());
  for (double v : values) {
    if (std::isfinite(v)) finite.push_back(v);
  }
  r.replicates = finite.size();
  if (finite.empty()) {
    r.mean = r.sample_variance = r.stderr_ = r.q01 = r.q50 = r.q99 = std::nan("");
    return r;
  }
  CompensatedSum sum;
  for (double v : finite) sum.add(v);
  const double count = static_cast<double>(finite.size());
  r.mean = sum.value() / count;
  if (finite.size() > 1) {
    CompensatedSum sq;
    for (double v : finite) sq.add((v - r.mean) * (v - r.mean));
    r.sample_variance = sq.value() / (count - 1.0);
  }
  r.stderr_ = std::sqrt(r.sample_variance / count);
  std::sort(finite.begin(), finite.end());
  r.q01 = quantile_type7(finite, 0.01);
  r.q50 = quantile_type7(finite, 0.50);
  r.q99 = quantile_type7(finite, 0.99);
  return r;
}

std::optional<double> default_exact_binding(const StatisticSpec& spec, std::size_t n,
                                            SamplerKind sampler) {
  const bool iid = sampler == SamplerKind::UniformIid;
  const std::string& id = spec.id;
  const double v = spec.param_value;
  const double nd = static_cast<double>(n);
  if (id == "cap_count") return nd * v;
  if (id == "cap_count_sq_dev") return iid ? nd * v * (1.0 - v) : count_variance_exact(n, v);
  if (id == "hole_indicator") return iid ? iid::hole_probability(n, v) : hole_probability(n, v);
  if (n < 2) return std::nullopt;
  if (id == "riesz_energy") {
    if (iid) return v < 2.0 ? std::optional(iid::expected_riesz_energy(n, v)) : std::nullopt;
    return v < 4.0 ? std::optional(expected_riesz_energy(n, v)) : std::nullopt;
  }
  if (id == "log_energy") return iid ? iid::expected_log_energy(n) : expected_log_energy(n);
  if (id == "l2_discrepancy_sq") {
    return iid ? iid::expected_l2_discrepancy_sq(n) : expected_l2_discrepancy_sq(n).value;
  }
  if (id == "pair_count") {
    const double t = pair_threshold(spec, n);
    if (!(t > 0.0 && t < 2.0)) return std::nullopt;
    return iid ? iid::expected_pair_count(n, t) : expected_pair_count(n, t);
  }
  if (id == "nn_fraction_below") {
    const double a = v / nd;
    if (!(a < 1.0)) return 1.0;
    return iid ? 1.0 - std::pow(1.0 - a, nd - 1.0) : 1.0 - conditional_hole_probability(n, a);
  }
  return std::nullopt;
}

std::vector<SummaryRecord> compare_to_exact(std::vector<SummaryRecord> records,
                                            const ExactBinding& binding) {
  for (auto& r : records) {
    const auto exact = binding(r.statistic, r.n, r.sampler);
    if (!exact) {
      throw UnboundStatisticError("UnboundStatistic: no exact value for " + r.statistic.label() +
                                  " with sampler " + std::string(sampler_name(r.sampler)));
    }
    r.exact_value = *exact;
    if (r.stderr_ > 0.0) {
      r.z_score = (r.mean - *exact) / r.stderr_;
    } else {
      r.z_score = r.mean == *exact ? 0.0 : std::copysign(INFINITY, r.mean - *exact);
    }
    r.flagged = std::abs(*r.z_score) > kZScoreFlag;
  }
  return records;
}

// ---------------------------------------------------------------------------

std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

struct Task {
  SamplerKind sampler;
  std::size_t n;
  std::size_t replicate;
  std::uint64_t seed;
};

struct TaskOutput {
  std::vector<double> values;
  std::vector<ReplicateError> errors;
};

TaskOutput run_task(const Task& task, const std::vector<StatisticSpec>& stats) {
  TaskOutput out;
  out.values.assign(stats.size(), std::nan(""));
  std::optional<Configuration> config;
  try {
    config.emplace(sample(task.sampler, task.n, task.seed));
  } catch (const std::exception& e) {
    out.errors.push_back({task.sampler, task.n, task.replicate, "", e.what()});
    return out;
  }
  for (std::size_t s = 0; s < stats.size(); ++s) {
    try {
      out.values[s] = evaluate_statistic(stats[s], *config);
    } catch (const std::exception& e) {
      out.errors.push_back({task.sampler, task.n, task.replicate, stats[s].label(), e.what()});
    }
  }
  return out;
}

std::vector<Task> make_tasks(const ExperimentConfig& c, std::size_t stride = 1) {
  std::vector<Task> tasks;
  for (auto s : c.samplers) {
    for (auto n : c.n_values) {
      for (std::size_t r = c.first_replicate; r < c.first_replicate + c.replicates; ++r) {
        if (r % stride != 0) continue;
        tasks.push_back({s, n, r, replicate_seed(c.base_seed, s, n, r)});
      }
    }
  }
  return tasks;
}

// Runs tasks on a pool; `consume` sees outputs strictly in task order.
template <typename Consume>
void run_ordered(const std::vector<Task>& tasks, const std::vector<StatisticSpec>& stats,
                 std::size_t threads, Consume&& consume) {
  const std::size_t workers = std::max<std::size_t>(1, std::min(threads, tasks.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) consume(i, run_task(tasks[i], stats));
    return;
  }
  std::vector<std::optional<TaskOutput>> slots(tasks.size());
  std::mutex mu;
  std::condition_variable ready;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < tasks.size() && !stop; i = next++) {
        TaskOutput out = run_task(tasks[i], stats);
        {
          const std::lock_guard<std::mutex> lock(mu);
          slots[i] = std::move(out);
        }
        ready.notify_all();
      }
    });
  }
  try {
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      std::unique_lock<std::mutex> lock(mu);
      ready.wait(lock, [&] { return slots[i].has_value(); });
      TaskOutput out = std::move(*slots[i]);
      slots[i].reset();
      lock.unlock();
      consume(i, std::move(out));
    }
  } catch (...) {
    stop = true;
    for (auto& t : pool) t.join();
    throw;
  }
  for (auto& t : pool) t.join();
}

nlohmann::json error_json(const ReplicateError& e) {
  nlohmann::json j = {{"sampler", std::string(sampler_name(e.sampler))},
                      {"n", e.n},
                      {"replicate", e.replicate},
                      {"message", e.message}};
  if (!e.statistic.empty()) j["statistic"] = e.statistic;
  return j;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRecord>& records) {
  out << "statistic,params,n,sampler,replicates,mean,sample_variance,stderr,q01,q50,q99,"
         "exact_value,z_score,flagged\n";
  for (const auto& r : records) {
    out << r.statistic.id << ',' << r.statistic.params_string() << ',' << r.n << ','
        << sampler_name(r.sampler) << ',' << r.replicates << ',' << format_value(r.mean) << ','
        << format_value(r.sample_variance) << ',' << format_value(r.stderr_) << ','
        << format_value(r.q01) << ',' << format_value(r.q50) << ',' << format_value(r.q99) << ','
        << (r.exact_value ? format_value(*r.exact_value) : "") << ','
        << (r.z_score ? format_value(*r.z_score) : "") << ',' << (r.flagged ? "1" : "0") << '\n';
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, std::size_t threads) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec) throw IoError("cannot create " + config.output_dir.string() + ": " + ec.message());

  ExperimentResult result;
  result.raw_path = config.output_dir / "raw.csv";
  result.summary_path = config.output_dir / "summary.json";
  result.manifest_path = config.output_dir / "manifest.json";

  std::ofstream raw(result.raw_path);
  if (!raw) throw IoError("cannot write " + result.raw_path.string());
  raw << kRawHeader << '\n';

  const auto tasks = make_tasks(config);
  const auto& stats = config.statistics;
  // values[(sampler, n) group][statistic] -> replicate values in order.
  const std::size_t groups = config.samplers.size() * config.n_values.size();
  std::vector<std::vector<std::vector<double>>> values(
      groups, std::vector<std::vector<double>>(stats.size()));

  run_ordered(tasks, stats, resolve_threads(threads, config.parallelism),
              [&](std::size_t i, TaskOutput out) {
                const Task& t = tasks[i];
                const std::size_t g = i / config.replicates;
                const std::string sname(sampler_name(t.sampler));
                for (std::size_t s = 0; s < stats.size(); ++s) {
                  raw << stats[s].id << ',' << stats[s].params_string() << ',' << t.n << ','
                      << sname << ',' << t.replicate << ',' << t.seed << ','
                      << format_value(out.values[s]) << '\n';
                  values[g][s].push_back(out.values[s]);
                }
                if (!raw) throw IoError("write failed for " + result.raw_path.string());
                for (auto& e : out.errors) result.errors.push_back(std::move(e));
              });
  raw.close();
  if (!raw) throw IoError("write failed for " + result.raw_path.string());

  std::size_t g = 0;
  for (auto s : config.samplers) {
    for (auto n : config.n_values) {
      for (std::size_t k = 0; k < stats.size(); ++k) {
        SummaryRecord rec = summarize(stats[k], n, s, values[g][k]);
        if (default_exact_binding(stats[k], n, s)) rec = compare_to_exact({rec}).front();
        result.summaries.push_back(std::move(rec));
      }
      ++g;
    }
  }

  nlohmann::json summary = nlohmann::json::array();
  for (const auto& r : result.summaries) summary.push_back(r.to_json());
  write_text(result.summary_path, summary.dump(2) + "\n");
  {
    std::ostringstream csv;
    write_summary_csv(csv, result.summaries);
    write_text(config.output_dir / "summary.csv", csv.str());
  }

  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  nlohmann::json manifest = {{"software_version", software_version()},
                             {"config_hash", config.hash()},
                             {"config", config.canonical_json()},
                             {"error_count", result.errors.size()},
                             {"errors", nlohmann::json::array()},
                             {"wall_seconds", result.wall_seconds},
                             {"raw_file", "raw.csv"},
                             {"summary_file", "summary.json"}};
  for (const auto& e : result.errors) manifest["errors"].push_back(error_json(e));
  write_text(result.manifest_path, manifest.dump(2) + "\n");
  return result;
}

std::vector<RawRow> read_raw_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kRawHeader) {
    throw IoError(path.string() + ": expected header '" + std::string(kRawHeader) + "'");
  }
  std::vector<RawRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 7) throw IoError(path.string() + ":" + std::to_string(lineno) + ": expected 7 fields");
    try {
      rows.push_back({f[0], f[1], std::stoul(f[2]), f[3], std::stoul(f[4]), std::stoull(f[5]), f[6]});
    } catch (const std::exception&) {
      throw IoError(path.string() + ":" + std::to_string(lineno) + ": malformed row");
    }
  }
  return rows;
}

VerifyReport verify_raw(const ExperimentConfig& config, const std::filesystem::path& raw_path,
                        double fraction, std::size_t threads) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw DomainError("verify fraction must lie in (0, 1]");
  const auto rows = read_raw_csv(raw_path);
  // (sampler, n, replicate, label) -> value text
  std::map<std::tuple<std::string, std::size_t, std::size_t, std::string>, const RawRow*> index;
  for (const auto& r : rows) {
    const std::string label = r.params.empty() ? r.statistic : r.statistic + "{" + r.params + "}";
    index[{r.sampler, r.n, r.replicate, label}] = &r;
  }
  const auto stride = static_cast<std::size_t>(std::max(1.0, std::round(1.0 / fraction)));
  const auto tasks = make_tasks(config, stride);
  VerifyReport report;
  run_ordered(tasks, config.statistics, std::max<std::size_t>(1, threads),
              [&](std::size_t i, TaskOutput out) {
                const Task& t = tasks[i];
                ++report.replicates_checked;
                for (std::size_t s = 0; s < config.statistics.size(); ++s) {
                  ++report.values_checked;
                  const std::string label = config.statistics[s].label();
                  const auto it = index.find({std::string(sampler_name(t.sampler)), t.n, t.replicate, label});
                  const std::string got = format_value(out.values[s]);
                  if (it == index.end()) {
                    ++report.mismatches;
                    report.details.push_back("missing row " + label + " r=" + std::to_string(t.replicate));
                  } else if (it->second->value != got || it->second->seed != t.seed) {
                    ++report.mismatches;
                    report.details.push_back(label + " r=" + std::to_string(t.replicate) + ": file " +
                                             it->second->value + " recomputed " + got);
                  }
                }
              });
  return report;
}

}  // namespace sphens
