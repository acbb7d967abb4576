#ifndef PERCOVOR_CLI_HPP
#define PERCOVOR_CLI_HPP

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "percovor/gamma_experiments.hpp"
#include "percovor/io.hpp"
#include "percovor/polyomino_contours.hpp"
#include "percovor/regular_cells.hpp"
#include "percovor/spin_energy.hpp"
#include "percovor/stats.hpp"
#include "percovor/surface_tension.hpp"

#ifndef PERCOVOR_VERSION
#define PERCOVOR_VERSION "0.0.0"
#endif

namespace percovor::cli {

enum ExitCode : int { exit_ok = 0, exit_assertion = 1, exit_usage = 2, exit_io = 3 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"tessellate", "energy",     "tau",         "tau_alpha",      "channels",
                                              "polyomino",  "decompose",  "gamma_upper", "lambda_scaling", "blocks"};
  return names;
}

/// Keys accepted in config files and as --flags.
inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "experiment", "intensity", "half-width", "buffer", "seeds",  "seed-base", "t",       "dirs",    "alpha",
      "gamma",      "eps",       "m-rule",     "L",      "K",      "delta",     "T",       "out",     "jobs",
      "format",     "target",    "sizes",      "samples", "rule",  "lambdas",   "tau-ref", "offset"};
  return keys;
}

using RawConfig = std::map<std::string, std::string>;

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

/// A number or a fraction p/q.
inline double parse_number(const std::string& key, const std::string& text) {
  try {
    const auto slash = text.find('/');
    std::size_t used = 0;
    if (slash == std::string::npos) {
      const double x = std::stod(text, &used);
      if (used != text.size() || !std::isfinite(x)) throw std::invalid_argument(text);
      return x;
    }
    const std::string num = text.substr(0, slash), den = text.substr(slash + 1);
    return parse_number(key, num) / parse_number(key, den);
  } catch (const std::logic_error&) {
    throw UsageError("malformed number for '" + key + "': '" + text + "'");
  }
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const std::string& part : split(text, ',')) {
    if (part.empty()) throw UsageError("empty list entry for '" + key + "'");
    out.push_back(parse_number(key, part));
  }
  if (out.empty()) throw UsageError("empty list for '" + key + "'");
  return out;
}

inline std::uint64_t parse_unsigned(const std::string& key, const std::string& text) {
  const double x = parse_number(key, text);
  if (x < 0 || x != std::floor(x) || x > 1e18) throw UsageError("'" + key + "' needs a non-negative integer");
  return static_cast<std::uint64_t>(x);
}

}  // namespace detail

/// Flat `key = value` lines; '#' starts a comment.
inline RawConfig parse_config_text(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    const auto& keys = config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw UsageError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    raw[key] = detail::trim(line.substr(eq + 1));
  }
  return raw;
}

struct ExperimentConfig {
  std::string experiment;
  double intensity = 1.0;
  double half_width = 20.0;
  std::optional<double> buffer;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  std::vector<double> t{50, 100, 200};
  int dirs = 8;
  std::vector<double> alpha{0.05};
  double gamma = 0.3;
  std::vector<double> eps{1.0 / 25, 1.0 / 50, 1.0 / 100};
  std::string m_rule = "sqrt";  // "sqrt" for ceil(1/sqrt(eps)) or a fixed integer
  double L = 4.0;
  double K = 0.0;  // 0: 150 L^2
  double delta = 0.2;
  std::vector<double> T{25, 50, 100};
  std::string out = "out";
  unsigned jobs = 0;  // 0: available parallelism
  std::string format = "csv";
  std::string target = "square";
  std::vector<std::size_t> sizes{100, 1000};
  std::size_t samples = 5;
  std::string rule = "eden";
  std::vector<double> lambdas{1, 4};
  std::optional<double> tau_ref;
  double offset = 0.0;

  [[nodiscard]] double block_cap() const noexcept { return K > 0.0 ? K : 150.0 * L * L; }

  /// Sorted key=value lines of every setting that influences results.
  [[nodiscard]] std::string canonical() const {
    std::map<std::string, std::string> kv;
    auto list = [](const auto& xs) {
      std::string s;
      for (const auto& x : xs) s += (s.empty() ? "" : ",") + io::fmt(static_cast<double>(x));
      return s;
    };
    kv["experiment"] = experiment;
    kv["intensity"] = io::fmt(intensity);
    kv["half-width"] = io::fmt(half_width);
    kv["buffer"] = buffer ? io::fmt(*buffer) : "default";
    kv["seeds"] = list(seeds);
    kv["t"] = list(t);
    kv["dirs"] = std::to_string(dirs);
    kv["alpha"] = list(alpha);
    kv["gamma"] = io::fmt(gamma);
    kv["eps"] = list(eps);
    kv["m-rule"] = m_rule;
    kv["L"] = io::fmt(L);
    kv["K"] = io::fmt(block_cap());
    kv["delta"] = io::fmt(delta);
    kv["T"] = list(T);
    kv["format"] = format;
    kv["target"] = target;
    kv["sizes"] = list(sizes);
    kv["samples"] = std::to_string(samples);
    kv["rule"] = rule;
    kv["lambdas"] = list(lambdas);
    kv["tau-ref"] = tau_ref ? io::fmt(*tau_ref) : "none";
    kv["offset"] = io::fmt(offset);
    std::string s;
    for (const auto& [k, v] : kv) s += k + "=" + v + "\n";
    return s;
  }
  [[nodiscard]] std::string digest() const { return io::hex64(io::fnv1a(canonical())); }
};

/// Per-experiment defaults, then the raw settings on top.
inline ExperimentConfig resolve_config(const RawConfig& raw) {
  using namespace detail;
  ExperimentConfig c;
  const auto exp = raw.find("experiment");
  if (exp == raw.end() || exp->second.empty()) throw UsageError("no experiment given");
  c.experiment = exp->second;
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), c.experiment) == names.end()) {
    throw UsageError("unknown experiment '" + c.experiment + "'");
  }
  const std::string& e = c.experiment;
  if (e == "tau" || e == "lambda_scaling") c.half_width = 125.0;
  if (e == "tau_alpha" || e == "channels" || e == "polyomino" || e == "blocks") c.half_width = 60.0;
  if (e == "tau_alpha") c.t = {100};
  if (e == "lambda_scaling") c.t = {200};
  if (e == "tau_alpha") c.alpha = {0.1, 0.05, 0.02};
  if (e == "blocks") c.alpha = {1e-4};
  if (e == "decompose") c.eps = {1.0 / 20, 1.0 / 40, 1.0 / 80};
  if (e == "energy") c.eps = {0.05};

  std::uint64_t seed_base = 1;
  if (const auto it = raw.find("seed-base"); it != raw.end()) seed_base = parse_unsigned("seed-base", it->second);
  for (const auto& [key, value] : raw) {
    if (key == "experiment" || key == "seed-base") continue;
    if (value.empty()) throw UsageError("empty value for '" + key + "'");
    if (key == "intensity") c.intensity = parse_number(key, value);
    else if (key == "half-width") c.half_width = parse_number(key, value);
    else if (key == "buffer") c.buffer = parse_number(key, value);
    else if (key == "seeds") {
      // A single integer is a count starting at seed-base; a list is taken literally.
      if (value.find(',') == std::string::npos) {
        const std::uint64_t n = parse_unsigned(key, value);
        c.seeds.clear();
        for (std::uint64_t k = 0; k < n; ++k) c.seeds.push_back(seed_base + k);
      } else {
        c.seeds.clear();
        for (const std::string& part : split(value, ',')) c.seeds.push_back(parse_unsigned(key, part));
      }
    } else if (key == "t") c.t = parse_list(key, value);
    else if (key == "dirs") c.dirs = static_cast<int>(parse_unsigned(key, value));
    else if (key == "alpha") c.alpha = parse_list(key, value);
    else if (key == "gamma") c.gamma = parse_number(key, value);
    else if (key == "eps") c.eps = parse_list(key, value);
    else if (key == "m-rule") {
      if (value != "sqrt") parse_unsigned(key, value);
      c.m_rule = value;
    } else if (key == "L") c.L = parse_number(key, value);
    else if (key == "K") c.K = parse_number(key, value);
    else if (key == "delta") c.delta = parse_number(key, value);
    else if (key == "T") c.T = parse_list(key, value);
    else if (key == "out") c.out = value;
    else if (key == "jobs") c.jobs = static_cast<unsigned>(parse_unsigned(key, value));
    else if (key == "format") c.format = value;
    else if (key == "target") c.target = value;
    else if (key == "sizes") {
      c.sizes.clear();
      for (const double x : parse_list(key, value)) c.sizes.push_back(static_cast<std::size_t>(x));
    } else if (key == "samples") c.samples = parse_unsigned(key, value);
    else if (key == "rule") c.rule = value;
    else if (key == "lambdas") c.lambdas = parse_list(key, value);
    else if (key == "tau-ref") c.tau_ref = parse_number(key, value);
    else if (key == "offset") c.offset = parse_number(key, value);
    else throw UsageError("unknown key '" + key + "'");
  }
  if (c.format != "csv" && c.format != "json") throw UsageError("format must be csv or json");
  if (c.target != "square" && c.target != "disk") throw UsageError("target must be square or disk");
  if (c.rule != "eden" && c.rule != "eastward") throw UsageError("rule must be eden or eastward");
  if (c.seeds.empty()) throw UsageError("need at least one seed");
  if (c.jobs == 0) c.jobs = default_jobs();
  if (!(c.intensity > 0.0) || !(c.half_width > 0.0)) throw UsageError("intensity and half-width must be positive");
  if (c.m_rule != "sqrt" && std::stoi(c.m_rule) < 2) throw UsageError("m-rule must be sqrt or an integer >= 2");
  return c;
}

// ---------------------------------------------------------------------------
// Results

/// Rows of JSON scalars, rendered as CSV or as a JSON array of objects.
class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  void add(std::vector<nlohmann::ordered_json> row) {
    if (row.size() != header_.size()) throw std::logic_error("row width mismatch");
    rows_.push_back(std::move(row));
  }
  [[nodiscard]] std::size_t size() const noexcept { return rows_.size(); }

  [[nodiscard]] std::string csv() const {
    io::Csv out(header_);
    for (const auto& row : rows_) {
      for (const auto& v : row) {
        if (v.is_boolean()) out.cell(v.get<bool>());
        else if (v.is_number_unsigned()) out.cell(v.get<std::uint64_t>());
        else if (v.is_number_integer()) out.cell(v.get<std::int64_t>());
        else if (v.is_number_float()) out.cell(v.get<double>());
        else if (v.is_null()) out.cell(std::string());
        else out.cell(v.get<std::string>());
      }
      out.end_row();
    }
    return out.str();
  }
  [[nodiscard]] std::string json() const {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& row : rows_) {
      nlohmann::ordered_json obj;
      for (std::size_t i = 0; i < header_.size(); ++i) obj[header_[i]] = row[i];
      arr.push_back(std::move(obj));
    }
    return arr.dump(1) + "\n";
  }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<nlohmann::ordered_json>> rows_;
};

struct Assertion {
  std::string name;
  std::string status;  // pass, fail, skipped
  std::string detail;
};

struct ExperimentOutput {
  std::vector<std::pair<std::string, std::string>> files;  // name -> content
  std::vector<Assertion> assertions;
  nlohmann::ordered_json results = nlohmann::ordered_json::object();
  std::optional<double> tau_hat_ref;

  [[nodiscard]] bool passed() const {
    return std::none_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.status == "fail"; });
  }
  void check(const std::string& name, bool ok, const std::string& detail) {
    assertions.push_back({name, ok ? "pass" : "fail", detail});
  }
  void skip(const std::string& name, const std::string& why) { assertions.push_back({name, "skipped", why}); }
};

namespace detail {

inline void add_table(ExperimentOutput& out, const ExperimentConfig& c, const std::string& stem, const Table& t) {
  out.files.emplace_back(stem + (c.format == "csv" ? ".csv" : ".json"), c.format == "csv" ? t.csv() : t.json());
}

inline Window window_of(const ExperimentConfig& c) {
  return {{0.0, 0.0}, c.half_width, c.buffer.value_or(Window::default_buffer(c.intensity))};
}

inline std::string num(double x) { return io::fmt(x); }

/// Random +-1 spins with density 1/2 on the core sites, -1 elsewhere.
inline SpinConfig random_core_spins(const Tessellation& tess, std::uint64_t seed, double eps) {
  std::mt19937_64 rng(mix_seed(seed, std::uint64_t{0x5b1f}));
  SpinConfig u = SpinConfig::constant(tess.site_count(), -1, eps);
  const Rect core = tess.core();
  for (SiteId s = 0; s < tess.site_count(); ++s) {
    const bool heads = uniform01(rng) < 0.5;
    if (core.contains(tess.site(s)) && heads) u.values[s] = 1;
  }
  return u;
}

inline TauConfig tau_config_of(const ExperimentConfig& c) {
  TauConfig t;
  t.intensity = c.intensity;
  t.half_width = c.half_width;
  t.buffer = c.buffer;
  t.t_values = c.t;
  t.directions = c.dirs;
  t.seeds = c.seeds;
  t.offset_fraction = c.offset;
  t.jobs = c.jobs;
  return t;
}

inline void add_tau_rows(Table& table, const TauEstimate& est) {
  for (const TauSample& s : est.samples) {
    table.add({s.seed, s.realization_seed, s.intensity, s.alpha, s.t, s.dir_deg, s.offset.x, s.offset.y,
               static_cast<std::uint64_t>(s.hops), s.tau_sample});
  }
}

inline const std::vector<std::string> tau_header{"seed",  "realization_seed", "intensity", "alpha", "t",
                                                 "dir_deg", "offset_x",       "offset_y",  "hops",  "tau_sample"};

// --- experiments -----------------------------------------------------------

inline void run_tessellate(const ExperimentConfig& c, ExperimentOutput& out) {
  struct Row {
    std::size_t sites = 0, certified = 0, edges_total = 0, delaunay = 0, voronoi = 0;
    std::string json;
  };
  std::vector<Row> rows(c.seeds.size());
  parallel_for(rows.size(), c.jobs, [&](std::size_t i) {
    const Tessellation t = build_tessellation(sample_poisson(c.intensity, window_of(c), c.seeds[i]));
    Row& r = rows[i];
    r.sites = t.site_count();
    r.delaunay = t.delaunay_edges.size();
    r.voronoi = t.voronoi_edges.size();
    const Rect core = t.core();
    for (SiteId s = 0; s < t.site_count(); ++s) {
      if (t.cells[s].certified && core.contains(t.site(s))) {
        ++r.certified;
        r.edges_total += t.cells[s].ring.size();
      }
    }
    if (c.format == "json") r.json = io::tessellation_to_json(t);
  });
  Table table({"seed", "sites", "certified_core_cells", "mean_edges", "delaunay_edges", "voronoi_edges"});
  std::size_t cells = 0, edges = 0;
  bool dual = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    cells += r.certified;
    edges += r.edges_total;
    dual = dual && r.delaunay == r.voronoi;
    table.add({c.seeds[i], r.sites, r.certified, r.certified ? static_cast<double>(r.edges_total) / r.certified : 0.0,
               r.delaunay, r.voronoi});
    if (c.format == "json") out.files.emplace_back("tessellation_" + std::to_string(c.seeds[i]) + ".json", r.json);
  }
  add_table(out, c, "tessellate", table);
  const double mean_edges = cells ? static_cast<double>(edges) / static_cast<double>(cells) : 0.0;
  out.results["certified_cells"] = cells;
  out.results["mean_edges"] = mean_edges;
  out.check("duality", dual, "Delaunay and Voronoi edge counts agree for every seed");
  if (cells >= 10000) {
    out.check("mean_edges", std::abs(mean_edges - 6.0) <= 0.1, "mean edges " + num(mean_edges) + " vs 6.00 +- 0.10");
  } else {
    out.skip("mean_edges", "fewer than 10^4 certified cells");
  }
}

inline void run_energy(const ExperimentConfig& c, ExperimentOutput& out) {
  Table table({"seed", "epsilon", "sites", "discordant", "energy", "quadratic_sum", "ordered_discordant",
               "ordered_plus_minus", "forms_agree"});
  std::vector<std::vector<EnergyResult>> results(c.seeds.size());
  std::vector<std::size_t> sites(c.seeds.size());
  parallel_for(c.seeds.size(), c.jobs, [&](std::size_t i) {
    const Tessellation t = build_tessellation(sample_poisson(c.intensity, window_of(c), c.seeds[i]));
    sites[i] = t.site_count();
    for (const double e : c.eps) results[i].push_back(scaled_energy(t, random_core_spins(t, c.seeds[i], e)));
  });
  bool agree = true;
  for (std::size_t i = 0; i < c.seeds.size(); ++i) {
    for (std::size_t k = 0; k < c.eps.size(); ++k) {
      const EnergyResult& r = results[i][k];
      agree = agree && r.forms_agree();
      table.add({c.seeds[i], c.eps[k], sites[i], r.discordant_count, r.energy, r.quadratic_sum, r.ordered_discordant,
                 r.ordered_plus_minus, r.forms_agree()});
    }
  }
  add_table(out, c, "energy", table);
  out.check("forms_agree", agree, "the three energy forms agree on every instance");
}

inline void check_tau(const TauEstimate& est, double intensity, ExperimentOutput& out) {
  const double tau0 = est.tau_hat / std::sqrt(intensity);
  out.check("coercive", tau0 > 0.5, "tau_hat / sqrt(intensity) = " + num(tau0) + " > 0.5");
  if (est.per_direction.size() >= 2 && !est.levels.empty() && est.levels.back().t >= 200.0) {
    out.check("isotropy", est.direction_spread <= 0.05, "per-direction spread " + num(est.direction_spread) + " <= 0.05");
  } else {
    out.skip("isotropy", "needs >= 2 directions and t >= 200");
  }
  bool any = false, ok = true;
  std::string detail;
  for (std::size_t i = 0; i + 1 < est.levels.size(); ++i) {
    const TauLevel &a = est.levels[i], &b = est.levels[i + 1];
    if (std::abs(b.t - 2.0 * a.t) > 1e-9 * b.t) continue;
    any = true;
    ok = ok && b.cv <= 0.9 * a.cv;
    detail += "cv(" + num(a.t) + ")=" + num(a.cv) + " cv(" + num(b.t) + ")=" + num(b.cv) + "; ";
  }
  if (any) {
    out.check("cv_decrease", ok, detail + "each doubling lowers cv by >= 10%");
  } else {
    out.skip("cv_decrease", "no doubling pair among t values");
  }
}

inline void tau_results(const TauEstimate& est, nlohmann::ordered_json& j) {
  j["tau_hat"] = est.tau_hat;
  j["ci_halfwidth"] = est.ci_halfwidth;
  j["direction_spread"] = est.direction_spread;
  nlohmann::ordered_json levels = nlohmann::ordered_json::array();
  for (const TauLevel& lv : est.levels) levels.push_back({{"t", lv.t}, {"n", lv.n}, {"mean", lv.mean}, {"sd", lv.sd}, {"cv", lv.cv}});
  j["levels"] = levels;
}

inline void run_tau(const ExperimentConfig& c, ExperimentOutput& out) {
  const TauEstimate est = estimate_tau(tau_config_of(c));
  Table table(tau_header);
  add_tau_rows(table, est);
  add_table(out, c, "tau", table);
  tau_results(est, out.results);
  out.tau_hat_ref = est.tau_hat;
  check_tau(est, c.intensity, out);
}

inline void run_tau_alpha(const ExperimentConfig& c, ExperimentOutput& out) {
  std::vector<double> alphas = c.alpha;
  std::sort(alphas.begin(), alphas.end(), std::greater<>());
  Table table({"alpha", "tau_hat", "ci_halfwidth", "n", "attempts", "rejections"});
  Table samples(tau_header);
  std::vector<TauEstimate> ests;
  for (const double a : alphas) {
    ests.push_back(tau_alpha(tau_config_of(c), a));
    const TauEstimate& e = ests.back();
    table.add({a, e.tau_hat, e.ci_halfwidth, e.levels.empty() ? 0 : e.levels.back().n, e.attempts, e.rejections});
    add_tau_rows(samples, e);
  }
  add_table(out, c, "tau_alpha", table);
  add_table(out, c, "tau_alpha_samples", samples);
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i + 1 < ests.size(); ++i) {
    const TauEstimate &hi = ests[i], &lo = ests[i + 1];
    const bool step = lo.tau_hat <= hi.tau_hat + hi.ci_halfwidth + lo.ci_halfwidth;
    ok = ok && step;
    detail += "tau(" + num(lo.alpha) + ")=" + num(lo.tau_hat) + " vs tau(" + num(hi.alpha) + ")=" + num(hi.tau_hat) + "; ";
    out.results["tau_" + num(hi.alpha)] = hi.tau_hat;
  }
  if (!ests.empty()) out.results["tau_" + num(ests.back().alpha)] = ests.back().tau_hat;
  out.check("non_increasing", ok, detail + "tau_alpha non-increasing as alpha decreases, within combined CI");
}

inline void run_channels(const ExperimentConfig& c, ExperimentOutput& out) {
  if (c.alpha.size() != 1) throw UsageError("channels takes a single alpha");
  const double a = c.alpha[0];
  struct Result {
    bool spanning = false;
    std::vector<ChannelReport> reports;
    std::vector<bool> valid;
  };
  std::vector<Result> res(c.seeds.size());
  parallel_for(c.seeds.size(), c.jobs, [&](std::size_t i) {
    const Tessellation t = build_tessellation(sample_poisson(c.intensity, window_of(c), c.seeds[i]));
    const AlphaCluster cl = alpha_cluster(classify_regular(t, a), t);
    res[i].spanning = cl.spanning;
    for (const double T : c.T) {
      res[i].reports.push_back(channel_count(cl, t, {{0.0, 0.0}, {1.0, 0.0}, T, c.delta}));
      res[i].valid.push_back(witnesses_valid(res[i].reports.back(), cl, t));
    }
  });
  Table table({"seed", "alpha", "delta", "T", "spanning", "count", "cells_in_rect", "witnesses_valid"});
  std::size_t spanning = 0;
  bool valid = true;
  std::vector<double> means(c.T.size(), 0.0);
  for (std::size_t i = 0; i < res.size(); ++i) {
    spanning += res[i].spanning ? 1 : 0;
    for (std::size_t k = 0; k < c.T.size(); ++k) {
      const ChannelReport& r = res[i].reports[k];
      valid = valid && res[i].valid[k];
      means[k] += static_cast<double>(r.count) / static_cast<double>(res.size());
      table.add({c.seeds[i], a, c.delta, c.T[k], res[i].spanning, r.count, r.cells_in_rect, static_cast<bool>(res[i].valid[k])});
    }
  }
  add_table(out, c, "channels", table);
  const double rate = static_cast<double>(spanning) / static_cast<double>(res.size());
  const stats::LinearFit fit = stats::least_squares(c.T, means);
  out.results["spanning_rate"] = rate;
  out.results["slope"] = fit.slope;
  out.results["r_squared"] = fit.r_squared;
  out.check("witnesses_valid", valid, "every witness family re-checks");
  out.check("spanning_rate", rate >= 0.95, "spanning rate " + num(rate) + " >= 0.95");
  if (c.T.size() >= 3) {
    out.check("linear_growth", fit.slope > 0.0 && fit.r_squared >= 0.8,
              "slope " + num(fit.slope) + " > 0 and R^2 " + num(fit.r_squared) + " >= 0.8");
  } else {
    out.skip("linear_growth", "needs at least three T values");
  }
}

inline void run_polyomino(const ExperimentConfig& c, ExperimentOutput& out) {
  for (const std::size_t s : c.sizes) {
    if (s < 10) throw UsageError("polyomino sizes must be at least 10");
  }
  const GrowthRule rule = c.rule == "eden" ? GrowthRule::eden : GrowthRule::eastward;
  std::vector<PolyominoStats> stats_per_seed(c.seeds.size());
  parallel_for(c.seeds.size(), c.jobs, [&](std::size_t i) {
    const Tessellation t = build_tessellation(sample_poisson(c.intensity, window_of(c), c.seeds[i]));
    stats_per_seed[i] = polyomino_ratio_stats(t, c.sizes, c.samples, c.seeds[i], rule);
  });
  Table table({"seed", "size", "sample", "cells", "footprint", "footprint_per_cell", "cells_per_footprint", "ratio"});
  std::map<std::size_t, double> c_hat;
  for (std::size_t i = 0; i < c.seeds.size(); ++i) {
    for (const PolyominoSample& s : stats_per_seed[i].samples) {
      table.add({c.seeds[i], s.target_size, s.sample, s.cells, s.footprint, s.footprint_per_cell, s.cells_per_footprint, s.ratio()});
      c_hat[s.target_size] = std::max(c_hat[s.target_size], s.ratio());
    }
  }
  add_table(out, c, "polyomino", table);
  for (const auto& [size, r] : c_hat) out.results["c_hat_" + std::to_string(size)] = r;
  if (c_hat.size() >= 2) {
    const double lo = c_hat.begin()->second, hi = c_hat.rbegin()->second;
    out.check("bounded_ratio", hi <= 2.0 * lo, "C(" + std::to_string(c_hat.rbegin()->first) + ")=" + num(hi) + " <= 2 C(" +
                                                   std::to_string(c_hat.begin()->first) + ")=" + num(2.0 * lo));
  } else {
    out.skip("bounded_ratio", "needs two sizes");
  }
}

inline void run_decompose(const ExperimentConfig& c, ExperimentOutput& out) {
  for (std::size_t i = 1; i < c.eps.size(); ++i) {
    if (!(c.eps[i] < c.eps[i - 1])) throw UsageError("eps schedule must decrease");
  }
  std::vector<std::vector<Decomposition>> res(c.seeds.size());
  parallel_for(c.seeds.size(), c.jobs, [&](std::size_t i) {
    const Tessellation t = build_tessellation(sample_poisson(c.intensity, window_of(c), c.seeds[i]));
    for (const double e : c.eps) res[i].push_back(contour_decompose(t, random_core_spins(t, c.seeds[i], e), c.gamma));
  });
  Table table({"seed", "epsilon", "gamma", "n_plus", "n_minus", "n_open", "b_cells", "area_Bp", "area_Bpp", "perimeter_Aeps",
               "energy"});
  std::size_t monotone = 0;
  double c_hat = 0.0;
  bool bound = true;
  std::string worst;
  for (std::size_t i = 0; i < res.size(); ++i) {
    bool mono = true;
    for (std::size_t k = 0; k < res[i].size(); ++k) {
      const Decomposition& d = res[i][k];
      table.add({c.seeds[i], d.epsilon, d.gamma, d.n_plus, d.n_minus, d.n_open, d.b_count(), d.area_Bp, d.area_Bpp,
                 d.perimeter_A, d.energy});
      if (k > 0) mono = mono && d.area_Bp + d.area_Bpp <= res[i][k - 1].area_Bp + res[i][k - 1].area_Bpp;
      const double ratio = d.energy > 0.0 ? d.perimeter_A / d.energy : 0.0;
      if (i == 0) c_hat = std::max(c_hat, ratio);  // fitted once, on the first seed
      else if (ratio > 2.0 * c_hat) {
        bound = false;
        worst = "seed " + std::to_string(c.seeds[i]) + " ratio " + num(ratio);
      }
    }
    monotone += mono ? 1 : 0;
  }
  add_table(out, c, "decompose", table);
  const double frac = static_cast<double>(monotone) / static_cast<double>(res.size());
  out.results["monotone_fraction"] = frac;
  out.results["c_hat"] = c_hat;
  out.check("b_decreasing", frac >= 0.8, "per-seed non-increase of |B' u B''| in " + num(frac) + " of seeds (>= 0.8)");
  out.check("perimeter_bound", bound, "perimeter(A) <= 2 C E with C = " + num(c_hat) + (worst.empty() ? "" : "; " + worst));
}

inline void run_gamma_upper(const ExperimentConfig& c, ExperimentOutput& out) {
  GammaUpperConfig g;
  g.target_name = c.target;
  g.target = c.target == "square" ? PolygonSet::square({0.0, 0.0}, 1.0) : PolygonSet::regular_polygon({0.0, 0.0}, 64, 4.0);
  g.epsilons = c.eps;
  g.fixed_m = c.m_rule == "sqrt" ? 0 : std::stoi(c.m_rule);
  g.seeds = c.seeds;
  g.intensity = c.intensity;
  g.jobs = c.jobs;
  const auto rows = gamma_upper_experiment(g);
  Table table({"target", "seed", "epsilon", "m", "sites", "energy", "perimeter", "ratio", "hausdorff_gap", "symmetric_difference",
               "total_hops", "path_edges", "boundary_in_paths"});
  bool fill = true;
  std::map<std::uint64_t, std::vector<double>> symdiff;
  std::map<double, double, std::greater<>> gap_m;  // eps -> max gap * m
  std::map<double, std::vector<double>, std::greater<>> ratios;
  for (const GammaUpperRow& r : rows) {
    table.add({r.target, r.seed, r.epsilon, r.m, r.sites, r.energy, r.perimeter, r.ratio, r.hausdorff_gap, r.symmetric_difference,
               r.total_hops, r.path_edges, r.boundary_in_paths});
    fill = fill && r.boundary_in_paths;
    symdiff[r.seed].push_back(r.symmetric_difference);
    gap_m[r.epsilon] = std::max(gap_m[r.epsilon], r.hausdorff_gap * r.m);
    ratios[r.epsilon].push_back(r.ratio);
  }
  add_table(out, c, "gamma_upper", table);
  out.check("fill_in_paths", fill, "filled-region boundary lies in the path union for every run");
  std::size_t mono = 0;
  for (const auto& [seed, xs] : symdiff) {
    bool ok = true;
    for (std::size_t k = 1; k < xs.size(); ++k) ok = ok && xs[k] <= xs[k - 1];
    mono += ok ? 1 : 0;
  }
  const double mono_frac = static_cast<double>(mono) / static_cast<double>(symdiff.size());
  out.results["symdiff_monotone_fraction"] = mono_frac;
  if (c.eps.size() >= 2) {
    out.check("symdiff_non_increasing", mono_frac >= 0.8, "per-seed non-increase in " + num(mono_frac) + " of seeds (>= 0.8)");
    const double c0 = gap_m.begin()->second;
    bool stable = true;
    std::string detail = "C per level:";
    for (const auto& [e, v] : gap_m) {
      stable = stable && v <= 2.0 * c0;
      detail += " " + num(v);
    }
    out.check("gap_bound", stable, detail + " at most twice the coarsest level");
  } else {
    out.skip("symdiff_non_increasing", "single level");
    out.skip("gap_bound", "single level");
  }
  const std::vector<double>& finest = ratios.rbegin()->second;
  const double mean_ratio = stats::mean(finest);
  out.results["final_ratio"] = mean_ratio;
  out.results["final_ratio_ci"] = stats::ci95(finest);
  if (c.tau_ref) {
    out.tau_hat_ref = c.tau_ref;
    out.check("ratio_vs_tau", std::abs(mean_ratio - *c.tau_ref) <= 0.1 * *c.tau_ref,
              "energy/perimeter " + num(mean_ratio) + " within 10% of tau_ref " + num(*c.tau_ref));
  } else {
    out.skip("ratio_vs_tau", "no tau-ref given");
  }
}

inline void run_lambda_scaling(const ExperimentConfig& c, ExperimentOutput& out) {
  if (c.lambdas.empty()) throw UsageError("need at least one intensity");
  std::vector<TauEstimate> ests;
  TauConfig base = tau_config_of(c);
  base.buffer.reset();
  const auto rows = lambda_scaling_experiment(c.lambdas, base, &ests);
  Table table({"intensity", "tau_hat", "ci_halfwidth", "ratio", "ratio_ci", "sqrt_ratio", "n"});
  bool ok = true;
  std::string detail;
  for (const LambdaScalingRow& r : rows) {
    table.add({r.intensity, r.tau_hat, r.ci_halfwidth, r.ratio, r.ratio_ci, r.sqrt_ratio, r.n_samples});
    ok = ok && std::abs(r.ratio - r.sqrt_ratio) <= 0.05 * r.sqrt_ratio;
    detail += "ratio " + num(r.ratio) + " vs " + num(r.sqrt_ratio) + "; ";
  }
  Table samples(tau_header);
  for (const TauEstimate& e : ests) add_tau_rows(samples, e);
  add_table(out, c, "lambda_scaling", table);
  add_table(out, c, "lambda_scaling_samples", samples);
  out.tau_hat_ref = rows.front().tau_hat;
  if (rows.size() >= 2) {
    out.check("sqrt_scaling", ok, detail + "within 5%");
  } else {
    out.skip("sqrt_scaling", "single intensity");
  }
}

inline void run_blocks(const ExperimentConfig& c, ExperimentOutput& out) {
  if (c.alpha.size() != 1) throw UsageError("blocks takes a single alpha");
  struct Result {
    BlockGrid grid;
    BlockSoundness sound;
    std::string json;
  };
  std::vector<Result> res(c.seeds.size());
  parallel_for(c.seeds.size(), c.jobs, [&](std::size_t i) {
    const Tessellation t = build_tessellation(sample_poisson(c.intensity, window_of(c), c.seeds[i]));
    res[i].grid = classify_blocks(t.points, c.L, c.block_cap(), c.alpha[0]);
    res[i].sound = check_block_soundness(t, res[i].grid);
    if (c.format == "json") res[i].json = io::block_grid_to_json(res[i].grid);
  });
  Table table({"seed", "L", "K", "alpha", "evaluated", "skipped", "open", "open_fraction", "fails_c1", "fails_c2", "fails_c3",
               "pairs_checked", "cells_checked", "violations"});
  std::size_t violations = 0;
  for (std::size_t i = 0; i < res.size(); ++i) {
    const BlockGrid& g = res[i].grid;
    const BlockSoundness& s = res[i].sound;
    violations += s.violations;
    table.add({c.seeds[i], g.L, g.K, g.alpha, g.evaluated, g.skipped, g.open_count, g.open_fraction(), g.fails_c1, g.fails_c2,
               g.fails_c3, s.pairs_checked, s.cells_checked, s.violations});
    if (c.format == "json") out.files.emplace_back("blocks_" + std::to_string(c.seeds[i]) + ".json", res[i].json);
  }
  add_table(out, c, "blocks", table);
  out.check("soundness", violations == 0, std::to_string(violations) + " violations across open block pairs");
}

}  // namespace detail

/// Runs the experiment in memory; nothing touches the file system.
inline ExperimentOutput run_experiment(const ExperimentConfig& c) {
  ExperimentOutput out;
  const std::string& e = c.experiment;
  if (e == "tessellate") detail::run_tessellate(c, out);
  else if (e == "energy") detail::run_energy(c, out);
  else if (e == "tau") detail::run_tau(c, out);
  else if (e == "tau_alpha") detail::run_tau_alpha(c, out);
  else if (e == "channels") detail::run_channels(c, out);
  else if (e == "polyomino") detail::run_polyomino(c, out);
  else if (e == "decompose") detail::run_decompose(c, out);
  else if (e == "gamma_upper") detail::run_gamma_upper(c, out);
  else if (e == "lambda_scaling") detail::run_lambda_scaling(c, out);
  else if (e == "blocks") detail::run_blocks(c, out);
  else throw UsageError("unknown experiment '" + e + "'");
  return out;
}

inline std::string summary_json(const ExperimentConfig& c, const ExperimentOutput& out) {
  nlohmann::ordered_json j;
  j["name"] = c.experiment;
  j["config_digest"] = c.digest();
  j["tau_hat_ref"] = out.tau_hat_ref ? nlohmann::ordered_json(*out.tau_hat_ref) : nlohmann::ordered_json();
  j["results"] = out.results;
  nlohmann::ordered_json asserts = nlohmann::ordered_json::array();
  for (const Assertion& a : out.assertions) asserts.push_back({{"name", a.name}, {"status", a.status}, {"detail", a.detail}});
  j["assertions"] = asserts;
  j["passed"] = out.passed();
  return j.dump(2) + "\n";
}

/// Writes the artifacts, summary.json and manifest.json; throws std::runtime_error on I/O failure.
inline void write_outputs(const std::filesystem::path& dir, const ExperimentConfig& c, const ExperimentOutput& out,
                          double wall_seconds) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::pair<std::string, std::string>> files = out.files;
  files.emplace_back("summary.json", summary_json(c, out));
  nlohmann::ordered_json manifest;
  manifest["name"] = c.experiment;
  manifest["version"] = PERCOVOR_VERSION;
  manifest["config_digest"] = c.digest();
  manifest["config"] = c.canonical();
  manifest["wall_time_seconds"] = wall_seconds;
  manifest["files"] = nlohmann::ordered_json::array();
  for (const auto& [name, content] : files) {
    std::ofstream f(dir / name, std::ios::binary);
    f << content;
    f.close();
    if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
    manifest["files"].push_back({{"path", name}, {"bytes", content.size()}, {"fnv1a64", io::hex64(io::fnv1a(content))}});
  }
  std::ofstream m(dir / "manifest.json", std::ios::binary);
  m << manifest.dump(2) << "\n";
  m.close();
  if (!m) throw std::runtime_error("cannot write manifest");
}

/// `percovor run <experiment> [--key value ...] [--config file]`.
inline int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Voronoi percolation and surface-tension experiments", "percovor"};
  app.require_subcommand(1);
  CLI::App* run = app.add_subcommand("run", "run one experiment");
  std::string experiment, config_file;
  run->add_option("name", experiment, "one of: tessellate energy tau tau_alpha channels polyomino decompose gamma_upper "
                                            "lambda_scaling blocks");
  run->add_option("--config", config_file, "flat key = value file; flags override it");
  std::map<std::string, std::string> flag_values;
  std::map<std::string, CLI::Option*> flag_opts;
  for (const std::string& key : config_keys()) {
    flag_opts[key] = run->add_option("--" + key, flag_values[key]);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_usage;
  }

  ExperimentConfig cfg;
  try {
    RawConfig raw;
    if (!config_file.empty()) {
      std::ifstream f(config_file);
      if (!f) throw UsageError("cannot read config file " + config_file);
      std::stringstream ss;
      ss << f.rdbuf();
      raw = parse_config_text(ss.str());
    }
    for (const auto& [key, opt] : flag_opts) {
      if (opt->count() > 0) raw[key] = flag_values[key];
    }
    if (!experiment.empty()) {
      if (raw.count("experiment") && raw["experiment"] != experiment && flag_opts["experiment"]->count() > 0) {
        throw UsageError("conflicting experiment names");
      }
      raw["experiment"] = experiment;
    }
    cfg = resolve_config(raw);
    if (const char* env = std::getenv("PERCOVOR_OUT"); env && *env) cfg.out = env;
  } catch (const UsageError& e) {
    err << "percovor: " << e.what() << "\n";
    return exit_usage;
  }

  const auto start = std::chrono::steady_clock::now();
  ExperimentOutput result;
  try {
    result = run_experiment(cfg);
  } catch (const UsageError& e) {
    err << "percovor: " << e.what() << "\n";
    return exit_usage;
  } catch (const Error& e) {
    err << "percovor: " << to_string(e.kind()) << ": " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::invalid_argument:
      case ErrorKind::window_too_small:
      case ErrorKind::out_of_core:
      case ErrorKind::out_of_margin:
      case ErrorKind::parse_error: return exit_usage;
      default: return exit_assertion;
    }
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  try {
    write_outputs(cfg.out, cfg, result, wall);
  } catch (const std::exception& e) {
    err << "percovor: " << e.what() << "\n";
    return exit_io;
  }
  for (const Assertion& a : result.assertions) out << a.status << " " << a.name << ": " << a.detail << "\n";
  out << (result.passed() ? "PASS" : "FAIL") << " " << cfg.experiment << " -> " << cfg.out << "\n";
  return result.passed() ? exit_ok : exit_assertion;
}

}  // namespace percovor::cli

#endif  // PERCOVOR_CLI_HPP
