#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <variant>

#include "rrcov/asymptotics.hpp"
#include "rrcov/errors.hpp"
#include "rrcov/gaussian.hpp"
#include "rrcov/model.hpp"
#include "rrcov/model_file.hpp"
#include "rrcov/report.hpp"
#include "rrcov/simulate.hpp"

namespace rrcov::cli {
namespace {

using json = nlohmann::ordered_json;

struct Options {
  std::string command;
  std::string model;
  std::vector<double> grid{1, 2, 4, 8, 16, 32};
  std::uint64_t reps = 1'000'000;
  std::uint64_t seed = 1;
  std::uint64_t block_size = kDefaultBlockSize;
  std::uint64_t max_cycles = kDefaultMaxCyclesPerPath;
  int workers = 0;
  bool use_b = true;
  bool use_D = true;
  std::string out;
  std::string format;
};

// A data table rendered either as CSV or as a JSON array of row objects.
struct Cell {
  std::variant<std::monostate, double, std::string> value;
  Cell() = default;
  Cell(double v) : value(v) {}
  Cell(std::string s) : value(std::move(s)) {}
  Cell(const char* s) : value(std::string(s)) {}
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c.value)) return format_value(*d);
  if (const auto* s = std::get_if<std::string>(&c.value)) return *s;
  return {};
}

json number_json(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(format_value(v));
}

json cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c.value)) return number_json(*d);
  if (const auto* s = std::get_if<std::string>(&c.value)) return *s;
  return nullptr;
}

std::string render_csv(const RunManifest& m, const Table& t) {
  std::string out = manifest_header(m);
  out += csv_line(t.columns);
  for (const auto& row : t.rows) {
    std::vector<std::string> cells;
    for (const auto& c : row) cells.push_back(cell_text(c));
    out += csv_line(cells);
  }
  return out;
}

json manifest_json(const RunManifest& m, int workers) {
  json j = json::object();
  for (const auto& [k, v] : m.entries) j[k] = v;
  if (workers > 0) j["workers"] = workers;
  return j;
}

std::string render_json(const RunManifest& m, int workers, const Table& t) {
  json j;
  j["manifest"] = manifest_json(m, workers);
  j["rows"] = json::array();
  for (const auto& row : t.rows) {
    json r = json::object();
    for (std::size_t k = 0; k < t.columns.size(); ++k) r[t.columns[k]] = cell_json(row[k]);
    j["rows"].push_back(r);
  }
  return j.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string join_grid(const std::vector<double>& grid) {
  std::string s;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i) s += ',';
    s += format_value(grid[i]);
  }
  return s;
}

RunManifest make_manifest(const Options& o, const std::string& model_bytes) {
  RunManifest m;
  m.set("tool", kToolName);
  m.set("version", kToolVersion);
  m.set("command", o.command);
  m.set("model", o.model);
  m.set("model_digest", digest_hex(model_bytes));
  if (o.command == "approx" || o.command == "simulate" || o.command == "compare") {
    m.set("grid", join_grid(o.grid));
  }
  if (o.command == "simulate" || o.command == "compare" || o.command == "validate") {
    m.set("reps", std::to_string(o.reps));
    m.set("seed", std::to_string(o.seed));
  }
  if (o.command == "simulate" || o.command == "compare") {
    m.set("block_size", std::to_string(o.block_size));
    m.set("max_cycles", std::to_string(o.max_cycles));
  }
  if (o.command == "approx" || o.command == "compare") m.set("use_b", o.use_b ? "true" : "false");
  if (o.command == "approx") m.set("use_D", o.use_D ? "true" : "false");
  m.set("format", o.format);
  return m;
}

SimConfig sim_config(const Options& o) {
  SimConfig cfg;
  cfg.time_grid = o.grid;
  cfg.replications = o.reps;
  cfg.master_seed = o.seed;
  cfg.block_size = o.block_size;
  cfg.max_cycles_per_path = o.max_cycles;
  cfg.workers = o.workers;
  return cfg;
}

void emit_warnings(const ModelSpec& spec, std::ostream& err) {
  if (spec.lattice) {
    err << "warning: model declares a lattice cycle-length distribution; the covariance "
           "expansion assumes a spread-out distribution and the mean expansion a non-lattice "
           "one, so the reported constants may not describe this process\n";
  }
  for (const auto& note : spec.notes) err << "note: " << note << "\n";
}

std::string pair_label(const ModelSpec& spec, std::size_t i, std::size_t j) {
  return spec.reward_names[i] + "_" + spec.reward_names[j];
}

// ---------------------------------------------------------------- analyze

std::string analyze(const Options& o, const ModelSpec& spec, const RunManifest& m,
                    std::ostream& err) {
  const auto mom = cycle_moments(spec);
  const auto s = summarize(mom);
  std::optional<PdThreshold> threshold;
  try {
    threshold = pd_threshold(s.C, s.D);
  } catch (const Error& e) {
    err << "note: " << e.what() << "; no PD threshold reported\n";
  }
  const std::size_t L = spec.dimension();

  auto t0_cell = [&]() -> Cell {
    if (!threshold) return Cell("undefined");
    if (threshold->always_pd) return Cell("always-pd");
    return Cell(threshold->t0);
  };

  if (o.format == "json") {
    json j;
    j["manifest"] = manifest_json(m, 0);
    j["rewards"] = spec.reward_names;
    auto vec = [](const std::vector<double>& v) {
      json a = json::array();
      for (double x : v) a.push_back(number_json(x));
      return a;
    };
    auto mat = [](const Matrix& x) {
      json a = json::array();
      for (std::size_t i = 0; i < x.size(); ++i) {
        json row = json::array();
        for (std::size_t k = 0; k < x.size(); ++k) row.push_back(number_json(x(i, k)));
        a.push_back(row);
      }
      return a;
    };
    j["a"] = vec(s.a);
    j["b"] = vec(s.b);
    j["b_ordinary"] = vec(s.b_ordinary);
    j["ell"] = vec(s.ell);
    j["a_pair"] = mat(s.a_pair);
    j["b_pair_ordinary"] = mat(s.b_pair_ordinary);
    j["C"] = mat(s.C);
    j["D_ordinary"] = mat(s.D_ordinary);
    j["D"] = mat(s.D);
    const Cell t0 = t0_cell();
    j["t0"] = cell_json(t0);
    j["cov_rate_residual"] = number_json(s.cov_rate_residual);
    return j.dump(2) + "\n";
  }

  if (o.format == "csv") {
    Table t{{"quantity", "row", "col", "value"}, {}};
    auto add_vec = [&](const char* name, const std::vector<double>& v) {
      for (std::size_t i = 0; i < L; ++i)
        t.rows.push_back({name, spec.reward_names[i], Cell(), v[i]});
    };
    auto add_mat = [&](const char* name, const Matrix& x) {
      for (std::size_t i = 0; i < L; ++i)
        for (std::size_t k = 0; k < L; ++k)
          t.rows.push_back({name, spec.reward_names[i], spec.reward_names[k], x(i, k)});
    };
    add_vec("a", s.a);
    add_vec("b", s.b);
    add_vec("b_ordinary", s.b_ordinary);
    add_vec("ell", s.ell);
    add_mat("a_pair", s.a_pair);
    add_mat("b_pair_ordinary", s.b_pair_ordinary);
    add_mat("C", s.C);
    add_mat("D_ordinary", s.D_ordinary);
    add_mat("D", s.D);
    t.rows.push_back({"t0", Cell(), Cell(), t0_cell()});
    t.rows.push_back({"cov_rate_residual", Cell(), Cell(), s.cov_rate_residual});
    return render_csv(m, t);
  }

  // text
  std::ostringstream os;
  os << manifest_header(m);
  os << "rewards:";
  for (const auto& n : spec.reward_names) os << " " << n;
  os << "\n";
  auto vec = [&](const char* name, const std::vector<double>& v) {
    os << name << " = [";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << format_value(v[i]);
    os << "]\n";
  };
  auto mat = [&](const char* name, const Matrix& x) {
    os << name << " =\n";
    for (std::size_t i = 0; i < x.size(); ++i) {
      os << "  [";
      for (std::size_t k = 0; k < x.size(); ++k) os << (k ? ", " : "") << format_value(x(i, k));
      os << "]\n";
    }
  };
  vec("a", s.a);
  vec("b", s.b);
  vec("b_ordinary", s.b_ordinary);
  vec("ell", s.ell);
  mat("a_pair", s.a_pair);
  mat("b_pair_ordinary", s.b_pair_ordinary);
  mat("C", s.C);
  mat("D_ordinary", s.D_ordinary);
  mat("D", s.D);
  os << "t0 = " << cell_text(t0_cell()) << "\n";
  os << "cov_rate_residual = " << format_value(s.cov_rate_residual) << "\n";
  return os.str();
}

// ----------------------------------------------------------------- approx

Table approx_table(const Options& o, const ModelSpec& spec) {
  const auto g = GaussianApprox::from_summary(summarize(cycle_moments(spec)));
  const std::size_t L = spec.dimension();
  Table t;
  t.columns.push_back("t");
  for (std::size_t i = 0; i < L; ++i) t.columns.push_back("mean_" + spec.reward_names[i]);
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t j = i; j < L; ++j) t.columns.push_back("cov_" + pair_label(spec, i, j));
  if (L == 2) t.columns.push_back("m_tilde");
  t.columns.push_back("status");

  for (double time : o.grid) {
    std::vector<Cell> row{time};
    try {
      const auto p = params_at(g, time, o.use_b, o.use_D);
      for (double v : p.mean) row.emplace_back(v);
      for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = i; j < L; ++j) row.emplace_back(p.covariance(i, j));
      if (L == 2) row.emplace_back(approx_expected_min(g, time, o.use_b, o.use_D));
      row.emplace_back("ok");
    } catch (const NotPositiveDefiniteError&) {
      const auto p = params_at(g, time, o.use_b, false);
      for (double v : p.mean) row.emplace_back(v);
      for (std::size_t i = 0; i < L; ++i)
        for (std::size_t j = i; j < L; ++j) row.emplace_back();
      if (L == 2) row.emplace_back();
      row.emplace_back("not-pd");
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

// --------------------------------------------------------------- simulate

Table simulate_table(const Options& o, const ModelSpec& spec) {
  const auto est = simulate(spec, sim_config(o));
  const std::size_t L = spec.dimension();
  Table t;
  t.columns = {"t", "replications"};
  for (std::size_t i = 0; i < L; ++i) t.columns.push_back("mean_" + spec.reward_names[i]);
  for (std::size_t i = 0; i < L; ++i) t.columns.push_back("se_mean_" + spec.reward_names[i]);
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t j = i; j < L; ++j) t.columns.push_back("cov_" + pair_label(spec, i, j));
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t j = i; j < L; ++j) t.columns.push_back("se_cov_" + pair_label(spec, i, j));
  t.columns.push_back("mean_min");
  t.columns.push_back("se_mean_min");

  for (const auto& p : est.points) {
    std::vector<Cell> row{p.t, static_cast<double>(p.replications)};
    for (double v : p.mean) row.emplace_back(v);
    for (double v : p.mean_se) row.emplace_back(v);
    for (std::size_t i = 0; i < L; ++i)
      for (std::size_t j = i; j < L; ++j) row.emplace_back(p.covariance(i, j));
    for (std::size_t i = 0; i < L; ++i)
      for (std::size_t j = i; j < L; ++j) row.emplace_back(p.covariance_se(i, j));
    row.emplace_back(p.min_mean);
    row.emplace_back(p.min_se);
    t.rows.push_back(std::move(row));
  }
  return t;
}

// ---------------------------------------------------------------- compare

Table compare_table(const Options& o, const ModelSpec& spec) {
  const auto rows = compare(spec, sim_config(o), o.use_b);
  Table t;
  t.columns = {"t", "m_hat", "se_m_hat", "err_noD", "err_withD", "m_tilde_noD", "m_tilde_withD"};
  for (const auto& r : rows) {
    std::vector<Cell> row{r.t, r.m_hat, r.m_hat_se, r.error_plain()};
    row.push_back(r.error_refined() ? Cell(*r.error_refined()) : Cell());
    row.emplace_back(r.m_tilde_plain);
    row.push_back(r.m_tilde_refined ? Cell(*r.m_tilde_refined) : Cell());
    t.rows.push_back(std::move(row));
  }
  return t;
}

// --------------------------------------------------------------- validate

struct Check {
  std::string name;
  bool passed;
  std::string detail;
};

std::vector<Check> run_checks(const Options& o, const ModelSpec& spec) {
  std::vector<Check> checks;
  const auto mom = cycle_moments(spec);
  const auto s = summarize(mom);
  const std::size_t L = spec.dimension();

  checks.push_back({"cov-rate-two-forms", s.cov_rate_residual <= kCovRateTolerance,
                    "residual " + format_value(s.cov_rate_residual)});

  bool symmetric = true;
  for (std::size_t i = 0; i < L; ++i)
    for (std::size_t j = 0; j < L; ++j)
      symmetric = symmetric && s.C(i, j) == s.C(j, i) && s.D(i, j) == s.D(j, i) &&
                  s.D_ordinary(i, j) == s.D_ordinary(j, i);
  checks.push_back({"symmetry", symmetric, "C, D, D_ordinary"});

  double trace = 0.0;
  for (std::size_t i = 0; i < L; ++i) trace += s.C(i, i);
  const double lowest = min_eigenvalue(s.C);
  checks.push_back({"C-psd", lowest >= -1e-12 * std::max(trace, 1e-300),
                    "min eigenvalue " + format_value(lowest)});

  double diag_err = 0.0;
  for (std::size_t i = 0; i < L; ++i) {
    const double d = variance_correction(mom, i);
    diag_err = std::max(diag_err, std::abs(s.D(i, i) - d) / std::max(1.0, std::abs(d)));
  }
  checks.push_back({"diagonal-reduction", diag_err <= 1e-12, "relative error " + format_value(diag_err)});

  if (spec.delay_mode == DelayMode::Ordinary) {
    checks.push_back({"ordinary-D-equals-D_ordinary", s.D == s.D_ordinary, "bitwise"});
  }

  // Moment/sampler consistency: every cycle moment the constants use.
  struct Target {
    std::string label;
    int tp;
    std::vector<int> pw;
  };
  std::vector<Target> targets{{"E T", 1, std::vector<int>(L, 0)},
                              {"E T^2", 2, std::vector<int>(L, 0)},
                              {"E T^3", 3, std::vector<int>(L, 0)}};
  for (std::size_t i = 0; i < L; ++i) {
    const std::string xi = spec.reward_names[i];
    auto pw = [&](std::size_t a, std::size_t b, int na, int nb) {
      std::vector<int> v(L, 0);
      v[a] += na;
      v[b] += nb;
      return v;
    };
    targets.push_back({"E " + xi, 0, pw(i, i, 1, 0)});
    targets.push_back({"E T " + xi, 1, pw(i, i, 1, 0)});
    targets.push_back({"E T^2 " + xi, 2, pw(i, i, 1, 0)});
    for (std::size_t j = i; j < L; ++j) {
      const std::string xj = spec.reward_names[j];
      targets.push_back({"E " + xi + " " + xj, 0, pw(i, j, 1, 1)});
      targets.push_back({"E T " + xi + " " + xj, 1, pw(i, j, 1, 1)});
    }
  }
  RngStream rng(o.seed, 0);
  std::vector<double> sum(targets.size(), 0.0), sum_sq(targets.size(), 0.0);
  for (std::uint64_t r = 0; r < o.reps; ++r) {
    const auto draw = sample_cycle(spec.cycle, rng);
    for (std::size_t k = 0; k < targets.size(); ++k) {
      double v = std::pow(draw.time, targets[k].tp);
      for (std::size_t c = 0; c < L; ++c) v *= std::pow(draw.rewards[c], targets[k].pw[c]);
      sum[k] += v;
      sum_sq[k] += v * v;
    }
  }
  const double n = static_cast<double>(o.reps);
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const double exact = joint_moment(spec.cycle, targets[k].tp, targets[k].pw);
    const double mean = sum[k] / n;
    const double se = std::sqrt(std::max(0.0, sum_sq[k] / n - mean * mean) / (n - 1.0));
    const double z = se > 0.0 ? std::abs(mean - exact) / se : (mean == exact ? 0.0 : INFINITY);
    const bool ok = se > 0.0 ? z <= 4.0 : std::abs(mean - exact) <= 1e-9 * std::max(1.0, std::abs(exact));
    checks.push_back({"moment " + targets[k].label, ok,
                      "exact " + format_value(exact) + ", sampled " + format_value(mean) +
                          " (" + format_value(z) + " SE)"});
  }
  return checks;
}

std::string validate_report(const Options& o, const ModelSpec& spec, const RunManifest& m,
                            bool& all_passed) {
  const auto checks = run_checks(o, spec);
  all_passed = true;
  for (const auto& c : checks) all_passed = all_passed && c.passed;
  Table t{{"check", "status", "detail"}, {}};
  for (const auto& c : checks) t.rows.push_back({c.name, c.passed ? "pass" : "FAIL", c.detail});
  if (o.format == "csv") return render_csv(m, t);
  if (o.format == "json") return render_json(m, 0, t);
  std::string out = manifest_header(m);
  for (const auto& c : checks) {
    out += (c.passed ? "PASS " : "FAIL ") + c.name + ": " + c.detail + "\n";
  }
  return out;
}

// ----------------------------------------------------------------- driver

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse:
      return kParseError;
    case ErrorKind::Validation:
    case ErrorKind::UnsupportedDimension:
      return kValidationError;
    case ErrorKind::NotPositiveDefinite:
    case ErrorKind::InvalidInput:
      return kPdError;
    case ErrorKind::Resource:
      return kResourceError;
    case ErrorKind::UnsupportedOrder:
    case ErrorKind::InternalConsistency:
      return kInternalError;
  }
  return kInternalError;
}

int execute(Options o, std::ostream& out, std::ostream& err) {
  const std::string model_bytes = read_file(o.model);
  const ModelSpec spec = parse_model(model_bytes);
  emit_warnings(spec, err);

  const bool tabular = o.command == "approx" || o.command == "simulate" || o.command == "compare";
  if (o.format.empty()) o.format = tabular ? "csv" : "text";
  if (o.format != "csv" && o.format != "json" && !(o.format == "text" && !tabular)) {
    err << "error: format '" << o.format << "' is not available for " << o.command << "\n";
    return kUsage;
  }
  if (o.command == "compare" && spec.dimension() != 2) {
    throw Error(ErrorKind::UnsupportedDimension, "compare needs exactly 2 reward coordinates");
  }

  const RunManifest manifest = make_manifest(o, model_bytes);
  int workers = 0;
  if (o.command == "simulate" || o.command == "compare") {
    workers = resolve_workers(sim_config(o));
    err << "workers=" << workers << "\n";
  }

  std::string data;
  int code = kOk;
  if (o.command == "analyze") {
    data = analyze(o, spec, manifest, err);
  } else if (o.command == "validate") {
    bool passed = false;
    data = validate_report(o, spec, manifest, passed);
    if (!passed) code = kValidationError;
  } else {
    const Table t = o.command == "approx"     ? approx_table(o, spec)
                    : o.command == "simulate" ? simulate_table(o, spec)
                                              : compare_table(o, spec);
    data = o.format == "json" ? render_json(manifest, workers, t) : render_csv(manifest, t);
  }

  if (o.out.empty()) {
    out << data;
  } else {
    std::ofstream f(o.out, std::ios::binary);
    if (!f) {
      err << "error: cannot write '" << o.out << "'\n";
      return kUsage;
    }
    f << data;
  }
  return code;
}

bool parse_bool(const std::string& s) { return s == "true"; }

// Rebuilds the options recorded in an output file's manifest.
Options options_from_manifest(const std::string& path) {
  const std::string text = read_file(path);
  RunManifest m;
  if (!text.empty() && text.front() == '{') {
    const json j = json::parse(text);
    for (const auto& [k, v] : j.at("manifest").items()) {
      if (v.is_string()) m.set(k, v.get<std::string>());
    }
  } else {
    std::istringstream in(text);
    m = parse_manifest(in);
  }
  if (m.get("tool") != kToolName) throw ParseError("'" + path + "' carries no rrcov manifest");

  Options o;
  o.command = m.get("command");
  o.model = m.get("model");
  o.format = m.get("format");
  if (m.has("grid")) {
    o.grid.clear();
    std::istringstream g(m.get("grid"));
    std::string item;
    while (std::getline(g, item, ',')) o.grid.push_back(std::stod(item));
  }
  if (m.has("reps")) o.reps = std::stoull(m.get("reps"));
  if (m.has("seed")) o.seed = std::stoull(m.get("seed"));
  if (m.has("block_size")) o.block_size = std::stoull(m.get("block_size"));
  if (m.has("max_cycles")) o.max_cycles = std::stoull(m.get("max_cycles"));
  if (m.has("use_b")) o.use_b = parse_bool(m.get("use_b"));
  if (m.has("use_D")) o.use_D = parse_bool(m.get("use_D"));

  if (digest_hex(read_file(o.model)) != m.get("model_digest")) {
    throw ValidationError("model file '" + o.model + "' no longer matches the recorded digest");
  }
  return o;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Asymptotic mean/covariance expansions and Monte Carlo validation for "
               "multivariate renewal-reward processes"};
  app.require_subcommand(1);

  Options o;
  std::string replay_path;

  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--model", o.model, "Model file (YAML)")->required();
    sub->add_option("--out", o.out, "Write data here instead of stdout");
  };
  auto add_grid = [&](CLI::App* sub) {
    sub->add_option("--grid", o.grid, "Comma-separated evaluation times")->delimiter(',');
  };
  auto add_sim = [&](CLI::App* sub) {
    sub->add_option("--reps", o.reps, "Replications (sample paths)");
    sub->add_option("--seed", o.seed, "Master seed");
    sub->add_option("--block-size", o.block_size, "Replications per random stream");
    sub->add_option("--max-cycles", o.max_cycles, "Cycle bound per path");
    sub->add_option("--workers", o.workers,
                    std::string("Worker threads (default: $") + kWorkersEnv + " or all cores)");
  };
  auto add_format = [&](CLI::App* sub, const std::vector<std::string>& allowed) {
    sub->add_option("--format", o.format, "Output format")->check(CLI::IsMember(allowed));
  };

  auto* analyze_cmd = app.add_subcommand("analyze", "Asymptotic constants a, b, C, D and t0");
  add_model(analyze_cmd);
  add_format(analyze_cmd, {"text", "csv", "json"});

  auto* approx_cmd = app.add_subcommand("approx", "Normal approximation on a time grid");
  add_model(approx_cmd);
  add_grid(approx_cmd);
  add_format(approx_cmd, {"csv", "json"});
  approx_cmd->add_flag("--use-b,!--no-b", o.use_b, "Include the mean offset b");
  approx_cmd->add_flag("--use-D,!--no-D", o.use_D, "Include the covariance offset D");

  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo estimates on a time grid");
  add_model(simulate_cmd);
  add_grid(simulate_cmd);
  add_sim(simulate_cmd);
  add_format(simulate_cmd, {"csv", "json"});

  auto* compare_cmd =
      app.add_subcommand("compare", "Approximate vs simulated expected minimum (two rewards)");
  add_model(compare_cmd);
  add_grid(compare_cmd);
  add_sim(compare_cmd);
  add_format(compare_cmd, {"csv", "json"});
  compare_cmd->add_flag("--use-b,!--no-b", o.use_b, "Include the mean offset b in both curves");

  auto* validate_cmd = app.add_subcommand("validate", "Check model invariants");
  add_model(validate_cmd);
  std::uint64_t validate_reps = 100000;
  validate_cmd->add_option("--reps", validate_reps, "Sampled cycles for moment checks");
  validate_cmd->add_option("--seed", o.seed, "Seed for the moment checks");
  add_format(validate_cmd, {"text", "csv", "json"});

  auto* replay_cmd = app.add_subcommand("replay", "Re-run the command recorded in an output file");
  replay_cmd->add_option("file", replay_path, "CSV or JSON output with a manifest")->required();
  replay_cmd->add_option("--out", o.out, "Write data here instead of stdout");
  replay_cmd->add_option("--workers", o.workers, "Worker threads");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream os, es;
    const int code = app.exit(e, os, es);
    out << os.str();
    err << es.str();
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (replay_cmd->parsed()) {
      Options r = options_from_manifest(replay_path);
      r.out = o.out;
      r.workers = o.workers;
      return execute(r, out, err);
    }
    for (auto* sub : app.get_subcommands()) o.command = sub->get_name();
    if (o.command == "validate") o.reps = validate_reps;
    return execute(o, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
}

}  // namespace rrcov::cli
