// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "commands.hpp"
#include "rrcov/asymptotics.hpp"
#include "rrcov/gaussian.hpp"
#include "rrcov/model_file.hpp"
#include "rrcov/simulate.hpp"
#include "test_support.hpp"

using namespace rrcov;
namespace fs = std::filesystem;

namespace {

const fs::path kModels = fs::path(RRCOV_DOCS_DIR) / "models";

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool rel_close(double x, double target, double tol) {
  return std::abs(x - target) <= tol * std::max(1.0, std::abs(target));
}

std::map<std::string, double> analyze_shared_exponential() {
  std::ostringstream out, err;
  const int code = cli::run({"analyze", "--model", (kModels / "shared_exponential.yaml").string(),
                             "--format", "csv"},
                            out, err);
  if (code != cli::kOk) throw std::runtime_error("analyze failed: " + err.str());
  std::map<std::string, double> v;
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  while (line.starts_with("#")) std::getline(in, line);  // header row
  while (std::getline(in, line)) {
    const auto cut = line.rfind(',');
    const std::string value = line.substr(cut + 1);
    v[line.substr(0, cut)] = value == "always-pd" || value == "undefined" ? NAN : std::stod(value);
  }
  return v;
}

SimConfig config(std::vector<double> grid, std::uint64_t reps, std::uint64_t seed) {
  SimConfig cfg;
  cfg.time_grid = std::move(grid);
  cfg.replications = reps;
  cfg.master_seed = seed;
  return cfg;
}

Outcome matrix_criterion(const char* name, const double expected[2][2]) {
  const auto v = analyze_shared_exponential();
  const char* labels[2] = {"X", "Y"};
  double worst = 0;
  bool pass = true;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double got = v.at(fmt("%s,%s,%s", name, labels[i], labels[j]));
      worst = std::max(worst, std::abs(got - expected[i][j]) / std::abs(expected[i][j]));
      pass = pass && rel_close(got, expected[i][j], 1e-12);
    }
  }
  return {pass, fmt("max relative deviation %.3g", worst)};
}

Outcome criterion_1() {
  const double C[2][2] = {{1.0, 3.0 / 8.0}, {3.0 / 8.0, 7.0 / 16.0}};
  return matrix_criterion("C", C);
}

Outcome criterion_2() {
  const double D[2][2] = {{0.5, 0.5}, {0.5, 13.0 / 64.0}};
  return matrix_criterion("D", D);
}

Outcome criterion_3() {
  const auto s = summarize(cycle_moments(load_model(kModels / "shared_exponential.yaml")));
  const auto th = pd_threshold(s.C, s.D);
  const double expected = (std::sqrt(731.0) - 3.0) / 38.0;
  return {!th.always_pd && std::abs(th.t0 - expected) <= 1e-8,
          fmt("bisection t0 = %.10f, (sqrt(731)-3)/38 = %.10f", th.t0, expected)};
}

// Growth rate and mean offset of Y from cycle moments estimated on 10^7
// cycles drawn with <random>, in 100 batches.
Outcome criterion_4() {
  const auto v = analyze_shared_exponential();
  bool pass = v.at("a,X,") == 1.0 && v.at("b,X,") == -1.0;
  pass = pass && rel_close(v.at("a,Y,"), 0.75, 1e-12) && rel_close(v.at("b,Y,"), -0.875, 1e-12);

  std::mt19937_64 gen(20240601);
  std::exponential_distribution<double> unit(1.0), half(2.0);
  const int batches = 100, per_batch = 100'000;
  double sa = 0, sa2 = 0, sb = 0, sb2 = 0;
  for (int k = 0; k < batches; ++k) {
    double t1 = 0, t2 = 0, y1 = 0, ty = 0;
    for (int n = 0; n < per_batch; ++n) {
      const double u1 = unit(gen), u3 = half(gen), u4 = unit(gen);
      const double t = u1 + u4, y = u3 + u4;
      t1 += t;
      t2 += t * t;
      y1 += y;
      ty += t * y;
    }
    const double mu1 = t1 / per_batch, mu2 = t2 / per_batch;
    const double a = (y1 / per_batch) / mu1;
    // Same-as-cycle delay: E X0 - a E T0 vanishes, so b equals the ordinary offset.
    const double b = a * mu2 / (2 * mu1) - (ty / per_batch) / mu1;
    sa += a;
    sa2 += a * a;
    sb += b;
    sb2 += b * b;
  }
  const double a_hat = sa / batches, b_hat = sb / batches;
  const double a_se = std::sqrt((sa2 / batches - a_hat * a_hat) / (batches - 1));
  const double b_se = std::sqrt((sb2 / batches - b_hat * b_hat) / (batches - 1));
  pass = pass && std::abs(a_hat - 0.75) <= 4 * a_se && std::abs(b_hat + 0.875) <= 4 * b_se;

  // Consistency with C: c_yy = Var(Y - a2 T)/mu1 and c_xy hold only for a2 = 3/4.
  const auto m = load_model(kModels / "shared_exponential.yaml");
  const auto mom = cycle_moments(m);
  const double a2 = 0.75;
  const double cyy = (mom.lambda2[1] - 2 * a2 * mom.m11[1] + a2 * a2 * mom.mu2) / mom.mu1;
  pass = pass && rel_close(cyy, 7.0 / 16.0, 1e-12) && rel_close(v.at("C,Y,Y"), cyy, 1e-12);

  return {pass, fmt("a = [%g, %g], b = [%g, %g]; oracle a2 = %.5f +- %.5f, b2 = %.5f +- %.5f",
                    v.at("a,X,"), v.at("a,Y,"), v.at("b,X,"), v.at("b,Y,"), a_hat, a_se, b_hat,
                    b_se)};
}

Outcome criterion_5() {
  std::mt19937_64 gen(5);
  double worst = 0;
  int pairs = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = testing::random_model(gen, 1 + trial % 3);
    const auto mom = cycle_moments(m);
    for (std::size_t i = 0; i < m.dimension(); ++i) {
      for (std::size_t j = 0; j < m.dimension(); ++j) {
        const auto f = cov_rate_forms(mom, i, j);
        worst = std::max(worst, std::abs(f.covariance_form - f.identity_form) /
                                    std::max(1.0, std::abs(f.covariance_form)));
        ++pairs;
      }
    }
  }
  return {worst <= 1e-10, fmt("200 models, %d pairs, max relative gap %.3g", pairs, worst)};
}

Outcome criterion_6() {
  const auto poisson = load_model(kModels / "poisson_unit.yaml");
  const auto s = summarize(cycle_moments(poisson));
  bool pass = std::abs(s.b[0]) <= 1e-12 && rel_close(s.C(0, 0), 1.0, 1e-12) &&
              std::abs(s.D(0, 0)) <= 1e-12;
  std::string detail = fmt("b = %g, C = %g, D = %g", s.b[0], s.C(0, 0), s.D(0, 0));

  const auto est = simulate(poisson, config({5.0, 20.0}, 1'000'000, 6));
  for (const auto& p : est.points) {
    const double zm = (p.mean[0] - p.t) / p.mean_se[0];
    const double zv = (p.covariance(0, 0) - p.t) / p.covariance_se(0, 0);
    pass = pass && std::abs(zm) <= 4 && std::abs(zv) <= 4;
    detail += fmt("; t=%g mean z=%.2f var z=%.2f", p.t, zm, zv);
  }

  const auto cp = load_model(kModels / "compound_poisson.yaml");
  const auto mom = cycle_moments(cp);
  const auto cp_est = simulate(cp, config({5.0, 20.0}, 1'000'000, 7));
  for (const auto& p : cp_est.points) {
    const double target = p.t * mom.lambda2[0] / mom.mu1;
    const double z = (p.covariance(0, 0) - target) / p.covariance_se(0, 0);
    pass = pass && std::abs(z) <= 4;
    detail += fmt("; compound t=%g var z=%.2f", p.t, z);
  }
  return {pass, detail};
}

Outcome criterion_7() {
  const auto m = load_model(kModels / "shared_exponential.yaml");
  const auto s = summarize(cycle_moments(m));
  const auto est = simulate(m, config({10.0, 20.0, 40.0}, 1'000'000, 8));
  bool pass = true;
  std::string detail;
  for (const auto& p : est.points) {
    const double target = s.C(0, 1) * p.t + s.D(0, 1);
    const double z = (p.covariance(0, 1) - target) / p.covariance_se(0, 1);
    pass = pass && std::abs(z) <= 4;
    detail += fmt("%st=%g cov %.4f vs %.4f (z=%.2f)", detail.empty() ? "" : "; ", p.t,
                  p.covariance(0, 1), target, z);
  }
  return {pass, detail};
}

Outcome criterion_8() {
  const auto m = load_model(kModels / "shared_exponential.yaml");
  const auto rows = compare(m, config({1, 2, 4, 8, 16, 32}, 1'000'000, 1), true);
  const auto s = summarize(cycle_moments(m));
  const double t0 = pd_threshold(s.C, s.D).t0;

  // Both curves: every |error| at t >= 8 below every |error| at t <= 2.
  bool shrink = true;
  for (const auto& late : rows) {
    if (late.t < 8) continue;
    for (const auto& early : rows) {
      if (early.t > 2) continue;
      shrink = shrink && std::abs(late.error_plain()) < std::abs(early.error_plain());
      shrink = shrink && late.error_refined() && early.error_refined() &&
               std::abs(*late.error_refined()) < std::abs(*early.error_refined());
    }
  }
  // A point is won when the 2-SE bands around the two |errors| do not overlap.
  int eligible = 0, refined_wins = 0, plain_wins = 0, ties = 0;
  std::string detail;
  for (const auto& r : rows) {
    if (r.t <= t0 || !r.error_refined()) continue;
    ++eligible;
    const double plain = std::abs(r.error_plain()), refined = std::abs(*r.error_refined());
    const double band = 2 * r.m_hat_se;
    if (refined + band < plain - band) {
      ++refined_wins;
    } else if (plain + band < refined - band) {
      ++plain_wins;
    } else {
      ++ties;
    }
    detail += fmt("t=%g %.4f/%.4f; ", r.t, r.error_plain(), *r.error_refined());
  }
  detail += fmt("D better at %d of %d (ties %d, worse %d), shrinking %s", refined_wins, eligible,
                ties, plain_wins, shrink ? "yes" : "no");
  return {shrink && refined_wins >= 4, detail};
}

Outcome criterion_9() {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> mean(-3, 3), var(0.05, 4), rho(-0.99, 0.99);
  std::normal_distribution<double> z;
  double worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const double mw = mean(gen), mv = mean(gen), vw = var(gen), vv = var(gen);
    const double cov = rho(gen) * std::sqrt(vw * vv);
    const double sw = std::sqrt(vw), l21 = cov / sw, l22 = std::sqrt(vv - l21 * l21);
    double s = 0, s2 = 0;
    const int n = 1'000'000;
    for (int k = 0; k < n; ++k) {
      const double z1 = z(gen), z2 = z(gen);
      const double v = std::min(mw + sw * z1, mv + l21 * z1 + l22 * z2);
      s += v;
      s2 += v * v;
    }
    const double mc = s / n, se = std::sqrt((s2 / n - mc * mc) / n);
    worst = std::max(worst, std::abs(expected_min_bivariate(mw, mv, vw, vv, cov) - mc) / se);
  }
  const double standard = expected_min_bivariate(0, 0, 1, 1, 0);
  const double exact = -1.0 / std::sqrt(std::numbers::pi);
  return {worst <= 4 && std::abs(standard - exact) <= 1e-9,
          fmt("max |z| over 20 sets %.2f; standard pair %.12f vs %.12f", worst, standard, exact)};
}

Outcome criterion_10() {
  std::mt19937_64 gen(10);
  double worst = 0;
  bool ordinary_exact = true;
  for (int trial = 0; trial < 100; ++trial) {
    auto m = testing::random_model(gen, 1 + trial % 3);
    const auto mom = cycle_moments(m);
    for (std::size_t i = 0; i < m.dimension(); ++i) {
      const double a = growth_rate(mom, i), b = mean_correction_ordinary(mom, i);
      const double diagonal =
          b * b + pair_correction_ordinary_diagonal(mom, i) + 4 * a * ell(mom, i);
      worst = std::max(worst, std::abs(cov_correction_ordinary(mom, i, i) - diagonal) /
                                  std::max(1.0, std::abs(diagonal)));
      worst = std::max(worst, std::abs(cov_correction(mom, i, i) - variance_correction(mom, i)) /
                                  std::max(1.0, std::abs(variance_correction(mom, i))));
    }
    m.delay_mode = DelayMode::Ordinary;
    m.delay.reset();
    const auto s = summarize(cycle_moments(m));
    ordinary_exact = ordinary_exact && s.D == s.D_ordinary;
  }
  return {worst <= 1e-12 && ordinary_exact,
          fmt("max relative gap %.3g; ordinary D == D_ordinary %s", worst,
              ordinary_exact ? "bit-exact" : "NO")};
}

Outcome criterion_11() {
  const auto dir = fs::temp_directory_path() / "rrcov_acceptance";
  fs::create_directories(dir);
  std::string reference;
  bool pass = true;
  for (const char* w : {"1", "2", "8"}) {
    const auto path = (dir / (std::string("w") + w + ".csv")).string();
    std::ostringstream out, err;
    const int code = cli::run({"simulate", "--model", (kModels / "shared_exponential.yaml").string(),
                               "--grid", "1,2,4,8", "--reps", "100000", "--seed", "11",
                               "--workers", w, "--out", path},
                              out, err);
    std::ifstream in(path, std::ios::binary);
    const std::string bytes{std::istreambuf_iterator<char>(in), {}};
    if (reference.empty()) reference = bytes;
    pass = pass && code == cli::kOk && !bytes.empty() && bytes == reference;
  }
  return {pass, fmt("CSV of %zu bytes for workers 1, 2, 8", reference.size())};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"covariance rate matrix C", criterion_1},
      {"correction matrix D", criterion_2},
      {"positive-definite threshold t0", criterion_3},
      {"mean curve constants a, b", criterion_4},
      {"two-form identity for c", criterion_5},
      {"exact Poisson and compound-Poisson oracles", criterion_6},
      {"covariance law Cov(R_x, R_y) = c t + d", criterion_7},
      {"expected-minimum error curves", criterion_8},
      {"bivariate normal expected minimum", criterion_9},
      {"diagonal reduction and ordinary D", criterion_10},
      {"determinism across worker counts", criterion_11},
  };
  int failures = 0, index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s [%2d] %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", index, name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  std::printf("%d of %d criteria passed\n", index - failures, index);
  return failures == 0 ? 0 : 1;
}
