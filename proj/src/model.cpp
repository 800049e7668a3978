#include "rrcov/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <tuple>

#include "rrcov/errors.hpp"

namespace rrcov {
namespace {

using Exponents = std::vector<std::uint8_t>;

// Name-independent sort key for a component: its law and the coefficients
// every form attaches to it. Expanding in this order makes moments invariant
// to how components are labelled or listed, down to the last bit.
std::vector<double> component_key(const CycleSpec& cycle, std::size_t k) {
  std::vector<double> key;
  const auto& params = cycle.components[k].distribution.params();
  key.push_back(static_cast<double>(params.index()));
  std::visit([&key](const auto& p) {
    using P = std::decay_t<decltype(p)>;
    if constexpr (std::is_same_v<P, Exponential>) {
      key.insert(key.end(), {p.mean, 0.0});
    } else if constexpr (std::is_same_v<P, Gamma>) {
      key.insert(key.end(), {p.shape, p.scale});
    } else if constexpr (std::is_same_v<P, Uniform>) {
      key.insert(key.end(), {p.lo, p.hi});
    } else {
      key.insert(key.end(), {p.value, 0.0});
    }
  }, params);
  key.push_back(cycle.time.coefficients[k]);
  for (const auto& form : cycle.rewards) key.push_back(form.coefficients[k]);
  return key;
}

std::vector<std::size_t> canonical_order(const CycleSpec& cycle) {
  std::vector<std::vector<double>> keys;
  keys.reserve(cycle.components.size());
  for (std::size_t k = 0; k < cycle.components.size(); ++k) {
    keys.push_back(component_key(cycle, k));
  }
  std::vector<std::size_t> order(cycle.components.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&keys](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  return order;
}

bool almost_surely_constant(const CycleSpec& cycle, const AffineForm& form) {
  for (std::size_t k = 0; k < form.coefficients.size(); ++k) {
    if (form.coefficients[k] != 0.0 && !cycle.components[k].distribution.degenerate()) {
      return false;
    }
  }
  return true;
}

double constant_value(const CycleSpec& cycle, const AffineForm& form) {
  double v = form.constant;
  for (std::size_t k = 0; k < form.coefficients.size(); ++k) {
    if (form.coefficients[k] != 0.0) {
      v += form.coefficients[k] * raw_moment(cycle.components[k].distribution, 1);
    }
  }
  return v;
}

void validate_cycle(const CycleSpec& cycle, const std::string& label,
                    bool allow_zero) {
  const std::size_t n = cycle.components.size();
  auto check_form = [&](const AffineForm& form, const std::string& what) {
    if (form.coefficients.size() != n) {
      throw ValidationError(label + " " + what + ": coefficient count does not match components");
    }
    if (!std::isfinite(form.constant)) {
      throw ValidationError(label + " " + what + ": constant is not finite");
    }
    for (double c : form.coefficients) {
      if (!std::isfinite(c)) throw ValidationError(label + " " + what + ": coefficient is not finite");
    }
  };

  check_form(cycle.time, "time");
  if (cycle.time.constant < 0.0) {
    throw ValidationError(label + " time: constant must be nonnegative");
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double c = cycle.time.coefficients[k];
    if (c < 0.0) {
      throw ValidationError(label + " time: coefficient of '" + cycle.components[k].name +
                            "' is negative");
    }
    if (c > 0.0 && !cycle.components[k].distribution.nonnegative()) {
      throw ValidationError(label + " time: component '" + cycle.components[k].name +
                            "' can take negative values");
    }
  }
  if (!allow_zero && almost_surely_constant(cycle, cycle.time) &&
      constant_value(cycle, cycle.time) == 0.0) {
    throw ValidationError(label + " time is almost surely zero");
  }

  for (std::size_t i = 0; i < cycle.rewards.size(); ++i) {
    const std::string what = "reward " + std::to_string(i + 1);
    check_form(cycle.rewards[i], what);
    if (!allow_zero && almost_surely_constant(cycle, cycle.rewards[i]) &&
        constant_value(cycle, cycle.rewards[i]) == 0.0) {
      throw ValidationError(label + " " + what + " is almost surely zero");
    }
  }
}

}  // namespace

void validate(const ModelSpec& spec) {
  if (spec.cycle.rewards.empty()) {
    throw ValidationError("model needs at least one reward coordinate");
  }
  if (spec.reward_names.size() != spec.cycle.rewards.size()) {
    throw ValidationError("reward name count does not match reward count");
  }
  validate_cycle(spec.cycle, "cycle", false);
  if (spec.delay_mode == DelayMode::Custom) {
    if (!spec.delay) throw ValidationError("custom delay requires a delay cycle");
    if (spec.delay->rewards.size() != spec.cycle.rewards.size()) {
      throw ValidationError("delay cycle must have the same number of rewards as the cycle");
    }
    validate_cycle(*spec.delay, "delay", true);
  } else if (spec.delay) {
    throw ValidationError("delay cycle given but delay mode is not custom");
  }
}

double joint_moment(const CycleSpec& cycle, int time_power,
                    std::span<const int> reward_powers) {
  if (reward_powers.size() != cycle.rewards.size()) {
    throw ValidationError("joint_moment: one power per reward coordinate is required");
  }
  int total = time_power;
  if (time_power < 0) throw ValidationError("joint_moment: negative power");
  for (int p : reward_powers) {
    if (p < 0) throw ValidationError("joint_moment: negative power");
    total += p;
  }
  if (total > kMaxJointOrder) {
    throw Error(ErrorKind::UnsupportedOrder,
                "joint moment of total order " + std::to_string(total) +
                    " exceeds " + std::to_string(kMaxJointOrder));
  }

  const auto order = canonical_order(cycle);
  const std::size_t n = order.size();

  std::vector<const AffineForm*> factors;
  for (int r = 0; r < time_power; ++r) factors.push_back(&cycle.time);
  for (std::size_t c = 0; c < reward_powers.size(); ++c) {
    for (int r = 0; r < reward_powers[c]; ++r) factors.push_back(&cycle.rewards[c]);
  }

  // Multinomial expansion: monomial exponents (in canonical order) -> coefficient.
  std::map<Exponents, double> poly{{Exponents(n, 0), 1.0}};
  for (const AffineForm* form : factors) {
    std::map<Exponents, double> next;
    for (const auto& [exps, coef] : poly) {
      if (form->constant != 0.0) next[exps] += coef * form->constant;
      for (std::size_t slot = 0; slot < n; ++slot) {
        const double c = form->coefficients[order[slot]];
        if (c == 0.0) continue;
        Exponents e = exps;
        ++e[slot];
        next[e] += coef * c;
      }
    }
    poly = std::move(next);
  }

  double result = 0.0;
  for (const auto& [exps, coef] : poly) {
    double term = coef;
    for (std::size_t slot = 0; slot < n; ++slot) {
      if (exps[slot] != 0) {
        term *= raw_moment(cycle.components[order[slot]].distribution, exps[slot]);
      }
    }
    result += term;
  }
  return result;
}

namespace {

void check_consistency(bool ok, const std::string& what) {
  if (!ok) {
    throw Error(ErrorKind::InternalConsistency, "cycle moments violate " + what);
  }
}

// Slack for inequalities that hold with equality in degenerate cases.
bool le_tol(double lhs, double rhs) {
  return lhs <= rhs + 1e-9 * std::max({1.0, std::abs(lhs), std::abs(rhs)});
}

}  // namespace

CycleMoments cycle_moments(const ModelSpec& spec) {
  const std::size_t L = spec.dimension();
  CycleMoments m;
  m.dim = L;

  std::vector<int> pw(L, 0);
  auto jm = [&](const CycleSpec& cyc, int tp) { return joint_moment(cyc, tp, pw); };

  m.mu1 = jm(spec.cycle, 1);
  m.mu2 = jm(spec.cycle, 2);
  m.mu3 = jm(spec.cycle, 3);

  m.lambda1.resize(L);
  m.lambda2.resize(L);
  m.m11.resize(L);
  m.m21.resize(L);
  m.m12.resize(L);
  m.p011 = Matrix(L);
  m.p111 = Matrix(L);
  for (std::size_t i = 0; i < L; ++i) {
    pw[i] = 1;
    m.lambda1[i] = jm(spec.cycle, 0);
    m.m11[i] = jm(spec.cycle, 1);
    m.m21[i] = jm(spec.cycle, 2);
    pw[i] = 2;
    m.lambda2[i] = jm(spec.cycle, 0);
    m.m12[i] = jm(spec.cycle, 1);
    pw[i] = 0;
    for (std::size_t j = i; j < L; ++j) {
      ++pw[i];
      ++pw[j];
      m.p011(i, j) = m.p011(j, i) = jm(spec.cycle, 0);
      m.p111(i, j) = m.p111(j, i) = jm(spec.cycle, 1);
      --pw[i];
      --pw[j];
    }
  }

  m.delay_x.assign(L, 0.0);
  m.delay_tx.assign(L, 0.0);
  m.delay_xx = Matrix(L);
  if (const CycleSpec* d = delay_cycle(spec)) {
    m.delay_t = jm(*d, 1);
    m.delay_t2 = jm(*d, 2);
    for (std::size_t i = 0; i < L; ++i) {
      pw[i] = 1;
      m.delay_x[i] = jm(*d, 0);
      m.delay_tx[i] = jm(*d, 1);
      pw[i] = 0;
      for (std::size_t j = i; j < L; ++j) {
        ++pw[i];
        ++pw[j];
        m.delay_xx(i, j) = m.delay_xx(j, i) = jm(*d, 0);
        --pw[i];
        --pw[j];
      }
    }
  }

  check_consistency(m.mu1 > 0.0, "mu1 > 0");
  check_consistency(le_tol(m.mu1 * m.mu1, m.mu2), "mu2 >= mu1^2");
  check_consistency(std::isfinite(m.mu3), "finite mu3");
  check_consistency(m.delay_t >= 0.0 && le_tol(m.delay_t * m.delay_t, m.delay_t2),
                    "E T0^2 >= (E T0)^2 >= 0");
  for (std::size_t i = 0; i < L; ++i) {
    check_consistency(le_tol(m.m11[i] * m.m11[i], m.mu2 * m.lambda2[i]),
                      "Cauchy-Schwarz for E T X");
    for (std::size_t j = 0; j < L; ++j) {
      check_consistency(le_tol(m.p011(i, j) * m.p011(i, j), m.lambda2[i] * m.lambda2[j]),
                        "Cauchy-Schwarz for E X_i X_j");
    }
  }
  return m;
}

double sample_cycle(const CycleSpec& cycle, RngStream& rng,
                    std::span<double> component_scratch,
                    std::span<double> rewards_out) {
  const std::size_t n = cycle.components.size();
  for (std::size_t k = 0; k < n; ++k) {
    component_scratch[k] = sample(cycle.components[k].distribution, rng);
  }
  auto eval = [&](const AffineForm& form) {
    double v = form.constant;
    for (std::size_t k = 0; k < n; ++k) v += form.coefficients[k] * component_scratch[k];
    return v;
  };
  for (std::size_t i = 0; i < cycle.rewards.size(); ++i) {
    rewards_out[i] = eval(cycle.rewards[i]);
  }
  return eval(cycle.time);
}

CycleDraw sample_cycle(const CycleSpec& cycle, RngStream& rng) {
  std::vector<double> scratch(cycle.components.size());
  CycleDraw draw{0.0, std::vector<double>(cycle.dimension())};
  draw.time = sample_cycle(cycle, rng, scratch, draw.rewards);
  return draw;
}

const CycleSpec* delay_cycle(const ModelSpec& spec) noexcept {
  switch (spec.delay_mode) {
    case DelayMode::Ordinary:
      return nullptr;
    case DelayMode::SameAsCycle:
      return &spec.cycle;
    case DelayMode::Custom:
      return spec.delay ? &*spec.delay : nullptr;
  }
  return nullptr;
}

}  // namespace rrcov
