#include "rrcov/distributions.hpp"

#include <cmath>
#include <string>

#include "rrcov/errors.hpp"

namespace rrcov {
namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

// Marsaglia-Tsang; exact rejection sampler for shape >= 1, boosted below 1.
double sample_gamma(double shape, double scale, RngStream& rng) {
  if (shape < 1.0) {
    const double u = rng.uniform_open();
    return sample_gamma(shape + 1.0, scale, rng) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_open();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v * scale;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v * scale;
  }
}

}  // namespace

Primitive Primitive::exponential(double mean) {
  require(std::isfinite(mean) && mean > 0.0, "exponential mean must be positive");
  return Primitive(Exponential{mean});
}

Primitive Primitive::gamma(double shape, double scale) {
  require(std::isfinite(shape) && shape > 0.0, "gamma shape must be positive");
  require(std::isfinite(scale) && scale > 0.0, "gamma scale must be positive");
  return Primitive(Gamma{shape, scale});
}

Primitive Primitive::uniform(double lo, double hi) {
  require(std::isfinite(lo) && std::isfinite(hi) && hi > lo,
          "uniform bounds must satisfy lo < hi");
  return Primitive(Uniform{lo, hi});
}

Primitive Primitive::deterministic(double value) {
  require(std::isfinite(value), "deterministic value must be finite");
  return Primitive(Deterministic{value});
}

std::string Primitive::kind_name() const {
  return std::visit(Overloaded{
                        [](const Exponential&) { return "exponential"; },
                        [](const Gamma&) { return "gamma"; },
                        [](const Uniform&) { return "uniform"; },
                        [](const Deterministic&) { return "deterministic"; },
                    },
                    params_);
}

bool Primitive::nonnegative() const noexcept {
  return std::visit(Overloaded{
                        [](const Exponential&) { return true; },
                        [](const Gamma&) { return true; },
                        [](const Uniform& u) { return u.lo >= 0.0; },
                        [](const Deterministic& d) { return d.value >= 0.0; },
                    },
                    params_);
}

bool Primitive::degenerate() const noexcept {
  return std::holds_alternative<Deterministic>(params_);
}

double raw_moment(const Primitive& p, int k) {
  if (k < 0 || k > kMaxMomentOrder) {
    throw Error(ErrorKind::UnsupportedOrder,
                "raw moment order " + std::to_string(k) + " outside [0, " +
                    std::to_string(kMaxMomentOrder) + "]");
  }
  return std::visit(
      Overloaded{
          [k](const Exponential& e) {
            double m = 1.0;
            for (int i = 1; i <= k; ++i) m *= i * e.mean;
            return m;
          },
          [k](const Gamma& g) {
            double m = 1.0;
            for (int i = 0; i < k; ++i) m *= (g.shape + i) * g.scale;
            return m;
          },
          [k](const Uniform& u) {
            // (hi^{k+1} - lo^{k+1}) / ((k+1)(hi-lo)) without the subtraction.
            double sum = 0.0;
            for (int j = 0; j <= k; ++j) {
              sum += std::pow(u.lo, j) * std::pow(u.hi, k - j);
            }
            return sum / (k + 1);
          },
          [k](const Deterministic& d) { return std::pow(d.value, k); },
      },
      p.params());
}

double sample(const Primitive& p, RngStream& rng) {
  return std::visit(
      Overloaded{
          [&rng](const Exponential& e) { return -e.mean * std::log(rng.uniform_open()); },
          [&rng](const Gamma& g) { return sample_gamma(g.shape, g.scale, rng); },
          [&rng](const Uniform& u) { return u.lo + (u.hi - u.lo) * rng.uniform_open(); },
          [](const Deterministic& d) { return d.value; },
      },
      p.params());
}

}  // namespace rrcov
