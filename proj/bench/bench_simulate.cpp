// Wall-clock comparison of the serial reference and the OpenMP simulator.
//   bench_simulate [replications] [workers]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "rrcov/model.hpp"
#include "rrcov/simulate.hpp"

using namespace rrcov;

namespace {

ModelSpec shared_exponential() {
  auto unit_form = [](double c0, std::vector<double> c) { return AffineForm{c0, std::move(c)}; };
  ModelSpec m;
  m.cycle.components = {{"U1", Primitive::exponential(1.0)},
                        {"U2", Primitive::exponential(1.0)},
                        {"U3", Primitive::exponential(0.5)},
                        {"U4", Primitive::exponential(1.0)}};
  m.cycle.time = unit_form(0, {1, 0, 0, 1});
  m.cycle.rewards = {unit_form(0, {0, 1, 0, 1}), unit_form(0, {0, 0, 1, 1})};
  m.reward_names = {"X", "Y"};
  m.delay_mode = DelayMode::SameAsCycle;
  return m;
}

template <class F>
double seconds(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool identical(const SimEstimate& a, const SimEstimate& b) {
  for (std::size_t g = 0; g < a.points.size(); ++g) {
    if (a.points[g].mean != b.points[g].mean || a.points[g].min_mean != b.points[g].min_mean ||
        !(a.points[g].covariance == b.points[g].covariance))
      return false;
  }
  return a.points.size() == b.points.size();
}

}  // namespace

int main(int argc, char** argv) {
  SimConfig cfg;
  cfg.time_grid = {1, 2, 4, 8, 16, 32};
  cfg.replications = argc > 1 ? std::stoull(argv[1]) : 200'000;
  cfg.workers = argc > 2 ? std::atoi(argv[2]) : 0;
  const auto model = shared_exponential();

  SimEstimate serial, parallel;
  const double ts = seconds([&] { serial = simulate_serial(model, cfg); });
  const double tp = seconds([&] { parallel = simulate(model, cfg); });
  const double paths = static_cast<double>(cfg.replications);
  std::printf("replications=%llu blocks=%llu workers=%d\n",
              static_cast<unsigned long long>(cfg.replications),
              static_cast<unsigned long long>(serial.blocks), resolve_workers(cfg));
  std::printf("serial    %8.3f s  %10.0f paths/s\n", ts, paths / ts);
  std::printf("openmp    %8.3f s  %10.0f paths/s  speedup %.2fx\n", tp, paths / tp, ts / tp);
  std::printf("results   %s\n", identical(serial, parallel) ? "identical" : "DIFFER");
  return identical(serial, parallel) ? 0 : 1;
}
