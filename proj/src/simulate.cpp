#include "rrcov/simulate.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <string>

#include "rrcov/asymptotics.hpp"
#include "rrcov/errors.hpp"
#include "rrcov/rng.hpp"

namespace rrcov {

void validate(const SimConfig& cfg) {
  if (cfg.time_grid.empty()) throw ValidationError("time grid is empty");
  for (std::size_t k = 0; k < cfg.time_grid.size(); ++k) {
    const double t = cfg.time_grid[k];
    if (!std::isfinite(t) || t <= 0.0) throw ValidationError("grid times must be positive");
    if (k > 0 && !(t > cfg.time_grid[k - 1])) {
      throw ValidationError("grid times must be strictly increasing");
    }
  }
  if (cfg.replications < 2) throw ValidationError("at least 2 replications are required");
  if (cfg.block_size < 1) throw ValidationError("block size must be positive");
  if (cfg.max_cycles_per_path < 1) throw ValidationError("cycle bound must be positive");
  if (cfg.workers < 0) throw ValidationError("worker count must be nonnegative");
}

int resolve_workers(const SimConfig& cfg) {
  if (cfg.workers > 0) return cfg.workers;
  if (const char* env = std::getenv(kWorkersEnv)) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1, omp_get_max_threads());
}

PathSampler::PathSampler(const ModelSpec& spec, std::span<const double> grid,
                         std::uint64_t max_cycles)
    : spec_(spec),
      grid_(grid),
      max_cycles_(max_cycles),
      delay_(delay_cycle(spec)),
      scratch_(std::max(spec.cycle.components.size(),
                        delay_ ? delay_->components.size() : std::size_t{0})),
      rewards_(spec.dimension()),
      running_(spec.dimension()) {}

std::uint64_t PathSampler::sample(RngStream& rng, std::span<double> out) {
  const std::size_t L = running_.size();
  const std::size_t G = grid_.size();
  std::fill(running_.begin(), running_.end(), 0.0);
  std::size_t g = 0;
  double epoch = 0.0;

  auto close_cycle = [&](double duration) {
    epoch += duration;
    while (g < G && grid_[g] < epoch) {
      std::copy(running_.begin(), running_.end(), out.begin() + g * L);
      ++g;
    }
    for (std::size_t i = 0; i < L; ++i) running_[i] += rewards_[i];
  };

  if (delay_) close_cycle(sample_cycle(*delay_, rng, scratch_, rewards_));

  std::uint64_t cycles = 0;
  while (g < G) {
    if (++cycles > max_cycles_) {
      throw ResourceError("path exceeded " + std::to_string(max_cycles_) +
                              " cycles before t = " + std::to_string(grid_.back()),
                          0);
    }
    close_cycle(sample_cycle(spec_.cycle, rng, scratch_, rewards_));
  }
  return cycles;
}

std::vector<MomentAccumulator> simulate_block(const ModelSpec& spec, const SimConfig& cfg,
                                              std::uint64_t block) {
  const std::size_t L = spec.dimension();
  const std::size_t G = cfg.time_grid.size();

  std::vector<MomentAccumulator> acc(G, MomentAccumulator(L + 1));
  RngStream rng(cfg.master_seed, block);
  PathSampler sampler(spec, cfg.time_grid, cfg.max_cycles_per_path);
  std::vector<double> path(G * L);
  std::vector<double> record(L + 1);

  const std::uint64_t first = block * cfg.block_size;
  const std::uint64_t last = std::min(cfg.replications, first + cfg.block_size);
  for (std::uint64_t rep = first; rep < last; ++rep) {
    try {
      sampler.sample(rng, path);
    } catch (const ResourceError& e) {
      throw ResourceError(std::string(e.what()) + " (seed " + std::to_string(cfg.master_seed) +
                              ", block " + std::to_string(block) + ")",
                          block);
    }
    for (std::size_t g = 0; g < G; ++g) {
      const double* r = path.data() + g * L;
      double lowest = r[0];
      for (std::size_t i = 0; i < L; ++i) {
        record[i] = r[i];
        lowest = std::min(lowest, r[i]);
      }
      record[L] = lowest;
      acc[g].add(record);
    }
  }
  return acc;
}

namespace {

double jackknife_se(const std::vector<double>& leave_out) {
  const double b = static_cast<double>(leave_out.size());
  double mean = 0.0;
  for (double v : leave_out) mean += v;
  mean /= b;
  double ss = 0.0;
  for (double v : leave_out) ss += (v - mean) * (v - mean);
  return std::sqrt((b - 1.0) / b * ss);
}

}  // namespace

SimEstimate finalize(const SimConfig& cfg,
                     const std::vector<std::vector<MomentAccumulator>>& blocks) {
  const std::size_t G = cfg.time_grid.size();
  SimEstimate est;
  est.blocks = blocks.size();
  est.points.resize(G);
  for (std::size_t g = 0; g < G; ++g) {
    MomentAccumulator total;
    for (const auto& block : blocks) total.merge(block[g]);

    const std::size_t L = total.dimension() - 1;
    const double n = static_cast<double>(total.count());
    GridEstimate& p = est.points[g];
    p.t = cfg.time_grid[g];
    p.replications = total.count();
    p.mean.resize(L);
    p.mean_se.resize(L);
    p.covariance = Matrix(L);
    p.covariance_se = Matrix(L);
    for (std::size_t i = 0; i < L; ++i) {
      p.mean[i] = total.mean(i);
      p.mean_se[i] = std::sqrt(total.covariance(i, i) / n);
      for (std::size_t j = 0; j < L; ++j) p.covariance(i, j) = total.covariance(i, j);
    }
    p.min_mean = total.mean(L);
    p.min_se = std::sqrt(total.covariance(L, L) / n);

    if (blocks.size() >= 2) {
      std::vector<MomentAccumulator> rest;
      rest.reserve(blocks.size());
      for (const auto& block : blocks) rest.push_back(total.without(block[g]));
      std::vector<double> leave_out(blocks.size());
      for (std::size_t i = 0; i < L; ++i) {
        for (std::size_t j = i; j < L; ++j) {
          for (std::size_t b = 0; b < blocks.size(); ++b) leave_out[b] = rest[b].covariance(i, j);
          p.covariance_se(i, j) = p.covariance_se(j, i) = jackknife_se(leave_out);
        }
      }
    } else {
      // A single block leaves nothing to jackknife over; fall back to the
      // normal-theory standard error of a sample covariance.
      for (std::size_t i = 0; i < L; ++i) {
        for (std::size_t j = 0; j < L; ++j) {
          const double sij = p.covariance(i, j);
          p.covariance_se(i, j) =
              std::sqrt((p.covariance(i, i) * p.covariance(j, j) + sij * sij) / (n - 1.0));
        }
      }
    }
  }
  return est;
}

SimEstimate simulate(const ModelSpec& spec, const SimConfig& cfg) {
  validate(spec);
  validate(cfg);
  const std::uint64_t n_blocks = (cfg.replications + cfg.block_size - 1) / cfg.block_size;
  std::vector<std::vector<MomentAccumulator>> blocks(n_blocks);
  std::vector<std::exception_ptr> errors(n_blocks);

  const int workers = resolve_workers(cfg);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (std::int64_t b = 0; b < static_cast<std::int64_t>(n_blocks); ++b) {
    try {
      blocks[b] = simulate_block(spec, cfg, static_cast<std::uint64_t>(b));
    } catch (...) {
      errors[b] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return finalize(cfg, blocks);
}

std::vector<CompareRow> compare(const GaussianApprox& approx, const SimEstimate& sim,
                                bool use_b) {
  std::vector<CompareRow> rows;
  rows.reserve(sim.points.size());
  for (const auto& p : sim.points) {
    CompareRow row;
    row.t = p.t;
    row.m_hat = p.min_mean;
    row.m_hat_se = p.min_se;
    row.m_tilde_plain = approx_expected_min(approx, p.t, use_b, false);
    try {
      row.m_tilde_refined = approx_expected_min(approx, p.t, use_b, true);
    } catch (const NotPositiveDefiniteError&) {
      row.m_tilde_refined.reset();
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<CompareRow> compare(const ModelSpec& spec, const SimConfig& cfg, bool use_b) {
  validate(spec);
  if (spec.dimension() != 2) {
    throw Error(ErrorKind::UnsupportedDimension,
                "compare needs exactly 2 reward coordinates, model has " +
                    std::to_string(spec.dimension()));
  }
  const auto approx = GaussianApprox::from_summary(summarize(cycle_moments(spec)));
  return compare(approx, simulate(spec, cfg), use_b);
}

}  // namespace rrcov
