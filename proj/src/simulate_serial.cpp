#include "rrcov/simulate.hpp"

namespace rrcov {

SimEstimate simulate_serial(const ModelSpec& spec, const SimConfig& cfg) {
  validate(spec);
  validate(cfg);
  const std::uint64_t n_blocks = (cfg.replications + cfg.block_size - 1) / cfg.block_size;
  std::vector<std::vector<MomentAccumulator>> blocks;
  blocks.reserve(n_blocks);
  for (std::uint64_t b = 0; b < n_blocks; ++b) blocks.push_back(simulate_block(spec, cfg, b));
  return finalize(cfg, blocks);
}

}  // namespace rrcov
