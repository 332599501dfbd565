#pragma once

#include <cstddef>
#include <cstdint>

#include "daze/mdp.hpp"

namespace daze {

struct RandomMdpOptions {
  double gamma = 0.9;
  double assumption_margin = kDefaultAssumptionMargin;
  int max_attempts = 1000;
};

struct RandomMdpResult {
  TabularMdp mdp;
  int attempts = 1;  ///< draws consumed, including the accepted one
};

/// Flat-Dirichlet transition rows, rewards uniform in [0, 1], uniform initial
/// distribution. With `require_assumption1`, redraws until the model passes
/// satisfies_assumption1 and throws GenerationError after max_attempts.
RandomMdpResult random_tabular_with_stats(std::uint64_t seed, std::size_t n_states, std::size_t n_actions,
                                          bool require_assumption1, const RandomMdpOptions& options = {});

TabularMdp random_tabular(std::uint64_t seed, std::size_t n_states, std::size_t n_actions,
                          bool require_assumption1, const RandomMdpOptions& options = {});

}  // namespace daze
