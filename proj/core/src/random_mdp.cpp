#include "daze/random_mdp.hpp"

#include <string>

#include "daze/error.hpp"
#include "daze/rng.hpp"

namespace daze {
namespace {

TabularMdp draw(Rng& rng, std::size_t n, std::size_t m, double gamma) {
  std::vector<double> transition(n * m * n);
  std::vector<double> reward(n * m * n);
  for (std::size_t row = 0; row < n * m; ++row) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      transition[row * n + j] = rng.exponential();
      sum += transition[row * n + j];
    }
    for (std::size_t j = 0; j < n; ++j) transition[row * n + j] /= sum;
  }
  for (double& r : reward) r = rng.uniform();
  return TabularMdp(n, m, std::move(transition), std::move(reward), gamma,
                    std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

}  // namespace

RandomMdpResult random_tabular_with_stats(std::uint64_t seed, std::size_t n_states, std::size_t n_actions,
                                          bool require_assumption1, const RandomMdpOptions& options) {
  if (n_states < 2 || n_actions < 2) throw ArgumentError("random MDPs need at least 2 states and 2 actions");
  if (options.max_attempts < 1) throw ArgumentError("max_attempts must be positive");
  Rng rng = Rng(seed).split("random_tabular");
  for (int attempt = 1; attempt <= options.max_attempts; ++attempt) {
    auto mdp = draw(rng, n_states, n_actions, options.gamma);
    if (!require_assumption1 || satisfies_assumption1(mdp, options.assumption_margin)) {
      return {std::move(mdp), attempt};
    }
  }
  throw GenerationError("no model satisfying the assumption after " + std::to_string(options.max_attempts) +
                            " attempts",
                        options.max_attempts);
}

TabularMdp random_tabular(std::uint64_t seed, std::size_t n_states, std::size_t n_actions,
                          bool require_assumption1, const RandomMdpOptions& options) {
  return random_tabular_with_stats(seed, n_states, n_actions, require_assumption1, options).mdp;
}

}  // namespace daze
