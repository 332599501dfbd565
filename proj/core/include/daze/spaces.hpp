#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "daze/rng.hpp"

namespace daze {

struct DiscreteActionSpace {
  std::size_t n = 0;

  std::size_t sample(Rng& rng) const { return rng.index(n); }
  bool contains(std::size_t a) const { return a < n; }
};

/// Axis-aligned box [low, high]^dim.
struct BoxActionSpace {
  std::size_t dim = 0;
  double low = -1.0;
  double high = 1.0;

  std::vector<double> sample(Rng& rng) const {
    std::vector<double> a(dim);
    for (auto& x : a) x = rng.uniform(low, high);
    return a;
  }
  bool contains(std::span<const double> a) const {
    if (a.size() != dim) return false;
    for (double x : a) {
      if (!(x >= low && x <= high)) return false;
    }
    return true;
  }
};

}  // namespace daze
