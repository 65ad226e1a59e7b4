#pragma once

#include <cstdint>
#include <vector>

#include "odeig/rng.hpp"

namespace odeig::testing {

struct SuiteInstance {
  int m = 3;
  int n = 2;
  int r = 1;
  std::uint64_t seed = 0;
};

// The shared acceptance suite: all (m, n, r) combinations with m in 3..6,
// n in 2..6, r in 1..n (80 total), shuffled with a fixed seed and cut to 50
// so the mix is arbitrary but stable. Instance seeds are positional.
inline std::vector<SuiteInstance> acceptance_suite() {
  std::vector<SuiteInstance> all;
  for (int m = 3; m <= 6; ++m)
    for (int n = 2; n <= 6; ++n)
      for (int r = 1; r <= n; ++r) all.push_back({m, n, r, 0});

  Rng rng(42);
  for (std::size_t i = all.size(); i > 1; --i)
    std::swap(all[i - 1], all[rng.uniform_int(i)]);
  all.resize(50);
  for (std::size_t i = 0; i < all.size(); ++i) all[i].seed = 1000 + i;
  return all;
}

} // namespace odeig::testing
