#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "plap/problem.hpp"

namespace plap::testing {

// Seeded draws for property tests; the seed is printed by failing checks via CAPTURE.
class Draw {
public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

private:
  std::mt19937_64 rng_;
};

inline RadialProfile sampled(std::size_t M, double (*u)(double), double (*du)(double)) {
  RadialProfile p;
  p.r = RadialProfile::uniform_grid(M);
  for (double r : p.r) {
    p.u.push_back(u(r));
    p.du.push_back(du(r));
  }
  return p;
}

}  // namespace plap::testing
