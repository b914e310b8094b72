#pragma once

// Exact sampling of inverted max-stable pairs in unit exponential margins by
// conditional inversion of the max-stable law, plus a seeded replication
// harness.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "invms/exponent.hpp"
#include "invms/ims.hpp"
#include "invms/numerics.hpp"

namespace invms {

struct SampleSet {
  std::vector<Pair> pairs;
  ExponentFamily family;
  std::uint64_t seed = 0;
  std::uint64_t stream_index = 0;

  std::size_t n() const { return pairs.size(); }
  std::vector<double> xs() const;
  std::vector<double> ys() const;
};

/// Pr(Y_F <= y | X_F = x) = -V_1(x, y) x^2 exp{-V(x, y) + 1/x} in unit
/// Frechet margins. On a Marshall-Olkin atom ray the right limit is returned.
double conditional_cdf_maxstable(const ExponentFamily& fam, double y, double given_xf);

/// n draws: X_F by inversion, Y_F | X_F by root finding in log y, then
/// (X, Y) = (1 / X_F, 1 / Y_F). Consumes two uniforms per pair from `stream`.
/// NumericError (with the offending draw) if a root cannot be bracketed.
SampleSet sample(const ExponentFamily& fam, std::size_t n, RandomStream& stream);

/// Independent sample sets on streams 0..reps-1 of base_seed. Each replicate
/// depends only on (family, n, base_seed, its index).
std::vector<SampleSet> replicate(const ExponentFamily& fam, std::size_t n, std::size_t reps,
                                 std::uint64_t base_seed);

/// CSV with header `x,y` and 15 significant digits.
std::string to_csv(const std::vector<Pair>& pairs);
/// Parses CSV with a header naming columns x and y (any order, extra columns
/// ignored). DataError on malformed input.
std::vector<Pair> pairs_from_csv(const std::string& text);

}  // namespace invms
