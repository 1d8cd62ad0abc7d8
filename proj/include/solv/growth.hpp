#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "solv/groupset.hpp"

namespace solv {

// Exact Cayley ball of radius r for the symmetric closure of S.
GroupSet ball(const GroupSet& s, int r, const Budget& budget = {});

enum class GrowthClass { polynomial_like, exponential_like, saturated, inconclusive };

struct GrowthProfile {
  std::vector<std::size_t> sizes;  // sizes[r] = |B(r)|, r = 0..r_max
  std::vector<double> ratios;      // sizes[r+1] / sizes[r]
  double degree_estimate = 0.0;    // trailing log-log slope
  double ratio_estimate = 0.0;     // trailing geometric ratio
  GrowthClass classification = GrowthClass::inconclusive;
  bool partial = false;  // budget ran out; prefix returned
};

// Classification thresholds (documented here, reported with the raw data):
// saturated when the ball stops growing; exponential-like when the trailing
// successive ratios stay >= 1.15; polynomial-like when the local slope moves
// by < 0.25 across the last three doublings of r.
GrowthProfile growth_profile(const GroupSet& s, int r_max, const Budget& budget = {});

struct ScaleReport {
  std::int64_t r0 = 0;
  Rational doubling{0, 1};
  std::vector<std::pair<std::int64_t, Rational>> scanned;
};

// Scans integer radii in [ceil(R^0.8), floor(R^0.9)] and returns the radius
// with the smallest |B(2r)| / |B(r)|.
ScaleReport small_doubling_scale(const GroupSet& s, std::int64_t big_r, const Budget& budget = {});

struct CoveringReport {
  GroupSet x_prime;
  int n = 1;
  int r1 = -1;
  int xr1_exponent = -1;
  bool disjoint_verified = false;
  bool stabilization_verified = false;
  bool xr1_verified = false;
  std::vector<std::string> trace;
};

// The covering-and-stabilization loop: cover B_S(r0) by translates of
// A^{+-n}, merge translates whose 10n-fattenings overlap (bumping n), find
// the stabilization radius r1 of the incidence sets, and verify
// S * X'_{r1} inside X'_{r1} * A^{+-m} with the smallest m found.
CoveringReport covering_iteration(const GroupSet& s, const GroupSet& a_candidate, int r0,
                                  int n_cap = 64, int exponent_cap = 64,
                                  const Budget& budget = {});

}  // namespace solv
