#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "solv/bitgraph.hpp"
#include "solv/groupset.hpp"

namespace solv {

// D = { d in A A^-1 : #representations d = a1 a2^-1  >=  c |A| }, exact counts.
GroupSet popular_quotients(const GroupSet& a, const Rational& c, const Budget& budget = {});

struct TupleCheck {
  int k = 0;
  // good / total tuples whose alternating product stays in A A^-1.
  unsigned long long good = 0;
  long double total = 0.0L;
  bool exact = true;    // exact distribution count vs sampled estimate
  double fraction = 0;  // good/total (or the sample fraction)
  double confidence_low = 0;  // 99% lower bound when sampled
  bool pass = false;
};

struct BsgReport {
  GroupSet a_prime;
  std::vector<TupleCheck> checks;
  Rational ratio{0, 1};  // |A'| / |A|
  int cells_tried = 0;
  bool partition_target_met = false;
  double irregular_fraction = 0.0;
  std::vector<std::string> notes;
};

// Balog-Szemeredi refinement: popular quotients, the two quotient-incidence
// graphs, a regularity partition, cell selection, and an unconditional tuple
// verification of the selected cell for every k <= k0.
BsgReport bsg_refine(const GroupSet& a, const Rational& k_bound, int k0, const Rational& eps,
                     std::uint64_t seed, const Budget& budget = {});

struct BsgSymReport {
  GroupSet d;
  BsgReport refine;
  std::vector<TupleCheck> checks;  // over the centred set D, k <= k0
  int attempts = 0;
  bool mark_spread_ok = false;     // sum mu(d)^2 = O(|A'|)
  bool mark_tuples_ok = false;     // few bad index tuples
  std::uint64_t spread_value = 0;
  bool pass = false;
};

// Randomized symmetrization on top of bsg_refine; retries until the two
// acceptance marks hold and the centred output set verifies, up to
// max_retries.
BsgSymReport bsg_symmetrize(const GroupSet& a, const Rational& k_bound, int k0,
                            const Rational& eps, std::uint64_t seed, int max_retries = 16,
                            const Budget& budget = {});

// Exact count of tuples (x_1..x_m) from `base` (as a set) whose product
// x_1 * f(x_2) * ... lands in `target`, where signs alternate when
// `alternating` (x1 x2^-1 x3 x4^-1 ...). Distribution convolution, exact.
unsigned long long count_product_tuples(const GroupSet& base, int m, bool alternating,
                                        const GroupSet& target, const Budget& budget = {});

}  // namespace solv
