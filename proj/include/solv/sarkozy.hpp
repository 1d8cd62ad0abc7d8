#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "solv/fourier.hpp"
#include "solv/progression.hpp"

namespace solv {

// Characters with |1_A^(xi)|^2 above (1-eps) * density^2; always contains 0.
struct Spectrum {
  double eps = 0.0;
  double threshold = 0.0;
  std::vector<Elem> characters;
};

struct SarkozyAbelianResult {
  int m = 0;
  GroupSet H;
  std::uint64_t min_count = 0;  // min over h in H of representation counts
  Spectrum spectrum;
};

struct SarkozyProgressionResult {
  int m = 0;
  std::int64_t l = 0;
  std::uint64_t min_count = 0;
};

struct SarkozyCosetResult {
  int m = 0;
  std::int64_t l = 0;
  GroupSet Hprime;
  std::uint64_t min_count = 0;
};

// Finite abelian groups: build the spectrum over a fixed eps grid, take the
// orthogonal complement H of the group it generates, certify H inside mA - mA
// by exact counting with the smallest working m. Throws verification_error
// with diagnostics when no (eps, m) pair certifies.
SarkozyAbelianResult sarkozy_abelian(const GroupSet& a, const Rational& delta, int m_max = 6,
                                     const Budget& budget = {});

// Dense subsets of proper progressions: smallest certified (m, l), m-major
// order, with P_l built exactly as floor(N_i / l^2).
SarkozyProgressionResult sarkozy_progression(const GroupSet& a, const Gap& p, const Rational& delta,
                                             int m_max = 5, std::int64_t l_max = 6,
                                             const Budget& budget = {});

// Dense subsets of proper coset progressions: additionally descends the
// subgroup lattice of H, largest H' first at each (m, l).
SarkozyCosetResult sarkozy_coset(const GroupSet& a, const CosetProgression& c,
                                 const Rational& delta, int m_max = 5, std::int64_t l_max = 6,
                                 const Budget& budget = {});

// Certification at a fixed refinement level l: smallest m, then largest H'.
std::optional<SarkozyCosetResult> sarkozy_coset_at(const GroupSet& a, const CosetProgression& c,
                                                   std::int64_t l, int m_max = 5,
                                                   const Budget& budget = {});

// All subgroups of the finite abelian group spanned by the given closed set.
std::vector<GroupSet> all_subgroups(const GroupSet& h);

// Orthogonal complement of the character set sigma inside G.
GroupSet orthogonal_complement(const Group& g, const std::vector<Elem>& sigma);

}  // namespace solv
