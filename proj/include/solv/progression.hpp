#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "solv/groupset.hpp"

namespace solv {

// Symmetric generalised arithmetic progression { sum n_i v_i : |n_i| <= N_i }.
struct Gap {
  Group ambient;
  std::vector<Elem> generators;
  std::vector<std::int64_t> dims;

  int rank() const { return static_cast<int>(generators.size()); }
  void check() const;
  GroupSet enumerate(const Budget& budget = {}) const;
  std::size_t formal_size(std::int64_t t = 1) const;  // prod (2 t N_i + 1), saturating

  // The refinement P_l: generators l v_i, dimensions floor(N_i / l^2).
  Gap refined(std::int64_t l) const;
};

// Coset progression H + P with an explicit finite subgroup H.
struct CosetProgression {
  GroupSet subgroup;  // H, verified closed under + and -
  Gap gap;

  const Group& ambient() const { return gap.ambient; }
  void check() const;
  GroupSet enumerate(const Budget& budget = {}) const;
  std::size_t formal_size(std::int64_t t = 1) const;
};

// A witness that two distinct formal sums agree.
struct Collision {
  Elem h1, h2;
  std::vector<std::int64_t> n1, n2;
  Elem value;
};

// pass = nullopt; otherwise the first collision found in canonical scan order.
std::optional<Collision> properness_test(const CosetProgression& c, std::int64_t t,
                                         const Budget& budget = {});

// An integer relation sum c_i v_i = delta_h with delta_h in H.
struct Relation {
  std::vector<std::int64_t> coeffs;
  Elem target;
};

struct RankReduceStep {
  std::string note;
  int eliminated = -1;             // generator index removed, -1 for the STOP step
  Relation relation;               // meaningful when eliminated >= 0
  std::vector<std::int64_t> dims;  // dims after the step
  std::string properness;          // "F(M)-proper at t=..." on the STOP step
};

struct RankReduceResult {
  CosetProgression out;
  std::vector<RankReduceStep> trace;
};

using GrowthFn = std::function<std::int64_t(const Rational& m)>;

// The rank-reduction loop: test F(M)-properness, derive a unit-coefficient
// relation from the collision (searching exhaustively up to relation_budget
// when the witness itself has no unit coefficient), eliminate one generator by
// substitution, inflate the remaining dimensions, repeat. Containment of the
// input enumeration is verified after every elimination.
RankReduceResult rank_reduce(const CosetProgression& c, const GrowthFn& f,
                             std::int64_t relation_budget = 8, const Budget& budget = {});

// Unique decomposition lookup over the t-dilated progression; empty when the
// element has no representation with |n_i| <= t N_i.
class DecomposeTable {
 public:
  DecomposeTable(const CosetProgression& c, std::int64_t t, const Budget& budget = {});
  struct Coords {
    Elem h;
    std::vector<std::int64_t> n;
  };
  std::optional<Coords> find(const Elem& e) const;

 private:
  std::vector<std::pair<Elem, Coords>> table_;  // sorted by element
};

}  // namespace solv
