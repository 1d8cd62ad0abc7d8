#pragma once

#include <optional>
#include <string>
#include <vector>

#include "solv/progression.hpp"

namespace solv {

// phi_{i,0}: a finite abelian group (product of cyclic orders) with an
// arbitrary normalized table into G. Empty orders = trivial group.
struct TorsionFactor {
  std::vector<std::int64_t> orders;
  std::vector<Elem> table;  // mixed-radix indexed; table[0] must be the identity
  std::size_t size() const {
    std::size_t n = 1;
    for (std::int64_t d : orders) n *= static_cast<std::size_t>(d);
    return n;
  }
};

// phi_{i,j}, j >= 1: an interval {-N..N} with a normalized table into G.
struct IntervalFactor {
  std::int64_t n = 0;
  std::vector<Elem> table;  // size 2n+1, index k+n; table[n] must be the identity
  const Elem& at(std::int64_t k) const { return table[static_cast<std::size_t>(k + n)]; }
  std::size_t size() const { return static_cast<std::size_t>(2 * n + 1); }
};

struct Level {
  TorsionFactor torsion;
  std::vector<IntervalFactor> intervals;
};

// The leveled product prod_{i=l}^{1} prod_{j=0}^{r_i} phi_{i,j}(H_{i,j}).
struct CosetNilprogression {
  Group ambient;
  std::vector<Level> levels;  // levels[0] is printed level 1

  int derived_length() const { return static_cast<int>(levels.size()); }
  std::vector<int> ranks() const;
  std::int64_t volume() const;
  void check_shape() const;  // payload sanity, not the axioms
};

// Exponents per interval factor; the torsion exponent is pinned to 1.
struct DilationTuple {
  std::vector<std::vector<std::int64_t>> m;  // m[i][j-1] for level i+1, interval j

  static DilationTuple ones(const CosetNilprogression& c);
  std::int64_t total() const;
  std::string str() const;
};

struct AxiomWitness {
  std::string axiom;  // "normalized", "local-add", "level-comm", "cross-comm"
  int i = 0, j = 0, i2 = 0, j2 = 0;
  std::vector<std::int64_t> n, n2;
  std::string detail;
};

struct AxiomReport {
  bool normalized_ok = false;
  bool local_add_ok = false;
  bool level_comm_ok = false;
  bool cross_comm_ok = false;
  std::optional<AxiomWitness> first_failure;
  bool pass() const { return normalized_ok && local_add_ok && level_comm_ok && cross_comm_ok; }
};

AxiomReport axiom_check(const CosetNilprogression& c, const Budget& budget = {});

GroupSet enumerate_cnp(const CosetNilprogression& c, const Budget& budget = {});
GroupSet dilate(const CosetNilprogression& c, const DilationTuple& m, const Budget& budget = {});

// Membership in a dilate without full enumeration: longest prefix within
// budget is enumerated, the suffix factors are searched depth-first.
class DilateOracle {
 public:
  DilateOracle(const CosetNilprogression& c, const DilationTuple& m, const Budget& budget = {});
  bool contains(const Elem& e) const;

 private:
  bool suffix_search(const Elem& e, std::size_t k) const;
  Group g_;
  GroupSet prefix_;
  std::vector<GroupSet> suffix_;  // factor power sets after the prefix
};

// On failure (cap exceeded) returns nullopt and, when `uncovered` is given,
// stores an element of s that no cap-bounded dilate contains.
std::optional<DilationTuple> minimal_containing_dilation(const CosetNilprogression& c,
                                                         const GroupSet& s, std::int64_t cap,
                                                         const Budget& budget = {},
                                                         Elem* uncovered = nullptr);

struct CoveringCertificate {
  GroupSet X;
  bool verified = false;
};
CoveringCertificate covering_certificate(const CosetNilprogression& c, const DilationTuple& m,
                                         const Budget& budget = {});

struct GrowthCurve {
  std::vector<std::size_t> sizes;  // sizes[n-1] = |A^{+-n}|
  double slope = 0.0;              // log-log least squares over the trailing half
  bool non_decreasing = true;
  bool used_central_fast_path = false;
};
GrowthCurve growth_curve_cnp(const CosetNilprogression& c, int n_max, const Budget& budget = {});

struct GeneratedGroupReport {
  bool finite = false;  // false = budget exceeded, inconclusive
  std::size_t closure_size = 0;
  int derived_length = -1;
  int nilpotency_step = -1;  // -1 when the lower central series does not reach 1
};
GeneratedGroupReport generated_group_probe(const CosetNilprogression& c, const Budget& budget = {});

// Builders.
CosetNilprogression build_helfgott1(std::int64_t p, std::int64_t n, std::int64_t r, std::int64_t s);
CosetNilprogression build_helfgott2(std::int64_t p, std::int64_t n, std::int64_t m, std::int64_t r,
                                    std::int64_t s);
CosetNilprogression build_twostep(const Elem& e1, const Elem& e2, std::int64_t n);
CosetNilprogression build_twostep(std::int64_t n);  // standard Heisenberg generators
CosetNilprogression from_coset_progression(const CosetProgression& c);
// Case-2 lamplighter set: B = {(n, phi(n) + v)}, phi over a rank-1 progression
// in dZ, V spanned by the given vectors (empty = trivial).
CosetNilprogression build_lamplighter_case2(const Group& ambient, std::int64_t d, std::int64_t n_dim,
                                            const std::vector<Elem>& phi_table,
                                            const std::vector<Elem>& v_basis);

// Deterministic single-entry mutation that breaks at least one axiom; used by
// the fault-injection suite. Returns the mutated value and a description.
std::pair<CosetNilprogression, std::string> mutate_single_field(const CosetNilprogression& c,
                                                                std::uint64_t seed);

// Direct-sum decomposition of an explicit finite abelian subgroup: returns
// generators and their orders with H = <g_1> + ... + <g_k> (direct).
std::vector<std::pair<Elem, std::int64_t>> cyclic_decomposition(const GroupSet& h);

}  // namespace solv
