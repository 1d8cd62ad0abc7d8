#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "solv/groupset.hpp"
#include "solv/progression.hpp"

namespace solv {

// F_2 span of bit masks, kept as a reduced (row-echelon) basis.
class BitSpan {
 public:
  void add(std::uint64_t v);
  bool contains(std::uint64_t v) const { return reduce(v) == 0; }
  std::uint64_t reduce(std::uint64_t v) const;
  int dim() const { return static_cast<int>(basis_.size()); }
  const std::vector<std::uint64_t>& basis() const { return basis_; }
  std::size_t size() const { return std::size_t{1} << basis_.size(); }
  friend bool operator==(const BitSpan& a, const BitSpan& b) { return a.basis_ == b.basis_; }

 private:
  std::vector<std::uint64_t> basis_;  // sorted descending by leading bit
};

struct LampClassification {
  enum class Case { one, two };
  Case tag = Case::one;
  // Case 1: B = {0} x V
  BitSpan v_space;
  // Case 2: B = { (n, phi(n) + v) : n in P, v in V }
  std::int64_t d = 1;
  Gap p;                               // progression inside dZ (ambient Z)
  std::vector<std::pair<std::int64_t, std::uint64_t>> phi;  // n -> bit mask
  GroupSet b;                          // the controlling set itself
  ControlCertificate control;
  std::vector<std::string> notes;
  bool v_invariant_checked = false;    // T^d-invariance of V, verified
  bool freiman_checked = false;        // graph condition modulo V, verified
};

struct ClassifyConfig {
  int kernel_power = 6;   // exponent in ker(pi) n A^c
  int span_shifts = 12;   // cap on the stabilization scan
  int control_power = 1;  // B is assembled from pi^{-1}(P) n (A^{+-3})^c
  std::int64_t gap_ratio_cap = 64;
};

// The small-doubling classifier for lamplighter ambients: either a subspace
// (case 1) or a shifted Freiman graph over a progression (case 2), plus a
// verified control certificate.
LampClassification classify(const GroupSet& a, const Rational& k_bound,
                            const ClassifyConfig& cfg = {}, const Budget& budget = {});

// Exhaustive check of the graph condition
//   (n1, phi(n1)) (n2, phi(n2)) = (n3, phi(n3)) (n4, phi(n4))  mod V
// over all additive quadruples n1 + n2 = n3 + n4 in P.
struct FreimanViolation {
  std::int64_t n1, n2, n3, n4;
};
std::optional<FreimanViolation> verify_freiman_mod_v(
    const Group& ambient, const std::vector<std::pair<std::int64_t, std::uint64_t>>& phi,
    const BitSpan& v_space);

// Exact doubling constant of the classifier's output set.
Rational converse_doubling(const LampClassification& cls, const Budget& budget = {});

}  // namespace solv
