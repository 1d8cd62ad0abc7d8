#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "solv/element.hpp"
#include "solv/rational.hpp"

namespace solv {

// Element-count guard threaded through every enumeration.
struct Budget {
  std::size_t max_elems = 2'000'000;
  void charge(std::size_t n, const char* what) const {
    if (n > max_elems) throw budget_error(std::string(what) + " exceeds element budget");
  }
};

// A finite subset of one group, kept sorted in canonical element order.
class GroupSet {
 public:
  GroupSet() = default;
  explicit GroupSet(Group g) : group_(std::move(g)) {}
  GroupSet(Group g, std::vector<Elem> elems);

  const Group& group() const { return group_; }
  const std::vector<Elem>& elems() const { return elems_; }
  std::size_t size() const { return elems_.size(); }
  bool empty() const { return elems_.empty(); }
  bool contains(const Elem& e) const;

  bool is_symmetric() const;
  bool is_centred() const;  // contains identity and A = A^{-1}

  GroupSet inverse_set() const;
  GroupSet with_identity() const;
  GroupSet union_with(const GroupSet& other) const;
  GroupSet intersect(const GroupSet& other) const;
  GroupSet difference(const GroupSet& other) const;

  friend bool operator==(const GroupSet& a, const GroupSet& b) {
    return a.group_ == b.group_ && a.elems_ == b.elems_;
  }

  std::vector<std::string> canonical_strings() const;

 private:
  Group group_;
  std::vector<Elem> elems_;
};

// Certificate that A is a K-approximate group: |X| <= K and the four
// inclusions A^2 in XA in AXX and A^2 in AX in XXA, each verified.
struct ApproxCertificate {
  Rational K;
  GroupSet X;
  bool sq_in_xa = false;
  bool xa_in_axx = false;
  bool sq_in_ax = false;
  bool ax_in_xxa = false;
  bool verified() const { return sq_in_xa && xa_in_axx && sq_in_ax && ax_in_xxa; }
};

// Certificate that A is K-controlled by B: A in XB and A in BX.
struct ControlCertificate {
  Rational K;
  GroupSet X;
  bool verified = false;
  std::string ambient_subgroup;  // Def 1.4 metadata, recorded but never enforced
};

struct FiberReport {
  std::size_t projected_size = 0;   // |pi(A)|
  std::size_t kernel_size = 0;      // |ker pi  intersect A^k|
  std::size_t min_fiber = 0;
  std::size_t max_fiber = 0;
  Rational mean_fiber{0, 1};
  Rational max_over_min{0, 1};
};

GroupSet product_set(const GroupSet& a, const GroupSet& b, const Budget& budget = {});
GroupSet iterated_set(const GroupSet& a, int k, bool signed_powers, const Budget& budget = {});
std::pair<Rational, Rational> expansion_constants(const GroupSet& a, const Budget& budget = {});
GroupSet symmetrized_cube(const GroupSet& a, const Budget& budget = {});

enum class CertMethod { greedy, exhaustive };
ApproxCertificate approx_certificate(const GroupSet& a, CertMethod method,
                                     std::size_t budget_candidates = 4096,
                                     const Budget& budget = {});

std::optional<ControlCertificate> control_certificate(const GroupSet& a, const GroupSet& b,
                                                      std::size_t budget_translates = 1024,
                                                      const Budget& budget = {});

FiberReport fiber_statistics(const GroupSet& a, int k, const Budget& budget = {});

}  // namespace solv
