#include "solv/lamplighter.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace solv {

void BitSpan::add(std::uint64_t v) {
  v = reduce(v);
  if (v == 0) return;
  basis_.push_back(v);
  std::sort(basis_.begin(), basis_.end(), std::greater<>());
  // re-echelonize below the new pivot
  for (std::size_t i = basis_.size(); i-- > 1;) {
    std::uint64_t lead = std::uint64_t{1} << (63 - std::countl_zero(basis_[i]));
    for (std::size_t j = 0; j < i; ++j)
      if (basis_[j] & lead) basis_[j] ^= basis_[i];
  }
  std::sort(basis_.begin(), basis_.end(), std::greater<>());
}

std::uint64_t BitSpan::reduce(std::uint64_t v) const {
  for (std::uint64_t b : basis_) {
    std::uint64_t lead = std::uint64_t{1} << (63 - std::countl_zero(b));
    if (v & lead) v ^= b;
  }
  return v;
}

namespace {

bool is_lamp_kind(const Group& g) {
  return g.kind() == Kind::lamplighter || g.kind() == Kind::lamplighter_periodic;
}

// T^t on a mask, throwing when support leaves the window (periodic rotates).
std::uint64_t shift_mask(const Group& g, std::uint64_t mask, std::int64_t t) {
  Elem moved = g.mul(Elem{0, static_cast<std::int64_t>(mask)}, Elem{t, 0});
  // (0, x) * (t, 0) = (t, T^t x); strip the shift part again
  return static_cast<std::uint64_t>(moved[1]);
}

// Rank <= 2 progression fit of a finite symmetric set of integers.
std::optional<Gap> fit_gap(const std::vector<std::int64_t>& values, std::int64_t ratio_cap) {
  Gap p;
  p.ambient = Group::integers();
  std::vector<std::int64_t> nonzero;
  for (std::int64_t v : values)
    if (v != 0) nonzero.push_back(v < 0 ? -v : v);
  if (nonzero.empty()) return p;  // rank 0
  std::int64_t d = 0, top = 0;
  for (std::int64_t v : nonzero) {
    d = std::gcd(d, v);
    top = std::max(top, v);
  }
  std::int64_t n1 = top / d;
  if (2 * n1 + 1 <= ratio_cap * static_cast<std::int64_t>(values.size())) {
    p.generators = {Elem{d}};
    p.dims = {n1};
    return p;
  }
  // two-scale fit: a dense core near zero plus one long generator
  std::sort(nonzero.begin(), nonzero.end());
  std::int64_t core = 0, split = 0;
  for (std::size_t i = 0; i + 1 < nonzero.size(); ++i) {
    if (nonzero[i + 1] > 2 * nonzero[i] + ratio_cap) {
      core = nonzero[i];
      split = nonzero[i + 1];
      break;
    }
  }
  if (split == 0) return std::nullopt;
  std::int64_t d1 = 0;
  for (std::int64_t v : nonzero)
    if (v <= core) d1 = std::gcd(d1, v);
  if (d1 == 0) d1 = 1;
  std::int64_t n_small = core / d1;
  std::int64_t n_big = top / split + 1;
  // verify containment of the fitted box
  for (std::int64_t v : values) {
    bool ok = false;
    for (std::int64_t k = -n_big; k <= n_big && !ok; ++k) {
      std::int64_t rest = v - k * split;
      if (rest % d1 == 0 && rest / d1 >= -n_small && rest / d1 <= n_small) ok = true;
    }
    if (!ok) return std::nullopt;
  }
  p.generators = {Elem{d1}, Elem{split}};
  p.dims = {n_small, n_big};
  return p;
}

}  // namespace

std::optional<FreimanViolation> verify_freiman_mod_v(
    const Group& ambient, const std::vector<std::pair<std::int64_t, std::uint64_t>>& phi,
    const BitSpan& v_space) {
  std::map<std::int64_t, std::uint64_t> table(phi.begin(), phi.end());
  auto graph_mul = [&](std::int64_t n1, std::int64_t n2) {
    // (n1, phi(n1)) * (n2, phi(n2)) has lamp part T^{n2} phi(n1) + phi(n2)
    return shift_mask(ambient, table.at(n1), n2) ^ table.at(n2);
  };
  for (auto& [n1, p1] : table)
    for (auto& [n2, p2] : table)
      for (auto& [n3, p3] : table) {
        std::int64_t n4 = n1 + n2 - n3;
        if (!table.count(n4)) continue;
        std::uint64_t lhs = graph_mul(n1, n2);
        std::uint64_t rhs = graph_mul(n3, n4);
        if (!v_space.contains(lhs ^ rhs)) return FreimanViolation{n1, n2, n3, n4};
      }
  return std::nullopt;
}

LampClassification classify(const GroupSet& a, const Rational& k_bound, const ClassifyConfig& cfg,
                            const Budget& budget) {
  const Group& g = a.group();
  if (!is_lamp_kind(g)) throw error("classify needs a lamplighter ambient");
  LampClassification cls;

  {
    GroupSet sq = product_set(a, a, budget);
    Rational doubling(static_cast<std::int64_t>(sq.size()), static_cast<std::int64_t>(a.size()));
    if (doubling > k_bound)
      throw error("doubling constant " + doubling.str() + " exceeds the bound " + k_bound.str());
    cls.notes.push_back("doubling=" + doubling.str());
  }

  GroupSet upgraded = symmetrized_cube(a, budget);

  // Controlling progression for the shift projection.
  std::vector<std::int64_t> shifts;
  for (const Elem& e : upgraded.elems()) shifts.push_back(e[0]);
  std::sort(shifts.begin(), shifts.end());
  shifts.erase(std::unique(shifts.begin(), shifts.end()), shifts.end());
  auto fitted = fit_gap(shifts, cfg.gap_ratio_cap);
  if (!fitted) throw error("no rank <= 2 progression found for the shift projection");
  Gap p = *fitted;

  // Kernel slice and the span-stabilization scan.
  GroupSet big = iterated_set(a, cfg.kernel_power, true, budget);
  std::vector<std::uint64_t> kernel_masks;
  for (const Elem& e : big.elems())
    if (e[0] == 0) kernel_masks.push_back(static_cast<std::uint64_t>(e[1]));

  std::vector<std::int64_t> gen_values;
  for (const Elem& v : p.generators) gen_values.push_back(v[0]);

  BitSpan w;
  for (std::uint64_t m : kernel_masks) w.add(m);
  bool stabilized = p.rank() == 0;
  for (int n = 1; n <= cfg.span_shifts && !stabilized; ++n) {
    BitSpan next = w;
    // all shift amounts sum a_i v_i with |a_i| <= n
    std::vector<std::int64_t> amounts{0};
    for (std::size_t i = 0; i < gen_values.size(); ++i) {
      std::vector<std::int64_t> grown;
      for (std::int64_t base : amounts)
        for (std::int64_t k = -n; k <= n; ++k) grown.push_back(base + k * gen_values[i]);
      amounts = std::move(grown);
    }
    for (std::int64_t t : amounts)
      for (std::uint64_t m : kernel_masks) next.add(shift_mask(g, m, t));
    if (next == w) {
      stabilized = true;
      break;
    }
    w = next;
  }
  if (!stabilized && p.rank() > 0)
    throw verification_error("span chain failed to stabilize within the shift cap");
  cls.v_space = w;

  if (p.rank() == 0) {
    cls.tag = LampClassification::Case::one;
    std::vector<Elem> belems;
    // enumerate the subspace
    std::size_t count = std::size_t{1} << w.dim();
    budget.charge(count, "subspace enumeration");
    for (std::size_t bits = 0; bits < count; ++bits) {
      std::uint64_t mask = 0;
      for (int i = 0; i < w.dim(); ++i)
        if (bits >> i & 1) mask ^= w.basis()[static_cast<std::size_t>(i)];
      belems.push_back(Elem{0, static_cast<std::int64_t>(mask)});
    }
    cls.b = GroupSet(g, std::move(belems));
    // closure check: B is a subgroup
    GroupSet sq = product_set(cls.b, cls.b, budget);
    if (!(sq == cls.b)) throw verification_error("case-1 output is not closed");
    auto cert = control_certificate(a, cls.b, 1024, budget);
    if (!cert) throw verification_error("case-1 control certificate not found");
    cls.control = *cert;
    return cls;
  }

  cls.tag = LampClassification::Case::two;
  std::vector<std::int64_t> nz;
  for (std::int64_t v : gen_values)
    if (v != 0) nz.push_back(v);
  cls.d = nz.empty() ? 1 : std::abs(std::accumulate(nz.begin(), nz.end(), std::int64_t{0},
                                                    [](std::int64_t x, std::int64_t y) {
                                                      return std::gcd(x, y);
                                                    }));
  // V must be invariant under T^d; checked on the basis, violations surfaced.
  cls.v_invariant_checked = true;
  for (std::uint64_t b : w.basis()) {
    bool ok = true;
    try {
      ok = w.contains(shift_mask(g, b, cls.d)) && w.contains(shift_mask(g, b, -cls.d));
    } catch (const window_error&) {
      ok = false;
    }
    if (!ok) {
      cls.v_invariant_checked = false;
      cls.notes.push_back("V is not T^d-invariant at the window boundary");
    }
  }
  if (g.kind() == Kind::lamplighter && w.dim() > 0)
    cls.notes.push_back("nontrivial V in the finitely-supported model");

  // Assemble B = V * (pi^{-1}(P) n upgraded^c).
  GroupSet source =
      cfg.control_power <= 1 ? upgraded : iterated_set(upgraded, cfg.control_power, false, budget);
  GroupSet pset = p.enumerate(budget);
  std::set<std::int64_t> pvals;
  for (const Elem& e : pset.elems()) pvals.insert(e[0]);
  std::vector<Elem> belems;
  for (const Elem& x : source.elems()) {
    if (!pvals.count(x[0])) continue;
    std::size_t count = std::size_t{1} << w.dim();
    for (std::size_t bits = 0; bits < count; ++bits) {
      std::uint64_t mask = 0;
      for (int i = 0; i < w.dim(); ++i)
        if (bits >> i & 1) mask ^= w.basis()[static_cast<std::size_t>(i)];
      belems.push_back(g.mul(Elem{0, static_cast<std::int64_t>(mask)}, x));
      budget.charge(belems.size(), "case-2 assembly");
    }
  }
  cls.b = GroupSet(g, std::move(belems));

  // Extract the graph map: each fiber must be a single V-coset.
  std::map<std::int64_t, std::vector<std::uint64_t>> fibers;
  for (const Elem& x : cls.b.elems())
    fibers[x[0]].push_back(static_cast<std::uint64_t>(x[1]));
  for (auto& [n, masks] : fibers) {
    std::uint64_t rep = w.reduce(masks.front());
    bool single = masks.size() == (std::size_t{1} << w.dim());
    for (std::uint64_t m : masks)
      if (w.reduce(m) != rep) single = false;
    if (!single) cls.notes.push_back("fiber at " + std::to_string(n) + " is not one V-coset");
    cls.phi.emplace_back(n, rep);
  }
  cls.p = p;

  auto violation = verify_freiman_mod_v(g, cls.phi, w);
  cls.freiman_checked = !violation.has_value();
  if (violation)
    cls.notes.push_back("graph condition fails at (" + std::to_string(violation->n1) + "," +
                        std::to_string(violation->n2) + "," + std::to_string(violation->n3) + "," +
                        std::to_string(violation->n4) + ")");

  auto cert = control_certificate(a, cls.b, 1024, budget);
  if (!cert) throw verification_error("case-2 control certificate not found");
  cls.control = *cert;
  return cls;
}

Rational converse_doubling(const LampClassification& cls, const Budget& budget) {
  GroupSet sq = product_set(cls.b, cls.b, budget);
  return Rational(static_cast<std::int64_t>(sq.size()), static_cast<std::int64_t>(cls.b.size()));
}

}  // namespace solv
