#include "solv/sarkozy.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace solv {

namespace {

std::int64_t order_lcm(const Group& g) {
  std::int64_t l = 1;
  for (int i = 0; i < g.coords(); ++i) l = std::lcm(l, g.coord_order(i));
  return l;
}

bool orthogonal(const Group& g, const Elem& chi, const Elem& x, std::int64_t l) {
  std::int64_t acc = 0;
  for (int i = 0; i < g.coords(); ++i) {
    std::int64_t n = g.coord_order(i);
    acc = (acc + (__int128)chi[i] * x[i] % l * (l / n)) % l;
  }
  return acc % l == 0;
}

GroupSet additive_closure(const Group& g, std::vector<Elem> gens) {
  std::set<Elem> seen{g.zero()};
  std::vector<Elem> frontier{g.zero()};
  for (const Elem& e : gens)
    if (seen.insert(e).second) frontier.push_back(e);
  while (!frontier.empty()) {
    Elem cur = frontier.back();
    frontier.pop_back();
    for (const Elem& e : gens) {
      Elem nxt = g.add(cur, e);
      if (seen.insert(nxt).second) frontier.push_back(nxt);
    }
  }
  return GroupSet(g, std::vector<Elem>(seen.begin(), seen.end()));
}

// Representation-count oracle reused across targets: builds the m-fold sum
// table once and answers per-target queries.
class RepCounter {
 public:
  RepCounter(const GroupSet& a, int m, const Budget& budget) : a_(a), m_(m), budget_(budget) {}

  std::uint64_t count(const Elem& target) {
    ensure();
    const Group& g = a_.group();
    std::uint64_t total = 0;
    for (const auto& [q, cq] : *sums_) {
      Elem p = g.add(target, q);
      auto it = std::lower_bound(sums_->begin(), sums_->end(), p,
                                 [](const auto& x, const Elem& key) { return x.first < key; });
      if (it != sums_->end() && it->first == p) {
        unsigned __int128 add = (unsigned __int128)cq * it->second;
        unsigned __int128 next = (unsigned __int128)total + add;
        if (next > ~std::uint64_t{0}) throw budget_error("representation count exceeds 64 bits");
        total = static_cast<std::uint64_t>(next);
      }
    }
    return total;
  }

 private:
  void ensure() {
    if (sums_) return;
    // m-fold sumset with multiplicity, as a sorted association list.
    const Group& g = a_.group();
    std::map<Elem, std::uint64_t> cur{{g.zero(), 1}};
    for (int step = 0; step < m_; ++step) {
      std::map<Elem, std::uint64_t> next;
      for (const auto& [x, c] : cur)
        for (const Elem& e : a_.elems()) next[g.add(x, e)] += c;
      budget_.charge(next.size(), "m-fold sum table");
      cur.swap(next);
    }
    sums_.emplace(cur.begin(), cur.end());
  }

  GroupSet a_;
  int m_;
  Budget budget_;
  std::optional<std::vector<std::pair<Elem, std::uint64_t>>> sums_;
};

}  // namespace

namespace {

// Maximal subgroups of a finite abelian group = kernels of surjective
// homomorphisms onto Z_p, enumerated through a cyclic decomposition.
std::vector<GroupSet> maximal_subgroups(const GroupSet& h) {
  const Group& g = h.group();
  if (h.size() <= 1) return {};
  std::vector<std::pair<Elem, std::int64_t>> decomp;
  {
    // local greedy direct-sum decomposition (mirrors the one in nilprog)
    auto elem_order = [&](const Elem& e) {
      std::int64_t ord = 1;
      Elem cur = e;
      while (!(cur == g.zero())) {
        cur = g.add(cur, e);
        ++ord;
      }
      return ord;
    };
    std::vector<std::pair<Elem, std::int64_t>> ordered;
    for (const Elem& e : h.elems())
      if (!(e == g.zero())) ordered.emplace_back(e, elem_order(e));
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    std::vector<Elem> span{g.zero()};
    for (const auto& [e, ord] : ordered) {
      if (span.size() == h.size()) break;
      bool direct = true;
      Elem cur = e;
      for (std::int64_t k = 1; k < ord && direct; ++k) {
        if (std::binary_search(span.begin(), span.end(), cur)) direct = false;
        cur = g.add(cur, e);
      }
      if (!direct) continue;
      std::vector<Elem> bigger;
      cur = g.zero();
      for (std::int64_t k = 0; k < ord; ++k) {
        for (const Elem& s : span) bigger.push_back(g.add(s, cur));
        cur = g.add(cur, e);
      }
      std::sort(bigger.begin(), bigger.end());
      span = std::move(bigger);
      decomp.emplace_back(e, ord);
    }
    if (span.size() != h.size()) return {};  // not a closed subgroup
  }
  // coordinates of every element in the decomposition basis
  std::map<Elem, std::vector<std::int64_t>> coords;
  {
    std::vector<std::int64_t> radix;
    for (auto& [e, ord] : decomp) radix.push_back(ord);
    std::vector<std::int64_t> tuple(radix.size(), 0);
    while (true) {
      Elem acc = g.zero();
      for (std::size_t i = 0; i < tuple.size(); ++i)
        acc = g.add(acc, g.scale(decomp[i].first, tuple[i]));
      coords.emplace(acc, tuple);
      std::size_t i = 0;
      for (; i < tuple.size(); ++i) {
        if (++tuple[i] < radix[i]) break;
        tuple[i] = 0;
      }
      if (i == tuple.size()) break;
    }
  }
  std::set<std::int64_t> primes;
  for (auto& [e, ord] : decomp)
    for (std::int64_t p = 2; p <= ord; ++p)
      if (ord % p == 0) {
        bool prime = true;
        for (std::int64_t d = 2; d * d <= p; ++d)
          if (p % d == 0) prime = false;
        if (prime) primes.insert(p);
      }
  std::set<std::vector<Elem>> seen;
  std::vector<GroupSet> out;
  for (std::int64_t p : primes) {
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < decomp.size(); ++i)
      if (decomp[i].second % p == 0) active.push_back(i);
    // nonzero character vectors with leading coefficient 1 (up to scalar)
    std::vector<std::int64_t> c(active.size(), 0);
    std::function<void(std::size_t, bool)> walk = [&](std::size_t i, bool lead) {
      if (i == active.size()) {
        if (!lead) return;
        std::vector<Elem> kernel;
        for (const Elem& x : h.elems()) {
          const auto& t = coords.at(x);
          std::int64_t s = 0;
          for (std::size_t j = 0; j < active.size(); ++j)
            s = (s + c[j] * (t[active[j]] % p)) % p;
          if (s == 0) kernel.push_back(x);
        }
        GroupSet k(h.group(), std::move(kernel));
        if (seen.insert(k.elems()).second) out.push_back(std::move(k));
        return;
      }
      if (!lead) {
        c[i] = 0;
        walk(i + 1, false);
        c[i] = 1;
        walk(i + 1, true);
      } else {
        for (std::int64_t v = 0; v < p; ++v) {
          c[i] = v;
          walk(i + 1, true);
        }
      }
    };
    walk(0, false);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const GroupSet& a, const GroupSet& b) { return a.elems() < b.elems(); });
  return out;
}

// Top-down lattice walk: largest subgroups first, children generated lazily.
template <typename Certify>
std::optional<SarkozyCosetResult> descend_subgroups(const GroupSet& h, std::size_t node_cap,
                                                    Certify&& certify) {
  auto size_then_lex = [](const GroupSet& a, const GroupSet& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a.elems() < b.elems();
  };
  std::vector<GroupSet> frontier{h};
  std::set<std::vector<Elem>> visited;
  std::size_t nodes = 0;
  while (!frontier.empty() && nodes < node_cap) {
    auto best = std::min_element(frontier.begin(), frontier.end(), size_then_lex);
    GroupSet cur = *best;
    frontier.erase(best);
    if (!visited.insert(cur.elems()).second) continue;
    ++nodes;
    if (auto res = certify(cur)) return res;
    for (GroupSet& m : maximal_subgroups(cur)) frontier.push_back(std::move(m));
  }
  return std::nullopt;
}

}  // namespace

GroupSet orthogonal_complement(const Group& g, const std::vector<Elem>& sigma) {
  std::int64_t l = order_lcm(g);
  std::vector<Elem> out;
  std::int64_t n = g.order();
  for (std::int64_t idx = 0; idx < n; ++idx) {
    Elem x = group_unindex(g, static_cast<std::size_t>(idx));
    bool ok = true;
    for (const Elem& chi : sigma)
      if (!orthogonal(g, chi, x, l)) {
        ok = false;
        break;
      }
    if (ok) out.push_back(x);
  }
  return GroupSet(g, std::move(out));
}

std::vector<GroupSet> all_subgroups(const GroupSet& h) {
  const Group& g = h.group();
  std::set<std::vector<Elem>> seen;
  std::vector<GroupSet> out;
  std::vector<GroupSet> frontier;
  GroupSet trivial(g, {g.zero()});
  seen.insert(trivial.elems());
  out.push_back(trivial);
  frontier.push_back(trivial);
  while (!frontier.empty()) {
    GroupSet cur = frontier.back();
    frontier.pop_back();
    for (const Elem& e : h.elems()) {
      if (cur.contains(e)) continue;
      std::vector<Elem> gens = cur.elems();
      gens.push_back(e);
      GroupSet bigger = additive_closure(g, std::move(gens));
      if (seen.insert(bigger.elems()).second) {
        out.push_back(bigger);
        frontier.push_back(bigger);
      }
    }
  }
  return out;
}

SarkozyAbelianResult sarkozy_abelian(const GroupSet& a, const Rational& delta, int m_max,
                                     const Budget& budget) {
  const Group& g = a.group();
  if (!g.is_finite() || g.kind() != Kind::finite_abelian)
    throw error("sarkozy_abelian needs a finite abelian ambient");
  std::int64_t n = g.order();
  if (Rational(static_cast<std::int64_t>(a.size()), n) < delta)
    throw error("density precondition |A| >= delta |G| fails");

  std::vector<std::complex<double>> f(static_cast<std::size_t>(n), 0.0);
  for (const Elem& e : a.elems()) f[group_index(g, e)] = 1.0;
  std::vector<std::complex<double>> fhat = fourier_forward(g, f);
  double density = static_cast<double>(a.size()) / static_cast<double>(n);

  // eps grid, spectra, candidate complements (deduplicated, largest first).
  std::vector<std::pair<Spectrum, GroupSet>> candidates;
  for (double eps : {0.25, 0.125, 0.0625, 0.03125}) {
    Spectrum spec;
    spec.eps = eps;
    spec.threshold = (1.0 - eps) * density * density;
    for (std::int64_t xi = 0; xi < n; ++xi) {
      if (std::norm(fhat[static_cast<std::size_t>(xi)]) > spec.threshold)
        spec.characters.push_back(group_unindex(g, static_cast<std::size_t>(xi)));
    }
    GroupSet gen = additive_closure(g, spec.characters);
    GroupSet h = orthogonal_complement(g, gen.elems());
    bool dup = false;
    for (const auto& [s, prev] : candidates)
      if (prev == h) dup = true;
    if (!dup) candidates.emplace_back(spec, h);
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const auto& x, const auto& y) { return x.second.size() > y.second.size(); });

  std::string diag;
  for (auto& [spec, h] : candidates) {
    for (int m = 1; m <= m_max; ++m) {
      RepCounter counter(a, m, budget);
      std::uint64_t mn = ~std::uint64_t{0};
      bool ok = true;
      for (const Elem& e : h.elems()) {
        std::uint64_t c = counter.count(e);
        if (c == 0) {
          ok = false;
          break;
        }
        mn = std::min(mn, c);
      }
      if (ok) {
        SarkozyAbelianResult res;
        res.m = m;
        res.H = h;
        res.min_count = mn;
        res.spectrum = spec;
        return res;
      }
    }
    diag += " |H|=" + std::to_string(h.size()) + " uncertified to m=" + std::to_string(m_max) + ";";
  }
  throw verification_error("sarkozy_abelian: no spectrum candidate certified;" + diag);
}

namespace {

std::optional<std::uint64_t> certify_targets(RepCounter& counter, const GroupSet& targets) {
  std::uint64_t mn = ~std::uint64_t{0};
  for (const Elem& t : targets.elems()) {
    std::uint64_t c = counter.count(t);
    if (c == 0) return std::nullopt;
    mn = std::min(mn, c);
  }
  return mn;
}

}  // namespace

SarkozyProgressionResult sarkozy_progression(const GroupSet& a, const Gap& p, const Rational& delta,
                                             int m_max, std::int64_t l_max, const Budget& budget) {
  p.check();
  GroupSet pset = p.enumerate(budget);
  for (const Elem& e : a.elems())
    if (!pset.contains(e)) throw error("A must be a subset of P");
  {
    CosetProgression cp;
    cp.subgroup = GroupSet(p.ambient, {p.ambient.zero()});
    cp.gap = p;
    if (properness_test(cp, 1, budget)) throw error("P must be proper");
  }
  if (Rational(static_cast<std::int64_t>(a.size()), static_cast<std::int64_t>(pset.size())) < delta)
    throw error("density precondition |A| >= delta |P| fails");

  for (int m = 1; m <= m_max; ++m) {
    RepCounter counter(a, m, budget);
    for (std::int64_t l = 1; l <= l_max; ++l) {
      Gap pl = p.refined(l);
      GroupSet targets =
          pl.rank() == 0 ? GroupSet(p.ambient, {p.ambient.zero()}) : pl.enumerate(budget);
      if (auto mn = certify_targets(counter, targets)) {
        SarkozyProgressionResult res;
        res.m = m;
        res.l = l;
        res.min_count = *mn;
        return res;
      }
    }
  }
  throw verification_error("sarkozy_progression: no (m, l) within caps m<=" +
                           std::to_string(m_max) + ", l<=" + std::to_string(l_max));
}

std::optional<SarkozyCosetResult> sarkozy_coset_at(const GroupSet& a, const CosetProgression& c,
                                                   std::int64_t l, int m_max,
                                                   const Budget& budget) {
  const Group& g = c.ambient();
  Gap pl = c.gap.refined(l);
  GroupSet plset = pl.rank() == 0 ? GroupSet(g, {g.zero()}) : pl.enumerate(budget);
  std::vector<RepCounter> counters;
  for (int m = 1; m <= m_max; ++m) counters.emplace_back(a, m, budget);
  return descend_subgroups(
      c.subgroup, 1024, [&](const GroupSet& hp) -> std::optional<SarkozyCosetResult> {
        GroupSet targets = product_set(hp, plset, budget);
        for (int m = 1; m <= m_max; ++m) {
          if (auto mn = certify_targets(counters[static_cast<std::size_t>(m - 1)], targets)) {
            SarkozyCosetResult res;
            res.m = m;
            res.l = l;
            res.Hprime = hp;
            res.min_count = *mn;
            return res;
          }
        }
        return std::nullopt;
      });
}

SarkozyCosetResult sarkozy_coset(const GroupSet& a, const CosetProgression& c,
                                 const Rational& delta, int m_max, std::int64_t l_max,
                                 const Budget& budget) {
  c.check();
  GroupSet full = c.enumerate(budget);
  for (const Elem& e : a.elems())
    if (!full.contains(e)) throw error("A must be a subset of H+P");
  if (properness_test(c, 1, budget)) throw error("H+P must be proper");
  if (Rational(static_cast<std::int64_t>(a.size()), static_cast<std::int64_t>(full.size())) < delta)
    throw error("density precondition |A| >= delta |H||P| fails");

  const Group& g = c.ambient();
  std::vector<RepCounter> counters;
  for (int m = 1; m <= m_max; ++m) counters.emplace_back(a, m, budget);
  auto found = descend_subgroups(
      c.subgroup, 1024, [&](const GroupSet& hp) -> std::optional<SarkozyCosetResult> {
        for (int m = 1; m <= m_max; ++m) {
          for (std::int64_t l = 1; l <= l_max; ++l) {
            Gap pl = c.gap.refined(l);
            GroupSet plset = pl.rank() == 0 ? GroupSet(g, {g.zero()}) : pl.enumerate(budget);
            GroupSet targets = product_set(hp, plset, budget);
            if (auto mn = certify_targets(counters[static_cast<std::size_t>(m - 1)], targets)) {
              SarkozyCosetResult res;
              res.m = m;
              res.l = l;
              res.Hprime = hp;
              res.min_count = *mn;
              return res;
            }
          }
        }
        return std::nullopt;
      });
  if (!found) throw verification_error("sarkozy_coset: no (m, l, H') within caps");
  return *found;
}

}  // namespace solv
