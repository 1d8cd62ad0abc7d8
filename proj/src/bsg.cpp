#include "solv/bsg.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace solv {

GroupSet popular_quotients(const GroupSet& a, const Rational& c, const Budget& budget) {
  if (a.empty()) throw error("popular_quotients of an empty set");
  const Group& g = a.group();
  std::unordered_map<Elem, std::int64_t, ElemHash> counts;
  for (const Elem& x : a.elems())
    for (const Elem& y : a.elems()) {
      counts[g.mul(x, g.inverse(y))] += 1;
      budget.charge(counts.size(), "quotient counts");
    }
  std::vector<Elem> out;
  for (auto& [d, count] : counts) {
    // count >= c * |A|, exactly
    if (Rational(count) >= Rational(c.num * static_cast<std::int64_t>(a.size()), c.den))
      out.push_back(d);
  }
  return GroupSet(g, std::move(out));
}

unsigned long long count_product_tuples(const GroupSet& base, int m, bool alternating,
                                        const GroupSet& target, const Budget& budget) {
  const Group& g = base.group();
  std::unordered_map<Elem, unsigned __int128, ElemHash> dist;
  dist[g.identity()] = 1;
  for (int step = 1; step <= m; ++step) {
    std::unordered_map<Elem, unsigned __int128, ElemHash> next;
    bool invert = alternating && step % 2 == 0;
    for (const auto& [p, c] : dist)
      for (const Elem& x : base.elems()) {
        Elem q = invert ? g.mul(p, g.inverse(x)) : g.mul(p, x);
        next[q] += c;
        budget.charge(next.size(), "tuple distribution support");
      }
    dist.swap(next);
  }
  unsigned __int128 good = 0;
  for (const auto& [p, c] : dist)
    if (target.contains(p)) good += c;
  if (good > static_cast<unsigned __int128>(~0ULL))
    throw budget_error("tuple count exceeds 64 bits");
  return static_cast<unsigned long long>(good);
}

namespace {

TupleCheck verify_tuples(const GroupSet& base, int k, bool alternating, const GroupSet& target,
                         const Rational& eps, const Budget& budget, std::uint64_t seed) {
  TupleCheck check;
  check.k = k;
  int m = alternating ? 2 * k : k;
  check.total = std::pow(static_cast<long double>(base.size()), m);
  try {
    check.good = count_product_tuples(base, m, alternating, target, budget);
    check.exact = true;
    check.fraction = static_cast<double>(static_cast<long double>(check.good) / check.total);
    // pass iff good >= (1 - eps) * |base|^m, exactly
    unsigned __int128 total = 1;
    for (int i = 0; i < m; ++i) total *= base.size();
    unsigned __int128 lhs =
        static_cast<unsigned __int128>(check.good) * static_cast<unsigned __int128>(eps.den);
    unsigned __int128 rhs = static_cast<unsigned __int128>(eps.den - eps.num) * total;
    check.pass = lhs >= rhs;
    return check;
  } catch (const budget_error&) {
    // Sampled fallback, flagged: 1e6 random tuples, 99% binomial lower bound.
    const Group& g = base.group();
    Rng rng(seed);
    const int samples = 1'000'000;
    int good = 0;
    for (int t = 0; t < samples; ++t) {
      Elem p = g.identity();
      for (int step = 1; step <= m; ++step) {
        const Elem& x = base.elems()[rng.below(base.size())];
        p = (alternating && step % 2 == 0) ? g.mul(p, g.inverse(x)) : g.mul(p, x);
      }
      if (target.contains(p)) ++good;
    }
    check.exact = false;
    check.good = static_cast<unsigned long long>(good);
    check.fraction = static_cast<double>(good) / samples;
    double se = std::sqrt(std::max(check.fraction * (1 - check.fraction), 1e-12) / samples);
    check.confidence_low = check.fraction - 2.576 * se;
    check.pass = check.confidence_low >= 1.0 - eps.value();
    return check;
  }
}

}  // namespace

BsgReport bsg_refine(const GroupSet& a, const Rational& k_bound, int k0, const Rational& eps,
                     std::uint64_t seed, const Budget& budget) {
  if (a.empty()) throw error("bsg_refine of an empty set");
  const Group& g = a.group();
  BsgReport report;
  GroupSet quotients = product_set(a, a.inverse_set(), budget);
  if (Rational(static_cast<std::int64_t>(quotients.size())) >
      Rational(k_bound.num * static_cast<std::int64_t>(a.size()), k_bound.den))
    report.notes.push_back("quotient-set bound |AA^-1| <= K|A| fails; proceeding anyway");

  // Popularity grid: the Ruzsa threshold 1/(2K) first, then stricter cuts
  // that concentrate D when the loose set fails verification downstream.
  std::vector<Rational> popularity_grid{Rational(k_bound.den, 2 * k_bound.num), Rational(1, 8),
                                        Rational(1, 4), Rational(1, 2)};
  std::size_t cell_floor = a.size() <= 1 ? 1 : std::max<std::size_t>(2, a.size() / 64);
  for (const Rational& popularity : popularity_grid) {
  GroupSet d = popular_quotients(a, popularity, budget);
  if (d.empty()) continue;

  // Tripartite incidence system: class 0 = D, classes 1, 2 = A.
  KPartiteSystem sys;
  sys.class_sizes = {d.size(), a.size(), a.size()};
  BipartiteGraph e01(d.size(), a.size()), e02(d.size(), a.size());
  for (std::size_t di = 0; di < d.size(); ++di) {
    const Elem& dd = d.elems()[di];
    Elem dinv = g.inverse(dd);
    for (std::size_t ai = 0; ai < a.size(); ++ai) {
      const Elem& aa = a.elems()[ai];
      if (a.contains(g.mul(dinv, aa))) e01.set_edge(di, ai, true);   // d = a1 (d^-1 a1)^-1
      if (a.contains(g.mul(dd, aa))) e02.set_edge(di, ai, true);     // d = (d a2) a2^-1
    }
  }
  sys.edges[{0, 1}] = e01;
  sys.edges[{0, 2}] = e02;

  Rational eps_reg(eps.num, eps.den * 8);
  RegularityPartition part = regularity_partition(sys, eps_reg, 64, seed);
  report.partition_target_met = part.target_met;
  report.irregular_fraction = part.irregular_fraction;

  // Rank the class-0 cells: prefer cells whose pairs are regular and dense.
  Rational density_floor(eps.num, eps.den * 4);
  struct CellScore {
    std::size_t idx;
    double score;
    std::size_t size;
  };
  std::vector<CellScore> ranked;
  for (std::size_t bi = 0; bi < part.blocks[0].size(); ++bi) {
    if (part.blocks[0][bi].empty()) continue;
    double good_pairs = 0, pairs = 0;
    for (const BlockPairVerdict& pv : part.pair_verdicts) {
      if (pv.ci != 0 || pv.bi != bi) continue;
      pairs += 1;
      if (pv.status != RegularityStatus::witnessed_irregular && pv.density >= density_floor)
        good_pairs += 1;
    }
    ranked.push_back({bi, pairs == 0 ? 0.0 : good_pairs / pairs, part.blocks[0][bi].size()});
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const CellScore& x, const CellScore& y) {
    if (x.score != y.score) return x.score > y.score;
    return x.size > y.size;
  });

  // The whole popular-quotient set goes first: when it verifies outright the
  // cell selection has nothing to repair. Partition cells follow by rank.
  std::vector<GroupSet> candidates{d};
  for (const CellScore& cell : ranked) {
    std::vector<Elem> elems;
    for (std::uint32_t v : part.blocks[0][cell.idx]) elems.push_back(d.elems()[v]);
    candidates.push_back(GroupSet(g, std::move(elems)));
  }
  for (const GroupSet& candidate : candidates) {
    if (candidate.size() < cell_floor) continue;  // vacuous tiny cells
    ++report.cells_tried;
    std::vector<TupleCheck> checks;
    bool all_pass = true;
    for (int k = 1; k <= k0; ++k) {
      TupleCheck check = verify_tuples(candidate, k, true, quotients, eps, budget, seed + static_cast<std::uint64_t>(k));
      all_pass = all_pass && check.pass;
      checks.push_back(check);
      if (!all_pass) break;
    }
    if (all_pass) {
      report.a_prime = candidate;
      report.checks = std::move(checks);
      report.ratio = Rational(static_cast<std::int64_t>(candidate.size()),
                              static_cast<std::int64_t>(a.size()));
      return report;
    }
  }
  }
  throw verification_error("bsg_refine: no cell passes the goodness filter; consider larger eps");
}

BsgSymReport bsg_symmetrize(const GroupSet& a, const Rational& k_bound, int k0,
                            const Rational& eps, std::uint64_t seed, int max_retries,
                            const Budget& budget) {
  const Group& g = a.group();
  BsgSymReport rep;
  rep.refine = bsg_refine(a, k_bound, k0, eps, seed, budget);
  const GroupSet& aprime = rep.refine.a_prime;
  GroupSet quotients = product_set(a, a.inverse_set(), budget);
  std::size_t n = aprime.size();

  Rng rng(seed ^ 0x5eedbeefULL);
  for (int attempt = 1; attempt <= max_retries; ++attempt) {
    rep.attempts = attempt;
    // a_1 .. a_{2n+1} drawn uniformly from A'; d_j = a_{2j} a_{2j+1}^{-1} and
    // its mirror image, j = 1..n.
    std::vector<Elem> draws;
    for (std::size_t i = 0; i < 2 * n + 1; ++i)
      draws.push_back(aprime.elems()[rng.below(n)]);
    std::vector<Elem> ds;
    std::unordered_map<Elem, std::int64_t, ElemHash> mu;
    for (std::size_t j = 1; j <= n; ++j) {
      Elem d1 = g.mul(draws[2 * j - 1], g.inverse(draws[2 * j]));
      Elem d2 = g.inverse(d1);
      ds.push_back(d1);
      ds.push_back(d2);
      mu[d1] += 1;
      mu[d2] += 1;
    }
    std::uint64_t spread = 0;
    for (auto& [d, count] : mu) spread += static_cast<std::uint64_t>(count * count);
    rep.spread_value = spread;
    rep.mark_spread_ok = spread <= 24 * n;

    // Few bad index tuples: exact via the multiplicity-weighted distribution.
    rep.mark_tuples_ok = true;
    for (int k = 1; k <= k0 && rep.mark_tuples_ok; ++k) {
      std::unordered_map<Elem, unsigned __int128, ElemHash> dist;
      dist[g.identity()] = 1;
      for (int step = 0; step < k; ++step) {
        std::unordered_map<Elem, unsigned __int128, ElemHash> next;
        for (const auto& [p, c] : dist)
          for (const auto& [dd, count] : mu)
            next[g.mul(p, dd)] += c * static_cast<unsigned __int128>(count);
        dist.swap(next);
      }
      unsigned __int128 good = 0, total = 1;
      for (int i = 0; i < k; ++i) total *= 2 * n;
      for (const auto& [p, c] : dist)
        if (quotients.contains(p)) good += c;
      unsigned __int128 bad = total - good;
      // bad <= 5 eps (2n)^k, exactly; the factor sits above the mean so the
      // Markov retry loop accepts with constant probability
      rep.mark_tuples_ok = bad * static_cast<unsigned __int128>(eps.den) <=
                           5 * static_cast<unsigned __int128>(eps.num) * total;
    }
    if (!rep.mark_spread_ok || !rep.mark_tuples_ok) continue;

    std::vector<Elem> delems = ds;
    delems.push_back(g.identity());
    GroupSet dset(g, std::move(delems));
    if (2 * dset.size() < n) continue;  // degenerate draw, resample

    std::vector<TupleCheck> checks;
    bool all_pass = true;
    for (int k = 1; k <= k0; ++k) {
      TupleCheck check = verify_tuples(dset, k, false, quotients, eps, budget, seed + 77 * static_cast<std::uint64_t>(k));
      all_pass = all_pass && check.pass;
      checks.push_back(check);
    }
    if (all_pass) {
      rep.d = dset;
      rep.checks = std::move(checks);
      rep.pass = true;
      return rep;
    }
  }
  rep.pass = false;
  return rep;
}

}  // namespace solv
