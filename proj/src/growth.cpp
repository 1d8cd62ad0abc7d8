#include "solv/growth.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <unordered_set>

namespace solv {

namespace {

GroupSet symmetric_generators(const GroupSet& s) {
  return s.union_with(s.inverse_set()).with_identity();
}

// Frontier BFS; returns the ball sizes at every radius up to r.
std::vector<GroupSet> ball_levels(const GroupSet& s, int r, const Budget& budget) {
  const Group& g = s.group();
  GroupSet gens = symmetric_generators(s);
  std::unordered_set<Elem, ElemHash> seen;
  std::vector<Elem> frontier{g.identity()};
  seen.insert(g.identity());
  std::vector<GroupSet> levels;
  levels.push_back(GroupSet(g, {g.identity()}));
  std::vector<Elem> all{g.identity()};
  for (int depth = 1; depth <= r; ++depth) {
    std::vector<Elem> next;
    for (const Elem& x : frontier)
      for (const Elem& e : gens.elems()) {
        Elem y = g.mul(x, e);
        if (seen.insert(y).second) {
          next.push_back(y);
          budget.charge(seen.size(), "ball enumeration");
        }
      }
    all.insert(all.end(), next.begin(), next.end());
    levels.push_back(GroupSet(g, all));
    frontier = std::move(next);
    if (frontier.empty()) {
      while (static_cast<int>(levels.size()) <= r) levels.push_back(levels.back());
      break;
    }
  }
  return levels;
}

double window_slope(const std::vector<std::size_t>& sizes, int hi) {
  int lo = std::max(1, hi / 2);
  if (hi <= lo) return 0.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (int r = lo; r <= hi; ++r) {
    double x = std::log(static_cast<double>(r));
    double y = std::log(static_cast<double>(sizes[static_cast<std::size_t>(r)]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  double denom = count * sxx - sx * sx;
  if (std::abs(denom) < 1e-12) return 0.0;
  return (count * sxy - sx * sy) / denom;
}

}  // namespace

GroupSet ball(const GroupSet& s, int r, const Budget& budget) {
  auto levels = ball_levels(s, r, budget);
  return levels.back();
}

GrowthProfile growth_profile(const GroupSet& s, int r_max, const Budget& budget) {
  GrowthProfile prof;
  try {
    auto levels = ball_levels(s, r_max, budget);
    for (const GroupSet& level : levels) prof.sizes.push_back(level.size());
  } catch (const budget_error&) {
    prof.partial = true;
  }
  if (prof.sizes.size() < 2) {
    prof.classification = GrowthClass::inconclusive;
    return prof;
  }
  for (std::size_t r = 0; r + 1 < prof.sizes.size(); ++r)
    prof.ratios.push_back(static_cast<double>(prof.sizes[r + 1]) /
                          static_cast<double>(prof.sizes[r]));
  int top = static_cast<int>(prof.sizes.size()) - 1;
  prof.degree_estimate = window_slope(prof.sizes, top);
  int tail = std::max<int>(1, static_cast<int>(prof.ratios.size()) / 2);
  double geo = 1.0;
  for (std::size_t i = prof.ratios.size() - static_cast<std::size_t>(tail);
       i < prof.ratios.size(); ++i)
    geo *= prof.ratios[i];
  prof.ratio_estimate = std::pow(geo, 1.0 / tail);

  bool saturated = prof.sizes[prof.sizes.size() - 1] == prof.sizes[prof.sizes.size() - 2];
  bool exponential = true;
  for (std::size_t i = prof.ratios.size() - static_cast<std::size_t>(tail);
       i < prof.ratios.size(); ++i)
    if (prof.ratios[i] < 1.15) exponential = false;
  double s1 = window_slope(prof.sizes, top);
  double s2 = window_slope(prof.sizes, std::max(2, top / 2));
  double s3 = window_slope(prof.sizes, std::max(2, top / 4));
  bool polynomial = std::abs(s1 - s2) < 0.25 && std::abs(s2 - s3) < 0.25;
  if (saturated)
    prof.classification = GrowthClass::saturated;
  else if (exponential)
    prof.classification = GrowthClass::exponential_like;
  else if (polynomial)
    prof.classification = GrowthClass::polynomial_like;
  else
    prof.classification = GrowthClass::inconclusive;
  return prof;
}

ScaleReport small_doubling_scale(const GroupSet& s, std::int64_t big_r, const Budget& budget) {
  std::int64_t lo = static_cast<std::int64_t>(std::ceil(std::pow(static_cast<double>(big_r), 0.8)));
  std::int64_t hi = static_cast<std::int64_t>(std::floor(std::pow(static_cast<double>(big_r), 0.9)));
  if (lo > hi) std::swap(lo, hi);
  auto levels = ball_levels(s, static_cast<int>(2 * hi), budget);
  ScaleReport rep;
  bool first = true;
  for (std::int64_t r = lo; r <= hi; ++r) {
    Rational ratio(static_cast<std::int64_t>(levels[static_cast<std::size_t>(2 * r)].size()),
                   static_cast<std::int64_t>(levels[static_cast<std::size_t>(r)].size()));
    rep.scanned.emplace_back(r, ratio);
    if (first || ratio < rep.doubling) {
      rep.r0 = r;
      rep.doubling = ratio;
      first = false;
    }
  }
  return rep;
}

CoveringReport covering_iteration(const GroupSet& s, const GroupSet& a_candidate, int r0,
                                  int n_cap, int exponent_cap, const Budget& budget) {
  const Group& g = s.group();
  CoveringReport rep;
  GroupSet b0 = ball(s, r0, budget);

  auto signed_power = [&](int k) { return iterated_set(a_candidate, k, true, budget); };

  int n = 1;
  GroupSet an = signed_power(n);
  // Greedy cover of the ball by translates of A^{+-n}.
  std::vector<Elem> xs;
  {
    std::unordered_set<Elem, ElemHash> covered;
    Elem anchor = g.inverse(an.elems().front());
    for (const Elem& d : b0.elems()) {
      if (covered.count(d)) continue;
      Elem x = g.mul(d, anchor);
      xs.push_back(x);
      for (const Elem& a : an.elems()) covered.insert(g.mul(x, a));
    }
  }
  rep.trace.push_back("initial cover: " + std::to_string(xs.size()) + " translates at n=1");

  // Merge translates whose 10n-fattenings overlap; each merge bumps n by 21.
  GroupSet a20 = signed_power(20 * n);
  bool merged = true;
  while (merged) {
    merged = false;
    for (std::size_t i = 0; i < xs.size() && !merged; ++i)
      for (std::size_t j = i + 1; j < xs.size() && !merged; ++j) {
        // x_i A^{+-10n} meets x_j A^{+-10n} iff x_i^{-1} x_j lies in A^{+-20n}
        if (a20.contains(g.mul(g.inverse(xs[i]), xs[j]))) {
          xs.erase(xs.begin() + static_cast<std::ptrdiff_t>(j));
          if (n > n_cap / 21) {
            rep.trace.push_back("n exceeded the cap during merging");
            rep.n = n;
            rep.x_prime = GroupSet(g, xs);
            return rep;
          }
          n *= 21;
          an = signed_power(n);
          a20 = signed_power(20 * n);
          merged = true;
          rep.trace.push_back("merge: dropped one translate, n=" + std::to_string(n));
        }
      }
  }
  rep.n = n;
  rep.x_prime = GroupSet(g, xs);

  // Re-verify pairwise disjointness at separation exponent 10n.
  rep.disjoint_verified = true;
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = i + 1; j < xs.size(); ++j)
      if (a20.contains(g.mul(g.inverse(xs[i]), xs[j]))) rep.disjoint_verified = false;

  // Incidence sets X'_r stabilize at some r1.
  auto incident = [&](const Elem& x, const GroupSet& ball_r) {
    for (const Elem& a : an.elems())
      if (ball_r.contains(g.mul(x, a))) return true;
    return false;
  };
  std::vector<std::size_t> prev_set;
  for (int r = 0; r <= r0 + 2; ++r) {
    GroupSet br = ball(s, r, budget);
    std::vector<std::size_t> cur;
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (incident(xs[i], br)) cur.push_back(i);
    if (r > 0 && cur == prev_set) {
      rep.r1 = r - 1;
      rep.stabilization_verified = true;
      break;
    }
    prev_set = std::move(cur);
  }
  if (!rep.stabilization_verified) {
    rep.trace.push_back("incidence sets did not stabilize below r0 + 2");
    return rep;
  }
  std::vector<Elem> xr1;
  for (std::size_t i : prev_set) xr1.push_back(xs[i]);
  rep.trace.push_back("stabilized with " + std::to_string(xr1.size()) + " translates at r1=" +
                      std::to_string(rep.r1));
  if (xr1.empty()) return rep;

  // Smallest exponent m with S * X'_{r1} inside X'_{r1} * A^{+-m}.
  GroupSet sgen = s.union_with(s.inverse_set()).with_identity();
  GroupSet am(g, {g.identity()});
  for (int m = 1; m <= exponent_cap; ++m) {
    am = signed_power(m);
    bool all_in = true;
    for (const Elem& se : sgen.elems()) {
      for (const Elem& x : xr1) {
        bool hit = false;
        Elem sx = g.mul(se, x);
        for (const Elem& xp : xr1)
          if (am.contains(g.mul(g.inverse(xp), sx))) {
            hit = true;
            break;
          }
        if (!hit) {
          all_in = false;
          break;
        }
      }
      if (!all_in) break;
    }
    if (all_in) {
      rep.xr1_exponent = m;
      rep.xr1_verified = true;
      break;
    }
  }
  return rep;
}

}  // namespace solv
