#include "solv/nilprog.hpp"

#include "solv/series.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <unordered_set>

namespace solv {

namespace {

std::vector<std::int64_t> torsion_tuple(const TorsionFactor& t, std::size_t idx) {
  std::vector<std::int64_t> xs(t.orders.size());
  for (std::size_t i = t.orders.size(); i-- > 0;) {
    xs[i] = static_cast<std::int64_t>(idx % static_cast<std::size_t>(t.orders[i]));
    idx /= static_cast<std::size_t>(t.orders[i]);
  }
  return xs;
}

std::size_t torsion_index(const TorsionFactor& t, const std::vector<std::int64_t>& xs) {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < t.orders.size(); ++i) {
    std::int64_t v = ((xs[i] % t.orders[i]) + t.orders[i]) % t.orders[i];
    idx = idx * static_cast<std::size_t>(t.orders[i]) + static_cast<std::size_t>(v);
  }
  return idx;
}

struct FactorRef {
  int level;  // printed level, 1-based
  int j;      // 0 = torsion, else interval index
  const TorsionFactor* tor = nullptr;
  const IntervalFactor* iv = nullptr;
};

// Printed product order: i = l down to 1, j = 0 up to r_i.
std::vector<FactorRef> product_order(const CosetNilprogression& c) {
  std::vector<FactorRef> out;
  for (int i = c.derived_length(); i >= 1; --i) {
    const Level& lev = c.levels[static_cast<std::size_t>(i - 1)];
    out.push_back({i, 0, &lev.torsion, nullptr});
    for (std::size_t j = 0; j < lev.intervals.size(); ++j)
      out.push_back({i, static_cast<int>(j + 1), nullptr, &lev.intervals[j]});
  }
  return out;
}

std::vector<Elem> factor_elems(const FactorRef& f) {
  if (f.tor) return f.tor->table;
  return f.iv->table;
}

GroupSet multiply_factor(const Group& g, const GroupSet& s, const std::vector<Elem>& factor,
                         const Budget& budget) {
  std::unordered_set<Elem, ElemHash> seen;
  seen.reserve(s.size() * 2);
  for (const Elem& x : s.elems())
    for (const Elem& f : factor) {
      seen.insert(g.mul(x, f));
      budget.charge(seen.size(), "nilprogression product");
    }
  return GroupSet(g, std::vector<Elem>(seen.begin(), seen.end()));
}

// A_i = phi_{i,0}(H_{i,0}) ... phi_{i,r_i}(H_{i,r_i}).
GroupSet level_product(const CosetNilprogression& c, int i, const Budget& budget) {
  const Level& lev = c.levels[static_cast<std::size_t>(i - 1)];
  GroupSet s(c.ambient, {c.ambient.identity()});
  s = multiply_factor(c.ambient, s, lev.torsion.table, budget);
  for (const IntervalFactor& f : lev.intervals) s = multiply_factor(c.ambient, s, f.table, budget);
  return s;
}

// A_{>=i} = A_l ... A_i; index l+1 gives {1}.
std::vector<GroupSet> suffix_products(const CosetNilprogression& c, const Budget& budget) {
  int l = c.derived_length();
  std::vector<GroupSet> out(static_cast<std::size_t>(l + 2), GroupSet(c.ambient, {c.ambient.identity()}));
  for (int i = l; i >= 1; --i)
    out[static_cast<std::size_t>(i)] =
        product_set(out[static_cast<std::size_t>(i + 1)], level_product(c, i, budget), budget);
  return out;
}

bool is_power_map(const Group& g, const IntervalFactor& f, Elem* base = nullptr) {
  if (f.n < 1) return false;
  Elem b = f.at(1);
  for (std::int64_t k = -f.n; k <= f.n; ++k)
    if (!(f.at(k) == g.pow(b, k))) return false;
  if (base) *base = b;
  return true;
}

std::vector<Elem> factor_power_set(const Group& g, const FactorRef& f, std::int64_t m,
                                   const Budget& budget) {
  if (f.tor) return f.tor->table;  // exponent pinned to 1
  if (m <= 0) return {g.identity()};
  Elem base;
  if (is_power_map(g, *f.iv, &base)) {
    std::int64_t reach = m * f.iv->n;
    std::vector<Elem> out;
    out.reserve(static_cast<std::size_t>(2 * reach + 1));
    Elem cur = g.identity();
    out.push_back(cur);
    Elem fwd = cur, bwd = cur;
    Elem binv = g.inverse(base);
    for (std::int64_t k = 1; k <= reach; ++k) {
      fwd = g.mul(fwd, base);
      bwd = g.mul(bwd, binv);
      out.push_back(fwd);
      out.push_back(bwd);
      budget.charge(out.size(), "factor power set");
    }
    return out;
  }
  GroupSet acc(g, f.iv->table);
  for (std::int64_t i = 1; i < m; ++i) acc = multiply_factor(g, acc, f.iv->table, budget);
  return acc.elems();
}

}  // namespace

std::vector<int> CosetNilprogression::ranks() const {
  std::vector<int> out;
  for (const Level& lev : levels) out.push_back(static_cast<int>(lev.intervals.size()));
  return out;
}

std::int64_t CosetNilprogression::volume() const {
  std::int64_t v = 1;
  for (const Level& lev : levels) {
    v *= static_cast<std::int64_t>(lev.torsion.size());
    for (const IntervalFactor& f : lev.intervals) v *= static_cast<std::int64_t>(f.size());
  }
  return v;
}

void CosetNilprogression::check_shape() const {
  for (const Level& lev : levels) {
    if (lev.torsion.table.size() != lev.torsion.size())
      throw error("torsion table size mismatch");
    for (const Elem& e : lev.torsion.table) ambient.validate(e);
    for (const IntervalFactor& f : lev.intervals) {
      if (f.n < 0 || f.table.size() != f.size()) throw error("interval table size mismatch");
      for (const Elem& e : f.table) ambient.validate(e);
    }
  }
}

DilationTuple DilationTuple::ones(const CosetNilprogression& c) {
  DilationTuple t;
  for (const Level& lev : c.levels)
    t.m.emplace_back(lev.intervals.size(), 1);
  return t;
}

std::int64_t DilationTuple::total() const {
  std::int64_t s = 0;
  for (const auto& row : m)
    for (std::int64_t v : row) s += v;
  return s;
}

std::string DilationTuple::str() const {
  std::string out = "(";
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i) out += ";";
    for (std::size_t j = 0; j < m[i].size(); ++j) {
      if (j) out += ",";
      out += std::to_string(m[i][j]);
    }
  }
  return out + ")";
}

AxiomReport axiom_check(const CosetNilprogression& c, const Budget& budget) {
  c.check_shape();
  const Group& g = c.ambient;
  int l = c.derived_length();
  AxiomReport rep;
  rep.normalized_ok = rep.local_add_ok = rep.level_comm_ok = rep.cross_comm_ok = true;
  auto fail = [&](bool& flag, AxiomWitness w) {
    flag = false;
    if (!rep.first_failure) rep.first_failure = std::move(w);
  };

  // phi_{i,j}(0) = 1 for every factor.
  for (int i = 1; i <= l && rep.normalized_ok; ++i) {
    const Level& lev = c.levels[static_cast<std::size_t>(i - 1)];
    if (!(lev.torsion.table[0] == g.identity()))
      fail(rep.normalized_ok, {"normalized", i, 0, 0, 0, {}, {}, "torsion table at 0"});
    for (std::size_t j = 0; j < lev.intervals.size() && rep.normalized_ok; ++j)
      if (!(lev.intervals[j].at(0) == g.identity()))
        fail(rep.normalized_ok,
             {"normalized", i, static_cast<int>(j + 1), 0, 0, {}, {}, "interval table at 0"});
  }

  std::vector<GroupSet> tails = suffix_products(c, budget);

  auto in_translate = [&](const GroupSet& s, const Elem& x, const Elem& t) {
    return s.contains(g.mul(x, g.inverse(t)));  // x in s * t
  };

  // Local additivity inside one factor.
  for (int i = 1; i <= l; ++i) {
    const Level& lev = c.levels[static_cast<std::size_t>(i - 1)];
    const GroupSet& tail = tails[static_cast<std::size_t>(i + 1)];
    const TorsionFactor& tor = lev.torsion;
    for (std::size_t a = 0; a < tor.table.size() && rep.local_add_ok; ++a)
      for (std::size_t b = 0; b < tor.table.size() && rep.local_add_ok; ++b) {
        auto ta = torsion_tuple(tor, a), tb = torsion_tuple(tor, b);
        std::vector<std::int64_t> sum(ta.size());
        for (std::size_t q = 0; q < ta.size(); ++q) sum[q] = ta[q] + tb[q];
        const Elem& target = tor.table[torsion_index(tor, sum)];
        if (!in_translate(tail, g.mul(tor.table[a], tor.table[b]), target))
          fail(rep.local_add_ok, {"local-add", i, 0, 0, 0, ta, tb, "torsion additivity"});
      }
    for (std::size_t j = 0; j < lev.intervals.size(); ++j) {
      const IntervalFactor& f = lev.intervals[j];
      for (std::int64_t n = -f.n; n <= f.n && rep.local_add_ok; ++n)
        for (std::int64_t np = -f.n; np <= f.n && rep.local_add_ok; ++np) {
          if (n + np < -f.n || n + np > f.n) continue;
          if (!in_translate(tail, g.mul(f.at(n), f.at(np)), f.at(n + np)))
            fail(rep.local_add_ok,
                 {"local-add", i, static_cast<int>(j + 1), 0, 0, {n}, {np}, "interval additivity"});
        }
    }
  }

  // Same-level commutators land in the deeper tail.
  for (int i = 1; i <= l; ++i) {
    const Level& lev = c.levels[static_cast<std::size_t>(i - 1)];
    const GroupSet& tail = tails[static_cast<std::size_t>(i + 1)];
    int r = static_cast<int>(lev.intervals.size());
    for (int j = 0; j <= r && rep.level_comm_ok; ++j)
      for (int jp = 0; jp <= r && rep.level_comm_ok; ++jp) {
        std::vector<Elem> lhs = j == 0 ? lev.torsion.table : lev.intervals[static_cast<std::size_t>(j - 1)].table;
        std::vector<Elem> rhs = jp == 0 ? lev.torsion.table : lev.intervals[static_cast<std::size_t>(jp - 1)].table;
        for (std::size_t a = 0; a < lhs.size() && rep.level_comm_ok; ++a)
          for (std::size_t b = 0; b < rhs.size() && rep.level_comm_ok; ++b)
            if (!tail.contains(g.commutator(lhs[a], rhs[b])))
              fail(rep.level_comm_ok, {"level-comm", i, j, i, jp,
                                       {static_cast<std::int64_t>(a)},
                                       {static_cast<std::int64_t>(b)},
                                       "commutator outside deeper levels"});
      }
  }

  // Cross-level commutators: [phi_{i',j'}(n'), phi_{i,j}(n)] for i' < i must
  // land in A_{>=i+1} * phi_{i,0}(H_{i,0}) ... phi_{i,max(j-1,0)}(H_{i,max(j-1,0)}).
  for (int i = 2; i <= l; ++i) {
    const Level& lev = c.levels[static_cast<std::size_t>(i - 1)];
    int r = static_cast<int>(lev.intervals.size());
    for (int j = 0; j <= r && rep.cross_comm_ok; ++j) {
      GroupSet rhs = tails[static_cast<std::size_t>(i + 1)];
      rhs = multiply_factor(g, rhs, lev.torsion.table, budget);
      for (int q = 1; q <= std::max(j - 1, 0) && q <= r; ++q)
        rhs = multiply_factor(g, rhs, lev.intervals[static_cast<std::size_t>(q - 1)].table, budget);
      std::vector<Elem> upper =
          j == 0 ? lev.torsion.table : lev.intervals[static_cast<std::size_t>(j - 1)].table;
      for (int ip = 1; ip < i && rep.cross_comm_ok; ++ip) {
        const Level& lower = c.levels[static_cast<std::size_t>(ip - 1)];
        int rp = static_cast<int>(lower.intervals.size());
        for (int jp = 0; jp <= rp && rep.cross_comm_ok; ++jp) {
          std::vector<Elem> lowf =
              jp == 0 ? lower.torsion.table : lower.intervals[static_cast<std::size_t>(jp - 1)].table;
          for (std::size_t b = 0; b < lowf.size() && rep.cross_comm_ok; ++b)
            for (std::size_t a = 0; a < upper.size() && rep.cross_comm_ok; ++a)
              if (!rhs.contains(g.commutator(lowf[b], upper[a])))
                fail(rep.cross_comm_ok, {"cross-comm", ip, jp, i, j,
                                         {static_cast<std::int64_t>(b)},
                                         {static_cast<std::int64_t>(a)},
                                         "cross-level commutator escapes"});
        }
      }
    }
  }
  return rep;
}

GroupSet enumerate_cnp(const CosetNilprogression& c, const Budget& budget) {
  c.check_shape();
  GroupSet s(c.ambient, {c.ambient.identity()});
  for (const FactorRef& f : product_order(c)) s = multiply_factor(c.ambient, s, factor_elems(f), budget);
  return s;
}

GroupSet dilate(const CosetNilprogression& c, const DilationTuple& m, const Budget& budget) {
  c.check_shape();
  GroupSet s(c.ambient, {c.ambient.identity()});
  for (const FactorRef& f : product_order(c)) {
    std::int64_t power =
        f.tor ? 1 : m.m[static_cast<std::size_t>(f.level - 1)][static_cast<std::size_t>(f.j - 1)];
    s = multiply_factor(c.ambient, s, factor_power_set(c.ambient, f, power, budget), budget);
  }
  return s;
}

DilateOracle::DilateOracle(const CosetNilprogression& c, const DilationTuple& m,
                           const Budget& budget)
    : g_(c.ambient), prefix_(c.ambient, {c.ambient.identity()}) {
  std::vector<std::vector<Elem>> power_sets;
  for (const FactorRef& f : product_order(c)) {
    std::int64_t power =
        f.tor ? 1 : m.m[static_cast<std::size_t>(f.level - 1)][static_cast<std::size_t>(f.j - 1)];
    power_sets.push_back(factor_power_set(g_, f, power, budget));
  }
  std::size_t k = 0;
  Budget prefix_budget;
  prefix_budget.max_elems = std::min<std::size_t>(budget.max_elems, 600'000);
  for (; k < power_sets.size(); ++k) {
    if (prefix_.size() * power_sets[k].size() > 4 * prefix_budget.max_elems) break;
    try {
      prefix_ = multiply_factor(g_, prefix_, power_sets[k], prefix_budget);
    } catch (const budget_error&) {
      break;
    }
  }
  for (; k < power_sets.size(); ++k) suffix_.push_back(GroupSet(g_, power_sets[k]));
}

bool DilateOracle::suffix_search(const Elem& e, std::size_t k) const {
  if (k == 0) return prefix_.contains(e);
  const GroupSet& f = suffix_[k - 1];
  for (const Elem& fe : f.elems())
    if (suffix_search(g_.mul(e, g_.inverse(fe)), k - 1)) return true;
  return false;
}

bool DilateOracle::contains(const Elem& e) const { return suffix_search(e, suffix_.size()); }

std::optional<DilationTuple> minimal_containing_dilation(const CosetNilprogression& c,
                                                         const GroupSet& s, std::int64_t cap,
                                                         const Budget& budget, Elem* uncovered) {
  std::vector<std::pair<std::size_t, std::size_t>> coords;
  DilationTuple m = DilationTuple::ones(c);
  for (std::size_t i = 0; i < m.m.size(); ++i)
    for (std::size_t j = 0; j < m.m[i].size(); ++j) {
      coords.emplace_back(i, j);
      m.m[i][j] = cap;
    }

  auto covers = [&](const DilationTuple& t, Elem* witness) {
    DilateOracle oracle(c, t, budget);
    for (const Elem& e : s.elems())
      if (!oracle.contains(e)) {
        if (witness) *witness = e;
        return false;
      }
    return true;
  };

  if (!covers(m, uncovered)) return std::nullopt;
  for (auto [i, j] : coords) {
    std::int64_t lo = 0, hi = m.m[i][j];
    while (lo < hi) {
      std::int64_t mid = lo + (hi - lo) / 2;
      DilationTuple probe = m;
      probe.m[i][j] = mid;
      if (covers(probe, nullptr))
        hi = mid;
      else
        lo = mid + 1;
    }
    m.m[i][j] = lo;
  }
  return m;
}

CoveringCertificate covering_certificate(const CosetNilprogression& c, const DilationTuple& m,
                                         const Budget& budget) {
  const Group& g = c.ambient;
  GroupSet big = dilate(c, m, budget);
  GroupSet base = enumerate_cnp(c, budget);
  std::unordered_set<Elem, ElemHash> covered;
  std::vector<Elem> xs;
  Elem anchor = g.inverse(base.elems().front());
  for (const Elem& d : big.elems()) {
    if (covered.count(d)) continue;
    Elem x = g.mul(d, anchor);
    xs.push_back(x);
    for (const Elem& a : base.elems()) covered.insert(g.mul(x, a));
  }
  CoveringCertificate cert;
  cert.X = GroupSet(g, std::move(xs));
  cert.verified = true;
  for (const Elem& d : big.elems()) {
    bool hit = false;
    for (const Elem& x : cert.X.elems())
      if (base.contains(g.mul(g.inverse(x), d))) {
        hit = true;
        break;
      }
    if (!hit) {
      cert.verified = false;
      break;
    }
  }
  return cert;
}

namespace {

struct CentralSplit {
  Elem base;           // central generator g with x*g = coordinate increment
  int axis = -1;       // payload axis incremented by base
  std::int64_t step = 0;
  std::int64_t n = 0;  // interval half-width
  std::size_t skip;    // index in product order
};

// Heisenberg-only: an interval factor that is a power map of a pure central
// element (0, 0, s). Right-multiplication by it increments payload axis 2.
std::optional<CentralSplit> find_central_interval(const CosetNilprogression& c) {
  if (c.ambient.kind() != Kind::heisenberg) return std::nullopt;
  auto order = product_order(c);
  std::optional<CentralSplit> best;
  for (std::size_t idx = 0; idx < order.size(); ++idx) {
    const FactorRef& f = order[idx];
    if (!f.iv || f.iv->n < 1) continue;
    Elem base;
    if (!is_power_map(c.ambient, *f.iv, &base)) continue;
    if (base[0] != 0 || base[1] != 0 || base[2] == 0) continue;
    if (!best || f.iv->n > best->n)
      best = CentralSplit{base, 2, base[2], f.iv->n, idx};
  }
  return best;
}

std::size_t central_count(const std::vector<Elem>& elems, std::int64_t halfwidth,
                          std::int64_t step) {
  // Group by (a, b) fiber and by residue of c mod |step|; count the union of
  // intervals of halfwidth*|step| around each value, in units of |step|.
  std::int64_t s = step < 0 ? -step : step;
  std::map<std::tuple<std::int64_t, std::int64_t, std::int64_t>, std::vector<std::int64_t>> fibers;
  for (const Elem& e : elems) {
    std::int64_t r = ((e[2] % s) + s) % s;
    fibers[{e[0], e[1], r}].push_back((e[2] - r) / s);
  }
  std::size_t total = 0;
  for (auto& [key, vals] : fibers) {
    std::sort(vals.begin(), vals.end());
    std::int64_t cur_lo = 0, cur_hi = -1;
    bool open = false;
    for (std::int64_t v : vals) {
      std::int64_t lo = v - halfwidth, hi = v + halfwidth;
      if (!open) {
        cur_lo = lo;
        cur_hi = hi;
        open = true;
      } else if (lo <= cur_hi + 1) {
        cur_hi = std::max(cur_hi, hi);
      } else {
        total += static_cast<std::size_t>(cur_hi - cur_lo + 1);
        cur_lo = lo;
        cur_hi = hi;
      }
    }
    if (open) total += static_cast<std::size_t>(cur_hi - cur_lo + 1);
  }
  return total;
}

double fit_slope(const std::vector<std::size_t>& sizes) {
  // Least squares on (log n, log size) over the trailing half.
  std::size_t start = sizes.size() / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t count = 0;
  for (std::size_t i = start; i < sizes.size(); ++i) {
    double x = std::log(static_cast<double>(i + 1));
    double y = std::log(static_cast<double>(sizes[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++count;
  }
  double denom = static_cast<double>(count) * sxx - sx * sx;
  if (std::abs(denom) < 1e-12) return 0.0;
  return (static_cast<double>(count) * sxy - sx * sy) / denom;
}

}  // namespace

GrowthCurve growth_curve_cnp(const CosetNilprogression& c, int n_max, const Budget& budget) {
  GrowthCurve curve;
  auto central = find_central_interval(c);
  if (central) {
    curve.used_central_fast_path = true;
    // A = Z * R with Z the central interval; A^{+-n} = Z^n * (R u R^-1 u 1)^n.
    GroupSet rest(c.ambient, {c.ambient.identity()});
    auto order = product_order(c);
    for (std::size_t idx = 0; idx < order.size(); ++idx) {
      if (idx == central->skip) continue;
      rest = multiply_factor(c.ambient, rest, factor_elems(order[idx]), budget);
    }
    GroupSet f = rest.union_with(rest.inverse_set()).with_identity();
    GroupSet fn = f;
    for (int n = 1; n <= n_max; ++n) {
      if (n > 1) fn = product_set(fn, f, budget);
      curve.sizes.push_back(central_count(fn.elems(), n * central->n, central->step));
    }
  } else {
    GroupSet a = enumerate_cnp(c, budget);
    GroupSet u = a.union_with(a.inverse_set()).with_identity();
    GroupSet cur = u;
    for (int n = 1; n <= n_max; ++n) {
      if (n > 1) cur = product_set(cur, u, budget);
      curve.sizes.push_back(cur.size());
    }
  }
  for (std::size_t i = 1; i < curve.sizes.size(); ++i)
    if (curve.sizes[i] < curve.sizes[i - 1]) curve.non_decreasing = false;
  curve.slope = fit_slope(curve.sizes);
  return curve;
}

GeneratedGroupReport generated_group_probe(const CosetNilprogression& c, const Budget& budget) {
  GeneratedGroupReport rep;
  GroupSet a = enumerate_cnp(c, budget);
  try {
    GroupSet closure = subgroup_closure(a, budget);
    rep.finite = true;
    rep.closure_size = closure.size();
    auto derived = finite_series(closure, SeriesKind::derived, 16, budget);
    rep.derived_length =
        derived.back().size() == 1 ? static_cast<int>(derived.size()) - 1 : -1;
    auto lower = finite_series(closure, SeriesKind::lower_central, 16, budget);
    rep.nilpotency_step = lower.back().size() == 1 ? static_cast<int>(lower.size()) - 1 : -1;
  } catch (const budget_error&) {
    rep.finite = false;
  }
  return rep;
}

CosetNilprogression build_helfgott1(std::int64_t p, std::int64_t n, std::int64_t r,
                                    std::int64_t s) {
  Group g = Group::ut3(p);
  if (n < 1) throw error("helfgott1 needs N >= 1");
  if (r % p == 0 || s % p == 0) throw error("helfgott1 needs invertible r, s");
  CosetNilprogression c;
  c.ambient = g;
  c.levels.resize(3);
  // level 1: the diagonal one-parameter interval
  Elem diag{r % p, s % p, 1, 0, 0, 0};
  {  // d3 = (r s)^{-1}
    std::int64_t rs = (r % p) * (s % p) % p;
    std::int64_t inv = 1;
    for (std::int64_t x = 1; x < p; ++x)
      if (rs * x % p == 1) inv = x;
    diag[2] = inv;
  }
  IntervalFactor f1;
  f1.n = n;
  for (std::int64_t k = -n; k <= n; ++k) f1.table.push_back(g.pow(diag, k));
  c.levels[0].torsion.table = {g.identity()};
  c.levels[0].intervals.push_back(std::move(f1));
  // level 2: H_{2,0} = F^2 at entries (0,1) and (1,2)
  TorsionFactor t2;
  t2.orders = {p, p};
  for (std::int64_t x = 0; x < p; ++x)
    for (std::int64_t y = 0; y < p; ++y) t2.table.push_back(Elem{1, 1, 1, x, 0, y});
  c.levels[1].torsion = std::move(t2);
  // level 3: H_{3,0} = F at the corner entry
  TorsionFactor t3;
  t3.orders = {p};
  for (std::int64_t z = 0; z < p; ++z) t3.table.push_back(Elem{1, 1, 1, 0, z, 0});
  c.levels[2].torsion = std::move(t3);
  return c;
}

CosetNilprogression build_helfgott2(std::int64_t p, std::int64_t n, std::int64_t m, std::int64_t r,
                                    std::int64_t s) {
  Group g = Group::ut3(p);
  if (n < 1 || m < 1) throw error("helfgott2 needs N, M >= 1");
  if (r % p == 0) throw error("helfgott2 needs invertible r");
  CosetNilprogression c;
  c.ambient = g;
  c.levels.resize(3);
  // level 1: diag(r^k, r^k, r^{-2k})
  Elem diag{r % p, r % p, 1, 0, 0, 0};
  {
    std::int64_t rr = (r % p) * (r % p) % p;
    std::int64_t inv = 1;
    for (std::int64_t x = 1; x < p; ++x)
      if (rr * x % p == 1) inv = x;
    diag[2] = inv;
  }
  IntervalFactor f1;
  f1.n = n;
  for (std::int64_t k = -n; k <= n; ++k) f1.table.push_back(g.pow(diag, k));
  c.levels[0].torsion.table = {g.identity()};
  c.levels[0].intervals.push_back(std::move(f1));
  // level 2: torsion F at entry (1,2); interval mapping q to the q*s
  // superdiagonal part
  TorsionFactor t2;
  t2.orders = {p};
  for (std::int64_t z = 0; z < p; ++z) t2.table.push_back(Elem{1, 1, 1, 0, 0, z});
  c.levels[1].torsion = std::move(t2);
  IntervalFactor f2;
  f2.n = m;
  for (std::int64_t q = -m; q <= m; ++q)
    f2.table.push_back(Elem{1, 1, 1, ((q * s) % p + p) % p, 0, 0});
  c.levels[1].intervals.push_back(std::move(f2));
  // level 3: torsion F at the corner
  TorsionFactor t3;
  t3.orders = {p};
  for (std::int64_t y = 0; y < p; ++y) t3.table.push_back(Elem{1, 1, 1, 0, y, 0});
  c.levels[2].torsion = std::move(t3);
  return c;
}

CosetNilprogression build_twostep(const Elem& e1, const Elem& e2, std::int64_t n) {
  Group g = Group::heisenberg();
  if (n < 1) throw error("twostep needs N >= 1");
  CosetNilprogression c;
  c.ambient = g;
  c.levels.resize(2);
  c.levels[0].torsion.table = {g.identity()};
  for (const Elem& e : {e1, e2}) {
    IntervalFactor f;
    f.n = n;
    for (std::int64_t k = -n; k <= n; ++k) f.table.push_back(g.pow(e, k));
    c.levels[0].intervals.push_back(std::move(f));
  }
  c.levels[1].torsion.table = {g.identity()};
  Elem z = g.commutator(e1, e2);
  IntervalFactor fz;
  fz.n = 100 * n * n;
  for (std::int64_t k = -fz.n; k <= fz.n; ++k) fz.table.push_back(g.pow(z, k));
  c.levels[1].intervals.push_back(std::move(fz));
  return c;
}

CosetNilprogression build_twostep(std::int64_t n) {
  return build_twostep(Elem{1, 0, 0}, Elem{0, 1, 0}, n);
}

CosetNilprogression from_coset_progression(const CosetProgression& cp) {
  cp.check();
  const Group& g = cp.ambient();
  CosetNilprogression c;
  c.ambient = g;
  c.levels.resize(1);
  auto decomp = cyclic_decomposition(cp.subgroup);
  TorsionFactor tor;
  for (auto& [gen, ord] : decomp) tor.orders.push_back(ord);
  std::size_t total = tor.size();
  for (std::size_t idx = 0; idx < total; ++idx) {
    auto tuple = torsion_tuple(tor, idx);
    Elem acc = g.zero();
    for (std::size_t i = 0; i < tuple.size(); ++i)
      acc = g.add(acc, g.scale(decomp[i].first, tuple[i]));
    tor.table.push_back(acc);
  }
  c.levels[0].torsion = std::move(tor);
  for (int j = 0; j < cp.gap.rank(); ++j) {
    IntervalFactor f;
    f.n = cp.gap.dims[static_cast<std::size_t>(j)];
    for (std::int64_t k = -f.n; k <= f.n; ++k)
      f.table.push_back(g.scale(cp.gap.generators[static_cast<std::size_t>(j)], k));
    c.levels[0].intervals.push_back(std::move(f));
  }
  return c;
}

CosetNilprogression build_lamplighter_case2(const Group& ambient, std::int64_t d,
                                            std::int64_t n_dim, const std::vector<Elem>& phi_table,
                                            const std::vector<Elem>& v_basis) {
  if (ambient.kind() != Kind::lamplighter && ambient.kind() != Kind::lamplighter_periodic)
    throw error("case-2 builder needs a lamplighter ambient");
  if (d < 1 || n_dim < 0) throw error("case-2 builder needs d >= 1, N >= 0");
  if (phi_table.size() != static_cast<std::size_t>(2 * n_dim + 1))
    throw error("phi table must cover {-N..N}");
  CosetNilprogression c;
  c.ambient = ambient;
  c.levels.resize(2);
  c.levels[0].torsion.table = {ambient.identity()};
  IntervalFactor f;
  f.n = n_dim;
  for (std::int64_t k = -n_dim; k <= n_dim; ++k) {
    const Elem& phi = phi_table[static_cast<std::size_t>(k + n_dim)];
    if (phi[0] != 0) throw error("phi values must have zero shift");
    f.table.push_back(Elem{k * d, phi[1]});
  }
  c.levels[0].intervals.push_back(std::move(f));
  TorsionFactor tv;
  tv.orders.assign(v_basis.size(), 2);
  std::size_t total = tv.size();
  for (std::size_t idx = 0; idx < total; ++idx) {
    auto tuple = torsion_tuple(tv, idx);
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < tuple.size(); ++i)
      if (tuple[i]) bits ^= static_cast<std::uint64_t>(v_basis[i][1]);
    tv.table.push_back(Elem{0, static_cast<std::int64_t>(bits)});
  }
  c.levels[1].torsion = std::move(tv);
  return c;
}

std::pair<CosetNilprogression, std::string> mutate_single_field(const CosetNilprogression& c,
                                                                std::uint64_t seed) {
  Rng rng(seed);
  const Group& g = c.ambient;
  // Collect mutable slots: (level, factor j, entry index).
  struct Slot {
    int level, j;
    std::size_t entry;
  };
  std::vector<Slot> slots;
  for (int i = 1; i <= c.derived_length(); ++i) {
    const Level& lev = c.levels[static_cast<std::size_t>(i - 1)];
    for (std::size_t e = 0; e < lev.torsion.table.size(); ++e) slots.push_back({i, 0, e});
    for (std::size_t j = 0; j < lev.intervals.size(); ++j)
      for (std::size_t e = 0; e < lev.intervals[j].table.size(); ++e)
        slots.push_back({i, static_cast<int>(j + 1), e});
  }
  auto apply = [&](const Slot& s, const Elem& value) {
    CosetNilprogression out = c;
    Level& lev = out.levels[static_cast<std::size_t>(s.level - 1)];
    if (s.j == 0)
      lev.torsion.table[s.entry] = value;
    else
      lev.intervals[static_cast<std::size_t>(s.j - 1)].table[s.entry] = value;
    return out;
  };
  for (int attempt = 0; attempt < 24; ++attempt) {
    const Slot& s = slots[rng.below(slots.size())];
    Elem delta = g.sample(rng, 2);
    if (delta == g.identity()) continue;
    const Level& lev = c.levels[static_cast<std::size_t>(s.level - 1)];
    Elem original = s.j == 0 ? lev.torsion.table[s.entry]
                             : lev.intervals[static_cast<std::size_t>(s.j - 1)].table[s.entry];
    CosetNilprogression out = apply(s, g.mul(original, delta));
    if (!axiom_check(out).pass()) {
      std::string desc = "level " + std::to_string(s.level) + " factor " + std::to_string(s.j) +
                         " entry " + std::to_string(s.entry) + " multiplied by " +
                         g.canonical(delta);
      return {out, desc};
    }
  }
  // Fallback: break normalization, which always fails the checker.
  const Slot& s = slots[rng.below(slots.size())];
  Elem bad = g.identity();
  while (bad == g.identity()) bad = g.sample(rng, 2);
  Slot zero{s.level, s.j, 0};
  const Level& lev = c.levels[static_cast<std::size_t>(zero.level - 1)];
  if (zero.j > 0)
    zero.entry = static_cast<std::size_t>(lev.intervals[static_cast<std::size_t>(zero.j - 1)].n);
  CosetNilprogression out = apply(zero, bad);
  return {out, "normalization break at level " + std::to_string(zero.level)};
}

std::vector<std::pair<Elem, std::int64_t>> cyclic_decomposition(const GroupSet& h) {
  const Group& g = h.group();
  if (!g.is_abelian()) throw error("cyclic decomposition needs an abelian group");
  auto elem_order = [&](const Elem& e) {
    std::int64_t ord = 1;
    Elem cur = e;
    while (!(cur == g.zero())) {
      cur = g.add(cur, e);
      ++ord;
      if (ord > static_cast<std::int64_t>(h.size()))
        throw error("element order exceeds subgroup size; H not closed?");
    }
    return ord;
  };
  if (h.size() == 1) return {};
  std::vector<std::pair<Elem, std::int64_t>> ordered;
  for (const Elem& e : h.elems())
    if (!(e == g.zero())) ordered.emplace_back(e, elem_order(e));
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  std::vector<std::pair<Elem, std::int64_t>> chosen;
  std::vector<Elem> span{g.zero()};
  std::function<bool()> dfs = [&]() {
    if (span.size() == h.size()) return true;
    for (const auto& [e, ord] : ordered) {
      if (std::binary_search(span.begin(), span.end(), e)) continue;
      // direct-sum test: <e> meets the span only at 0
      bool direct = true;
      Elem cur = e;
      for (std::int64_t k = 1; k < ord; ++k) {
        if (std::binary_search(span.begin(), span.end(), cur)) {
          direct = false;
          break;
        }
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
      std::vector<Elem> saved_span = span;
      span = std::move(bigger);
      chosen.emplace_back(e, ord);
      if (dfs()) return true;
      chosen.pop_back();
      span = std::move(saved_span);
    }
    return false;
  };
  if (!dfs()) throw error("no direct-sum decomposition found; H not a subgroup?");
  return chosen;
}

}  // namespace solv
