#include "solv/progression.hpp"

#include <algorithm>
#include <map>

#include "solv/series.hpp"

namespace solv {

namespace {

// Iterates all coefficient vectors with |n_i| <= bounds_i in odometer order.
class CoeffIter {
 public:
  explicit CoeffIter(const std::vector<std::int64_t>& bounds) : bounds_(bounds) {
    for (std::int64_t b : bounds_) cur_.push_back(-b);
    done_ = false;
  }
  bool done() const { return done_; }
  const std::vector<std::int64_t>& get() const { return cur_; }
  void next() {
    for (std::size_t i = 0; i < cur_.size(); ++i) {
      if (cur_[i] < bounds_[i]) {
        ++cur_[i];
        for (std::size_t j = 0; j < i; ++j) cur_[j] = -bounds_[j];
        return;
      }
    }
    done_ = true;
  }

 private:
  std::vector<std::int64_t> bounds_;
  std::vector<std::int64_t> cur_;
  bool done_;
};

Elem gap_point(const Gap& p, const std::vector<std::int64_t>& n) {
  Elem acc = p.ambient.identity();
  for (std::size_t i = 0; i < n.size(); ++i)
    acc = p.ambient.add(acc, p.ambient.scale(p.generators[i], n[i]));
  return acc;
}

}  // namespace

void Gap::check() const {
  if (!ambient.is_abelian()) throw error("progression ambient must be abelian");
  if (generators.size() != dims.size()) throw error("generator/dimension count mismatch");
  for (std::int64_t n : dims)
    if (n < 1) throw error("progression dimensions must be positive");
  for (const Elem& v : generators) ambient.validate(v);
}

std::size_t Gap::formal_size(std::int64_t t) const {
  std::size_t prod = 1;
  for (std::int64_t n : dims) {
    std::size_t w = static_cast<std::size_t>(2 * t * n + 1);
    if (prod > (std::size_t{1} << 62) / w) return std::size_t{1} << 62;
    prod *= w;
  }
  return prod;
}

GroupSet Gap::enumerate(const Budget& budget) const {
  check();
  budget.charge(formal_size(), "progression enumeration");
  std::vector<Elem> out;
  for (CoeffIter it(dims); !it.done(); it.next()) out.push_back(gap_point(*this, it.get()));
  return GroupSet(ambient, std::move(out));
}

Gap Gap::refined(std::int64_t l) const {
  Gap r;
  r.ambient = ambient;
  for (std::size_t i = 0; i < generators.size(); ++i) {
    std::int64_t nd = dims[i] / (l * l);
    if (nd >= 1) {
      r.generators.push_back(ambient.scale(generators[i], l));
      r.dims.push_back(nd);
    }
  }
  return r;
}

void CosetProgression::check() const {
  gap.check();
  if (subgroup.group() != gap.ambient) throw error("subgroup lives in the wrong group");
  if (subgroup.empty()) throw error("H must contain 0");
  const Group& g = gap.ambient;
  if (!subgroup.contains(g.identity())) throw error("H must contain 0");
  for (const Elem& a : subgroup.elems()) {
    if (!subgroup.contains(g.neg(a))) throw error("H not closed under negation");
    for (const Elem& b : subgroup.elems())
      if (!subgroup.contains(g.add(a, b))) throw error("H not closed under addition");
  }
}

std::size_t CosetProgression::formal_size(std::int64_t t) const {
  std::size_t p = gap.formal_size(t);
  if (p > (std::size_t{1} << 62) / std::max<std::size_t>(subgroup.size(), 1)) return std::size_t{1} << 62;
  return p * subgroup.size();
}

GroupSet CosetProgression::enumerate(const Budget& budget) const {
  check();
  budget.charge(formal_size(), "coset progression enumeration");
  const Group& g = gap.ambient;
  std::vector<Elem> out;
  for (CoeffIter it(gap.dims); !it.done(); it.next()) {
    Elem base = gap_point(gap, it.get());
    for (const Elem& h : subgroup.elems()) out.push_back(g.add(h, base));
  }
  return GroupSet(g, std::move(out));
}

std::optional<Collision> properness_test(const CosetProgression& c, std::int64_t t,
                                         const Budget& budget) {
  c.check();
  budget.charge(c.formal_size(t), "properness test");
  const Group& g = c.ambient();
  std::vector<std::int64_t> bounds;
  for (std::int64_t n : c.gap.dims) bounds.push_back(t * n);
  std::map<Elem, std::pair<Elem, std::vector<std::int64_t>>> seen;
  for (CoeffIter it(bounds); !it.done(); it.next()) {
    Elem base = gap_point(c.gap, it.get());
    for (const Elem& h : c.subgroup.elems()) {
      Elem v = g.add(h, base);
      auto [pos, fresh] = seen.try_emplace(v, h, it.get());
      if (!fresh) {
        Collision col;
        col.h1 = pos->second.first;
        col.n1 = pos->second.second;
        col.h2 = h;
        col.n2 = it.get();
        col.value = v;
        return col;
      }
    }
  }
  return std::nullopt;
}

namespace {

std::optional<Relation> unit_relation_from(const CosetProgression& c, const Collision& col) {
  Relation rel;
  const Group& g = c.ambient();
  rel.coeffs.resize(col.n1.size());
  bool unit = false;
  for (std::size_t i = 0; i < col.n1.size(); ++i) {
    rel.coeffs[i] = col.n1[i] - col.n2[i];
    if (rel.coeffs[i] == 1 || rel.coeffs[i] == -1) unit = true;
  }
  rel.target = g.add(col.h2, g.neg(col.h1));  // sum c_i v_i = h2 - h1
  if (!unit) return std::nullopt;
  return rel;
}

// Exhaustive search for a relation with some unit coefficient, smallest
// max-norm first, then smallest L1.
std::optional<Relation> search_unit_relation(const CosetProgression& c, std::int64_t bound) {
  const Group& g = c.ambient();
  int r = c.gap.rank();
  std::optional<Relation> best;
  std::int64_t best_norm1 = 0;
  for (std::int64_t radius = 1; radius <= bound; ++radius) {
    std::vector<std::int64_t> bounds(static_cast<std::size_t>(r), radius);
    for (CoeffIter it(bounds); !it.done(); it.next()) {
      const auto& cf = it.get();
      bool zero = true, unit = false;
      std::int64_t norm1 = 0, norminf = 0;
      for (std::int64_t x : cf) {
        if (x != 0) zero = false;
        if (x == 1 || x == -1) unit = true;
        norm1 += x < 0 ? -x : x;
        norminf = std::max(norminf, x < 0 ? -x : x);
      }
      if (zero || !unit || norminf < radius) continue;  // radius pass covers new shell only
      Elem sum = gap_point(c.gap, cf);
      if (!c.subgroup.contains(sum)) continue;
      if (!best || norm1 < best_norm1) {
        best = Relation{cf, sum};
        best_norm1 = norm1;
      }
    }
    if (best) return best;
  }
  return std::nullopt;
}

CosetProgression eliminate(const CosetProgression& c, const Relation& rel, int k) {
  const Group& g = c.ambient();
  std::int64_t ck = rel.coeffs[static_cast<std::size_t>(k)];
  // v_k = dh* + sum_{i != k} d_i v_i
  Elem dh = ck == 1 ? rel.target : g.neg(rel.target);
  std::vector<std::int64_t> d(rel.coeffs.size());
  for (std::size_t i = 0; i < rel.coeffs.size(); ++i)
    d[i] = ck == 1 ? -rel.coeffs[i] : rel.coeffs[i];
  d[static_cast<std::size_t>(k)] = 0;

  CosetProgression out;
  out.subgroup = c.subgroup;  // dh lies in H already
  out.gap.ambient = g;
  std::int64_t nk = c.gap.dims[static_cast<std::size_t>(k)];
  for (int i = 0; i < c.gap.rank(); ++i) {
    if (i == k) continue;
    std::size_t si = static_cast<std::size_t>(i);
    out.gap.generators.push_back(c.gap.generators[si]);
    out.gap.dims.push_back(c.gap.dims[si] + nk * (d[si] < 0 ? -d[si] : d[si]));
  }
  (void)dh;  // absorbed by H
  return out;
}

}  // namespace

RankReduceResult rank_reduce(const CosetProgression& c, const GrowthFn& f,
                             std::int64_t relation_budget, const Budget& budget) {
  RankReduceResult res;
  CosetProgression cur = c;
  GroupSet input = c.enumerate(budget);
  while (true) {
    GroupSet cur_set = cur.enumerate(budget);
    Rational m(static_cast<std::int64_t>(cur_set.size()), static_cast<std::int64_t>(input.size()));
    std::int64_t t = std::max<std::int64_t>(1, f(m));
    auto col = properness_test(cur, t, budget);
    if (!col) {
      RankReduceStep stop;
      stop.note = "stop";
      stop.dims = cur.gap.dims;
      stop.properness = "proper at t=" + std::to_string(t) + ", M=" + m.str();
      res.trace.push_back(stop);
      break;
    }
    std::optional<Relation> rel = unit_relation_from(cur, *col);
    if (!rel) rel = search_unit_relation(cur, relation_budget);
    CosetProgression next;
    RankReduceStep step;
    if (rel) {
      int k = -1;
      for (std::size_t i = 0; i < rel->coeffs.size(); ++i)
        if (rel->coeffs[i] == 1 || rel->coeffs[i] == -1) k = static_cast<int>(i);
      next = eliminate(cur, *rel, k);
      step.note = "eliminate";
      step.eliminated = k;
      step.relation = *rel;
    } else {
      // Torsion fallback: a generator whose cyclic group is finite and small
      // can be absorbed into H outright; the collision names the candidates.
      const Group& g = cur.ambient();
      int k = -1;
      std::int64_t best_order = 0;
      for (std::size_t i = 0; i < col->n1.size(); ++i) {
        if (col->n1[i] == col->n2[i]) continue;
        Elem v = cur.gap.generators[i];
        Elem cursor = v;
        std::int64_t ord = 1;
        std::int64_t cap = static_cast<std::int64_t>(budget.max_elems);
        while (!(cursor == g.identity()) && ord <= cap) {
          cursor = g.add(cursor, v);
          ++ord;
        }
        if (cursor == g.identity() && (k < 0 || ord < best_order)) {
          k = static_cast<int>(i);
          best_order = ord;
        }
      }
      if (k < 0)
        throw error(
            "relation search exhausted: no unit-coefficient integer relation within budget " +
            std::to_string(relation_budget));
      next.gap.ambient = g;
      std::vector<Elem> hgens = cur.subgroup.elems();
      hgens.push_back(cur.gap.generators[static_cast<std::size_t>(k)]);
      next.subgroup = subgroup_closure(GroupSet(g, std::move(hgens)), budget);
      for (int i = 0; i < cur.gap.rank(); ++i) {
        if (i == k) continue;
        next.gap.generators.push_back(cur.gap.generators[static_cast<std::size_t>(i)]);
        next.gap.dims.push_back(cur.gap.dims[static_cast<std::size_t>(i)]);
      }
      step.note = "absorb torsion generator";
      step.eliminated = k;
    }
    GroupSet next_set = next.enumerate(budget);
    for (const Elem& e : input.elems())
      if (!next_set.contains(e))
        throw verification_error("rank reduction lost containment of the input set");
    step.dims = next.gap.dims;
    res.trace.push_back(step);
    cur = next;
  }
  res.out = cur;
  return res;
}

DecomposeTable::DecomposeTable(const CosetProgression& c, std::int64_t t, const Budget& budget) {
  budget.charge(c.formal_size(t), "decomposition table");
  const Group& g = c.ambient();
  std::vector<std::int64_t> bounds;
  for (std::int64_t n : c.gap.dims) bounds.push_back(t * n);
  for (CoeffIter it(bounds); !it.done(); it.next()) {
    Elem base = gap_point(c.gap, it.get());
    for (const Elem& h : c.subgroup.elems())
      table_.emplace_back(g.add(h, base), Coords{h, it.get()});
  }
  std::stable_sort(table_.begin(), table_.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  table_.erase(std::unique(table_.begin(), table_.end(),
                           [](const auto& a, const auto& b) { return a.first == b.first; }),
               table_.end());
}

std::optional<DecomposeTable::Coords> DecomposeTable::find(const Elem& e) const {
  auto it = std::lower_bound(table_.begin(), table_.end(), e,
                             [](const auto& a, const Elem& key) { return a.first < key; });
  if (it == table_.end() || !(it->first == e)) return std::nullopt;
  return it->second;
}

namespace {
// keep CoeffIter available to other translation units through gap_point users
}  // namespace

}  // namespace solv
