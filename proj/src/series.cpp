#include "solv/series.hpp"

#include <deque>
#include <unordered_set>

namespace solv {

GroupSet subgroup_closure(const GroupSet& generators, const Budget& budget) {
  const Group& g = generators.group();
  std::unordered_set<Elem, ElemHash> seen;
  std::deque<Elem> frontier;
  auto add = [&](const Elem& e) {
    if (seen.insert(e).second) {
      frontier.push_back(e);
      budget.charge(seen.size(), "subgroup closure");
    }
  };
  add(g.identity());
  std::vector<Elem> gens;
  for (const Elem& e : generators.elems()) {
    gens.push_back(e);
    gens.push_back(g.inverse(e));
  }
  for (const Elem& e : gens) add(e);
  while (!frontier.empty()) {
    Elem cur = frontier.front();
    frontier.pop_front();
    for (const Elem& s : gens) add(g.mul(cur, s));
  }
  std::vector<Elem> out(seen.begin(), seen.end());
  return GroupSet(g, std::move(out));
}

bool is_normal_in(const GroupSet& sub, const GroupSet& ambient) {
  const Group& g = sub.group();
  for (const Elem& a : ambient.elems()) {
    Elem ai = g.inverse(a);
    for (const Elem& n : sub.elems())
      if (!sub.contains(g.mul(g.mul(a, n), ai))) return false;
  }
  return true;
}

std::vector<GroupSet> finite_series(const GroupSet& generators, SeriesKind kind, int max_depth,
                                    const Budget& budget) {
  const Group& g = generators.group();
  GroupSet whole = subgroup_closure(generators, budget);
  std::vector<GroupSet> chain{whole};
  for (int depth = 0; depth < max_depth; ++depth) {
    const GroupSet& cur = chain.back();
    if (cur.size() == 1) break;
    const GroupSet& left = (kind == SeriesKind::derived) ? cur : whole;
    std::vector<Elem> comms;
    for (const Elem& a : left.elems())
      for (const Elem& b : cur.elems()) comms.push_back(g.commutator(a, b));
    GroupSet next = subgroup_closure(GroupSet(g, std::move(comms)), budget);
    if (!is_normal_in(next, cur))
      throw verification_error("series term is not normal in its predecessor");
    if (next.size() == cur.size()) {
      // Perfect tail; record it once and stop rather than looping.
      if (next == cur) break;
    }
    chain.push_back(next);
    if (chain.back().size() == 1) break;
  }
  return chain;
}

}  // namespace solv
