#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "solv/bsg.hpp"
#include "solv/rng.hpp"

using namespace solv;

namespace {

GroupSet z_interval(std::int64_t lo, std::int64_t hi) {
  Group z = Group::integers();
  std::vector<Elem> es;
  for (std::int64_t n = lo; n <= hi; ++n) es.push_back(Elem{n});
  return GroupSet(z, std::move(es));
}

BipartiteGraph complete(std::size_t nv, std::size_t nw) {
  BipartiteGraph g(nv, nw);
  for (std::size_t v = 0; v < nv; ++v)
    for (std::size_t w = 0; w < nw; ++w) g.set_edge(v, w, true);
  return g;
}

// Half-split: complete on the first half of V, empty on the second half.
BipartiteGraph half_split(std::size_t nv, std::size_t nw) {
  BipartiteGraph g(nv, nw);
  for (std::size_t v = 0; v < nv / 2; ++v)
    for (std::size_t w = 0; w < nw; ++w) g.set_edge(v, w, true);
  return g;
}

VertexSet range_set(std::uint32_t lo, std::uint32_t hi) {
  VertexSet s;
  for (std::uint32_t v = lo; v < hi; ++v) s.push_back(v);
  return s;
}

}  // namespace

TEST_CASE("regularity defect: exact values") {
  BipartiteGraph comp = complete(10, 10);
  CHECK(regularity_defect(comp, range_set(0, 4), range_set(2, 9)) == Rational(0));
  CHECK(regularity_defect(comp, range_set(0, 10), range_set(0, 10)) == Rational(0));

  BipartiteGraph half = half_split(10, 10);
  // density 1/2; restricting to the complete half gives |50 - 25|/100 = 1/4
  CHECK(regularity_defect(half, range_set(0, 5), range_set(0, 10)) == Rational(1, 4));

  // random graph: defect equals a direct count recomputation
  Rng rng(3);
  BipartiteGraph r(12, 12);
  for (std::size_t v = 0; v < 12; ++v)
    for (std::size_t w = 0; w < 12; ++w) r.set_edge(v, w, rng.below(2) == 1);
  VertexSet vs = {1, 3, 4, 8}, ws = {0, 2, 9, 10, 11};
  std::int64_t inside = 0;
  for (std::uint32_t v : vs)
    for (std::uint32_t w : ws) inside += r.edge(v, w) ? 1 : 0;
  __int128 scaled = static_cast<__int128>(inside) * 144 -
                    static_cast<__int128>(r.edge_count()) * static_cast<__int128>(vs.size() * ws.size());
  if (scaled < 0) scaled = -scaled;
  Rational expect(static_cast<std::int64_t>(scaled), 144 * 144);
  CHECK(regularity_defect(r, vs, ws) == expect);
}

TEST_CASE("regularity estimates: certified labels") {
  BipartiteGraph comp = complete(12, 12);
  auto v1 = regularity_estimate(comp, Rational(1, 100), true);
  CHECK(v1.status == RegularityStatus::certified_regular);

  BipartiteGraph half = half_split(12, 12);
  auto v2 = regularity_estimate(half, Rational(1, 5), true);
  CHECK(v2.status == RegularityStatus::witnessed_irregular);
  CHECK(v2.worst_defect > Rational(1, 5));
  // the witness is a genuine violator
  CHECK(regularity_defect(half, v2.worst_v, v2.worst_w) == v2.worst_defect);

  // local search on a random 40x40 graph: uncertified positive at eps = 0.1
  Rng rng(5);
  BipartiteGraph r(40, 40);
  for (std::size_t v = 0; v < 40; ++v)
    for (std::size_t w = 0; w < 40; ++w) r.set_edge(v, w, rng.below(2) == 1);
  auto v3 = regularity_estimate(r, Rational(1, 10), false, 5);
  CHECK(v3.status == RegularityStatus::no_violation_found);
  // exhaustive scan of a 16x16 subsample agrees
  BipartiteGraph sub(16, 16);
  for (std::size_t v = 0; v < 16; ++v)
    for (std::size_t w = 0; w < 16; ++w) sub.set_edge(v, w, r.edge(v, w));
  auto v4 = regularity_estimate(sub, Rational(1, 4), true);
  CHECK(v4.status == RegularityStatus::certified_regular);
}

TEST_CASE("regularity partition: planted structures") {
  // Two disjoint complete bipartite graphs.
  KPartiteSystem sys;
  sys.class_sizes = {16, 16};
  BipartiteGraph g(16, 16);
  for (std::size_t v = 0; v < 8; ++v)
    for (std::size_t w = 0; w < 8; ++w) g.set_edge(v, w, true);
  for (std::size_t v = 8; v < 16; ++v)
    for (std::size_t w = 8; w < 16; ++w) g.set_edge(v, w, true);
  sys.edges[{0, 1}] = g;
  auto part = regularity_partition(sys, Rational(1, 8), 64, 11);
  CHECK(part.target_met);
  // the refinement separates the two sides
  if (part.blocks[0].size() > 1) {
    for (const VertexSet& block : part.blocks[0]) {
      bool low = false, high = false;
      for (std::uint32_t v : block) (v < 8 ? low : high) = true;
      CHECK(!(low && high));
    }
  }
  for (std::size_t i = 1; i < part.energy_history.size(); ++i)
    CHECK(part.energy_history[i] >= part.energy_history[i - 1] - 1e-9);

  // Random graphs are regular with one block per class.
  Rng rng(11);
  KPartiteSystem rnd;
  rnd.class_sizes = {24, 24};
  BipartiteGraph rg(24, 24);
  for (std::size_t v = 0; v < 24; ++v)
    for (std::size_t w = 0; w < 24; ++w) rg.set_edge(v, w, rng.below(2) == 1);
  rnd.edges[{0, 1}] = rg;
  auto rpart = regularity_partition(rnd, Rational(3, 20), 64, 7);
  CHECK(rpart.target_met);
}

TEST_CASE("popular quotients") {
  Group z8 = Group::finite_abelian({8});
  std::vector<Elem> he;
  for (std::int64_t x = 0; x < 8; x += 2) he.push_back(z8.from_coords({x}));
  GroupSet h(z8, he);
  GroupSet d = popular_quotients(h, Rational(1));
  CHECK(d == h);  // every quotient has exactly |H| representations

  GroupSet a = z_interval(0, 9);
  GroupSet d2 = popular_quotients(a, Rational(1, 2));
  // d has 10 - |d| representations; threshold 5 keeps |d| <= 5
  CHECK(d2.size() == 11);
  CHECK(d2.contains(Elem{-5}));
  CHECK(d2.contains(Elem{5}));
  CHECK(!d2.contains(Elem{6}));

  Group heis = Group::heisenberg();
  GroupSet gens(heis, {Elem{1, 0, 0}, Elem{0, 1, 0}});
  GroupSet ball = iterated_set(gens, 2, true);
  GroupSet d3 = popular_quotients(ball, Rational(1, 4));
  CHECK(!d3.empty());
  // membership in the quotient set with exact counts
  GroupSet quot = product_set(ball, ball.inverse_set());
  for (const Elem& e : d3.elems()) CHECK(quot.contains(e));
  CHECK(d3.is_symmetric());
}

TEST_CASE("exact tuple counting matches brute force") {
  GroupSet a = z_interval(0, 5);
  GroupSet target = product_set(a, a.inverse_set());
  // brute force over |A|^4 alternating quadruples
  unsigned long long brute = 0;
  const Group& g = a.group();
  for (const Elem& x1 : a.elems())
    for (const Elem& x2 : a.elems())
      for (const Elem& x3 : a.elems())
        for (const Elem& x4 : a.elems()) {
          Elem p = g.mul(g.mul(g.mul(x1, g.inverse(x2)), x3), g.inverse(x4));
          if (target.contains(p)) ++brute;
        }
  CHECK(count_product_tuples(a, 4, true, target) == brute);
}

TEST_CASE("bsg_refine: subgroup input has a zero-defect cell") {
  Group z12 = Group::finite_abelian({12});
  std::vector<Elem> he;
  for (std::int64_t x = 0; x < 12; x += 3) he.push_back(z12.from_coords({x}));
  GroupSet h(z12, he);
  BsgReport rep = bsg_refine(h, Rational(1), 2, Rational(1, 10), 1);
  for (const TupleCheck& c : rep.checks) {
    CHECK(c.pass);
    CHECK(c.fraction == doctest::Approx(1.0));
  }
  CHECK(rep.a_prime.size() >= 1);
}

TEST_CASE("bsg_refine: interval and noisy progression") {
  GroupSet a = z_interval(0, 63);
  BsgReport rep = bsg_refine(a, Rational(2), 2, Rational(1, 10), 42);
  for (const TupleCheck& c : rep.checks) {
    CHECK(c.pass);
    CHECK(c.exact);
  }
  CHECK(rep.ratio >= Rational(1, 64));

  // structured chunk + 10% noise in Z_256, seed 9
  Group z256 = Group::finite_abelian({256});
  Rng rng(9);
  std::vector<Elem> es;
  for (std::int64_t x = 0; x < 64; ++x) es.push_back(z256.from_coords({2 * x}));
  for (int t = 0; t < 7; ++t)
    es.push_back(z256.from_coords({static_cast<std::int64_t>(rng.below(256))}));
  GroupSet noisy(z256, es);
  BsgReport rep2 = bsg_refine(noisy, Rational(4), 2, Rational(1, 10), 9);
  CHECK(rep2.ratio >= Rational(1, 64));
  for (const TupleCheck& c : rep2.checks) CHECK(c.pass);
}

TEST_CASE("bsg_symmetrize: centred output with verified tuple property") {
  GroupSet a = z_interval(0, 63);
  BsgSymReport rep = bsg_symmetrize(a, Rational(2), 3, Rational(1, 10), 1);
  REQUIRE(rep.pass);
  CHECK(rep.d.is_centred());
  CHECK(rep.d.contains(a.group().identity()));
  for (const TupleCheck& c : rep.checks) CHECK(c.pass);
  GroupSet quot = product_set(a, a.inverse_set());
  for (const Elem& e : rep.d.elems()) CHECK(quot.contains(e));

  Group z12 = Group::finite_abelian({12});
  std::vector<Elem> he;
  for (std::int64_t x = 0; x < 12; x += 3) he.push_back(z12.from_coords({x}));
  BsgSymReport rep2 = bsg_symmetrize(GroupSet(z12, he), Rational(1), 2, Rational(1, 20), 4);
  REQUIRE(rep2.pass);
  CHECK(rep2.d.is_centred());
  for (const TupleCheck& c : rep2.checks) CHECK(c.fraction == doctest::Approx(1.0));
}
