#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "solv/nilprog.hpp"
#include "solv/series.hpp"

using namespace solv;

namespace {

CosetProgression z_progression(std::vector<std::int64_t> gens, std::vector<std::int64_t> dims) {
  CosetProgression c;
  c.subgroup = GroupSet(Group::integers(), {Elem{0}});
  c.gap.ambient = Group::integers();
  for (std::int64_t v : gens) c.gap.generators.push_back(Elem{v});
  c.gap.dims = std::move(dims);
  return c;
}

// Two-step shape with a small central interval, for fast-path cross-checks.
CosetNilprogression small_twostep(std::int64_t central_n) {
  Group g = Group::heisenberg();
  CosetNilprogression c;
  c.ambient = g;
  c.levels.resize(2);
  c.levels[0].torsion.table = {g.identity()};
  for (const Elem& e : {Elem{1, 0, 0}, Elem{0, 1, 0}}) {
    IntervalFactor f;
    f.n = 1;
    for (std::int64_t k = -1; k <= 1; ++k) f.table.push_back(g.pow(e, k));
    c.levels[0].intervals.push_back(std::move(f));
  }
  c.levels[1].torsion.table = {g.identity()};
  IntervalFactor fz;
  fz.n = central_n;
  for (std::int64_t k = -central_n; k <= central_n; ++k) fz.table.push_back(g.pow(Elem{0, 0, 1}, k));
  c.levels[1].intervals.push_back(std::move(fz));
  return c;
}

}  // namespace

TEST_CASE("length-zero nilprogression passes vacuously and enumerates {1}") {
  CosetNilprogression c;
  c.ambient = Group::heisenberg();
  CHECK(axiom_check(c).pass());
  CHECK(enumerate_cnp(c).size() == 1);
  CHECK(c.volume() == 1);
}

TEST_CASE("helfgott1 passes all four axioms, volume formula") {
  auto c = build_helfgott1(5, 2, 2, 3);
  CHECK(c.derived_length() == 3);
  CHECK(c.ranks() == std::vector<int>{1, 0, 0});
  CHECK(c.volume() == 625);  // 1 * 5 * 25 * 5
  AxiomReport rep = axiom_check(c);
  CHECK(rep.normalized_ok);
  CHECK(rep.local_add_ok);
  CHECK(rep.level_comm_ok);
  CHECK(rep.cross_comm_ok);

  auto c31 = build_helfgott1(3, 1, 2, 2);
  CHECK(axiom_check(c31).pass());
}

TEST_CASE("helfgott1 with a denormalized table fails with a witness") {
  auto c = build_helfgott1(5, 2, 2, 3);
  c.levels[1].torsion.table[0] = Elem{1, 1, 1, 1, 0, 0};  // phi(0) != 1
  AxiomReport rep = axiom_check(c);
  CHECK(!rep.pass());
  CHECK(!rep.normalized_ok);
  REQUIRE(rep.first_failure.has_value());
  CHECK(rep.first_failure->axiom == "normalized");
  CHECK(rep.first_failure->i == 2);
}

TEST_CASE("helfgott2 candidate tables pass the checker") {
  auto c = build_helfgott2(5, 2, 2, 2, 3);
  CHECK(c.ranks() == std::vector<int>{1, 1, 0});
  CHECK(axiom_check(c).pass());
}

TEST_CASE("twostep passes the checker for N <= 3") {
  for (std::int64_t n : {1, 2, 3}) {
    auto c = build_twostep(n);
    CHECK(axiom_check(c).pass());
    CHECK(c.volume() == (2 * n + 1) * (2 * n + 1) * (200 * n * n + 1));
  }
}

TEST_CASE("enumeration matches hand counts") {
  auto line = from_coset_progression(z_progression({1}, {3}));
  GroupSet a = enumerate_cnp(line);
  CHECK(a.size() == 7);
  CHECK(line.volume() == 7);
  for (std::int64_t x = -3; x <= 3; ++x) CHECK(a.contains(Elem{x}));

  auto h = build_helfgott1(5, 1, 2, 3);
  GroupSet ha = enumerate_cnp(h);
  CHECK(h.volume() == 375);
  CHECK(ha.size() <= 375);
  CHECK(ha.size() == 375);  // the table entries multiply to distinct matrices here

  auto t = build_twostep(2);
  GroupSet ta = enumerate_cnp(t);
  CHECK(ta.size() <= static_cast<std::size_t>(t.volume()));
}

TEST_CASE("dilate: ones tuple equals enumeration; interval scaling") {
  auto line = from_coset_progression(z_progression({1}, {3}));
  CHECK(dilate(line, DilationTuple::ones(line)) == enumerate_cnp(line));
  DilationTuple two = DilationTuple::ones(line);
  two.m[0][0] = 2;
  GroupSet d = dilate(line, two);
  CHECK(d.size() == 13);
  CHECK(d.contains(Elem{-6}));
  CHECK(d.contains(Elem{6}));

  auto t = small_twostep(5);
  DilationTuple m = DilationTuple::ones(t);
  m.m[0][0] = m.m[0][1] = 2;
  GroupSet td = dilate(t, m);
  CHECK(td.size() > enumerate_cnp(t).size());
}

TEST_CASE("dilate oracle agrees with explicit enumeration") {
  auto t = small_twostep(4);
  DilationTuple m = DilationTuple::ones(t);
  m.m[0][0] = 2;
  m.m[1][0] = 3;
  GroupSet full = dilate(t, m);
  DilateOracle oracle(t, m);
  for (const Elem& e : full.elems()) CHECK(oracle.contains(e));
  CHECK(!oracle.contains(Elem{50, 50, 50}));
  Budget tiny;
  tiny.max_elems = 64;  // forces a short prefix and a deep suffix search
  DilateOracle oracle2(t, m, tiny);
  for (const Elem& e : full.elems()) CHECK(oracle2.contains(e));
}

TEST_CASE("minimal containing dilation") {
  auto line = from_coset_progression(z_progression({1}, {3}));
  auto self = minimal_containing_dilation(line, enumerate_cnp(line), 8);
  REQUIRE(self.has_value());
  CHECK(self->m[0][0] == 1);

  GroupSet sq = product_set(enumerate_cnp(line), enumerate_cnp(line));
  auto twice = minimal_containing_dilation(line, sq, 8);
  REQUIRE(twice.has_value());
  CHECK(twice->m[0][0] == 2);

  auto t = small_twostep(5);
  GroupSet ta = enumerate_cnp(t);
  GroupSet tsq = product_set(ta, ta);
  auto md = minimal_containing_dilation(t, tsq, 16);
  REQUIRE(md.has_value());
  // Commutator-level exponent grows beyond the linear-level ones.
  CHECK(md->m[1][0] > md->m[0][0]);
  CHECK(md->m[0][0] <= 3);

  Elem uncovered;
  auto fail = minimal_containing_dilation(line, GroupSet(line.ambient, {Elem{1000}}), 4, {},
                                          &uncovered);
  CHECK(!fail.has_value());
  CHECK(uncovered == Elem{1000});
}

TEST_CASE("covering certificates") {
  auto line = from_coset_progression(z_progression({1}, {5}));
  auto ones = covering_certificate(line, DilationTuple::ones(line));
  CHECK(ones.verified);
  CHECK(ones.X.size() == 1);

  DilationTuple m3 = DilationTuple::ones(line);
  m3.m[0][0] = 3;
  auto c3 = covering_certificate(line, m3);
  CHECK(c3.verified);
  CHECK(c3.X.size() <= 3);

  auto t = small_twostep(5);
  DilationTuple md = DilationTuple::ones(t);
  md.m[0][0] = md.m[0][1] = md.m[1][0] = 2;
  auto ct = covering_certificate(t, md);
  CHECK(ct.verified);
  CHECK(ct.X.size() >= 1);
}

TEST_CASE("growth curves: abelian slopes and heisenberg fast path") {
  auto line = from_coset_progression(z_progression({1}, {5}));
  GrowthCurve g1 = growth_curve_cnp(line, 10);
  for (int n = 1; n <= 10; ++n)
    CHECK(g1.sizes[static_cast<std::size_t>(n - 1)] == static_cast<std::size_t>(10 * n + 1));
  CHECK(g1.slope == doctest::Approx(1.0).epsilon(0.1));
  CHECK(g1.non_decreasing);

  CosetProgression sq;
  sq.subgroup = GroupSet(Group::lattice(2), {Group::lattice(2).zero()});
  sq.gap.ambient = Group::lattice(2);
  sq.gap.generators = {Group::lattice(2).from_coords({1, 0}), Group::lattice(2).from_coords({0, 1})};
  sq.gap.dims = {4, 4};
  GrowthCurve g2 = growth_curve_cnp(from_coset_progression(sq), 8);
  CHECK(g2.slope == doctest::Approx(2.0).epsilon(0.08));

  // Fast path agrees with the generic enumerator on a small instance.
  auto t = small_twostep(5);
  GrowthCurve fast = growth_curve_cnp(t, 4);
  CHECK(fast.used_central_fast_path);
  GroupSet a = enumerate_cnp(t);
  GroupSet u = a.union_with(a.inverse_set()).with_identity();
  GroupSet cur = u;
  for (int n = 1; n <= 4; ++n) {
    if (n > 1) cur = product_set(cur, u);
    CHECK(fast.sizes[static_cast<std::size_t>(n - 1)] == cur.size());
  }

  // Finite ambient saturates: slope stays small.
  GrowthCurve g3 = growth_curve_cnp(build_helfgott1(3, 1, 2, 2), 6);
  CHECK(g3.slope <= 2.0);
  CHECK(g3.non_decreasing);
}

TEST_CASE("generated group probe") {
  Group z16 = Group::finite_abelian({16});
  CosetProgression cp;
  cp.subgroup = GroupSet(z16, {z16.from_coords({0}), z16.from_coords({8})});
  cp.gap.ambient = z16;
  cp.gap.generators = {z16.from_coords({2})};
  cp.gap.dims = {1};
  auto rep = generated_group_probe(from_coset_progression(cp));
  CHECK(rep.finite);
  CHECK(rep.nilpotency_step <= 1);

  auto h = generated_group_probe(build_helfgott1(3, 1, 2, 2));
  CHECK(h.finite);
  CHECK(h.derived_length >= 1);
  CHECK(h.derived_length <= 3);

  Budget small;
  small.max_elems = 200'000;
  auto t = generated_group_probe(build_twostep(1), small);
  CHECK(!t.finite);  // infinite ambient: inconclusive is the documented outcome
}

TEST_CASE("empirical multiplication law: A*A inside a bounded dilate") {
  for (auto c : {build_helfgott1(3, 1, 2, 2), build_helfgott1(5, 1, 2, 3)}) {
    GroupSet a = enumerate_cnp(c);
    GroupSet sq = product_set(a, a);
    auto m = minimal_containing_dilation(c, sq, 16);
    CHECK(m.has_value());
  }
  auto t = small_twostep(8);
  GroupSet a = enumerate_cnp(t);
  GroupSet sq = product_set(a, a);
  auto m = minimal_containing_dilation(t, sq, 16);
  CHECK(m.has_value());
}

TEST_CASE("coset progression round-trips through the length-one builder") {
  Group z16 = Group::finite_abelian({16});
  CosetProgression cp;
  cp.subgroup = GroupSet(z16, {z16.from_coords({0}), z16.from_coords({8})});
  cp.gap.ambient = z16;
  cp.gap.generators = {z16.from_coords({1})};
  cp.gap.dims = {2};
  auto c = from_coset_progression(cp);
  CHECK(c.derived_length() == 1);
  CHECK(axiom_check(c).pass());
  CHECK(enumerate_cnp(c) == cp.enumerate());
}

TEST_CASE("cyclic decomposition recovers direct factors") {
  Group g = Group::finite_abelian({4, 2});
  std::vector<Elem> all;
  for (std::int64_t a = 0; a < 4; ++a)
    for (std::int64_t b = 0; b < 2; ++b) all.push_back(g.from_coords({a, b}));
  auto decomp = cyclic_decomposition(GroupSet(g, all));
  std::int64_t prod = 1;
  for (auto& [e, ord] : decomp) prod *= ord;
  CHECK(prod == 8);
}

TEST_CASE("single-field mutations break the checker") {
  auto c = build_helfgott1(5, 2, 2, 3);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto [mutated, desc] = mutate_single_field(c, seed);
    AxiomReport rep = axiom_check(mutated);
    CAPTURE(desc);
    CHECK(!rep.pass());
    CHECK(rep.first_failure.has_value());
  }
}
