#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "solv/lamplighter.hpp"
#include "solv/rng.hpp"

using namespace solv;

namespace {

// phi(n) = psi + T^n psi is a graph map satisfying the product condition
// exactly (the two-sided products telescope).
std::uint64_t coboundary(const Group& g, std::uint64_t psi, std::int64_t n) {
  Elem moved = g.mul(Elem{0, static_cast<std::int64_t>(psi)}, Elem{n, 0});
  return psi ^ static_cast<std::uint64_t>(moved[1]);
}

GroupSet planted_graph(const Group& g, std::uint64_t psi, std::int64_t n_max) {
  std::vector<Elem> es;
  for (std::int64_t n = -n_max; n <= n_max; ++n)
    es.push_back(Elem{n, static_cast<std::int64_t>(coboundary(g, psi, n))});
  return GroupSet(g, std::move(es));
}

}  // namespace

TEST_CASE("bit spans") {
  BitSpan s;
  s.add(0b1010);
  s.add(0b0110);
  CHECK(s.dim() == 2);
  CHECK(s.contains(0b1100));
  CHECK(!s.contains(0b1000));
  s.add(0b1100);  // dependent
  CHECK(s.dim() == 2);
}

TEST_CASE("case 1: subgroups classify to their own subspace") {
  Group g = Group::lamplighter(16);
  std::vector<Elem> es;
  for (std::uint64_t bits = 0; bits < 4; ++bits) {
    std::vector<std::int64_t> support;
    if (bits & 1) support.push_back(0);
    if (bits & 2) support.push_back(1);
    es.push_back(g.make_lamp(0, support));
  }
  GroupSet a(g, es);
  LampClassification cls = classify(a, Rational(4));
  CHECK(cls.tag == LampClassification::Case::one);
  CHECK(cls.v_space.dim() == 2);
  CHECK(cls.b == a);
  CHECK(cls.control.verified);
  CHECK(cls.control.K == Rational(1));
  CHECK(converse_doubling(cls) == Rational(1));
}

TEST_CASE("case 2: abelian shift section") {
  Group g = Group::lamplighter(31);
  std::vector<Elem> es;
  for (std::int64_t n = -3; n <= 3; ++n) es.push_back(g.make_lamp(n, {}));
  GroupSet a(g, es);
  LampClassification cls = classify(a, Rational(4));
  CHECK(cls.tag == LampClassification::Case::two);
  CHECK(cls.d == 1);
  CHECK(cls.v_space.dim() == 0);
  for (auto& [n, mask] : cls.phi) CHECK(mask == 0);
  CHECK(cls.freiman_checked);
  CHECK(cls.control.verified);
  Rational doubling = converse_doubling(cls);
  CHECK(doubling < Rational(2));
}

TEST_CASE("case 2: planted graph recovered up to the equivalence") {
  Group g = Group::lamplighter(31);
  std::uint64_t psi = (1ULL << 31) | (1ULL << 33);  // lamps at 0 and 2
  GroupSet a = planted_graph(g, psi, 4);
  LampClassification cls = classify(a, Rational(4));
  CHECK(cls.tag == LampClassification::Case::two);
  CHECK(cls.v_space.dim() == 0);  // trivial V in the finitely-supported model
  CHECK(cls.freiman_checked);
  CHECK(cls.v_invariant_checked);
  // recovered graph equals the planted one wherever both are defined
  for (auto& [n, mask] : cls.phi) CHECK(mask == coboundary(g, psi, n));
  CHECK(cls.control.verified);
  CHECK(converse_doubling(cls) <= Rational(4));
}

TEST_CASE("freiman graph checks") {
  Group g = Group::lamplighter(31);
  // zero map passes
  std::vector<std::pair<std::int64_t, std::uint64_t>> zero;
  for (std::int64_t n = -4; n <= 4; ++n) zero.emplace_back(n, 0);
  CHECK(!verify_freiman_mod_v(g, zero, BitSpan{}));

  // a random map fails with an explicit quadruple
  Rng rng(8);
  std::vector<std::pair<std::int64_t, std::uint64_t>> random_map;
  for (std::int64_t n = -4; n <= 4; ++n)
    random_map.emplace_back(n, (rng.next() & 0x7) << 31);
  auto violation = verify_freiman_mod_v(g, random_map, BitSpan{});
  REQUIRE(violation.has_value());
  CHECK(violation->n1 + violation->n2 == violation->n3 + violation->n4);

  // modulo the whole window space everything passes
  BitSpan whole;
  for (int i = 0; i < 63; ++i) whole.add(1ULL << i);
  CHECK(!verify_freiman_mod_v(g, random_map, whole));
}

TEST_CASE("classifier control certificates bound the output size") {
  Group g = Group::lamplighter(31);
  GroupSet a = planted_graph(g, 1ULL << 31, 4);
  LampClassification cls = classify(a, Rational(4));
  Rational kprime = cls.control.K;
  CHECK(Rational(static_cast<std::int64_t>(cls.b.size())) <=
        Rational(kprime.num * static_cast<std::int64_t>(a.size()), kprime.den));
  CHECK(Rational(static_cast<std::int64_t>(cls.control.X.size())) <= kprime);
}

TEST_CASE("periodic ambient: invariant subspaces survive") {
  Group g = Group::lamplighter_periodic(6);
  // A = shifts times a T-invariant plane: the alternating vector is T^2-invariant
  std::vector<Elem> es;
  for (std::int64_t n = -2; n <= 2; ++n) {
    es.push_back(Elem{n, 0});
    es.push_back(g.mul(Elem{0, 0b010101}, Elem{n, 0}));
    es.push_back(g.mul(Elem{0, 0b101010}, Elem{n, 0}));
    es.push_back(g.mul(Elem{0, 0b111111}, Elem{n, 0}));
  }
  GroupSet a(g, es);
  LampClassification cls = classify(a, Rational(4));
  CHECK(cls.tag == LampClassification::Case::two);
  CHECK(cls.v_space.dim() == 2);
  CHECK(cls.v_invariant_checked);
  CHECK(cls.control.verified);
}
