#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "solv/bsg.hpp"
#include "solv/progression.hpp"
#include "solv/sarkozy.hpp"

namespace solv {

enum class ActionKind {
  trivial,
  coordinate_shift,  // rho(g) rotates the coordinates of V by the integer
                     // projection of g (lamplighter conjugation on the kernel)
  matrix_power,      // rho(g) = M^{pi(g)} over V = (Z_q)^k, gcd(det M, q) = 1
};

struct Action {
  ActionKind kind = ActionKind::trivial;
  std::vector<std::vector<std::int64_t>> matrix;  // row-major, k x k
};

// rho: G -> Aut(V) together with the working sets A and E.
struct ActionContext {
  Group g;      // acting group (needs an integer projection unless trivial)
  Group v;      // finite abelian module
  Action rho;
  GroupSet a;   // centred subset of g
  GroupSet e;   // centred subset of v
};

struct PipelineConfig {
  int ess_power = 4;    // exponent in the expansion hypothesis check
  int orbit_power = 2;  // E' is carved out of rho(A^orbit_power)(E)
  int k0 = 64;          // averaging iteration cap
  int lambda_levels = 32;
  std::int64_t fm = 4;  // constant growth function F(M) = fm
  int power_cap = 4;    // cap when enumerating (A')^F(M)
  int containment_cap = 16;
  std::uint64_t seed = 1;
  Rational k_bound{8, 1};
  Rational bsg_eps{1, 4};
  int bsg_k0 = 1;
  Rational gc_eps{1, 10};  // near-invariance strength used by the pipeline
};

Elem act(const ActionContext& ctx, const Elem& g, const Elem& x);
bool action_checks(const ActionContext& ctx, std::uint64_t seed, int trials = 200);

GroupSet orbit_set(const ActionContext& ctx, int power, const GroupSet& e,
                   const Budget& budget = {});

struct NearInvariantResult {
  GroupSet e_prime;
  GroupSet a_prime;
  std::vector<std::pair<Elem, Rational>> defects;  // exact, per a in A'
  int chosen_k = -1;
  double lambda = 0.0;
  std::vector<double> l2_trajectory;
  bool ess_ok = false;
  Rational ess_ratio{0, 1};
};

NearInvariantResult near_invariant(const ActionContext& ctx, const Rational& eps,
                                   const PipelineConfig& cfg = {}, const Budget& budget = {});

struct GoodCosetResult {
  CosetProgression hp;
  GroupSet h_prime;
  std::int64_t l = 1;
  int m = 0;
  GroupSet a_prime;
  Rational measured_c{0, 1};  // |H+P| / |E|
  int used_power = 1;         // capped F(M) exponent actually verified
  NearInvariantResult near;
  std::vector<std::string> stages;
};

GoodCosetResult good_coset_progression(const ActionContext& ctx, const GrowthFn& f,
                                       const PipelineConfig& cfg = {}, const Budget& budget = {});

// Ascending chain <rho((A')^j)(H')> until stabilization; verified invariant.
GroupSet invariant_torsion_group(const ActionContext& ctx, const GroupSet& h_prime,
                                 const GroupSet& a_prime, const GroupSet& h_ambient, int cap = 64);

struct UnipotentRow {
  Elem h;                          // torsion part, lands in H''
  std::vector<std::int64_t> n;     // coefficients over the earlier generators
};

struct UnipotentResult {
  GroupSet a_second;                       // centred, inside (A')^2
  std::vector<int> active;                 // generator indices with N_i >= l^2
  std::vector<std::size_t> order;          // generator permutation, dims descending
  std::map<std::string, std::vector<UnipotentRow>> rows;  // canonical(a) -> per active i
  Rational fraction{0, 1};                 // |A''| / |A|
  std::vector<std::string> stages;
};

UnipotentResult unipotent_refinement(const ActionContext& ctx, const GroupSet& h_second,
                                     const CosetProgression& hp, std::int64_t l,
                                     const GroupSet& a_prime, const Budget& budget = {});

struct KeyPropReport {
  CosetProgression progression;  // H + P with dimensions sorted descending
  GroupSet a_prime;              // centred subset of the configured power of A
  // per element of a_prime and per generator j: expansion data
  std::map<std::string, std::vector<UnipotentRow>> rows;
  bool h_invariant = false;
  bool rows_verified = false;
  int containment_m = -1;  // smallest m with H+P inside m-fold sum of the orbit set
  Rational approx_k{0, 1};
  std::vector<std::string> stages;
  bool ess_ok = false;
};

KeyPropReport key_proposition(const ActionContext& ctx, const PipelineConfig& cfg = {},
                              const Budget& budget = {});

// Named desk scenarios for tests and the CLI.
ActionContext make_scenario(const std::string& name);

}  // namespace solv
