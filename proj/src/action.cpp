#include "solv/action.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_map>

#include "solv/fourier.hpp"
#include "solv/series.hpp"

namespace solv {

namespace {

std::int64_t int_projection(const Group& g, const Elem& e) {
  switch (g.kind()) {
    case Kind::integers:
      return e[0];
    case Kind::lamplighter:
    case Kind::lamplighter_periodic:
      return e[0];
    default:
      throw error("action needs an integer projection of the acting group");
  }
}

using Matrix = std::vector<std::vector<std::int64_t>>;

Matrix mat_mul(const Matrix& a, const Matrix& b, std::int64_t q) {
  std::size_t k = a.size();
  Matrix r(k, std::vector<std::int64_t>(k, 0));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      std::int64_t s = 0;
      for (std::size_t t = 0; t < k; ++t) s = (s + (__int128)a[i][t] * b[t][j]) % q;
      r[i][j] = s;
    }
  return r;
}

Matrix mat_identity(std::size_t k) {
  Matrix r(k, std::vector<std::int64_t>(k, 0));
  for (std::size_t i = 0; i < k; ++i) r[i][i] = 1;
  return r;
}

std::int64_t inv_mod(std::int64_t a, std::int64_t q) {
  std::int64_t t = 0, newt = 1, r = q, newr = ((a % q) + q) % q;
  while (newr != 0) {
    std::int64_t quot = r / newr;
    std::int64_t tmp = t - quot * newt;
    t = newt;
    newt = tmp;
    tmp = r - quot * newr;
    r = newr;
    newr = tmp;
  }
  if (r != 1) throw error("matrix entry not invertible modulo q");
  return ((t % q) + q) % q;
}

Matrix mat_inverse(Matrix m, std::int64_t q) {
  std::size_t k = m.size();
  Matrix inv = mat_identity(k);
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t pivot = col;
    while (pivot < k && std::gcd(((m[pivot][col] % q) + q) % q, q) != 1) ++pivot;
    if (pivot == k) throw error("action matrix is singular modulo q");
    std::swap(m[col], m[pivot]);
    std::swap(inv[col], inv[pivot]);
    std::int64_t s = inv_mod(m[col][col], q);
    for (std::size_t j = 0; j < k; ++j) {
      m[col][j] = (__int128)m[col][j] * s % q;
      inv[col][j] = (__int128)inv[col][j] * s % q;
    }
    for (std::size_t row = 0; row < k; ++row) {
      if (row == col) continue;
      std::int64_t f = ((m[row][col] % q) + q) % q;
      if (f == 0) continue;
      for (std::size_t j = 0; j < k; ++j) {
        m[row][j] = ((m[row][j] - (__int128)f * m[col][j]) % q + q) % q;
        inv[row][j] = ((inv[row][j] - (__int128)f * inv[col][j]) % q + q) % q;
      }
    }
  }
  return inv;
}

Matrix mat_pow(const Matrix& m, std::int64_t n, std::int64_t q) {
  if (n < 0) return mat_pow(mat_inverse(m, q), -n, q);
  Matrix r = mat_identity(m.size());
  Matrix base = m;
  while (n > 0) {
    if (n & 1) r = mat_mul(r, base, q);
    if (n >>= 1) base = mat_mul(base, base, q);
  }
  return r;
}

std::int64_t uniform_modulus(const Group& v) {
  std::int64_t q = v.coord_order(0);
  for (int i = 0; i < v.coords(); ++i)
    if (v.coord_order(i) != q || q == 0)
      throw error("matrix_power action needs V = (Z_q)^k with one modulus");
  return q;
}

}  // namespace

Elem act(const ActionContext& ctx, const Elem& g, const Elem& x) {
  switch (ctx.rho.kind) {
    case ActionKind::trivial:
      return x;
    case ActionKind::coordinate_shift: {
      std::int64_t n = int_projection(ctx.g, g);
      int k = ctx.v.coords();
      std::int64_t shift = ((n % k) + k) % k;
      std::vector<std::int64_t> xs(static_cast<std::size_t>(k));
      for (int i = 0; i < k; ++i)
        xs[static_cast<std::size_t>(i)] = x[static_cast<int>((i - shift % k + k) % k)];
      return ctx.v.from_coords(xs);
    }
    case ActionKind::matrix_power: {
      std::int64_t q = uniform_modulus(ctx.v);
      std::int64_t n = int_projection(ctx.g, g);
      Matrix m = mat_pow(ctx.rho.matrix, n, q);
      int k = ctx.v.coords();
      std::vector<std::int64_t> xs(static_cast<std::size_t>(k), 0);
      for (int i = 0; i < k; ++i) {
        std::int64_t s = 0;
        for (int j = 0; j < k; ++j)
          s = (s + (__int128)m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * x[j]) % q;
        xs[static_cast<std::size_t>(i)] = s;
      }
      return ctx.v.from_coords(xs);
    }
  }
  throw error("unreachable");
}

bool action_checks(const ActionContext& ctx, std::uint64_t seed, int trials) {
  if (!ctx.a.is_centred() || !ctx.e.is_centred()) return false;
  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    Elem g1 = ctx.g.sample(rng, 2), g2 = ctx.g.sample(rng, 2);
    Elem x = ctx.v.sample(rng), y = ctx.v.sample(rng);
    if (!(act(ctx, g1, ctx.v.add(x, y)) == ctx.v.add(act(ctx, g1, x), act(ctx, g1, y))))
      return false;
    if (!(act(ctx, ctx.g.mul(g1, g2), x) == act(ctx, g1, act(ctx, g2, x)))) return false;
    if (!(act(ctx, ctx.g.inverse(g1), act(ctx, g1, x)) == x)) return false;
  }
  return true;
}

GroupSet orbit_set(const ActionContext& ctx, int power, const GroupSet& e, const Budget& budget) {
  GroupSet s = power <= 1 ? ctx.a : iterated_set(ctx.a, power, false, budget);
  std::set<Elem> out;
  for (const Elem& g : s.elems())
    for (const Elem& x : e.elems()) {
      out.insert(act(ctx, g, x));
      budget.charge(out.size(), "orbit set");
    }
  return GroupSet(ctx.v, std::vector<Elem>(out.begin(), out.end()));
}

NearInvariantResult near_invariant(const ActionContext& ctx, const Rational& eps,
                                   const PipelineConfig& cfg, const Budget& budget) {
  NearInvariantResult res;
  const Group& v = ctx.v;
  std::size_t vn = static_cast<std::size_t>(v.order());
  budget.charge(vn, "module table");

  // Expansion hypothesis: |rho(A^p)(2E)| <= K |E| (warn, do not stop).
  GroupSet twoe = product_set(ctx.e, ctx.e, budget);
  GroupSet expanded = orbit_set(ctx, cfg.ess_power, twoe, budget);
  res.ess_ratio = Rational(static_cast<std::int64_t>(expanded.size()),
                           static_cast<std::int64_t>(ctx.e.size()));
  res.ess_ok = res.ess_ratio <= cfg.k_bound;

  BsgSymReport bsg = bsg_symmetrize(ctx.a, cfg.k_bound, cfg.bsg_k0, cfg.bsg_eps, cfg.seed, 16, budget);
  if (!bsg.pass) throw verification_error("near_invariant: symmetrized quotient set not found");
  const GroupSet& d = bsg.d;

  // Index permutations of V for each averaging element.
  std::vector<std::vector<std::uint32_t>> perm(d.size(), std::vector<std::uint32_t>(vn));
  for (std::size_t di = 0; di < d.size(); ++di)
    for (std::size_t xi = 0; xi < vn; ++xi)
      perm[di][xi] =
          static_cast<std::uint32_t>(group_index(v, act(ctx, d.elems()[di], group_unindex(v, xi))));

  std::vector<long double> f(vn, 0.0L), next(vn, 0.0L);
  for (const Elem& e : ctx.e.elems()) f[group_index(v, e)] = 1.0L;
  long double mass0 = static_cast<long double>(ctx.e.size());

  auto l2 = [&](const std::vector<long double>& table) {
    long double s = 0;
    for (long double x : table) s += x * x;
    return s;
  };
  res.l2_trajectory.push_back(static_cast<double>(l2(f)));

  int chosen = -1;
  long double slack = 1.0L - 8.0L / static_cast<long double>(cfg.k0);
  for (int k = 0; k < cfg.k0; ++k) {
    std::fill(next.begin(), next.end(), 0.0L);
    for (std::size_t di = 0; di < d.size(); ++di)
      for (std::size_t xi = 0; xi < vn; ++xi) next[xi] += f[perm[di][xi]];
    for (std::size_t xi = 0; xi < vn; ++xi) next[xi] /= static_cast<long double>(d.size());
    long double cur_l2 = l2(f), next_l2 = l2(next);
    res.l2_trajectory.push_back(static_cast<double>(next_l2));
    if (next_l2 > cur_l2 * (1.0L + 1e-12L))
      throw verification_error("averaging increased the l2 norm");
    long double mass = 0;
    for (long double x : next) mass += x;
    if (std::abs(static_cast<double>(mass - mass0)) > 1e-6)
      throw verification_error("averaging leaked l1 mass");
    if (next_l2 >= slack * cur_l2) {
      chosen = k;
      break;
    }
    f.swap(next);
  }
  if (chosen < 0)
    throw verification_error("no near-stationary averaging step within the iteration cap");
  res.chosen_k = chosen;

  // Level-set selection over a fixed grid.
  GroupSet domain = orbit_set(ctx, cfg.orbit_power, ctx.e, budget);
  long double esize = static_cast<long double>(ctx.e.size());
  double best_margin = -1e18;
  double best_lambda = -1.0;
  for (int t = 1; t <= cfg.lambda_levels; ++t) {
    long double lambda = static_cast<long double>(t) / cfg.lambda_levels;
    long double hi = 0, band = 0;
    for (std::size_t xi = 0; xi < vn; ++xi) {
      if (f[xi] >= lambda) hi += f[xi] * f[xi];
      else if (f[xi] >= lambda - 1.0L / 16) band += f[xi] * f[xi];
    }
    if (hi < esize / 16 || band > esize / 8) continue;
    double margin = static_cast<double>((hi - 4 * band) / esize);
    if (margin >= best_margin) {  // >= so ties break toward larger lambda
      best_margin = margin;
      best_lambda = static_cast<double>(lambda);
    }
  }
  if (best_lambda < 0)
    throw verification_error("no level threshold satisfies the selection conditions");
  res.lambda = best_lambda;

  std::vector<Elem> eprime;
  for (const Elem& x : domain.elems())
    if (static_cast<double>(f[group_index(v, x)]) >= best_lambda) eprime.push_back(x);
  eprime.push_back(v.zero());
  res.e_prime = GroupSet(v, std::move(eprime));

  // Exact defects over D^2; keep the small-defect part.
  GroupSet d2 = product_set(d, d, budget);
  std::vector<Elem> aprime{ctx.g.identity()};
  for (const Elem& a : d2.elems()) {
    std::size_t moved = 0;
    for (const Elem& x : res.e_prime.elems())
      if (!res.e_prime.contains(act(ctx, a, x))) ++moved;
    Rational defect(static_cast<std::int64_t>(moved),
                    static_cast<std::int64_t>(res.e_prime.size()));
    if (defect <= eps) {
      aprime.push_back(a);
      res.defects.emplace_back(a, defect);
    }
  }
  res.a_prime = GroupSet(ctx.g, std::move(aprime));
  if (!res.a_prime.is_centred())
    throw verification_error("near-invariant selection produced a non-centred set");
  if (res.e_prime.size() * 16 < ctx.e.size())
    throw verification_error("near-invariant level set degenerate: |E'| < |E|/16");
  if (res.a_prime.size() < std::max<std::size_t>(2, ctx.a.size() / 64))
    throw verification_error("near-invariant refinement degenerate: |A'| too small");
  return res;
}

namespace {

// Torsion-plus-box hull: stabilizer subgroup, then a per-coordinate box fit
// on quotient representatives; falls back to the generated subgroup when the
// box is larger.
std::pair<GroupSet, Gap> progression_hull(const Group& v, const GroupSet& s) {
  std::vector<Elem> stab;
  for (const Elem& h : s.elems()) {
    bool ok = true;
    for (const Elem& x : s.elems())
      if (!s.contains(v.add(h, x))) {
        ok = false;
        break;
      }
    if (ok) stab.push_back(h);
  }
  GroupSet h(v, std::move(stab));

  // canonical representatives of S modulo H
  std::set<Elem> reps;
  for (const Elem& x : s.elems()) {
    Elem best = x;
    for (const Elem& hh : h.elems()) best = std::min(best, v.add(x, hh));
    reps.insert(best);
  }

  Gap box;
  box.ambient = v;
  int k = v.coords();
  for (int i = 0; i < k; ++i) {
    std::int64_t n = v.coord_order(i);
    std::int64_t g = 0, maxlift = 0;
    for (const Elem& r : reps) {
      std::int64_t lift = r[i] > n / 2 ? r[i] - n : r[i];
      g = std::gcd(g, lift < 0 ? -lift : lift);
      maxlift = std::max(maxlift, lift < 0 ? -lift : lift);
    }
    if (g == 0) continue;
    std::vector<std::int64_t> gen(static_cast<std::size_t>(k), 0);
    gen[static_cast<std::size_t>(i)] = g;
    box.generators.push_back(v.from_coords(gen));
    box.dims.push_back(maxlift / g);
  }

  GroupSet span = subgroup_closure(s);
  std::size_t box_volume = h.size() * box.formal_size();
  if (span.size() <= box_volume) {
    Gap empty;
    empty.ambient = v;
    return {span, empty};
  }
  return {h, box};
}

}  // namespace

GoodCosetResult good_coset_progression(const ActionContext& ctx, const GrowthFn& f,
                                       const PipelineConfig& cfg, const Budget& budget) {
  Rational eps = cfg.gc_eps;
  std::string last_failure = "unknown";
  for (int attempt = 0; attempt < 3; ++attempt, eps = Rational(eps.num, eps.den * 2)) {
    GoodCosetResult res;
    res.stages.push_back("near_invariant(eps=" + eps.str() + ")");
    res.near = near_invariant(ctx, eps, cfg, budget);

    GroupSet s = orbit_set(ctx, cfg.orbit_power, ctx.e, budget);
    s = s.union_with(res.near.e_prime).union_with(ctx.e);
    auto [h0, gap0] = progression_hull(ctx.v, s);
    res.stages.push_back("hull(|H|=" + std::to_string(h0.size()) +
                         ", rank=" + std::to_string(gap0.rank()) + ")");

    CosetProgression cp;
    cp.subgroup = h0;
    cp.gap = gap0;
    GrowthFn f_rr = [&](const Rational& m) { return std::max<std::int64_t>(f(m), 4); };
    RankReduceResult rr = rank_reduce(cp, f_rr, 8, budget);
    cp = rr.out;
    res.stages.push_back("rank_reduce(rank=" + std::to_string(cp.gap.rank()) + ")");

    GroupSet cp_set = cp.enumerate(budget);
    bool contained = true;
    for (const Elem& x : s.elems())
      if (!cp_set.contains(x)) contained = false;
    if (!contained) {
      last_failure = "hull containment";
      continue;
    }

    // Certified refinement level, retried upward until the invariance
    // condition verifies; the minimal certified l need not be the one the
    // verification accepts.
    Rational m_ratio(static_cast<std::int64_t>(cp_set.size()),
                     static_cast<std::int64_t>(ctx.e.size()));
    std::int64_t f_m = f(m_ratio);
    int power = static_cast<int>(std::min<std::int64_t>(f_m, cfg.power_cap));
    GroupSet apow = iterated_set(res.near.a_prime, power, false, budget);

    bool done = false;
    for (std::int64_t l = 1; l <= 6 && !done; ++l) {
      auto cert = sarkozy_coset_at(res.near.e_prime, cp, l, 5, budget);
      if (!cert) continue;
      // Final progression: dimensions inflated to 2m * N.
      CosetProgression final_cp = cp;
      for (std::int64_t& nd : final_cp.gap.dims) nd *= 2 * cert->m;
      GroupSet final_set = final_cp.enumerate(budget);
      Gap pl = cp.gap.refined(l);
      GroupSet plset =
          pl.rank() == 0 ? GroupSet(ctx.v, {ctx.v.zero()}) : pl.enumerate(budget);
      GroupSet targets = product_set(cert->Hprime, plset, budget);
      bool joke_ok = true;
      for (const Elem& a : apow.elems()) {
        for (const Elem& x : targets.elems())
          if (!final_set.contains(act(ctx, a, x))) {
            joke_ok = false;
            break;
          }
        if (!joke_ok) break;
      }
      if (!joke_ok) {
        last_failure = "invariance of H'+P_l under (A')^F(M) at l=" + std::to_string(l);
        continue;
      }
      bool e_ok = true;
      for (const Elem& x : ctx.e.elems())
        if (!final_set.contains(x)) e_ok = false;
      if (!e_ok) {
        last_failure = "E containment in the final progression";
        continue;
      }
      res.hp = final_cp;
      res.h_prime = cert->Hprime;
      res.l = l;
      res.m = cert->m;
      res.a_prime = res.near.a_prime;
      res.used_power = power;
      res.measured_c = Rational(static_cast<std::int64_t>(final_set.size()),
                                static_cast<std::int64_t>(ctx.e.size()));
      res.stages.push_back("sarkozy(m=" + std::to_string(cert->m) + ", l=" + std::to_string(l) +
                           ", |H'|=" + std::to_string(cert->Hprime.size()) + ")");
      done = true;
    }
    if (done) return res;
  }
  throw verification_error("good_coset_progression failed; last stage: " + last_failure);
}

GroupSet invariant_torsion_group(const ActionContext& ctx, const GroupSet& h_prime,
                                 const GroupSet& a_prime, const GroupSet& h_ambient, int cap) {
  const Group& v = ctx.v;
  GroupSet cur = subgroup_closure(h_prime);
  for (int round = 0; round < cap; ++round) {
    std::vector<Elem> next_gens = cur.elems();
    for (const Elem& a : a_prime.elems())
      for (const Elem& x : cur.elems()) next_gens.push_back(act(ctx, a, x));
    GroupSet next = subgroup_closure(GroupSet(v, std::move(next_gens)));
    for (const Elem& x : next.elems())
      if (!h_ambient.contains(x))
        throw verification_error("invariant torsion chain escapes H; grow F");
    if (next == cur) {
      // verified setwise invariant
      for (const Elem& a : a_prime.elems()) {
        std::vector<Elem> image;
        for (const Elem& x : cur.elems()) image.push_back(act(ctx, a, x));
        if (!(GroupSet(v, image) == cur))
          throw verification_error("stabilized torsion group is not invariant");
      }
      return cur;
    }
    cur = next;
  }
  throw verification_error("invariant torsion chain failed to stabilize (impossible for finite H)");
}

namespace {

std::vector<std::size_t> sorted_generator_order(const Gap& gap) {
  std::vector<std::size_t> order(gap.dims.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return gap.dims[a] > gap.dims[b]; });
  return order;
}

}  // namespace

UnipotentResult unipotent_refinement(const ActionContext& ctx, const GroupSet& h_second,
                                     const CosetProgression& hp, std::int64_t l,
                                     const GroupSet& a_prime, const Budget& budget) {
  const Group& v = ctx.v;
  UnipotentResult res;
  res.order = sorted_generator_order(hp.gap);
  for (std::size_t pos = 0; pos < res.order.size(); ++pos)
    if (hp.gap.dims[res.order[pos]] >= l * l) res.active.push_back(static_cast<int>(pos));

  // Sorted-generator view of the progression for unique decomposition.
  CosetProgression sorted_cp;
  sorted_cp.subgroup = hp.subgroup;
  sorted_cp.gap.ambient = v;
  for (std::size_t idx : res.order) {
    sorted_cp.gap.generators.push_back(hp.gap.generators[idx]);
    sorted_cp.gap.dims.push_back(hp.gap.dims[idx]);
  }
  DecomposeTable table(sorted_cp, 2, budget);

  GroupSet cur = a_prime;
  GroupSet w = subgroup_closure(h_second);
  res.stages.push_back("start |A'|=" + std::to_string(cur.size()));
  for (std::size_t step = 0; step < res.active.size(); ++step) {
    int pos = res.active[step];
    const Elem& gen = sorted_cp.gap.generators[static_cast<std::size_t>(pos)];
    Elem lgen = v.scale(gen, l);

    auto key_of = [&](const Elem& a) {
      Elem y = v.add(act(ctx, a, lgen), v.neg(lgen));
      Elem best = y;
      for (const Elem& ww : w.elems()) best = std::min(best, v.add(y, v.neg(ww)));
      return best;
    };

    GroupSet pool = step == 0 ? cur : product_set(cur.inverse_set(), cur, budget);
    std::map<Elem, std::vector<Elem>> classes;
    for (const Elem& a : pool.elems()) classes[key_of(a)].push_back(a);
    const std::vector<Elem>* largest = nullptr;
    for (const auto& [key, members] : classes)
      if (!largest || members.size() > largest->size()) largest = &members;
    if (!largest || largest->empty())
      throw verification_error("pigeonhole class empty at stage " + std::to_string(step + 1));
    GroupSet chosen(ctx.g, *largest);

    if (step == 0) {
      cur = chosen;
    } else {
      // Index repair: pull the refined class back inside the previous set.
      const Elem* best_a = nullptr;
      std::size_t best_count = 0;
      for (const Elem& a1 : cur.elems()) {
        std::size_t count = 0;
        for (const Elem& b : chosen.elems())
          if (cur.contains(ctx.g.mul(a1, b))) ++count;
        if (count > best_count) {
          best_count = count;
          best_a = &a1;
        }
      }
      if (!best_a)
        throw verification_error("index repair found no representative at stage " +
                                 std::to_string(step + 1));
      std::vector<Elem> repaired;
      for (const Elem& b : chosen.elems()) {
        Elem moved = ctx.g.mul(*best_a, b);
        if (cur.contains(moved)) repaired.push_back(moved);
      }
      cur = GroupSet(ctx.g, std::move(repaired));
    }
    res.stages.push_back("stage " + std::to_string(step + 1) + " |A_i|=" +
                         std::to_string(cur.size()));
    // widen the modulus for the next generator
    std::vector<Elem> wg = w.elems();
    wg.push_back(lgen);
    w = subgroup_closure(GroupSet(v, std::move(wg)));
  }

  GroupSet a_second = product_set(cur.inverse_set(), cur, budget).with_identity();

  // Hard check: the expansion of every active generator is unipotent with a
  // torsion part inside H''.
  for (const Elem& a : a_second.elems()) {
    std::vector<UnipotentRow> rows;
    for (std::size_t step = 0; step < res.active.size(); ++step) {
      int pos = res.active[step];
      Elem lgen = v.scale(sorted_cp.gap.generators[static_cast<std::size_t>(pos)], l);
      Elem y = v.add(act(ctx, a, lgen), v.neg(lgen));
      auto coords = table.find(y);
      if (!coords || !h_second.contains(coords->h))
        throw verification_error("unipotent expansion failed at stage " + std::to_string(step + 1));
      UnipotentRow row;
      row.h = coords->h;
      row.n.assign(sorted_cp.gap.dims.size(), 0);
      for (std::size_t j = 0; j < coords->n.size(); ++j) {
        if (coords->n[j] == 0) continue;
        if (static_cast<int>(j) >= pos)
          throw verification_error("expansion not strictly lower-triangular at stage " +
                                   std::to_string(step + 1));
        if (coords->n[j] % l != 0)
          throw verification_error("expansion coefficient not a multiple of l");
        row.n[j] = coords->n[j] / l;
      }
      rows.push_back(std::move(row));
    }
    res.rows[ctx.g.canonical(a)] = std::move(rows);
  }
  res.a_second = a_second;
  res.fraction = Rational(static_cast<std::int64_t>(a_second.size()),
                          static_cast<std::int64_t>(ctx.a.size()));
  return res;
}

KeyPropReport key_proposition(const ActionContext& ctx, const PipelineConfig& cfg,
                              const Budget& budget) {
  KeyPropReport rep;
  const Group& v = ctx.v;
  try {
    rep.stages.push_back("certificates");
    ApproxCertificate cert = approx_certificate(ctx.a, CertMethod::greedy, 4096, budget);
    rep.approx_k = cert.K;

    GrowthFn f = [&](const Rational&) { return cfg.fm; };
    rep.stages.push_back("good_coset_progression");
    GoodCosetResult gc = good_coset_progression(ctx, f, cfg, budget);
    rep.ess_ok = gc.near.ess_ok;

    rep.stages.push_back("invariant_torsion_group");
    GroupSet h2 = invariant_torsion_group(ctx, gc.h_prime, gc.a_prime, gc.hp.subgroup);

    rep.stages.push_back("unipotent_refinement");
    UnipotentResult ur = unipotent_refinement(ctx, h2, gc.hp, gc.l, gc.a_prime, budget);

    rep.stages.push_back("assembly");
    // Sorted active refined generators first, then the covering translates.
    std::vector<Elem> gens;
    std::vector<std::int64_t> dims;
    for (int pos : ur.active) {
      std::size_t idx = ur.order[static_cast<std::size_t>(pos)];
      gens.push_back(v.scale(gc.hp.gap.generators[idx], gc.l));
      dims.push_back(gc.hp.gap.dims[idx] / (gc.l * gc.l));
    }
    CosetProgression tset_cp;
    tset_cp.subgroup = h2;
    tset_cp.gap.ambient = v;
    tset_cp.gap.generators = gens;
    tset_cp.gap.dims = dims;
    GroupSet tset = tset_cp.enumerate(budget);

    auto cover = [&](const std::vector<Elem>& points) {
      std::vector<Elem> translates;
      std::set<Elem> covered;
      for (const Elem& p : points) {
        if (covered.count(p)) continue;
        translates.push_back(p);
        for (const Elem& t : tset.elems()) covered.insert(v.add(p, t));
      }
      return translates;
    };
    std::vector<Elem> e_cover = cover(ctx.e.elems());

    std::vector<Elem> images;
    for (const Elem& a : ur.a_second.elems())
      for (const Elem& e : e_cover) images.push_back(act(ctx, a, e));
    std::vector<Elem> f_cover = cover(images);

    auto translate_index = [&](const Elem& x) {
      for (std::size_t i = 0; i < f_cover.size(); ++i) {
        Elem diff = v.add(x, v.neg(f_cover[i]));
        if (tset.contains(diff)) return static_cast<int>(i);
      }
      return -1;
    };
    std::map<std::vector<int>, std::vector<Elem>> classes;
    for (const Elem& a : ur.a_second.elems()) {
      std::vector<int> key;
      for (const Elem& e : e_cover) key.push_back(translate_index(act(ctx, a, e)));
      classes[key].push_back(a);
    }
    const std::vector<Elem>* largest = nullptr;
    for (const auto& [key, members] : classes)
      if (!largest || members.size() > largest->size()) largest = &members;
    if (!largest) throw verification_error("empty covering pigeonhole");
    GroupSet a3(ctx.g, *largest);
    GroupSet a_final = product_set(a3.inverse_set(), a3, budget).with_identity();

    // Final progression: refined dimensions, then unit boxes over the
    // covering translates (nonzero ones only).
    CosetProgression final_cp = tset_cp;
    for (const Elem& e : e_cover) {
      if (e == v.zero()) continue;
      final_cp.gap.generators.push_back(e);
      final_cp.gap.dims.push_back(1);
    }
    rep.progression = final_cp;
    rep.a_prime = a_final;

    // Expansion rows for every generator, verified strictly lower-triangular
    // with torsion part in H''.
    rep.rows_verified = true;
    std::size_t gen_count = final_cp.gap.generators.size();
    std::vector<std::optional<DecomposeTable>> prefix_tables(gen_count);
    for (std::size_t j = 0; j < gen_count; ++j) {
      CosetProgression prefix;
      prefix.subgroup = h2;
      prefix.gap.ambient = v;
      for (std::size_t i = 0; i < j; ++i) {
        prefix.gap.generators.push_back(final_cp.gap.generators[i]);
        prefix.gap.dims.push_back(4 * final_cp.gap.dims[i]);
      }
      prefix_tables[j].emplace(prefix, 1, budget);
    }
    for (const Elem& a : a_final.elems()) {
      std::vector<UnipotentRow> rows;
      for (std::size_t j = 0; j < gen_count; ++j) {
        Elem g_j = final_cp.gap.generators[j];
        Elem y = v.add(act(ctx, a, g_j), v.neg(g_j));
        auto coords = prefix_tables[j]->find(y);
        if (!coords) {
          rep.rows_verified = false;
          break;
        }
        UnipotentRow row;
        row.h = coords->h;
        row.n.assign(gen_count, 0);
        for (std::size_t i = 0; i < coords->n.size(); ++i) row.n[i] = coords->n[i];
        rows.push_back(std::move(row));
      }
      if (!rep.rows_verified) break;
      rep.rows[ctx.g.canonical(a)] = std::move(rows);
    }

    // Setwise invariance of the torsion group under the final set.
    rep.h_invariant = true;
    for (const Elem& a : a_final.elems()) {
      std::vector<Elem> image;
      for (const Elem& h : h2.elems()) image.push_back(act(ctx, a, h));
      if (!(GroupSet(v, image) == h2)) rep.h_invariant = false;
    }

    // Smallest m with H+P inside the m-fold sum of the orbit set.
    GroupSet orbit = orbit_set(ctx, cfg.ess_power, product_set(ctx.e, ctx.e, budget), budget);
    GroupSet final_set = final_cp.enumerate(budget);
    GroupSet acc = orbit;
    for (int m = 1; m <= cfg.containment_cap; ++m) {
      bool ok = true;
      for (const Elem& x : final_set.elems())
        if (!acc.contains(x)) {
          ok = false;
          break;
        }
      if (ok) {
        rep.containment_m = m;
        break;
      }
      acc = product_set(acc, orbit, budget);
    }
    rep.stages.push_back("done");
  } catch (const error& err) {
    rep.stages.push_back(std::string("failed: ") + err.what());
  }
  return rep;
}

ActionContext make_scenario(const std::string& name) {
  ActionContext ctx;
  if (name == "trivial") {
    ctx.g = Group::integers();
    ctx.v = Group::finite_abelian({64});
    ctx.rho.kind = ActionKind::trivial;
    std::vector<Elem> ae;
    for (std::int64_t n = -4; n <= 4; ++n) ae.push_back(Elem{n});
    ctx.a = GroupSet(ctx.g, ae);
    std::vector<Elem> ee;
    for (std::int64_t x = -10; x <= 10; ++x) ee.push_back(ctx.v.from_coords({x}));
    ctx.e = GroupSet(ctx.v, ee);
    return ctx;
  }
  if (name == "shift-lamplighter") {
    ctx.g = Group::lamplighter(20);
    ctx.v = Group::finite_abelian({2, 2, 2, 2, 2, 2, 2, 2});
    ctx.rho.kind = ActionKind::coordinate_shift;
    std::vector<Elem> ae{ctx.g.identity()};
    ae.push_back(ctx.g.make_lamp(1, {}));
    ae.push_back(ctx.g.make_lamp(-1, {}));
    ae.push_back(ctx.g.make_lamp(0, {0}));
    ctx.a = GroupSet(ctx.g, ae);
    std::vector<Elem> ee{ctx.v.zero()};
    for (int i = 0; i < 8; ++i) {
      std::vector<std::int64_t> xs(8, 0);
      xs[static_cast<std::size_t>(i)] = 1;
      ee.push_back(ctx.v.from_coords(xs));
    }
    ctx.e = GroupSet(ctx.v, ee);
    return ctx;
  }
  if (name == "planted-unipotent") {
    ctx.g = Group::integers();
    ctx.v = Group::finite_abelian({257, 257});
    ctx.rho.kind = ActionKind::matrix_power;
    ctx.rho.matrix = {{1, 0}, {1, 1}};  // (x, y) -> (x, y + n x) under M^n
    std::vector<Elem> ae;
    for (std::int64_t n = -3; n <= 3; ++n) ae.push_back(Elem{n});
    ctx.a = GroupSet(ctx.g, ae);
    std::vector<Elem> ee;
    for (std::int64_t x = -2; x <= 2; ++x)
      for (std::int64_t y = -16; y <= 16; ++y) ee.push_back(ctx.v.from_coords({x, y}));
    ctx.e = GroupSet(ctx.v, ee);
    return ctx;
  }
  if (name == "adversarial") {
    ctx.g = Group::integers();
    ctx.v = Group::finite_abelian({1009});
    ctx.rho.kind = ActionKind::matrix_power;
    ctx.rho.matrix = {{11}};  // multiplication by 11^n: violently expanding
    std::vector<Elem> ae;
    for (std::int64_t n = -4; n <= 4; ++n) ae.push_back(Elem{n});
    ctx.a = GroupSet(ctx.g, ae);
    std::vector<Elem> ee;
    for (std::int64_t x = -8; x <= 8; ++x) ee.push_back(ctx.v.from_coords({x}));
    ctx.e = GroupSet(ctx.v, ee);
    return ctx;
  }
  throw parse_error("unknown scenario: " + name, 0);
}

}  // namespace solv
