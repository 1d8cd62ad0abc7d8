#include "solv/groupset.hpp"

#include <algorithm>
#include <unordered_set>

namespace solv {

GroupSet::GroupSet(Group g, std::vector<Elem> elems) : group_(std::move(g)), elems_(std::move(elems)) {
  for (const Elem& e : elems_) group_.validate(e);
  std::sort(elems_.begin(), elems_.end());
  elems_.erase(std::unique(elems_.begin(), elems_.end()), elems_.end());
}

bool GroupSet::contains(const Elem& e) const {
  return std::binary_search(elems_.begin(), elems_.end(), e);
}

bool GroupSet::is_symmetric() const {
  for (const Elem& e : elems_)
    if (!contains(group_.inverse(e))) return false;
  return true;
}

bool GroupSet::is_centred() const { return contains(group_.identity()) && is_symmetric(); }

GroupSet GroupSet::inverse_set() const {
  std::vector<Elem> out;
  out.reserve(elems_.size());
  for (const Elem& e : elems_) out.push_back(group_.inverse(e));
  return GroupSet(group_, std::move(out));
}

GroupSet GroupSet::with_identity() const {
  std::vector<Elem> out = elems_;
  out.push_back(group_.identity());
  return GroupSet(group_, std::move(out));
}

GroupSet GroupSet::union_with(const GroupSet& other) const {
  if (group_ != other.group_) throw error("union of sets over different groups");
  std::vector<Elem> out;
  std::set_union(elems_.begin(), elems_.end(), other.elems_.begin(), other.elems_.end(),
                 std::back_inserter(out));
  GroupSet r(group_);
  r.elems_ = std::move(out);
  return r;
}

GroupSet GroupSet::intersect(const GroupSet& other) const {
  if (group_ != other.group_) throw error("intersection of sets over different groups");
  std::vector<Elem> out;
  std::set_intersection(elems_.begin(), elems_.end(), other.elems_.begin(), other.elems_.end(),
                        std::back_inserter(out));
  GroupSet r(group_);
  r.elems_ = std::move(out);
  return r;
}

GroupSet GroupSet::difference(const GroupSet& other) const {
  if (group_ != other.group_) throw error("difference of sets over different groups");
  std::vector<Elem> out;
  std::set_difference(elems_.begin(), elems_.end(), other.elems_.begin(), other.elems_.end(),
                      std::back_inserter(out));
  GroupSet r(group_);
  r.elems_ = std::move(out);
  return r;
}

std::vector<std::string> GroupSet::canonical_strings() const {
  std::vector<std::string> out;
  out.reserve(elems_.size());
  for (const Elem& e : elems_) out.push_back(group_.canonical(e));
  return out;
}

GroupSet product_set(const GroupSet& a, const GroupSet& b, const Budget& budget) {
  if (a.group() != b.group()) throw error("product of sets over different groups");
  const Group& g = a.group();
  budget.charge(a.size() * b.size() / 8 + 1, "product set");
  std::unordered_set<Elem, ElemHash> seen;
  seen.reserve(a.size() + b.size());
  for (const Elem& x : a.elems())
    for (const Elem& y : b.elems()) {
      seen.insert(g.mul(x, y));
      budget.charge(seen.size(), "product set");
    }
  std::vector<Elem> out(seen.begin(), seen.end());
  return GroupSet(g, std::move(out));
}

GroupSet iterated_set(const GroupSet& a, int k, bool signed_powers, const Budget& budget) {
  const Group& g = a.group();
  if (k <= 0) return GroupSet(g, {g.identity()});
  GroupSet base = signed_powers ? a.union_with(a.inverse_set()).with_identity() : a;
  GroupSet acc = base;
  for (int i = 1; i < k; ++i) acc = product_set(acc, base, budget);
  return acc;
}

std::pair<Rational, Rational> expansion_constants(const GroupSet& a, const Budget& budget) {
  if (a.empty()) throw error("expansion constants of an empty set");
  GroupSet sq = product_set(a, a, budget);
  GroupSet cu = product_set(sq, a, budget);
  auto n = static_cast<std::int64_t>(a.size());
  return {Rational(static_cast<std::int64_t>(sq.size()), n),
          Rational(static_cast<std::int64_t>(cu.size()), n)};
}

GroupSet symmetrized_cube(const GroupSet& a, const Budget& budget) {
  return iterated_set(a, 3, true, budget);
}

namespace {

// Checks S subset of X * T (left translates).
bool covered_left(const GroupSet& s, const GroupSet& x, const GroupSet& t) {
  const Group& g = s.group();
  for (const Elem& e : s.elems()) {
    bool hit = false;
    for (const Elem& xe : x.elems()) {
      if (t.contains(g.mul(g.inverse(xe), e))) {
        hit = true;
        break;
      }
    }
    if (!hit) return false;
  }
  return true;
}

bool covered_right(const GroupSet& s, const GroupSet& t, const GroupSet& x) {
  const Group& g = s.group();
  for (const Elem& e : s.elems()) {
    bool hit = false;
    for (const Elem& xe : x.elems()) {
      if (t.contains(g.mul(e, g.inverse(xe)))) {
        hit = true;
        break;
      }
    }
    if (!hit) return false;
  }
  return true;
}

void verify_inclusions(const GroupSet& a, ApproxCertificate& cert, const Budget& budget) {
  GroupSet sq = product_set(a, a, budget);
  GroupSet xa = product_set(cert.X, a, budget);
  GroupSet ax = product_set(a, cert.X, budget);
  GroupSet axx = product_set(ax, cert.X, budget);
  GroupSet xxa = product_set(product_set(cert.X, cert.X, budget), a, budget);
  auto subset = [](const GroupSet& s, const GroupSet& t) {
    for (const Elem& e : s.elems())
      if (!t.contains(e)) return false;
    return true;
  };
  cert.sq_in_xa = subset(sq, xa);
  cert.xa_in_axx = subset(xa, axx);
  cert.sq_in_ax = subset(sq, ax);
  cert.ax_in_xxa = subset(ax, xxa);
}

// Ruzsa-style cover of A^2 by translates u*A, u running over uncovered
// elements in canonical order.
std::vector<Elem> greedy_translators(const GroupSet& a, const Budget& budget) {
  const Group& g = a.group();
  GroupSet sq = product_set(a, a, budget);
  std::vector<Elem> xs;
  std::unordered_set<Elem, ElemHash> covered;
  for (const Elem& u : sq.elems()) {
    if (covered.count(u)) continue;
    xs.push_back(u);
    for (const Elem& e : a.elems()) covered.insert(g.mul(u, e));
  }
  return xs;
}

}  // namespace

ApproxCertificate approx_certificate(const GroupSet& a, CertMethod method,
                                     std::size_t budget_candidates, const Budget& budget) {
  if (!a.is_centred()) throw error("approx_certificate requires a centred set");
  const Group& g = a.group();

  auto finish = [&](std::vector<Elem> xs) {
    ApproxCertificate cert;
    cert.X = GroupSet(g, std::move(xs));
    cert.K = Rational(static_cast<std::int64_t>(cert.X.size()));
    verify_inclusions(a, cert, budget);
    return cert;
  };

  if (method == CertMethod::exhaustive) {
    GroupSet sq = product_set(a, a, budget);
    if (sq.size() > budget_candidates)
      throw budget_error("exhaustive certificate search: candidate set too large");
    const auto& cand = sq.elems();
    // All X of size 1, then 2, then 3; give up beyond that and fall back.
    for (std::size_t sz = 1; sz <= 3 && sz <= cand.size(); ++sz) {
      std::vector<std::size_t> idx(sz);
      for (std::size_t i = 0; i < sz; ++i) idx[i] = i;
      while (true) {
        std::vector<Elem> xs;
        for (std::size_t i : idx) xs.push_back(cand[i]);
        ApproxCertificate cert = finish(xs);
        if (cert.verified()) return cert;
        // next combination
        std::size_t i = sz;
        while (i > 0 && idx[i - 1] == cand.size() - sz + i - 1) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (std::size_t j = i; j < sz; ++j) idx[j] = idx[j - 1] + 1;
      }
    }
    // No tiny certificate; fall through to the greedy one.
  }

  std::vector<Elem> xs = greedy_translators(a, budget);
  {
    std::vector<Elem> sym = xs;
    for (const Elem& x : xs) sym.push_back(g.inverse(x));
    sym.push_back(g.identity());
    ApproxCertificate cert = finish(sym);
    if (cert.verified()) return cert;
  }
  // Repair: A^2 together with the identity always verifies; shrink later runs
  // can do better but correctness comes first.
  GroupSet sq = product_set(a, a, budget);
  std::vector<Elem> all = sq.elems();
  all.push_back(g.identity());
  ApproxCertificate cert = finish(all);
  if (!cert.verified()) throw verification_error("approximate-group certificate repair failed");
  return cert;
}

std::optional<ControlCertificate> control_certificate(const GroupSet& a, const GroupSet& b,
                                                      std::size_t budget_translates,
                                                      const Budget& budget) {
  if (a.group() != b.group()) throw error("control certificate across different groups");
  if (a.empty() || b.empty()) throw error("control certificate of an empty set");
  const Group& g = a.group();

  // Left cover A in X_L * B.
  std::vector<Elem> xl;
  {
    std::unordered_set<Elem, ElemHash> covered;
    for (const Elem& e : a.elems()) {
      if (covered.count(e)) continue;
      Elem x = g.mul(e, g.inverse(b.elems().front()));
      xl.push_back(x);
      for (const Elem& be : b.elems()) covered.insert(g.mul(x, be));
      if (xl.size() > budget_translates) return std::nullopt;
    }
  }
  // Right cover A in B * X_R.
  std::vector<Elem> xr;
  {
    std::unordered_set<Elem, ElemHash> covered;
    for (const Elem& e : a.elems()) {
      if (covered.count(e)) continue;
      Elem x = g.mul(g.inverse(b.elems().front()), e);
      xr.push_back(x);
      for (const Elem& be : b.elems()) covered.insert(g.mul(be, x));
      if (xr.size() > budget_translates) return std::nullopt;
    }
  }
  std::vector<Elem> xs = xl;
  xs.insert(xs.end(), xr.begin(), xr.end());
  ControlCertificate cert;
  cert.X = GroupSet(g, std::move(xs));
  std::int64_t k_size = static_cast<std::int64_t>(cert.X.size());
  Rational k_ratio(static_cast<std::int64_t>(b.size()), static_cast<std::int64_t>(a.size()));
  cert.K = std::max(Rational(k_size), k_ratio);
  cert.verified = covered_left(a, cert.X, b) && covered_right(a, b, cert.X);
  if (!cert.verified) return std::nullopt;
  return cert;
}

FiberReport fiber_statistics(const GroupSet& a, int k, const Budget& budget) {
  const Group& g = a.group();
  if (!g.has_projection()) throw error("no canonical projection for " + g.spec_string());
  if (!a.is_centred()) throw error("fiber_statistics requires a centred set");
  Group pg = g.projection_group();
  GroupSet ak = iterated_set(a, k, false, budget);

  std::unordered_set<Elem, ElemHash> proj_a;
  for (const Elem& e : a.elems()) proj_a.insert(g.project(e));

  std::vector<Elem> images;
  images.reserve(ak.size());
  for (const Elem& e : ak.elems()) images.push_back(g.project(e));
  std::sort(images.begin(), images.end());

  FiberReport rep;
  rep.projected_size = proj_a.size();
  Elem ker_key = pg.identity();
  std::size_t fibers = 0;
  std::size_t i = 0;
  rep.min_fiber = ak.size();
  while (i < images.size()) {
    std::size_t j = i;
    while (j < images.size() && images[j] == images[i]) ++j;
    std::size_t count = j - i;
    ++fibers;
    rep.min_fiber = std::min(rep.min_fiber, count);
    rep.max_fiber = std::max(rep.max_fiber, count);
    if (images[i] == ker_key) rep.kernel_size = count;
    i = j;
  }
  rep.mean_fiber = Rational(static_cast<std::int64_t>(ak.size()), static_cast<std::int64_t>(fibers));
  rep.max_over_min = Rational(static_cast<std::int64_t>(rep.max_fiber),
                              static_cast<std::int64_t>(std::max<std::size_t>(rep.min_fiber, 1)));
  return rep;
}

}  // namespace solv
