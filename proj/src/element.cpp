#include "solv/element.hpp"

#include <algorithm>
#include <sstream>

namespace solv {

namespace {

std::int64_t floor_mod(std::int64_t a, std::int64_t n) {
  std::int64_t r = a % n;
  return r < 0 ? r + n : r;
}

std::int64_t mod_pow(std::int64_t b, std::int64_t e, std::int64_t p) {
  b = floor_mod(b, p);
  std::int64_t r = 1;
  while (e > 0) {
    if (e & 1) r = (__int128)r * b % p;
    b = (__int128)b * b % p;
    e >>= 1;
  }
  return r;
}

std::int64_t mod_inv(std::int64_t a, std::int64_t p) { return mod_pow(a, p - 2, p); }

bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

}  // namespace

Group Group::lattice(int rank) {
  if (rank < 1 || rank > Elem::kMaxLen) throw error("lattice rank out of range");
  return Group(Kind::lattice, {rank});
}

Group Group::finite_abelian(std::vector<std::int64_t> orders) {
  if (orders.empty() || orders.size() > Elem::kMaxLen)
    throw error("finite_abelian needs 1..8 cyclic orders");
  for (std::int64_t n : orders)
    if (n < 0) throw error("finite_abelian orders must be >= 0");
  return Group(Kind::finite_abelian, std::move(orders));
}

Group Group::lamplighter(int window) {
  if (window < 1 || window > 31) throw error("lamplighter window must be in [1, 31]");
  return Group(Kind::lamplighter, {window});
}

Group Group::lamplighter_periodic(int period) {
  if (period < 1 || period > 63) throw error("lamplighter period must be in [1, 63]");
  return Group(Kind::lamplighter_periodic, {period});
}

Group Group::ut3(std::int64_t p) {
  if (!is_prime(p)) throw error("ut3 requires a prime modulus");
  return Group(Kind::ut3, {p});
}

int Group::coords() const {
  switch (kind_) {
    case Kind::integers:
      return 1;
    case Kind::lattice:
      return static_cast<int>(params_[0]);
    case Kind::finite_abelian:
      return static_cast<int>(params_.size());
    default:
      throw error("coords() on non-abelian-kind group");
  }
}

std::int64_t Group::coord_order(int i) const {
  if (kind_ == Kind::finite_abelian) return params_[static_cast<std::size_t>(i)];
  if (kind_ == Kind::integers || kind_ == Kind::lattice) return 0;
  throw error("coord_order() on non-abelian-kind group");
}

int Group::window() const {
  if (kind_ != Kind::lamplighter && kind_ != Kind::lamplighter_periodic)
    throw error("window() on non-lamplighter group");
  return static_cast<int>(params_[0]);
}

Elem Group::identity() const {
  Elem e;
  switch (kind_) {
    case Kind::integers:
      e = {0};
      break;
    case Kind::lattice:
    case Kind::finite_abelian:
      for (int i = 0; i < coords(); ++i) e.push(0);
      break;
    case Kind::lamplighter:
    case Kind::lamplighter_periodic:
      e = {0, 0};
      break;
    case Kind::ut3:
      e = {1, 1, 1, 0, 0, 0};
      break;
    case Kind::heisenberg:
      e = {0, 0, 0};
      break;
  }
  return e;
}

Elem Group::canonicalize(Elem a) const {
  if (kind_ == Kind::finite_abelian) {
    for (int i = 0; i < a.size(); ++i) {
      std::int64_t n = params_[static_cast<std::size_t>(i)];
      if (n > 0) a[i] = floor_mod(a[i], n);
    }
  } else if (kind_ == Kind::ut3) {
    std::int64_t p = params_[0];
    for (int i = 0; i < 6; ++i) a[i] = floor_mod(a[i], p);
  }
  return a;
}

void Group::validate(const Elem& a) const {
  auto fail = [&] { throw error("malformed element for " + spec_string()); };
  switch (kind_) {
    case Kind::integers:
      if (a.size() != 1) fail();
      break;
    case Kind::lattice:
    case Kind::finite_abelian:
      if (a.size() != coords()) fail();
      if (kind_ == Kind::finite_abelian) {
        for (int i = 0; i < a.size(); ++i) {
          std::int64_t n = params_[static_cast<std::size_t>(i)];
          if (n > 0 && (a[i] < 0 || a[i] >= n)) fail();
        }
      }
      break;
    case Kind::lamplighter: {
      if (a.size() != 2) fail();
      int w = window();
      std::uint64_t mask = static_cast<std::uint64_t>(a[1]);
      if ((mask >> (2 * w + 1)) != 0) fail();
      break;
    }
    case Kind::lamplighter_periodic: {
      if (a.size() != 2) fail();
      int w = window();
      std::uint64_t bits = static_cast<std::uint64_t>(a[1]);
      if (w < 64 && (bits >> w) != 0) fail();
      break;
    }
    case Kind::ut3: {
      if (a.size() != 6) fail();
      std::int64_t p = params_[0];
      for (int i = 0; i < 6; ++i)
        if (a[i] < 0 || a[i] >= p) fail();
      if (a[0] == 0 || a[1] == 0 || a[2] == 0) fail();
      if ((__int128)a[0] * a[1] % p * a[2] % p != 1) fail();
      break;
    }
    case Kind::heisenberg:
      if (a.size() != 3) fail();
      break;
  }
}

Elem Group::mul(const Elem& a, const Elem& b) const {
  switch (kind_) {
    case Kind::integers:
      return Elem{a[0] + b[0]};
    case Kind::lattice:
    case Kind::finite_abelian: {
      Elem r;
      for (int i = 0; i < a.size(); ++i) r.push(a[i] + b[i]);
      return canonicalize(r);
    }
    case Kind::lamplighter: {
      // (n, x) * (n', x') = (n + n', T^{n'} x + x'); T moves lamp p to p + 1.
      int w = window();
      std::int64_t shift = b[0];
      std::uint64_t x = static_cast<std::uint64_t>(a[1]);
      std::uint64_t shifted;
      if (x == 0) {
        shifted = 0;
      } else if (shift >= 0) {
        if (shift > 2 * w || (shift > 0 && (x >> (2 * w + 1 - shift)) != 0))
          throw window_error("lamplighter support leaves [-W, W] on the right");
        shifted = x << shift;
      } else {
        std::int64_t s = -shift;
        if (s > 2 * w || (x & ((s >= 64) ? ~0ULL : ((1ULL << s) - 1))) != 0)
          throw window_error("lamplighter support leaves [-W, W] on the left");
        shifted = x >> s;
      }
      return Elem{a[0] + b[0], static_cast<std::int64_t>(shifted ^ static_cast<std::uint64_t>(b[1]))};
    }
    case Kind::lamplighter_periodic: {
      int w = window();
      std::int64_t rot = floor_mod(b[0], w);
      std::uint64_t x = static_cast<std::uint64_t>(a[1]);
      std::uint64_t full = (w == 63) ? ((1ULL << 63) - 1) : ((1ULL << w) - 1);
      std::uint64_t rotated = rot == 0 ? x : (((x << rot) | (x >> (w - rot))) & full);
      return Elem{a[0] + b[0], static_cast<std::int64_t>(rotated ^ static_cast<std::uint64_t>(b[1]))};
    }
    case Kind::ut3: {
      std::int64_t p = params_[0];
      auto mm = [&](std::int64_t x, std::int64_t y) { return (__int128)x * y % p; };
      Elem r;
      r.push(mm(a[0], b[0]));
      r.push(mm(a[1], b[1]));
      r.push(mm(a[2], b[2]));
      r.push((mm(a[0], b[3]) + mm(a[3], b[1])) % p);
      r.push((mm(a[0], b[4]) + mm(a[3], b[5]) + mm(a[4], b[2])) % p);
      r.push((mm(a[1], b[5]) + mm(a[5], b[2])) % p);
      return r;
    }
    case Kind::heisenberg:
      return Elem{a[0] + b[0], a[1] + b[1], a[2] + b[2] + a[0] * b[1]};
  }
  throw error("unreachable");
}

Elem Group::inverse(const Elem& a) const {
  switch (kind_) {
    case Kind::integers:
      return Elem{-a[0]};
    case Kind::lattice:
    case Kind::finite_abelian: {
      Elem r;
      for (int i = 0; i < a.size(); ++i) r.push(-a[i]);
      return canonicalize(r);
    }
    case Kind::lamplighter: {
      // (n, x)^{-1} = (-n, T^{-n} x)
      Elem t{-a[0], 0};
      Elem payload{0, a[1]};
      Elem moved = mul(payload, t);  // (0, x) * (-n, 0) = (-n, T^{-n} x)
      return moved;
    }
    case Kind::lamplighter_periodic: {
      Elem t{-a[0], 0};
      Elem payload{0, a[1]};
      return mul(payload, t);
    }
    case Kind::ut3: {
      std::int64_t p = params_[0];
      std::int64_t i1 = mod_inv(a[0], p), i2 = mod_inv(a[1], p), i3 = mod_inv(a[2], p);
      auto mm = [&](std::int64_t x, std::int64_t y) { return (std::int64_t)((__int128)x * y % p); };
      Elem r;
      r.push(i1);
      r.push(i2);
      r.push(i3);
      r.push(floor_mod(-mm(mm(a[3], i1), i2), p));
      r.push(floor_mod(mm(mm(mm(a[3], a[5]) - mm(a[4], a[1]) % p + p * p, i1), mm(i2, i3)), p));
      r.push(floor_mod(-mm(mm(a[5], i2), i3), p));
      return r;
    }
    case Kind::heisenberg:
      return Elem{-a[0], -a[1], a[0] * a[1] - a[2]};
  }
  throw error("unreachable");
}

Elem Group::commutator(const Elem& a, const Elem& b) const {
  return mul(mul(a, b), mul(inverse(a), inverse(b)));
}

Elem Group::pow(const Elem& a, std::int64_t n) const {
  if (n < 0) return pow(inverse(a), -n);
  Elem r = identity();
  Elem base = a;
  while (n > 0) {
    if (n & 1) r = mul(r, base);
    if (n >>= 1) base = mul(base, base);
  }
  return r;
}

bool Group::is_abelian() const {
  switch (kind_) {
    case Kind::integers:
    case Kind::lattice:
    case Kind::finite_abelian:
      return true;
    default:
      return false;
  }
}

bool Group::is_finite() const {
  if (kind_ == Kind::ut3) return true;
  if (kind_ == Kind::finite_abelian) {
    for (std::int64_t n : params_)
      if (n == 0) return false;
    return true;
  }
  return false;
}

std::int64_t Group::order() const {
  if (!is_finite()) throw error("order() of an infinite group");
  if (kind_ == Kind::ut3) {
    std::int64_t p = params_[0];
    return (p - 1) * (p - 1) * p * p * p;
  }
  std::int64_t n = 1;
  for (std::int64_t d : params_) n *= d;
  return n;
}

std::string Group::canonical(const Elem& a) const {
  std::vector<std::int64_t> vals;
  if (kind_ == Kind::lamplighter || kind_ == Kind::lamplighter_periodic) {
    vals.push_back(a[0]);
    for (std::int64_t p : lamp_support(a)) vals.push_back(p);
  } else {
    for (int i = 0; i < a.size(); ++i) vals.push_back(a[i]);
  }
  std::string out = std::to_string(vals.size()) + ":";
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(vals[i]);
  }
  return out;
}

Elem Group::parse_elem(const std::string& text) const {
  std::size_t colon = text.find(':');
  if (colon == std::string::npos) throw parse_error("missing length prefix", 0);
  std::size_t count = std::stoull(text.substr(0, colon));
  std::vector<std::int64_t> vals;
  std::size_t pos = colon + 1;
  while (pos < text.size()) {
    std::size_t next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    vals.push_back(std::stoll(text.substr(pos, next - pos)));
    pos = next + 1;
  }
  if (vals.size() != count) throw parse_error("length prefix mismatch", colon);
  if (kind_ == Kind::lamplighter || kind_ == Kind::lamplighter_periodic) {
    if (vals.empty()) throw parse_error("lamplighter element needs a shift", colon);
    return make_lamp(vals[0], std::vector<std::int64_t>(vals.begin() + 1, vals.end()));
  }
  Elem e;
  for (std::int64_t v : vals) e.push(v);
  e = canonicalize(e);
  validate(e);
  return e;
}

std::string Group::spec_string() const {
  switch (kind_) {
    case Kind::integers:
      return "z()";
    case Kind::lattice:
      return "z(r=" + std::to_string(params_[0]) + ")";
    case Kind::finite_abelian: {
      std::string s = "finab(";
      for (std::size_t i = 0; i < params_.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(params_[i]);
      }
      return s + ")";
    }
    case Kind::lamplighter:
      return "lamplighter(window=" + std::to_string(params_[0]) + ")";
    case Kind::lamplighter_periodic:
      return "lampper(period=" + std::to_string(params_[0]) + ")";
    case Kind::ut3:
      return "ut3(p=" + std::to_string(params_[0]) + ")";
    case Kind::heisenberg:
      return "heis()";
  }
  throw error("unreachable");
}

bool Group::has_projection() const {
  return kind_ == Kind::lamplighter || kind_ == Kind::lamplighter_periodic ||
         kind_ == Kind::ut3 || kind_ == Kind::heisenberg;
}

Group Group::projection_group() const {
  switch (kind_) {
    case Kind::lamplighter:
    case Kind::lamplighter_periodic:
      return Group::integers();
    case Kind::ut3:
      return *this;
    case Kind::heisenberg:
      return Group::lattice(2);
    default:
      throw error("no canonical projection for " + spec_string());
  }
}

Elem Group::project(const Elem& a) const {
  switch (kind_) {
    case Kind::lamplighter:
    case Kind::lamplighter_periodic:
      return Elem{a[0]};
    case Kind::ut3:
      return Elem{a[0], a[1], a[2], 0, 0, 0};
    case Kind::heisenberg:
      return Elem{a[0], a[1]};
    default:
      throw error("no canonical projection for " + spec_string());
  }
}

Elem Group::sample(Rng& rng, int scale) const {
  switch (kind_) {
    case Kind::integers:
      return Elem{rng.range(-scale, scale)};
    case Kind::lattice: {
      Elem e;
      for (int i = 0; i < coords(); ++i) e.push(rng.range(-scale, scale));
      return e;
    }
    case Kind::finite_abelian: {
      Elem e;
      for (std::int64_t n : params_)
        e.push(n > 0 ? static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n)))
                     : rng.range(-scale, scale));
      return e;
    }
    case Kind::lamplighter: {
      int w = window();
      int reach = std::min(scale, w / 3);
      std::vector<std::int64_t> support;
      int lamps = static_cast<int>(rng.below(4));
      for (int i = 0; i < lamps; ++i) support.push_back(rng.range(-w / 3, w / 3));
      return make_lamp(rng.range(-reach, reach), support);
    }
    case Kind::lamplighter_periodic: {
      int w = window();
      std::uint64_t full = (w == 63) ? ((1ULL << 63) - 1) : ((1ULL << w) - 1);
      return Elem{rng.range(-2 * w, 2 * w), static_cast<std::int64_t>(rng.next() & full)};
    }
    case Kind::ut3: {
      std::int64_t p = params_[0];
      std::int64_t d1 = 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(p - 1)));
      std::int64_t d2 = 1 + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(p - 1)));
      std::int64_t d3 = mod_inv((__int128)d1 * d2 % p, p);
      Elem e{d1, d2, d3};
      for (int i = 0; i < 3; ++i)
        e.push(static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(p))));
      return e;
    }
    case Kind::heisenberg:
      return Elem{rng.range(-scale, scale), rng.range(-scale, scale),
                  rng.range(-scale * scale, scale * scale)};
  }
  throw error("unreachable");
}

Elem Group::from_coords(const std::vector<std::int64_t>& xs) const {
  if (static_cast<int>(xs.size()) != coords()) throw error("coordinate count mismatch");
  Elem e;
  for (std::int64_t x : xs) e.push(x);
  return canonicalize(e);
}

Elem Group::make_lamp(std::int64_t shift, const std::vector<std::int64_t>& support) const {
  if (kind_ == Kind::lamplighter) {
    int w = window();
    std::uint64_t mask = 0;
    for (std::int64_t p : support) {
      if (p < -w || p > w) throw window_error("lamp position outside [-W, W]");
      mask ^= 1ULL << (p + w);
    }
    return Elem{shift, static_cast<std::int64_t>(mask)};
  }
  if (kind_ == Kind::lamplighter_periodic) {
    int w = window();
    std::uint64_t bits = 0;
    for (std::int64_t p : support) bits ^= 1ULL << floor_mod(p, w);
    return Elem{shift, static_cast<std::int64_t>(bits)};
  }
  throw error("make_lamp on non-lamplighter group");
}

std::vector<std::int64_t> Group::lamp_support(const Elem& a) const {
  std::vector<std::int64_t> out;
  if (kind_ == Kind::lamplighter) {
    int w = window();
    std::uint64_t mask = static_cast<std::uint64_t>(a[1]);
    for (int bit = 0; bit <= 2 * w; ++bit)
      if (mask & (1ULL << bit)) out.push_back(bit - w);
    return out;
  }
  if (kind_ == Kind::lamplighter_periodic) {
    int w = window();
    std::uint64_t bits = static_cast<std::uint64_t>(a[1]);
    for (int bit = 0; bit < w; ++bit)
      if (bits & (1ULL << bit)) out.push_back(bit);
    return out;
  }
  throw error("lamp_support on non-lamplighter group");
}

}  // namespace solv
