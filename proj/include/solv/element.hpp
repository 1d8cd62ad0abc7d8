#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "solv/error.hpp"
#include "solv/rng.hpp"

namespace solv {

enum class Kind : std::uint8_t {
  integers,              // Z
  lattice,               // Z^r
  finite_abelian,        // prod Z_{n_i}; order 0 marks a free Z factor
  lamplighter,           // Z x| (F_2^Z)_0, support confined to the window [-W, W]
  lamplighter_periodic,  // Z x| (W-periodic F_2 sequences)
  ut3,                   // upper-triangular 3x3 over F_p with determinant 1
  heisenberg,            // integer Heisenberg group in Mal'cev coordinates
};

// One group element, stored canonically. Payload layout per kind:
//   integers:             [n]
//   lattice:              [x_1..x_r]
//   finite_abelian:       [x_1..x_k], x_i in [0, n_i) when n_i > 0, free when n_i = 0
//   lamplighter:          [shift, mask]; bit (p + W) of mask = lamp at position p
//   lamplighter_periodic: [shift, bits]; bit i = lamp at residue i mod W
//   ut3:                  [d1, d2, d3, x, y, z] with x = (0,1), y = (0,2), z = (1,2)
//   heisenberg:           [a, b, c] for the matrix [[1,a,c],[0,1,b],[0,0,1]]
class Elem {
 public:
  static constexpr int kMaxLen = 8;

  Elem() = default;
  Elem(std::initializer_list<std::int64_t> xs) {
    for (std::int64_t x : xs) push(x);
  }

  int size() const { return len_; }
  std::int64_t operator[](int i) const { return v_[static_cast<std::size_t>(i)]; }
  std::int64_t& operator[](int i) { return v_[static_cast<std::size_t>(i)]; }
  void push(std::int64_t x) {
    if (len_ >= kMaxLen) throw error("element payload overflow");
    v_[static_cast<std::size_t>(len_++)] = x;
  }

  friend bool operator==(const Elem& a, const Elem& b) {
    if (a.len_ != b.len_) return false;
    for (int i = 0; i < a.len_; ++i)
      if (a.v_[static_cast<std::size_t>(i)] != b.v_[static_cast<std::size_t>(i)]) return false;
    return true;
  }
  friend bool operator!=(const Elem& a, const Elem& b) { return !(a == b); }
  friend bool operator<(const Elem& a, const Elem& b) {
    if (a.len_ != b.len_) return a.len_ < b.len_;
    for (int i = 0; i < a.len_; ++i) {
      std::size_t j = static_cast<std::size_t>(i);
      if (a.v_[j] != b.v_[j]) return a.v_[j] < b.v_[j];
    }
    return false;
  }

  std::uint64_t hash() const {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(len_);
    for (int i = 0; i < len_; ++i) {
      h ^= static_cast<std::uint64_t>(v_[static_cast<std::size_t>(i)]) + 0x9e3779b97f4a7c15ULL +
           (h << 6) + (h >> 2);
    }
    return h;
  }

 private:
  std::array<std::int64_t, kMaxLen> v_{};
  int len_ = 0;
};

struct ElemHash {
  std::size_t operator()(const Elem& e) const { return static_cast<std::size_t>(e.hash()); }
};

// A concrete group: exact law, inverse, identity, canonical serialization.
// Cheap value type; equality means same kind and parameters.
class Group {
 public:
  Group() : kind_(Kind::integers) {}
  static Group integers() { return Group(Kind::integers, {}); }
  static Group lattice(int rank);
  static Group finite_abelian(std::vector<std::int64_t> orders);
  static Group lamplighter(int window);
  static Group lamplighter_periodic(int period);
  static Group ut3(std::int64_t p);
  static Group heisenberg() { return Group(Kind::heisenberg, {}); }

  Kind kind() const { return kind_; }
  const std::vector<std::int64_t>& params() const { return params_; }

  friend bool operator==(const Group& a, const Group& b) {
    return a.kind_ == b.kind_ && a.params_ == b.params_;
  }
  friend bool operator!=(const Group& a, const Group& b) { return !(a == b); }

  Elem identity() const;
  Elem mul(const Elem& a, const Elem& b) const;
  Elem inverse(const Elem& a) const;
  Elem commutator(const Elem& a, const Elem& b) const;
  Elem pow(const Elem& a, std::int64_t n) const;

  bool is_abelian() const;
  bool is_finite() const;
  std::int64_t order() const;  // only when finite

  // Canonical length-prefixed decimal text form, e.g. "3:1,0,-2".
  std::string canonical(const Elem& a) const;
  Elem parse_elem(const std::string& text) const;

  // One-line grammar form, e.g. "lamplighter(window=16)".
  std::string spec_string() const;

  // Canonical projection: lamplighter kinds -> shift in Z, ut3 -> diagonal part
  // (inside ut3), heisenberg -> abelianization in Z^2.
  bool has_projection() const;
  Group projection_group() const;
  Elem project(const Elem& a) const;

  // Bounded random element for property tests; range scales stay well inside
  // windows so products of a few samples do not overflow.
  Elem sample(Rng& rng, int scale = 4) const;

  void validate(const Elem& a) const;  // throws on malformed payload

  // Abelian-kind helpers (integers / lattice / finite_abelian only).
  int coords() const;
  std::int64_t coord_order(int i) const;  // 0 for a free factor
  Elem zero() const { return identity(); }
  Elem add(const Elem& a, const Elem& b) const { return mul(a, b); }
  Elem neg(const Elem& a) const { return inverse(a); }
  Elem scale(const Elem& a, std::int64_t n) const { return pow(a, n); }
  Elem from_coords(const std::vector<std::int64_t>& xs) const;

  // Lamplighter helpers.
  int window() const;
  Elem make_lamp(std::int64_t shift, const std::vector<std::int64_t>& support) const;
  std::vector<std::int64_t> lamp_support(const Elem& a) const;

 private:
  Group(Kind k, std::vector<std::int64_t> params) : kind_(k), params_(std::move(params)) {}
  Elem canonicalize(Elem a) const;

  Kind kind_;
  std::vector<std::int64_t> params_;
};

}  // namespace solv
