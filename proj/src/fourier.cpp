#include "solv/fourier.hpp"

#include <cmath>
#include <numbers>
#include <unordered_map>

namespace solv {

namespace {

std::size_t finite_order_check(const Group& g) {
  if (!g.is_finite() || g.kind() != Kind::finite_abelian)
    throw error("fourier transform needs a finite abelian ambient");
  return static_cast<std::size_t>(g.order());
}

}  // namespace

std::size_t group_index(const Group& g, const Elem& e) {
  std::size_t idx = 0;
  for (int i = 0; i < g.coords(); ++i) {
    std::int64_t n = g.coord_order(i);
    idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(e[i]);
  }
  return idx;
}

Elem group_unindex(const Group& g, std::size_t idx) {
  int k = g.coords();
  std::vector<std::int64_t> xs(static_cast<std::size_t>(k));
  for (int i = k - 1; i >= 0; --i) {
    std::size_t n = static_cast<std::size_t>(g.coord_order(i));
    xs[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(idx % n);
    idx /= n;
  }
  return g.from_coords(xs);
}

std::vector<std::complex<double>> fourier_forward(const Group& g,
                                                  const std::vector<std::complex<double>>& f) {
  std::size_t n = finite_order_check(g);
  if (f.size() != n) throw error("value table size mismatch");
  int k = g.coords();
  std::vector<std::complex<double>> out(n);
  const double tau = 2.0 * std::numbers::pi;
  for (std::size_t xi = 0; xi < n; ++xi) {
    Elem cx = group_unindex(g, xi);
    std::complex<double> acc = 0.0;
    for (std::size_t x = 0; x < n; ++x) {
      Elem ex = group_unindex(g, x);
      double phase = 0.0;
      for (int i = 0; i < k; ++i)
        phase += static_cast<double>(cx[i]) * static_cast<double>(ex[i]) /
                 static_cast<double>(g.coord_order(i));
      acc += f[x] * std::polar(1.0, -tau * phase);
    }
    out[xi] = acc / static_cast<double>(n);
  }
  return out;
}

std::vector<std::complex<double>> fourier_inverse(const Group& g,
                                                  const std::vector<std::complex<double>>& fhat) {
  std::size_t n = finite_order_check(g);
  if (fhat.size() != n) throw error("value table size mismatch");
  int k = g.coords();
  std::vector<std::complex<double>> out(n);
  const double tau = 2.0 * std::numbers::pi;
  for (std::size_t x = 0; x < n; ++x) {
    Elem ex = group_unindex(g, x);
    std::complex<double> acc = 0.0;
    for (std::size_t xi = 0; xi < n; ++xi) {
      Elem cx = group_unindex(g, xi);
      double phase = 0.0;
      for (int i = 0; i < k; ++i)
        phase += static_cast<double>(cx[i]) * static_cast<double>(ex[i]) /
                 static_cast<double>(g.coord_order(i));
      acc += fhat[xi] * std::polar(1.0, tau * phase);
    }
    out[x] = acc;
  }
  return out;
}

namespace {

// Dense integer table over a box: finite coordinates wrap, free coordinates
// get the exact reachable range [m*min, m*max].
struct BoxTable {
  Group g;
  int k = 0;
  std::vector<std::int64_t> lo, hi;  // per-coordinate inclusive range
  std::vector<std::size_t> stride;
  std::vector<unsigned __int128> cells;

  BoxTable(const Group& group, const std::vector<std::int64_t>& low,
           const std::vector<std::int64_t>& high, const Budget& budget)
      : g(group), k(group.coords()), lo(low), hi(high) {
    std::size_t total = 1;
    stride.assign(static_cast<std::size_t>(k), 0);
    for (int i = k - 1; i >= 0; --i) {
      stride[static_cast<std::size_t>(i)] = total;
      std::size_t w = static_cast<std::size_t>(hi[static_cast<std::size_t>(i)] -
                                               lo[static_cast<std::size_t>(i)] + 1);
      total *= w;
      budget.charge(total, "representation table");
    }
    cells.assign(total, 0);
  }

  std::size_t width(int i) const {
    std::size_t si = static_cast<std::size_t>(i);
    return static_cast<std::size_t>(hi[si] - lo[si] + 1);
  }

  bool index_of(const Elem& e, std::size_t& out) const {
    std::size_t idx = 0;
    for (int i = 0; i < k; ++i) {
      std::size_t si = static_cast<std::size_t>(i);
      std::int64_t x = e[i];
      if (x < lo[si] || x > hi[si]) return false;
      idx += static_cast<std::size_t>(x - lo[si]) * stride[si];
    }
    out = idx;
    return true;
  }

  Elem elem_at(std::size_t idx) const {
    std::vector<std::int64_t> xs(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      std::size_t si = static_cast<std::size_t>(i);
      xs[si] = lo[si] + static_cast<std::int64_t>(idx / stride[si] % width(i));
    }
    return g.from_coords(xs);
  }
};

// m-fold sumset count table: R[x] = #{(a_1..a_m) : sum a_i = x}.
BoxTable iterated_sum_table(const GroupSet& a, int m, const Budget& budget) {
  const Group& g = a.group();
  int k = g.coords();
  std::vector<std::int64_t> amin(static_cast<std::size_t>(k)), amax(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    std::size_t si = static_cast<std::size_t>(i);
    if (g.coord_order(i) > 0) {
      amin[si] = 0;
      amax[si] = g.coord_order(i) - 1;
    } else {
      amin[si] = amax[si] = a.elems().front()[i];
      for (const Elem& e : a.elems()) {
        amin[si] = std::min(amin[si], e[i]);
        amax[si] = std::max(amax[si], e[i]);
      }
    }
  }
  std::vector<std::int64_t> lo(static_cast<std::size_t>(k)), hi(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    std::size_t si = static_cast<std::size_t>(i);
    if (g.coord_order(i) > 0) {
      lo[si] = 0;
      hi[si] = g.coord_order(i) - 1;
    } else {
      lo[si] = m * amin[si];
      hi[si] = m * amax[si];
    }
  }
  BoxTable table(a.group(), lo, hi, budget);
  // Seed with the identity, convolve with 1_A m times.
  {
    std::size_t idx;
    if (!table.index_of(g.zero(), idx)) throw error("zero outside representation box");
    table.cells[idx] = 1;
  }
  for (int step = 0; step < m; ++step) {
    std::vector<unsigned __int128> next(table.cells.size(), 0);
    for (std::size_t idx = 0; idx < table.cells.size(); ++idx) {
      unsigned __int128 c = table.cells[idx];
      if (c == 0) continue;
      Elem x = table.elem_at(idx);
      for (const Elem& e : a.elems()) {
        std::size_t j;
        if (table.index_of(g.add(x, e), j))
          next[j] += c;
        else
          throw error("representation box overflow");
      }
    }
    table.cells.swap(next);
  }
  return table;
}

std::uint64_t narrow(unsigned __int128 v) {
  if (v > static_cast<unsigned __int128>(~std::uint64_t{0}))
    throw budget_error("representation count exceeds 64 bits");
  return static_cast<std::uint64_t>(v);
}

}  // namespace

std::uint64_t representation_count(const GroupSet& a, int m, const Elem& target,
                                   const Budget& budget) {
  if (!a.group().is_abelian()) throw error("representation_count needs an abelian ambient");
  if (a.empty() || m < 1) throw error("representation_count needs non-empty A and m >= 1");
  BoxTable r = iterated_sum_table(a, m, budget);
  const Group& g = a.group();
  unsigned __int128 total = 0;
  // target = P - Q: sum over Q of R[target + Q] * R[Q].
  for (std::size_t qi = 0; qi < r.cells.size(); ++qi) {
    if (r.cells[qi] == 0) continue;
    Elem q = r.elem_at(qi);
    std::size_t pi;
    if (r.index_of(g.add(target, q), pi)) total += r.cells[qi] * r.cells[pi];
  }
  return narrow(total);
}

std::vector<std::pair<Elem, std::uint64_t>> representation_table(const GroupSet& a, int m,
                                                                 const Budget& budget) {
  BoxTable r = iterated_sum_table(a, m, budget);
  const Group& g = a.group();
  std::unordered_map<Elem, unsigned __int128, ElemHash> acc;
  for (std::size_t pi = 0; pi < r.cells.size(); ++pi) {
    if (r.cells[pi] == 0) continue;
    Elem p = r.elem_at(pi);
    for (std::size_t qi = 0; qi < r.cells.size(); ++qi) {
      if (r.cells[qi] == 0) continue;
      acc[g.add(p, g.neg(r.elem_at(qi)))] += r.cells[pi] * r.cells[qi];
    }
  }
  std::vector<std::pair<Elem, std::uint64_t>> out;
  out.reserve(acc.size());
  for (auto& [e, c] : acc) out.emplace_back(e, narrow(c));
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  return out;
}

}  // namespace solv
