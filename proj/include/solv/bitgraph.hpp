#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "solv/rational.hpp"
#include "solv/rng.hpp"

namespace solv {

using VertexSet = std::vector<std::uint32_t>;  // sorted vertex indices

// Dense bipartite graph as a packed bit matrix, rows = left vertices.
class BipartiteGraph {
 public:
  BipartiteGraph() = default;
  BipartiteGraph(std::size_t nv, std::size_t nw);

  std::size_t nv() const { return nv_; }
  std::size_t nw() const { return nw_; }
  bool edge(std::size_t v, std::size_t w) const {
    return bits_[v * words_ + w / 64] >> (w % 64) & 1;
  }
  void set_edge(std::size_t v, std::size_t w, bool on);
  std::size_t edge_count() const;
  std::size_t count_in(const VertexSet& vs, const VertexSet& ws) const;
  Rational density() const;

 private:
  std::size_t nv_ = 0, nw_ = 0, words_ = 0;
  std::vector<std::uint64_t> bits_;
};

// | e(V', W') - delta |V'||W'| | / (|V||W|), exact.
Rational regularity_defect(const BipartiteGraph& g, const VertexSet& vs, const VertexSet& ws);

enum class RegularityStatus {
  certified_regular,    // exhaustive scan, no violating pair exists
  witnessed_irregular,  // a concrete violating pair is attached
  no_violation_found,   // local search exhausted its budget: uncertified positive
};

struct RegularityVerdict {
  RegularityStatus status = RegularityStatus::no_violation_found;
  VertexSet worst_v, worst_w;
  Rational worst_defect{0, 1};
};

// Exhaustive mode scans every subset of the smaller side (<= 18 vertices) and
// picks the optimal other side analytically, so it is exact. Local search
// does seeded randomized-restart alternating maximization.
RegularityVerdict regularity_estimate(const BipartiteGraph& g, const Rational& eps, bool exhaustive,
                                      std::uint64_t seed = 1, int restarts = 12);

// A k-partite edge system: classes 0..k-1 and bipartite graphs on some pairs.
struct KPartiteSystem {
  std::vector<std::size_t> class_sizes;
  std::map<std::pair<int, int>, BipartiteGraph> edges;  // key (i, j), i < j
};

struct BlockPairVerdict {
  int ci = 0, cj = 0;
  std::size_t bi = 0, bj = 0;
  RegularityStatus status = RegularityStatus::no_violation_found;
  Rational density{0, 1};
};

struct RegularityPartition {
  std::vector<std::vector<VertexSet>> blocks;  // per class
  std::vector<BlockPairVerdict> pair_verdicts;
  double irregular_fraction = 0.0;
  std::vector<double> energy_history;
  bool target_met = false;
  int rounds = 0;
};

// Energy-increment refinement: split blocks along irregularity witnesses
// until at most an eps fraction of block pairs is witnessed irregular, or
// max_blocks per class is hit (reported, not thrown).
RegularityPartition regularity_partition(const KPartiteSystem& sys, const Rational& eps,
                                         std::size_t max_blocks, std::uint64_t seed,
                                         const std::size_t exhaustive_limit = 18);

}  // namespace solv
