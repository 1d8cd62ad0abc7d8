#pragma once

#include <vector>

#include "solv/groupset.hpp"

namespace solv {

enum class SeriesKind { derived, lower_central };

// Closure of the generated subgroup, throwing budget_error when it will not
// close within the element budget.
GroupSet subgroup_closure(const GroupSet& generators, const Budget& budget = {});

// Derived or lower central series of <generators> as explicit element sets.
// Each term is verified normal in its predecessor; the chain stops at the
// trivial group or max_depth.
std::vector<GroupSet> finite_series(const GroupSet& generators, SeriesKind kind, int max_depth,
                                    const Budget& budget = {});

// True when every conjugate g n g^-1 (g in ambient, n in sub) stays in sub.
bool is_normal_in(const GroupSet& sub, const GroupSet& ambient);

}  // namespace solv
