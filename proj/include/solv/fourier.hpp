#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "solv/groupset.hpp"

namespace solv {

// Mixed-radix indexing of a finite abelian group's elements (row-major over
// the cyclic coordinates).
std::size_t group_index(const Group& g, const Elem& e);
Elem group_unindex(const Group& g, std::size_t idx);

// Fourier transform on a finite abelian group G = prod Z_{n_i} with
// f^(xi) = (1/|G|) sum_x f(x) e(-xi.x), xi.x = sum xi_i x_i / n_i mod 1.
// Direct summation; exact enough for the 1e-9 Plancherel/inversion contract.
std::vector<std::complex<double>> fourier_forward(const Group& g,
                                                  const std::vector<std::complex<double>>& f);
std::vector<std::complex<double>> fourier_inverse(const Group& g,
                                                  const std::vector<std::complex<double>>& fhat);

// Exact number of representations target = a_1+..+a_m - b_1-..-b_m over A.
// Works over finite abelian groups and Z-embedded ambients (free coordinates
// get a bounding box); exact integer convolution throughout.
std::uint64_t representation_count(const GroupSet& a, int m, const Elem& target,
                                   const Budget& budget = {});

// The full correlation table: for every element reachable as a difference of
// two m-fold sums, its representation count. Returned as pairs.
std::vector<std::pair<Elem, std::uint64_t>> representation_table(const GroupSet& a, int m,
                                                                 const Budget& budget = {});

}  // namespace solv
