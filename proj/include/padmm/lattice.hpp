#pragma once

#include <vector>

#include "padmm/padic.hpp"

namespace padmm {

using IntVec = std::vector<Int>;
using IntMat = std::vector<IntVec>;  // list of rows

/// Basis of {x in Z^ncols : A x = 0}.
IntMat integer_kernel(const IntMat& A, std::size_t ncols);

/// Row Hermite normal form of the lattice spanned by `rows` (zero rows
/// dropped): echelon, positive pivots, entries above pivots reduced.
IntMat hermite_basis(IntMat rows);

/// Whether v lies in the lattice with Hermite basis `H`.
bool in_lattice(const IntMat& H, IntVec v);

/// LLL-reduced basis (delta = 3/4) of linearly independent rows.
IntMat lll_reduce(IntMat basis);

Int dot(const IntVec& a, const IntVec& b);

}  // namespace padmm
