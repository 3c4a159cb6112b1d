#pragma once

#include "nlchns/field.hpp"

namespace nlchns::serial {

// Plain single-threaded reference versions of the parallel kernels.
// Kept for testing (the OpenMP paths must reproduce them) and for the
// serial-vs-parallel benchmark. Reductions use the same row-partial
// order as the parallel code, so agreement is bit-exact.

MacField gradient(const ScalarField& f);
ScalarField divergence(const MacField& u);
ScalarField laplacian_neumann(const ScalarField& f);
double field_sum(const ScalarField& f);
double inner(const ScalarField& f, const ScalarField& g);
ScalarField convect_centered(const MacField& u, const ScalarField& phi);

}  // namespace nlchns::serial
