#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "nlchns/field.hpp"

namespace nlchns {

enum class KernelFamily { gaussian, mollifier };

struct KernelPlans;  // cached padded-FFT plans, shared and immutable

/// Interaction kernel J with even symmetry, hard truncation at |x| = radius,
/// its padded-lattice samples and FFT, and the induced coefficient field
/// a(x) = integral of J(x-y) over the domain (midpoint lattice sum).
///
/// gaussian:  J(x) = amplitude * exp(-|x|^2 / (2 eps^2)) / (2 pi eps^2),
///            so amplitude is the total mass of the untruncated kernel;
///            requires radius >= 3 eps (tail jump <= A exp(-R^2/2eps^2)).
/// mollifier: J(x) = amplitude * exp(-eps^2 / (eps^2 - |x|^2)) for |x| < eps,
///            compact support; requires radius == eps.
struct KernelSpec {
    KernelFamily family = KernelFamily::gaussian;
    double amplitude = 1.0;
    double epsilon = 0.1;
    double radius = 0.3;
    Grid grid;
    int pnx = 0, pny = 0;           // zero-padding size (2nx x 2ny)
    std::vector<double> samples;    // padded J samples, wrapped offsets
    std::vector<std::complex<double>> kernel_hat;
    ScalarField a;
    std::shared_ptr<const KernelPlans> plans;
};

/// Pointwise kernel evaluation with the truncation rule. Shared by the
/// sample table and the direct-sum oracles.
double kernel_value(const KernelSpec& k, double dx, double dy);

/// Samples J on the padded lattice, validates (H1)-style structure
/// (even symmetry, a >= 0) and precomputes the convolution FFT cache.
/// a is computed by convolving the constant-1 field (single code path).
KernelSpec build_kernel(KernelFamily family, double amplitude, double epsilon, double radius,
                        const Grid& grid);

/// Linear (non-circular) convolution J*f restricted to the domain, by
/// zero-padded FFT. Pure; safe to call concurrently on one KernelSpec.
ScalarField convolve(const KernelSpec& k, const ScalarField& f);

/// Direct O(N^2) midpoint-quadrature double sum. Verification oracle;
/// refuses grids larger than 64x64.
ScalarField convolve_oracle(const KernelSpec& k, const ScalarField& f);

}  // namespace nlchns
