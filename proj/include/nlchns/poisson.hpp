#pragma once

#include <vector>

#include "nlchns/field.hpp"

struct fftw_plan_s;

namespace nlchns {

/// Direct solver for the cell-centered Neumann problems
///   -lap(g) = f           (zero-mean gauge, compatible f)
///   (sigma - lap)(g) = f  (sigma > 0)
/// via 2D cosine transforms; the cosine basis diagonalizes the 5-point
/// mirror-closure Laplacian exactly. One instance per grid; instances are
/// not safe for concurrent use (internal transform buffer).
class NeumannPoisson {
  public:
    explicit NeumannPoisson(const Grid& g);
    ~NeumannPoisson();
    NeumannPoisson(const NeumannPoisson&) = delete;
    NeumannPoisson& operator=(const NeumannPoisson&) = delete;

    /// Inverse Neumann Laplacian: unique zero-mean g with -lap(g) = rhs.
    /// Throws IncompatibleRhs when |mean(rhs)| > tol * (1 + max|rhs|).
    ScalarField solve_poisson(const ScalarField& rhs);

    /// Positive-shift Helmholtz solve, sigma > 0 (no compatibility needed).
    ScalarField solve_helmholtz(double sigma, const ScalarField& rhs);

    const Grid& grid() const { return grid_; }

    double compatibility_tol = 1e-12;

  private:
    ScalarField solve_impl(double sigma, const ScalarField& rhs, bool gauge);

    Grid grid_;
    double* buf_ = nullptr;
    fftw_plan_s* fwd_ = nullptr;
    fftw_plan_s* bwd_ = nullptr;
    std::vector<double> eig_x_, eig_y_;
};

/// Workspace bundling the direct solver shared by the dual norm, the
/// pressure projection and the CH preconditioner.
using DualNormWorkspace = NeumannPoisson;

}  // namespace nlchns
