#include "nlchns/poisson.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

#include "nlchns/ops.hpp"

namespace nlchns {

namespace {
// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

NeumannPoisson::NeumannPoisson(const Grid& g) : grid_(g) {
    const int nx = g.nx, ny = g.ny;
    buf_ = fftw_alloc_real(static_cast<size_t>(nx) * ny);
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        fwd_ = fftw_plan_r2r_2d(ny, nx, buf_, buf_, FFTW_REDFT10, FFTW_REDFT10,
                                FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
        bwd_ = fftw_plan_r2r_2d(ny, nx, buf_, buf_, FFTW_REDFT01, FFTW_REDFT01,
                                FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
    }
    eig_x_.resize(static_cast<size_t>(nx));
    eig_y_.resize(static_cast<size_t>(ny));
    const double ihx2 = 1.0 / (g.hx() * g.hx()), ihy2 = 1.0 / (g.hy() * g.hy());
    for (int k = 0; k < nx; ++k) eig_x_[k] = (2.0 - 2.0 * std::cos(M_PI * k / nx)) * ihx2;
    for (int k = 0; k < ny; ++k) eig_y_[k] = (2.0 - 2.0 * std::cos(M_PI * k / ny)) * ihy2;
}

NeumannPoisson::~NeumannPoisson() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    if (fwd_) fftw_destroy_plan(fwd_);
    if (bwd_) fftw_destroy_plan(bwd_);
    if (buf_) fftw_free(buf_);
}

ScalarField NeumannPoisson::solve_impl(double sigma, const ScalarField& rhs, bool gauge) {
    require_same_grid(grid_, rhs.grid, "NeumannPoisson::solve");
    const int nx = grid_.nx, ny = grid_.ny;
    const size_t n = static_cast<size_t>(nx) * ny;
    for (size_t k = 0; k < n; ++k) buf_[k] = rhs.data[k];
    fftw_execute(fwd_);
    const double scale = 1.0 / (4.0 * nx * ny);
    for (int j = 0; j < ny; ++j) {
        const double ey = eig_y_[j];
        double* row = buf_ + static_cast<size_t>(j) * nx;
        for (int i = 0; i < nx; ++i) {
            const double lam = sigma + eig_x_[i] + ey;
            row[i] = (gauge && i == 0 && j == 0) ? 0.0 : row[i] * scale / lam;
        }
    }
    fftw_execute(bwd_);
    ScalarField out(grid_);
    for (size_t k = 0; k < n; ++k) out.data[k] = buf_[k];
    return out;
}

ScalarField NeumannPoisson::solve_poisson(const ScalarField& rhs) {
    const double m = mean(rhs);
    if (std::fabs(m) > compatibility_tol * (1.0 + linf_norm(rhs)))
        throw IncompatibleRhs("neumann_poisson_solve: rhs mean " + std::to_string(m) +
                              " violates the compatibility condition");
    return solve_impl(0.0, rhs, /*gauge=*/true);
}

ScalarField NeumannPoisson::solve_helmholtz(double sigma, const ScalarField& rhs) {
    if (!(sigma > 0.0))
        throw ConfigError("solve_helmholtz: sigma must be > 0 (use solve_poisson for sigma = 0)");
    return solve_impl(sigma, rhs, /*gauge=*/false);
}

}  // namespace nlchns
