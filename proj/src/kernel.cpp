#include "nlchns/kernel.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <string>

#include "nlchns/ops.hpp"

namespace nlchns {

namespace {
std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

struct KernelPlans {
    fftw_plan fwd = nullptr;  // real pny x pnx -> complex pny x (pnx/2+1)
    fftw_plan bwd = nullptr;
    int pnx = 0, pny = 0;

    KernelPlans(int pnx_, int pny_) : pnx(pnx_), pny(pny_) {
        double* rbuf = fftw_alloc_real(static_cast<size_t>(pnx) * pny);
        fftw_complex* cbuf = fftw_alloc_complex(static_cast<size_t>(pny) * (pnx / 2 + 1));
        std::lock_guard<std::mutex> lock(plan_mutex());
        fwd = fftw_plan_dft_r2c_2d(pny, pnx, rbuf, cbuf, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_c2r_2d(pny, pnx, cbuf, rbuf, FFTW_ESTIMATE);
        fftw_free(rbuf);
        fftw_free(cbuf);
    }
    ~KernelPlans() {
        std::lock_guard<std::mutex> lock(plan_mutex());
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
    }
    KernelPlans(const KernelPlans&) = delete;
    KernelPlans& operator=(const KernelPlans&) = delete;
};

double kernel_value(const KernelSpec& k, double dx, double dy) {
    const double r2 = dx * dx + dy * dy;
    if (k.family == KernelFamily::gaussian) {
        if (r2 > k.radius * k.radius) return 0.0;
        const double e2 = k.epsilon * k.epsilon;
        return k.amplitude * std::exp(-r2 / (2.0 * e2)) / (2.0 * M_PI * e2);
    }
    const double e2 = k.epsilon * k.epsilon;
    if (r2 >= e2) return 0.0;
    return k.amplitude * std::exp(-e2 / (e2 - r2));
}

ScalarField convolve(const KernelSpec& k, const ScalarField& f) {
    require_same_grid(k.grid, f.grid, "convolve");
    const int nx = k.grid.nx, ny = k.grid.ny, pnx = k.pnx, pny = k.pny;
    const int ncx = pnx / 2 + 1;
    double* rbuf = fftw_alloc_real(static_cast<size_t>(pnx) * pny);
    fftw_complex* cbuf = fftw_alloc_complex(static_cast<size_t>(pny) * ncx);

#pragma omp parallel for schedule(static) if (pny >= kParallelRowThreshold)
    for (int j = 0; j < pny; ++j) {
        double* row = rbuf + static_cast<size_t>(j) * pnx;
        if (j < ny)
            for (int i = 0; i < pnx; ++i) row[i] = (i < nx) ? f.at(i, j) : 0.0;
        else
            for (int i = 0; i < pnx; ++i) row[i] = 0.0;
    }
    fftw_execute_dft_r2c(k.plans->fwd, rbuf, cbuf);

    // quadrature weight and FFT normalization folded into the multiply
    const double scale = k.grid.cell_area() / (static_cast<double>(pnx) * pny);
#pragma omp parallel for schedule(static) if (pny >= kParallelRowThreshold)
    for (int j = 0; j < pny; ++j) {
        fftw_complex* row = cbuf + static_cast<size_t>(j) * ncx;
        const std::complex<double>* krow = k.kernel_hat.data() + static_cast<size_t>(j) * ncx;
        for (int i = 0; i < ncx; ++i) {
            const std::complex<double> v(row[i][0], row[i][1]);
            const std::complex<double> w = v * krow[i] * scale;
            row[i][0] = w.real();
            row[i][1] = w.imag();
        }
    }
    fftw_execute_dft_c2r(k.plans->bwd, cbuf, rbuf);

    ScalarField out(k.grid);
#pragma omp parallel for schedule(static) if (ny >= kParallelRowThreshold)
    for (int j = 0; j < ny; ++j) {
        const double* row = rbuf + static_cast<size_t>(j) * pnx;
        for (int i = 0; i < nx; ++i) out.at(i, j) = row[i];
    }
    fftw_free(rbuf);
    fftw_free(cbuf);
    return out;
}

KernelSpec build_kernel(KernelFamily family, double amplitude, double epsilon, double radius,
                        const Grid& grid) {
    if (!(amplitude > 0.0)) throw ConfigError("kernel.amplitude must be > 0");
    if (!(epsilon > 0.0)) throw ConfigError("kernel.epsilon must be > 0");
    if (family == KernelFamily::gaussian && radius < epsilon * (3.0 - 1e-9))
        throw ConfigError("kernel.radius must be >= 3*epsilon for the gaussian family");
    if (family == KernelFamily::mollifier && radius != epsilon)
        throw ConfigError("kernel.radius must equal kernel.epsilon for the mollifier family");

    KernelSpec k;
    k.family = family;
    k.amplitude = amplitude;
    k.epsilon = epsilon;
    k.radius = radius;
    k.grid = grid;
    k.pnx = 2 * grid.nx;
    k.pny = 2 * grid.ny;

    const int pnx = k.pnx, pny = k.pny;
    k.samples.assign(static_cast<size_t>(pnx) * pny, 0.0);
    const double hx = grid.hx(), hy = grid.hy();
#pragma omp parallel for schedule(static) if (pny >= kParallelRowThreshold)
    for (int q = 0; q < pny; ++q) {
        const int oy = (q <= pny / 2) ? q : q - pny;
        for (int p = 0; p < pnx; ++p) {
            const int ox = (p <= pnx / 2) ? p : p - pnx;
            k.samples[static_cast<size_t>(q) * pnx + p] = kernel_value(k, ox * hx, oy * hy);
        }
    }

    // even symmetry must hold exactly on the sample lattice
    for (int q = 0; q < pny; ++q)
        for (int p = 0; p < pnx; ++p) {
            const int pm = (pnx - p) % pnx, qm = (pny - q) % pny;
            if (k.samples[static_cast<size_t>(q) * pnx + p] !=
                k.samples[static_cast<size_t>(qm) * pnx + pm])
                throw InvalidKernel("kernel samples are not even-symmetric");
        }

    k.plans = std::make_shared<KernelPlans>(pnx, pny);

    const int ncx = pnx / 2 + 1;
    k.kernel_hat.assign(static_cast<size_t>(pny) * ncx, {0.0, 0.0});
    {
        double* rbuf = fftw_alloc_real(static_cast<size_t>(pnx) * pny);
        fftw_complex* cbuf = fftw_alloc_complex(static_cast<size_t>(pny) * ncx);
        for (size_t idx = 0; idx < k.samples.size(); ++idx) rbuf[idx] = k.samples[idx];
        fftw_execute_dft_r2c(k.plans->fwd, rbuf, cbuf);
        for (size_t idx = 0; idx < k.kernel_hat.size(); ++idx)
            k.kernel_hat[idx] = {cbuf[idx][0], cbuf[idx][1]};
        fftw_free(rbuf);
        fftw_free(cbuf);
    }

    k.a = convolve(k, ScalarField(grid, 1.0));
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i)
            if (!(k.a.at(i, j) >= 0.0))
                throw InvalidKernel("kernel coefficient a < 0 at cell (" + std::to_string(i) +
                                    "," + std::to_string(j) + "): a = " +
                                    std::to_string(k.a.at(i, j)));
    return k;
}

ScalarField convolve_oracle(const KernelSpec& k, const ScalarField& f) {
    require_same_grid(k.grid, f.grid, "convolve_oracle");
    const Grid& g = k.grid;
    if (g.nx > 64 || g.ny > 64)
        throw GridTooLarge("convolve_oracle: direct double sum restricted to grids <= 64x64");
    ScalarField out(g);
    const double hx = g.hx(), hy = g.hy(), w = g.cell_area();
#pragma omp parallel for schedule(static)
    for (int j0 = 0; j0 < g.ny; ++j0)
        for (int i0 = 0; i0 < g.nx; ++i0) {
            double s = 0.0;
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i)
                    s += kernel_value(k, (i0 - i) * hx, (j0 - j) * hy) * f.at(i, j);
            out.at(i0, j0) = s * w;
        }
    return out;
}

}  // namespace nlchns
