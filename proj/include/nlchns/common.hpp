#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace nlchns {

/// Base class for all solver/model errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GridMismatch : Error {
    using Error::Error;
};
struct GridTooLarge : Error {
    using Error::Error;
};
struct InvalidKernel : Error {
    using Error::Error;
};
struct IncompatibleRhs : Error {
    using Error::Error;
};
struct HypothesisViolated : Error {
    HypothesisViolated(const std::string& msg, const std::string& id, double witness)
        : Error(msg), hypothesis(id), witness_s(witness) {}
    std::string hypothesis;
    double witness_s;
};
struct NoConvergence : Error {
    NoConvergence(const std::string& msg, double res = 0.0) : Error(msg), last_residual(res) {}
    double last_residual;
};
struct MeanRootFail : Error {
    using Error::Error;
};
struct NonFinite : Error {
    using Error::Error;
};
struct NotConverged : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

// Loops below this many rows run serially; the fork/join cost outweighs
// the work on small grids. The threshold is a fixed constant, so results
// never depend on it (row partials are combined in index order anyway).
inline constexpr int kParallelRowThreshold = 192;
inline constexpr int kParallelCellThreshold = 36864;  // flat per-cell loops

// Fixed-order reduction: per-row partial sums computed in parallel, rows
// combined serially in index order. Result is independent of the OpenMP
// thread count and schedule.
template <class RowFn>
double sum_over_rows(int nrows, RowFn&& row_sum) {
    // scratch reused across calls; workers must go through the captured
    // pointer (naming a thread_local inside the region would resolve to
    // each worker's own instance)
    thread_local std::vector<double> partial;
    partial.resize(static_cast<size_t>(nrows));
    double* part = partial.data();
#pragma omp parallel for schedule(static) if (nrows >= kParallelRowThreshold)
    for (int j = 0; j < nrows; ++j) part[j] = row_sum(j);
    double s = 0.0;
    for (int j = 0; j < nrows; ++j) s += part[j];
    return s;
}

template <class RowFn>
double max_over_rows(int nrows, RowFn&& row_max) {
    thread_local std::vector<double> partial;
    partial.resize(static_cast<size_t>(nrows));
    double* part = partial.data();
#pragma omp parallel for schedule(static) if (nrows >= kParallelRowThreshold)
    for (int j = 0; j < nrows; ++j) part[j] = row_max(j);
    double m = nrows > 0 ? part[0] : 0.0;
    for (int j = 1; j < nrows; ++j)
        if (part[j] > m) m = part[j];
    return m;
}

}  // namespace nlchns
