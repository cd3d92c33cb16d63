#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <iosfwd>
#include <vector>

// Exact synthesis of fractional Gaussian noise / fractional Brownian motion,
// scalar and Hilbert-space valued (trace-class weights in the eigenbasis).
// Method: circulant embedding of the increment covariance (exact in law),
// with a dense Cholesky fallback when the embedding fails numerically.

namespace fracftle::fbm {

struct FgnSpec {
    std::size_t n_steps = 0;
    double dt = 1.0;
    double hurst = 0.5;
    std::uint64_t seed = 0;

    void validate() const;  // throws std::invalid_argument
};

/// Uniformly sampled scalar path starting at 0 (times[0] = 0, values[0] = 0).
struct ScalarPath {
    double dt = 0.0;
    std::vector<double> times;
    std::vector<double> values;

    std::size_t n_steps() const { return values.empty() ? 0 : values.size() - 1; }
    double duration() const { return times.empty() ? 0.0 : times.back(); }
    /// Largest grid index i with times[i] <= t (+ small tolerance).
    std::size_t index_at(double t) const;
};

struct HilbertNoiseSpec {
    std::size_t n_modes = 0;
    std::vector<double> mode_weights;  // q_1..q_N, all positive
    double hurst = 0.5;
    std::size_t n_steps = 0;
    double dt = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Matrix of per-mode scaled paths; column k-1 carries sqrt(q_k) * beta_k^H.
struct HilbertPath {
    double dt = 0.0;
    std::vector<double> times;
    Eigen::MatrixXd values;  // (n_steps+1) x n_modes, row 0 is zero

    std::size_t n_steps() const { return times.empty() ? 0 : times.size() - 1; }
    std::size_t n_modes() const { return static_cast<std::size_t>(values.cols()); }
    ScalarPath mode(std::size_t k) const;  // 1-based mode index
};

/// Trace-class default weights q_k = k^{-2}.
std::vector<double> default_mode_weights(std::size_t n_modes);

/// fBm covariance 0.5*(t^{2H} + s^{2H} - |t-s|^{2H}).
double fbm_covariance(double t, double s, double hurst);

/// Autocovariance of fGn increments over step dt at integer lag.
double fgn_autocovariance(std::size_t lag, double hurst, double dt);

/// n_steps stationary increments with the exact fGn covariance on the grid.
std::vector<double> sample_fgn(const FgnSpec& spec);

/// Cumulative fBm path (prepended zero); deterministic in the seed.
ScalarPath sample_fbm(const FgnSpec& spec);

/// Pathwise rescaling beta_gamma(T) = gamma^{2H} * beta(T * gamma^{-2}) by exact
/// reindexing: output grid is gamma^2 * (source grid), no interpolation.
ScalarPath rescale_fbm(const ScalarPath& path, double gamma, double hurst);

/// Same, but subsampled so the output step equals target_dt. Throws when
/// gamma^{-2} * target_dt is not an integer multiple of the source step.
ScalarPath rescale_fbm(const ScalarPath& path, double gamma, double hurst,
                       double target_dt);

/// N independent scalar fBm paths, mode k scaled by sqrt(q_k); the substream
/// of mode k is derived from (seed, k).
HilbertPath sample_hilbert_fbm(const HilbertNoiseSpec& spec);

void write_csv(const ScalarPath& path, std::ostream& out);
/// Little-endian binary dump: header (n_steps u64, dt f64, hurst f64,
/// seed u64) then n_steps+1 values as f64.
void write_binary(const ScalarPath& path, double hurst, std::uint64_t seed,
                  std::ostream& out);

namespace detail {
/// Dense-covariance Cholesky sampler (the fallback path), exposed for tests.
std::vector<double> sample_fgn_dense(const FgnSpec& spec);
/// Minimum circulant-embedding eigenvalue for (n_steps, hurst) at unit step.
double embedding_min_eigenvalue(std::size_t n_steps, double hurst);
}  // namespace detail

}  // namespace fracftle::fbm
