#include "fracftle/fbm.hpp"

#include <fftw3.h>

#include <Eigen/Cholesky>
#include <bit>
#include <cmath>
#include <complex>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "fracftle/rng.hpp"

namespace fracftle::fbm {

namespace {

constexpr double kEmbeddingTolEig = 1e-10;

// FFTW planning is not thread-safe; executing a plan on fresh arrays is.
std::mutex& fftw_plan_mutex() {
    static std::mutex m;
    return m;
}

struct PlanDeleter {
    void operator()(fftw_plan p) const {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex());
        fftw_destroy_plan(p);
    }
};

using PlanPtr = std::unique_ptr<std::remove_pointer_t<fftw_plan>, PlanDeleter>;

// One forward c2c plan per transform size, reused across threads via the
// new-array execute interface (FFTW_UNALIGNED keeps any buffer legal).
fftw_plan forward_plan(std::size_t m) {
    static std::map<std::size_t, PlanPtr> plans;
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    auto it = plans.find(m);
    if (it != plans.end()) return it->second.get();
    std::vector<std::complex<double>> scratch(m);
    fftw_plan p = fftw_plan_dft_1d(
        static_cast<int>(m), reinterpret_cast<fftw_complex*>(scratch.data()),
        reinterpret_cast<fftw_complex*>(scratch.data()), FFTW_FORWARD,
        FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (p == nullptr) throw std::runtime_error("fbm: fftw plan creation failed");
    return plans.emplace(m, PlanPtr(p)).first->second.get();
}

void run_fft(std::size_t m, std::complex<double>* data) {
    fftw_execute_dft(forward_plan(m), reinterpret_cast<fftw_complex*>(data),
                     reinterpret_cast<fftw_complex*>(data));
}

// Eigenvalues of the circulant embedding of the unit-step fGn covariance,
// cached per (n, H). A step of dt scales every eigenvalue by dt^{2H}.
using EigenvaluesPtr = std::shared_ptr<const std::vector<double>>;

EigenvaluesPtr embedding_eigenvalues(std::size_t n, double hurst) {
    using Key = std::pair<std::size_t, std::uint64_t>;
    static std::map<Key, EigenvaluesPtr> cache;
    static std::mutex cache_mutex;
    const Key key{n, std::bit_cast<std::uint64_t>(hurst)};
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }

    const std::size_t m = 2 * n;
    std::vector<std::complex<double>> row(m);
    for (std::size_t j = 0; j <= n; ++j) row[j] = fgn_autocovariance(j, hurst, 1.0);
    for (std::size_t j = 1; j < n; ++j) row[m - j] = row[j];
    run_fft(m, row.data());

    auto eigs = std::make_shared<std::vector<double>>(m);
    for (std::size_t j = 0; j < m; ++j) (*eigs)[j] = row[j].real();

    std::lock_guard<std::mutex> lock(cache_mutex);
    cache.emplace(key, eigs);
    return eigs;
}

std::vector<double> sample_fgn_circulant(const FgnSpec& spec,
                                         const std::vector<double>& eigs) {
    const std::size_t n = spec.n_steps;
    const std::size_t m = 2 * n;
    rng::GaussianSampler gauss(spec.seed);

    // Hermitian-symmetric spectral amplitudes; real parts of the DFT then
    // carry the exact fGn law (Davies-Harte).
    std::vector<std::complex<double>> freq(m);
    const double inv_m = 1.0 / static_cast<double>(m);
    freq[0] = std::sqrt(std::max(0.0, eigs[0]) * inv_m) * gauss.next();
    freq[n] = std::sqrt(std::max(0.0, eigs[n]) * inv_m) * gauss.next();
    for (std::size_t j = 1; j < n; ++j) {
        const double amp = std::sqrt(std::max(0.0, eigs[j]) * 0.5 * inv_m);
        const double re = amp * gauss.next();
        const double im = amp * gauss.next();
        freq[j] = {re, im};
        freq[m - j] = {re, -im};
    }
    run_fft(m, freq.data());

    const double scale = std::pow(spec.dt, spec.hurst);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = scale * freq[i].real();
    return out;
}

}  // namespace

void FgnSpec::validate() const {
    if (n_steps < 1) throw std::invalid_argument("FgnSpec: n_steps must be >= 1");
    if (!(dt > 0.0)) throw std::invalid_argument("FgnSpec: dt must be positive");
    if (!(hurst > 0.0 && hurst < 1.0)) {
        throw std::invalid_argument("FgnSpec: hurst must lie in (0,1)");
    }
}

void HilbertNoiseSpec::validate() const {
    if (n_modes < 1) {
        throw std::invalid_argument("HilbertNoiseSpec: n_modes must be >= 1");
    }
    if (mode_weights.size() != n_modes) {
        throw std::invalid_argument("HilbertNoiseSpec: mode_weights size mismatch");
    }
    for (double q : mode_weights) {
        if (!(q > 0.0)) {
            throw std::invalid_argument("HilbertNoiseSpec: mode weights must be positive");
        }
    }
    FgnSpec scalar{n_steps, dt, hurst, seed};
    scalar.validate();
}

std::size_t ScalarPath::index_at(double t) const {
    if (times.empty() || dt <= 0.0) throw std::logic_error("ScalarPath: empty path");
    const double pos = t / dt;
    const auto idx = static_cast<std::size_t>(std::floor(pos + 1e-9));
    if (idx >= times.size()) {
        std::ostringstream msg;
        msg << "ScalarPath: time " << t << " beyond path horizon " << duration();
        throw std::out_of_range(msg.str());
    }
    return idx;
}

ScalarPath HilbertPath::mode(std::size_t k) const {
    if (k < 1 || k > n_modes()) throw std::out_of_range("HilbertPath: mode index");
    ScalarPath p;
    p.dt = dt;
    p.times = times;
    p.values.resize(times.size());
    Eigen::VectorXd::Map(p.values.data(), values.rows()) = values.col(k - 1);
    return p;
}

std::vector<double> default_mode_weights(std::size_t n_modes) {
    std::vector<double> q(n_modes);
    for (std::size_t k = 1; k <= n_modes; ++k) {
        q[k - 1] = 1.0 / (static_cast<double>(k) * static_cast<double>(k));
    }
    return q;
}

double fbm_covariance(double t, double s, double hurst) {
    if (!(hurst > 0.0 && hurst < 1.0)) {
        throw std::invalid_argument("fbm_covariance: hurst must lie in (0,1)");
    }
    if (t < 0.0 || s < 0.0) {
        throw std::invalid_argument("fbm_covariance: times must be nonnegative");
    }
    const double two_h = 2.0 * hurst;
    return 0.5 * (std::pow(t, two_h) + std::pow(s, two_h) -
                  std::pow(std::abs(t - s), two_h));
}

double fgn_autocovariance(std::size_t lag, double hurst, double dt) {
    const double k = static_cast<double>(lag);
    const double two_h = 2.0 * hurst;
    const double unit = 0.5 * (std::pow(k + 1.0, two_h) - 2.0 * std::pow(k, two_h) +
                               std::pow(std::abs(k - 1.0), two_h));
    return std::pow(dt, two_h) * unit;
}

std::vector<double> sample_fgn(const FgnSpec& spec) {
    spec.validate();
    const auto eigs = embedding_eigenvalues(spec.n_steps, spec.hurst);
    double min_eig = 0.0;
    for (double lambda : *eigs) min_eig = std::min(min_eig, lambda);
    if (min_eig < -kEmbeddingTolEig) {
        return detail::sample_fgn_dense(spec);
    }
    return sample_fgn_circulant(spec, *eigs);
}

ScalarPath sample_fbm(const FgnSpec& spec) {
    const std::vector<double> incr = sample_fgn(spec);
    ScalarPath path;
    path.dt = spec.dt;
    path.times.resize(spec.n_steps + 1);
    path.values.resize(spec.n_steps + 1);
    path.times[0] = 0.0;
    path.values[0] = 0.0;
    for (std::size_t i = 0; i < spec.n_steps; ++i) {
        path.times[i + 1] = static_cast<double>(i + 1) * spec.dt;
        path.values[i + 1] = path.values[i] + incr[i];
    }
    return path;
}

ScalarPath rescale_fbm(const ScalarPath& path, double gamma, double hurst) {
    if (!(gamma > 0.0)) throw std::invalid_argument("rescale_fbm: gamma must be positive");
    if (!(hurst > 0.0 && hurst < 1.0)) {
        throw std::invalid_argument("rescale_fbm: hurst must lie in (0,1)");
    }
    const double g2 = gamma * gamma;
    const double amp = std::pow(gamma, 2.0 * hurst);
    ScalarPath out;
    out.dt = g2 * path.dt;
    out.times.resize(path.times.size());
    out.values.resize(path.values.size());
    for (std::size_t i = 0; i < path.times.size(); ++i) {
        out.times[i] = static_cast<double>(i) * out.dt;
        out.values[i] = amp * path.values[i];
    }
    return out;
}

ScalarPath rescale_fbm(const ScalarPath& path, double gamma, double hurst,
                       double target_dt) {
    if (!(target_dt > 0.0)) {
        throw std::invalid_argument("rescale_fbm: target_dt must be positive");
    }
    const double g2 = gamma * gamma;
    const double ratio = target_dt / (g2 * path.dt);
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
        std::ostringstream msg;
        msg << "rescale_fbm: target step " << target_dt
            << " is not an integer multiple of the rescaled source step "
            << g2 * path.dt;
        throw std::invalid_argument(msg.str());
    }
    const auto stride = static_cast<std::size_t>(rounded);
    const double amp = std::pow(gamma, 2.0 * hurst);
    const std::size_t n_out = path.n_steps() / stride;
    ScalarPath out;
    out.dt = target_dt;
    out.times.resize(n_out + 1);
    out.values.resize(n_out + 1);
    for (std::size_t i = 0; i <= n_out; ++i) {
        out.times[i] = static_cast<double>(i) * target_dt;
        out.values[i] = amp * path.values[i * stride];
    }
    return out;
}

HilbertPath sample_hilbert_fbm(const HilbertNoiseSpec& spec) {
    spec.validate();
    HilbertPath path;
    path.dt = spec.dt;
    path.times.resize(spec.n_steps + 1);
    for (std::size_t i = 0; i <= spec.n_steps; ++i) {
        path.times[i] = static_cast<double>(i) * spec.dt;
    }
    path.values.resize(spec.n_steps + 1, spec.n_modes);
    for (std::size_t k = 1; k <= spec.n_modes; ++k) {
        FgnSpec mode_spec{spec.n_steps, spec.dt, spec.hurst,
                          rng::derive_seed(spec.seed, rng::kModeStream, k)};
        const ScalarPath beta = sample_fbm(mode_spec);
        const double w = std::sqrt(spec.mode_weights[k - 1]);
        for (std::size_t i = 0; i <= spec.n_steps; ++i) {
            path.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k - 1)) =
                w * beta.values[i];
        }
    }
    return path;
}

void write_csv(const ScalarPath& path, std::ostream& out) {
    out << "time,value\n";
    char line[64];
    for (std::size_t i = 0; i < path.times.size(); ++i) {
        std::snprintf(line, sizeof(line), "%.17g,%.17g\n", path.times[i],
                      path.values[i]);
        out << line;
    }
}

namespace {
void put_le_u64(std::ostream& out, std::uint64_t v) {
    unsigned char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
    out.write(reinterpret_cast<const char*>(buf), 8);
}
void put_le_f64(std::ostream& out, double v) {
    put_le_u64(out, std::bit_cast<std::uint64_t>(v));
}
}  // namespace

void write_binary(const ScalarPath& path, double hurst, std::uint64_t seed,
                  std::ostream& out) {
    put_le_u64(out, path.n_steps());
    put_le_f64(out, path.dt);
    put_le_f64(out, hurst);
    put_le_u64(out, seed);
    for (double v : path.values) put_le_f64(out, v);
}

namespace detail {

std::vector<double> sample_fgn_dense(const FgnSpec& spec) {
    spec.validate();
    const auto n = static_cast<Eigen::Index>(spec.n_steps);
    Eigen::MatrixXd cov(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double g = fgn_autocovariance(static_cast<std::size_t>(i - j),
                                                spec.hurst, spec.dt);
            cov(i, j) = g;
            cov(j, i) = g;
        }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "sample_fgn: dense covariance not positive definite (hurst="
            << spec.hurst << ", n_steps=" << spec.n_steps << ", dt=" << spec.dt
            << ")";
        throw std::runtime_error(msg.str());
    }
    rng::GaussianSampler gauss(spec.seed);
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = gauss.next();
    const Eigen::VectorXd x = llt.matrixL() * z;
    return std::vector<double>(x.data(), x.data() + n);
}

double embedding_min_eigenvalue(std::size_t n_steps, double hurst) {
    const auto eigs = embedding_eigenvalues(n_steps, hurst);
    double min_eig = (*eigs)[0];
    for (double lambda : *eigs) min_eig = std::min(min_eig, lambda);
    return min_eig;
}

}  // namespace detail

}  // namespace fracftle::fbm
