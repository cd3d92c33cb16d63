#include "fracftle/amplitude.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "fracftle/rng.hpp"

namespace fracftle::amplitude {

void AeSpec::validate() const {
    if (!(cubic > 0.0)) throw std::invalid_argument("AeSpec: cubic must be positive");
    if (noise_amp < 0.0) throw std::invalid_argument("AeSpec: noise_amp must be >= 0");
    if (!(hurst > 0.0 && hurst < 1.0)) {
        throw std::invalid_argument("AeSpec: hurst must lie in (0,1)");
    }
    if (!(dt_slow > 0.0)) throw std::invalid_argument("AeSpec: dt_slow must be positive");
    if (!(t0_slow > 0.0)) throw std::invalid_argument("AeSpec: t0_slow must be positive");
    const double steps = t0_slow / dt_slow;
    if (std::abs(steps - std::round(steps)) > 1e-6 * std::max(1.0, steps)) {
        throw std::invalid_argument("AeSpec: t0_slow / dt_slow must be an integer");
    }
}

std::size_t AeSpec::n_steps() const {
    return static_cast<std::size_t>(std::llround(t0_slow / dt_slow));
}

std::size_t AePath::index_at(double t) const {
    if (times.empty() || dt <= 0.0) throw std::logic_error("AePath: empty path");
    const auto idx = static_cast<std::size_t>(std::floor(t / dt + 1e-9));
    if (idx >= times.size()) {
        std::ostringstream msg;
        msg << "AePath: time " << t << " beyond horizon " << duration();
        throw std::out_of_range(msg.str());
    }
    return idx;
}

AePath simulate_ae(const AeSpec& spec, const fbm::ScalarPath& noise) {
    spec.validate();
    if (std::abs(noise.dt - spec.dt_slow) > 1e-9 * std::max(1.0, spec.dt_slow)) {
        throw std::invalid_argument("simulate_ae: noise grid step must equal dt_slow");
    }
    const std::size_t n = spec.n_steps();
    if (noise.n_steps() < n) {
        throw std::invalid_argument("simulate_ae: noise path shorter than horizon");
    }
    AePath path;
    path.dt = spec.dt_slow;
    path.times.resize(n + 1);
    path.values.resize(n + 1);
    path.times[0] = 0.0;
    path.values[0] = spec.b0;
    double b = spec.b0;
    for (std::size_t i = 0; i < n; ++i) {
        const double drift = spec.a * b - spec.cubic * b * b * b;
        const double dbeta = noise.values[i + 1] - noise.values[i];
        b += drift * spec.dt_slow + spec.noise_amp * dbeta;
        if (!(std::abs(b) <= spec.blowup_guard)) {
            std::ostringstream msg;
            msg << "simulate_ae: |b| = " << std::abs(b) << " exceeded blow-up guard at T = "
                << static_cast<double>(i + 1) * spec.dt_slow;
            throw std::runtime_error(msg.str());
        }
        path.times[i + 1] = static_cast<double>(i + 1) * spec.dt_slow;
        path.values[i + 1] = b;
    }
    return path;
}

AePath simulate_ae(const AeSpec& spec, std::uint64_t seed) {
    spec.validate();
    fbm::FgnSpec noise_spec{spec.n_steps(), spec.dt_slow, spec.hurst, seed};
    return simulate_ae(spec, fbm::sample_fbm(noise_spec));
}

PitchforkPoint pitchfork_closed_form(double b0, double t_slow) {
    if (t_slow < 0.0) {
        throw std::invalid_argument("pitchfork_closed_form: time must be >= 0");
    }
    PitchforkPoint p;
    if (t_slow == 0.0) {
        p.b = b0;
        p.lambda = 1.0 - 3.0 * b0 * b0;
        return p;
    }
    const double e2t = std::exp(2.0 * t_slow);
    const double denom = 1.0 + b0 * b0 * (e2t - 1.0);
    p.b = b0 * std::exp(t_slow) / std::sqrt(denom);
    // integral of b^2 over [0,T] in closed form
    const double int_b2 = 0.5 * std::log(denom);
    p.lambda = 1.0 - 3.0 * int_b2 / t_slow;
    return p;
}

namespace {
double trapezoid_minus3cb2(const AePath& path, double cubic, std::size_t last) {
    double acc = 0.0;
    for (std::size_t i = 0; i < last; ++i) {
        const double f0 = path.values[i] * path.values[i];
        const double f1 = path.values[i + 1] * path.values[i + 1];
        acc += 0.5 * (f0 + f1);
    }
    return -3.0 * cubic * acc * path.dt;
}
}  // namespace

double ae_ftle(const AePath& path, double a, double cubic) {
    if (path.times.size() < 2) throw std::invalid_argument("ae_ftle: path too short");
    return ae_ftle(path, a, cubic, path.duration());
}

double ae_ftle(const AePath& path, double a, double cubic, double t_slow) {
    if (!(t_slow > 0.0)) throw std::invalid_argument("ae_ftle: time must be > 0");
    const std::size_t last = path.index_at(t_slow);
    if (last == 0) throw std::invalid_argument("ae_ftle: time below first grid step");
    const double t = path.times[last];
    return a + trapezoid_minus3cb2(path, cubic, last) / t;
}

bool noise_smallness_event(const fbm::ScalarPath& noise, double eta, double t_slow) {
    if (!(eta > 0.0)) throw std::invalid_argument("noise_smallness_event: eta must be > 0");
    const std::size_t last = noise.index_at(t_slow);
    double sup = 0.0;
    for (std::size_t i = 0; i <= last; ++i) {
        sup = std::max(sup, std::abs(noise.values[i]));
    }
    return sup <= 0.5 * eta;
}

double default_eta(double noise_amp, double t0_slow) {
    return 0.999 * 0.5 * std::exp(-t0_slow) / (1.0 + noise_amp);
}

double occupation_time(const AePath& path, double theta) {
    if (!(theta > 0.0)) throw std::invalid_argument("occupation_time: theta must be > 0");
    if (path.values.size() < 2) return 0.0;
    double acc = 0.0;
    const std::size_t last = path.values.size() - 1;
    for (std::size_t i = 0; i <= last; ++i) {
        if (std::abs(path.values[i]) <= theta) {
            acc += (i == 0 || i == last) ? 0.5 : 1.0;
        }
    }
    return acc * path.dt;
}

double estimate_p_theta(const AeSpec& spec, double theta, std::size_t replicas,
                        std::uint64_t seed) {
    if (replicas < 100) {
        throw std::invalid_argument("estimate_p_theta: need >= 100 replicas");
    }
    double acc = 0.0;
    for (std::size_t r = 0; r < replicas; ++r) {
        const AePath path =
            simulate_ae(spec, rng::derive_seed(seed, rng::kPthetaStream, r));
        acc += occupation_time(path, theta);
    }
    return acc / static_cast<double>(replicas);
}

void write_csv(const AePath& path, std::ostream& out) {
    out << "time,b\n";
    char line[64];
    for (std::size_t i = 0; i < path.times.size(); ++i) {
        std::snprintf(line, sizeof(line), "%.17g,%.17g\n", path.times[i],
                      path.values[i]);
        out << line;
    }
}

}  // namespace fracftle::amplitude
