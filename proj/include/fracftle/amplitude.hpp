#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "fracftle/fbm.hpp"

// Scalar amplitude equation db = [a b - cubic b^3] dT + noise_amp dbeta^H on
// the slow scale, its explicit FTLE formula, the small-noise event of the
// positive-FTLE construction and occupation-time statistics.

namespace fracftle::amplitude {

struct AeSpec {
    double a = 1.0;           // linear drift coefficient
    double cubic = 1.0;       // cubic coefficient (positive)
    double noise_amp = 0.0;   // additive noise amplitude
    double hurst = 0.5;
    double dt_slow = 1e-3;
    double t0_slow = 1.0;     // horizon T_0
    double b0 = 0.0;
    double blowup_guard = 1e6;

    void validate() const;
    std::size_t n_steps() const;
};

struct AePath {
    double dt = 0.0;
    std::vector<double> times;
    std::vector<double> values;

    double duration() const { return times.empty() ? 0.0 : times.back(); }
    std::size_t index_at(double t) const;
};

/// Euler-Maruyama with pathwise fractional increments; deterministic in inputs.
AePath simulate_ae(const AeSpec& spec, const fbm::ScalarPath& noise);

/// Convenience: fresh slow-scale fBm from the seed, then simulate.
AePath simulate_ae(const AeSpec& spec, std::uint64_t seed);

struct PitchforkPoint {
    double b = 0.0;
    double lambda = 0.0;
};

/// Closed form for db = (b - b^3) dT: b(T)^2 = b0^2 e^{2T} / (1 + b0^2(e^{2T}-1)),
/// lambda_T = 1 - (3/T) * 0.5 * ln(1 + b0^2 (e^{2T}-1)).
PitchforkPoint pitchfork_closed_form(double b0, double t_slow);

/// a + (1/T) integral of -3 cubic b(s)^2 ds by trapezoidal quadrature.
double ae_ftle(const AePath& path, double a, double cubic);
/// Same restricted to [0, t_slow].
double ae_ftle(const AePath& path, double a, double cubic, double t_slow);

/// True iff sup |noise| on [0,T] <= eta/2 (two-sided sup).
bool noise_smallness_event(const fbm::ScalarPath& noise, double eta, double t_slow);

/// Default eta: the largest value with (1 + noise_amp) eta e^{T_0} < 1/2.
double default_eta(double noise_amp, double t0_slow);

/// Occupation time of {|b| <= theta}: dt * weighted count, endpoints 1/2.
double occupation_time(const AePath& path, double theta);

/// Monte Carlo estimate of p_theta = E[occupation time] over fresh noise paths.
double estimate_p_theta(const AeSpec& spec, double theta, std::size_t replicas,
                        std::uint64_t seed);

void write_csv(const AePath& path, std::ostream& out);

}  // namespace fracftle::amplitude
