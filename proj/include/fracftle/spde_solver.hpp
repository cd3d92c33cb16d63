#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <string>
#include <vector>

#include "fracftle/fbm.hpp"
#include "fracftle/spectral_model.hpp"

// Fast-scale time integration of du = [Au + nu u + F(u)]dt + sigma dW^H in the
// Galerkin truncation, plus the stochastic convolution Z(t) = int e^{A(t-s)}dW.
// Noise increments enter by the left-point rule (additive noise, pathwise
// Riemann-Stieltjes reading).

namespace fracftle::solver {

enum class Scheme { exponential_euler, semi_implicit };

struct SolverConfig {
    double dt_fast = 1e-3;
    double t_end = 1.0;
    Scheme scheme = Scheme::exponential_euler;
    int store_stride = 1;
    double blowup_guard = 1e6;

    void validate() const;
    std::size_t n_steps() const;  // t_end / dt_fast, validated integral
};

/// Stored states at times i * dt_fast * store_stride.
struct Trajectory {
    double dt_store = 0.0;
    std::vector<double> times;
    Eigen::MatrixXd states;  // n_stored x n_modes

    std::size_t n_stored() const { return times.size(); }
    double duration() const { return times.empty() ? 0.0 : times.back(); }
    model::Field state_at_index(std::size_t i) const { return states.row(i); }
    /// Largest stored index with time <= t (+ tolerance).
    std::size_t index_at(double t) const;
};

/// Per-mode linear-step coefficients shared by solver and variation equation.
struct StepCoefficients {
    Eigen::VectorXd exp_lin;   // exp((alpha_k + nu) h)
    Eigen::VectorXd phi1_h;    // h * phi_1((alpha_k + nu) h)
    Eigen::VectorXd semi_inv;  // 1 / (1 - h (alpha_k + nu))
};

StepCoefficients step_coefficients(const model::ModelSpec& spec, double dt);

/// phi_1(z) = (e^z - 1)/z with phi_1(0) = 1.
double phi1(double z);

/// One time step from u with per-mode noise increments dW (already sqrt(q_k)
/// scaled; sigma is applied here).
model::Field step(const model::Field& u, const Eigen::VectorXd& noise_increment,
                  const model::ModelSpec& spec, const SolverConfig& config);

/// Full trajectory from u0; deterministic in (u0, spec, config, noise).
Trajectory simulate(const model::Field& u0, const model::ModelSpec& spec,
                    const SolverConfig& config, const fbm::HilbertPath& noise);

/// Z_k(t+h) = e^{alpha_k h} (Z_k(t) + dW_k(t)), Z(0) = 0.
Trajectory stochastic_convolution(const fbm::HilbertPath& noise,
                                  const model::ModelSpec& spec,
                                  const SolverConfig& config);

void write_csv(const Trajectory& traj, std::ostream& out);
/// JSON sidecar with spec/config/seed echo for provenance.
void write_sidecar(const model::ModelSpec& spec, const SolverConfig& config,
                   std::uint64_t seed, std::ostream& out);

}  // namespace fracftle::solver
