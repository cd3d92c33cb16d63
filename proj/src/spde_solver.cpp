#include "fracftle/spde_solver.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace fracftle::solver {

void SolverConfig::validate() const {
    if (!(dt_fast > 0.0)) throw std::invalid_argument("SolverConfig: dt_fast must be positive");
    if (!(t_end > 0.0)) throw std::invalid_argument("SolverConfig: t_end must be positive");
    if (store_stride < 1) throw std::invalid_argument("SolverConfig: store_stride must be >= 1");
    if (!(blowup_guard > 0.0)) {
        throw std::invalid_argument("SolverConfig: blowup_guard must be positive");
    }
    const double steps = t_end / dt_fast;
    if (std::abs(steps - std::round(steps)) > 1e-6 * std::max(1.0, steps)) {
        throw std::invalid_argument("SolverConfig: t_end / dt_fast must be an integer");
    }
}

std::size_t SolverConfig::n_steps() const {
    return static_cast<std::size_t>(std::llround(t_end / dt_fast));
}

std::size_t Trajectory::index_at(double t) const {
    if (times.empty() || dt_store <= 0.0) throw std::logic_error("Trajectory: empty");
    const auto idx = static_cast<std::size_t>(std::floor(t / dt_store + 1e-9));
    if (idx >= times.size()) {
        std::ostringstream msg;
        msg << "Trajectory: time " << t << " beyond stored horizon " << duration();
        throw std::out_of_range(msg.str());
    }
    return idx;
}

double phi1(double z) {
    if (std::abs(z) < 1e-8) return 1.0 + 0.5 * z;
    return std::expm1(z) / z;
}

StepCoefficients step_coefficients(const model::ModelSpec& spec, double dt) {
    const Eigen::VectorXd alpha = model::eigenvalues(spec);
    StepCoefficients c;
    c.exp_lin.resize(alpha.size());
    c.phi1_h.resize(alpha.size());
    c.semi_inv.resize(alpha.size());
    for (Eigen::Index k = 0; k < alpha.size(); ++k) {
        const double z = (alpha(k) + spec.nu) * dt;
        c.exp_lin(k) = std::exp(z);
        c.phi1_h(k) = dt * phi1(z);
        const double denom = 1.0 - z;
        if (denom <= 0.0) {
            throw std::invalid_argument(
                "step_coefficients: semi-implicit step not invertible; reduce dt");
        }
        c.semi_inv(k) = 1.0 / denom;
    }
    return c;
}

namespace {

void check_blowup(const model::Field& u, double t, const SolverConfig& config) {
    const double norm = u.norm();
    if (!(norm <= config.blowup_guard)) {
        std::ostringstream msg;
        msg << "simulate: ||u|| = " << norm << " exceeded blow-up guard "
            << config.blowup_guard << " at t = " << t;
        throw std::runtime_error(msg.str());
    }
}

// Noise may live on a coarser grid; each solver step must subdivide it.
std::size_t noise_stride(const fbm::HilbertPath& noise, const SolverConfig& config) {
    const double ratio = noise.dt / config.dt_fast;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
        std::ostringstream msg;
        msg << "noise grid step " << noise.dt << " is not an integer multiple of dt_fast "
            << config.dt_fast;
        throw std::invalid_argument(msg.str());
    }
    return static_cast<std::size_t>(rounded);
}

}  // namespace

model::Field step(const model::Field& u, const Eigen::VectorXd& noise_increment,
                  const model::ModelSpec& spec, const SolverConfig& config) {
    const StepCoefficients coeffs = step_coefficients(spec, config.dt_fast);
    const model::Field f = model::nonlinearity(u, spec);
    model::Field next(u.size());
    if (config.scheme == Scheme::exponential_euler) {
        next = coeffs.exp_lin.cwiseProduct(u) + coeffs.phi1_h.cwiseProduct(f) +
               spec.sigma * noise_increment;
    } else {
        next = coeffs.semi_inv.cwiseProduct(u + config.dt_fast * f +
                                            spec.sigma * noise_increment);
    }
    check_blowup(next, config.dt_fast, config);
    return next;
}

Trajectory simulate(const model::Field& u0, const model::ModelSpec& spec,
                    const SolverConfig& config, const fbm::HilbertPath& noise) {
    spec.validate();
    config.validate();
    if (u0.size() != spec.n_modes) {
        throw std::invalid_argument("simulate: u0 dimension does not match n_modes");
    }
    if (noise.n_modes() != static_cast<std::size_t>(spec.n_modes)) {
        throw std::invalid_argument("simulate: noise modes do not match n_modes");
    }
    const std::size_t n = config.n_steps();
    const std::size_t stride_noise = noise_stride(noise, config);
    if (noise.n_steps() * stride_noise < n) {
        throw std::invalid_argument("simulate: noise path shorter than t_end");
    }
    if (n % static_cast<std::size_t>(config.store_stride) != 0) {
        throw std::invalid_argument("simulate: store_stride must divide the step count");
    }

    const StepCoefficients coeffs = step_coefficients(spec, config.dt_fast);
    const auto tables = model::collocation(spec);
    const std::size_t n_stored = n / config.store_stride + 1;

    Trajectory traj;
    traj.dt_store = config.dt_fast * config.store_stride;
    traj.times.resize(n_stored);
    traj.states.resize(n_stored, spec.n_modes);
    traj.times[0] = 0.0;
    traj.states.row(0) = u0;

    model::Field u = u0;
    Eigen::VectorXd grid(tables->n_grid());
    Eigen::VectorXd f(spec.n_modes);
    Eigen::VectorXd dw = Eigen::VectorXd::Zero(spec.n_modes);
    for (std::size_t i = 0; i < n; ++i) {
        // Left-point rule: the full increment of the coarse noise interval is
        // applied on its first substep.
        if (i % stride_noise == 0) {
            const auto row = static_cast<Eigen::Index>(i / stride_noise);
            dw = (noise.values.row(row + 1) - noise.values.row(row)).transpose();
        } else {
            dw.setZero();
        }
        grid.noalias() = tables->synth * u;
        grid = grid.array().cube();
        f.noalias() = -tables->quad_weight * (tables->synth.transpose() * grid);
        if (config.scheme == Scheme::exponential_euler) {
            u = coeffs.exp_lin.cwiseProduct(u) + coeffs.phi1_h.cwiseProduct(f) +
                spec.sigma * dw;
        } else {
            u = coeffs.semi_inv.cwiseProduct(u + config.dt_fast * f + spec.sigma * dw);
        }
        const double t = static_cast<double>(i + 1) * config.dt_fast;
        check_blowup(u, t, config);
        if ((i + 1) % config.store_stride == 0) {
            const std::size_t s = (i + 1) / config.store_stride;
            traj.times[s] = t;
            traj.states.row(s) = u;
        }
    }
    return traj;
}

Trajectory stochastic_convolution(const fbm::HilbertPath& noise,
                                  const model::ModelSpec& spec,
                                  const SolverConfig& config) {
    spec.validate();
    config.validate();
    if (noise.n_modes() != static_cast<std::size_t>(spec.n_modes)) {
        throw std::invalid_argument("stochastic_convolution: mode count mismatch");
    }
    const std::size_t n = config.n_steps();
    const std::size_t stride_noise = noise_stride(noise, config);
    if (noise.n_steps() * stride_noise < n) {
        throw std::invalid_argument("stochastic_convolution: noise path too short");
    }
    if (n % static_cast<std::size_t>(config.store_stride) != 0) {
        throw std::invalid_argument(
            "stochastic_convolution: store_stride must divide the step count");
    }

    const Eigen::VectorXd alpha = model::eigenvalues(spec);
    const Eigen::VectorXd decay =
        (alpha.array() * config.dt_fast).exp().matrix();
    const std::size_t n_stored = n / config.store_stride + 1;

    Trajectory traj;
    traj.dt_store = config.dt_fast * config.store_stride;
    traj.times.resize(n_stored);
    traj.states.resize(n_stored, spec.n_modes);
    traj.times[0] = 0.0;
    traj.states.row(0).setZero();

    Eigen::VectorXd z = Eigen::VectorXd::Zero(spec.n_modes);
    Eigen::VectorXd dw = Eigen::VectorXd::Zero(spec.n_modes);
    for (std::size_t i = 0; i < n; ++i) {
        if (i % stride_noise == 0) {
            const auto row = static_cast<Eigen::Index>(i / stride_noise);
            dw = (noise.values.row(row + 1) - noise.values.row(row)).transpose();
        } else {
            dw.setZero();
        }
        z = decay.cwiseProduct(z + dw);
        if ((i + 1) % config.store_stride == 0) {
            const std::size_t s = (i + 1) / config.store_stride;
            traj.times[s] = static_cast<double>(i + 1) * config.dt_fast;
            traj.states.row(s) = z;
        }
    }
    return traj;
}

void write_csv(const Trajectory& traj, std::ostream& out) {
    out << "time";
    for (Eigen::Index k = 0; k < traj.states.cols(); ++k) out << ",u" << (k + 1);
    out << "\n";
    char cell[40];
    for (std::size_t i = 0; i < traj.n_stored(); ++i) {
        std::snprintf(cell, sizeof(cell), "%.17g", traj.times[i]);
        out << cell;
        for (Eigen::Index k = 0; k < traj.states.cols(); ++k) {
            std::snprintf(cell, sizeof(cell), ",%.17g",
                          traj.states(static_cast<Eigen::Index>(i), k));
            out << cell;
        }
        out << "\n";
    }
}

void write_sidecar(const model::ModelSpec& spec, const SolverConfig& config,
                   std::uint64_t seed, std::ostream& out) {
    nlohmann::ordered_json j;
    j["model"] = {{"n_modes", spec.n_modes},
                  {"nu", spec.nu},
                  {"sigma", spec.sigma},
                  {"hurst", spec.hurst},
                  {"mode_weights", spec.weights_or_default()},
                  {"collocation_factor", spec.collocation_factor}};
    j["solver"] = {{"dt_fast", config.dt_fast},
                   {"t_end", config.t_end},
                   {"scheme", config.scheme == Scheme::exponential_euler
                                  ? "exponential_euler"
                                  : "semi_implicit"},
                   {"store_stride", config.store_stride},
                   {"blowup_guard", config.blowup_guard}};
    j["seed"] = seed;
    out << j.dump(2) << "\n";
}

}  // namespace fracftle::solver
