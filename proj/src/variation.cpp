#include "fracftle/variation.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fracftle::variation {

model::Field step_variation(const model::Field& v, const model::Field& u_now,
                            const model::ModelSpec& spec,
                            const solver::SolverConfig& config) {
    const solver::StepCoefficients coeffs =
        solver::step_coefficients(spec, config.dt_fast);
    const model::Field dfv = model::jacobian_apply(u_now, v, spec);
    return coeffs.exp_lin.cwiseProduct(v) + coeffs.phi1_h.cwiseProduct(dfv);
}

namespace {

std::vector<Propagator> integrate(const solver::Trajectory& u_traj,
                                  const model::ModelSpec& spec,
                                  const solver::SolverConfig& config,
                                  const std::vector<double>& snapshot_times) {
    spec.validate();
    config.validate();
    if (snapshot_times.empty()) {
        throw std::invalid_argument("propagator: no snapshot times");
    }
    for (std::size_t i = 0; i < snapshot_times.size(); ++i) {
        if (!(snapshot_times[i] >= 0.0) ||
            (i > 0 && snapshot_times[i] <= snapshot_times[i - 1])) {
            throw std::invalid_argument("propagator: times must be increasing and >= 0");
        }
    }
    const double h = config.dt_fast;
    const double t_final = snapshot_times.back();
    const auto n_steps = static_cast<std::size_t>(std::llround(t_final / h));
    if (std::abs(static_cast<double>(n_steps) * h - t_final) > 1e-6 * std::max(1.0, t_final)) {
        throw std::invalid_argument("propagator: snapshot time not on the step grid");
    }
    if (t_final > u_traj.duration() + 1e-9) {
        std::ostringstream msg;
        msg << "propagator: trajectory covers [0," << u_traj.duration()
            << "] but t = " << t_final << " requested";
        throw std::invalid_argument(msg.str());
    }
    const auto stride = static_cast<std::size_t>(config.store_stride);

    const solver::StepCoefficients coeffs = solver::step_coefficients(spec, h);
    const auto tables = model::collocation(spec);
    const Eigen::Index n = spec.n_modes;
    const Eigen::Index m = tables->n_grid();

    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd dfv(n, n), scratch(m, n);
    Eigen::VectorXd u_grid_sq(m);
    std::vector<Propagator> out;
    out.reserve(snapshot_times.size());

    std::size_t next_snap = 0;
    auto take_snapshots_at = [&](std::size_t step_index) {
        const double t = static_cast<double>(step_index) * h;
        while (next_snap < snapshot_times.size() &&
               snapshot_times[next_snap] <= t + 1e-9 * std::max(1.0, t)) {
            out.push_back(Propagator{v, snapshot_times[next_snap]});
            ++next_snap;
        }
    };

    take_snapshots_at(0);
    std::size_t frozen_index = static_cast<std::size_t>(-1);
    for (std::size_t i = 0; i < n_steps; ++i) {
        const std::size_t store_index = i / stride;  // u frozen within a stride
        if (store_index != frozen_index) {
            frozen_index = store_index;
            u_grid_sq.noalias() =
                tables->synth * u_traj.states.row(store_index).transpose();
            u_grid_sq = u_grid_sq.array().square();
        }
        scratch.noalias() = tables->synth * v;
        scratch.array().colwise() *= -3.0 * u_grid_sq.array();
        dfv.noalias() = tables->quad_weight * (tables->synth.transpose() * scratch);
        v = coeffs.exp_lin.asDiagonal() * v + coeffs.phi1_h.asDiagonal() * dfv;
        take_snapshots_at(i + 1);
    }
    if (next_snap != snapshot_times.size()) {
        throw std::logic_error("propagator: snapshot times not exhausted");
    }
    return out;
}

}  // namespace

Propagator propagator(const solver::Trajectory& u_traj, const model::ModelSpec& spec,
                      const solver::SolverConfig& config, double t_end) {
    if (t_end == 0.0) {
        return Propagator{Eigen::MatrixXd::Identity(spec.n_modes, spec.n_modes), 0.0};
    }
    return integrate(u_traj, spec, config, {t_end}).front();
}

Propagator propagator(const solver::Trajectory& u_traj, const model::ModelSpec& spec,
                      const solver::SolverConfig& config) {
    return propagator(u_traj, spec, config, u_traj.duration());
}

std::vector<Propagator> propagator_snapshots(const solver::Trajectory& u_traj,
                                             const model::ModelSpec& spec,
                                             const solver::SolverConfig& config,
                                             const std::vector<double>& times) {
    return integrate(u_traj, spec, config, times);
}

double ftle(const Propagator& p) {
    if (!(p.time > 0.0)) throw std::invalid_argument("ftle: propagator time must be > 0");
    if (!p.matrix.allFinite()) {
        throw std::runtime_error("ftle: propagator contains non-finite entries");
    }
    const double sigma_max =
        Eigen::JacobiSVD<Eigen::MatrixXd>(p.matrix).singularValues()(0);
    if (!(sigma_max > 0.0)) {
        throw std::runtime_error("ftle: largest singular value is not positive");
    }
    return std::log(sigma_max) / p.time;
}

void write_csv(const Propagator& p, std::ostream& out) {
    char cell[40];
    std::snprintf(cell, sizeof(cell), "%.17g", p.time);
    out << "# time," << cell << "\n";
    if (p.time > 0.0) {
        std::snprintf(cell, sizeof(cell), "%.17g", ftle(p));
        out << "# ftle," << cell << "\n";
    }
    for (Eigen::Index i = 0; i < p.matrix.rows(); ++i) {
        for (Eigen::Index j = 0; j < p.matrix.cols(); ++j) {
            std::snprintf(cell, sizeof(cell), "%.17g", p.matrix(i, j));
            out << (j == 0 ? "" : ",") << cell;
        }
        out << "\n";
    }
}

}  // namespace fracftle::variation
