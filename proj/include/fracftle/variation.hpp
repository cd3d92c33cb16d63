#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <vector>

#include "fracftle/spde_solver.hpp"
#include "fracftle/spectral_model.hpp"

// First variation equation dv = [Av + nu v + DF(u)v]dt along a stored
// trajectory (the additive noise drops out), Galerkin propagator assembly and
// finite-time Lyapunov exponents via the largest singular value.

namespace fracftle::variation {

struct Propagator {
    Eigen::MatrixXd matrix;  // columns = evolved canonical basis fields
    double time = 0.0;
};

/// One exponential-Euler step of the variation equation with u frozen at u_now.
model::Field step_variation(const model::Field& v, const model::Field& u_now,
                            const model::ModelSpec& spec,
                            const solver::SolverConfig& config);

/// Propagator over [0, t_end] (trajectory must cover it); u is held piecewise
/// constant within a store stride.
Propagator propagator(const solver::Trajectory& u_traj, const model::ModelSpec& spec,
                      const solver::SolverConfig& config, double t_end);
Propagator propagator(const solver::Trajectory& u_traj, const model::ModelSpec& spec,
                      const solver::SolverConfig& config);

/// One integration pass, snapshots at the requested times (each snapped to the
/// step grid). Times must be increasing and positive.
std::vector<Propagator> propagator_snapshots(const solver::Trajectory& u_traj,
                                             const model::ModelSpec& spec,
                                             const solver::SolverConfig& config,
                                             const std::vector<double>& times);

/// (1/t) ln(largest singular value) -- the Galerkin operator norm of U_{u0}(t).
double ftle(const Propagator& p);

void write_csv(const Propagator& p, std::ostream& out);

}  // namespace fracftle::variation
