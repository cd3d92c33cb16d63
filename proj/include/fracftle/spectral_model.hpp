#pragma once

#include <Eigen/Core>
#include <iosfwd>
#include <memory>
#include <vector>

// Concrete instance of the abstract bifurcation setting: A = d^2/dx^2 + 1 on
// (0,pi) with Dirichlet boundary, eigenbasis e_k(x) = sqrt(2/pi) sin(kx),
// eigenvalues alpha_k = 1 - k^2 (so the kernel is span{e_1} and the spectral
// gap is 3), and the stable cubic F(u) = -u^3 evaluated by dealiased sine
// collocation.

namespace fracftle::model {

using Field = Eigen::VectorXd;  // coefficients u_1..u_N in the eigenbasis

struct ModelSpec {
    int n_modes = 64;
    double nu = 0.0;
    double sigma = 0.0;
    double hurst = 0.5;
    std::vector<double> mode_weights;   // defaults to k^{-2} when empty
    int collocation_factor = 4;         // grid M = factor * N; >= 3 dealiases a cubic

    void validate() const;
    std::vector<double> weights_or_default() const;
};

/// alpha_k = 1 - k^2 for 1 <= k <= n_modes (1-based).
double eigenvalue(int k, const ModelSpec& spec);
Eigen::VectorXd eigenvalues(const ModelSpec& spec);

double project_kernel(const Field& u);
Field project_stable(const Field& u);

/// Sine collocation tables for an N-mode field on an M-point interior grid.
struct Collocation {
    Eigen::MatrixXd synth;  // M x N, synth(j,k) = e_{k+1}(x_j)
    Eigen::VectorXd x;      // grid points x_j = (j+1) pi / (M+1)
    double quad_weight;     // pi / (M+1); exact for sine bands <= M

    Eigen::Index n_grid() const { return synth.rows(); }
    Eigen::Index n_modes() const { return synth.cols(); }
};

/// Shared, cached table for (n_modes, n_grid).
std::shared_ptr<const Collocation> collocation(int n_modes, int n_grid);
std::shared_ptr<const Collocation> collocation(const ModelSpec& spec);

/// Spectral coefficients of F(u) = -u^3 (cube on the collocation grid,
/// transform back, truncate to N modes).
Field nonlinearity(const Field& u, const ModelSpec& spec);

/// DF(u)h = -3 u^2 h through the same collocation pipeline.
Field jacobian_apply(const Field& u, const Field& h, const ModelSpec& spec);

/// Columns of DF(u) applied to every column of V at once (hot path of the
/// propagator integration). u_grid_sq is the precomputed grid vector u(x)^2.
void jacobian_apply_matrix(const Eigen::VectorXd& u_grid_sq,
                           const Eigen::MatrixXd& V, const Collocation& tables,
                           Eigen::MatrixXd& out, Eigen::MatrixXd& scratch);

/// c_F = integral of e_1^4 = 3/(2 pi), computed once by quadrature and cached.
double fc_coefficient();

/// Amplitude drift F_c(b) = -c_cubic b^3 and its derivative.
double fc(double b, double c_cubic);
double dfc(double b, double c_cubic);

/// L2 norm by Parseval.
double field_norm(const Field& u);
/// ||u||_{L4}^4 by quadrature on a 2M-point grid (alias-free for quartics).
double field_l4_norm_pow4(const Field& u, const ModelSpec& spec);

/// Pointwise values of u on an n_points interior grid (plotting/inspection).
Eigen::VectorXd field_on_grid(const Field& u, int n_points);

void write_csv(const Field& u, std::ostream& out);

}  // namespace fracftle::model
