#include "fracftle/spectral_model.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "fracftle/fbm.hpp"

namespace fracftle::model {

namespace {
constexpr double kPi = std::numbers::pi;
}

void ModelSpec::validate() const {
    if (n_modes < 1) throw std::invalid_argument("ModelSpec: n_modes must be >= 1");
    if (!(hurst > 0.0 && hurst < 1.0)) {
        throw std::invalid_argument("ModelSpec: hurst must lie in (0,1)");
    }
    if (sigma < 0.0) throw std::invalid_argument("ModelSpec: sigma must be nonnegative");
    if (collocation_factor < 3) {
        throw std::invalid_argument(
            "ModelSpec: collocation_factor must be >= 3 to dealias the cubic");
    }
    if (!mode_weights.empty() &&
        mode_weights.size() != static_cast<std::size_t>(n_modes)) {
        throw std::invalid_argument("ModelSpec: mode_weights size mismatch");
    }
    for (double q : mode_weights) {
        if (!(q > 0.0)) {
            throw std::invalid_argument("ModelSpec: mode weights must be positive");
        }
    }
}

std::vector<double> ModelSpec::weights_or_default() const {
    if (!mode_weights.empty()) return mode_weights;
    return fbm::default_mode_weights(static_cast<std::size_t>(n_modes));
}

double eigenvalue(int k, const ModelSpec& spec) {
    if (k < 1 || k > spec.n_modes) {
        throw std::out_of_range("eigenvalue: mode index out of range");
    }
    return 1.0 - static_cast<double>(k) * static_cast<double>(k);
}

Eigen::VectorXd eigenvalues(const ModelSpec& spec) {
    Eigen::VectorXd alpha(spec.n_modes);
    for (int k = 1; k <= spec.n_modes; ++k) alpha(k - 1) = eigenvalue(k, spec);
    return alpha;
}

double project_kernel(const Field& u) {
    if (u.size() < 1) throw std::invalid_argument("project_kernel: empty field");
    return u(0);
}

Field project_stable(const Field& u) {
    Field v = u;
    if (v.size() < 1) throw std::invalid_argument("project_stable: empty field");
    v(0) = 0.0;
    return v;
}

std::shared_ptr<const Collocation> collocation(int n_modes, int n_grid) {
    using Key = std::pair<int, int>;
    static std::map<Key, std::shared_ptr<const Collocation>> cache;
    static std::mutex cache_mutex;
    std::lock_guard<std::mutex> lock(cache_mutex);
    const Key key{n_modes, n_grid};
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    auto tables = std::make_shared<Collocation>();
    tables->synth.resize(n_grid, n_modes);
    tables->x.resize(n_grid);
    const double step = kPi / static_cast<double>(n_grid + 1);
    const double norm = std::sqrt(2.0 / kPi);
    for (int j = 0; j < n_grid; ++j) {
        const double xj = static_cast<double>(j + 1) * step;
        tables->x(j) = xj;
        for (int k = 1; k <= n_modes; ++k) {
            tables->synth(j, k - 1) = norm * std::sin(static_cast<double>(k) * xj);
        }
    }
    tables->quad_weight = step;
    cache.emplace(key, tables);
    return tables;
}

std::shared_ptr<const Collocation> collocation(const ModelSpec& spec) {
    return collocation(spec.n_modes, spec.n_modes * spec.collocation_factor);
}

Field nonlinearity(const Field& u, const ModelSpec& spec) {
    const auto tables = collocation(spec);
    const Eigen::VectorXd g = tables->synth * u;
    const Eigen::VectorXd cubed = g.array().cube();
    return -tables->quad_weight * (tables->synth.transpose() * cubed);
}

Field jacobian_apply(const Field& u, const Field& h, const ModelSpec& spec) {
    const auto tables = collocation(spec);
    const Eigen::VectorXd gu = tables->synth * u;
    const Eigen::VectorXd gh = tables->synth * h;
    const Eigen::VectorXd prod = -3.0 * gu.array().square() * gh.array();
    return tables->quad_weight * (tables->synth.transpose() * prod);
}

void jacobian_apply_matrix(const Eigen::VectorXd& u_grid_sq,
                           const Eigen::MatrixXd& V, const Collocation& tables,
                           Eigen::MatrixXd& out, Eigen::MatrixXd& scratch) {
    scratch.noalias() = tables.synth * V;
    scratch.array().colwise() *= -3.0 * u_grid_sq.array();
    out.noalias() = tables.quad_weight * (tables.synth.transpose() * scratch);
}

double fc_coefficient() {
    // integral of e_1(x)^4 over (0,pi) by composite Simpson; equals 3/(2 pi).
    static const double value = [] {
        const int n = 1 << 14;
        const double h = kPi / n;
        const double norm_sq = 2.0 / kPi;
        auto f = [&](double x) {
            const double s = std::sin(x);
            return norm_sq * norm_sq * s * s * s * s;
        };
        double acc = f(0.0) + f(kPi);
        for (int i = 1; i < n; ++i) acc += f(i * h) * ((i % 2 == 1) ? 4.0 : 2.0);
        return acc * h / 3.0;
    }();
    return value;
}

double fc(double b, double c_cubic) { return -c_cubic * b * b * b; }

double dfc(double b, double c_cubic) { return -3.0 * c_cubic * b * b; }

double field_norm(const Field& u) { return u.norm(); }

double field_l4_norm_pow4(const Field& u, const ModelSpec& spec) {
    const int fine = 2 * spec.n_modes * spec.collocation_factor;
    const auto tables = collocation(spec.n_modes, fine);
    const Eigen::VectorXd g = tables->synth * u;
    return tables->quad_weight * g.array().square().square().sum();
}

Eigen::VectorXd field_on_grid(const Field& u, int n_points) {
    if (n_points < 1) throw std::invalid_argument("field_on_grid: n_points must be >= 1");
    const auto tables = collocation(static_cast<int>(u.size()), n_points);
    return tables->synth * u;
}

void write_csv(const Field& u, std::ostream& out) {
    out << "mode,coefficient\n";
    char line[48];
    for (Eigen::Index k = 0; k < u.size(); ++k) {
        std::snprintf(line, sizeof(line), "%lld,%.17g\n",
                      static_cast<long long>(k + 1), u(k));
        out << line;
    }
}

}  // namespace fracftle::model
