#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fracftle/amplitude.hpp"
#include "fracftle/fbm.hpp"
#include "fracftle/spde_solver.hpp"
#include "fracftle/stats.hpp"

// Regime harness reproducing the four stability/instability cases, the
// amplitude-approximation error scaling and the sup-scaling checks, with
// reproducible seeds and Wilson intervals on every probability estimate.

namespace fracftle::experiments {

enum class CaseId { I, II, III, IV, IVShifted };

std::string case_name(CaseId id);
CaseId case_from_name(const std::string& name);

struct RegimeConfig {
    CaseId case_id = CaseId::I;
    double epsilon = 0.2;      // scale parameter for cases II/III (nu = eps^2)
    double nu = -0.5;          // case I (< 0) and IV_shifted (> 0)
    double sigma = 0.1;        // case I noise; case IV noise (drives epsilon)
    double sigma_factor = 0.0; // case III: sigma = factor * nu^{H+1/2}
    double hurst = 0.5;
    double t0_slow = 1.0;      // slow horizon (case I: fast horizon)
    std::size_t replicas = 200;
    std::uint64_t seed = 1;
    int n_modes = 32;
    double dt_fast = 1e-3;
    double dt_slow = 1e-3;
    int threads = 0;
    double b0 = 0.1;           // kernel-mode initial amplitude (cases II/IV)
    double u0_norm = 0.5;      // case I random initial data norm
    double theta = 0.1;        // occupation threshold (case IV)
    double eta = 0.0;          // 0 = derive default from the Lemma 4.1 bound
    double noise_amp_override = -1.0;  // >=0 overrides the derived AE noise amp
    double confidence = 0.95;
    double tol_dt_factor = 10.0;   // case I: ftle <= nu + factor * dt_fast
    double ftle_tol = 0.02;        // Lemma 4.1: lambda >= 1/4 - tol
    double occupation_tol = 0.1;   // Lemma 4.3: -(c_theta/2)(1 - tol)
    double tol_budget = 0.5;       // case IV SPDE threshold budget fraction
    double c_bound = 1.0;          // reported bound constant (cases II/III)
    bool literal_sigma_pow_h = false;  // case IV: eps = sigma^H instead
    bool amplitude_only = false;       // skip SPDE/propagator work
    std::size_t p_theta_replicas = 2000;
    std::vector<double> ftle_time_fracs = {0.25, 0.5, 1.0};
    int collocation_factor = 4;
    int store_stride = 1;
    double blowup_guard = 1e6;

    void validate() const;
};

void to_json(nlohmann::ordered_json& j, const RegimeConfig& config);
RegimeConfig regime_config_from_json(const nlohmann::json& j);

struct FtleSample {
    double t = 0.0;
    double value = 0.0;
};

struct ReplicaRecord {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    std::vector<FtleSample> ftle_spde;  // fast-time FTLEs
    std::vector<FtleSample> ftle_ae;    // slow-time amplitude FTLEs
    bool a2 = false;                    // Lemma 4.1 noise-smallness event
    bool omega_theta = false;           // Lemma 4.3 occupation event
    double occupation = 0.0;
    double sup_error = 0.0;  // sup ||u - eps b e_1|| where applicable
    double sup_norm = 0.0;   // sup ||u||
};

/// Parameters derived from the config (echoed into reports).
struct DerivedParams {
    double nu = 0.0;
    double sigma = 0.0;
    double epsilon = 0.0;
    double eta = 0.0;
    double a_drift = 0.0;
    double cubic = 1.0;
    double noise_amp = 0.0;
    double c_theta = 0.0;
    double p_hat_theta = 0.0;
    double t_p = 0.0;
    double t_end_fast = 0.0;
    double dt_slow_actual = 0.0;
    double t0_slow_actual = 0.0;
};

struct RegimeReport {
    RegimeConfig config;
    DerivedParams derived;
    std::vector<ReplicaRecord> replicas;
    nlohmann::ordered_json aggregates;
    double wall_clock_sec = 0.0;
};

RegimeReport run_case_I(const RegimeConfig& config);
RegimeReport run_case_II(const RegimeConfig& config);
RegimeReport run_case_III(const RegimeConfig& config);
RegimeReport run_case_IV(const RegimeConfig& config);
RegimeReport run_case_IV_shifted(const RegimeConfig& config);
RegimeReport run_case(const RegimeConfig& config);

nlohmann::ordered_json report_to_json(const RegimeReport& report);
std::string report_to_csv(const RegimeReport& report);

enum class ReportFormat { json, csv };
void write_report(const RegimeReport& report, const std::string& path,
                  ReportFormat format);

struct StudyConfig {
    double hurst = 0.5;
    std::size_t replicas = 20;
    std::uint64_t seed = 1;
    int n_modes = 32;
    double dt_fast = 1e-3;
    double dt_slow = 1e-3;
    double t0_slow = 1.0;
    double b0 = 0.5;
    int threads = 0;
    int collocation_factor = 4;
    double confidence = 0.95;
};

struct ScalingRecord {
    std::vector<double> eps;
    std::vector<double> median_sup_error;
    std::vector<std::vector<double>> sup_errors;  // per eps, per replica
    double slope = 0.0;
};

/// Theorem 5.3 study: per epsilon, median over replicas of
/// sup_{[0,T_eps]} ||u - eps b(eps^2 .)||, then the log-log slope in eps.
ScalingRecord approx_error_study(const std::vector<double>& eps_list, double hurst,
                                 const StudyConfig& config);

struct SupScalingRecord {
    std::vector<double> t_grid;
    std::vector<double> mean_sup_pc;   // E sup_{[0,T]} |P_c W^H|
    std::vector<double> mean_sup_psz;  // E sup_{[0,T]} ||P_s Z||
    double slope_pc = 0.0;
    double slope_psz = 0.0;
};

/// Assumption "P_c Z = O(T^H), P_s Z = O(T^kappa)" scaling check.
SupScalingRecord sup_scaling_check(double hurst, const std::vector<double>& t_grid,
                                   std::size_t replicas, const StudyConfig& config);

nlohmann::ordered_json scaling_to_json(const ScalingRecord& record);
nlohmann::ordered_json sup_scaling_to_json(const SupScalingRecord& record);

/// Wilson interval passthrough (kept here so reports and CLI share one spot).
stats::Interval wilson_interval(std::size_t successes, std::size_t trials,
                                double confidence);

}  // namespace fracftle::experiments
