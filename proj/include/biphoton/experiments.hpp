#ifndef BIPHOTON_EXPERIMENTS_HPP
#define BIPHOTON_EXPERIMENTS_HPP

// Configuration-driven drivers behind the CLI subcommands. Every driver is
// deterministic for a fixed config: outputs carry no timestamps, only the
// tool version and the config hash.

#include <string>
#include <vector>

#include "biphoton/analytic_model.hpp"
#include "biphoton/config.hpp"
#include "biphoton/estimator.hpp"
#include "biphoton/fringe_fit.hpp"

namespace biphoton {

// One waist through the noiseless pipeline: slit-plane field, two-qubit
// bridge, detector JPD and its three reduced profiles.
struct PointResult {
    double waist_w0 = 0.0;
    double birth_zone_n = 0.0;
    double schmidt_k = 0.0;
    SlitQubitState bridge;
    Visibilities predicted; // from (bridge theta, configured pump phi)
    Jpd2D jpd;
    FringeProfile marginal;
    FringeProfile correlation;
    FringeProfile correlation_paired;
};

PointResult simulate_point(const ExperimentConfig& config, double waist_w0);

// Fits of the three profiles. The two-photon difference visibility is
// V12 = |V-| - |V+| from the anti-diagonal and diagonal correlation fits;
// the paired fringes carry the one-photon contribution that must be
// subtracted out of the coincidence contrast.
struct VisibilityFits {
    FitResult marginal;
    FitResult correlation;
    FitResult correlation_paired;
    double v_m = 0.0;
    double v_m_sigma = 0.0;
    double v_12 = 0.0;
    double v_12_sigma = 0.0;
    ComplementarityResult circle;
};

VisibilityFits fit_profiles(const FringeProfile& marginal, const FringeProfile& correlation,
                            const FringeProfile& correlation_paired,
                            const FringeGeometry& geometry, const FitOptions& options);

struct SweepRecord {
    double waist_w0 = 0.0;
    double birth_zone_n = 0.0;
    double schmidt_k = 0.0;
    double theta = 0.0;
    double phi = 0.0;
    double v_m = 0.0;
    double v_m_sigma = 0.0;
    double v_12 = 0.0;
    double v_12_sigma = 0.0;
    double v_minus = 0.0;
    double v_plus = 0.0;
    double circle_value = 0.0;
    double circle_sigma = 0.0;
    std::string regime; // "I", "II", "III"
};

std::string classify_regime(double v_m, const SweepConfig& sweep);

// Drivers; each writes into out_dir (created if needed) and returns its
// primary result.
void run_analytic(const ExperimentConfig& config, const std::string& out_dir);

PointResult run_simulate(const ExperimentConfig& config, const std::string& out_dir);

std::string run_frames(const ExperimentConfig& config, const std::string& out_dir);

struct EstimateResult {
    double pixel_pitch = 0.0;
    Eigen::MatrixXd jpd;
    FringeProfile marginal;
    FringeProfile correlation;
    FringeProfile correlation_paired;
    FringeProfile intensity;
};

EstimateResult run_estimate(const std::string& stack_path, const std::string& out_dir,
                            const ExperimentConfig& config);

FitResult run_fit(const std::string& profile_path, const ExperimentConfig& config,
                  const std::string& out_dir);

std::vector<SweepRecord> run_sweep(const ExperimentConfig& config, const std::string& out_dir);

// JSON round-trip for fit results.
std::string fit_result_to_json(const FitResult& fit, uint64_t config_hash);
FitResult fit_result_from_json(const std::string& json_text);

} // namespace biphoton

#endif
