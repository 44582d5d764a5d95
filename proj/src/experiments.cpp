#include "biphoton/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "biphoton/analysis.hpp"
#include "biphoton/errors.hpp"
#include "biphoton/io.hpp"
#include "biphoton/version.hpp"

namespace biphoton {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::string hash_hex(uint64_t h) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

CsvMeta make_meta(const ExperimentConfig& config) {
    return {std::string("tool: ") + kToolName + " " + kToolVersion,
            "config_hash: " + hash_hex(config.config_hash())};
}

void ensure_dir(const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + out_dir + ": " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

} // namespace

PointResult simulate_point(const ExperimentConfig& config, double waist_w0) {
    PointResult point;
    point.waist_w0 = waist_w0;
    const double b = config.crystal_b();
    point.birth_zone_n = birth_zone_number(waist_w0, b);
    point.schmidt_k = schmidt_number(point.birth_zone_n);

    const BiphotonState state = config.make_state(waist_w0);
    const Field2D slit_field = momentum_to_slit_plane(state, config.slit_grid(), config.optics);
    point.bridge = theta_phi_from_field(slit_field, config.slits);
    point.predicted = visibilities_from_theta(point.bridge.theta, config.pump.phase_phi);

    const Field2D apertured = apply_double_slit(slit_field, config.slits);
    const Field2D detector =
        propagate_to_detector(apertured, config.optics, config.detector_grid(), config.slits);
    point.jpd = detector_jpd(detector);

    const double spacing = point.jpd.axis.spacing();
    point.marginal = marginal_from_jpd(point.jpd.p, spacing);
    point.correlation = correlation_from_jpd(point.jpd.p, spacing);
    point.correlation_paired = correlation_paired_from_jpd(point.jpd.p, spacing);
    return point;
}

VisibilityFits fit_profiles(const FringeProfile& marginal, const FringeProfile& correlation,
                            const FringeProfile& correlation_paired,
                            const FringeGeometry& geometry, const FitOptions& options) {
    VisibilityFits fits;
    fits.marginal = fit_fringes(center_profile(marginal), geometry, options);
    fits.correlation = fit_fringes(center_profile(correlation), geometry, options);
    fits.correlation_paired = fit_fringes(center_profile(correlation_paired), geometry, options);
    if (!fits.marginal.converged || !fits.correlation.converged ||
        !fits.correlation_paired.converged)
        throw ValidationError("fit_profiles: a visibility fit did not converge");

    fits.v_m = std::abs(fits.marginal.params.visibility);
    fits.v_m_sigma = fits.marginal.sigma_visibility();
    fits.v_12 = std::abs(fits.correlation.params.visibility) -
                std::abs(fits.correlation_paired.params.visibility);
    fits.v_12_sigma = std::hypot(fits.correlation.sigma_visibility(),
                                 fits.correlation_paired.sigma_visibility());
    fits.circle = complementarity(fits.v_m, fits.v_m_sigma, fits.v_12, fits.v_12_sigma);
    return fits;
}

std::string classify_regime(double v_m, const SweepConfig& sweep) {
    if (v_m > sweep.regime_high) return "I";
    if (v_m < sweep.regime_low) return "III";
    return "II";
}

void run_analytic(const ExperimentConfig& config, const std::string& out_dir) {
    config.validate();
    ensure_dir(out_dir);
    const CsvMeta meta = make_meta(config);

    {
        std::ostringstream out;
        for (const auto& line : meta) out << "# " << line << "\n";
        out << "theta,v_minus,v_plus,v_m,v_12,vm2_plus_v122\n";
        const int steps = 180;
        for (int i = 0; i <= steps; ++i) {
            const double theta = (std::numbers::pi / 2.0) * i / steps;
            const Visibilities v = visibilities_from_theta(theta, config.pump.phase_phi);
            out << format_double(theta) << "," << format_double(v.v_minus) << ","
                << format_double(v.v_plus) << "," << format_double(v.v_m) << ","
                << format_double(v.v_12) << "," << format_double(v.v_m * v.v_m + v.v_12 * v.v_12)
                << "\n";
        }
        write_text_file(join(out_dir, "analytic_visibilities.csv"), out.str());
    }

    const double k = 2.0 * std::numbers::pi / config.optics.signal_wavelength;
    const int n = 64;
    const double extent = config.grids.det_extent;
    for (double theta : {0.0, std::numbers::pi / 8.0, std::numbers::pi / 4.0}) {
        SlitQubitState state{theta, config.pump.phase_phi};
        Eigen::MatrixXd g2(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const double x1 = (i - 0.5 * (n - 1)) * extent / n;
                const double x2 = (j - 0.5 * (n - 1)) * extent / n;
                g2(i, j) = g2_pattern(x1, x2, state, k, config.slits.half_separation,
                                      config.optics.f);
            }
        std::ostringstream name;
        name << "g2_theta_" << format_double(theta / std::numbers::pi) << "pi.csv";
        write_matrix_csv(join(out_dir, name.str()), g2, extent / n, extent / n, meta);
    }
}

namespace {

void write_point_files(const ExperimentConfig& config, const PointResult& point,
                       const std::string& out_dir) {
    const CsvMeta meta = make_meta(config);
    if (config.output.write_bpf2)
        write_bpf2(join(out_dir, "jpd.bpf2"), point.jpd.p, point.jpd.axis.spacing(),
                   point.jpd.axis.spacing());
    if (config.output.write_csv) {
        write_matrix_csv(join(out_dir, "jpd.csv"), point.jpd.p, point.jpd.axis.spacing(),
                         point.jpd.axis.spacing(), meta);
        write_profile_csv(join(out_dir, "marginal.csv"), point.marginal, meta);
        write_profile_csv(join(out_dir, "correlation.csv"), point.correlation, meta);
        write_profile_csv(join(out_dir, "correlation_paired.csv"), point.correlation_paired,
                          meta);
    }

    ordered_json summary;
    summary["tool"] = std::string(kToolName) + " " + kToolVersion;
    summary["config_hash"] = hash_hex(config.config_hash());
    summary["w0"] = point.waist_w0;
    summary["birth_zone_n"] = point.birth_zone_n;
    summary["schmidt_k"] = point.schmidt_k;
    summary["bridge_theta"] = point.bridge.theta;
    summary["bridge_phi"] = point.bridge.phi;
    summary["predicted_v_minus"] = point.predicted.v_minus;
    summary["predicted_v_plus"] = point.predicted.v_plus;
    summary["predicted_v_m"] = point.predicted.v_m;
    summary["predicted_v_12"] = point.predicted.v_12;
    write_text_file(join(out_dir, "point_summary.json"), summary.dump(2) + "\n");
}

} // namespace

PointResult run_simulate(const ExperimentConfig& config, const std::string& out_dir) {
    config.validate();
    ensure_dir(out_dir);
    PointResult point = simulate_point(config, config.pump.waist_w0);
    write_point_files(config, point, out_dir);
    return point;
}

std::string run_frames(const ExperimentConfig& config, const std::string& out_dir) {
    config.validate();
    ensure_dir(out_dir);
    const PointResult point = simulate_point(config, config.pump.waist_w0);
    const PixelPairDistribution dist =
        pixelate_jpd(point.jpd, config.acquisition.nx, config.acquisition.pixel_pitch);
    const FrameSynthesizer synth(dist, config.acquisition);

    const std::string path = join(out_dir, "frames.bpfs");
    BpfsWriter writer(path, config.acquisition);
    std::vector<uint16_t> frame(static_cast<size_t>(config.acquisition.nx) *
                                static_cast<size_t>(config.acquisition.ny));
    for (int f = 0; f < config.acquisition.frames; ++f) {
        synth.synthesize(f, frame);
        writer.write_frame(frame);
    }
    writer.close();
    return path;
}

EstimateResult run_estimate(const std::string& stack_path, const std::string& out_dir,
                            const ExperimentConfig& config) {
    ensure_dir(out_dir);
    BpfsReader reader(stack_path);
    JpdAccumulator acc(reader.params().nx, reader.params().ny);
    std::vector<uint16_t> frame(static_cast<size_t>(reader.params().nx) *
                                static_cast<size_t>(reader.params().ny));
    for (int f = 0; f < reader.frames(); ++f) {
        reader.read_frame(frame);
        acc.add_frame(frame);
    }

    EstimateResult result;
    result.pixel_pitch = reader.params().pixel_pitch;
    result.jpd = acc.jpd_2d();
    result.marginal = acc.marginal(result.pixel_pitch);
    result.correlation = acc.correlation(result.pixel_pitch);
    result.correlation_paired = acc.correlation_paired(result.pixel_pitch);
    result.intensity = acc.intensity(result.pixel_pitch);

    const CsvMeta meta = make_meta(config);
    if (config.output.write_bpf2)
        write_bpf2(join(out_dir, "estimated_jpd.bpf2"), result.jpd, result.pixel_pitch,
                   result.pixel_pitch);
    if (config.output.write_csv) {
        write_matrix_csv(join(out_dir, "estimated_jpd.csv"), result.jpd, result.pixel_pitch,
                         result.pixel_pitch, meta);
        write_profile_csv(join(out_dir, "marginal.csv"), result.marginal, meta);
        write_profile_csv(join(out_dir, "correlation.csv"), result.correlation, meta);
        write_profile_csv(join(out_dir, "correlation_paired.csv"), result.correlation_paired,
                          meta);
        write_profile_csv(join(out_dir, "intensity.csv"), result.intensity, meta);
    }
    return result;
}

std::string fit_result_to_json(const FitResult& fit, uint64_t config_hash) {
    ordered_json j;
    j["tool"] = std::string(kToolName) + " " + kToolVersion;
    j["config_hash"] = hash_hex(config_hash);
    j["amplitude"] = fit.params.amplitude;
    j["visibility"] = fit.params.visibility;
    j["offset"] = fit.params.offset;
    j["raw_visibility"] = fit.raw_visibility;
    j["visibility_clamped"] = fit.visibility_clamped;
    j["sigma_amplitude"] = fit.sigma_amplitude();
    j["sigma_visibility"] = fit.sigma_visibility();
    j["sigma_offset"] = fit.sigma_offset();
    j["rms_residual"] = fit.rms_residual;
    j["converged"] = fit.converged;
    j["iterations"] = fit.iterations;
    j["geometry"] = {{"opening_a", fit.params.geometry.opening_a},
                     {"separation_d", fit.params.geometry.separation_d},
                     {"focal_f", fit.params.geometry.focal_f},
                     {"wavelength", fit.params.geometry.wavelength}};
    ordered_json cov = ordered_json::array();
    for (int r = 0; r < 3; ++r) {
        ordered_json row = ordered_json::array();
        for (int c = 0; c < 3; ++c) row.push_back(fit.covariance(r, c));
        cov.push_back(row);
    }
    j["covariance"] = cov;
    return j.dump(2) + "\n";
}

FitResult fit_result_from_json(const std::string& json_text) {
    const auto j = nlohmann::json::parse(json_text);
    FitResult fit;
    fit.params.amplitude = j.at("amplitude").get<double>();
    fit.params.visibility = j.at("visibility").get<double>();
    fit.params.offset = j.at("offset").get<double>();
    fit.raw_visibility = j.at("raw_visibility").get<double>();
    fit.visibility_clamped = j.at("visibility_clamped").get<bool>();
    fit.rms_residual = j.at("rms_residual").get<double>();
    fit.converged = j.at("converged").get<bool>();
    fit.iterations = j.at("iterations").get<int>();
    fit.params.geometry.opening_a = j.at("geometry").at("opening_a").get<double>();
    fit.params.geometry.separation_d = j.at("geometry").at("separation_d").get<double>();
    fit.params.geometry.focal_f = j.at("geometry").at("focal_f").get<double>();
    fit.params.geometry.wavelength = j.at("geometry").at("wavelength").get<double>();
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            fit.covariance(r, c) = j.at("covariance").at(r).at(c).get<double>();
    return fit;
}

FitResult run_fit(const std::string& profile_path, const ExperimentConfig& config,
                  const std::string& out_dir) {
    config.validate();
    ensure_dir(out_dir);
    const FringeProfile profile = center_profile(read_profile_csv(profile_path));
    const FitResult fit = fit_fringes(profile, config.fit_geometry(), config.fit);
    write_text_file(join(out_dir, "fit.json"), fit_result_to_json(fit, config.config_hash()));
    return fit;
}

std::vector<SweepRecord> run_sweep(const ExperimentConfig& config, const std::string& out_dir) {
    config.validate();
    if (config.sweep.w0_list.size() < 4)
        throw ConfigError("pump.w0_list: a sweep needs at least 4 waist values");
    ensure_dir(out_dir);

    std::vector<double> waists = config.sweep.w0_list;
    std::sort(waists.begin(), waists.end());

    const double b = config.crystal_b();
    if (waists.front() / b > 2.0 + 1e-9 || waists.back() / b < 30.0 - 1e-9)
        throw ConfigError(
            "pump.w0_list: the sweep must span birth zone numbers from <= 2 up to >= 30 "
            "to cover all three regimes");

    std::vector<SweepRecord> records;
    records.reserve(waists.size());
    for (double w0 : waists) {
        PointResult point;
        VisibilityFits fits;
        try {
            if (config.sweep.monte_carlo) {
                point = simulate_point(config, w0);
                const PixelPairDistribution dist = pixelate_jpd(
                    point.jpd, config.acquisition.nx, config.acquisition.pixel_pitch);
                const FrameSynthesizer synth(dist, config.acquisition);
                JpdAccumulator acc(config.acquisition.nx, config.acquisition.ny);
                std::vector<uint16_t> frame(static_cast<size_t>(config.acquisition.nx) *
                                            static_cast<size_t>(config.acquisition.ny));
                for (int f = 0; f < config.acquisition.frames; ++f) {
                    synth.synthesize(f, frame);
                    acc.add_frame(frame);
                }
                const double pitch = config.acquisition.pixel_pitch;
                fits = fit_profiles(acc.marginal(pitch), acc.correlation(pitch),
                                    acc.correlation_paired(pitch), config.fit_geometry(),
                                    config.fit);
            } else {
                point = simulate_point(config, w0);
                fits = fit_profiles(point.marginal, point.correlation, point.correlation_paired,
                                    config.fit_geometry(), config.fit);
            }
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << "sweep point w0 = " << format_double(w0) << " failed: " << e.what()
                << "\nconfig:\n"
                << config.canonical_text();
            throw ValidationError(msg.str());
        }

        SweepRecord rec;
        rec.waist_w0 = w0;
        rec.birth_zone_n = point.birth_zone_n;
        rec.schmidt_k = point.schmidt_k;
        rec.theta = point.bridge.theta;
        rec.phi = point.bridge.phi;
        rec.v_m = fits.v_m;
        rec.v_m_sigma = fits.v_m_sigma;
        rec.v_12 = fits.v_12;
        rec.v_12_sigma = fits.v_12_sigma;
        rec.v_minus = std::abs(fits.correlation.params.visibility);
        rec.v_plus = std::abs(fits.correlation_paired.params.visibility);
        rec.circle_value = fits.circle.value;
        rec.circle_sigma = fits.circle.sigma;
        rec.regime = classify_regime(rec.v_m, config.sweep);
        records.push_back(rec);
    }

    const CsvMeta meta = make_meta(config);
    {
        std::ostringstream out;
        for (const auto& line : meta) out << "# " << line << "\n";
        out << "w0_m,birth_zone_n,schmidt_k,theta,phi,v_m,v_m_sigma,v_12,v_12_sigma,"
               "v_minus,v_plus,vm2_plus_v122,circle_sigma,regime\n";
        for (const auto& r : records) {
            out << format_double(r.waist_w0) << "," << format_double(r.birth_zone_n) << ","
                << format_double(r.schmidt_k) << "," << format_double(r.theta) << ","
                << format_double(r.phi) << "," << format_double(r.v_m) << ","
                << format_double(r.v_m_sigma) << "," << format_double(r.v_12) << ","
                << format_double(r.v_12_sigma) << "," << format_double(r.v_minus) << ","
                << format_double(r.v_plus) << "," << format_double(r.circle_value) << ","
                << format_double(r.circle_sigma) << "," << r.regime << "\n";
        }
        write_text_file(join(out_dir, "sweep_records.csv"), out.str());
    }
    {
        std::ostringstream out;
        for (const auto& line : meta) out << "# " << line << "\n";
        out << "v_m,v_12,vm2_plus_v122,predicted_v_m,predicted_v_12\n";
        for (const auto& r : records) {
            const Visibilities pred = visibilities_from_theta(r.theta, config.pump.phase_phi);
            out << format_double(r.v_m) << "," << format_double(r.v_12) << ","
                << format_double(r.circle_value) << "," << format_double(pred.v_m) << ","
                << format_double(pred.v_12) << "\n";
        }
        write_text_file(join(out_dir, "complementarity_circle.csv"), out.str());
    }
    {
        ordered_json j;
        j["tool"] = std::string(kToolName) + " " + kToolVersion;
        j["config_hash"] = hash_hex(config.config_hash());
        ordered_json points = ordered_json::array();
        for (const auto& r : records) {
            ordered_json p;
            p["w0"] = r.waist_w0;
            p["birth_zone_n"] = r.birth_zone_n;
            p["v_m"] = r.v_m;
            p["v_12"] = r.v_12;
            p["regime"] = r.regime;
            points.push_back(p);
        }
        j["points"] = points;
        write_text_file(join(out_dir, "sweep_summary.json"), j.dump(2) + "\n");
    }
    return records;
}

} // namespace biphoton
