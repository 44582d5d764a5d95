#include "biphoton/fringe_fit.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "biphoton/errors.hpp"

namespace biphoton {

namespace {

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

struct Design {
    Eigen::VectorXd t;
    Eigen::VectorXd y;
    Eigen::VectorXd envelope; // sinc^2 term per point
    Eigen::VectorXd cosine;   // cos term per point
};

Design build_design(const FringeProfile& profile, const FringeGeometry& g) {
    const int n = static_cast<int>(profile.abscissa.size());
    Design d;
    d.t.resize(n);
    d.y.resize(n);
    d.envelope.resize(n);
    d.cosine.resize(n);
    const double fl = g.focal_f * g.wavelength;
    for (int i = 0; i < n; ++i) {
        const double t = profile.abscissa[static_cast<size_t>(i)];
        d.t(i) = t;
        d.y(i) = profile.values[static_cast<size_t>(i)];
        const double s = sinc(std::numbers::pi * g.opening_a * t / fl);
        d.envelope(i) = s * s;
        d.cosine(i) = std::cos(2.0 * std::numbers::pi * g.separation_d * t / fl);
    }
    return d;
}

Eigen::VectorXd residuals(const Design& d, const Eigen::Vector3d& p) {
    return (p(0) * d.envelope.array() * (1.0 + p(1) * d.cosine.array()) + p(2) -
            d.y.array())
        .matrix();
}

Eigen::MatrixXd jacobian(const Design& d, const Eigen::Vector3d& p) {
    Eigen::MatrixXd j(d.t.size(), 3);
    j.col(0) = (d.envelope.array() * (1.0 + p(1) * d.cosine.array())).matrix();
    j.col(1) = (p(0) * d.envelope.array() * d.cosine.array()).matrix();
    j.col(2).setOnes();
    return j;
}

Eigen::Vector3d clamp_params(Eigen::Vector3d p) {
    p(0) = std::max(0.0, p(0));
    p(1) = std::clamp(p(1), 0.0, 1.05);
    return p;
}

} // namespace

void FringeGeometry::validate() const {
    if (!(opening_a > 0.0)) throw ConfigError("fit geometry: opening a must be > 0");
    if (!(separation_d > 0.0)) throw ConfigError("fit geometry: separation d must be > 0");
    if (!(focal_f > 0.0)) throw ConfigError("fit geometry: focal length must be > 0");
    if (!(wavelength > 0.0)) throw ConfigError("fit geometry: wavelength must be > 0");
}

double fringe_model(double t, const FringeModelParams& p) {
    const FringeGeometry& g = p.geometry;
    const double fl = g.focal_f * g.wavelength;
    const double s = sinc(std::numbers::pi * g.opening_a * t / fl);
    return p.amplitude * s * s *
               (1.0 + p.visibility * std::cos(2.0 * std::numbers::pi * g.separation_d * t / fl)) +
           p.offset;
}

FitResult fit_fringes(const FringeProfile& profile, const FringeGeometry& geometry,
                      const FitOptions& options) {
    geometry.validate();
    const size_t n = profile.abscissa.size();
    if (n != profile.values.size() || n < 8)
        throw ValidationError("fit_fringes: profile needs at least 8 matched points");
    for (size_t i = 1; i < n; ++i)
        if (!(profile.abscissa[i] > profile.abscissa[i - 1]))
            throw ValidationError("fit_fringes: abscissa must be strictly increasing");

    const double period = geometry.fringe_period();
    const double span = profile.abscissa.back() - profile.abscissa.front();
    const double step = span / static_cast<double>(n - 1);
    if (period < 3.0 * step) {
        std::ostringstream msg;
        msg << "fit_fringes: " << period / step << " points per fringe period (need >= 3)";
        throw ValidationError(msg.str());
    }
    if (span < 2.0 * period)
        throw ValidationError("fit_fringes: profile spans less than two fringe periods");

    const Design d = build_design(profile, geometry);

    // Start from the profile's extremes plus a single-frequency Fourier probe.
    Eigen::Vector3d p;
    if (options.initial_guess) {
        p(0) = (*options.initial_guess)[0];
        p(1) = (*options.initial_guess)[1];
        p(2) = (*options.initial_guess)[2];
    } else {
        const double ymin = d.y.minCoeff();
        const double ymax = d.y.maxCoeff();
        p(2) = ymin;
        p(0) = std::max(ymax - ymin, 1e-300);
        std::complex<double> z(0.0, 0.0);
        double z0 = 0.0;
        const double fl = geometry.focal_f * geometry.wavelength;
        for (Eigen::Index i = 0; i < d.t.size(); ++i) {
            const double phase = -2.0 * std::numbers::pi * geometry.separation_d * d.t(i) / fl;
            const double centered = d.y(i) - ymin;
            z += centered * std::complex<double>(std::cos(phase), std::sin(phase));
            z0 += centered;
        }
        p(1) = z0 > 0.0 ? std::clamp(2.0 * std::abs(z) / z0, 0.0, 1.0) : 0.5;
    }
    p = clamp_params(p);

    double cost = residuals(d, p).squaredNorm();
    double lambda = 1e-3;
    bool converged = false;
    int iterations = 0;
    for (; iterations < options.max_iterations; ++iterations) {
        const Eigen::VectorXd r = residuals(d, p);
        const Eigen::MatrixXd j = jacobian(d, p);
        const Eigen::Vector3d gradient = j.transpose() * r;
        // Project out directions blocked by the A >= 0 and 0 <= V <= 1.05
        // bounds so an optimum on the boundary still registers.
        Eigen::Vector3d projected = gradient;
        if (p(0) <= 0.0 && projected(0) > 0.0) projected(0) = 0.0;
        if (p(1) <= 0.0 && projected(1) > 0.0) projected(1) = 0.0;
        if (p(1) >= 1.05 && projected(1) < 0.0) projected(1) = 0.0;
        if (projected.lpNorm<Eigen::Infinity>() < options.gradient_tol) {
            converged = true;
            break;
        }
        const Eigen::Matrix3d jtj = j.transpose() * j;

        bool stepped = false;
        for (int attempt = 0; attempt < 32; ++attempt) {
            Eigen::Matrix3d damped = jtj;
            damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-300);
            const Eigen::Vector3d delta = damped.ldlt().solve(-gradient);
            const Eigen::Vector3d trial = clamp_params(p + delta);
            const double trial_cost = residuals(d, trial).squaredNorm();
            if (trial_cost <= cost) {
                const double improvement = cost - trial_cost;
                p = trial;
                const bool small_change = improvement <= options.cost_rel_tol * std::max(cost, 1e-300);
                cost = trial_cost;
                lambda = std::max(lambda / 3.0, 1e-12);
                stepped = true;
                if (small_change) converged = true;
                break;
            }
            lambda *= 2.0;
            if (lambda > 1e14) break;
        }
        if (!stepped) {
            // No damping level yields an improving step: the cost change is
            // zero, i.e. below the relative tolerance; numerically stationary.
            converged = true;
            break;
        }
        if (converged) break;
    }

    FitResult result;
    result.iterations = iterations;
    result.converged = converged;
    result.raw_visibility = p(1);
    result.visibility_clamped = p(1) > 1.0;
    result.params.amplitude = p(0);
    result.params.visibility = std::min(p(1), 1.0);
    result.params.offset = p(2);
    result.params.geometry = geometry;

    const Eigen::VectorXd r = residuals(d, p);
    result.rms_residual = std::sqrt(r.squaredNorm() / static_cast<double>(n));
    const Eigen::Matrix3d jtj = jacobian(d, p).transpose() * jacobian(d, p);
    const Eigen::Matrix3d identity = Eigen::Matrix3d::Identity();
    const Eigen::Matrix3d inv = jtj.ldlt().solve(identity);
    result.covariance = result.rms_residual * result.rms_residual * inv;
    return result;
}

ComplementarityResult complementarity(double v_m, double sigma_m, double v_12,
                                      double sigma_12) {
    ComplementarityResult out;
    out.value = v_m * v_m + v_12 * v_12;
    out.sigma = std::sqrt(4.0 * v_m * v_m * sigma_m * sigma_m +
                          4.0 * v_12 * v_12 * sigma_12 * sigma_12);
    return out;
}

ComplementarityResult complementarity(const FitResult& fit_marginal,
                                      const FitResult& fit_correlation) {
    if (!fit_marginal.converged || !fit_correlation.converged)
        throw ValidationError("complementarity: both fits must have converged");
    return complementarity(std::abs(fit_marginal.params.visibility),
                           fit_marginal.sigma_visibility(),
                           std::abs(fit_correlation.params.visibility),
                           fit_correlation.sigma_visibility());
}

} // namespace biphoton
