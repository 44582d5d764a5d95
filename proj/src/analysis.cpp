#include "biphoton/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "biphoton/errors.hpp"

namespace biphoton {

namespace {

// Vertex abscissa of the parabola through (-1, ym), (0, y0), (1, yp);
// valid for maxima and minima alike.
double parabola_peak_offset(double ym, double y0, double yp) {
    const double denom = ym - 2.0 * y0 + yp;
    if (denom == 0.0) return 0.0;
    return std::clamp(0.5 * (ym - yp) / denom, -1.0, 1.0);
}

} // namespace

double fringe_period_from_profile(const FringeProfile& profile) {
    const int n = static_cast<int>(profile.values.size());
    if (n < 16) throw ValidationError("fringe_period: profile too short");
    const double span = profile.abscissa.back() - profile.abscissa.front();
    const double step = span / static_cast<double>(n - 1);

    // Work on first differences: the derivative's |2 sin(pi nu step)|
    // transfer suppresses the diffraction envelope's broad low-frequency
    // shoulder by orders of magnitude relative to the fringe line, and the
    // line's symmetric shape keeps its peak position intact.
    std::vector<double> diff(static_cast<size_t>(n - 1));
    std::vector<double> mid(static_cast<size_t>(n - 1));
    for (int i = 0; i + 1 < n; ++i) {
        diff[static_cast<size_t>(i)] = profile.values[static_cast<size_t>(i + 1)] -
                                       profile.values[static_cast<size_t>(i)];
        mid[static_cast<size_t>(i)] =
            0.5 * (profile.abscissa[static_cast<size_t>(i + 1)] +
                   profile.abscissa[static_cast<size_t>(i)]);
    }

    // Scan the band between "two periods in the window" and "three samples
    // per period" (the same bounds the fit demands of its input).
    const double nu_min = 2.0 / span;
    const double nu_max = 1.0 / (3.0 * step);
    if (!(nu_max > nu_min)) throw ValidationError("fringe_period: degenerate sampling band");
    const int scan = 4096;
    std::vector<double> power(static_cast<size_t>(scan), 0.0);
    for (int k = 0; k < scan; ++k) {
        const double nu = nu_min + (nu_max - nu_min) * k / (scan - 1);
        double re = 0.0, im = 0.0;
        for (size_t i = 0; i < diff.size(); ++i) {
            const double phase = -2.0 * std::numbers::pi * nu * mid[i];
            re += diff[i] * std::cos(phase);
            im += diff[i] * std::sin(phase);
        }
        power[static_cast<size_t>(k)] = re * re + im * im;
    }

    // The diffraction envelope contributes a broad low-frequency shoulder
    // that decays into the band; the fringe line is the strongest interior
    // local maximum.
    int k = -1;
    for (int i = 1; i + 1 < scan; ++i) {
        if (power[static_cast<size_t>(i)] >= power[static_cast<size_t>(i - 1)] &&
            power[static_cast<size_t>(i)] > power[static_cast<size_t>(i + 1)] &&
            (k < 0 || power[static_cast<size_t>(i)] > power[static_cast<size_t>(k)]))
            k = i;
    }
    if (k < 0)
        throw ValidationError("fringe_period: no interior spectral line (no fringes)");
    std::vector<double> sorted = power;
    std::nth_element(sorted.begin(), sorted.begin() + scan / 2, sorted.end());
    if (!(power[static_cast<size_t>(k)] > 5.0 * sorted[static_cast<size_t>(scan / 2)]))
        throw ValidationError("fringe_period: no prominent spectral line (no fringes)");

    const double offset = parabola_peak_offset(power[static_cast<size_t>(k - 1)],
                                               power[static_cast<size_t>(k)],
                                               power[static_cast<size_t>(k + 1)]);
    const double nu_star = nu_min + (nu_max - nu_min) * (k + offset) / (scan - 1);
    return 1.0 / nu_star;
}

double envelope_zero_from_profile(const FringeProfile& profile, double fringe_period) {
    const int n = static_cast<int>(profile.values.size());
    if (n < 8) throw ValidationError("envelope_zero: profile too short");
    const double step = (profile.abscissa.back() - profile.abscissa.front()) /
                        static_cast<double>(n - 1);
    if (!(fringe_period > step))
        throw ValidationError("envelope_zero: fringe period must exceed the sample step");

    // Trapezoid prefix integral of the linear interpolant; a box average
    // over a whole number of fringe periods cancels the oscillation.
    std::vector<double> prefix(static_cast<size_t>(n), 0.0);
    for (int i = 1; i < n; ++i)
        prefix[static_cast<size_t>(i)] =
            prefix[static_cast<size_t>(i - 1)] +
            0.5 * (profile.values[static_cast<size_t>(i)] + profile.values[static_cast<size_t>(i - 1)]) * step;

    const auto integral_to = [&](double t) {
        const double pos = (t - profile.abscissa.front()) / step;
        const int i = std::clamp(static_cast<int>(std::floor(pos)), 0, n - 2);
        const double frac = pos - i;
        const double yi = profile.values[static_cast<size_t>(i)];
        const double yi1 = profile.values[static_cast<size_t>(i + 1)];
        const double yt = yi + frac * (yi1 - yi);
        return prefix[static_cast<size_t>(i)] + 0.5 * (yi + yt) * frac * step;
    };

    // First local minimum of the box-smoothed profile beyond half a width.
    const auto smoothed_min = [&](double width) {
        const auto smoothed = [&](double t) {
            return (integral_to(t + width / 2.0) - integral_to(t - width / 2.0)) / width;
        };
        const double t_max = profile.abscissa.back() - width;
        std::vector<double> s, ts;
        for (double t = width / 2.0; t <= t_max; t += step / 2.0) {
            ts.push_back(t);
            s.push_back(smoothed(t));
        }
        for (size_t i = 1; i + 1 < s.size(); ++i) {
            if (s[i] <= s[i - 1] && s[i] < s[i + 1]) {
                const double offset = parabola_peak_offset(s[i - 1], s[i], s[i + 1]);
                return ts[i] + offset * step / 2.0;
            }
        }
        throw ValidationError("envelope_zero: no envelope minimum found");
    };

    // The smoothed minimum is displaced by beta * width^2 through the
    // envelope's cubic asymmetry; Richardson-extrapolate over two widths
    // (both whole fringe periods, so the oscillation integrates out).
    const double z1 = smoothed_min(fringe_period);
    const double z2 = smoothed_min(2.0 * fringe_period);
    return (4.0 * z1 - z2) / 3.0;
}

FringeProfile center_profile(const FringeProfile& profile) {
    const int n = static_cast<int>(profile.values.size());
    if (n < 8) throw ValidationError("center_profile: profile too short");
    const double step = (profile.abscissa.back() - profile.abscissa.front()) /
                        static_cast<double>(n - 1);

    const auto mismatch = [&](int center) {
        double sum = 0.0;
        int terms = 0;
        const int reach = std::min(center, n - 1 - center);
        for (int k = 1; k <= reach; ++k) {
            const double d = profile.values[static_cast<size_t>(center + k)] -
                             profile.values[static_cast<size_t>(center - k)];
            sum += d * d;
            ++terms;
        }
        return terms >= n / 4 ? sum / terms : std::numeric_limits<double>::infinity();
    };
    // A few-sample average around a candidate; fringe troughs mirror the
    // profile as well as crests do, so symmetry alone cannot decide.
    const auto local_level = [&](int center) {
        double sum = 0.0;
        int terms = 0;
        for (int k = -2; k <= 2; ++k) {
            const int i = center + k;
            if (i < 0 || i >= n) continue;
            sum += profile.values[static_cast<size_t>(i)];
            ++terms;
        }
        return sum / terms;
    };

    std::vector<double> scores(static_cast<size_t>(n),
                               std::numeric_limits<double>::infinity());
    double best_score = std::numeric_limits<double>::infinity();
    for (int c = n / 4; c <= 3 * n / 4; ++c) {
        scores[static_cast<size_t>(c)] = mismatch(c);
        best_score = std::min(best_score, scores[static_cast<size_t>(c)]);
    }

    // Among competitive mirror centers (local minima of the mismatch),
    // take the one sitting highest on the envelope.
    int best = n / 2;
    double best_level = -std::numeric_limits<double>::infinity();
    for (int c = n / 4 + 1; c < 3 * n / 4; ++c) {
        const double s = scores[static_cast<size_t>(c)];
        if (!(s <= scores[static_cast<size_t>(c - 1)] && s <= scores[static_cast<size_t>(c + 1)]))
            continue;
        if (s > 4.0 * best_score + 1e-300) continue;
        const double level = local_level(c);
        if (level > best_level) {
            best_level = level;
            best = c;
        }
    }

    double refine = 0.0;
    {
        const double sm = scores[static_cast<size_t>(best - 1)];
        const double s0 = scores[static_cast<size_t>(best)];
        const double sp = scores[static_cast<size_t>(best + 1)];
        if (std::isfinite(sm) && std::isfinite(sp)) refine = parabola_peak_offset(sm, s0, sp);
    }
    const double center = profile.abscissa[static_cast<size_t>(best)] + refine * step;

    FringeProfile out = profile;
    for (double& t : out.abscissa) t -= center;
    return out;
}

double rank1_residual(const Eigen::MatrixXd& m) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m);
    const auto& s = svd.singularValues();
    if (s.size() < 2 || !(s(0) > 0.0)) return 0.0;
    return s(1) / s(0);
}

double effective_schmidt_number(const Eigen::MatrixXd& amplitude) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(amplitude);
    const Eigen::VectorXd s2 = svd.singularValues().array().square();
    const double total = s2.sum();
    if (!(total > 0.0)) throw ValidationError("effective_schmidt_number: zero amplitude");
    const Eigen::VectorXd lambda = s2 / total;
    return 1.0 / lambda.squaredNorm();
}

double rms_width(const std::vector<double>& abscissa, const std::vector<double>& values) {
    double w = 0.0, wt = 0.0, wtt = 0.0;
    for (size_t i = 0; i < abscissa.size(); ++i) {
        const double p = values[i] * values[i];
        w += p;
        wt += p * abscissa[i];
        wtt += p * abscissa[i] * abscissa[i];
    }
    if (!(w > 0.0)) throw ValidationError("rms_width: zero profile");
    const double mean = wt / w;
    return std::sqrt(std::max(0.0, wtt / w - mean * mean));
}

} // namespace biphoton
