#include "biphoton/estimator.hpp"

#include <algorithm>
#include <sstream>
#include <string>

#include "biphoton/detector_sim.hpp"
#include "biphoton/errors.hpp"

namespace biphoton {

JpdAccumulator::JpdAccumulator(int nx, int ny) : nx_(nx), ny_(ny) {
    if (nx < 1 || ny < 1) throw ConfigError("JpdAccumulator: nx and ny must be >= 1");
    sum_s_ = Eigen::VectorXd::Zero(nx);
    sum_ss_ = Eigen::MatrixXd::Zero(nx, nx);
    sum_c_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nx) * ny);
    sum_cc_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nx) * ny);
    frame_s_ = Eigen::VectorXd::Zero(nx);
}

void JpdAccumulator::add_frame(std::span<const uint16_t> counts) {
    const size_t expected = static_cast<size_t>(nx_) * static_cast<size_t>(ny_);
    if (counts.size() != expected)
        throw ValidationError("JpdAccumulator::add_frame: frame size mismatch");

    frame_s_.setZero();
    for (int j = 0; j < ny_; ++j) {
        const uint16_t* row = counts.data() + static_cast<size_t>(j) * static_cast<size_t>(nx_);
        for (int i = 0; i < nx_; ++i) {
            const double c = static_cast<double>(row[i]);
            frame_s_(i) += c;
            const Eigen::Index pix = static_cast<Eigen::Index>(j) * nx_ + i;
            sum_c_(pix) += c;
            sum_cc_(pix) += c * c;
        }
    }
    sum_s_ += frame_s_;
    sum_ss_.noalias() += frame_s_ * frame_s_.transpose();
    ++frames_;
}

void JpdAccumulator::merge(const JpdAccumulator& other) {
    if (other.nx_ != nx_ || other.ny_ != ny_)
        throw ValidationError("JpdAccumulator::merge: dimension mismatch");
    sum_s_ += other.sum_s_;
    sum_ss_ += other.sum_ss_;
    sum_c_ += other.sum_c_;
    sum_cc_ += other.sum_cc_;
    frames_ += other.frames_;
}

void JpdAccumulator::require_frames(const char* what) const {
    if (frames_ == 0)
        throw ValidationError(std::string("JpdAccumulator: no frames ingested before ") + what);
}

Eigen::MatrixXd JpdAccumulator::jpd_2d() const {
    require_frames("jpd_2d");
    const double m = static_cast<double>(frames_);
    const Eigen::VectorXd mean = sum_s_ / m;
    return sum_ss_ / m - mean * mean.transpose();
}

FringeProfile JpdAccumulator::marginal(double pixel_pitch) const {
    require_frames("marginal");
    const double m = static_cast<double>(frames_);
    FringeProfile prof;
    prof.kind = ProfileKind::marginal;
    prof.abscissa.resize(static_cast<size_t>(nx_));
    prof.values.assign(static_cast<size_t>(nx_), 0.0);
    for (int i = 0; i < nx_; ++i) {
        prof.abscissa[static_cast<size_t>(i)] = (i - 0.5 * (nx_ - 1)) * pixel_pitch;
        double rho = 0.0;
        for (int j = 0; j < ny_; ++j) {
            const Eigen::Index pix = static_cast<Eigen::Index>(j) * nx_ + i;
            const double mean = sum_c_(pix) / m;
            rho += sum_cc_(pix) / m - mean * mean;
        }
        prof.values[static_cast<size_t>(i)] = rho;
    }
    return prof;
}

FringeProfile JpdAccumulator::intensity(double pixel_pitch) const {
    require_frames("intensity");
    const double m = static_cast<double>(frames_);
    FringeProfile prof;
    prof.kind = ProfileKind::intensity;
    prof.abscissa.resize(static_cast<size_t>(nx_));
    prof.values.assign(static_cast<size_t>(nx_), 0.0);
    for (int i = 0; i < nx_; ++i) {
        prof.abscissa[static_cast<size_t>(i)] = (i - 0.5 * (nx_ - 1)) * pixel_pitch;
        double total = 0.0;
        for (int j = 0; j < ny_; ++j)
            total += sum_c_(static_cast<Eigen::Index>(j) * nx_ + i);
        prof.values[static_cast<size_t>(i)] = total / m;
    }
    return prof;
}

namespace {

FringeProfile lag_reduction(const Eigen::MatrixXd& g, double pitch, bool anti_diagonal) {
    const int n = static_cast<int>(g.rows());
    FringeProfile prof;
    prof.kind = anti_diagonal ? ProfileKind::correlation : ProfileKind::correlation_paired;
    prof.abscissa.resize(static_cast<size_t>(2 * n - 1));
    prof.values.assign(static_cast<size_t>(2 * n - 1), 0.0);
    for (int t = 0; t < 2 * n - 1; ++t) {
        const int lag = t - (n - 1);
        prof.abscissa[static_cast<size_t>(t)] = lag * pitch;
        double sum = 0.0;
        if (anti_diagonal) {
            // Corr(X): pairs (i, i - X), X = lag.
            const int lo = std::max(0, lag);
            const int hi = std::min(n - 1, n - 1 + lag);
            for (int i = lo; i <= hi; ++i) sum += g(i, i - lag);
        } else {
            // Corr+(S): pairs (i, s - i), s = lag + (n - 1).
            const int s = t;
            const int lo = std::max(0, s - n + 1);
            const int hi = std::min(n - 1, s);
            for (int i = lo; i <= hi; ++i) sum += g(i, s - i);
        }
        prof.values[static_cast<size_t>(t)] = sum;
    }
    return prof;
}

} // namespace

FringeProfile JpdAccumulator::correlation(double pixel_pitch) const {
    require_frames("correlation");
    return lag_reduction(jpd_2d(), pixel_pitch, true);
}

FringeProfile JpdAccumulator::correlation_paired(double pixel_pitch) const {
    require_frames("correlation_paired");
    return lag_reduction(jpd_2d(), pixel_pitch, false);
}

Jpd4D::Jpd4D(PixelRoi roi, std::vector<double> values) : roi_(roi), g_(std::move(values)) {
    const size_t p = static_cast<size_t>(roi_.x_count) * static_cast<size_t>(roi_.y_count);
    if (g_.size() != p * p) throw ValidationError("Jpd4D: value array size mismatch");
}

double Jpd4D::at(int i, int j, int k, int l) const {
    const size_t p = static_cast<size_t>(roi_.x_count) * static_cast<size_t>(roi_.y_count);
    const size_t a = static_cast<size_t>(j) * static_cast<size_t>(roi_.x_count) + static_cast<size_t>(i);
    const size_t b = static_cast<size_t>(l) * static_cast<size_t>(roi_.x_count) + static_cast<size_t>(k);
    return g_[a * p + b];
}

Eigen::MatrixXd Jpd4D::reduce_2d() const {
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(roi_.x_count, roi_.x_count);
    for (int i = 0; i < roi_.x_count; ++i)
        for (int k = 0; k < roi_.x_count; ++k) {
            double sum = 0.0;
            for (int j = 0; j < roi_.y_count; ++j)
                for (int l = 0; l < roi_.y_count; ++l) sum += at(i, j, k, l);
            out(i, k) = sum;
        }
    return out;
}

std::vector<double> Jpd4D::reduce_marginal() const {
    std::vector<double> rho(static_cast<size_t>(roi_.x_count), 0.0);
    for (int i = 0; i < roi_.x_count; ++i)
        for (int j = 0; j < roi_.y_count; ++j) rho[static_cast<size_t>(i)] += at(i, j, i, j);
    return rho;
}

std::vector<double> Jpd4D::reduce_correlation() const {
    const int n = roi_.x_count;
    std::vector<double> corr(static_cast<size_t>(2 * n - 1), 0.0);
    for (int t = 0; t < 2 * n - 1; ++t) {
        const int lag = t - (n - 1);
        const int lo = std::max(0, lag);
        const int hi = std::min(n - 1, n - 1 + lag);
        double sum = 0.0;
        for (int i = lo; i <= hi; ++i)
            for (int j = 0; j < roi_.y_count; ++j)
                for (int l = 0; l < roi_.y_count; ++l) sum += at(i, j, i - lag, l);
        corr[static_cast<size_t>(t)] = sum;
    }
    return corr;
}

std::vector<double> Jpd4D::reduce_correlation_paired() const {
    const int n = roi_.x_count;
    std::vector<double> corr(static_cast<size_t>(2 * n - 1), 0.0);
    for (int s = 0; s < 2 * n - 1; ++s) {
        const int lo = std::max(0, s - n + 1);
        const int hi = std::min(n - 1, s);
        double sum = 0.0;
        for (int i = lo; i <= hi; ++i)
            for (int j = 0; j < roi_.y_count; ++j)
                for (int l = 0; l < roi_.y_count; ++l) sum += at(i, j, s - i, l);
        corr[static_cast<size_t>(s)] = sum;
    }
    return corr;
}

Jpd4D jpd_full(const FrameStack& frames, const PixelRoi& roi) {
    const int nx = frames.acquisition.nx;
    const int ny = frames.acquisition.ny;
    if (roi.x0 < 0 || roi.y0 < 0 || roi.x_count < 1 || roi.y_count < 1 ||
        roi.x0 + roi.x_count > nx || roi.y0 + roi.y_count > ny)
        throw ConfigError("jpd_full: ROI exceeds the frame");
    const size_t p = static_cast<size_t>(roi.x_count) * static_cast<size_t>(roi.y_count);
    if (p > 64 * 64) {
        std::ostringstream msg;
        msg << "jpd_full: ROI has " << p
            << " pixels; the 4D estimate is limited to 4096. Use the streaming reductions "
               "(jpd_2d, marginal_profile, correlation_profile).";
        throw ValidationError(msg.str());
    }

    Eigen::VectorXd v(static_cast<Eigen::Index>(p));
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
    Eigen::MatrixXd second = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p),
                                                   static_cast<Eigen::Index>(p));
    for (int f = 0; f < frames.acquisition.frames; ++f) {
        const auto frame = frames.frame(f);
        Eigen::Index idx = 0;
        for (int j = 0; j < roi.y_count; ++j)
            for (int i = 0; i < roi.x_count; ++i)
                v(idx++) = static_cast<double>(
                    frame[static_cast<size_t>(roi.y0 + j) * static_cast<size_t>(nx) +
                          static_cast<size_t>(roi.x0 + i)]);
        mean += v;
        second.noalias() += v * v.transpose();
    }
    const double m = static_cast<double>(frames.acquisition.frames);
    mean /= m;
    second /= m;
    const Eigen::MatrixXd g = second - mean * mean.transpose();

    std::vector<double> values(p * p);
    for (size_t aIdx = 0; aIdx < p; ++aIdx)
        for (size_t bIdx = 0; bIdx < p; ++bIdx)
            values[aIdx * p + bIdx] = g(static_cast<Eigen::Index>(aIdx),
                                        static_cast<Eigen::Index>(bIdx));
    return Jpd4D(roi, std::move(values));
}

JpdAccumulator accumulate(const FrameStack& frames) {
    JpdAccumulator acc(frames.acquisition.nx, frames.acquisition.ny);
    for (int f = 0; f < frames.acquisition.frames; ++f) acc.add_frame(frames.frame(f));
    return acc;
}

Eigen::MatrixXd jpd_2d(const FrameStack& frames) { return accumulate(frames).jpd_2d(); }

FringeProfile marginal_profile(const FrameStack& frames) {
    return accumulate(frames).marginal(frames.acquisition.pixel_pitch);
}

FringeProfile correlation_profile(const FrameStack& frames) {
    return accumulate(frames).correlation(frames.acquisition.pixel_pitch);
}

FringeProfile correlation_paired_profile(const FrameStack& frames) {
    return accumulate(frames).correlation_paired(frames.acquisition.pixel_pitch);
}

namespace {

FringeProfile jpd_reduction(const Eigen::MatrixXd& jpd, double spacing, ProfileKind kind) {
    const int n = static_cast<int>(jpd.rows());
    if (kind == ProfileKind::marginal) {
        FringeProfile prof;
        prof.kind = kind;
        prof.abscissa.resize(static_cast<size_t>(n));
        prof.values.resize(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) {
            prof.abscissa[static_cast<size_t>(i)] = (i - 0.5 * (n - 1)) * spacing;
            prof.values[static_cast<size_t>(i)] = jpd.row(i).sum();
        }
        return prof;
    }
    return lag_reduction(jpd, spacing, kind == ProfileKind::correlation);
}

} // namespace

FringeProfile marginal_from_jpd(const Eigen::MatrixXd& jpd, double spacing) {
    return jpd_reduction(jpd, spacing, ProfileKind::marginal);
}

FringeProfile correlation_from_jpd(const Eigen::MatrixXd& jpd, double spacing) {
    return jpd_reduction(jpd, spacing, ProfileKind::correlation);
}

FringeProfile correlation_paired_from_jpd(const Eigen::MatrixXd& jpd, double spacing) {
    return jpd_reduction(jpd, spacing, ProfileKind::correlation_paired);
}

} // namespace biphoton
