#include "maslov_lab/paths.hpp"

#include <algorithm>
#include <stdexcept>

namespace msl {

Mat orthonormal_columns(const Mat& m) {
    Eigen::HouseholderQR<Mat> qr(m);
    Mat Q = qr.householderQ() * Mat::Identity(m.rows(), m.cols());
    Mat R = qr.matrixQR().topRows(m.cols()).triangularView<Eigen::Upper>();
    for (int j = 0; j < m.cols(); ++j)
        if (R(j, j) < 0) Q.col(j) = -Q.col(j);
    return Q;
}

Mat gauge_align(const Mat& frame, const Mat& target) {
    Eigen::JacobiSVD<Mat> svd(frame.transpose() * target,
                              Eigen::ComputeFullU | Eigen::ComputeFullV);
    return frame * (svd.matrixU() * svd.matrixV().transpose());
}

LagrangianPath::LagrangianPath(std::vector<double> times, std::vector<Mat> frames,
                               Evaluator eval)
    : times_(std::move(times)), frames_(std::move(frames)), eval_(std::move(eval)) {
    if (times_.size() < 2 || times_.size() != frames_.size())
        throw std::invalid_argument("LagrangianPath: need matching times/frames, >= 2 samples");
    for (size_t i = 1; i < times_.size(); ++i)
        if (!(times_[i] > times_[i - 1]))
            throw std::invalid_argument("LagrangianPath: times must be strictly increasing");
    n_ = static_cast<int>(frames_.front().cols());
    for (auto& f : frames_) {
        if (f.rows() != 2 * n_ || f.cols() != n_)
            throw std::invalid_argument("LagrangianPath: inconsistent frame shapes");
        LagrangianFrame check(f);  // validates Lagrangian + rank
        f = orthonormal_columns(f);
    }
    for (size_t i = 1; i < frames_.size(); ++i)
        frames_[i] = gauge_align(frames_[i], frames_[i - 1]);
}

Mat LagrangianPath::at(double t) const {
    const double lo = times_.front(), hi = times_.back();
    t = std::clamp(t, lo, hi);
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    int j = static_cast<int>(it - times_.begin());
    j = std::clamp(j, 1, samples() - 1);
    const int i = j - 1;
    if (t == times_[i]) return frames_[i];
    if (t == times_[j]) return frames_[j];
    Mat raw;
    if (eval_) {
        raw = eval_(t);
    } else {
        const double th = (t - times_[i]) / (times_[j] - times_[i]);
        raw = (1.0 - th) * frames_[i] + th * frames_[j];
    }
    return gauge_align(orthonormal_columns(raw), frames_[i]);
}

LagrangianPath LagrangianPath::restricted(double c, double d) const {
    if (!(c < d) || c < a() - 1e-12 || d > b() + 1e-12)
        throw std::invalid_argument("LagrangianPath::restricted: bad subinterval");
    std::vector<double> ts{c};
    std::vector<Mat> fs{at(c)};
    for (int i = 0; i < samples(); ++i) {
        if (times_[i] > c && times_[i] < d) {
            ts.push_back(times_[i]);
            fs.push_back(frames_[i]);
        }
    }
    ts.push_back(d);
    fs.push_back(at(d));
    return LagrangianPath(std::move(ts), std::move(fs), eval_);
}

LagrangianPath LagrangianPath::transformed(const Mat& Psi) const {
    std::vector<Mat> fs(frames_.size());
    for (size_t i = 0; i < frames_.size(); ++i) fs[i] = Psi * frames_[i];
    Evaluator ev;
    if (eval_) {
        Evaluator base = eval_;
        ev = [Psi, base](double t) { return Psi * base(t); };
    }
    return LagrangianPath(times_, std::move(fs), std::move(ev));
}

SymplecticPath::SymplecticPath(std::vector<double> times, std::vector<Mat> mats,
                               Evaluator eval)
    : times_(std::move(times)), mats_(std::move(mats)), eval_(std::move(eval)) {
    if (times_.size() < 2 || times_.size() != mats_.size())
        throw std::invalid_argument("SymplecticPath: need matching times/matrices");
    for (size_t i = 1; i < times_.size(); ++i)
        if (!(times_[i] > times_[i - 1]))
            throw std::invalid_argument("SymplecticPath: times must be strictly increasing");
    n_ = static_cast<int>(mats_.front().rows()) / 2;
    for (const auto& m : mats_) {
        if (m.rows() != 2 * n_ || m.cols() != 2 * n_)
            throw std::invalid_argument("SymplecticPath: inconsistent shapes");
        if (symplectic_residual(m) > 10 * tols().symp)
            throw std::invalid_argument("SymplecticPath: sample not symplectic");
    }
}

Mat SymplecticPath::at(double t) const {
    const double lo = times_.front(), hi = times_.back();
    t = std::clamp(t, lo, hi);
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    int j = static_cast<int>(it - times_.begin());
    j = std::clamp(j, 1, samples() - 1);
    const int i = j - 1;
    if (t == times_[i]) return mats_[i];
    if (t == times_[j]) return mats_[j];
    if (eval_) return eval_(t);
    const double th = (t - times_[i]) / (times_[j] - times_[i]);
    Mat m = (1.0 - th) * mats_[i] + th * mats_[j];
    return resymplectify(m).matrix();
}

LagrangianPath SymplecticPath::apply(const LagrangianFrame& lambda0) const {
    Mat F0 = lambda0.orthonormalized().columns();
    std::vector<Mat> fs(mats_.size());
    for (size_t i = 0; i < mats_.size(); ++i) fs[i] = mats_[i] * F0;
    LagrangianPath::Evaluator ev;
    SymplecticPath self = *this;
    ev = [self, F0](double t) { return self.at(t) * F0; };
    return LagrangianPath(times_, std::move(fs), std::move(ev));
}

LagrangianPath SymplecticPath::graph_path() const {
    DoubleForm form{n_};
    const Mat T = form.to_standard();
    const int n2 = 2 * n_;
    auto make = [T, n2](const Mat& Phi) {
        Mat f(2 * n2, n2);
        f.topRows(n2) = Mat::Identity(n2, n2);
        f.bottomRows(n2) = Phi;
        return Mat(T * f);
    };
    std::vector<Mat> fs(mats_.size());
    for (size_t i = 0; i < mats_.size(); ++i) fs[i] = make(mats_[i]);
    SymplecticPath self = *this;
    LagrangianPath::Evaluator ev = [self, make](double t) { return make(self.at(t)); };
    return LagrangianPath(times_, std::move(fs), std::move(ev));
}

LagrangianFrame SymplecticPath::diagonal_std(int n) {
    DoubleForm form{n};
    Mat d(4 * n, 2 * n);
    d.topRows(2 * n) = Mat::Identity(2 * n, 2 * n);
    d.bottomRows(2 * n) = Mat::Identity(2 * n, 2 * n);
    return LagrangianFrame(form.to_standard() * d);
}

} // namespace msl
