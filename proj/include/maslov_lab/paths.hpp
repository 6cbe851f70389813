#pragma once

#include <functional>
#include <vector>

#include "maslov_lab/symplectic.hpp"

namespace msl {

/// Orthonormalize columns with the R-diagonal sign fix, so that frames that
/// are already near-orthonormal are reproduced (continuity of the gauge).
Mat orthonormal_columns(const Mat& m);

/// Right-multiply `frame` by the orthogonal Procrustes factor aligning it
/// with `target` (both orthonormal, same shape).
Mat gauge_align(const Mat& frame, const Mat& target);

/// Time-sampled path of Lagrangian subspaces. Frames are stored orthonormal
/// and gauge-aligned along the grid, so determinant-based crossing detection
/// sees a continuous scalar. A path is either `analytic` (an evaluator can
/// produce the frame at any t; used for integrator-backed paths) or `sampled`
/// (piecewise-linear frame interpolation followed by re-orthonormalization).
class LagrangianPath {
public:
    enum class Kind { analytic, sampled };
    using Evaluator = std::function<Mat(double)>;  // raw 2n x n columns at t

    LagrangianPath(std::vector<double> times, std::vector<Mat> frames,
                   Evaluator eval = nullptr);

    int n() const { return n_; }
    double a() const { return times_.front(); }
    double b() const { return times_.back(); }
    Kind kind() const { return eval_ ? Kind::analytic : Kind::sampled; }
    const std::vector<double>& times() const { return times_; }
    const Mat& frame(int i) const { return frames_[i]; }
    int samples() const { return static_cast<int>(times_.size()); }

    /// Orthonormal frame at t, gauge-aligned with the grid sample at or
    /// before t. Continuous in t on each grid interval and across knots.
    Mat at(double t) const;

    LagrangianPath restricted(double c, double d) const;
    LagrangianPath transformed(const Mat& Psi) const;

private:
    int n_;
    std::vector<double> times_;
    std::vector<Mat> frames_;
    Evaluator eval_;
};

/// Time-sampled path in Sp(2n) with optional exact evaluator.
class SymplecticPath {
public:
    using Evaluator = std::function<Mat(double)>;

    SymplecticPath(std::vector<double> times, std::vector<Mat> mats,
                   Evaluator eval = nullptr);

    int n() const { return n_; }
    double a() const { return times_.front(); }
    double b() const { return times_.back(); }
    const std::vector<double>& times() const { return times_; }
    const Mat& matrix(int i) const { return mats_[i]; }
    int samples() const { return static_cast<int>(times_.size()); }

    Mat at(double t) const;  // interpolated and resymplectified

    /// The Lagrangian path t -> Phi(t) lambda0.
    LagrangianPath apply(const LagrangianFrame& lambda0) const;

    /// The path t -> graf Phi(t) conjugated into the standard symplectic
    /// R^{4n} by DoubleForm::to_standard, ready for maslov_index against
    /// diagonal_std(n).
    LagrangianPath graph_path() const;

    static LagrangianFrame diagonal_std(int n);

private:
    int n_;
    std::vector<double> times_;
    std::vector<Mat> mats_;
    Evaluator eval_;
};

} // namespace msl
