#pragma once

// Test-side oracles, deliberately independent of the library's production
// code paths: a scaling-and-squaring matrix exponential, analytic crossing
// enumeration for rotation paths, and the elliptic pendulum period.

#include <cmath>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Mat = Eigen::MatrixXd;

/// Scaling-and-squaring Taylor exponential (independent of Eigen's Pade exp).
inline Mat expm_taylor(const Mat& A, int terms = 24) {
    const double nrm = A.cwiseAbs().rowwise().sum().maxCoeff();
    int s = 0;
    while (nrm / std::pow(2.0, s) > 0.5) ++s;
    Mat X = A / std::pow(2.0, s);
    Mat term = Mat::Identity(A.rows(), A.cols());
    Mat sum = term;
    for (int k = 1; k <= terms; ++k) {
        term = term * X / k;
        sum += term;
    }
    for (int i = 0; i < s; ++i) sum = sum * sum;
    return sum;
}

/// Robbin-Salamon index of the harmonic rotation path exp(t K) . vertical
/// against the vertical, K = [[0, w],[-w, 0]] per factor: crossings at
/// t = m pi / w, each contributing +1, endpoints half-weight. Returns the
/// doubled index over [0, T].
inline long long rotation_index_doubled(const std::vector<double>& freqs, double T,
                                        double tol = 1e-9) {
    long long doubled = 0;
    for (double w : freqs) {
        // t = 0 endpoint crossing: +1/2 per factor.
        doubled += 1;
        const double step = M_PI / w;
        for (int m = 1;; ++m) {
            const double t = m * step;
            if (t > T + tol) break;
            doubled += (std::abs(t - T) <= tol) ? 1 : 2;  // endpoint vs interior
        }
    }
    return doubled;
}

/// Conley-Zehnder index of the same rotation over [0, T]: graph crossings at
/// t = 2 m pi / w with signature +2 per factor (dim-2 crossings).
inline long long rotation_cz_doubled(const std::vector<double>& freqs, double T,
                                     double tol = 1e-9) {
    long long doubled = 0;
    for (double w : freqs) {
        doubled += 2;  // t = 0: half weight of signature +2
        const double step = 2.0 * M_PI / w;
        for (int m = 1;; ++m) {
            const double t = m * step;
            if (t > T + tol) break;
            doubled += (std::abs(t - T) <= tol) ? 2 : 4;
        }
    }
    return doubled;
}

/// Pendulum libration period at energy E in (-1,1): 4 K(sqrt((1+E)/2)).
inline double pendulum_period(double E) {
    return 4.0 * std::comp_ellint_1(std::sqrt(0.5 * (1.0 + E)));
}

} // namespace oracle
