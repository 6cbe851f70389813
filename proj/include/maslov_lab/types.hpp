#pragma once

#include <Eigen/Dense>

namespace msl {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Chart of the configuration coordinates. Torus angles are 2pi-periodic and
/// are unwrapped to the real line during integration; transition maps are
/// translations, so transfer matrices are chart-independent.
enum class Chart { euclidean, torus_angles };

/// Global numerical tolerances. All defaults are well above double-precision
/// noise for n <= 4 and far below the geometric scales used in tests.
struct Tolerances {
    double symp = 1e-9;        // symplectic residual (scale-normalized)
    double lagr = 1e-9;        // Lagrangian-frame isotropy residual
    double rank = 1e-8;        // frame rank / intersection threshold
    double cross = 1e-7;       // crossing-form degeneracy threshold (relative)
    double integration = 1e-10;
    double periodic = 1e-8;
    double energy = 1e-7;
};

Tolerances& tols();

inline double inf_norm(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace msl
