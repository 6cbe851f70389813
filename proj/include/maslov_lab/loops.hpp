#pragma once

#include "maslov_lab/systems.hpp"

namespace msl {

/// Periodic configuration-space curve: N nodes on a uniform grid over [0,k]
/// with closure gamma(k) = gamma(0) (+ 2pi winding on torus charts).
struct Loop {
    int k = 1;
    Mat nodes;  // N x n
    Chart chart = Chart::euclidean;
    Eigen::VectorXi winding;  // empty or n entries (torus charts)

    int count() const { return static_cast<int>(nodes.rows()); }
    int dim() const { return static_cast<int>(nodes.cols()); }
    double dt() const { return static_cast<double>(k) / count(); }
    Vec node_closed(int i) const;  // i in [0, count()], wraps with winding
    Vec segment_velocity(int i) const;
};

/// Average action (1/k) int_0^k L, composite trapezoid on the uniform grid
/// with finite-difference velocities (convergence order 2 in the spacing).
double action(const EMLagrangian& L, const Loop& gamma);

/// int_0^k |gamma'|, polyline quadrature.
double loop_length(const Loop& gamma);

/// phi_k(gamma)(t) = gamma(t/k) resampled on the period-k grid (k N nodes);
/// exact on the stored polyline, so segment speeds scale by exactly 1/k.
Loop iterate_loop(const Loop& gamma, int k);

struct Lemma1Result {
    double lhs = 0;        // A_k(phi_k gamma)
    double base_action = 0;  // A_1(gamma)
    double c1 = 0;         // 3 ||V||_inf + (9/2) ||A||_inf^2
    double rhs = 0;        // (2/k^2) A_1 + c1
    bool holds = false;
};

Lemma1Result lemma1_check(const EMLagrangian& L, const Loop& gamma, int k);

/// Seeded truncated Fourier loop (<= max_modes modes, 1/m^2 amplitude decay).
Loop random_fourier_loop(int n, std::uint64_t seed, int max_modes = 8, int node_count = 256,
                         double amplitude = 1.0, Chart chart = Chart::euclidean);

struct SlowReparamResult {
    Loop gamma1;
    double sup_speed = 0;
    double sup_speed_bound = 0;  // 1 + L(gamma)
    double sigma_start = 0, sigma_end = 0;
    double length_in = 0, length_out = 0;
};

/// Slowly-varying-speed reparametrization: sigma(t) = int_0^t sqrt(1+|v|^2)
/// normalized, gamma1 = gamma o sigma^{-1}; the output speed is bounded by
/// 1 + L(gamma) up to grid slack. The refined resampling keeps the polyline
/// length within 1e-6.
SlowReparamResult slow_reparam(const Loop& gamma, int refine = 64);

struct QuadraticFormSpectrum {
    int negative_count = 0;
    int zero_count = 0;
    std::vector<double> eigenvalues;
    int mesh_elements = 0;
};

enum class BoundaryCondition { dirichlet, periodic };

/// Discretized second variation of the action at a solution segment:
///   int ( |xi'|^2 + 2<(gradA) xi, xi'> + <hessA[xi,xi], gamma'> - hessV[xi,xi] )
/// on piecewise-linear elements, refined (doubling) until the negative count
/// stabilizes twice. For Dirichlet conditions on non-conjugate intervals the
/// negative count equals mu_t(s, x0, t) (documented endpoint convention).
QuadraticFormSpectrum second_variation_index(const EMLagrangian& L, const OrbitSegment& orbit,
                                             double s, double t,
                                             BoundaryCondition bc = BoundaryCondition::dirichlet,
                                             int initial_elements = 64);

/// Model Dirichlet form (1/2) int_0^t |phi'|^2 - c int_0^t |phi|^2 on one
/// component; its negative count is floor(t sqrt(2c) / pi).
QuadraticFormSpectrum dirichlet_model_index(double t, double c, int initial_elements = 64);

} // namespace msl
