#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "maslov_lab/half_int.hpp"
#include "maslov_lab/maslov.hpp"
#include "maslov_lab/paths.hpp"

namespace msl {

/// Time-periodic Hamiltonian H(t,q,p) with period 1 in t. Derivative closures
/// may be analytic or centered finite differences (flagged). Phase points are
/// stored as x = (q, p) in the repo block convention.
struct HamiltonianSystem {
    int n = 1;
    Chart chart = Chart::euclidean;
    bool autonomous = true;
    bool derivatives_analytic = true;
    std::string name;

    std::function<double(double, const Vec&)> H;  // H(t, x)
    std::function<Vec(double, const Vec&)> grad;  // (H_q, H_p), 2n
    std::function<Mat(double, const Vec&)> hess;  // symmetric 2n x 2n

    /// Fill grad/hess with centered finite differences of H.
    void make_fd_derivatives(double step = 1e-6);
};

/// X_H = (H_p, -H_q), i.e. omega0(X_H, .) = -dH under the repo convention.
Vec vector_field(const HamiltonianSystem& sys, double t, const Vec& x);

/// Linearization K(t,x) with Phi' = K Phi along an orbit.
Mat variational_matrix(const HamiltonianSystem& sys, double t, const Vec& x);

struct IntegratorStats {
    long long steps = 0;
    long long rejected = 0;
    double max_symplectic_residual = 0;
    double energy_drift = 0;
};

struct IntegrateOptions {
    double tol = -1.0;            // <=0: tols().integration
    double blowup_norm = 1e9;
    double max_transfer_rotation = 0.15;  // cap ||K|| dt per step
};

/// Orbit with transfer matrices, sampled at every accepted step.
struct OrbitSegment {
    const HamiltonianSystem* sys = nullptr;
    double s0 = 0;
    Vec x0;
    std::vector<double> times;
    std::vector<Vec> states;
    std::vector<Mat> transfers;  // Phi(t) with Phi(s0) = I
    IntegratorStats stats;
    double tol_used = 0;

    double t_end() const { return times.back(); }
    Vec state_at(double t) const;
    Mat transfer_at(double t) const;
};

/// Adaptive embedded Dormand-Prince 5(4) on the coupled system
/// (x' = X_H, Phi' = K Phi). Transfers are resymplectified whenever the
/// scale-normalized residual exceeds tols().symp / 10; sampling is dense
/// enough that consecutive transfers differ by < 0.2 in operator rotation.
OrbitSegment integrate_orbit(const HamiltonianSystem& sys, double s, const Vec& x0,
                             double T, const IntegrateOptions& opts = {});

/// The Lagrangian path t -> Phi(t) . vertical on the orbit grid, with the
/// analytic refinement callback delegating to the integrator.
LagrangianPath vertical_evolution(std::shared_ptr<const OrbitSegment> orbit);

SymplecticPath transfer_path(std::shared_ptr<const OrbitSegment> orbit);

/// mu_t(s,x0) = mu(lambda^U|[s,s+t], vertical) - n/2 in the chart
/// trivialization. At t = 0 this is sig(H_pp)/2 - n/2 (the one-sided crossing
/// form of the length-zero path), which vanishes for fiberwise-convex H.
HalfInt mu_t(const HamiltonianSystem& sys, double s, const Vec& x0, double t,
             IndexResult* detail = nullptr);

/// Distance respecting 2pi-periodic configuration angles on torus charts.
double phase_distance(const HamiltonianSystem& sys, const Vec& x, const Vec& y);

struct MonodromyResult {
    Mat period_map;
    HalfInt mu_cz;
    IndexResult detail;
};

/// Conley-Zehnder index of the transfer path over [0,k] of a k-periodic
/// orbit. Throws if x0 is not k-periodic within tols().periodic.
MonodromyResult monodromy_index(const HamiltonianSystem& sys, const Vec& x0, int k);

} // namespace msl
