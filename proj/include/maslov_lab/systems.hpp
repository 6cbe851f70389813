#pragma once

#include <map>
#include <optional>
#include <string>

#include "maslov_lab/hamiltonian.hpp"

namespace msl {

/// Electromagnetic Lagrangian L(t,q,v) = 1/2 <v,v> + <A(t,q),v> - V(t,q) on a
/// flat chart (euclidean or flat torus), 1-periodic in t. Carries analytic
/// derivative closures; sup norms over the fundamental domain are computed by
/// dense grid scan and cached.
struct EMLagrangian {
    int n = 1;
    Chart chart = Chart::torus_angles;
    bool time_dependent = false;

    std::function<Vec(double, const Vec&)> A;       // magnetic potential
    std::function<Mat(double, const Vec&)> gradA;   // (gradA)_{ij} = dA_i/dq_j
    std::function<std::vector<Mat>(double, const Vec&)> hessA;  // hessA[i] = d2A_i/dqdq
    std::function<Vec(double, const Vec&)> dtA;
    std::function<double(double, const Vec&)> V;
    std::function<Vec(double, const Vec&)> gradV;
    std::function<Mat(double, const Vec&)> hessV;

    int scan_resolution = 256;   // per dimension per time slice
    int scan_time_slices = 32;   // only when time dependent
    double scan_halfwidth = M_PI;  // euclidean charts scan [-hw, hw]^n

    double value(double t, const Vec& q, const Vec& v) const;

    double sup_A() const;
    double sup_V() const;
    double sup_dtA() const;
    double sup_gradV() const;

    /// Growth constant for the velocity estimate: d/dt(1+|v|^2) <= c1 (1+|v|^2).
    double growth_c1() const;

private:
    mutable std::optional<double> supA_, supV_, supdtA_, supgradV_;
    double scan(const std::function<double(double, const Vec&)>& f) const;
};

struct LegendrePoint {
    double t;
    Vec q;
    Vec p;
};

/// p[w] = <v + A(t,q), w> in the flat metric identification: p = v + A.
LegendrePoint legendre_map(const EMLagrangian& L, double t, const Vec& q, const Vec& v);

/// Inverse fiber map: v = p - A(t,q).
Vec legendre_velocity(const EMLagrangian& L, double t, const Vec& q, const Vec& p);

/// Fenchel-dual Hamiltonian H(t,q,p) = 1/2 |p - A(t,q)|^2 + V(t,q) with
/// analytic grad/hess assembled from the A, V derivative closures.
HamiltonianSystem fenchel_hamiltonian(const EMLagrangian& L);

/// A named model system: the Hamiltonian side plus, when the system is of
/// electromagnetic type, its Lagrangian.
struct SystemBundle {
    HamiltonianSystem sys;
    std::optional<EMLagrangian> lagrangian;
};

/// Named systems: pendulum, harmonic_oscillator (params omega1..omegaN),
/// inverted_saddle, flat_torus_geodesic, magnetic_torus (params uniform, b,
/// a1, a2, v0), forced_pendulum (param epsilon). Throws on unknown names.
SystemBundle make_system(const std::string& name,
                         const std::map<std::string, double>& params = {});

std::vector<std::string> catalog_names();

struct GrowthCheckResult {
    bool ok = true;
    double c1 = 0;
    double worst_time = 0;
    double worst_ratio = 0;  // max over samples of lhs/rhs
};

/// Verifies 1 + |v(t)|^2 <= (1 + |v(s0)|^2) e^{c1 |t - s0|} along the orbit,
/// with v = p - A and c1 from grid-scanned derivative bounds. An explicit c1
/// override supports negative controls.
GrowthCheckResult growth_check(const EMLagrangian& L, const OrbitSegment& orbit,
                               double c1_override = -1.0);

} // namespace msl
