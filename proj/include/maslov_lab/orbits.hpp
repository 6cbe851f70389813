#pragma once

#include <cstdint>

#include "maslov_lab/asymptotic.hpp"
#include "maslov_lab/loops.hpp"

namespace msl {

struct PeriodicOrbitRecord {
    int k = 1;
    int minimal_period = 1;
    Vec x0;
    HalfInt mu_cz;            // mu_CZ^k
    AsymptoticEstimate bott;  // Bott index estimate
    double action = std::numeric_limits<double>::quiet_NaN();  // A(eta)
    double residual = 0;      // ||phi_k(x0) - x0||
    double energy = std::numeric_limits<double>::quiet_NaN();  // autonomous systems
    Eigen::VectorXi winding;
    bool contractible = true;
    std::uint64_t seed_index = 0;
    bool degenerate_jacobian = false;
    std::shared_ptr<const OrbitSegment> orbit;  // over [0,k]
};

struct OrbitSearchOptions {
    double newton_tol = 1e-10;
    int max_newton = 40;
    double dedup_tol = 1e-4;
    int bott_horizon = 200;   // h_max = ceil(horizon / k)
    double seed_q_min = -M_PI, seed_q_max = M_PI;
    double seed_p_min = -2.5, seed_p_max = 2.5;
    int grid_q = 7, grid_p = 9;
    double divergence_norm = 50.0;
};

/// Grid-seeded Newton on x - phi_k(0,x) with the integrated transfer matrix
/// as Jacobian; least-squares step (pseudo-inverse) when I - Phi(k) is
/// singular, the seed then marked degenerate. Found orbits are deduplicated
/// by time-shifted orbit distance and annotated with minimal period, winding,
/// indices, Bott estimate and average Lagrangian action (when L is given).
/// Newton divergence is logged per seed, never fatal.
std::vector<PeriodicOrbitRecord> find_periodic_orbits(const HamiltonianSystem& sys,
                                                      const EMLagrangian* L, int k,
                                                      const OrbitSearchOptions& opts = {});

/// Average Lagrangian action (1/k) int_0^k L(t, q, v) of a periodic orbit.
double orbit_average_action(const EMLagrangian& L, const OrbitSegment& orbit, double span);

struct BetaCurve {
    struct Bin {
        double r_center = 0;
        double beta_hat = 0;
        int witness = -1;  // record index
    };
    std::vector<Bin> bins;                          // populated bins only
    std::vector<std::pair<double, double>> hull;    // lower convex hull of (r, action)
    bool hull_convex = false;
    double a1 = 0, A1 = 0, a2 = 0, A2 = 0;          // a1 r^2 - A1 <= hull <= a2 r^2 + A2
};

/// Empirical Mather-style beta curve over periodic-orbit records: per-bin
/// minimal action, lower convex hull, and a bracketing quadratic envelope on
/// the populated range. beta_hat is an upper estimator of beta (the records
/// range over a strict subset of the invariant measures).
BetaCurve beta_estimate(const std::vector<PeriodicOrbitRecord>& records, double r_max = -1,
                        double bin_width = 0.02);

struct WitnessReport {
    double r = 0;
    // 0: direct witness; 1: approximating sequence; 2: inconclusive.
    int status = 2;
    int witness = -1;
    double witness_mu = 0, witness_action = 0, second_moment = 0;
    bool action_bound_ok = false;
    double action_bound_C = 0;
    std::vector<int> sequence;  // record indices with growing minimal periods
    std::string note;
};

/// Desk-scale search (not a proof): looks for a contractible record with
/// |bott - r| <= tol_r, else for a sequence with increasing minimal periods
/// approaching r; reports moments and the quadratic action bound.
WitnessReport theorem_main_witness(const std::vector<PeriodicOrbitRecord>& records,
                                   const BetaCurve& beta, double r, double tol_r = 0.02);

/// Libration period 4 K(sqrt((1+E)/2)) of the pendulum at energy E in (-1,1).
double pendulum_libration_period(double energy);

struct SweepRow {
    double energy = 0;
    double period = 0;   // measured first-return period
    double mu_hat = 0;   // index estimate over whole periods
    double action = 0;   // average Lagrangian action over the horizon
};

/// Librating-orbit sweep: energies chosen so the index targets fill
/// [mu_lo, 1/pi - margin] uniformly; the reported mu_hat comes from the
/// crossing computation over >= horizon_min time units, not from the target.
std::vector<SweepRow> pendulum_librating_sweep(int count, double horizon_min = 150.0,
                                               double mu_lo = 0.012);

} // namespace msl
