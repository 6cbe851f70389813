#pragma once

#include <memory>

#include "maslov_lab/hamiltonian.hpp"

namespace msl {

/// Weighted sample measure on T x phase space.
struct DiscreteMeasure {
    struct Sample {
        double s;  // time in [0,1)
        Vec x;
        double w;
    };
    std::vector<Sample> samples;
    double first_moment_p = 0;
    double second_moment_p = 0;

    void recompute_moments();
    void validate() const;  // positive weights summing to 1
};

/// Uniform-in-time sample measure of a k-periodic orbit (integer k >= 1,
/// orbit integrated over [0,k]); sample count >= max(64 k, min_samples).
DiscreteMeasure measure_from_periodic_orbit(const OrbitSegment& orbit, int k,
                                            int min_samples = 64);

/// For autonomous systems: the arc measure of one (not necessarily integer)
/// period tau; invariant in the autonomous sense up to quadrature.
DiscreteMeasure measure_from_orbit_arc(const OrbitSegment& orbit, double tau,
                                       int samples = 64);

/// Convex mixture alpha eta1 + (1-alpha) eta2, samples concatenated in order
/// (so dyadic alphas mix exactly in sample arithmetic).
DiscreteMeasure mix(double alpha, const DiscreteMeasure& a, const DiscreteMeasure& b);

struct AsymptoticEstimate {
    double value = 0;
    double horizon = 0;
    double rigorous_halfwidth = -1;  // 2n/T when the measure branch applies
    std::vector<std::pair<double, double>> sequence;  // (t, mu_t / t) diagnostics
    bool rigorous = false;
    // Filled by bott_index_periodic:
    HalfInt mu_cz_period;     // mu_CZ^k of the base period
    bool bott2_checked = false;
    bool bott2_ok = false;
};

/// Bott index via the iterated period map: computes mu_CZ over [0, h_max k]
/// by concatenating transfer paths with powers of the period map, returns
/// mu_CZ^{h_max k}/(h_max k) with rigorous halfwidth 2n/(h_max k), and checks
/// |mu_CZ^k - k value| <= 2n (1 + 1/h_max).
AsymptoticEstimate bott_index_periodic(const HamiltonianSystem& sys,
                                       std::shared_ptr<const OrbitSegment> orbit, int k,
                                       int h_max);

/// mu_T / T along a horizon schedule; heuristic (no rigorous pointwise band),
/// convergence reported through the last-two-horizon spread in `sequence`.
AsymptoticEstimate asymptotic_index_point(const HamiltonianSystem& sys, double s,
                                          const Vec& x0,
                                          const std::vector<double>& T_schedule = {25, 50,
                                                                                   100, 200});

/// M_T(eta)/T with the rigorous band 2n/T for invariant measures; sample-wise
/// mu_T evaluations run in parallel with a deterministic reduction order.
AsymptoticEstimate asymptotic_index_measure(const HamiltonianSystem& sys,
                                            const DiscreteMeasure& eta, double T);

struct MomentDiagnostics {
    double first = 0;
    double second = 0;
    double tail_mass = 0;
    double cutoff = 0;
};

MomentDiagnostics moment_diagnostics(const DiscreteMeasure& eta, double cutoff = 10.0);

/// Push-forward defect diagnostic: transport samples by phi_1 and measure a
/// sliced transport discrepancy against the original cloud (seeded random
/// projection directions; 0 for exactly invariant sample sets).
double invariance_defect(const HamiltonianSystem& sys, const DiscreteMeasure& eta,
                         int directions = 8, std::uint64_t seed = 1);

} // namespace msl
