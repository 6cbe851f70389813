#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "maslov_lab/maslov.hpp"

namespace msl {

struct SuiteResult {
    std::string name;
    int cases = 0;
    int failures = 0;
    double seconds = 0;
    std::vector<std::string> notes;

    bool passed() const { return failures == 0 && cases > 0; }
};

// Maslov axiom suites; each runs `cases` seeded random cases at dimension n
// with exact HalfInt equality checks. Ill-conditioned draws (crossings too
// close to endpoints or near-degenerate forms) are redrawn deterministically.
SuiteResult verify_naturality(int n, int cases, std::uint64_t seed);
SuiteResult verify_juxtaposition(int n, int cases, std::uint64_t seed);
SuiteResult verify_product(int n, int cases, std::uint64_t seed);
SuiteResult verify_homotopy_reparam(int n, int cases, std::uint64_t seed);
SuiteResult verify_localization(int n, int cases, std::uint64_t seed);
SuiteResult verify_zero(int n, int cases, std::uint64_t seed);

std::vector<SuiteResult> verify_axioms(const std::vector<int>& dims, int cases,
                                       std::uint64_t seed);

/// |mu_CZ - mu(Phi lambda0, lambda0)| <= 2n over random paths, plus defect
/// equality across `pairs` endpoint-matched path pairs.
SuiteResult verify_hormander(int n, int cases, int pairs, std::uint64_t seed);

/// |mu_{t+t'} - mu_t - mu_{t'} o phi_t| <= 2n on pendulum orbits, exact
/// HalfInt arithmetic, t,t' in [0, 20].
SuiteResult verify_subadditivity(int orbit_count, std::uint64_t seed);

/// Pathwise Lemma-1 inequality on the magnetic torus over random Fourier
/// loops and k in {1..k_max}.
SuiteResult verify_lemma1(int loop_count, int k_max, std::uint64_t seed);

/// Slow-reparametrization bound, endpoint exactness and length preservation.
SuiteResult verify_slow_reparam(int loop_count, std::uint64_t seed);

/// Helpers shared with tests: seeded random Lagrangian / symplectic paths.
LagrangianPath random_lagrangian_path(int n, std::uint64_t seed, int samples = 65);
SymplecticPath random_symplectic_path(int n, std::uint64_t seed, int samples = 65);
LagrangianFrame random_lagrangian_frame(int n, std::uint64_t seed);

} // namespace msl
