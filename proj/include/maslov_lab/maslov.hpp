#pragma once

#include <stdexcept>

#include "maslov_lab/half_int.hpp"
#include "maslov_lab/paths.hpp"

namespace msl {

/// Raised when a crossing stays non-regular after the perturbation fallback.
/// The index is defined for such paths, but not stably computable; we refuse
/// rather than return a silently wrong value.
class DegeneratePathError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CrossingRecord {
    double time = 0;
    int intersection_dim = 0;
    int signature = 0;
    bool is_endpoint = false;
};

struct IndexResult {
    HalfInt value;
    std::vector<CrossingRecord> crossings;
    int refinements_used = 0;
    bool degenerate_flag = false;  // set when the zero-axiom branch was taken
};

/// dim(span F cap span G), computed from the singular values of the stacked
/// frame [F G] below tol. For G the vertical this equals n - rank(Q-block).
int intersection_dimension(const LagrangianFrame& F, const LagrangianFrame& G,
                           double tol = -1.0);

/// Crossing form at t*: the symmetric matrix of Q(v) = d/dt omega0(v, w(t,v))
/// on an orthonormal basis of lambda(t*) cap lambda0, evaluated by centered
/// (interior) or one-sided (endpoint) finite differences with step h.
/// h <= 0 selects the default max(1e-6*span, 1e-4*local grid spacing).
Mat crossing_form(const LagrangianPath& path, const LagrangianFrame& lambda0,
                  double tstar, double h = -1.0);

/// Robbin-Salamon Maslov index of the path against lambda0:
///     mu = 1/2 sign G(a) + sum_{a<t<b} sign G(t) + 1/2 sign G(b),
/// crossings located by bracketing sign changes and minima of the adapted
/// Q-block determinant, with adaptive grid refinement until the crossing
/// multiset stabilizes on two consecutive refinements. Exact as HalfInt.
IndexResult maslov_index(const LagrangianPath& path, const LagrangianFrame& lambda0);

/// mu_CZ(Phi) = mu(graf Phi, Delta) in the twisted product space. When
/// Phi(a) = I and det(Phi(b) - I) != 0 the result is an integer (asserted).
IndexResult conley_zehnder(const SymplecticPath& path);

/// mu_CZ(Phi) - mu(Phi lambda0, lambda0): path-independent given endpoints,
/// with |defect| <= 2n.
HalfInt hormander_defect(const SymplecticPath& path, const LagrangianFrame& lambda0,
                         IndexResult* cz_out = nullptr, IndexResult* mas_out = nullptr);

} // namespace msl
