#pragma once

#include <cstdint>

#include "maslov_lab/types.hpp"

namespace msl {

/// Standard symplectic matrix J on R^{2n} in the (q,p) block ordering, fixed
/// by omega0 = sum dp^j ^ dq^j:
///
///     omega0(u,v) = u^T J v = <p_u, q_v> - <p_v, q_u>,   J = [[0,-I],[I,0]].
///
/// Every sign-sensitive computation in the library references this constant.
Mat standard_form(int n);

/// omega0(u,v) for vectors in R^{2n}.
double omega(const Vec& u, const Vec& v);

/// ||M^T J M - J||_inf normalized by max(1, ||M||_inf^2). The normalization
/// keeps the residual meaningful for hyperbolic transfers over long horizons,
/// whose entries grow like e^T.
double symplectic_residual(const Mat& M);

/// True iff M is square of even dimension and symplectic within tol.
/// Throws on odd-dimensional input.
bool is_symplectic(const Mat& M, double tol);

class SymplecticMatrix {
public:
    SymplecticMatrix(Mat m, double tol);
    explicit SymplecticMatrix(Mat m);

    int n() const { return n_; }
    const Mat& matrix() const { return m_; }
    double residual() const { return symplectic_residual(m_); }

private:
    int n_;
    Mat m_;
};

/// 2n x n frame of a Lagrangian subspace, rows ordered (q-block; p-block).
class LagrangianFrame {
public:
    LagrangianFrame(Mat columns, double tol_lagr, double tol_rank);
    explicit LagrangianFrame(Mat columns);

    int n() const { return n_; }
    const Mat& columns() const { return cols_; }
    Mat q_block() const { return cols_.topRows(n_); }
    Mat p_block() const { return cols_.bottomRows(n_); }

    /// Same subspace, orthonormal columns.
    LagrangianFrame orthonormalized() const;

    double isotropy_residual() const;
    double smallest_singular_value() const;

private:
    int n_;
    Mat cols_;
};

LagrangianFrame vertical_frame(int n);
LagrangianFrame horizontal_frame(int n);

/// Frame of {(q, Sq)} for symmetric S: Q-block = I, P-block = S.
LagrangianFrame graph_frame(const Mat& S);

/// Frame of {(Sp, p)} for symmetric S: Q-block = S, P-block = I. This is the
/// embedding on which the signature formula
///     mu = (sign S(b) - sign S(a)) / 2
/// against the vertical reference holds with the repo sign conventions; the
/// mirrored {(q,Sq)}-against-horizontal identity carries the opposite sign.
LagrangianFrame momentum_graph_frame(const Mat& S);

/// Twisted symplectic form on R^{4n} = R^{2n} x R^{2n} for which graphs of
/// symplectic maps are Lagrangian and the Conley-Zehnder sign convention is
/// compatible with the crossing form used in this library:
///
///     Omega((u1,u2),(v1,v2)) = omega0(u2,v2) - omega0(u1,v1).
struct DoubleForm {
    int n;

    double eval(const Vec& u, const Vec& v) const;

    /// Gram matrix of Omega (antisymmetric, 4n x 4n).
    Mat gram() const;

    /// Linear map T with Omega(u,v) = omega0_std(Tu, Tv) where omega0_std is
    /// the standard form on R^{4n}: T(q1,p1,q2,p2) = (q1,q2,-p1,p2) in the
    /// standard (Q,P) block layout.
    Mat to_standard() const;

    double residual(const Mat& frame) const;  // isotropy of a 4n x k frame
};

/// 4n x 2n frame of graf(Phi) = {(v, Phi v)} in (q1,p1,q2,p2) coordinates,
/// Lagrangian for DoubleForm (validated). Conjugate by DoubleForm::to_standard
/// to land in the standard symplectic R^{4n}.
Mat graph_of_symplectic(const SymplecticMatrix& Phi);

/// exp(J S) for a seeded random symmetric S with ||S||_inf <= norm_bound.
/// Lands in the identity component and depends smoothly on norm_bound.
SymplecticMatrix random_symplectic(int n, std::uint64_t seed, double norm_bound = 2.0);

/// Newton iteration on the defect M^T J M - J. Reduces the scale-normalized
/// residual below min(tol_symp, 1e-13); the correction is O(input residual).
/// Throws if the input residual exceeds 0.1.
SymplecticMatrix resymplectify(const Mat& M);

/// Interleaved embedding L(n') x L(n'') -> L(n'+n''): the (q,p) blocks of the
/// two frames are stacked so that graph_frame(S') (+) graph_frame(S'') equals
/// graph_frame(S' (+) S'') exactly.
LagrangianFrame direct_sum_frame(const LagrangianFrame& a, const LagrangianFrame& b);

/// Orthonormal symplectic matrix mapping the vertical frame onto lambda0.
/// Used to reduce Maslov computations to the vertical reference.
Mat vertical_to(const LagrangianFrame& lambda0);

} // namespace msl
