#include "maslov_lab/symplectic.hpp"

#include <random>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace msl {

Tolerances& tols() {
    static Tolerances t;
    return t;
}

Mat standard_form(int n) {
    if (n < 1) throw std::invalid_argument("standard_form: n must be >= 1");
    Mat J = Mat::Zero(2 * n, 2 * n);
    J.topRightCorner(n, n) = -Mat::Identity(n, n);
    J.bottomLeftCorner(n, n) = Mat::Identity(n, n);
    return J;
}

double omega(const Vec& u, const Vec& v) {
    const int n2 = static_cast<int>(u.size());
    if (n2 % 2 != 0 || v.size() != n2)
        throw std::invalid_argument("omega: vectors must share an even dimension");
    const int n = n2 / 2;
    // <p_u, q_v> - <p_v, q_u>
    return u.tail(n).dot(v.head(n)) - v.tail(n).dot(u.head(n));
}

double symplectic_residual(const Mat& M) {
    const int n2 = static_cast<int>(M.rows());
    const Mat J = standard_form(n2 / 2);
    const double scale = std::max(1.0, inf_norm(M) * inf_norm(M));
    return inf_norm(M.transpose() * J * M - J) / scale;
}

bool is_symplectic(const Mat& M, double tol) {
    if (M.rows() != M.cols()) throw std::invalid_argument("is_symplectic: matrix not square");
    if (M.rows() % 2 != 0) throw std::invalid_argument("is_symplectic: odd dimension");
    return symplectic_residual(M) <= tol;
}

SymplecticMatrix::SymplecticMatrix(Mat m, double tol) : m_(std::move(m)) {
    if (m_.rows() != m_.cols() || m_.rows() % 2 != 0)
        throw std::invalid_argument("SymplecticMatrix: need square even-dimensional matrix");
    n_ = static_cast<int>(m_.rows()) / 2;
    if (symplectic_residual(m_) > tol)
        throw std::invalid_argument("SymplecticMatrix: residual above tolerance");
}

SymplecticMatrix::SymplecticMatrix(Mat m) : SymplecticMatrix(std::move(m), tols().symp) {}

LagrangianFrame::LagrangianFrame(Mat columns, double tol_lagr, double tol_rank)
    : cols_(std::move(columns)) {
    if (cols_.rows() % 2 != 0 || cols_.cols() != cols_.rows() / 2)
        throw std::invalid_argument("LagrangianFrame: need 2n x n column matrix");
    n_ = static_cast<int>(cols_.cols());
    if (smallest_singular_value() <= tol_rank)
        throw std::invalid_argument("LagrangianFrame: rank-deficient frame");
    if (isotropy_residual() > tol_lagr)
        throw std::invalid_argument("LagrangianFrame: frame is not Lagrangian");
}

LagrangianFrame::LagrangianFrame(Mat columns)
    : LagrangianFrame(std::move(columns), tols().lagr, tols().rank) {}

LagrangianFrame LagrangianFrame::orthonormalized() const {
    Eigen::HouseholderQR<Mat> qr(cols_);
    Mat Q = qr.householderQ() * Mat::Identity(2 * n_, n_);
    return LagrangianFrame(std::move(Q));
}

double LagrangianFrame::isotropy_residual() const {
    const Mat J = standard_form(n_);
    const double scale = std::max(1.0, inf_norm(cols_) * inf_norm(cols_));
    return inf_norm(cols_.transpose() * J * cols_) / scale;
}

double LagrangianFrame::smallest_singular_value() const {
    Eigen::JacobiSVD<Mat> svd(cols_);
    return svd.singularValues().minCoeff() / std::max(1.0, svd.singularValues().maxCoeff());
}

LagrangianFrame vertical_frame(int n) {
    Mat f = Mat::Zero(2 * n, n);
    f.bottomRows(n) = Mat::Identity(n, n);
    return LagrangianFrame(std::move(f));
}

LagrangianFrame horizontal_frame(int n) {
    Mat f = Mat::Zero(2 * n, n);
    f.topRows(n) = Mat::Identity(n, n);
    return LagrangianFrame(std::move(f));
}

namespace {
void require_symmetric(const Mat& S, const char* who) {
    if (S.rows() != S.cols()) throw std::invalid_argument(std::string(who) + ": S not square");
    if (inf_norm(S - S.transpose()) > 1e-10 * std::max(1.0, inf_norm(S)))
        throw std::invalid_argument(std::string(who) + ": S not symmetric");
}
} // namespace

LagrangianFrame graph_frame(const Mat& S) {
    require_symmetric(S, "graph_frame");
    const int n = static_cast<int>(S.rows());
    Mat f(2 * n, n);
    f.topRows(n) = Mat::Identity(n, n);
    f.bottomRows(n) = S;
    return LagrangianFrame(std::move(f));
}

LagrangianFrame momentum_graph_frame(const Mat& S) {
    require_symmetric(S, "momentum_graph_frame");
    const int n = static_cast<int>(S.rows());
    Mat f(2 * n, n);
    f.topRows(n) = S;
    f.bottomRows(n) = Mat::Identity(n, n);
    return LagrangianFrame(std::move(f));
}

double DoubleForm::eval(const Vec& u, const Vec& v) const {
    if (u.size() != 4 * n || v.size() != 4 * n)
        throw std::invalid_argument("DoubleForm: need 4n-vectors");
    return omega(u.tail(2 * n), v.tail(2 * n)) - omega(u.head(2 * n), v.head(2 * n));
}

Mat DoubleForm::gram() const {
    Mat G = Mat::Zero(4 * n, 4 * n);
    G.topLeftCorner(2 * n, 2 * n) = -standard_form(n);
    G.bottomRightCorner(2 * n, 2 * n) = standard_form(n);
    return G;
}

Mat DoubleForm::to_standard() const {
    // (q1,p1,q2,p2) -> (q1,q2,-p1,p2): omega_std(Tu,Tv) = omega(u2,v2) - omega(u1,v1).
    Mat T = Mat::Zero(4 * n, 4 * n);
    T.block(0, 0, n, n) = Mat::Identity(n, n);
    T.block(n, 2 * n, n, n) = Mat::Identity(n, n);
    T.block(2 * n, n, n, n) = -Mat::Identity(n, n);
    T.block(3 * n, 3 * n, n, n) = Mat::Identity(n, n);
    return T;
}

double DoubleForm::residual(const Mat& frame) const {
    const double scale = std::max(1.0, inf_norm(frame) * inf_norm(frame));
    return inf_norm(frame.transpose() * gram() * frame) / scale;
}

Mat graph_of_symplectic(const SymplecticMatrix& Phi) {
    const int n2 = 2 * Phi.n();
    Mat f(2 * n2, n2);
    f.topRows(n2) = Mat::Identity(n2, n2);
    f.bottomRows(n2) = Phi.matrix();
    DoubleForm form{Phi.n()};
    if (form.residual(f) > tols().lagr)
        throw std::invalid_argument("graph_of_symplectic: input not symplectic");
    return f;
}

SymplecticMatrix random_symplectic(int n, std::uint64_t seed, double norm_bound) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Mat S(2 * n, 2 * n);
    for (int i = 0; i < 2 * n; ++i)
        for (int j = i; j < 2 * n; ++j) S(i, j) = S(j, i) = u(rng);
    const double nrm = inf_norm(S);
    if (nrm > 0) S *= (norm_bound * u(rng) * 0.5 + norm_bound * 0.5) / nrm;
    Mat K = standard_form(n) * S;
    Mat M = K.exp();
    return SymplecticMatrix(resymplectify(M));
}

SymplecticMatrix resymplectify(const Mat& M) {
    if (M.rows() != M.cols() || M.rows() % 2 != 0)
        throw std::invalid_argument("resymplectify: need square even-dimensional matrix");
    const int n = static_cast<int>(M.rows()) / 2;
    const Mat J = standard_form(n);
    // The gate is on the absolute defect: it bounds the size of the Newton
    // correction, so beyond 0.1 the first-order update is not trustworthy.
    if (inf_norm(M.transpose() * J * M - J) > 0.1)
        throw std::runtime_error("resymplectify: residual above 0.1, refusing to correct");
    Mat X = M;
    const double target = std::min(tols().symp, 1e-13);
    for (int it = 0; it < 12; ++it) {
        Mat E = X.transpose() * J * X - J;
        const double scale = std::max(1.0, inf_norm(X) * inf_norm(X));
        if (inf_norm(E) / scale <= target) break;
        // First-order correction: solve X^T J + J X = -E for X = (1/2) J E.
        X = X + 0.5 * X * (J * E);
    }
    return SymplecticMatrix(std::move(X), 10 * tols().symp);
}

LagrangianFrame direct_sum_frame(const LagrangianFrame& a, const LagrangianFrame& b) {
    const int na = a.n(), nb = b.n(), n = na + nb;
    Mat f = Mat::Zero(2 * n, n);
    f.block(0, 0, na, na) = a.q_block();
    f.block(na, na, nb, nb) = b.q_block();
    f.block(n, 0, na, na) = a.p_block();
    f.block(n + na, na, nb, nb) = b.p_block();
    return LagrangianFrame(std::move(f));
}

Mat vertical_to(const LagrangianFrame& lambda0) {
    const int n = lambda0.n();
    LagrangianFrame on = lambda0.orthonormalized();
    Mat X = on.q_block(), Y = on.p_block();
    // [[Y, X], [-X, Y]] is symplectic and orthogonal, and maps (0)xR^n to lambda0.
    Mat Psi(2 * n, 2 * n);
    Psi.topLeftCorner(n, n) = Y;
    Psi.topRightCorner(n, n) = X;
    Psi.bottomLeftCorner(n, n) = -X;
    Psi.bottomRightCorner(n, n) = Y;
    return Psi;
}

} // namespace msl
