#include "maslov_lab/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace msl {

void HamiltonianSystem::make_fd_derivatives(double step) {
    derivatives_analytic = false;
    auto Hf = H;
    const int dim = 2 * n;
    grad = [Hf, dim, step](double t, const Vec& x) {
        Vec g(dim);
        for (int i = 0; i < dim; ++i) {
            Vec xp = x, xm = x;
            const double h = step * (1.0 + std::abs(x(i)));
            xp(i) += h;
            xm(i) -= h;
            g(i) = (Hf(t, xp) - Hf(t, xm)) / (2 * h);
        }
        return g;
    };
    hess = [Hf, dim, step](double t, const Vec& x) {
        Mat Hm(dim, dim);
        const double h0 = std::sqrt(step);
        for (int i = 0; i < dim; ++i) {
            for (int j = i; j < dim; ++j) {
                const double hi = h0 * (1.0 + std::abs(x(i)));
                const double hj = h0 * (1.0 + std::abs(x(j)));
                Vec xa = x, xb = x, xc = x, xd = x;
                xa(i) += hi; xa(j) += hj;
                xb(i) += hi; xb(j) -= hj;
                xc(i) -= hi; xc(j) += hj;
                xd(i) -= hi; xd(j) -= hj;
                Hm(i, j) = Hm(j, i) =
                    (Hf(t, xa) - Hf(t, xb) - Hf(t, xc) + Hf(t, xd)) / (4 * hi * hj);
            }
        }
        return Mat(0.5 * (Hm + Hm.transpose()));
    };
}

Vec vector_field(const HamiltonianSystem& sys, double t, const Vec& x) {
    Vec g = sys.grad(t, x);
    if (!g.allFinite()) throw std::runtime_error("vector_field: non-finite derivatives");
    const int n = sys.n;
    Vec f(2 * n);
    f.head(n) = g.tail(n);   // qdot = H_p
    f.tail(n) = -g.head(n);  // pdot = -H_q
    return f;
}

Mat variational_matrix(const HamiltonianSystem& sys, double t, const Vec& x) {
    const int n = sys.n;
    Mat H2 = sys.hess(t, x);
    Mat K(2 * n, 2 * n);
    K.topLeftCorner(n, n) = H2.bottomLeftCorner(n, n);       //  H_pq
    K.topRightCorner(n, n) = H2.bottomRightCorner(n, n);     //  H_pp
    K.bottomLeftCorner(n, n) = -H2.topLeftCorner(n, n);      // -H_qq
    K.bottomRightCorner(n, n) = -H2.topRightCorner(n, n);    // -H_qp
    return K;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Stepper {
    const HamiltonianSystem& sys;
    int n;
    int dim;  // 2n + 4n^2

    Vec rhs(double t, const Vec& y) const {
        Vec x = y.head(2 * n);
        Mat Phi = Eigen::Map<const Mat>(y.data() + 2 * n, 2 * n, 2 * n);
        Vec f(dim);
        f.head(2 * n) = vector_field(sys, t, x);
        Mat K = variational_matrix(sys, t, x);
        Eigen::Map<Mat>(f.data() + 2 * n, 2 * n, 2 * n) = K * Phi;
        return f;
    }

    double k_norm(double t, const Vec& y) const {
        Vec x = y.head(2 * n);
        return variational_matrix(sys, t, x).cwiseAbs().rowwise().sum().maxCoeff();
    }
};

double error_norm(const Vec& err, const Vec& y0, const Vec& y1, double tol) {
    double s = 0;
    for (int i = 0; i < err.size(); ++i) {
        const double sc = tol + tol * std::max(std::abs(y0(i)), std::abs(y1(i)));
        const double e = err(i) / sc;
        s += e * e;
    }
    return std::sqrt(s / err.size());
}

} // namespace

OrbitSegment integrate_orbit(const HamiltonianSystem& sys, double s, const Vec& x0,
                             double T, const IntegrateOptions& opts) {
    if (!(T > 0)) throw std::invalid_argument("integrate_orbit: need T > 0");
    const double tol = opts.tol > 0 ? opts.tol : tols().integration;
    const int n = sys.n;
    const int dim = 2 * n + 4 * n * n;
    Stepper st{sys, n, dim};

    OrbitSegment orb;
    orb.sys = &sys;
    orb.s0 = s;
    orb.x0 = x0;
    orb.tol_used = tol;

    Vec y(dim);
    y.head(2 * n) = x0;
    Eigen::Map<Mat>(y.data() + 2 * n, 2 * n, 2 * n) = Mat::Identity(2 * n, 2 * n);
    double t = s;
    const double tend = s + T;

    const double H0 = sys.H(s, x0);
    orb.times.push_back(t);
    orb.states.push_back(x0);
    orb.transfers.push_back(Mat::Identity(2 * n, 2 * n));

    Vec k1 = st.rhs(t, y);
    double dt = std::min(T, 0.01);
    {
        const double kk = st.k_norm(t, y);
        if (kk > 0) dt = std::min(dt, opts.max_transfer_rotation / kk);
    }

    const double dt_min = 1e-14 * std::max(T, 1.0);
    while (t < tend) {
        dt = std::min(dt, tend - t);
        Vec k2 = st.rhs(t + c2 * dt, y + dt * (a21 * k1));
        Vec k3 = st.rhs(t + c3 * dt, y + dt * (a31 * k1 + a32 * k2));
        Vec k4 = st.rhs(t + c4 * dt, y + dt * (a41 * k1 + a42 * k2 + a43 * k3));
        Vec k5 = st.rhs(t + c5 * dt, y + dt * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        Vec k6 = st.rhs(t + dt, y + dt * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        Vec ynew = y + dt * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        Vec k7 = st.rhs(t + dt, ynew);
        Vec err = dt * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double en = error_norm(err, y, ynew, tol);
        if (en <= 1.0) {
            t += dt;
            y = ynew;
            k1 = k7;  // FSAL
            ++orb.stats.steps;
            Mat Phi = Eigen::Map<const Mat>(y.data() + 2 * n, 2 * n, 2 * n);
            const double res = symplectic_residual(Phi);
            orb.stats.max_symplectic_residual = std::max(orb.stats.max_symplectic_residual, res);
            if (res > tols().symp / 10) {
                Phi = resymplectify(Phi).matrix();
                Eigen::Map<Mat>(y.data() + 2 * n, 2 * n, 2 * n) = Phi;
            }
            Vec x = y.head(2 * n);
            if (x.cwiseAbs().maxCoeff() > opts.blowup_norm)
                throw std::runtime_error("integrate_orbit: orbit norm above blow-up bound");
            if (sys.autonomous)
                orb.stats.energy_drift =
                    std::max(orb.stats.energy_drift, std::abs(sys.H(t, x) - H0));
            orb.times.push_back(t);
            orb.states.push_back(x);
            orb.transfers.push_back(Phi);
        } else {
            ++orb.stats.rejected;
        }
        double fac = 0.9 * std::pow(std::max(en, 1e-10), -0.2);
        fac = std::clamp(fac, 0.2, 5.0);
        dt *= fac;
        const double kk = st.k_norm(t, y);
        if (kk > 0) dt = std::min(dt, opts.max_transfer_rotation / kk);
        if (dt < dt_min)
            throw std::runtime_error("integrate_orbit: step size underflow");
    }
    return orb;
}

namespace {

// Re-integrates from the nearest stored sample; deterministic dense output.
std::pair<Vec, Mat> dense_eval(const OrbitSegment& orb, double t) {
    const auto& ts = orb.times;
    if (t <= ts.front() + 1e-15) return {orb.states.front(), orb.transfers.front()};
    if (t >= ts.back() - 1e-15) return {orb.states.back(), orb.transfers.back()};
    auto it = std::upper_bound(ts.begin(), ts.end(), t);
    int i = static_cast<int>(it - ts.begin()) - 1;
    i = std::clamp(i, 0, static_cast<int>(ts.size()) - 1);
    if (std::abs(ts[i] - t) < 1e-15 * std::max(1.0, std::abs(t)))
        return {orb.states[i], orb.transfers[i]};

    const HamiltonianSystem& sys = *orb.sys;
    IntegrateOptions o;
    o.tol = orb.tol_used / 10;
    OrbitSegment seg = integrate_orbit(sys, ts[i], orb.states[i], t - ts[i], o);
    Mat Phi = seg.transfers.back() * orb.transfers[i];
    if (symplectic_residual(Phi) > tols().symp / 10) Phi = resymplectify(Phi).matrix();
    return {seg.states.back(), Phi};
}

} // namespace

Vec OrbitSegment::state_at(double t) const { return dense_eval(*this, t).first; }
Mat OrbitSegment::transfer_at(double t) const { return dense_eval(*this, t).second; }

LagrangianPath vertical_evolution(std::shared_ptr<const OrbitSegment> orbit) {
    const int n = orbit->sys->n;
    Mat V = vertical_frame(n).columns();
    std::vector<Mat> frames(orbit->transfers.size());
    for (size_t i = 0; i < orbit->transfers.size(); ++i) frames[i] = orbit->transfers[i] * V;
    auto ev = [orbit, V](double t) { return Mat(orbit->transfer_at(t) * V); };
    return LagrangianPath(orbit->times, std::move(frames), std::move(ev));
}

SymplecticPath transfer_path(std::shared_ptr<const OrbitSegment> orbit) {
    auto ev = [orbit](double t) { return orbit->transfer_at(t); };
    return SymplecticPath(orbit->times, orbit->transfers, std::move(ev));
}

HalfInt mu_t(const HamiltonianSystem& sys, double s, const Vec& x0, double t,
             IndexResult* detail) {
    if (t < 0) throw std::invalid_argument("mu_t: need t >= 0");
    const int n = sys.n;
    if (t == 0) {
        // Length-zero path: one-sided crossing form of the initial crossing is
        // H_pp(s, x0) on the vertical; its half-signature minus n/2.
        Mat Hpp = sys.hess(s, x0).bottomRightCorner(n, n);
        int zeros = 0;
        Eigen::SelfAdjointEigenSolver<Mat> es(Hpp);
        int sig = 0;
        const double scale = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
        for (int i = 0; i < n; ++i) {
            if (std::abs(es.eigenvalues()(i)) < tols().cross * scale)
                ++zeros;
            else
                sig += es.eigenvalues()(i) > 0 ? 1 : -1;
        }
        if (detail) {
            detail->value = HalfInt::from_doubled(sig - n);
            detail->crossings = {{s, n, sig, true}};
        }
        return HalfInt::from_doubled(sig - n);
    }
    auto orbit = std::make_shared<OrbitSegment>(integrate_orbit(sys, s, x0, t));
    IndexResult r = maslov_index(vertical_evolution(orbit), vertical_frame(n));
    if (detail) *detail = r;
    return r.value - HalfInt::from_doubled(n);
}

double phase_distance(const HamiltonianSystem& sys, const Vec& x, const Vec& y) {
    const int n = sys.n;
    double d = 0;
    for (int i = 0; i < 2 * n; ++i) {
        double diff = x(i) - y(i);
        if (sys.chart == Chart::torus_angles && i < n) {
            diff = std::remainder(diff, 2 * M_PI);
        }
        d = std::max(d, std::abs(diff));
    }
    return d;
}

MonodromyResult monodromy_index(const HamiltonianSystem& sys, const Vec& x0, int k) {
    if (k < 1) throw std::invalid_argument("monodromy_index: need k >= 1");
    auto orbit = std::make_shared<OrbitSegment>(
        integrate_orbit(sys, 0.0, x0, static_cast<double>(k)));
    if (phase_distance(sys, orbit->states.back(), x0) > tols().periodic * 100)
        throw std::invalid_argument("monodromy_index: point is not k-periodic");
    MonodromyResult r;
    r.detail = conley_zehnder(transfer_path(orbit));
    r.mu_cz = r.detail.value;
    r.period_map = orbit->transfers.back();
    return r;
}

} // namespace msl
