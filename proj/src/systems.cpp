#include "maslov_lab/systems.hpp"

#include <cmath>
#include <stdexcept>

namespace msl {

double EMLagrangian::value(double t, const Vec& q, const Vec& v) const {
    return 0.5 * v.squaredNorm() + A(t, q).dot(v) - V(t, q);
}

double EMLagrangian::scan(const std::function<double(double, const Vec&)>& f) const {
    const int res = scan_resolution;
    const int slices = time_dependent ? scan_time_slices : 1;
    const double hw = (chart == Chart::torus_angles) ? M_PI : scan_halfwidth;
    double best = 0;
    Vec q(n);
    // Dense scan of the fundamental domain; resolution is documented and
    // configurable, since exact sup norms are unavailable for Fourier data.
    std::vector<int> idx(n, 0);
    const long long total = static_cast<long long>(std::pow(res, n));
    for (int ts = 0; ts < slices; ++ts) {
        const double t = static_cast<double>(ts) / slices;
        for (long long flat = 0; flat < total; ++flat) {
            long long rem = flat;
            for (int d = 0; d < n; ++d) {
                idx[d] = static_cast<int>(rem % res);
                rem /= res;
            }
            for (int d = 0; d < n; ++d)
                q(d) = -hw + 2 * hw * (idx[d] + 0.5) / res;
            best = std::max(best, f(t, q));
        }
    }
    return best;
}

double EMLagrangian::sup_A() const {
    if (!supA_) supA_ = scan([this](double t, const Vec& q) { return A(t, q).norm(); });
    return *supA_;
}

double EMLagrangian::sup_V() const {
    if (!supV_) supV_ = scan([this](double t, const Vec& q) { return std::abs(V(t, q)); });
    return *supV_;
}

double EMLagrangian::sup_dtA() const {
    if (!supdtA_) supdtA_ = scan([this](double t, const Vec& q) { return dtA(t, q).norm(); });
    return *supdtA_;
}

double EMLagrangian::sup_gradV() const {
    if (!supgradV_)
        supgradV_ = scan([this](double t, const Vec& q) { return gradV(t, q).norm(); });
    return *supgradV_;
}

double EMLagrangian::growth_c1() const {
    // d/dt |v|^2 = 2<-dtA - gradV, v> along solutions (the magnetic term is
    // antisymmetric), so c1 = sup|dtA| + sup|gradV| works.
    return sup_dtA() + sup_gradV();
}

LegendrePoint legendre_map(const EMLagrangian& L, double t, const Vec& q, const Vec& v) {
    return {t, q, Vec(v + L.A(t, q))};
}

Vec legendre_velocity(const EMLagrangian& L, double t, const Vec& q, const Vec& p) {
    return p - L.A(t, q);
}

HamiltonianSystem fenchel_hamiltonian(const EMLagrangian& L) {
    HamiltonianSystem sys;
    sys.n = L.n;
    sys.chart = L.chart;
    sys.autonomous = !L.time_dependent;
    sys.derivatives_analytic = true;
    EMLagrangian lag = L;  // value copy shared by the closures
    const int n = L.n;
    sys.H = [lag, n](double t, const Vec& x) {
        Vec q = x.head(n), p = x.tail(n);
        Vec u = p - lag.A(t, q);
        return 0.5 * u.squaredNorm() + lag.V(t, q);
    };
    sys.grad = [lag, n](double t, const Vec& x) {
        Vec q = x.head(n), p = x.tail(n);
        Vec u = p - lag.A(t, q);
        Mat GA = lag.gradA(t, q);
        Vec g(2 * n);
        g.head(n) = -GA.transpose() * u + lag.gradV(t, q);
        g.tail(n) = u;
        return g;
    };
    sys.hess = [lag, n](double t, const Vec& x) {
        Vec q = x.head(n), p = x.tail(n);
        Vec u = p - lag.A(t, q);
        Mat GA = lag.gradA(t, q);
        auto HA = lag.hessA(t, q);
        Mat H2(2 * n, 2 * n);
        Mat Hqq = GA.transpose() * GA + lag.hessV(t, q);
        for (int l = 0; l < n; ++l) Hqq -= u(l) * HA[l];
        H2.topLeftCorner(n, n) = 0.5 * (Hqq + Hqq.transpose());
        H2.topRightCorner(n, n) = -GA.transpose();
        H2.bottomLeftCorner(n, n) = -GA;
        H2.bottomRightCorner(n, n) = Mat::Identity(n, n);
        return H2;
    };
    return sys;
}

namespace {

double param(const std::map<std::string, double>& p, const std::string& key, double dflt) {
    auto it = p.find(key);
    return it == p.end() ? dflt : it->second;
}

EMLagrangian zero_field_lagrangian(int n, Chart chart) {
    EMLagrangian L;
    L.n = n;
    L.chart = chart;
    L.time_dependent = false;
    L.A = [n](double, const Vec&) { return Vec(Vec::Zero(n)); };
    L.gradA = [n](double, const Vec&) { return Mat(Mat::Zero(n, n)); };
    L.hessA = [n](double, const Vec&) { return std::vector<Mat>(n, Mat::Zero(n, n)); };
    L.dtA = [n](double, const Vec&) { return Vec(Vec::Zero(n)); };
    L.V = [](double, const Vec&) { return 0.0; };
    L.gradV = [n](double, const Vec&) { return Vec(Vec::Zero(n)); };
    L.hessV = [n](double, const Vec&) { return Mat(Mat::Zero(n, n)); };
    return L;
}

SystemBundle pendulum_system() {
    EMLagrangian L = zero_field_lagrangian(1, Chart::torus_angles);
    L.V = [](double, const Vec& q) { return -std::cos(q(0)); };
    L.gradV = [](double, const Vec& q) {
        Vec g(1);
        g(0) = std::sin(q(0));
        return g;
    };
    L.hessV = [](double, const Vec& q) {
        Mat h(1, 1);
        h(0, 0) = std::cos(q(0));
        return h;
    };
    SystemBundle b{fenchel_hamiltonian(L), L};
    b.sys.name = "pendulum";
    return b;
}

SystemBundle forced_pendulum_system(double eps) {
    EMLagrangian L = zero_field_lagrangian(1, Chart::torus_angles);
    L.time_dependent = true;
    auto amp = [eps](double t) { return 1.0 + eps * std::cos(2 * M_PI * t); };
    L.V = [amp](double t, const Vec& q) { return -amp(t) * std::cos(q(0)); };
    L.gradV = [amp](double t, const Vec& q) {
        Vec g(1);
        g(0) = amp(t) * std::sin(q(0));
        return g;
    };
    L.hessV = [amp](double t, const Vec& q) {
        Mat h(1, 1);
        h(0, 0) = amp(t) * std::cos(q(0));
        return h;
    };
    SystemBundle b{fenchel_hamiltonian(L), L};
    b.sys.name = "forced_pendulum";
    return b;
}

SystemBundle harmonic_system(const std::map<std::string, double>& params) {
    std::vector<double> om;
    for (int i = 1;; ++i) {
        auto it = params.find("omega" + std::to_string(i));
        if (it == params.end()) break;
        om.push_back(it->second);
    }
    if (om.empty()) om = {1.0};
    const int n = static_cast<int>(om.size());
    HamiltonianSystem sys;
    sys.n = n;
    sys.chart = Chart::euclidean;
    sys.autonomous = true;
    sys.name = "harmonic_oscillator";
    sys.H = [om, n](double, const Vec& x) {
        double h = 0;
        for (int i = 0; i < n; ++i) h += 0.5 * om[i] * (x(i) * x(i) + x(n + i) * x(n + i));
        return h;
    };
    sys.grad = [om, n](double, const Vec& x) {
        Vec g(2 * n);
        for (int i = 0; i < n; ++i) {
            g(i) = om[i] * x(i);
            g(n + i) = om[i] * x(n + i);
        }
        return g;
    };
    sys.hess = [om, n](double, const Vec&) {
        Vec d(2 * n);
        for (int i = 0; i < n; ++i) d(i) = d(n + i) = om[i];
        return Mat(d.asDiagonal());
    };
    return {sys, std::nullopt};
}

SystemBundle saddle_system() {
    HamiltonianSystem sys;
    sys.n = 1;
    sys.chart = Chart::euclidean;
    sys.autonomous = true;
    sys.name = "inverted_saddle";
    sys.H = [](double, const Vec& x) { return x(0) * x(1); };
    sys.grad = [](double, const Vec& x) {
        Vec g(2);
        g(0) = x(1);
        g(1) = x(0);
        return g;
    };
    sys.hess = [](double, const Vec&) {
        Mat h(2, 2);
        h << 0, 1, 1, 0;
        return h;
    };
    return {sys, std::nullopt};
}

SystemBundle geodesic_system() {
    EMLagrangian L = zero_field_lagrangian(2, Chart::torus_angles);
    SystemBundle b{fenchel_hamiltonian(L), L};
    b.sys.name = "flat_torus_geodesic";
    return b;
}

SystemBundle magnetic_torus_system(const std::map<std::string, double>& params) {
    const bool uniform = param(params, "uniform", 0.0) != 0.0;
    const int n = 2;
    EMLagrangian L = zero_field_lagrangian(n, uniform ? Chart::euclidean : Chart::torus_angles);
    if (uniform) {
        // Symmetric-gauge constant field: A = (b/2)(-q2, q1); Larmor circles
        // with cyclotron frequency b.
        const double b = param(params, "b", 1.0);
        L.A = [b](double, const Vec& q) {
            Vec a(2);
            a << -0.5 * b * q(1), 0.5 * b * q(0);
            return a;
        };
        L.gradA = [b](double, const Vec&) {
            Mat g(2, 2);
            g << 0, -0.5 * b, 0.5 * b, 0;
            return g;
        };
        L.scan_halfwidth = 1.0;  // sup norms only used on the scanned window
    } else {
        const double a1 = param(params, "a1", 0.3);
        const double a2 = param(params, "a2", 0.2);
        const double v0 = param(params, "v0", 0.5);
        L.A = [a1, a2](double, const Vec& q) {
            Vec a(2);
            a << a1 * std::sin(q(1)), a2 * std::sin(q(0));
            return a;
        };
        L.gradA = [a1, a2](double, const Vec& q) {
            Mat g(2, 2);
            g << 0, a1 * std::cos(q(1)), a2 * std::cos(q(0)), 0;
            return g;
        };
        L.hessA = [a1, a2](double, const Vec& q) {
            std::vector<Mat> h(2, Mat::Zero(2, 2));
            h[0](1, 1) = -a1 * std::sin(q(1));
            h[1](0, 0) = -a2 * std::sin(q(0));
            return h;
        };
        L.V = [v0](double, const Vec& q) { return v0 * std::cos(q(0)) * std::cos(q(1)); };
        L.gradV = [v0](double, const Vec& q) {
            Vec g(2);
            g << -v0 * std::sin(q(0)) * std::cos(q(1)), -v0 * std::cos(q(0)) * std::sin(q(1));
            return g;
        };
        L.hessV = [v0](double, const Vec& q) {
            Mat h(2, 2);
            h(0, 0) = -v0 * std::cos(q(0)) * std::cos(q(1));
            h(0, 1) = h(1, 0) = v0 * std::sin(q(0)) * std::sin(q(1));
            h(1, 1) = -v0 * std::cos(q(0)) * std::cos(q(1));
            return h;
        };
    }
    SystemBundle b{fenchel_hamiltonian(L), L};
    b.sys.name = "magnetic_torus";
    return b;
}

} // namespace

SystemBundle make_system(const std::string& name,
                         const std::map<std::string, double>& params) {
    if (name == "pendulum") return pendulum_system();
    if (name == "harmonic_oscillator") return harmonic_system(params);
    if (name == "inverted_saddle") return saddle_system();
    if (name == "flat_torus_geodesic") return geodesic_system();
    if (name == "magnetic_torus") return magnetic_torus_system(params);
    if (name == "forced_pendulum")
        return forced_pendulum_system(param(params, "epsilon", 0.1));
    throw std::invalid_argument("make_system: unknown system '" + name + "'");
}

std::vector<std::string> catalog_names() {
    return {"pendulum",           "harmonic_oscillator", "inverted_saddle",
            "flat_torus_geodesic", "magnetic_torus",      "forced_pendulum"};
}

GrowthCheckResult growth_check(const EMLagrangian& L, const OrbitSegment& orbit,
                               double c1_override) {
    GrowthCheckResult r;
    r.c1 = c1_override >= 0 ? c1_override : L.growth_c1();
    const int n = L.n;
    const double s0 = orbit.times.front();
    Vec q0 = orbit.states.front().head(n);
    Vec v0 = legendre_velocity(L, s0, q0, orbit.states.front().tail(n));
    const double base = 1.0 + v0.squaredNorm();
    for (size_t i = 0; i < orbit.times.size(); ++i) {
        const double t = orbit.times[i];
        Vec q = orbit.states[i].head(n);
        Vec v = legendre_velocity(L, t, q, orbit.states[i].tail(n));
        const double lhs = 1.0 + v.squaredNorm();
        const double rhs = base * std::exp(r.c1 * std::abs(t - s0));
        const double ratio = lhs / rhs;
        if (ratio > r.worst_ratio) {
            r.worst_ratio = ratio;
            r.worst_time = t;
        }
        if (lhs > rhs * (1.0 + 1e-9)) r.ok = false;
    }
    return r;
}

} // namespace msl
