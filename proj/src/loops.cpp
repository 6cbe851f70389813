#include "maslov_lab/loops.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace msl {

Vec Loop::node_closed(int i) const {
    const int N = count();
    if (i < N) return nodes.row(i);
    Vec v = nodes.row(i % N);
    if (chart == Chart::torus_angles && winding.size() == dim())
        v += 2 * M_PI * (i / N) * winding.cast<double>();
    return v;
}

Vec Loop::segment_velocity(int i) const {
    return (node_closed(i + 1) - node_closed(i)) / dt();
}

double action(const EMLagrangian& L, const Loop& g) {
    const int N = g.count();
    const double h = g.dt();
    double sum = 0;
    for (int i = 0; i < N; ++i) {
        const double t0 = i * h, t1 = (i + 1) * h;
        Vec v = g.segment_velocity(i);
        sum += 0.5 * h * (L.value(t0, g.node_closed(i), v) + L.value(t1, g.node_closed(i + 1), v));
    }
    return sum / g.k;
}

double loop_length(const Loop& g) {
    const int N = g.count();
    double len = 0;
    for (int i = 0; i < N; ++i) len += (g.node_closed(i + 1) - g.node_closed(i)).norm();
    return len;
}

Loop iterate_loop(const Loop& g, int k) {
    if (k < 1) throw std::invalid_argument("iterate_loop: k >= 1");
    if (g.k != 1) throw std::invalid_argument("iterate_loop: base loop must have period 1");
    if (k == 1) return g;
    const int N = g.count();
    Loop out;
    out.k = k;
    out.chart = g.chart;
    out.winding = g.winding;
    out.nodes.resize(N * k, g.dim());
    // gamma_k(s_j) = gamma(s_j / k); the target grid subdivides each base
    // segment into k pieces, so polyline evaluation is exact.
    for (int j = 0; j < N * k; ++j) {
        const double u = static_cast<double>(j) / (N * k);  // base parameter in [0,1)
        const double pos = u * N;
        const int seg = static_cast<int>(std::floor(pos));
        const double th = pos - seg;
        Vec val = (1.0 - th) * g.node_closed(seg) + th * g.node_closed(seg + 1);
        out.nodes.row(j) = val;
    }
    return out;
}

Lemma1Result lemma1_check(const EMLagrangian& L, const Loop& g, int k) {
    Lemma1Result r;
    r.base_action = action(L, g);
    r.lhs = action(L, iterate_loop(g, k));
    r.c1 = 3.0 * L.sup_V() + 4.5 * L.sup_A() * L.sup_A();
    r.rhs = 2.0 / (static_cast<double>(k) * k) * r.base_action + r.c1;
    r.holds = r.lhs <= r.rhs + 1e-10 * (1.0 + std::abs(r.rhs));
    return r;
}

Loop random_fourier_loop(int n, std::uint64_t seed, int max_modes, int node_count,
                         double amplitude, Chart chart) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Mat a(max_modes, n), b(max_modes, n);
    Vec center(n);
    for (int i = 0; i < n; ++i) center(i) = u(rng);
    for (int m = 0; m < max_modes; ++m)
        for (int i = 0; i < n; ++i) {
            const double decay = amplitude / ((m + 1.0) * (m + 1.0));
            a(m, i) = decay * u(rng);
            b(m, i) = decay * u(rng);
        }
    Loop g;
    g.k = 1;
    g.chart = chart;
    g.winding = Eigen::VectorXi::Zero(n);
    g.nodes.resize(node_count, n);
    for (int j = 0; j < node_count; ++j) {
        const double t = static_cast<double>(j) / node_count;
        Vec q = center;
        for (int m = 0; m < max_modes; ++m) {
            const double w = 2 * M_PI * (m + 1) * t;
            q += a.row(m).transpose() * std::cos(w) + b.row(m).transpose() * std::sin(w);
        }
        g.nodes.row(j) = q;
    }
    return g;
}

SlowReparamResult slow_reparam(const Loop& g, int refine) {
    if (g.k != 1) throw std::invalid_argument("slow_reparam: period-1 loop expected");
    SlowReparamResult r;
    r.length_in = loop_length(g);
    r.sup_speed_bound = 1.0 + r.length_in;

    // Work on a refined polyline for quadrature accuracy; the refined nodes
    // lie on the original polyline so the length is unchanged.
    const int N = g.count() * std::max(1, refine);
    Mat fine(N, g.dim());
    for (int j = 0; j < N; ++j) {
        const double pos = static_cast<double>(j) / N * g.count();
        const int seg = static_cast<int>(std::floor(pos));
        const double th = pos - seg;
        fine.row(j) = (1.0 - th) * g.node_closed(seg) + th * g.node_closed(seg + 1);
    }
    Loop fg;
    fg.k = 1;
    fg.chart = g.chart;
    fg.winding = g.winding;
    fg.nodes = fine;

    // sigma(t) = int_0^t sqrt(1 + |v|^2) / total; piecewise linear with
    // strictly positive slope, so the inverse is again piecewise linear.
    const double h = fg.dt();
    std::vector<double> sigma(N + 1, 0.0);
    for (int i = 0; i < N; ++i) {
        const double sp = fg.segment_velocity(i).norm();
        sigma[i + 1] = sigma[i] + h * std::sqrt(1.0 + sp * sp);
    }
    const double total = sigma[N];
    for (auto& s : sigma) s /= total;
    sigma[N] = 1.0;  // exact endpoints
    r.sigma_start = sigma[0];
    r.sigma_end = sigma[N];

    // gamma1(u) = gamma(tau(u)) on a uniform grid in u. Resampling a polyline
    // cuts corners with a length deficit linear in the output spacing
    // (concentrated where the speed nearly vanishes), so the density adapts
    // until the measured deficit meets the 1e-6 length contract.
    const double length_budget = 5e-7 * (1.0 + r.length_in);
    Loop out;
    out.k = 1;
    out.chart = g.chart;
    out.winding = g.winding;
    for (int M = 16 * N;; M *= 2) {
        out.nodes.resize(M, g.dim());
        int seg = 0;
        for (int j = 0; j < M; ++j) {
            const double u = static_cast<double>(j) / M;
            while (seg + 1 < N && sigma[seg + 1] < u) ++seg;
            const double lo = sigma[seg], hi = sigma[seg + 1];
            const double th = (hi > lo) ? (u - lo) / (hi - lo) : 0.0;
            out.nodes.row(j) =
                (1.0 - th) * fg.node_closed(seg) + th * fg.node_closed(seg + 1);
        }
        r.length_out = loop_length(out);
        if (std::abs(r.length_out - r.length_in) <= length_budget || M >= (1 << 22)) break;
    }
    r.gamma1 = out;
    r.sup_speed = 0;
    for (int i = 0; i < out.count(); ++i)
        r.sup_speed = std::max(r.sup_speed, out.segment_velocity(i).norm());
    return r;
}

namespace {

QuadraticFormSpectrum spectrum_of(const Mat& B) {
    Eigen::SelfAdjointEigenSolver<Mat> es(B);
    QuadraticFormSpectrum s;
    const double scale = std::max(es.eigenvalues().cwiseAbs().maxCoeff(), 1e-300);
    const double tol_null = 1e-8 * scale;
    for (int i = 0; i < es.eigenvalues().size(); ++i) {
        const double ev = es.eigenvalues()(i);
        s.eigenvalues.push_back(ev);
        if (std::abs(ev) < tol_null)
            ++s.zero_count;
        else if (ev < 0)
            ++s.negative_count;
    }
    return s;
}

// Assembles the P1 stiffness of B(xi,eta) = int xi'.eta' + <C xi, eta'> +
// <C eta, xi'> + <P xi, eta> with element-midpoint coefficients.
Mat assemble(int elements, double span, int n, BoundaryCondition bc,
             const std::function<void(double, Mat&, Mat&)>& coeffs, double kinetic_scale) {
    const double h = span / elements;
    const int nodes = (bc == BoundaryCondition::dirichlet) ? elements - 1 : elements;
    Mat B = Mat::Zero(nodes * n, nodes * n);
    Mat C(n, n), P(n, n);
    auto node_index = [&](int i) -> int {
        if (bc == BoundaryCondition::dirichlet) return (i >= 1 && i <= elements - 1) ? i - 1 : -1;
        return i % elements;
    };
    for (int e = 0; e < elements; ++e) {
        const double tm = (e + 0.5) * h;
        coeffs(tm, C, P);
        // Local 2x2 block structure on dofs (xi_e, xi_{e+1}).
        Mat loc = Mat::Zero(2 * n, 2 * n);
        Mat I = Mat::Identity(n, n);
        loc.block(0, 0, n, n) += kinetic_scale / h * I;
        loc.block(0, n, n, n) += -kinetic_scale / h * I;
        loc.block(n, 0, n, n) += -kinetic_scale / h * I;
        loc.block(n, n, n, n) += kinetic_scale / h * I;
        Mat Ct = C.transpose();
        loc.block(0, 0, n, n) += -0.5 * (C + Ct);
        loc.block(0, n, n, n) += 0.5 * (Ct - C);
        loc.block(n, 0, n, n) += 0.5 * (C - Ct);
        loc.block(n, n, n, n) += 0.5 * (C + Ct);
        Mat Ps = 0.125 * h * (P + P.transpose());
        loc.block(0, 0, n, n) += Ps;
        loc.block(0, n, n, n) += Ps;
        loc.block(n, 0, n, n) += Ps;
        loc.block(n, n, n, n) += Ps;
        const int i0 = node_index(e), i1 = node_index(e + 1);
        const int map[2] = {i0, i1};
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                if (map[a] < 0 || map[b] < 0) continue;
                B.block(map[a] * n, map[b] * n, n, n) += loc.block(a * n, b * n, n, n);
            }
    }
    return 0.5 * (B + B.transpose());
}

QuadraticFormSpectrum stabilized_index(int initial_elements, double span, int n,
                                       BoundaryCondition bc,
                                       const std::function<void(double, Mat&, Mat&)>& coeffs,
                                       double kinetic_scale) {
    int m = initial_elements;
    int prev = -1, stable = 0;
    QuadraticFormSpectrum last;
    for (int round = 0; round < 8; ++round) {
        Mat B = assemble(m, span, n, bc, coeffs, kinetic_scale);
        last = spectrum_of(B);
        last.mesh_elements = m;
        if (last.negative_count == prev) {
            if (++stable >= 1) return last;
        } else {
            stable = 0;
        }
        prev = last.negative_count;
        m *= 2;
        if (m * n > 4096)
            throw std::runtime_error("second_variation_index: mesh cap reached before the "
                                     "negative count stabilized");
    }
    return last;
}

} // namespace

QuadraticFormSpectrum second_variation_index(const EMLagrangian& L, const OrbitSegment& orbit,
                                             double s, double t, BoundaryCondition bc,
                                             int initial_elements) {
    if (!(t > 0)) throw std::invalid_argument("second_variation_index: need t > 0");
    const int n = L.n;
    if (s < orbit.times.front() - 1e-9 || s + t > orbit.times.back() + 1e-9)
        throw std::invalid_argument("second_variation_index: window outside orbit");

    // Euler-Lagrange residual gate: dv/dt must match the magnetic/potential
    // force along the segment (finite differences on the dense output).
    {
        const double dh = std::min(1e-4, t / 64.0);
        for (int probe = 1; probe <= 4; ++probe) {
            const double tp = s + t * probe / 5.0;
            Vec xm = orbit.state_at(tp - dh), x0 = orbit.state_at(tp), xp = orbit.state_at(tp + dh);
            Vec qm = xm.head(n), q0 = x0.head(n), qp = xp.head(n);
            Vec vm = legendre_velocity(L, tp - dh, qm, xm.tail(n));
            Vec vp = legendre_velocity(L, tp + dh, qp, xp.tail(n));
            Vec accel = (vp - vm) / (2 * dh);
            Vec v0 = legendre_velocity(L, tp, q0, x0.tail(n));
            Mat GA = L.gradA(tp, q0);
            Vec force = -L.dtA(tp, q0) + (GA.transpose() - GA) * v0 - L.gradV(tp, q0);
            if ((accel - force).norm() > 1e-3 * (1.0 + force.norm()))
                throw std::invalid_argument(
                    "second_variation_index: input does not solve the Euler-Lagrange equation");
        }
    }

    auto coeffs = [&](double tau, Mat& C, Mat& P) {
        const double tt = s + tau;
        Vec x = orbit.state_at(tt);
        Vec q = x.head(n);
        Vec v = legendre_velocity(L, tt, q, x.tail(n));
        C = L.gradA(tt, q);
        auto HA = L.hessA(tt, q);
        P = -L.hessV(tt, q);
        for (int l = 0; l < n; ++l) P += v(l) * HA[l];
    };
    return stabilized_index(initial_elements, t, n, bc, coeffs, 1.0);
}

QuadraticFormSpectrum dirichlet_model_index(double t, double c, int initial_elements) {
    auto coeffs = [c](double, Mat& C, Mat& P) {
        C = Mat::Zero(1, 1);
        P = Mat::Constant(1, 1, -2.0 * c);  // relative to the 1/2 kinetic scale
    };
    // Form (1/2) int |phi'|^2 - c int |phi|^2; scaling both terms by 2 keeps
    // the inertia. Assemble int |phi'|^2 - 2c int |phi|^2.
    return stabilized_index(initial_elements, t, 1, BoundaryCondition::dirichlet, coeffs, 1.0);
}

} // namespace msl
