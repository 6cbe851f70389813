#include "maslov_lab/asymptotic.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "maslov_lab/parallel.hpp"

namespace msl {

void DiscreteMeasure::recompute_moments() {
    first_moment_p = 0;
    second_moment_p = 0;
    for (const auto& s : samples) {
        const int n = static_cast<int>(s.x.size()) / 2;
        const double pn = s.x.tail(n).norm();
        first_moment_p += s.w * pn;
        second_moment_p += s.w * pn * pn;
    }
}

void DiscreteMeasure::validate() const {
    double total = 0;
    for (const auto& s : samples) {
        if (!(s.w > 0)) throw std::invalid_argument("DiscreteMeasure: weights must be positive");
        total += s.w;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("DiscreteMeasure: weights must sum to 1");
}

DiscreteMeasure measure_from_periodic_orbit(const OrbitSegment& orbit, int k,
                                            int min_samples) {
    if (k < 1) throw std::invalid_argument("measure_from_periodic_orbit: k >= 1");
    if (orbit.t_end() < k - 1e-9)
        throw std::invalid_argument("measure_from_periodic_orbit: orbit shorter than k");
    if (phase_distance(*orbit.sys, orbit.state_at(orbit.s0 + k), orbit.x0) >
        100 * tols().periodic)
        throw std::invalid_argument("measure_from_periodic_orbit: orbit is not k-periodic");
    const int N = std::max(64 * k, min_samples);
    DiscreteMeasure eta;
    eta.samples.reserve(N);
    for (int i = 0; i < N; ++i) {
        const double t = orbit.s0 + k * (i + 0.5) / N;
        eta.samples.push_back({std::fmod(t, 1.0), orbit.state_at(t), 1.0 / N});
    }
    eta.recompute_moments();
    return eta;
}

DiscreteMeasure measure_from_orbit_arc(const OrbitSegment& orbit, double tau, int samples) {
    if (!(tau > 0) || orbit.t_end() - orbit.s0 < tau - 1e-9)
        throw std::invalid_argument("measure_from_orbit_arc: bad arc length");
    DiscreteMeasure eta;
    eta.samples.reserve(samples);
    for (int i = 0; i < samples; ++i) {
        const double t = orbit.s0 + tau * (i + 0.5) / samples;
        eta.samples.push_back({std::fmod(t, 1.0), orbit.state_at(t), 1.0 / samples});
    }
    eta.recompute_moments();
    return eta;
}

DiscreteMeasure mix(double alpha, const DiscreteMeasure& a, const DiscreteMeasure& b) {
    if (!(alpha >= 0 && alpha <= 1)) throw std::invalid_argument("mix: alpha in [0,1]");
    DiscreteMeasure m;
    for (const auto& s : a.samples) m.samples.push_back({s.s, s.x, alpha * s.w});
    for (const auto& s : b.samples) m.samples.push_back({s.s, s.x, (1 - alpha) * s.w});
    m.recompute_moments();
    return m;
}

AsymptoticEstimate bott_index_periodic(const HamiltonianSystem& sys,
                                       std::shared_ptr<const OrbitSegment> orbit, int k,
                                       int h_max) {
    if (k < 1 || h_max < 1) throw std::invalid_argument("bott_index_periodic: k, h_max >= 1");
    const int n = sys.n;
    if (phase_distance(sys, orbit->state_at(orbit->s0 + k), orbit->x0) > 100 * tols().periodic)
        throw std::invalid_argument("bott_index_periodic: orbit is not k-periodic");

    // Powers of the period map, resymplectified as they accumulate. For
    // hyperbolic orbits the powers grow like e^{hk}; past ~1e7 the graph
    // frames degenerate in double precision, so the horizon self-caps there
    // (the reported halfwidth grows accordingly, still rigorous).
    Mat M = orbit->transfer_at(orbit->s0 + k);
    std::vector<Mat> Mpow;
    Mpow.reserve(h_max);
    Mpow.push_back(Mat::Identity(2 * n, 2 * n));
    for (int j = 1; j < h_max; ++j) {
        Mat P = M * Mpow[j - 1];
        if (inf_norm(P) > 1e7) break;
        if (symplectic_residual(P) > tols().symp / 10) P = resymplectify(P).matrix();
        Mpow.push_back(std::move(P));
    }
    h_max = static_cast<int>(Mpow.size());

    // Extended transfer path over [0, h_max k] by concatenation.
    std::vector<double> times;
    std::vector<Mat> mats;
    for (int j = 0; j < h_max; ++j) {
        for (size_t i = 0; i < orbit->times.size(); ++i) {
            const double t = orbit->times[i] - orbit->s0;
            if (t > k + 1e-12) break;
            if (j > 0 && i == 0) continue;  // joint sample already present
            times.push_back(j * static_cast<double>(k) + t);
            Mat P = orbit->transfers[i] * Mpow[j];
            if (symplectic_residual(P) > tols().symp / 10) P = resymplectify(P).matrix();
            mats.push_back(std::move(P));
        }
    }
    const double kk = static_cast<double>(k);
    auto shared_pow = std::make_shared<std::vector<Mat>>(std::move(Mpow));
    auto ev = [orbit, shared_pow, kk](double t) {
        int j = static_cast<int>(std::floor(t / kk));
        j = std::min(j, static_cast<int>(shared_pow->size()) - 1);
        double tau = t - j * kk;
        Mat P = orbit->transfer_at(orbit->s0 + tau) * (*shared_pow)[j];
        if (symplectic_residual(P) > tols().symp / 10) P = resymplectify(P).matrix();
        return P;
    };
    SymplecticPath path(std::move(times), std::move(mats), std::move(ev));
    IndexResult full = conley_zehnder(path);

    AsymptoticEstimate est;
    est.horizon = h_max * kk;
    est.value = full.value.value() / est.horizon;
    est.rigorous_halfwidth = 2.0 * n / est.horizon;
    est.rigorous = true;

    // Running diagnostics mu_CZ^{hk}/(hk) from the crossing list; horizons
    // that land on a crossing are skipped (their endpoint weight differs).
    for (int h = 1; h <= h_max; ++h) {
        const double Th = h * kk;
        long long doubled = 0;
        bool resonant = false;
        for (const auto& c : full.crossings) {
            if (std::abs(c.time - Th) < 1e-6 * kk && h != h_max) resonant = true;
            if (c.time < Th - 1e-6 * kk)
                doubled += (c.time <= 1e-12) ? c.signature : 2 * c.signature;
        }
        if (!resonant)
            est.sequence.push_back({Th, 0.5 * static_cast<double>(doubled) / Th});
    }
    if (!est.sequence.empty()) est.sequence.back() = {est.horizon, est.value};

    IndexResult base = conley_zehnder(transfer_path(orbit));
    est.mu_cz_period = base.value;
    est.bott2_checked = true;
    est.bott2_ok = std::abs(base.value.value() - kk * est.value) <=
                   2.0 * n * (1.0 + 1.0 / h_max) + 1e-9;
    return est;
}

AsymptoticEstimate asymptotic_index_point(const HamiltonianSystem& sys, double s,
                                          const Vec& x0,
                                          const std::vector<double>& T_schedule) {
    if (T_schedule.empty())
        throw std::invalid_argument("asymptotic_index_point: empty schedule");
    AsymptoticEstimate est;
    est.rigorous = false;
    for (double T : T_schedule) {
        const double v = mu_t(sys, s, x0, T).value() / T;
        est.sequence.push_back({T, v});
    }
    est.horizon = T_schedule.back();
    est.value = est.sequence.back().second;
    return est;
}

AsymptoticEstimate asymptotic_index_measure(const HamiltonianSystem& sys,
                                            const DiscreteMeasure& eta, double T) {
    if (!(T > 0)) throw std::invalid_argument("asymptotic_index_measure: need T > 0");
    eta.validate();
    const int count = static_cast<int>(eta.samples.size());
    std::vector<double> mu_vals(count);
    parallel_for(count, [&](int i) {
        const auto& s = eta.samples[i];
        mu_vals[i] = mu_t(sys, s.s, s.x, T).value();
    });
    double M_T = 0;
    for (int i = 0; i < count; ++i) M_T += eta.samples[i].w * mu_vals[i];
    AsymptoticEstimate est;
    est.value = M_T / T;
    est.horizon = T;
    est.rigorous_halfwidth = 2.0 * sys.n / T;
    est.rigorous = true;
    est.sequence.push_back({T, est.value});
    return est;
}

MomentDiagnostics moment_diagnostics(const DiscreteMeasure& eta, double cutoff) {
    MomentDiagnostics d;
    d.cutoff = cutoff;
    for (const auto& s : eta.samples) {
        const int n = static_cast<int>(s.x.size()) / 2;
        const double pn = s.x.tail(n).norm();
        d.first += s.w * pn;
        d.second += s.w * pn * pn;
        if (pn > cutoff) d.tail_mass += s.w;
    }
    return d;
}

double invariance_defect(const HamiltonianSystem& sys, const DiscreteMeasure& eta,
                         int directions, std::uint64_t seed) {
    const int count = static_cast<int>(eta.samples.size());
    const int dim = static_cast<int>(eta.samples.front().x.size());
    std::vector<Vec> pushed(count);
    parallel_for(count, [&](int i) {
        const auto& s = eta.samples[i];
        OrbitSegment o = integrate_orbit(sys, s.s, s.x, 1.0);
        pushed[i] = o.states.back();
    });
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    double worst = 0;
    for (int d = 0; d < directions; ++d) {
        Vec dir(dim);
        for (int i = 0; i < dim; ++i) dir(i) = gauss(rng);
        dir.normalize();
        std::vector<double> a(count), b(count);
        for (int i = 0; i < count; ++i) {
            a[i] = dir.dot(eta.samples[i].x);
            b[i] = dir.dot(pushed[i]);
        }
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        double acc = 0;
        for (int i = 0; i < count; ++i) acc += std::abs(a[i] - b[i]);
        worst = std::max(worst, acc / count);
    }
    return worst;
}

} // namespace msl
