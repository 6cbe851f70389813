#include "maslov_lab/orbits.hpp"

#include <algorithm>
#include <cmath>

namespace msl {

namespace {

Vec wrapped_residual(const HamiltonianSystem& sys, const Vec& xk, const Vec& x0) {
    Vec r = xk - x0;
    if (sys.chart == Chart::torus_angles)
        for (int i = 0; i < sys.n; ++i) r(i) = std::remainder(r(i), 2 * M_PI);
    return r;
}

/// Min over time shifts of the max phase distance between two d-periodic orbits.
double orbit_distance(const HamiltonianSystem& sys, const OrbitSegment& a,
                      const OrbitSegment& b, int d) {
    const int S = 48;
    std::vector<Vec> pa(S), pb(S);
    for (int i = 0; i < S; ++i) {
        pa[i] = a.state_at(a.s0 + d * static_cast<double>(i) / S);
        pb[i] = b.state_at(b.s0 + d * static_cast<double>(i) / S);
    }
    double best = std::numeric_limits<double>::infinity();
    // Time shifts must respect the 1-periodic driving for non-autonomous
    // systems; integer shifts only in that case.
    const int shift_step = sys.autonomous ? 1 : std::max(1, S / std::max(1, d));
    for (int off = 0; off < S; off += shift_step) {
        double worst = 0;
        for (int i = 0; i < S; ++i)
            worst = std::max(worst, phase_distance(sys, pa[i], pb[(i + off) % S]));
        best = std::min(best, worst);
    }
    return best;
}

} // namespace

double orbit_average_action(const EMLagrangian& L, const OrbitSegment& orbit, double span) {
    const int n = L.n;
    double sum = 0;
    for (size_t i = 0; i + 1 < orbit.times.size(); ++i) {
        const double t0 = orbit.times[i], t1 = orbit.times[i + 1];
        if (t0 >= orbit.s0 + span) break;
        auto lag = [&](double t, const Vec& x) {
            Vec q = x.head(n);
            Vec v = legendre_velocity(L, t, q, x.tail(n));
            return L.value(t, q, v);
        };
        sum += 0.5 * (t1 - t0) * (lag(t0, orbit.states[i]) + lag(t1, orbit.states[i + 1]));
    }
    return sum / span;
}

std::vector<PeriodicOrbitRecord> find_periodic_orbits(const HamiltonianSystem& sys,
                                                      const EMLagrangian* L, int k,
                                                      const OrbitSearchOptions& opts) {
    if (k < 1) throw std::invalid_argument("find_periodic_orbits: k >= 1");
    const int n = sys.n;
    std::vector<PeriodicOrbitRecord> records;
    std::uint64_t seed_index = 0;

    std::vector<Vec> seeds;
    // Rest points of the configuration (p = 0, q at the chart's distinguished
    // angles) seed the equilibria exactly; the grid covers the rest.
    {
        Vec x = Vec::Zero(2 * n);
        seeds.push_back(x);
        if (sys.chart == Chart::torus_angles) {
            for (int mask = 1; mask < (1 << n); ++mask) {
                Vec y = Vec::Zero(2 * n);
                for (int d = 0; d < n; ++d)
                    if (mask & (1 << d)) y(d) = M_PI;
                seeds.push_back(y);
            }
        }
    }
    for (int iq = 0; iq < opts.grid_q; ++iq)
        for (int ip = 0; ip < opts.grid_p; ++ip) {
            Vec x(2 * n);
            for (int d = 0; d < n; ++d) {
                x(d) = opts.seed_q_min +
                       (opts.seed_q_max - opts.seed_q_min) * (iq + 0.5) / opts.grid_q;
                x(n + d) = opts.seed_p_min +
                           (opts.seed_p_max - opts.seed_p_min) * (ip + 0.5) / opts.grid_p;
            }
            seeds.push_back(x);
        }

    for (const Vec& seed : seeds) {
        const std::uint64_t my_index = seed_index++;
        Vec x = seed;
        bool converged = false, degenerate = false;
        double residual = 0;
        std::shared_ptr<OrbitSegment> orbit;
        try {
            orbit = std::make_shared<OrbitSegment>(
                integrate_orbit(sys, 0.0, x, static_cast<double>(k)));
            Vec R = wrapped_residual(sys, orbit->states.back(), x);
            residual = R.cwiseAbs().maxCoeff();
            for (int it = 0; it < opts.max_newton; ++it) {
                if (residual <= opts.newton_tol) {
                    converged = true;
                    break;
                }
                Mat Jn = orbit->transfers.back() - Mat::Identity(2 * n, 2 * n);
                Eigen::CompleteOrthogonalDecomposition<Mat> cod;
                cod.setThreshold(1e-7);  // least-squares across elliptic resonances
                cod.compute(Jn);
                if (cod.rank() < 2 * n) degenerate = true;
                Vec step = cod.solve(-R);
                const double cap = 0.5 * (1.0 + x.cwiseAbs().maxCoeff());
                if (step.cwiseAbs().maxCoeff() > cap)
                    step *= cap / step.cwiseAbs().maxCoeff();
                // Damped update: halve the step until the residual decreases;
                // a stalled line search ends this seed.
                bool improved = false;
                for (int half = 0; half < 7 && !improved; ++half) {
                    Vec x_try = x + step;
                    step *= 0.5;
                    if (x_try.cwiseAbs().maxCoeff() > opts.divergence_norm) continue;
                    auto trial = std::make_shared<OrbitSegment>(
                        integrate_orbit(sys, 0.0, x_try, static_cast<double>(k)));
                    Vec R_try = wrapped_residual(sys, trial->states.back(), x_try);
                    const double res_try = R_try.cwiseAbs().maxCoeff();
                    if (res_try < residual) {
                        x = x_try;
                        orbit = trial;
                        R = R_try;
                        residual = res_try;
                        improved = true;
                    }
                }
                if (!improved) break;
            }
        } catch (const std::runtime_error&) {
            continue;  // blow-up or step underflow: drop the seed
        }
        if (!converged) continue;

        PeriodicOrbitRecord rec;
        rec.k = k;
        rec.x0 = x;
        rec.residual = residual;
        rec.seed_index = my_index;
        rec.degenerate_jacobian = degenerate;
        rec.orbit = orbit;

        // Minimal period by divisor testing.
        rec.minimal_period = k;
        for (int d = 1; d < k; ++d) {
            if (k % d != 0) continue;
            if (!sys.autonomous && d < 1) continue;
            Vec xd = orbit->state_at(static_cast<double>(d));
            if (wrapped_residual(sys, xd, x).cwiseAbs().maxCoeff() <= 100 * opts.newton_tol) {
                rec.minimal_period = d;
                break;
            }
        }

        // Winding from the unwrapped configuration angles.
        rec.winding = Eigen::VectorXi::Zero(n);
        if (sys.chart == Chart::torus_angles) {
            Vec dq = orbit->states.back().head(n) - x.head(n);
            for (int d = 0; d < n; ++d)
                rec.winding(d) = static_cast<int>(std::lround(dq(d) / (2 * M_PI)));
        }
        rec.contractible = rec.winding.isZero();
        if (sys.autonomous) rec.energy = sys.H(0.0, x);

        // Deduplicate before the expensive index work.
        bool duplicate = false;
        for (const auto& other : records) {
            if (other.minimal_period != rec.minimal_period) continue;
            if (sys.autonomous && std::isfinite(other.energy) &&
                std::abs(other.energy - rec.energy) > 1e-6)
                continue;
            if ((other.winding - rec.winding).cwiseAbs().maxCoeff() != 0) continue;
            if (orbit_distance(sys, *other.orbit, *rec.orbit, rec.minimal_period) <
                opts.dedup_tol) {
                duplicate = true;
                break;
            }
        }
        if (duplicate) continue;

        try {
            const int h_max = std::max(1, (opts.bott_horizon + k - 1) / k);
            rec.bott = bott_index_periodic(sys, rec.orbit, k, h_max);
            rec.mu_cz = rec.bott.mu_cz_period;
        } catch (const std::exception&) {
            continue;  // index failure on a marginal orbit: drop it
        }
        if (L) rec.action = orbit_average_action(*L, *rec.orbit, static_cast<double>(k));
        records.push_back(std::move(rec));
    }
    return records;
}

BetaCurve beta_estimate(const std::vector<PeriodicOrbitRecord>& records, double r_max,
                        double bin_width) {
    if (records.empty()) throw std::invalid_argument("beta_estimate: no records");
    BetaCurve curve;
    double max_mu = 0;
    for (const auto& r : records) max_mu = std::max(max_mu, r.bott.value);
    if (r_max <= 0) r_max = 1.2 * std::max(max_mu, bin_width);

    const int bins = std::max(1, static_cast<int>(std::ceil(r_max / bin_width)));
    for (int b = 0; b < bins; ++b) {
        const double rc = (b + 0.5) * bin_width;
        BetaCurve::Bin bin;
        bin.r_center = rc;
        bool any = false;
        for (size_t i = 0; i < records.size(); ++i) {
            if (!std::isfinite(records[i].action)) continue;
            if (std::abs(records[i].bott.value - rc) <= bin_width) {
                if (!any || records[i].action < bin.beta_hat) {
                    bin.beta_hat = records[i].action;
                    bin.witness = static_cast<int>(i);
                    any = true;
                }
            }
        }
        if (any) curve.bins.push_back(bin);  // empty bins reported as gaps
    }

    // Lower convex hull of the (r, action) cloud (monotone chain).
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : records)
        if (std::isfinite(r.action)) pts.push_back({r.bott.value, r.action});
    std::sort(pts.begin(), pts.end());
    for (const auto& p : pts) {
        auto& h = curve.hull;
        while (h.size() >= 2) {
            const auto& a = h[h.size() - 2];
            const auto& b = h[h.size() - 1];
            const double cross =
                (b.first - a.first) * (p.second - a.second) -
                (p.first - a.first) * (b.second - a.second);
            if (cross <= 0)
                h.pop_back();
            else
                break;
        }
        if (!h.empty() && h.back().first == p.first) {
            if (p.second < h.back().second) h.back() = p;
            continue;
        }
        h.push_back(p);
    }
    curve.hull_convex = true;
    for (size_t i = 2; i < curve.hull.size(); ++i) {
        const auto& a = curve.hull[i - 2];
        const auto& b = curve.hull[i - 1];
        const auto& c = curve.hull[i];
        const double s1 = (b.second - a.second) / (b.first - a.first);
        const double s2 = (c.second - b.second) / (c.first - b.first);
        if (s2 < s1 - 1e-12) curve.hull_convex = false;
    }

    // Bracketing quadratic envelope fitted on the hull vertices.
    if (!curve.hull.empty()) {
        double num = 0, den = 0;
        for (const auto& p : curve.hull) {
            num += p.first * p.first * p.second;
            den += std::pow(p.first, 4);
        }
        double a_fit = den > 0 ? std::max(num / den, 1e-6) : 1e-6;
        curve.a1 = curve.a2 = a_fit;
        double A1 = -std::numeric_limits<double>::infinity();
        double A2 = -std::numeric_limits<double>::infinity();
        for (const auto& p : curve.hull) {
            A1 = std::max(A1, a_fit * p.first * p.first - p.second);
            A2 = std::max(A2, p.second - a_fit * p.first * p.first);
        }
        curve.A1 = A1 + 1e-12;
        curve.A2 = A2 + 1e-12;
    }
    return curve;
}

double pendulum_libration_period(double energy) {
    if (!(energy > -1.0 && energy < 1.0))
        throw std::invalid_argument("pendulum_libration_period: energy in (-1, 1)");
    return 4.0 * std::comp_ellint_1(std::sqrt(0.5 * (1.0 + energy)));
}

std::vector<SweepRow> pendulum_librating_sweep(int count, double horizon_min, double mu_lo) {
    SystemBundle pend = make_system("pendulum");
    const double mu_hi = 1.0 / M_PI - 0.012;
    std::vector<SweepRow> rows;
    rows.reserve(count);
    for (int j = 0; j < count; ++j) {
        const double mu_target = mu_lo + (mu_hi - mu_lo) * j / std::max(1, count - 1);
        const double tau_target = 2.0 / mu_target;
        // Invert the period function by bisection on the energy.
        double lo = -1.0 + 1e-12, hi = 1.0 - 1e-12;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (pendulum_libration_period(mid) < tau_target)
                lo = mid;
            else
                hi = mid;
        }
        const double E = 0.5 * (lo + hi);
        SweepRow row;
        row.energy = E;
        Vec x0(2);
        x0 << 0.0, std::sqrt(2.0 * (E + 1.0));

        // Measured first-return period: bracket the q = 0 upward crossing
        // around the analytic estimate and bisect on the dense output.
        const double tau_est = pendulum_libration_period(E);
        OrbitSegment seg = integrate_orbit(pend.sys, 0.0, x0, 1.25 * tau_est);
        double ta = 0.9 * tau_est, tb = 1.1 * tau_est;
        auto qa = [&](double t) { return seg.state_at(t)(0); };
        double fa = qa(ta), fb = qa(tb);
        if ((fa < 0) == (fb < 0)) {
            row.period = tau_est;  // bracketing failed; fall back to the estimate
        } else {
            for (int it = 0; it < 80; ++it) {
                const double tm = 0.5 * (ta + tb);
                const double fm = qa(tm);
                if ((fm < 0) == (fa < 0)) {
                    ta = tm;
                    fa = fm;
                } else {
                    tb = tm;
                }
            }
            row.period = 0.5 * (ta + tb);
        }

        const int periods = std::max(1, static_cast<int>(std::ceil(horizon_min / row.period)));
        const double T = periods * row.period;
        row.mu_hat = mu_t(pend.sys, 0.0, x0, T).value() / T;
        OrbitSegment full = integrate_orbit(pend.sys, 0.0, x0, T);
        row.action = orbit_average_action(*pend.lagrangian, full, T);
        rows.push_back(row);
    }
    return rows;
}

WitnessReport theorem_main_witness(const std::vector<PeriodicOrbitRecord>& records,
                                   const BetaCurve& beta, double r, double tol_r) {
    WitnessReport rep;
    rep.r = r;
    rep.action_bound_C = std::max({beta.a2, beta.A2, 1.0});

    int best = -1;
    double best_err = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < records.size(); ++i) {
        if (!records[i].contractible) continue;
        const double err = std::abs(records[i].bott.value - r);
        if (err < best_err) {
            best_err = err;
            best = static_cast<int>(i);
        }
    }
    if (best < 0) {
        rep.note = "no contractible records in the search budget";
        return rep;
    }

    auto fill_witness = [&](int idx) {
        rep.witness = idx;
        rep.witness_mu = records[idx].bott.value;
        rep.witness_action = records[idx].action;
        DiscreteMeasure eta = measure_from_periodic_orbit(*records[idx].orbit, records[idx].k);
        rep.second_moment = moment_diagnostics(eta).second;
        if (std::isfinite(records[idx].action))
            rep.action_bound_ok =
                records[idx].action <= rep.action_bound_C * (1.0 + r * r) + 1e-9;
    };

    if (best_err <= tol_r) {
        rep.status = 0;
        fill_witness(best);
        rep.note = "direct witness within tol_r";
        return rep;
    }

    // Approximating sequence: sort candidates by error, then extract a chain
    // with strictly increasing minimal periods and non-increasing error.
    std::vector<int> order;
    for (size_t i = 0; i < records.size(); ++i)
        if (records[i].contractible) order.push_back(static_cast<int>(i));
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return records[a].minimal_period < records[b].minimal_period;
    });
    double err = std::numeric_limits<double>::infinity();
    int last_period = 0;
    for (int idx : order) {
        const double e = std::abs(records[idx].bott.value - r);
        if (records[idx].minimal_period > last_period && e < err) {
            rep.sequence.push_back(idx);
            last_period = records[idx].minimal_period;
            err = e;
        }
    }
    if (rep.sequence.size() >= 3 && err <= 5 * tol_r) {
        rep.status = 1;
        fill_witness(rep.sequence.back());
        rep.note = "approximating sequence with growing minimal periods";
    } else {
        rep.status = 2;
        fill_witness(best);
        rep.note = "inconclusive within the search budget";
    }
    return rep;
}

} // namespace msl
