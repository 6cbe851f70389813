#include "maslov_lab/verify.hpp"

#include <chrono>
#include <cmath>
#include <random>

#include <unsupported/Eigen/MatrixFunctions>

#include "maslov_lab/loops.hpp"
#include "maslov_lab/systems.hpp"

namespace msl {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::uint64_t mixseed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    std::uint64_t h = 1469598103934665603ull ^ seed;
    h = (h ^ a) * 1099511628211ull;
    h = (h ^ b) * 1099511628211ull;
    return h;
}

Mat random_symmetric(int dim, std::mt19937_64& rng, double bound) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Mat S(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = i; j < dim; ++j) S(i, j) = S(j, i) = u(rng);
    const double nrm = inf_norm(S);
    if (nrm > 0) S *= bound / nrm;
    return S;
}

Mat random_generator(int n, std::mt19937_64& rng, double bound) {
    return standard_form(n) * random_symmetric(2 * n, rng, bound);
}

/// A crossing is marginal when its form is nearly degenerate or it sits too
/// close to an endpoint or another crossing; those draws are rejected.
bool well_separated(const IndexResult& r, double a, double b) {
    const double margin = 2e-3 * (b - a);
    double prev = -1e300;
    for (const auto& c : r.crossings) {
        if (!c.is_endpoint && (c.time - a < margin || b - c.time < margin)) return false;
        if (c.time - prev < margin) return false;
        prev = c.time;
    }
    return true;
}

} // namespace

LagrangianFrame random_lagrangian_frame(int n, std::uint64_t seed) {
    SymplecticMatrix Psi = random_symplectic(n, seed);
    return LagrangianFrame(Psi.matrix() * vertical_frame(n).columns());
}

LagrangianPath random_lagrangian_path(int n, std::uint64_t seed, int samples) {
    std::mt19937_64 rng(seed);
    Mat K1 = random_generator(n, rng, 2.2);
    Mat K2 = random_generator(n, rng, 1.2);
    Mat F0 = random_lagrangian_frame(n, mixseed(seed, 77)).columns();
    auto frame_at = [K1, K2, F0](double t) {
        Mat Phi = (t * K1).exp() * (t * (1.0 - t) * K2).exp();
        return Mat(Phi * F0);
    };
    std::vector<double> ts(samples);
    std::vector<Mat> fs(samples);
    for (int i = 0; i < samples; ++i) {
        ts[i] = static_cast<double>(i) / (samples - 1);
        fs[i] = frame_at(ts[i]);
    }
    return LagrangianPath(std::move(ts), std::move(fs), frame_at);
}

SymplecticPath random_symplectic_path(int n, std::uint64_t seed, int samples) {
    std::mt19937_64 rng(seed);
    Mat K1 = random_generator(n, rng, 2.2);
    Mat K2 = random_generator(n, rng, 1.2);
    auto mat_at = [K1, K2](double t) {
        return Mat((t * K1).exp() * (t * (1.0 - t) * K2).exp());
    };
    std::vector<double> ts(samples);
    std::vector<Mat> ms(samples);
    for (int i = 0; i < samples; ++i) {
        ts[i] = static_cast<double>(i) / (samples - 1);
        ms[i] = mat_at(ts[i]);
    }
    return SymplecticPath(std::move(ts), std::move(ms), mat_at);
}

namespace {

/// Draw a (path, reference) pair whose crossings are clean, retrying with
/// derived seeds. Returns the accepted draw's index result.
struct CleanDraw {
    LagrangianPath path;
    LagrangianFrame ref;
    IndexResult result;
};

CleanDraw clean_draw(int n, std::uint64_t seed) {
    for (int attempt = 0; attempt < 25; ++attempt) {
        const std::uint64_t s = mixseed(seed, attempt);
        try {
            LagrangianPath path = random_lagrangian_path(n, s);
            LagrangianFrame ref = random_lagrangian_frame(n, mixseed(s, 5));
            IndexResult r = maslov_index(path, ref);
            if (!well_separated(r, path.a(), path.b())) continue;
            return {std::move(path), std::move(ref), std::move(r)};
        } catch (const DegeneratePathError&) {
            continue;
        }
    }
    throw std::runtime_error("clean_draw: no well-posed draw found");
}

} // namespace

namespace {

/// Runs one property case, redrawing deterministically when the path draw or
/// any derived index computation hits a non-regular configuration.
template <class Fn>
void run_case(SuiteResult& s, int n, std::uint64_t case_seed, int c, Fn&& body) {
    for (int attempt = 0; attempt < 25; ++attempt) {
        try {
            CleanDraw d = clean_draw(n, mixseed(case_seed, attempt));
            body(d, mixseed(case_seed, 1000 + attempt));
            ++s.cases;
            return;
        } catch (const DegeneratePathError&) {
            continue;
        }
    }
    ++s.failures;
    s.notes.push_back("case " + std::to_string(c) + ": no well-posed draw");
}

} // namespace

SuiteResult verify_naturality(int n, int cases, std::uint64_t seed) {
    SuiteResult s{"naturality"};
    auto t0 = Clock::now();
    for (int c = 0; c < cases; ++c) {
        run_case(s, n, mixseed(seed, 101, c), c, [&](const CleanDraw& d, std::uint64_t cs) {
            SymplecticMatrix Psi = random_symplectic(n, cs);
            IndexResult moved = maslov_index(d.path.transformed(Psi.matrix()),
                                             LagrangianFrame(Psi.matrix() * d.ref.columns()));
            if (moved.value != d.result.value) {
                ++s.failures;
                s.notes.push_back("case " + std::to_string(c) + ": " + moved.value.str() +
                                  " != " + d.result.value.str());
            }
        });
    }
    s.seconds = elapsed(t0);
    return s;
}

SuiteResult verify_juxtaposition(int n, int cases, std::uint64_t seed) {
    SuiteResult s{"juxtaposition"};
    auto t0 = Clock::now();
    for (int c = 0; c < cases; ++c) {
        run_case(s, n, mixseed(seed, 201, c), c, [&](const CleanDraw& d, std::uint64_t) {
            // Interior split point in the largest gap between crossings.
            std::vector<double> marks{d.path.a(), d.path.b()};
            for (const auto& cr : d.result.crossings) marks.push_back(cr.time);
            std::sort(marks.begin(), marks.end());
            double best_lo = d.path.a(), best_gap = 0;
            for (size_t i = 0; i + 1 < marks.size(); ++i)
                if (marks[i + 1] - marks[i] > best_gap) {
                    best_gap = marks[i + 1] - marks[i];
                    best_lo = marks[i];
                }
            const double split = best_lo + 0.5 * best_gap;
            IndexResult left = maslov_index(d.path.restricted(d.path.a(), split), d.ref);
            IndexResult right = maslov_index(d.path.restricted(split, d.path.b()), d.ref);
            if (left.value + right.value != d.result.value) {
                ++s.failures;
                s.notes.push_back("case " + std::to_string(c) + ": " + left.value.str() +
                                  " + " + right.value.str() + " != " + d.result.value.str());
            }
        });
    }
    s.seconds = elapsed(t0);
    return s;
}

SuiteResult verify_product(int n, int cases, std::uint64_t seed) {
    SuiteResult s{"product"};
    auto t0 = Clock::now();
    for (int c = 0; c < cases; ++c) {
        run_case(s, n, mixseed(seed, 301, c), c, [&](const CleanDraw& d1, std::uint64_t cs) {
            const int n2 = 1 + (c % 2);
            CleanDraw d2 = clean_draw(n2, cs);
            // Product path sampled on the first factor's grid.
            std::vector<double> ts = d1.path.times();
            std::vector<Mat> fs;
            fs.reserve(ts.size());
            for (double t : ts)
                fs.push_back(direct_sum_frame(LagrangianFrame(d1.path.at(t)),
                                              LagrangianFrame(d2.path.at(t)))
                                 .columns());
            const LagrangianPath* p1 = &d1.path;
            const LagrangianPath* p2 = &d2.path;
            LagrangianPath prod(ts, fs, [p1, p2](double t) {
                return direct_sum_frame(LagrangianFrame(p1->at(t)),
                                        LagrangianFrame(p2->at(t)))
                    .columns();
            });
            LagrangianFrame ref = direct_sum_frame(d1.ref, d2.ref);
            IndexResult r = maslov_index(prod, ref);
            if (r.value != d1.result.value + d2.result.value) {
                ++s.failures;
                s.notes.push_back("case " + std::to_string(c) + ": " + r.value.str() +
                                  " != " + (d1.result.value + d2.result.value).str());
            }
        });
    }
    s.seconds = elapsed(t0);
    return s;
}

SuiteResult verify_homotopy_reparam(int n, int cases, std::uint64_t seed) {
    SuiteResult s{"homotopy_reparam"};
    auto t0 = Clock::now();
    for (int c = 0; c < cases; ++c) {
        run_case(s, n, mixseed(seed, 401, c), c, [&](const CleanDraw& d, std::uint64_t) {
            const double a = d.path.a(), b = d.path.b();
            const double bend = 0.12 + 0.25 * ((c % 5) / 5.0);
            auto warp = [a, b, bend](double u) {
                const double x = (u - a) / (b - a);
                return a + (b - a) * (x - bend * std::sin(2 * M_PI * x) / (2 * M_PI));
            };
            const LagrangianPath* base = &d.path;
            const int m = 97;
            std::vector<double> ts(m);
            std::vector<Mat> fs(m);
            for (int i = 0; i < m; ++i) {
                ts[i] = a + (b - a) * i / (m - 1);
                fs[i] = base->at(warp(ts[i]));
            }
            LagrangianPath warped(std::move(ts), std::move(fs),
                                  [base, warp](double u) { return base->at(warp(u)); });
            IndexResult r = maslov_index(warped, d.ref);
            if (r.value != d.result.value) {
                ++s.failures;
                s.notes.push_back("case " + std::to_string(c) + ": " + r.value.str() +
                                  " != " + d.result.value.str());
            }
        });
    }
    s.seconds = elapsed(t0);
    return s;
}

SuiteResult verify_localization(int n, int cases, std::uint64_t seed) {
    SuiteResult s{"localization"};
    auto t0 = Clock::now();
    for (int c = 0; c < cases; ++c) {
        Mat S0, S1, S2;
        int sig_a = 0, sig_b = 0;
        bool ok = false;
        for (int attempt = 0; attempt < 40 && !ok; ++attempt) {
            std::mt19937_64 rng(mixseed(seed, 501, c * 64 + attempt));
            S0 = random_symmetric(n, rng, 1.0);
            S1 = random_symmetric(n, rng, 1.6);
            S2 = random_symmetric(n, rng, 0.6);
            auto signature = [&](const Mat& S, bool* clean) {
                Eigen::SelfAdjointEigenSolver<Mat> es(S);
                int sig = 0;
                *clean = true;
                for (int i = 0; i < n; ++i) {
                    if (std::abs(es.eigenvalues()(i)) < 0.05) *clean = false;
                    sig += es.eigenvalues()(i) > 0 ? 1 : -1;
                }
                return sig;
            };
            bool ca = false, cb = false;
            Mat Sb = S0 + S1 + std::sin(1.0) * 0.5 * S2;
            sig_a = signature(S0, &ca);
            sig_b = signature(Sb, &cb);
            ok = ca && cb;
        }
        auto S_of = [&](double t) { return Mat(S0 + t * S1 + std::sin(t) * 0.5 * S2); };
        const int m = 65;
        std::vector<double> ts(m);
        std::vector<Mat> dual(m), primal(m);
        for (int i = 0; i < m; ++i) {
            ts[i] = static_cast<double>(i) / (m - 1);
            dual[i] = momentum_graph_frame(S_of(ts[i])).columns();
            primal[i] = graph_frame(S_of(ts[i])).columns();
        }
        LagrangianPath dual_path(ts, dual,
                                 [S_of](double t) { return momentum_graph_frame(S_of(t)).columns(); });
        LagrangianPath primal_path(ts, primal,
                                   [S_of](double t) { return graph_frame(S_of(t)).columns(); });
        ++s.cases;
        try {
            IndexResult rd = maslov_index(dual_path, vertical_frame(n));
            IndexResult rp = maslov_index(primal_path, horizontal_frame(n));
            const HalfInt expect = HalfInt::from_doubled(sig_b - sig_a);
            if (rd.value != expect || rp.value != -expect) {
                ++s.failures;
                s.notes.push_back("case " + std::to_string(c) + ": got " + rd.value.str() +
                                  "/" + rp.value.str() + ", expected +-" + expect.str());
            }
        } catch (const DegeneratePathError& e) {
            ++s.failures;
            s.notes.push_back("case " + std::to_string(c) + ": degenerate: " + e.what());
        }
    }
    s.seconds = elapsed(t0);
    return s;
}

SuiteResult verify_zero(int n, int cases, std::uint64_t seed) {
    SuiteResult s{"zero"};
    auto t0 = Clock::now();
    for (int c = 0; c < cases; ++c) {
        const std::uint64_t cs = mixseed(seed, 601, c);
        IndexResult r;
        bool built = false;
        switch (c % 3) {
            case 0: {  // constant path, random reference
                Mat F = random_lagrangian_frame(n, cs).columns();
                std::vector<double> ts{0.0, 0.5, 1.0};
                std::vector<Mat> fs{F, F, F};
                LagrangianPath path(ts, fs);
                r = maslov_index(path, random_lagrangian_frame(n, mixseed(cs, 3)));
                built = true;
                break;
            }
            case 1: {  // transversal wiggle: constant intersection dimension 0
                std::mt19937_64 rng(cs);
                Mat K = random_generator(n, rng, 0.12);
                Mat F0 = graph_frame(random_symmetric(n, rng, 0.5)).columns();
                auto ev = [K, F0](double t) {
                    return Mat((std::sin(2 * M_PI * t) * K).exp() * F0);
                };
                const int m = 33;
                std::vector<double> ts(m);
                std::vector<Mat> fs(m);
                for (int i = 0; i < m; ++i) {
                    ts[i] = static_cast<double>(i) / (m - 1);
                    fs[i] = ev(ts[i]);
                }
                LagrangianPath path(ts, fs, ev);
                IndexResult probe = maslov_index(path, vertical_frame(n));
                if (!probe.crossings.empty()) continue;  // rare: wiggle touched the reference
                r = probe;
                built = true;
                break;
            }
            default: {  // constant positive intersection dimension (plateau)
                std::mt19937_64 rng(cs);
                Mat F;
                if (n == 1) {
                    F = vertical_frame(1).columns();
                    std::vector<double> ts{0.0, 0.5, 1.0};
                    std::vector<Mat> fs{F, F, F};
                    r = maslov_index(LagrangianPath(ts, fs), vertical_frame(1));
                } else {
                    // vertical line in the first factor (+) moving transversal
                    // in the rest: dim = 1 along the whole path.
                    Mat K = random_generator(n - 1, rng, 0.1);
                    Mat G0 = graph_frame(random_symmetric(n - 1, rng, 0.4)).columns();
                    auto ev = [K, G0](double t) {
                        LagrangianFrame moving(Mat((std::sin(2 * M_PI * t) * K).exp() * G0));
                        return direct_sum_frame(vertical_frame(1), moving).columns();
                    };
                    const int m = 33;
                    std::vector<double> ts(m);
                    std::vector<Mat> fs(m);
                    for (int i = 0; i < m; ++i) {
                        ts[i] = static_cast<double>(i) / (m - 1);
                        fs[i] = ev(ts[i]);
                    }
                    r = maslov_index(LagrangianPath(ts, fs, ev), vertical_frame(n));
                }
                built = true;
                break;
            }
        }
        if (!built) continue;
        ++s.cases;
        if (r.value != HalfInt(0)) {
            ++s.failures;
            s.notes.push_back("case " + std::to_string(c) + ": " + r.value.str() + " != 0");
        }
    }
    s.seconds = elapsed(t0);
    return s;
}

std::vector<SuiteResult> verify_axioms(const std::vector<int>& dims, int cases,
                                       std::uint64_t seed) {
    std::vector<SuiteResult> all;
    for (int n : dims) {
        const std::uint64_t s = mixseed(seed, 9000 + n);
        auto tag = [n](SuiteResult r) {
            r.name += "_n" + std::to_string(n);
            return r;
        };
        all.push_back(tag(verify_naturality(n, cases, s)));
        all.push_back(tag(verify_juxtaposition(n, cases, s)));
        all.push_back(tag(verify_product(n, cases, s)));
        all.push_back(tag(verify_homotopy_reparam(n, cases, s)));
        all.push_back(tag(verify_localization(n, cases, s)));
        all.push_back(tag(verify_zero(n, cases, s)));
    }
    return all;
}

SuiteResult verify_hormander(int n, int cases, int pairs, std::uint64_t seed) {
    SuiteResult s{"hormander"};
    auto t0 = Clock::now();
    for (int c = 0; c < cases; ++c) {
        bool done = false;
        for (int attempt = 0; attempt < 25 && !done; ++attempt) {
            try {
                const std::uint64_t cs = mixseed(seed, 701, c * 64 + attempt);
                SymplecticPath path = random_symplectic_path(n, cs);
                LagrangianFrame lam0 = random_lagrangian_frame(n, mixseed(cs, 7));
                HalfInt defect = hormander_defect(path, lam0);
                done = true;
                ++s.cases;
                if (defect.abs() > HalfInt(2 * n)) {
                    ++s.failures;
                    s.notes.push_back("case " + std::to_string(c) + ": |" + defect.str() +
                                      "| > 2n");
                }
            } catch (const DegeneratePathError&) {
            }
        }
    }
    // Path independence across endpoint-matched pairs.
    for (int c = 0; c < pairs; ++c) {
        bool done = false;
        for (int attempt = 0; attempt < 25 && !done; ++attempt) {
            try {
                const std::uint64_t cs = mixseed(seed, 702, c * 64 + attempt);
                std::mt19937_64 rng(cs);
                Mat K1 = random_generator(n, rng, 1.8);
                Mat K3 = random_generator(n, rng, 1.0);
                auto m1 = [K1](double t) { return Mat((t * K1).exp()); };
                auto m2 = [K1, K3](double t) {
                    return Mat((t * K1).exp() * (std::sin(M_PI * t) * t * (1.0 - t) * K3).exp());
                };
                const int m = 65;
                std::vector<double> ts(m);
                std::vector<Mat> a(m), b(m);
                for (int i = 0; i < m; ++i) {
                    ts[i] = static_cast<double>(i) / (m - 1);
                    a[i] = m1(ts[i]);
                    b[i] = m2(ts[i]);
                }
                SymplecticPath p1(ts, a, m1), p2(ts, b, m2);
                LagrangianFrame lam0 = random_lagrangian_frame(n, mixseed(cs, 9));
                HalfInt d1 = hormander_defect(p1, lam0);
                HalfInt d2 = hormander_defect(p2, lam0);
                done = true;
                ++s.cases;
                if (d1 != d2) {
                    ++s.failures;
                    s.notes.push_back("pair " + std::to_string(c) + ": " + d1.str() +
                                      " != " + d2.str());
                }
            } catch (const DegeneratePathError&) {
            }
        }
    }
    s.seconds = elapsed(t0);
    return s;
}

SuiteResult verify_subadditivity(int orbit_count, std::uint64_t seed) {
    SuiteResult s{"subadditivity"};
    auto t0 = Clock::now();
    SystemBundle pend = make_system("pendulum");
    const int n = pend.sys.n;
    for (int c = 0; c < orbit_count; ++c) {
        for (int attempt = 0; attempt < 10; ++attempt) {
            std::mt19937_64 rng(mixseed(seed, 801, c * 16 + attempt));
            std::uniform_real_distribution<double> uq(-2.6, 2.6), up(-2.2, 2.2), ut(0.5, 20.0);
            Vec x(2);
            x << uq(rng), up(rng);
            const double t1 = ut(rng), t2 = ut(rng);
            try {
                HalfInt whole = mu_t(pend.sys, 0.0, x, t1 + t2);
                HalfInt first = mu_t(pend.sys, 0.0, x, t1);
                OrbitSegment seg = integrate_orbit(pend.sys, 0.0, x, t1);
                HalfInt second = mu_t(pend.sys, t1, seg.states.back(), t2);
                ++s.cases;
                const HalfInt defect = whole - first - second;
                if (defect.abs() > HalfInt(2 * n)) {
                    ++s.failures;
                    s.notes.push_back("orbit " + std::to_string(c) + ": defect " +
                                      defect.str());
                }
                break;
            } catch (const DegeneratePathError&) {
                // A crossing parked exactly at t1 or t1+t2; redraw.
            }
        }
    }
    s.seconds = elapsed(t0);
    return s;
}

SuiteResult verify_lemma1(int loop_count, int k_max, std::uint64_t seed) {
    SuiteResult s{"lemma1"};
    auto t0 = Clock::now();
    SystemBundle mt = make_system("magnetic_torus");
    const EMLagrangian& L = *mt.lagrangian;
    for (int c = 0; c < loop_count; ++c) {
        Loop g = random_fourier_loop(2, mixseed(seed, 901, c), 8, 256, 1.0,
                                     Chart::torus_angles);
        for (int k = 1; k <= k_max; ++k) {
            Lemma1Result r = lemma1_check(L, g, k);
            ++s.cases;
            if (!r.holds) {
                ++s.failures;
                s.notes.push_back("loop " + std::to_string(c) + " k=" + std::to_string(k) +
                                  ": lhs " + std::to_string(r.lhs) + " > rhs " +
                                  std::to_string(r.rhs));
            }
        }
    }
    s.seconds = elapsed(t0);
    return s;
}

SuiteResult verify_slow_reparam(int loop_count, std::uint64_t seed) {
    SuiteResult s{"slow_reparam"};
    auto t0 = Clock::now();
    for (int c = 0; c < loop_count; ++c) {
        Loop g = random_fourier_loop(2, mixseed(seed, 1001, c), 8, 256, 1.2);
        SlowReparamResult r = slow_reparam(g);
        // Grid slack: 10 * dt * max |gamma''| estimated by second differences.
        double max_acc = 0;
        const int N = g.count();
        const double dt = g.dt();
        for (int i = 0; i < N; ++i) {
            Vec acc = (g.node_closed(i + 2) - 2 * g.node_closed(i + 1) + g.node_closed(i)) /
                      (dt * dt);
            max_acc = std::max(max_acc, acc.norm());
        }
        const double slack = 10.0 * r.gamma1.dt() * max_acc;
        ++s.cases;
        bool ok = r.sup_speed <= r.sup_speed_bound + slack;
        ok = ok && r.sigma_start == 0.0 && r.sigma_end == 1.0;
        ok = ok && std::abs(r.length_out - r.length_in) <= 1e-6 * (1.0 + r.length_in);
        if (!ok) {
            ++s.failures;
            s.notes.push_back("loop " + std::to_string(c) + ": speed " +
                              std::to_string(r.sup_speed) + " bound " +
                              std::to_string(r.sup_speed_bound + slack) + " dlen " +
                              std::to_string(r.length_out - r.length_in));
        }
    }
    s.seconds = elapsed(t0);
    return s;
}

} // namespace msl
