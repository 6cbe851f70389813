#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "maslov_lab/systems.hpp"
#include "maslov_lab/verify.hpp"
#include "oracles.hpp"

using namespace msl;

TEST_CASE("vector field conventions") {
    SystemBundle ho = make_system("harmonic_oscillator", {{"omega1", 1.0}});
    Vec x(2);
    x << 0.3, -0.4;
    Vec f = vector_field(ho.sys, 0, x);
    CHECK(f(0) == doctest::Approx(-0.4));  // qdot = p
    CHECK(f(1) == doctest::Approx(-0.3));  // pdot = -q

    SystemBundle pend = make_system("pendulum");
    x << 0.7, 0.2;
    f = vector_field(pend.sys, 0, x);
    CHECK(f(0) == doctest::Approx(0.2));
    CHECK(f(1) == doctest::Approx(-std::sin(0.7)));

    SystemBundle saddle = make_system("inverted_saddle");
    x << 0.5, -0.25;
    f = vector_field(saddle.sys, 0, x);
    CHECK(f(0) == doctest::Approx(0.5));    // qdot = H_p = q
    CHECK(f(1) == doctest::Approx(0.25));   // pdot = -H_q = -p
}

TEST_CASE("harmonic oscillator closed form over one turn") {
    SystemBundle ho = make_system("harmonic_oscillator", {{"omega1", 1.0}});
    Vec x0(2);
    x0 << 1, 0;
    OrbitSegment orb = integrate_orbit(ho.sys, 0.0, x0, 2 * M_PI);
    CHECK((orb.states.back() - x0).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(inf_norm(orb.transfers.back() - Mat::Identity(2, 2)) < 1e-8);
    CHECK(orb.stats.max_symplectic_residual < tols().symp);
    CHECK(orb.stats.energy_drift < 10 * orb.tol_used * 1e6);  // absolute drift, tiny
}

TEST_CASE("pendulum equilibrium transfer matches the rotation closed form") {
    SystemBundle pend = make_system("pendulum");
    Vec x0(2);
    x0 << 0, 0;
    OrbitSegment orb = integrate_orbit(pend.sys, 0.0, x0, 5.0);
    CHECK(orb.states.back().cwiseAbs().maxCoeff() < 1e-12);
    Mat K(2, 2);
    K << 0, 1, -1, 0;
    for (size_t i = 0; i < orb.times.size(); i += 7) {
        Mat expected = oracle::expm_taylor(Mat(orb.times[i] * K));
        CHECK(inf_norm(orb.transfers[i] - expected) < 1e-7);
    }
}

TEST_CASE("transfers stay symplectic along random pendulum orbits") {
    SystemBundle pend = make_system("pendulum");
    for (int c = 0; c < 5; ++c) {
        Vec x0(2);
        x0 << 0.4 * c - 1.0, 0.5 + 0.3 * c;
        OrbitSegment orb = integrate_orbit(pend.sys, 0.0, x0, 30.0);
        for (size_t i = 0; i < orb.times.size(); i += 11)
            CHECK(symplectic_residual(orb.transfers[i]) < tols().symp);
        CHECK(orb.stats.energy_drift < 1e-7);
        // Transfer spacing contract for downstream crossing detection.
        for (size_t i = 1; i < orb.times.size(); ++i) {
            Mat d = orb.transfers[i] - orb.transfers[i - 1];
            const double scale = std::max(1.0, inf_norm(orb.transfers[i - 1]));
            CHECK(inf_norm(d) / scale < 0.2);
        }
    }
}

TEST_CASE("dense output is consistent with stored samples") {
    SystemBundle pend = make_system("pendulum");
    Vec x0(2);
    x0 << 1.1, 0.3;
    OrbitSegment orb = integrate_orbit(pend.sys, 0.0, x0, 8.0);
    for (double t : {0.37, 2.0, 5.5, 7.91}) {
        Vec xs = orb.state_at(t);
        OrbitSegment direct = integrate_orbit(pend.sys, 0.0, x0, t);
        CHECK((xs - direct.states.back()).cwiseAbs().maxCoeff() < 1e-7);
    }
}

TEST_CASE("vertical evolution frames") {
    SystemBundle ho = make_system("harmonic_oscillator", {{"omega1", 1.0}});
    Vec x0(2);
    x0 << 1, 0;
    auto orb = std::make_shared<OrbitSegment>(integrate_orbit(ho.sys, 0.0, x0, 3.0));
    LagrangianPath path = vertical_evolution(orb);
    // t = s: vertical frame.
    CHECK(intersection_dimension(LagrangianFrame(path.at(0.0)), vertical_frame(1)) == 1);
    // Rotating line: Phi(t) vertical = span{(sin t, cos t)}.
    Mat f = path.at(1.3);
    const double angle_q = f(0, 0), angle_p = f(1, 0);
    CHECK(std::abs(angle_q * std::cos(1.3) - angle_p * std::sin(1.3)) < 1e-7);
}

TEST_CASE("mu_t pinned values") {
    SystemBundle ho = make_system("harmonic_oscillator", {{"omega1", 1.0}});
    Vec x0(2);
    x0 << 1, 0;
    // Full turn: 2 - 1/2 = 3/2.
    CHECK(mu_t(ho.sys, 0.0, x0, 2 * M_PI) == HalfInt::from_doubled(3));
    // t = 0 convention: 0 for fiberwise-convex systems.
    CHECK(mu_t(ho.sys, 0.0, x0, 0.0) == HalfInt(0));

    SystemBundle saddle = make_system("inverted_saddle");
    Vec xs(2);
    xs << 0.2, 0.1;
    // Vertical-preserving flow: mu == 0, so mu_t = -n/2 at every horizon.
    CHECK(mu_t(saddle.sys, 0.0, xs, 0.0) == HalfInt::from_doubled(-1));
    CHECK(mu_t(saddle.sys, 0.0, xs, 4.0) == HalfInt::from_doubled(-1));

    // Rotating pendulum orbit: no conjugate instants, mu_t stays 0.
    SystemBundle pend = make_system("pendulum");
    Vec xr(2);
    xr << 0.0, 3.0;
    CHECK(mu_t(pend.sys, 0.0, xr, 10.0) == HalfInt(0));

    // Librating near the bottom: indices follow the rotation count.
    Vec xl(2);
    xl << 0.0, 0.1;
    HalfInt small = mu_t(pend.sys, 0.0, xl, 2 * M_PI);
    CHECK(small.doubled() >= 2);  // at least one interior crossing by t = 2pi
}

TEST_CASE("monodromy index") {
    // Unit harmonic oscillator, k = 7: crossings of the graph at 2pi within
    // (0,7): one, signature +2, plus the initial half: mu_CZ = 3.
    SystemBundle ho = make_system("harmonic_oscillator", {{"omega1", 1.0}});
    Vec origin = Vec::Zero(2);
    MonodromyResult r = monodromy_index(ho.sys, origin, 7);
    CHECK(r.mu_cz == HalfInt(3));
    CHECK(std::abs(r.mu_cz.value() - 7.0 / M_PI) <= 2.0);

    // Pendulum stable equilibrium: same linearization.
    SystemBundle pend = make_system("pendulum");
    Vec bottom = Vec::Zero(2);
    MonodromyResult rp = monodromy_index(pend.sys, bottom, 7);
    CHECK(rp.mu_cz == HalfInt(3));

    // Hyperbolic fixed point of H = qp: zero at every period.
    SystemBundle saddle = make_system("inverted_saddle");
    Vec origin2 = Vec::Zero(2);
    for (int k : {1, 3, 6}) CHECK(monodromy_index(saddle.sys, origin2, k).mu_cz == HalfInt(0));

    // Non-periodic input is rejected.
    Vec off(2);
    off << 0.5, 0.5;
    CHECK_THROWS_AS(monodromy_index(pend.sys, off, 1), std::invalid_argument);
}

TEST_CASE("subadditivity defect on pendulum orbits, reduced budget") {
    SuiteResult s = verify_subadditivity(6, 12);
    CAPTURE(s.notes);
    CHECK(s.failures == 0);
    CHECK(s.cases >= 4);
}

TEST_CASE("fd derivative fallback matches analytic derivatives") {
    SystemBundle pend = make_system("pendulum");
    HamiltonianSystem fd = pend.sys;
    fd.make_fd_derivatives();
    CHECK_FALSE(fd.derivatives_analytic);
    Vec x(2);
    x << 0.9, -0.4;
    CHECK((fd.grad(0.3, x) - pend.sys.grad(0.3, x)).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(inf_norm(fd.hess(0.3, x) - pend.sys.hess(0.3, x)) < 1e-4);
}
