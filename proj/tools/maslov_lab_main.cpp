#include <chrono>
#include <iostream>

#include <CLI11.hpp>

#include "maslov_lab/config.hpp"
#include "maslov_lab/io.hpp"
#include "maslov_lab/orbits.hpp"
#include "maslov_lab/parallel.hpp"

namespace {

using namespace msl;
namespace fs = std::filesystem;

constexpr const char* kVersion = "1.0.0";

struct Common {
    std::string config_file;
    std::string out_dir = "out";
    std::vector<std::string> overrides;
    long long seed = 7;
};

RunConfig load_config(const Common& common, const std::string& command) {
    RunConfig cfg;
    if (!common.config_file.empty()) cfg = RunConfig::from_file(common.config_file);
    for (const auto& ov : common.overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--set expects key=value, got: " + ov);
        cfg.set(ov.substr(0, eq), ov.substr(eq + 1));
    }
    cfg.set("command", command);
    if (!cfg.has("seed")) cfg.set("seed", std::to_string(common.seed));
    if (!cfg.has("out")) cfg.set("out", common.out_dir);
    return cfg;
}

struct Manifest {
    Json outputs = Json::array();
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

    void add(const fs::path& p) { outputs.push_back(p.filename().string()); }
    void write(const fs::path& dir, const RunConfig& cfg) {
        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                .count();
        Json j{{"tool", "maslov_lab"},
               {"version", kVersion},
               {"command", cfg.get_str("command", "")},
               {"config_hash", cfg.hash()},
               {"config", cfg.canonical()},
               {"seed", cfg.get_int("seed", 0)},
               {"wall_ms", ms},
               {"threads", thread_count()},
               {"outputs", outputs}};
        write_json(dir / "manifest.json", j);
    }
};

fs::path prepare_out(const RunConfig& cfg) {
    fs::path dir = cfg.get_str("out", "out");
    fs::create_directories(dir);
    return dir;
}

SystemBundle bundle_from(const RunConfig& cfg) {
    return make_system(cfg.get_str("system", "pendulum"), cfg.system_params());
}

Vec parse_x0(const RunConfig& cfg, int n) {
    std::vector<double> vals = cfg.get_list("x0", {});
    if (static_cast<int>(vals.size()) != 2 * n)
        throw ConfigError("x0 must have 2n = " + std::to_string(2 * n) + " entries");
    Vec x(2 * n);
    for (int i = 0; i < 2 * n; ++i) x(i) = vals[i];
    return x;
}

const std::set<std::string> kCommonKeys = {"command", "seed", "out", "system", "threads"};

std::set<std::string> with_common(std::initializer_list<std::string> extra) {
    std::set<std::string> s = kCommonKeys;
    s.insert(extra.begin(), extra.end());
    return s;
}

int cmd_index(const RunConfig& cfg) {
    cfg.require_known(with_common({"x0", "T", "s", "cz"}));
    const fs::path dir = prepare_out(cfg);
    Manifest man;
    SystemBundle b = bundle_from(cfg);
    const Vec x0 = parse_x0(cfg, b.sys.n);
    const double T = cfg.get_double("T", 10.0);
    const double s = cfg.get_double("s", 0.0);
    IndexResult detail;
    HalfInt mu = mu_t(b.sys, s, x0, T, &detail);
    Json j{{"system", b.sys.name},
           {"mu_t_doubled", mu.doubled()},
           {"mu_t", mu.value()},
           {"T", T},
           {"s", s},
           {"config_hash", cfg.hash()},
           {"maslov", to_json(detail)}};
    if (cfg.get_int("cz", 0) != 0) {
        auto orbit = std::make_shared<OrbitSegment>(integrate_orbit(b.sys, s, x0, T));
        j["conley_zehnder"] = to_json(conley_zehnder(transfer_path(orbit)));
    }
    write_json(dir / "index.json", j);
    man.add(dir / "index.json");
    man.write(dir, cfg);
    return 0;
}

int cmd_orbit(const RunConfig& cfg) {
    cfg.require_known(with_common({"x0", "T", "s", "tol"}));
    const fs::path dir = prepare_out(cfg);
    Manifest man;
    SystemBundle b = bundle_from(cfg);
    IntegrateOptions opts;
    opts.tol = cfg.get_double("tol", -1.0);
    OrbitSegment orbit =
        integrate_orbit(b.sys, cfg.get_double("s", 0.0), parse_x0(cfg, b.sys.n),
                        cfg.get_double("T", 10.0), opts);
    write_orbit_csv(dir / "orbit.csv", orbit);
    man.add(dir / "orbit.csv");
    man.write(dir, cfg);
    return 0;
}

int cmd_asymptotic(const RunConfig& cfg) {
    cfg.require_known(with_common({"x0", "k", "h_max", "schedule"}));
    const fs::path dir = prepare_out(cfg);
    Manifest man;
    SystemBundle b = bundle_from(cfg);
    const Vec x0 = parse_x0(cfg, b.sys.n);
    Json j{{"system", b.sys.name}, {"config_hash", cfg.hash()}};
    if (cfg.has("k")) {
        const int k = cfg.get_int("k", 1);
        const int h_max = cfg.get_int("h_max", std::max(1, 200 / k));
        auto orbit = std::make_shared<OrbitSegment>(
            integrate_orbit(b.sys, 0.0, x0, static_cast<double>(k)));
        j["bott"] = to_json(bott_index_periodic(b.sys, orbit, k, h_max));
    } else {
        std::vector<double> schedule = cfg.get_list("schedule", {25, 50, 100, 200});
        j["point"] = to_json(asymptotic_index_point(b.sys, 0.0, x0, schedule));
        j["point"]["heuristic"] = true;
    }
    write_json(dir / "asymptotic.json", j);
    man.add(dir / "asymptotic.json");
    man.write(dir, cfg);
    return 0;
}

int cmd_sweep(const RunConfig& cfg) {
    cfg.require_known(with_common({"energies", "T"}));
    if (cfg.get_str("system", "pendulum") != "pendulum")
        throw ConfigError("sweep: only the pendulum sweep is implemented");
    const fs::path dir = prepare_out(cfg);
    Manifest man;
    auto rows = pendulum_librating_sweep(cfg.get_int("energies", 40),
                                         cfg.get_double("T", 200.0));
    CsvWriter csv(dir / "sweep.csv", {"energy", "period", "mu_hat", "action"});
    for (const auto& r : rows)
        csv.row({format_double(r.energy), format_double(r.period), format_double(r.mu_hat),
                 format_double(r.action)});
    csv.close();
    man.add(dir / "sweep.csv");
    man.write(dir, cfg);
    return 0;
}

int cmd_beta(const RunConfig& cfg) {
    cfg.require_known(with_common({"k_max", "r", "tol_r", "bott_horizon", "grid_q", "grid_p",
                                   "p_max", "bin_width"}));
    const fs::path dir = prepare_out(cfg);
    Manifest man;
    SystemBundle b = bundle_from(cfg);
    const EMLagrangian* L = b.lagrangian ? &*b.lagrangian : nullptr;
    OrbitSearchOptions opts;
    opts.bott_horizon = cfg.get_int("bott_horizon", 200);
    opts.grid_q = cfg.get_int("grid_q", 7);
    opts.grid_p = cfg.get_int("grid_p", 9);
    opts.seed_p_max = cfg.get_double("p_max", 2.5);
    opts.seed_p_min = -opts.seed_p_max;

    std::vector<PeriodicOrbitRecord> records;
    const int k_max = cfg.get_int("k_max", 8);
    for (int k = 1; k <= k_max; ++k) {
        auto found = find_periodic_orbits(b.sys, L, k, opts);
        for (auto& r : found) records.push_back(std::move(r));
    }
    // Cross-k dedup: keep the smallest k representative of each orbit.
    std::vector<PeriodicOrbitRecord> unique;
    for (auto& r : records) {
        bool dup = false;
        for (const auto& u : unique)
            if (u.minimal_period == r.minimal_period &&
                (u.winding - r.winding).cwiseAbs().maxCoeff() == 0 &&
                phase_distance(b.sys, u.x0, r.x0) < 1e-4)
                dup = true;
        if (!dup) unique.push_back(std::move(r));
    }

    Json jrecords = Json::array();
    CsvWriter csv(dir / "records.csv",
                  {"k", "minimal_period", "mu_cz_doubled", "bott", "halfwidth", "action",
                   "residual", "energy", "contractible", "seed", "config_hash"});
    for (const auto& r : unique) {
        jrecords.push_back(to_json(r));
        csv.row({std::to_string(r.k), std::to_string(r.minimal_period),
                 std::to_string(r.mu_cz.doubled()), format_double(r.bott.value),
                 format_double(r.bott.rigorous_halfwidth), format_double(r.action),
                 format_double(r.residual), format_double(r.energy),
                 r.contractible ? "1" : "0", std::to_string(r.seed_index), cfg.hash()});
    }
    csv.close();
    write_json(dir / "records.json", Json{{"config_hash", cfg.hash()}, {"records", jrecords}});
    man.add(dir / "records.csv");
    man.add(dir / "records.json");

    BetaCurve beta = beta_estimate(unique, -1, cfg.get_double("bin_width", 0.02));
    CsvWriter bcsv(dir / "beta_curve.csv", {"r_center", "beta_hat", "witness"});
    for (const auto& bin : beta.bins)
        bcsv.row({format_double(bin.r_center), format_double(bin.beta_hat),
                  std::to_string(bin.witness)});
    bcsv.close();
    write_json(dir / "hull.json", to_json(beta));
    man.add(dir / "beta_curve.csv");
    man.add(dir / "hull.json");

    if (cfg.has("r")) {
        WitnessReport w = theorem_main_witness(unique, beta, cfg.get_double("r", 0.0),
                                               cfg.get_double("tol_r", 0.02));
        write_json(dir / "witness.json", to_json(w));
        man.add(dir / "witness.json");
    }
    man.write(dir, cfg);
    return 0;
}

int cmd_verify_axioms(const RunConfig& cfg) {
    cfg.require_known(with_common({"n", "cases"}));
    const fs::path dir = prepare_out(cfg);
    Manifest man;
    std::vector<double> dims_d = cfg.get_list("n", {1, 2});
    std::vector<int> dims(dims_d.begin(), dims_d.end());
    const int cases = cfg.get_int("cases", 100);
    auto suites = verify_axioms(dims, cases, cfg.get_int("seed", 7));
    Json arr = Json::array();
    bool all_pass = true;
    for (const auto& s : suites) {
        arr.push_back(to_json(s));
        all_pass = all_pass && s.passed();
        std::cout << (s.passed() ? "PASS " : "FAIL ") << s.name << " (" << s.cases
                  << " cases, " << s.seconds << " s)\n";
    }
    write_json(dir / "axioms.json",
               Json{{"config_hash", cfg.hash()}, {"all_passed", all_pass}, {"suites", arr}});
    man.add(dir / "axioms.json");
    man.write(dir, cfg);
    return all_pass ? 0 : 2;
}

int cmd_verify_inequalities(const RunConfig& cfg) {
    cfg.require_known(with_common({"n", "cases", "orbits", "loops", "k_max", "pairs"}));
    const fs::path dir = prepare_out(cfg);
    Manifest man;
    const std::uint64_t seed = cfg.get_int("seed", 7);
    std::vector<SuiteResult> suites;
    std::vector<double> dims_d = cfg.get_list("n", {1, 2});
    for (double nd : dims_d) {
        SuiteResult h = verify_hormander(static_cast<int>(nd), cfg.get_int("cases", 50),
                                         cfg.get_int("pairs", 5), seed);
        h.name += "_n" + std::to_string(static_cast<int>(nd));
        suites.push_back(h);
    }
    suites.push_back(verify_subadditivity(cfg.get_int("orbits", 20), seed));
    suites.push_back(verify_lemma1(cfg.get_int("loops", 100), cfg.get_int("k_max", 10), seed));
    suites.push_back(verify_slow_reparam(cfg.get_int("loops", 100), seed));
    Json arr = Json::array();
    bool all_pass = true;
    for (const auto& s : suites) {
        arr.push_back(to_json(s));
        all_pass = all_pass && s.passed();
        std::cout << (s.passed() ? "PASS " : "FAIL ") << s.name << " (" << s.cases
                  << " cases, " << s.seconds << " s)\n";
    }
    write_json(dir / "inequalities.json",
               Json{{"config_hash", cfg.hash()}, {"all_passed", all_pass}, {"suites", arr}});
    man.add(dir / "inequalities.json");
    man.write(dir, cfg);
    return all_pass ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"maslov_lab: Maslov / Conley-Zehnder / Bott index computations "
                 "for Lagrangian paths and time-periodic Hamiltonian systems"};
    app.require_subcommand(1);

    Common common;
    app.add_option("--config", common.config_file, "key = value configuration file");
    app.add_option("--out", common.out_dir, "output directory");
    app.add_option("--seed", common.seed, "master seed");
    app.add_option("--set", common.overrides, "override config entries (key=value)")
        ->take_all();

    std::map<std::string, std::function<int(const RunConfig&)>> handlers;
    auto add = [&](const std::string& name, const std::string& help,
                   std::function<int(const RunConfig&)> fn) {
        app.add_subcommand(name, help);
        handlers[name] = std::move(fn);
    };
    add("index", "mu_t of an initial condition (plus optional Conley-Zehnder data)",
        cmd_index);
    add("orbit", "integrate an orbit and dump t, q, p, H, residual as CSV", cmd_orbit);
    add("asymptotic", "Bott index of a periodic orbit or heuristic point estimate",
        cmd_asymptotic);
    add("sweep", "pendulum librating sweep: energy, period, mu_hat, action", cmd_sweep);
    add("beta", "periodic-orbit search, records, beta curve, hull, optional witness",
        cmd_beta);
    add("verify-axioms", "Maslov axiom property suites", cmd_verify_axioms);
    add("verify-inequalities", "index inequality and loop estimate suites",
        cmd_verify_inequalities);

    CLI11_PARSE(app, argc, argv);

    const std::string cmd = app.get_subcommands().front()->get_name();
    try {
        RunConfig cfg = load_config(common, cmd);
        if (cfg.has("threads"))
            setenv("MASLOV_LAB_THREADS", cfg.get_str("threads", "").c_str(), 1);
        return handlers.at(cmd)(cfg);
    } catch (const msl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
