#include "maslov_lab/io.hpp"

#include <cstdio>

namespace msl {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path), width_(header.size()) {
    if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path.string());
    row(header);
}

std::string CsvWriter::escape(const std::string& f) {
    if (f.find_first_of(",\"\n\r") == std::string::npos) return f;
    std::string out = "\"";
    for (char c : f) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    if (fields.size() != width_)
        throw std::invalid_argument("CsvWriter: wrong field count");
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        out_ << escape(fields[i]);
    }
    out_ << "\r\n";
}

void CsvWriter::close() { out_.close(); }

std::uint64_t fnv1a64(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

Json to_json(const IndexResult& r) {
    Json cs = Json::array();
    for (const auto& c : r.crossings)
        cs.push_back({{"time", c.time},
                      {"dim", c.intersection_dim},
                      {"signature", c.signature},
                      {"endpoint", c.is_endpoint}});
    return Json{{"value_doubled", r.value.doubled()},
                {"value", r.value.value()},
                {"crossings", cs},
                {"refinements_used", r.refinements_used},
                {"degenerate_flag", r.degenerate_flag}};
}

Json to_json(const AsymptoticEstimate& e) {
    Json seq = Json::array();
    for (const auto& [t, v] : e.sequence) seq.push_back({t, v});
    Json j{{"value", e.value},
           {"T", e.horizon},
           {"halfwidth", e.rigorous_halfwidth},
           {"rigorous", e.rigorous},
           {"sequence", seq}};
    if (e.bott2_checked) {
        j["mu_cz_period_doubled"] = e.mu_cz_period.doubled();
        j["bott2_ok"] = e.bott2_ok;
    }
    return j;
}

Json to_json(const SuiteResult& s) {
    return Json{{"name", s.name},
                {"cases", s.cases},
                {"failures", s.failures},
                {"seconds", s.seconds},
                {"notes", s.notes},
                {"passed", s.passed()}};
}

Json to_json(const PeriodicOrbitRecord& r) {
    std::vector<double> x0(r.x0.data(), r.x0.data() + r.x0.size());
    std::vector<int> winding(r.winding.data(), r.winding.data() + r.winding.size());
    return Json{{"k", r.k},
                {"minimal_period", r.minimal_period},
                {"x0", x0},
                {"mu_cz_doubled", r.mu_cz.doubled()},
                {"bott", to_json(r.bott)},
                {"action", r.action},
                {"residual", r.residual},
                {"energy", r.energy},
                {"winding", winding},
                {"contractible", r.contractible},
                {"seed", r.seed_index},
                {"degenerate_jacobian", r.degenerate_jacobian}};
}

Json to_json(const BetaCurve& b) {
    Json bins = Json::array();
    for (const auto& bin : b.bins)
        bins.push_back({{"r", bin.r_center}, {"beta_hat", bin.beta_hat}, {"witness", bin.witness}});
    Json hull = Json::array();
    for (const auto& [r, a] : b.hull) hull.push_back({r, a});
    return Json{{"bins", bins},
                {"hull", hull},
                {"hull_convex", b.hull_convex},
                {"envelope", {{"a1", b.a1}, {"A1", b.A1}, {"a2", b.a2}, {"A2", b.A2}}}};
}

Json to_json(const WitnessReport& w) {
    return Json{{"r", w.r},
                {"status", w.status},
                {"witness", w.witness},
                {"witness_mu", w.witness_mu},
                {"witness_action", w.witness_action},
                {"second_moment", w.second_moment},
                {"action_bound_ok", w.action_bound_ok},
                {"action_bound_C", w.action_bound_C},
                {"sequence", w.sequence},
                {"note", w.note}};
}

Json to_json(const MomentDiagnostics& m) {
    return Json{{"first", m.first}, {"second", m.second}, {"tail_mass", m.tail_mass},
                {"cutoff", m.cutoff}};
}

void write_json(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_json: cannot open " + path.string());
    out << j.dump(2) << "\n";
}

void write_orbit_csv(const std::filesystem::path& path, const OrbitSegment& orbit) {
    const int n = orbit.sys->n;
    std::vector<std::string> header{"t"};
    for (int i = 0; i < n; ++i) header.push_back("q" + std::to_string(i));
    for (int i = 0; i < n; ++i) header.push_back("p" + std::to_string(i));
    header.push_back("H");
    header.push_back("symplectic_residual");
    CsvWriter csv(path, header);
    for (size_t i = 0; i < orbit.times.size(); ++i) {
        std::vector<std::string> row{format_double(orbit.times[i])};
        for (int d = 0; d < 2 * n; ++d) row.push_back(format_double(orbit.states[i](d)));
        row.push_back(format_double(orbit.sys->H(orbit.times[i], orbit.states[i])));
        row.push_back(format_double(symplectic_residual(orbit.transfers[i])));
        csv.row(row);
    }
}

} // namespace msl
