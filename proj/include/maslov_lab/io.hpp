#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "maslov_lab/asymptotic.hpp"
#include "maslov_lab/orbits.hpp"
#include "maslov_lab/verify.hpp"

namespace msl {

using Json = nlohmann::json;

/// Shortest round-trip decimal representation (%.17g).
std::string format_double(double v);

/// RFC 4180 CSV: '.' decimal separator, mandatory header, fields quoted when
/// they contain separators or quotes.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
    void row(const std::vector<std::string>& fields);
    void close();

private:
    std::ofstream out_;
    size_t width_;
    static std::string escape(const std::string& f);
};

std::uint64_t fnv1a64(const std::string& data);
std::string hex64(std::uint64_t v);

Json to_json(const IndexResult& r);
Json to_json(const AsymptoticEstimate& e);
Json to_json(const SuiteResult& s);
Json to_json(const PeriodicOrbitRecord& r);
Json to_json(const BetaCurve& b);
Json to_json(const WitnessReport& w);
Json to_json(const MomentDiagnostics& m);

void write_json(const std::filesystem::path& path, const Json& j);

void write_orbit_csv(const std::filesystem::path& path, const OrbitSegment& orbit);

} // namespace msl
