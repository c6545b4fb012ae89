#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fracint/experiments.hpp"
#include "fracint/normestim.hpp"
#include "fracint/space.hpp"
#include "fracint/weights.hpp"

namespace fracint {

/// Shortest decimal that round-trips to the same double; "inf", "-inf", "nan" otherwise.
std::string format_number(double x);

std::string sharpness_csv(const SweepResult& r);
std::string sweep_summary_json(const SweepResult& r, double gamma, const ExponentPair& pq,
                               const std::string& space_label, std::uint64_t seed);
std::string hls_csv(const std::vector<HlsRow>& rows);
std::string suite_json(const SuiteReport& r, const std::string& space_label, std::uint64_t seed, int samples);
std::string constants_json(const ConstantsReport& r);
std::string space_stats_json(const FiniteSpace& s, const SpaceStats& st);
std::string estimate_json(const NormEstimate& e, NormTarget target);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Parses the named column as numbers; throws ValidationError if absent or malformed.
    std::vector<double> column(std::string_view name) const;
};

CsvTable parse_csv(const std::string& text);

}  // namespace fracint
