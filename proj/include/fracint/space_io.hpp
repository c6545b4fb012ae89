#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fracint/space.hpp"

namespace fracint {

// Space file schema:
//   { "label": str, "a0_declared": num?, "category": str?,
//     "points": [{"id": int, "mass": num, "coords": [num]?}],
//     "metric": {"type": "euclidean"|"matrix"|"snowflake", "epsilon": num?, "base": metric?},
//     "distances": [[num]]? }
// "distances" is required iff some metric in the chain has type "matrix".
FiniteSpace space_from_json_text(const std::string& text);
std::string space_to_json_text(const FiniteSpace& s);

FiniteSpace read_space(const std::filesystem::path& path);
void write_space(const FiniteSpace& s, const std::filesystem::path& path);

// FunctionVector / Weight files: a JSON array of n numbers.
std::vector<double> read_vector(const std::filesystem::path& path);
void write_vector(const std::vector<double>& values, const std::filesystem::path& path);

// Writes through a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace fracint
