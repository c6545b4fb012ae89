#include "fracint/space_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fracint/errors.hpp"
#include "json.hpp"

namespace fracint {

using nlohmann::json;

namespace {

std::vector<double> metric_matrix(const json& metric, const json& doc,
                                  const std::vector<std::vector<double>>& coords, std::size_t n) {
    if (!metric.is_object() || !metric.contains("type")) {
        throw ValidationError("metric must be an object with a \"type\"");
    }
    const std::string type = metric.at("type").get<std::string>();
    if (type == "matrix") {
        if (!doc.contains("distances")) {
            throw ValidationError("metric type \"matrix\" requires \"distances\"");
        }
        const json& rows = doc.at("distances");
        if (!rows.is_array() || rows.size() != n) {
            throw ValidationError("\"distances\" must be an n x n array");
        }
        std::vector<double> dist(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            if (!rows[i].is_array() || rows[i].size() != n) {
                throw ValidationError("row " + std::to_string(i) + " of \"distances\" has wrong length");
            }
            for (std::size_t j = 0; j < n; ++j) {
                dist[i * n + j] = rows[i][j].get<double>();
            }
        }
        return dist;
    }
    if (type == "euclidean") {
        std::vector<double> dist(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            if (coords[i].empty() || coords[i].size() != coords[0].size()) {
                throw ValidationError("euclidean metric needs equal-length coords on every point (point " +
                                      std::to_string(i) + ")");
            }
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                double acc = 0.0;
                for (std::size_t k = 0; k < coords[i].size(); ++k) {
                    const double d = coords[i][k] - coords[j][k];
                    acc += d * d;
                }
                dist[i * n + j] = coords[i].size() == 1 ? std::abs(coords[i][0] - coords[j][0])
                                                        : std::sqrt(acc);
            }
        }
        return dist;
    }
    if (type == "snowflake") {
        if (!metric.contains("epsilon") || !metric.contains("base")) {
            throw ValidationError("snowflake metric requires \"epsilon\" and \"base\"");
        }
        const double eps = metric.at("epsilon").get<double>();
        if (!(eps > 0.0 && eps <= 1.0)) {
            throw ValidationError("snowflake epsilon must lie in (0, 1]");
        }
        std::vector<double> dist = metric_matrix(metric.at("base"), doc, coords, n);
        for (double& d : dist) {
            d = d == 0.0 ? 0.0 : std::pow(d, eps);
        }
        return dist;
    }
    throw ValidationError("unknown metric type \"" + type + "\"");
}

}  // namespace

FiniteSpace space_from_json_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("space file is not valid JSON: ") + e.what());
    }
    try {
        const json& pts = doc.at("points");
        const std::size_t n = pts.size();
        if (n == 0) {
            throw ValidationError("space file has no points");
        }
        std::vector<double> mass(n);
        std::vector<std::vector<double>> coords(n);
        std::vector<bool> seen(n, false);
        for (const json& p : pts) {
            const auto id = p.at("id").get<long long>();
            if (id < 0 || static_cast<std::size_t>(id) >= n || seen[static_cast<std::size_t>(id)]) {
                throw ValidationError("point ids must be a permutation of 0..n-1 (bad id " +
                                      std::to_string(id) + ")");
            }
            const auto idx = static_cast<std::size_t>(id);
            seen[idx] = true;
            mass[idx] = p.at("mass").get<double>();
            if (p.contains("coords")) {
                coords[idx] = p.at("coords").get<std::vector<double>>();
            }
        }

        SpaceOptions opt;
        opt.label = doc.value("label", std::string{});
        if (doc.contains("a0_declared") && !doc.at("a0_declared").is_null()) {
            opt.a0_declared = doc.at("a0_declared").get<double>();
        }
        if (doc.contains("category") && !doc.at("category").is_null()) {
            opt.category = parse_category(doc.at("category").get<std::string>());
            if (!opt.category) {
                throw ValidationError("unknown category tag");
            }
        }
        std::vector<double> dist = metric_matrix(doc.at("metric"), doc, coords, n);
        const bool all_coords = std::all_of(coords.begin(), coords.end(),
                                            [](const auto& c) { return !c.empty(); });
        const bool one_dim = all_coords && coords[0].size() == 1;
        if (all_coords) {
            opt.coords = std::move(coords);
        }
        opt.max_points = one_dim ? kMaxPointsOneDim : kMaxPointsGeneric;
        return FiniteSpace::create(std::move(dist), std::move(mass), std::move(opt));
    } catch (const json::exception& e) {
        throw ValidationError(std::string("malformed space file: ") + e.what());
    }
}

std::string space_to_json_text(const FiniteSpace& s) {
    const std::size_t n = s.size();
    json doc;
    doc["label"] = s.label();
    if (s.a0_declared()) {
        doc["a0_declared"] = *s.a0_declared();
    }
    if (s.category()) {
        doc["category"] = std::string(to_string(*s.category()));
    }
    json pts = json::array();
    for (std::size_t i = 0; i < n; ++i) {
        json p{{"id", i}, {"mass", s.mass(i)}};
        if (!s.coords().empty()) {
            p["coords"] = s.coords()[i];
        }
        pts.push_back(std::move(p));
    }
    doc["points"] = std::move(pts);
    doc["metric"] = json{{"type", "matrix"}};
    json rows = json::array();
    for (std::size_t i = 0; i < n; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < n; ++j) {
            row.push_back(s.dist(i, j));
        }
        rows.push_back(std::move(row));
    }
    doc["distances"] = std::move(rows);
    return doc.dump() + "\n";
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot open " + path.string());
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw ValidationError("cannot write " + tmp.string());
        }
        out << contents;
        out.flush();
        if (!out) {
            throw ValidationError("failed writing " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

FiniteSpace read_space(const std::filesystem::path& path) {
    return space_from_json_text(read_file(path));
}

void write_space(const FiniteSpace& s, const std::filesystem::path& path) {
    write_file_atomic(path, space_to_json_text(s));
}

std::vector<double> read_vector(const std::filesystem::path& path) {
    try {
        const json doc = json::parse(read_file(path));
        if (!doc.is_array()) {
            throw ValidationError(path.string() + " must hold a JSON array of numbers");
        }
        return doc.get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw ValidationError("malformed vector file " + path.string() + ": " + e.what());
    }
}

void write_vector(const std::vector<double>& values, const std::filesystem::path& path) {
    write_file_atomic(path, json(values).dump() + "\n");
}

}  // namespace fracint
