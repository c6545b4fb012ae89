#include "fracint/output.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "fracint/errors.hpp"
#include "json.hpp"

namespace fracint {

using nlohmann::json;

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace {

const char* flag(bool b) { return b ? "true" : "false"; }

json number_or_null(double x) {
    return std::isfinite(x) ? json(x) : json(nullptr);
}

}  // namespace

std::string sharpness_csv(const SweepResult& r) {
    std::ostringstream os;
    os << "t,center,feasible_eps3t,feasible_eps_gamma,a1_const,ball_R,weak_norm,fp_norm,ratio\n";
    for (const SweepRow& row : r.rows) {
        os << format_number(row.t) << ',' << row.center << ',' << flag(row.feasible_eps3t) << ','
           << flag(row.feasible_eps_gamma) << ',' << format_number(row.a1_const) << ',' << format_number(row.ball_R)
           << ',' << format_number(row.weak_norm) << ',' << format_number(row.fp_norm) << ','
           << format_number(row.ratio) << '\n';
    }
    return os.str();
}

std::string sweep_summary_json(const SweepResult& r, double gamma, const ExponentPair& pq,
                               const std::string& space_label, std::uint64_t seed) {
    json doc;
    doc["gamma"] = gamma;
    doc["p"] = pq.p;
    doc["q"] = pq.q;
    if (r.fit) {
        doc["slope"] = number_or_null(r.fit->slope);
        doc["intercept"] = number_or_null(r.fit->intercept);
        doc["r_squared"] = number_or_null(r.fit->r_squared);
    } else {
        doc["slope"] = nullptr;
        doc["intercept"] = nullptr;
        doc["r_squared"] = nullptr;
    }
    doc["expected_exponent"] = 1.0 - gamma;
    doc["maximal_mode"] = std::string(to_string(r.mode));
    doc["space_label"] = space_label;
    doc["seed"] = seed;
    doc["warnings"] = r.warnings;
    return doc.dump(2) + "\n";
}

std::string hls_csv(const std::vector<HlsRow>& rows) {
    std::ostringstream os;
    os << "space_label,n,p,q,sup_lb_ratio,norm_lb,growth_factor\n";
    for (const HlsRow& r : rows) {
        os << r.space_label << ',' << r.n << ',' << format_number(r.p) << ',' << format_number(r.q) << ','
           << format_number(r.sup_lb_ratio) << ',' << format_number(r.norm_lb) << ','
           << format_number(r.growth_factor) << '\n';
    }
    return os.str();
}

std::string suite_json(const SuiteReport& r, const std::string& space_label, std::uint64_t seed, int samples) {
    json doc;
    doc["space_label"] = space_label;
    doc["seed"] = seed;
    doc["samples"] = samples;
    doc["ok"] = r.ok();
    doc["flagged"] = r.flagged();
    json list = json::array();
    for (const auto& o : r.invariants) {
        list.push_back({{"name", o.name},
                        {"checked", o.checked},
                        {"passed", o.passed},
                        {"worst_slack", number_or_null(o.worst_slack)},
                        {"flagged", o.flagged},
                        {"notes", o.notes}});
    }
    doc["invariants"] = std::move(list);
    return doc.dump(2) + "\n";
}

std::string constants_json(const ConstantsReport& r) {
    json doc;
    doc["class"] = std::string(to_string(r.cls));
    doc["value"] = r.value;
    doc["witness_center"] = r.witness_center;
    doc["witness_radius"] = r.witness_radius;
    if (r.witness_point) doc["witness_point"] = *r.witness_point;
    doc["mode"] = r.mode ? json(std::string(to_string(*r.mode))) : json(nullptr);
    return doc.dump(2) + "\n";
}

std::string space_stats_json(const FiniteSpace& s, const SpaceStats& st) {
    json doc;
    doc["label"] = s.label();
    doc["n"] = s.size();
    doc["a0"] = st.a0;
    doc["c_mu"] = st.c_mu_doubling;
    doc["c_mu_exp"] = st.c_mu_exp;
    doc["ball_ratio_sup"] = st.ball_ratio_sup;
    doc["ahlfors_upper"] = st.ahlfors_upper;
    doc["ahlfors_lower"] = st.ahlfors_lower;
    doc["ahlfors_dim"] = st.ahlfors_dim;
    return doc.dump(2) + "\n";
}

std::string estimate_json(const NormEstimate& e, NormTarget target) {
    json doc;
    doc["value"] = e.value;
    doc["target"] = std::string(to_string(target));
    doc["family_tag"] = e.family_tag;
    doc["refined"] = e.refined;
    doc["witness"] = e.witness;
    return doc.dump(2) + "\n";
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) {
        while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
        while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line == "\r") continue;
        auto cells = split_line(line);
        if (t.header.empty()) {
            t.header = std::move(cells);
        } else {
            if (cells.size() != t.header.size()) {
                throw ValidationError("csv row " + std::to_string(t.rows.size() + 1) + " has " +
                                      std::to_string(cells.size()) + " cells, header has " +
                                      std::to_string(t.header.size()));
            }
            t.rows.push_back(std::move(cells));
        }
    }
    if (t.header.empty()) throw ValidationError("csv input is empty");
    return t;
}

std::vector<double> CsvTable::column(std::string_view name) const {
    std::size_t col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) col = i;
    }
    if (col == header.size()) throw ValidationError("csv has no column \"" + std::string(name) + "\"");
    std::vector<double> out;
    for (const auto& row : rows) {
        const std::string& cell = row[col];
        double v = 0.0;
        const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
            throw ValidationError("csv cell \"" + cell + "\" in column \"" + std::string(name) + "\" is not a number");
        }
        out.push_back(v);
    }
    return out;
}

}  // namespace fracint
