#include "commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "fracint/errors.hpp"
#include "fracint/experiments.hpp"
#include "fracint/normestim.hpp"
#include "fracint/operators.hpp"
#include "fracint/output.hpp"
#include "fracint/parallel.hpp"
#include "fracint/space.hpp"
#include "fracint/space_io.hpp"
#include "fracint/weights.hpp"
#include "json.hpp"

namespace fracint::cli {

namespace {

namespace fs = std::filesystem;

const double kCliExponentTolerance = 1e-6;

struct SuiteFailed {};

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string part;
    std::istringstream is(text);
    while (std::getline(is, part, sep)) {
        if (!part.empty()) out.push_back(part);
    }
    return out;
}

double parse_double(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw ParameterError("cannot parse " + what + " \"" + text + "\"");
}

void emit(const std::string& text, const std::string& out) {
    if (out.empty()) {
        std::cout << text;
    } else {
        write_file_atomic(out, text);
    }
}

// "KIND:N1,N2,..." generates a family; otherwise a comma-separated list of space files.
std::vector<FiniteSpace> load_family(const std::string& spec, std::uint64_t seed) {
    std::vector<FiniteSpace> family;
    const auto colon = spec.find(':');
    if (colon != std::string::npos) {
        const auto kind = parse_space_kind(spec.substr(0, colon));
        if (!kind) throw ParameterError("unknown space kind in family \"" + spec + "\"");
        for (const auto& n : split(spec.substr(colon + 1), ',')) {
            GenerateParams gp;
            gp.n = static_cast<std::size_t>(parse_double(n, "family size"));
            family.push_back(generate_space(*kind, gp, seed));
        }
    } else {
        for (const auto& path : split(spec, ',')) family.push_back(read_space(path));
    }
    if (family.empty()) throw ParameterError("family \"" + spec + "\" is empty");
    return family;
}

std::vector<std::pair<double, double>> parse_pairs(const std::string& text) {
    std::vector<std::pair<double, double>> pairs;
    for (const auto& item : split(text, ',')) {
        const auto parts = split(item, ':');
        if (parts.size() != 2) throw ParameterError("pair \"" + item + "\" must look like P:Q");
        pairs.emplace_back(parse_double(parts[0], "p"), parse_double(parts[1], "q"));
    }
    if (pairs.empty()) throw ParameterError("no exponent pairs given");
    return pairs;
}

MaximalMode parse_mode(const std::string& text) {
    const auto m = parse_maximal_mode(text);
    if (!m) throw ParameterError("unknown maximal mode \"" + text + "\"");
    return *m;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"Fractional integrals and weights on finite spaces of homogeneous type", "fracint"};
    app.require_subcommand(1);
    int threads = -1;
    app.add_option("--threads", threads, "worker threads (0 = hardware); falls back to HHT_THREADS");

    // space gen / validate
    auto* space = app.add_subcommand("space", "generate or validate spaces");
    space->require_subcommand(1);
    auto* gen = space->add_subcommand("gen", "generate a space file");
    std::string kind_text, out, base_text = "grid1d";
    std::size_t gen_n = 0, gen_m = 4;
    double eps = 1.0, lo = 1.0, hi = 2.0;
    std::uint64_t seed = 0;
    gen->add_option("--kind", kind_text, "grid1d|lattice1d|dyadic_line|cantor_tree|snowflake|perturbed")->required();
    gen->add_option("--n", gen_n, "size (tree depth for cantor_tree)")->required();
    gen->add_option("--m", gen_m, "dyadic_line resolution");
    gen->add_option("--eps", eps, "snowflake exponent");
    gen->add_option("--base", base_text, "base kind for snowflake/perturbed");
    gen->add_option("--lo", lo, "perturbed mass factor lower bound");
    gen->add_option("--hi", hi, "perturbed mass factor upper bound");
    gen->add_option("--seed", seed, "seed");
    gen->add_option("--out", out, "output space file")->required();

    auto* validate = space->add_subcommand("validate", "validate a space file and print its constants");
    std::string space_path;
    std::optional<double> dim;
    validate->add_option("file", space_path, "space file")->required();
    validate->add_option("--dim", dim, "Ahlfors dimension");

    // constants
    auto* constants = app.add_subcommand("constants", "weight-class constant");
    std::string weight_path, class_text, mode_text = "full";
    double p = 2.0, q = 2.0;
    constants->add_option("--space", space_path, "space file")->required();
    constants->add_option("--weight", weight_path, "weight file")->required();
    constants->add_option("--class", class_text, "a1|ap|apq|a1q")->required();
    constants->add_option("--p", p, "p");
    constants->add_option("--q", q, "q");
    constants->add_option("--mode", mode_text, "full|centered (A1-type)");
    constants->add_option("--out", out, "output JSON (default stdout)");

    // apply
    auto* apply = app.add_subcommand("apply", "apply an operator to a function");
    std::string op_text, fn_path;
    OperatorParams params;
    apply->add_option("--space", space_path, "space file")->required();
    apply->add_option("--op", op_text, "tgamma|riesz|frak|maximal")->required();
    apply->add_option("--gamma", params.gamma, "T_gamma order");
    apply->add_option("--s", params.s, "riesz exponent");
    apply->add_option("--alpha", params.alpha, "frak exponent");
    apply->add_option("--mode", mode_text, "full|centered (maximal)");
    apply->add_option("--fn", fn_path, "function file")->required();
    apply->add_option("--out", out, "output function file")->required();

    // check
    auto* check = app.add_subcommand("check", "run the invariant suite");
    int samples = 100;
    check->add_option("--space", space_path, "space file")->required();
    check->add_option("--seed", seed, "seed");
    check->add_option("--samples", samples, "random draws per invariant")->check(CLI::PositiveNumber);
    check->add_option("--out", out, "report JSON (default stdout)");

    // sweeps
    auto* sweep = app.add_subcommand("sweep", "experiments");
    sweep->require_subcommand(1);
    auto* sharp = sweep->add_subcommand("sharpness", "power-weight sharpness sweep");
    double gamma = 0.5, tmin = 0.1, tmax = 0.5;
    int steps = 9;
    std::string mode_choice = "auto";
    sharp->add_option("--space", space_path, "space file")->required();
    sharp->add_option("--gamma", gamma, "gamma")->required();
    sharp->add_option("--p", p, "p")->required();
    sharp->add_option("--q", q, "q")->required();
    sharp->add_option("--tmin", tmin, "smallest t");
    sharp->add_option("--tmax", tmax, "largest t");
    sharp->add_option("--steps", steps, "number of t values");
    sharp->add_option("--mode", mode_choice, "auto|full|centered");
    sharp->add_option("--seed", seed, "seed");
    sharp->add_option("--out", out, "output directory")->required();

    auto* hls = sweep->add_subcommand("hls", "HLS exponent scan over a family");
    std::string family_spec, pairs_text;
    hls->add_option("--family", family_spec, "KIND:N1,N2,... or file1,file2,...")->required();
    hls->add_option("--gamma", gamma, "gamma")->required();
    hls->add_option("--pairs", pairs_text, "P:Q,P:Q,...")->required();
    hls->add_option("--seed", seed, "seed");
    hls->add_option("--out", out, "output directory")->required();

    // fit
    auto* fit = app.add_subcommand("fit", "log-log least squares on two CSV columns");
    std::string in_path, x_col, y_col;
    fit->add_option("--in", in_path, "CSV file")->required();
    fit->add_option("--x", x_col, "x column")->required();
    fit->add_option("--y", y_col, "y column")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (threads < 0) {
            const char* env = std::getenv("HHT_THREADS");
            threads = env ? static_cast<int>(parse_double(env, "HHT_THREADS")) : 1;
        }
        require(threads >= 0, "--threads must be non-negative");
        set_thread_count(static_cast<unsigned>(threads));

        if (*gen) {
            const auto kind = parse_space_kind(kind_text);
            if (!kind) throw ParameterError("unknown space kind \"" + kind_text + "\"");
            const auto base = parse_space_kind(base_text);
            if (!base) throw ParameterError("unknown base kind \"" + base_text + "\"");
            GenerateParams gp;
            gp.n = gen_n;
            gp.m = gen_m;
            gp.epsilon = eps;
            gp.factor_lo = lo;
            gp.factor_hi = hi;
            gp.base = *base;
            write_space(generate_space(*kind, gp, seed), out);
        } else if (*validate) {
            const FiniteSpace s = read_space(space_path);
            std::cout << space_stats_json(s, validate_space(s, dim));
        } else if (*constants) {
            const FiniteSpace s = read_space(space_path);
            const Weight w = read_vector(weight_path);
            const auto cls = parse_weight_class(class_text);
            if (!cls) throw ParameterError("unknown class \"" + class_text + "\"");
            WeightClassSpec spec{*cls, p, q, parse_mode(mode_text)};
            if (*cls == WeightClass::a1q && constants->count("--q") == 0) {
                throw ParameterError("class a1q needs --q");
            }
            emit(constants_json(weight_constant(s, w, spec)), out);
        } else if (*apply) {
            const FiniteSpace s = read_space(space_path);
            const FunctionVector f = read_vector(fn_path);
            FunctionVector result;
            if (op_text == "maximal") {
                result = maximal(s, f, parse_mode(mode_text));
            } else {
                FractionalKind kind;
                if (op_text == "tgamma") {
                    kind = FractionalKind::t_gamma;
                    check_gamma(params.gamma);
                } else if (op_text == "riesz") {
                    kind = FractionalKind::riesz_s;
                } else if (op_text == "frak") {
                    kind = FractionalKind::frak_alpha;
                } else {
                    throw ParameterError("unknown operator \"" + op_text + "\"");
                }
                result = apply_fractional(s, kind, params, f);
            }
            write_vector(result, out);
        } else if (*check) {
            const FiniteSpace s = read_space(space_path);
            const SuiteReport report = invariant_suite(s, seed, samples);
            emit(suite_json(report, s.label(), seed, samples), out);
            for (const auto& inv : report.invariants) {
                std::cerr << (inv.ok() ? "ok   " : "FAIL ") << inv.name << " " << inv.passed << "/" << inv.checked;
                if (inv.flagged) std::cerr << " (" << inv.flagged << " flagged)";
                std::cerr << "\n";
            }
            if (!report.ok()) throw SuiteFailed{};
        } else if (*sharp) {
            const FiniteSpace s = read_space(space_path);
            const auto choice = parse_mode_choice(mode_choice);
            if (!choice) throw ParameterError("unknown mode \"" + mode_choice + "\"");
            SweepConfig cfg;
            cfg.mode = *choice;
            cfg.seed = seed;
            cfg.exponent_tolerance = kCliExponentTolerance;
            const ExponentPair pq = ExponentPair::make(p, q);
            const SweepResult r = sharpness_sweep(s, gamma, pq, linear_grid(tmin, tmax, steps), cfg);
            fs::create_directories(out);
            write_file_atomic(fs::path(out) / "sharpness.csv", sharpness_csv(r));
            write_file_atomic(fs::path(out) / "summary.json", sweep_summary_json(r, gamma, pq, s.label(), seed));
            for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
        } else if (*hls) {
            const auto family = load_family(family_spec, seed);
            const auto pairs = parse_pairs(pairs_text);
            const auto rows = hls_scan(family, gamma, pairs);
            fs::create_directories(out);
            write_file_atomic(fs::path(out) / "hls.csv", hls_csv(rows));
        } else if (*fit) {
            const CsvTable table = parse_csv(read_file(in_path));
            const FitResult r = fit_power_law(table.column(x_col), table.column(y_col));
            nlohmann::json doc{{"slope", r.slope},
                               {"intercept", r.intercept},
                               {"r_squared", r.r_squared},
                               {"n_points", r.n_points}};
            std::cout << doc.dump(2) << "\n";
        }
    } catch (const SuiteFailed&) {
        return 1;
    } catch (const InvariantViolation& e) {
        std::cerr << "invariant violated: " << e.what() << "\n";
        return 1;
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace fracint::cli
