// qb: Bang norms, Bang degrees, log-convex minorants, and the inequality
// verification suites, from the command line.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qa/bang.hpp"
#include "qa/harness.hpp"

namespace {

using qa::harness::json;

json parse_json_arg(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const std::exception& e) {
        throw qa::harness::ConfigError(what + ": invalid JSON: " + e.what());
    }
}

json bang_degree_to_json(const qa::BangDegree& d) {
    json out = {{"value", d.unbounded ? json(nullptr) : json(d.value)},
                {"K_f", d.threshold},
                {"partial_sum", d.partial_sum},
                {"unbounded", d.unbounded}};
    return out;
}

void write_text(const std::string& path, const std::string& body) {
    if (path == "-" || path.empty()) {
        std::fputs(body.c_str(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw qa::harness::RunError("write", "cannot open output file: " + path);
    out << body;
    if (!out) throw qa::harness::RunError("write", "write failed: " + path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantitative checks for quasianalytic Denjoy-Carleman classes"};
    app.require_subcommand(1);

    // degree
    auto* degree = app.add_subcommand("degree", "Bang degree of a class at a given sup norm");
    std::string degree_gen = R"({"kind":"analytic","C":1.0})";
    double degree_sup = 1.0;
    long degree_len = 200;
    degree->add_option("--generator", degree_gen, "generator JSON");
    degree->add_option("--sup-norm", degree_sup, "sup norm in (0,1]")->required();
    degree->add_option("--length", degree_len, "sequence length J");

    // profile
    auto* profile = app.add_subcommand("profile", "pointwise norm profile as CSV");
    std::string profile_fn, profile_gen = R"({"kind":"analytic","C":1.0})", profile_out = "-";
    long profile_grid = 101, profile_len = 200;
    profile->add_option("--function", profile_fn, "function JSON")->required();
    profile->add_option("--generator", profile_gen, "generator JSON");
    profile->add_option("--grid", profile_grid, "number of grid points");
    profile->add_option("--length", profile_len, "sequence length J");
    profile->add_option("--out", profile_out, "output CSV path ('-' for stdout)");

    // verify
    auto* verify = app.add_subcommand("verify", "run verification suites from a config");
    std::string verify_config, verify_out = "-", verify_format = "json";
    std::optional<std::uint64_t> verify_seed;
    bool verify_timings = false;
    verify->add_option("--config", verify_config, "config JSON path")->required();
    verify->add_option("--seed", verify_seed, "seed override");
    verify->add_option("--out", verify_out, "report output path ('-' for stdout)");
    verify->add_option("--format", verify_format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    verify->add_flag("--timings", verify_timings, "include wall times in the report");

    // construct
    auto* construct = app.add_subcommand("construct", "build a concrete model");
    auto* nonext = construct->add_subcommand("nonextendable", "even series with slow coefficients");
    double ne_c = qa::harness::kDefaultSeriesC;
    long ne_k = qa::harness::kDefaultSeriesK;
    std::string ne_out = "-";
    nonext->add_option("--C", ne_c, "coefficient decay constant");
    nonext->add_option("--K", ne_k, "truncation order (even)");
    nonext->add_option("--out", ne_out, "output path ('-' for stdout)");
    construct->require_subcommand(1);

    // minorant
    auto* minorant = app.add_subcommand("minorant", "largest log-convex minorant");
    std::string minorant_values;
    minorant->add_option("--values", minorant_values, "JSON array of positive values")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*degree) {
            const qa::Generator gen = qa::harness::generator_from_json(
                parse_json_arg(degree_gen, "--generator"), "--generator");
            const qa::LogConvexSequence seq = qa::from_generator(gen, degree_len + 1);
            const qa::BangDegree d = qa::bang_degree(seq, degree_sup);
            std::puts(bang_degree_to_json(d).dump(2).c_str());
            return 0;
        }
        if (*profile) {
            const qa::Generator gen = qa::harness::generator_from_json(
                parse_json_arg(profile_gen, "--generator"), "--generator");
            const qa::FunctionModel f = qa::harness::function_from_json(
                parse_json_arg(profile_fn, "--function"), "--function");
            const qa::LogConvexSequence seq = qa::from_generator(gen, profile_len + 1);
            const qa::BangProfile prof = qa::compute_profile(f, seq, profile_grid);
            qa::harness::emit_profile_csv(prof, profile_out);
            return 0;
        }
        if (*verify) {
            qa::harness::ExperimentConfig cfg = qa::harness::load_config(verify_config);
            if (const char* env_seed = std::getenv("QB_SEED"))
                cfg.seed = std::strtoull(env_seed, nullptr, 10);
            if (verify_seed) cfg.seed = *verify_seed;
            const qa::harness::VerificationReport report = qa::harness::run_suite(cfg);
            qa::harness::emit_report(report,
                                     verify_format == "json"
                                         ? qa::harness::ReportFormat::json_format
                                         : qa::harness::ReportFormat::csv_format,
                                     verify_out, verify_timings);
            return report.all_passed() ? 0 : 1;
        }
        if (*construct) {
            const qa::PowerSeries ps(ne_c, ne_k);
            json coeffs = json::array();
            for (long j = 0; j <= ne_k; j += 2)
                coeffs.push_back(json{{"j", j}, {"c", ps.coefficient(j)}});
            json tails = json::array();
            for (long n = 0; n <= 20; ++n)
                tails.push_back(json{{"order", n}, {"log_tail", ps.log_tail(n)}});
            const json out = {{"schema_version", 1},
                              {"kind", "nonextendable"},
                              {"C", ne_c},
                              {"K", ne_k},
                              {"coefficients", std::move(coeffs)},
                              {"derivative_log_tails", std::move(tails)}};
            write_text(ne_out, out.dump(2) + "\n");
            return 0;
        }
        if (*minorant) {
            const json values = parse_json_arg(minorant_values, "--values");
            if (!values.is_array())
                throw qa::harness::ConfigError("--values: expected a JSON array");
            const std::vector<double> v = values.get<std::vector<double>>();
            const qa::MinorantResult mr = qa::log_convex_minorant(v);
            json minorant_values_json = json::array();
            // contact points equal the input by definition; emit them exactly
            std::size_t next_contact = 0;
            for (long j = 0; j <= mr.minorant.max_index(); ++j) {
                if (next_contact < mr.contact_set.size() && mr.contact_set[next_contact] == j) {
                    minorant_values_json.push_back(v[static_cast<std::size_t>(j)]);
                    ++next_contact;
                } else {
                    minorant_values_json.push_back(mr.minorant.value_at(j));
                }
            }
            const json out = {{"schema_version", 1},
                              {"minorant", std::move(minorant_values_json)},
                              {"contact_set", mr.contact_set}};
            std::puts(out.dump(2).c_str());
            return 0;
        }
    } catch (const qa::harness::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const qa::harness::RunError& e) {
        std::fprintf(stderr, "runtime error: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::out_of_range& e) {
        // range violations on user-supplied values (table lengths, indices)
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime error: %s\n", e.what());
        return 3;
    }
    return 2;
}
