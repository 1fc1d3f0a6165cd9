// matrec: analyze convergence/divergence of matrix recurrence relations
// defined over matrix products and Kronecker products, simulate them, and
// print the exact expansion combinatorics behind the criteria.
//
// Exit codes: 0 success, 2 validation error, 3 analytic error, 4 truncation
// under --strict, 5 when a simulated trend contradicts an analytic verdict.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "matrec/io.hpp"
#include "matrec/matrec.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_validation = 2;
constexpr int exit_analytic = 3;
constexpr int exit_truncated = 4;
constexpr int exit_inconsistent = 5;

std::vector<int> parse_set_csv(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const int v = std::stoi(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::exception&) {
            throw matrec::spec_error("--set: \"" + item + "\" is not an integer");
        }
    }
    if (out.empty()) throw matrec::spec_error("--set: expected a comma-separated list");
    return out;
}

std::vector<matrec::norm_kind> resolve_norms(const std::string& flag,
                                             const std::vector<matrec::norm_kind>& from_spec) {
    if (flag.empty()) return from_spec;
    return matrec::parse_norms(flag, "--norm");
}

struct cli_options {
    std::string norm_flag; // empty = take from spec file (analyze/verify)
    double tol = 1e-9;
    bool json = false;
};

void print_counts_text(const matrec::multiplicity_profile& profile, bool with_b) {
    std::string line = "counts:";
    for (const auto& c : profile.counts) line += " " + c.str();
    std::puts(line.c_str());
    if (with_b) std::puts(("b: " + profile.b_count.str()).c_str());
}

int run_analyze(const std::string& path, const cli_options& opt, bool dump) {
    auto file = matrec::load_spec_file(path);
    if (dump) {
        std::puts(matrec::dump_spec(file).dump(2).c_str());
        return exit_ok;
    }
    const auto kinds = resolve_norms(opt.norm_flag, file.norms);
    matrec::stability_options stab;
    stab.verdict_tol = opt.tol;
    const auto an = matrec::analyze(file.spec, std::span<const matrec::norm_kind>(kinds), stab);
    std::puts(matrec::to_json(an).dump(2).c_str());
    return exit_ok;
}

int run_simulate(const std::string& path, const cli_options& opt, long long steps,
                 const std::string& mode, long long budget, const std::string& out_path,
                 bool strict) {
    auto file = matrec::load_spec_file(path);
    matrec::norm_kind kind = matrec::norm_kind::frobenius;
    if (!opt.norm_flag.empty()) {
        const auto kinds = matrec::parse_norms(opt.norm_flag, "--norm");
        if (kinds.size() != 1) {
            throw matrec::spec_error("--norm: simulate needs a single norm, not \"both\"");
        }
        kind = kinds.front();
    }
    if (steps < 1) throw matrec::spec_error("--steps must be at least 1");
    matrec::simulate_options sim;
    sim.entry_budget = budget;

    const long long n_max = steps - 1; // rows n = 0..steps-1
    std::string csv;
    std::optional<matrec::trajectory<double>::truncation_info> truncated;
    double final_log = 0.0;
    long long final_n = 0;
    if (mode == "direct") {
        const auto traj = matrec::iterate(file.spec, n_max, kind, sim);
        truncated = traj.truncated;
        csv = matrec::trajectory_to_csv(traj);
        if (!traj.steps.empty()) {
            final_log = traj.steps.back().log_norm;
            final_n = traj.steps.back().n;
        }
    } else {
        const auto traj = matrec::surrogate<double>(file.spec, n_max, kind, sim);
        truncated = traj.truncated;
        csv = matrec::trajectory_to_csv(traj);
        if (!traj.steps.empty()) {
            final_log = traj.steps.back().log_norm;
            final_n = traj.steps.back().n;
        }
    }

    std::FILE* summary_stream = stdout;
    if (out_path.empty()) {
        std::fputs(csv.c_str(), stdout);
        summary_stream = stderr;
    } else {
        std::ofstream out(out_path);
        if (!out) throw matrec::spec_error("cannot open output file: " + out_path);
        out << csv;
    }
    std::string summary = "final n=" + std::to_string(final_n) +
                          " log_norm=" + matrec::format_value(final_log);
    if (truncated) {
        summary += " truncated_at=" + std::to_string(truncated->at) + " (" + truncated->reason + ")";
    } else {
        summary += " truncated=no";
    }
    std::fputs((summary + "\n").c_str(), summary_stream);
    return truncated && strict ? exit_truncated : exit_ok;
}

int run_snacci(const std::string& set_csv, long long count, const cli_options& opt) {
    const auto set = matrec::make_index_set(parse_set_csv(set_csv));
    if (count < 0) throw matrec::spec_error("--count must be nonnegative");
    const auto terms = matrec::snacci_terms(set, static_cast<std::size_t>(count));
    if (opt.json) {
        matrec::json doc;
        doc["set"] = set.elements;
        doc["terms"] = matrec::json::array();
        for (const auto& t : terms) doc["terms"].push_back(t.str());
        std::puts(doc.dump(2).c_str());
        return exit_ok;
    }
    std::string line;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (i) line += ' ';
        line += terms[i].str();
    }
    std::puts(line.c_str());
    return exit_ok;
}

int run_multiplicity(const std::string& set_csv, long long n, bool with_b, bool with_word,
                     const std::string& order_csv, long long budget, const cli_options& opt) {
    const auto set = matrec::make_index_set(parse_set_csv(set_csv));
    const auto profile = matrec::make_multiplicity_profile(set, n);
    const std::vector<int> order =
        order_csv.empty() ? set.elements : parse_set_csv(order_csv);
    std::optional<matrec::word> w;
    if (with_word) {
        w = matrec::expand_word(set, n, order, with_b, static_cast<std::size_t>(budget));
    }
    if (opt.json) {
        matrec::json doc;
        doc["set"] = set.elements;
        doc["n"] = n;
        doc["counts"] = matrec::json::array();
        for (const auto& c : profile.counts) doc["counts"].push_back(c.str());
        if (with_b) doc["b"] = profile.b_count.str();
        if (w) doc["word"] = matrec::to_string(*w);
        std::puts(doc.dump(2).c_str());
        return exit_ok;
    }
    print_counts_text(profile, with_b);
    if (w) std::puts(("word: " + matrec::to_string(*w)).c_str());
    return exit_ok;
}

int run_verify(const std::string& path, const cli_options& opt, long long steps) {
    auto file = matrec::load_spec_file(path);
    const auto kinds = resolve_norms(opt.norm_flag, file.norms);
    matrec::verify_options vopt;
    vopt.steps = steps;
    vopt.stability.verdict_tol = opt.tol;
    const auto rep = matrec::verify(file.spec, std::span<const matrec::norm_kind>(kinds), vopt);
    std::puts(matrec::to_json(rep).dump(2).c_str());
    return rep.consistent ? exit_ok : exit_inconsistent;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stability analyzer for matrix recurrences over products and Kronecker products"};
    app.require_subcommand(1);

    cli_options opt;
    app.add_option("--norm", opt.norm_flag, "Norm selection: frobenius, operator or both")
        ->expected(1);
    app.add_option("--tol", opt.tol, "Verdict tolerance around criterion boundaries")
        ->capture_default_str();
    app.add_flag("--json", opt.json, "JSON output for snacci/multiplicity");

    std::string spec_path;
    bool dump = false;
    auto* analyze_cmd = app.add_subcommand("analyze", "Evaluate the stability certificates")
        ->fallthrough(); // global flags may follow the subcommand
    analyze_cmd->add_option("spec", spec_path, "Spec file (JSON)")->required();
    analyze_cmd->add_flag("--dump-spec", dump, "Echo the normalized spec instead of analyzing");

    long long steps = 50;
    std::string mode = "direct";
    long long budget = 1'000'000;
    std::string out_path;
    bool strict = false;
    auto* simulate_cmd = app.add_subcommand("simulate", "Run the recurrence and emit a CSV trajectory")
        ->fallthrough(); // global flags may follow the subcommand
    simulate_cmd->add_option("spec", spec_path, "Spec file (JSON)")->required();
    simulate_cmd->add_option("--steps", steps, "Number of CSV rows (n = 0..steps-1)")
        ->capture_default_str();
    simulate_cmd->add_option("--mode", mode, "direct or surrogate")
        ->check(CLI::IsMember({"direct", "surrogate"}))
        ->capture_default_str();
    simulate_cmd->add_option("--budget", budget, "Entry budget for materialized matrices")
        ->capture_default_str();
    simulate_cmd->add_option("--out", out_path, "Write CSV here instead of stdout");
    simulate_cmd->add_flag("--strict", strict, "Exit 4 if the trajectory truncates");

    std::string set_csv;
    long long count = 10;
    auto* snacci_cmd = app.add_subcommand("snacci", "Print exact sequence terms for a set")
        ->fallthrough(); // global flags may follow the subcommand
    snacci_cmd->add_option("--set", set_csv, "Comma-separated positive offsets, e.g. 1,2")
        ->required();
    snacci_cmd->add_option("--count", count, "How many terms to print")->capture_default_str();

    long long mult_n = 0;
    bool with_b = false, with_word = false;
    std::string order_csv;
    auto* mult_cmd = app.add_subcommand("multiplicity", "Exact factor counts in the expanded word")
        ->fallthrough(); // global flags may follow the subcommand
    mult_cmd->add_option("--set", set_csv, "Comma-separated positive offsets")->required();
    mult_cmd->add_option("--n", mult_n, "Index of the term to expand")->required();
    mult_cmd->add_flag("--with-b", with_b, "Also count the constant factor B");
    mult_cmd->add_flag("--word", with_word, "Print the fully expanded word");
    mult_cmd->add_option("--order", order_csv, "Multiplication order (permutation of the set)");
    mult_cmd->add_option("--budget", budget, "Letter budget for word expansion")
        ->capture_default_str();

    long long verify_steps = 200;
    auto* verify_cmd =
        app.add_subcommand("verify", "Check analytic verdicts against simulated trends")
            ->fallthrough();
    verify_cmd->add_option("spec", spec_path, "Spec file (JSON)")->required();
    verify_cmd->add_option("--steps", verify_steps, "Trajectory length for trend fitting")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        app.exit(e);
        return exit_validation;
    }

    try {
        if (analyze_cmd->parsed()) return run_analyze(spec_path, opt, dump);
        if (simulate_cmd->parsed()) {
            return run_simulate(spec_path, opt, steps, mode, budget, out_path, strict);
        }
        if (snacci_cmd->parsed()) return run_snacci(set_csv, count, opt);
        if (mult_cmd->parsed()) {
            return run_multiplicity(set_csv, mult_n, with_b, with_word, order_csv, budget, opt);
        }
        if (verify_cmd->parsed()) return run_verify(spec_path, opt, verify_steps);
    } catch (const matrec::spec_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_validation;
    } catch (const matrec::dimension_mismatch_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_validation;
    } catch (const matrec::empty_set_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_validation;
    } catch (const matrec::non_positive_entry_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_validation;
    } catch (const matrec::index_out_of_range_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_validation;
    } catch (const matrec::error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_analytic;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return exit_ok;
}
