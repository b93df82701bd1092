// entrate: certified lower/upper bounds for the entropy rate of a binary
// Markov chain observed through a binary symmetric channel, plus exact
// sequence probabilities, a path simulator and a built-in invariant suite.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "entrate/entrate.hpp"

namespace {

using nlohmann::json;

constexpr int exit_ok = 0;
constexpr int exit_params = 2;
constexpr int exit_tol_unmet = 3;
constexpr int exit_insufficient_data = 4;
constexpr int exit_validation_failed = 5;

enum class output_format { human, csv, js };

const std::map<std::string, output_format> format_names{
    {"human", output_format::human}, {"csv", output_format::csv}, {"json", output_format::js}};

std::string fmt17(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
};

struct param_flags {
    double pi01 = 0, pi10 = 0, eps = 0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--pi01", pi01, "P(X_k=1 | X_{k-1}=0), in (0, 0.5)")->required();
        cmd->add_option("--pi10", pi10, "P(X_k=0 | X_{k-1}=1), in (0, 0.5)")->required();
        cmd->add_option("--eps", eps, "channel flip probability, in [0, 0.5]")->required();
    }

    entrate::model_params resolve() const { return entrate::validate(pi01, pi10, eps); }
};

json params_json(const entrate::model_params& p) {
    return json{{"pi01", p.pi01},
                {"pi10", p.pi10},
                {"eps", p.eps},
                {"p0", p.p0},
                {"strict_regime", p.strict_regime}};
}

json row_json(const entrate::bounds_row& r) {
    json j{{"n", r.n}, {"L", r.lower}, {"H", r.approx}, {"U", r.upper}, {"width", r.width}};
    if (r.geo) j["geo"] = *r.geo;
    return j;
}

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

void print_rows_csv(const std::vector<entrate::bounds_row>& rows) {
    std::cout << "n,L,H,U,width,geo\n";
    for (const auto& r : rows) {
        std::cout << r.n << ',' << fmt17(r.lower) << ',' << fmt17(r.approx) << ','
                  << fmt17(r.upper) << ',' << fmt17(r.width) << ','
                  << (r.geo ? fmt17(*r.geo) : "") << "\n";
    }
}

void print_rows_human(const std::vector<entrate::bounds_row>& rows) {
    std::printf("%3s  %-19s %-19s %-19s %-12s %-12s\n", "n", "L", "H", "U", "width", "geo");
    for (const auto& r : rows) {
        std::printf("%3d  %.15f  %.15f  %.15f  %.4e", r.n, r.lower, r.approx, r.upper, r.width);
        if (r.geo)
            std::printf("  %.4e\n", *r.geo);
        else
            std::printf("  %s\n", "-");
    }
}

// ---------------------------------------------------------------- bounds --

struct bounds_cmd {
    param_flags params;
    double tol = 1e-6;
    int max_n = 25;
    unsigned threads = 0;
    output_format format = output_format::human;
    bool timing = false;

    int run() const {
        timer clock;
        const entrate::model_params p = params.resolve();
        const entrate::contraction_info ci = entrate::contraction(p);
        entrate::run_options opt;
        opt.tol = tol;
        opt.n_max = max_n;
        opt.threads = threads;
        const entrate::convergence_report rep = entrate::run_bounds(p, opt);
        const double elapsed = clock.seconds();
        const unsigned resolved = entrate::detail::resolve_threads(threads);

        switch (format) {
            case output_format::js: {
                json j{{"schema_version", entrate::schema_version},
                       {"command", "bounds"},
                       {"params", params_json(p)},
                       {"contraction",
                        {{"delta", ci.delta}, {"big_m", ci.big_m}, {"contractive", ci.contractive}}},
                       {"tol", tol},
                       {"max_n", max_n},
                       {"metadata", {{"threads", resolved}}},
                       {"rows", json::array()},
                       {"estimate", rep.estimate},
                       {"guaranteed_error", rep.guaranteed_error},
                       {"converged", rep.converged}};
                for (const auto& r : rep.rows) j["rows"].push_back(row_json(r));
                if (timing) j["timing_seconds"] = elapsed;
                print_json(j);
                break;
            }
            case output_format::csv: {
                std::cout << "# schema_version=" << entrate::schema_version << "\n";
                print_rows_csv(rep.rows);
                std::cout << "# estimate=" << fmt17(rep.estimate) << "\n"
                          << "# guaranteed_error=" << fmt17(rep.guaranteed_error) << "\n"
                          << "# converged=" << (rep.converged ? "true" : "false") << "\n";
                if (timing) std::cout << "# timing_seconds=" << fmt17(elapsed) << "\n";
                break;
            }
            case output_format::human: {
                std::printf("delta = %.15g  M = %.15g  contractive = %s  strict_regime = %s\n",
                            ci.delta, ci.big_m, ci.contractive ? "yes" : "no",
                            p.strict_regime ? "yes" : "no");
                print_rows_human(rep.rows);
                if (rep.converged)
                    std::printf("estimate = %.17g +/- %.4e (converged at n = %d)\n", rep.estimate,
                                rep.guaranteed_error, rep.rows.back().n);
                else
                    std::printf("estimate = %.17g +/- %.4e (tolerance NOT met by n = %d)\n",
                                rep.estimate, rep.guaranteed_error, rep.rows.back().n);
                if (timing) std::printf("elapsed = %.3f s\n", elapsed);
                break;
            }
        }
        if (!rep.converged) {
            std::cerr << "tolerance " << tol << " not met by max-n " << max_n << "\n";
            return exit_tol_unmet;
        }
        return exit_ok;
    }
};

// ----------------------------------------------------------- contraction --

struct contraction_cmd {
    param_flags params;
    output_format format = output_format::human;

    int run() const {
        const entrate::model_params p = params.resolve();
        const entrate::contraction_info ci = entrate::contraction(p);
        switch (format) {
            case output_format::js: {
                json j{{"schema_version", entrate::schema_version},
                       {"command", "contraction"},
                       {"params", params_json(p)},
                       {"delta", ci.delta},
                       {"big_m", ci.big_m},
                       {"contractive", ci.contractive},
                       {"strict_regime", p.strict_regime}};
                print_json(j);
                break;
            }
            case output_format::csv:
                std::cout << "# schema_version=" << entrate::schema_version << "\n"
                          << "delta,big_m,contractive,strict_regime\n"
                          << fmt17(ci.delta) << ',' << fmt17(ci.big_m) << ','
                          << (ci.contractive ? "true" : "false") << ','
                          << (p.strict_regime ? "true" : "false") << "\n";
                break;
            case output_format::human:
                std::printf("delta        = %.17g\n", ci.delta);
                std::printf("M            = %.17g\n", ci.big_m);
                std::printf("contractive  = %s\n", ci.contractive ? "yes" : "no");
                std::printf("strict_regime = %s\n", p.strict_regime ? "yes" : "no");
                break;
        }
        return exit_ok;
    }
};

// ------------------------------------------------------------------ prob --

struct prob_cmd {
    param_flags params;
    std::string sequence;
    bool oracle = false;
    output_format format = output_format::human;

    int run() const {
        const entrate::model_params p = params.resolve();
        const entrate::bit_seq z = entrate::parse_bits(sequence);
        if (static_cast<int>(z.size()) > entrate::max_depth)
            throw entrate::parameter_error("sequence", "longer than the depth cap " +
                                                           std::to_string(entrate::max_depth));
        const entrate::belief_trace tr = entrate::sequence_prob(p, z);
        std::optional<double> brute;
        if (oracle) brute = entrate::brute_force_prob(p, z);

        switch (format) {
            case output_format::js: {
                json j{{"schema_version", entrate::schema_version},
                       {"command", "prob"},
                       {"params", params_json(p)},
                       {"sequence", sequence},
                       {"probability", tr.prob},
                       {"beliefs", tr.beliefs}};
                if (brute)
                    j["oracle"] = {{"brute_force", *brute},
                                   {"difference", std::abs(tr.prob - *brute)}};
                print_json(j);
                break;
            }
            case output_format::csv: {
                std::cout << "# schema_version=" << entrate::schema_version << "\n"
                          << "# probability=" << fmt17(tr.prob) << "\n";
                if (brute)
                    std::cout << "# brute_force=" << fmt17(*brute) << "\n"
                              << "# difference=" << fmt17(std::abs(tr.prob - *brute)) << "\n";
                std::cout << "k,z,belief\n";
                for (std::size_t i = 0; i < z.size(); ++i)
                    std::cout << i + 1 << ',' << int(z[i]) << ',' << fmt17(tr.beliefs[i]) << "\n";
                break;
            }
            case output_format::human: {
                std::printf("P(z) = %.17g\n", tr.prob);
                for (std::size_t i = 0; i < z.size(); ++i)
                    std::printf("  k=%-3zu z=%d  P(X=0 | z_1^k) = %.17g\n", i + 1, int(z[i]),
                                tr.beliefs[i]);
                if (brute)
                    std::printf("brute force = %.17g  difference = %.3e\n", *brute,
                                std::abs(tr.prob - *brute));
                break;
            }
        }
        return exit_ok;
    }
};

// -------------------------------------------------------------- simulate --

struct simulate_cmd {
    param_flags params;
    std::size_t n = 0;
    std::uint64_t seed = 1;
    std::string emit_observed;
    std::string emit_hidden;
    std::string bit_format = "ascii";
    bool estimate = false;
    int block_k = 8;
    output_format format = output_format::human;

    void write_path(const std::string& dest, std::span<const std::uint8_t> bits) const {
        const bool to_stdout = dest == "-";
        std::ofstream file;
        if (!to_stdout) {
            file.open(dest, std::ios::binary);
            if (!file) throw entrate::parameter_error("emit", "cannot open '" + dest + "'");
        }
        std::ostream& os = to_stdout ? std::cout : file;
        if (bit_format == "ascii") {
            entrate::write_bits_ascii(os, bits);
        } else {
            const std::vector<std::uint8_t> bytes = entrate::pack_bits(bits);
            os.write(reinterpret_cast<const char*>(bytes.data()),
                     static_cast<std::streamsize>(bytes.size()));
        }
    }

    int run() const {
        const entrate::model_params p = params.resolve();
        if (n == 0) throw entrate::parameter_error("n", "must be positive");
        if (emit_observed.empty() && emit_hidden.empty() && !estimate)
            throw entrate::parameter_error("simulate", "nothing to do: pass --emit, --emit-hidden "
                                                       "and/or --estimate");
        const entrate::path_sample path = entrate::sample_path(p, n, seed);
        if (!emit_observed.empty()) write_path(emit_observed, path.observed);
        if (!emit_hidden.empty()) write_path(emit_hidden, path.hidden);
        if (!estimate) return exit_ok;

        const entrate::mc_estimate est = entrate::plugin_entropy_rate(path.observed, block_k);
        switch (format) {
            case output_format::js: {
                json j{{"schema_version", entrate::schema_version},
                       {"command", "simulate"},
                       {"params", params_json(p)},
                       {"metadata", {{"seed", seed}, {"generator", entrate::generator_name}}},
                       {"estimate",
                        {{"value", est.value},
                         {"std_error", est.std_error},
                         {"n_samples", est.n_samples},
                         {"block_k", est.block_k}}}};
                print_json(j);
                break;
            }
            case output_format::csv:
                std::cout << "# schema_version=" << entrate::schema_version << "\n"
                          << "# generator=" << entrate::generator_name << "\n"
                          << "# seed=" << seed << "\n"
                          << "value,std_error,n_samples,block_k\n"
                          << fmt17(est.value) << ',' << fmt17(est.std_error) << ','
                          << est.n_samples << ',' << est.block_k << "\n";
                break;
            case output_format::human:
                std::printf("plug-in entropy rate = %.17g bits/symbol\n", est.value);
                std::printf("std error            = %.4e\n", est.std_error);
                std::printf("samples = %zu  block_k = %d  seed = %llu  generator = %s\n",
                            est.n_samples, est.block_k,
                            static_cast<unsigned long long>(seed), entrate::generator_name);
                break;
        }
        return exit_ok;
    }
};

// -------------------------------------------------------------- validate --

struct validate_cmd {
    bool quick = false;
    bool inject_fault = false;
    unsigned threads = 0;
    output_format format = output_format::human;

    int run() const {
        entrate::check_options opt;
        opt.quick = quick;
        opt.inject_fault = inject_fault;
        opt.threads = threads;
        const std::vector<entrate::check_result> results = entrate::run_checks(opt);

        const entrate::check_result* first_failure = nullptr;
        for (const auto& r : results)
            if (!r.pass && first_failure == nullptr) first_failure = &r;

        if (format == output_format::js) {
            json j{{"schema_version", entrate::schema_version},
                   {"command", "validate"},
                   {"passed", first_failure == nullptr},
                   {"checks", json::array()}};
            for (const auto& r : results)
                j["checks"].push_back({{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
            print_json(j);
        } else {
            std::size_t passed = 0;
            for (const auto& r : results) {
                std::printf("%s %s: %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                            r.detail.c_str());
                passed += r.pass;
            }
            std::printf("%zu checks, %zu passed\n", results.size(), passed);
        }
        if (first_failure != nullptr) {
            std::cerr << "validation failed: " << first_failure->name << "\n";
            return exit_validation_failed;
        }
        return exit_ok;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"certified entropy-rate bounds for binary hidden Markov processes"};
    app.require_subcommand(1);

    bounds_cmd bounds;
    CLI::App* cb = app.add_subcommand("bounds", "convergence table of L/H/U with stopping rule");
    bounds.params.attach(cb);
    cb->add_option("--tol", bounds.tol, "stop once U - L <= 2*tol")->capture_default_str();
    cb->add_option("--max-n", bounds.max_n, "deepest tree level (hard cap 30)")
        ->capture_default_str();
    cb->add_option("--threads", bounds.threads, "worker count, 0 = all cores")
        ->capture_default_str();
    cb->add_option("--format", bounds.format, "human, csv or json")
        ->transform(CLI::CheckedTransformer(format_names, CLI::ignore_case));
    cb->add_flag("--timing", bounds.timing, "include wall-clock seconds in the output");

    contraction_cmd contraction;
    CLI::App* cc = app.add_subcommand("contraction", "contraction coefficient and Lipschitz bound");
    contraction.params.attach(cc);
    cc->add_option("--format", contraction.format, "human, csv or json")
        ->transform(CLI::CheckedTransformer(format_names, CLI::ignore_case));

    prob_cmd prob;
    CLI::App* cp = app.add_subcommand("prob", "probability and belief trace of one observation string");
    prob.params.attach(cp);
    cp->add_option("--sequence", prob.sequence, "observation string over {0,1}")->required();
    cp->add_flag("--oracle", prob.oracle, "also run the brute-force marginalization (length <= 14)");
    cp->add_option("--format", prob.format, "human, csv or json")
        ->transform(CLI::CheckedTransformer(format_names, CLI::ignore_case));

    simulate_cmd simulate;
    CLI::App* cs = app.add_subcommand("simulate", "sample the process and estimate its entropy rate");
    simulate.params.attach(cs);
    cs->add_option("--n", simulate.n, "path length")->required();
    cs->add_option("--seed", simulate.seed, "generator seed")->capture_default_str();
    cs->add_option("--emit", simulate.emit_observed, "write the observed path ('-' = stdout)");
    cs->add_option("--emit-hidden", simulate.emit_hidden, "write the hidden path ('-' = stdout)");
    cs->add_option("--bit-format", simulate.bit_format, "ascii (0/1 lines) or packed (8 bits/byte, MSB first)")
        ->check(CLI::IsMember({"ascii", "packed"}))
        ->capture_default_str();
    cs->add_flag("--estimate", simulate.estimate, "plug-in conditional entropy of the observed path");
    cs->add_option("--block-k", simulate.block_k, "conditioning block length")->capture_default_str();
    cs->add_option("--format", simulate.format, "human, csv or json")
        ->transform(CLI::CheckedTransformer(format_names, CLI::ignore_case));

    validate_cmd validate;
    CLI::App* cv = app.add_subcommand("validate", "run the cross-module invariant suite");
    cv->add_flag("--quick", validate.quick, "lowered depth caps, finishes in seconds");
    cv->add_flag("--inject-fault", validate.inject_fault)->group("");  // self-test hook
    cv->add_option("--threads", validate.threads, "worker count, 0 = all cores")
        ->capture_default_str();
    cv->add_option("--format", validate.format, "human or json")
        ->transform(CLI::CheckedTransformer(format_names, CLI::ignore_case));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return exit_params;
    }

    try {
        if (cb->parsed()) return bounds.run();
        if (cc->parsed()) return contraction.run();
        if (cp->parsed()) return prob.run();
        if (cs->parsed()) return simulate.run();
        if (cv->parsed()) return validate.run();
    } catch (const entrate::insufficient_data_error& e) {
        std::cerr << e.what() << "\n";
        return exit_insufficient_data;
    } catch (const entrate::parameter_error& e) {
        std::cerr << e.what() << "\n";
        return exit_params;
    } catch (const entrate::length_error& e) {
        std::cerr << e.what() << "\n";
        return exit_params;
    } catch (const entrate::capacity_error& e) {
        std::cerr << e.what() << "\n";
        return exit_params;
    }
    return exit_ok;
}
