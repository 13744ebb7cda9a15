// qlike command-line front end.
//
// Exit codes: 0 success, 1 runtime or filesystem error, 2 usage error,
// 3 degenerate result under --strict.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "qlike/errors.hpp"
#include "qlike/format.hpp"
#include "qlike/harness.hpp"
#include "qlike/qasm.hpp"
#include "qlike/rng.hpp"
#include "qlike/serialize.hpp"
#include "qlike/synthesis.hpp"

namespace {

using namespace qlike;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kExitDegenerate = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    double beta = 0.2;
    double delta = 1.8;
    std::optional<std::uint64_t> seed;
    std::string strategy = "direct";
    std::string output;
    bool strict = false;

    OptimizerConfig optimizer;
    std::string search_group = "so4";

    std::optional<double> reference_direct;
    std::optional<double> reference_entangled;
    bool json = false;

    std::uint64_t n_max = 2000;
    std::uint64_t shots_per_point = 1;
    NoiseModel noise;

    std::uint64_t shots = 100000;
    std::uint64_t workers = 1;
    std::string qasm_file;
    std::string unitary_file;
};

void add_params(CLI::App* cmd, Options& o) {
    cmd->add_option("--beta", o.beta, "Purity angle beta in [0, pi]")->capture_default_str();
    cmd->add_option("--delta", o.delta, "Rotation angle delta in [0, pi]")->capture_default_str();
}

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--seed", o.seed, "RNG seed (drawn from entropy and printed when omitted)");
    cmd->add_flag("--strict", o.strict, "Exit with status 3 on degenerate results");
    cmd->add_option("-o,--output", o.output, "Output path (stdout when omitted)");
}

void add_optimizer(CLI::App* cmd, Options& o) {
    auto& c = o.optimizer;
    cmd->add_option("--step-size", c.step_size, "Initial random-walk step")->capture_default_str();
    cmd->add_option("--cooling", c.cooling, "Step multiplier after a stall")->capture_default_str();
    cmd->add_option("--iterations", c.iterations, "Walk proposals per restart")->capture_default_str();
    cmd->add_option("--restarts", c.restarts, "Independent restarts")->capture_default_str();
    cmd->add_option("--stall-window", c.stall_window, "Rejections before cooling")->capture_default_str();
    cmd->add_option("--tolerance", c.tolerance, "Refinement stop threshold")->capture_default_str();
    cmd->add_option("--search-group", o.search_group, "so4 or su4")
        ->check(CLI::IsMember({"so4", "su4"}))
        ->capture_default_str();
    cmd->add_option("--polish", c.polish, "Newton refinement after each walk")->capture_default_str();
    cmd->add_flag("--allow-infinite", c.allow_infinite, "Accept bases with infinite divergence");
    cmd->add_option("--optimizer-workers", c.workers, "Threads for restarts")->capture_default_str();
    cmd->add_option("--grid-points", c.direct_grid_points, "Direct-strategy angle grid size")
        ->capture_default_str();
}

void add_noise(CLI::App* cmd, Options& o) {
    cmd->add_option("--depolarizing-1q", o.noise.depolarizing_1q, "Depolarizing probability per 1q gate")
        ->capture_default_str();
    cmd->add_option("--depolarizing-2q", o.noise.depolarizing_2q, "Depolarizing probability per CNOT")
        ->capture_default_str();
    cmd->add_option("--readout-flip", o.noise.readout_flip, "Bit-flip probability per measured bit")
        ->capture_default_str();
}

std::uint64_t resolve_seed(Options& o) {
    if (!o.seed) {
        o.seed = entropy_seed();
        std::cerr << "seed: " << *o.seed << "\n";
    }
    o.optimizer.seed = *o.seed;
    o.optimizer.search_group = parse_search_group(o.search_group);
    return *o.seed;
}

PreparationParams params_of(const Options& o) {
    try {
        return PreparationParams(o.beta, o.delta);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
}

Strategy strategy_of(const Options& o) {
    try {
        return parse_strategy(o.strategy);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
}

Json param_echo(const Options& o) {
    return Json{{"beta", o.beta}, {"delta", o.delta}, {"strategy", o.strategy}, {"optimizer", to_json(o.optimizer)}};
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open '" + path + "' for writing");
    }
    out << text;
    if (!out.flush()) {
        throw std::runtime_error("failed writing '" + path + "'");
    }
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open '" + path + "' for reading");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int finish(bool degenerate, const Options& o) {
    if (degenerate) {
        std::cerr << "warning: degenerate result (zero divergence)\n";
        if (o.strict) {
            return kExitDegenerate;
        }
    }
    return 0;
}

int cmd_optimize(Options& o) {
    const std::uint64_t seed = resolve_seed(o);
    const StrategyReport report = run_strategy(params_of(o), strategy_of(o), o.optimizer);
    Json j{{"metadata", metadata_json("optimize", seed, param_echo(o))}};
    j.update(to_json(report));
    write_text(o.output, dump(j));
    std::cerr << "s_rel (" << o.strategy << "): " << format_double(report.s_rel, 10) << " nats, "
              << format_double(nats_to_bits(report.s_rel), 10) << " bits per qubit\n";
    return finish(report.degenerate, o);
}

int cmd_compare(Options& o) {
    resolve_seed(o);
    if (o.reference_direct.has_value() != o.reference_entangled.has_value()) {
        throw UsageError("--reference-direct and --reference-entangled must be given together");
    }
    std::optional<Reference> reference;
    if (o.reference_direct) {
        reference = Reference{*o.reference_direct, *o.reference_entangled};
    }
    const CompareResult result = run_compare(params_of(o), o.optimizer);
    const std::string json = dump(compare_json(result, reference));
    if (o.json) {
        write_text(o.output, json);
    } else {
        std::cout << compare_text(result, reference);
        if (!o.output.empty()) {
            write_text(o.output, json);
        }
    }
    return finish(result.degenerate(), o);
}

int cmd_curve(Options& o) {
    const std::uint64_t seed = resolve_seed(o);
    CurveOptions options;
    options.n_max = o.n_max;
    options.shots_per_point = o.shots_per_point;
    options.noise = o.noise;
    options.seed = derive_seed(seed, std::uint64_t{1} << 32);
    if (o.strategy == "both") {
        options.include_direct = options.include_entangled = true;
    } else {
        const Strategy s = strategy_of(o);
        options.include_direct = s == Strategy::direct;
        options.include_entangled = s == Strategy::entangled;
    }
    Json echo = param_echo(o);
    echo["n_max"] = o.n_max;
    echo["shots_per_point"] = o.shots_per_point;
    echo["noise"] = to_json(o.noise);
    const CurveResult result = run_curve(params_of(o), o.optimizer, options);
    write_text(o.output, curve_csv(result, metadata_json("curve", seed, echo)));
    const bool degenerate =
        (result.direct && result.direct->degenerate) || (result.entangled && result.entangled->degenerate);
    return finish(degenerate, o);
}

int cmd_export(Options& o) {
    resolve_seed(o);
    if (o.output.empty()) {
        throw UsageError("export needs --output <prefix>");
    }
    const ExportedCircuits ex = build_export(params_of(o), strategy_of(o), o.optimizer);
    write_text(o.output + "_A.qasm", emit_qasm(ex.a));
    write_text(o.output + "_B.qasm", emit_qasm(ex.b));
    std::cerr << "wrote " << o.output << "_A.qasm and " << o.output << "_B.qasm\n";
    return finish(ex.report.degenerate, o);
}

int cmd_decompose(Options& o) {
    const std::uint64_t seed = resolve_seed(o);
    Json echo;
    ComplexMatrix target;
    if (!o.unitary_file.empty()) {
        target = matrix_from_json(Json::parse(read_text(o.unitary_file)));
        echo = Json{{"unitary_file", o.unitary_file}};
    } else {
        // Basis change into the optimal entangled basis.
        o.strategy = "entangled";
        const StrategyReport report = run_strategy(params_of(o), Strategy::entangled, o.optimizer);
        target = report.basis.unitary().matrix().adjoint();
        echo = param_echo(o);
    }
    const DecompositionResult result = decompose_two_qubit(UnitaryMatrix::from(target));
    Json j{{"metadata", metadata_json("decompose", seed, echo)}};
    j["unitary"] = matrix_json(target);
    j.update(to_json(result));
    write_text(o.output, dump(j));
    return 0;
}

int cmd_simulate(Options& o) {
    const std::uint64_t seed = resolve_seed(o);
    Json echo = param_echo(o);
    echo["shots"] = o.shots;
    echo["workers"] = o.workers;
    echo["noise"] = to_json(o.noise);
    if (!o.qasm_file.empty()) {
        const Circuit circuit = parse_qasm(read_text(o.qasm_file));
        echo = Json{{"qasm_file", o.qasm_file}, {"shots", o.shots}, {"workers", o.workers}, {"noise", to_json(o.noise)}};
        Json j{{"metadata", metadata_json("simulate", seed, echo)}};
        j.update(to_json(sample_shots(circuit, o.shots, o.noise, seed, o.workers)));
        write_text(o.output, dump(j));
        return 0;
    }
    const SimulationResult r =
        run_simulation(params_of(o), strategy_of(o), o.optimizer, o.shots, o.noise, seed, o.workers);
    Json j{
        {"metadata", metadata_json("simulate", seed, echo)},
        {"strategy", o.strategy},
        {"a", to_json(r.counts_a)},
        {"b", to_json(r.counts_b)},
        {"estimate",
         Json{{"raw_nats_per_shot", number_json(r.estimate.raw.nats)},
              {"raw_infinite", r.estimate.raw.infinite()},
              {"smoothed_nats_per_shot", r.estimate.smoothed},
              {"standard_error", r.estimate.standard_error},
              {"smoothed_nats_per_qubit", r.estimate.smoothed / 2.0}}},
        {"exact_nats_per_shot", number_json(r.exact.nats)},
        {"s_rel_nats_per_qubit", number_json(r.report.s_rel)},
    };
    write_text(o.output, dump(j));
    std::cerr << "estimated s_rel: " << format_double(r.estimate.smoothed / 2.0, 8) << " +- "
              << format_double(r.estimate.standard_error / 2.0, 3) << " nats per qubit (exact "
              << format_double(r.exact.nats / 2.0, 8) << ")\n";
    return finish(r.report.degenerate, o);
}

/// Splices `key = value` lines of --config files into argv for every flag the
/// selected subcommand knows and the command line does not already set.
std::vector<std::string> apply_config(CLI::App& app, std::vector<std::string> args) {
    std::vector<std::string> files;
    for (std::size_t i = 0; i < args.size();) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            files.push_back(args[i + 1]);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
        } else if (args[i].rfind("--config=", 0) == 0) {
            files.push_back(args[i].substr(9));
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
        } else {
            ++i;
        }
    }
    if (files.empty()) {
        return args;
    }
    CLI::App* sub = nullptr;
    for (const auto& a : args) {
        for (CLI::App* s : app.get_subcommands({})) {
            if (s->get_name() == a) {
                sub = s;
                break;
            }
        }
        if (sub) {
            break;
        }
    }
    if (!sub) {
        throw UsageError("--config needs a subcommand");
    }
    auto on_command_line = [&](const std::string& flag) {
        for (const auto& a : args) {
            if (a == flag || a.rfind(flag + "=", 0) == 0) {
                return true;
            }
        }
        return false;
    };
    for (const auto& file : files) {
        for (const auto& [key, value] : parse_config_text(read_text(file))) {
            const std::string flag = "--" + key;
            const CLI::Option* opt = sub->get_option_no_throw(flag);
            if (!opt) {
                std::cerr << "warning: config key '" << key << "' is not used by '" << sub->get_name() << "'\n";
                continue;
            }
            if (on_command_line(flag)) {
                continue;
            }
            if (opt->get_type_size() == 0) {
                if (value == "true" || value == "1" || value == "yes") {
                    args.push_back(flag);
                }
            } else {
                args.push_back(flag + "=" + value);
            }
        }
    }
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum likelihood: measurement-strategy optimization, synthesis and simulation", "qlike"};
    app.set_version_flag("--version", std::string(tool_version()));
    app.require_subcommand(1);
    app.add_option("--config", "Flat key=value file of flag values; flags on the command line win");

    Options o;
    int (*handler)(Options&) = nullptr;

    auto* optimize = app.add_subcommand("optimize", "Optimize one measurement strategy");
    add_params(optimize, o);
    add_common(optimize, o);
    add_optimizer(optimize, o);
    optimize->add_option("--strategy", o.strategy, "direct or entangled")->capture_default_str();
    optimize->callback([&] { handler = cmd_optimize; });

    auto* compare = app.add_subcommand("compare", "Direct vs entangled comparison table");
    add_params(compare, o);
    add_common(compare, o);
    add_optimizer(compare, o);
    compare->add_option("--reference-direct", o.reference_direct, "Reference direct value to match within 0.5%");
    compare->add_option("--reference-entangled", o.reference_entangled,
                        "Reference entangled value to match within 0.5%");
    compare->add_flag("--json", o.json, "Print JSON instead of the text table");
    compare->callback([&] { handler = cmd_compare; });

    auto* curve = app.add_subcommand("curve", "Log-likelihood decay data as CSV");
    add_params(curve, o);
    add_common(curve, o);
    add_optimizer(curve, o);
    add_noise(curve, o);
    curve->add_option("--strategy", o.strategy, "direct, entangled or both (default both)");
    curve->add_option("--n-max", o.n_max, "Largest number of measured qubits")->capture_default_str();
    curve->add_option("--shots-per-point", o.shots_per_point, "Circuit shots between rows")->capture_default_str();
    curve->preparse_callback([&](std::size_t) { o.strategy = "both"; });
    curve->callback([&] { handler = cmd_curve; });

    auto* exp = app.add_subcommand("export", "Write A and B circuits as OpenQASM 2.0");
    add_params(exp, o);
    add_common(exp, o);
    add_optimizer(exp, o);
    exp->add_option("--strategy", o.strategy, "direct or entangled")->capture_default_str();
    exp->callback([&] { handler = cmd_export; });

    auto* decompose = app.add_subcommand("decompose", "Two-CNOT synthesis of a two-qubit unitary");
    add_params(decompose, o);
    add_common(decompose, o);
    add_optimizer(decompose, o);
    decompose->add_option("--unitary", o.unitary_file, "JSON file with a 4x4 matrix (rows of [re, im])")
        ->check(CLI::ExistingFile);
    decompose->callback([&] { handler = cmd_decompose; });

    auto* simulate = app.add_subcommand("simulate", "Sample shot counts");
    add_params(simulate, o);
    add_common(simulate, o);
    add_optimizer(simulate, o);
    add_noise(simulate, o);
    simulate->add_option("--strategy", o.strategy, "direct or entangled")->capture_default_str();
    simulate->add_option("--shots", o.shots, "Shots per circuit")->capture_default_str();
    simulate->add_option("--workers", o.workers, "Sampling threads")->capture_default_str();
    simulate->add_option("--qasm", o.qasm_file, "Sample this circuit instead of building one")
        ->check(CLI::ExistingFile);
    simulate->callback([&] { handler = cmd_simulate; });

    try {
        std::vector<std::string> args(argv + 1, argv + argc);
        args = apply_config(app, std::move(args));
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }

    try {
        return handler(o);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
