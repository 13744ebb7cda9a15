#include "qlike/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <cstdio>
#include <sstream>

#include "qlike/errors.hpp"
#include "qlike/format.hpp"
#include "qlike/rng.hpp"

namespace qlike {

namespace {

std::string fixed(double v, int decimals) {
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

Json params_json(const CompareResult& r) { return Json{{"beta", r.beta}, {"delta", r.delta}}; }

}  // namespace

std::string_view tool_version() { return QLIKE_VERSION; }

Json metadata_json(const std::string& command, std::uint64_t seed, const Json& parameters) {
    return Json{{"tool", "qlike"}, {"version", std::string(tool_version())}, {"command", command},
                {"seed", seed}, {"parameters", parameters}};
}

StrategyReport run_strategy(const PreparationParams& params, Strategy strategy, const OptimizerConfig& cfg) {
    const StatePair states = prepare_states(params);
    return strategy == Strategy::direct ? optimize_direct(states.rho_a, states.rho_b, cfg)
                                        : optimize_entangled(states.rho_a, states.rho_b, cfg);
}

CompareResult run_compare(const PreparationParams& params, const OptimizerConfig& cfg) {
    const StatePair states = prepare_states(params);
    return CompareResult{
        .beta = params.beta(),
        .delta = params.delta(),
        .direct = optimize_direct(states.rho_a, states.rho_b, cfg),
        .entangled = optimize_entangled(states.rho_a, states.rho_b, cfg),
    };
}

std::vector<NormalizedValues> normalized_values(const CompareResult& result) {
    std::vector<NormalizedValues> out;
    for (const bool bits : {false, true}) {
        for (const double scale : {1.0, 2.0}) {
            const double unit = bits ? 1.0 / std::numbers::ln2 : 1.0;
            out.push_back(NormalizedValues{
                .unit = bits ? "bits" : "nats",
                .normalization = scale == 1.0 ? "per_qubit" : "per_pair",
                .direct = result.direct.s_rel * scale * unit,
                .entangled = result.entangled.s_rel * scale * unit,
                .diff = result.diff() * scale * unit,
            });
        }
    }
    return out;
}

std::vector<ReferenceMatch> match_reference(const CompareResult& result, double reference_direct,
                                            double reference_entangled, double rel_tol) {
    if (reference_direct == 0.0 || reference_entangled == 0.0) {
        throw ConfigError("reference values must be nonzero");
    }
    std::vector<ReferenceMatch> out;
    for (const auto& v : normalized_values(result)) {
        ReferenceMatch m{.values = v};
        m.direct_relative_error = std::abs(v.direct - reference_direct) / std::abs(reference_direct);
        m.entangled_relative_error = std::abs(v.entangled - reference_entangled) / std::abs(reference_entangled);
        m.matches = m.direct_relative_error <= rel_tol && m.entangled_relative_error <= rel_tol;
        out.push_back(m);
    }
    return out;
}

Json compare_json(const CompareResult& result, const std::optional<Reference>& reference) {
    Json values = Json::array();
    for (const auto& v : normalized_values(result)) {
        values.push_back(Json{{"unit", v.unit},
                              {"normalization", v.normalization},
                              {"direct", number_json(v.direct)},
                              {"entangled", number_json(v.entangled)},
                              {"diff", number_json(v.diff)}});
    }
    Json j{
        {"metadata", metadata_json("compare", result.direct.config.seed, params_json(result))},
        {"beta", result.beta},
        {"delta", result.delta},
        {"values", std::move(values)},
        {"degenerate", result.degenerate()},
        {"direct", to_json(result.direct)},
        {"entangled", to_json(result.entangled)},
    };
    if (reference) {
        Json matches = Json::array();
        for (const auto& m : match_reference(result, reference->direct, reference->entangled)) {
            matches.push_back(Json{{"unit", m.values.unit},
                                   {"normalization", m.values.normalization},
                                   {"direct_relative_error", number_json(m.direct_relative_error)},
                                   {"entangled_relative_error", number_json(m.entangled_relative_error)},
                                   {"matches", m.matches}});
        }
        j["reference"] = Json{{"direct", reference->direct},
                              {"entangled", reference->entangled},
                              {"relative_tolerance", kReferenceTolerance},
                              {"matches", std::move(matches)}};
    }
    return j;
}

std::string compare_text(const CompareResult& result, const std::optional<Reference>& reference) {
    std::ostringstream out;
    out << "beta=" << format_double(result.beta) << " delta=" << format_double(result.delta)
        << " seed=" << result.direct.config.seed << "\n";
    out << "unit  normalization  direct      entangled   diff\n";
    for (const auto& v : normalized_values(result)) {
        char line[160];
        std::snprintf(line, sizeof line, "%-5s %-14s %-11s %-11s %s\n", v.unit.c_str(), v.normalization.c_str(),
                      fixed(v.direct, 6).c_str(), fixed(v.entangled, 6).c_str(), fixed(v.diff, 6).c_str());
        out << line;
    }
    if (result.direct.phi_star) {
        out << "phi*=" << format_double(*result.direct.phi_star, 10) << "\n";
    }
    if (result.degenerate()) {
        out << "warning: degenerate (states indistinguishable in the optimal basis)\n";
    }
    if (reference) {
        out << "reference direct=" << format_double(reference->direct)
            << " entangled=" << format_double(reference->entangled) << " (tolerance 0.5%)\n";
        bool any = false;
        for (const auto& m : match_reference(result, reference->direct, reference->entangled)) {
            out << "  " << m.values.unit << "/" << m.values.normalization << ": direct err "
                << fixed(100.0 * m.direct_relative_error, 3) << "%, entangled err "
                << fixed(100.0 * m.entangled_relative_error, 3) << "% -> " << (m.matches ? "match" : "no match")
                << "\n";
            any = any || m.matches;
        }
        out << "  " << (any ? "at least one convention matches" : "no convention matches") << "\n";
    }
    return out.str();
}

CurveResult run_curve(const PreparationParams& params, const OptimizerConfig& cfg, const CurveOptions& options) {
    if (options.n_max < 2) {
        throw ConfigError("curve: n-max must be at least 2");
    }
    if (options.shots_per_point < 1) {
        throw ConfigError("curve: shots-per-point must be at least 1");
    }
    if (!options.include_direct && !options.include_entangled) {
        throw ConfigError("curve: no strategy selected");
    }
    options.noise.validate();
    const std::uint64_t total_shots = options.n_max / 2;
    std::vector<std::uint64_t> row_shots;
    for (std::uint64_t s = options.shots_per_point; s <= total_shots; s += options.shots_per_point) {
        row_shots.push_back(s);
    }
    if (row_shots.empty()) {
        throw ConfigError("curve: shots-per-point exceeds n-max / 2");
    }

    CurveResult result;
    result.rows.resize(row_shots.size());
    for (std::size_t i = 0; i < row_shots.size(); ++i) {
        result.rows[i].n = 2 * row_shots[i];
    }

    const std::array<Strategy, 2> strategies{Strategy::direct, Strategy::entangled};
    for (std::size_t s = 0; s < strategies.size(); ++s) {
        const Strategy strategy = strategies[s];
        if ((strategy == Strategy::direct && !options.include_direct) ||
            (strategy == Strategy::entangled && !options.include_entangled)) {
            continue;
        }
        StrategyReport report = run_strategy(params, strategy, cfg);
        const Circuit a = build_circuit(params, strategy, report.basis, PreparedState::a);
        const Circuit b = build_circuit(params, strategy, report.basis, PreparedState::b);
        const ProbDist model = born_probabilities(b);
        const std::vector<std::uint32_t> outcomes =
            sample_outcomes(a, total_shots, options.noise, derive_seed(options.seed, s));

        std::array<std::uint64_t, 4> counts{};
        std::uint64_t zeros = 0;
        // Outcome bit 1 is qubit b, bit 0 is qubit c.
        const double model_zero = std::clamp(model[0] + model[1], 0.0, 1.0);
        std::size_t next_row = 0;
        for (std::uint64_t shot = 0; shot < total_shots && next_row < row_shots.size(); ++shot) {
            const std::uint32_t o = outcomes[shot];
            ++counts[o];
            zeros += ((o & 2u) == 0) + ((o & 1u) == 0);
            if (shot + 1 == row_shots[next_row]) {
                const std::uint64_t n = 2 * (shot + 1);
                if (strategy == Strategy::direct) {
                    result.rows[next_row].direct =
                        exact_log_likelihood(TossRecord(n, zeros), BinaryDist(model_zero)).nats;
                } else {
                    result.rows[next_row].entangled = multinomial_log_likelihood(counts, model.probs()).nats;
                }
                ++next_row;
            }
        }
        (strategy == Strategy::direct ? result.direct : result.entangled) = std::move(report);
    }
    return result;
}

std::string curve_csv(const CurveResult& result, const Json& metadata) {
    std::string out;
    out += "# " + metadata.dump() + "\n";
    if (result.direct) {
        out += "# s_rel_direct_nats_per_qubit=" + format_double(result.direct->s_rel) + "\n";
    }
    if (result.entangled) {
        out += "# s_rel_entangled_nats_per_qubit=" + format_double(result.entangled->s_rel) + "\n";
    }
    out += "N,log_likelihood_direct,log_likelihood_entangled\n";
    for (const auto& row : result.rows) {
        out += std::to_string(row.n) + ",";
        if (row.direct) {
            out += format_double(*row.direct);
        }
        out += ",";
        if (row.entangled) {
            out += format_double(*row.entangled);
        }
        out += "\n";
    }
    return out;
}

ExportedCircuits build_export(const PreparationParams& params, Strategy strategy, const OptimizerConfig& cfg) {
    StrategyReport report = run_strategy(params, strategy, cfg);
    Circuit a = build_circuit(params, strategy, report.basis, PreparedState::a);
    Circuit b = build_circuit(params, strategy, report.basis, PreparedState::b);
    const std::string common = "strategy=" + std::string(to_string(strategy)) + " beta=" +
                               format_double(params.beta()) + " delta=" + format_double(params.delta()) +
                               " seed=" + std::to_string(cfg.seed);
    const std::string value = "s_rel_nats_per_qubit=" + format_double(report.s_rel);
    a.comments = {"qlike " + std::string(tool_version()) + " export", common + " state=A", value};
    b.comments = {"qlike " + std::string(tool_version()) + " export", common + " state=B", value};
    return ExportedCircuits{std::move(a), std::move(b), std::move(report)};
}

SimulationResult run_simulation(const PreparationParams& params, Strategy strategy, const OptimizerConfig& cfg,
                                std::uint64_t shots, const NoiseModel& noise, std::uint64_t seed,
                                std::uint64_t workers) {
    StrategyReport report = run_strategy(params, strategy, cfg);
    const Circuit a = build_circuit(params, strategy, report.basis, PreparedState::a);
    const Circuit b = build_circuit(params, strategy, report.basis, PreparedState::b);
    ShotCounts counts_a = sample_shots(a, shots, noise, derive_seed(seed, 0xA), workers);
    ShotCounts counts_b = sample_shots(b, shots, noise, derive_seed(seed, 0xB), workers);
    const SrelEstimate estimate = estimate_srel_from_counts(counts_a, counts_b);
    const ProbDist pa = noisy_probabilities(a, noise);
    const ProbDist pb = noisy_probabilities(b, noise);
    return SimulationResult{std::move(counts_a), std::move(counts_b), estimate, std::move(report),
                            kl_divergence(pa.probs(), pb.probs())};
}

std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const std::string body = trim(line);
        if (body.empty()) {
            continue;
        }
        auto split = body.find('=');
        if (split == std::string::npos) {
            split = body.find_first_of(" \t");
        }
        std::string key = trim(std::string_view(body).substr(0, split));
        std::string value = split == std::string::npos ? std::string("true") : trim(std::string_view(body).substr(split + 1));
        while (!key.empty() && key.front() == '-') {
            key.erase(key.begin());
        }
        if (key.empty()) {
            throw ConfigError("config line " + std::to_string(line_no) + ": missing key");
        }
        out.emplace_back(std::move(key), std::move(value));
    }
    return out;
}

}  // namespace qlike
