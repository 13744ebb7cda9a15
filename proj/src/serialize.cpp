#include "qlike/serialize.hpp"

#include "qlike/errors.hpp"
#include "qlike/format.hpp"

namespace qlike {

namespace {

Json rounded(double v) { return number_json(round_to_digits(v, 15)); }

Json gate_json(const SingleQubitGate& g) {
    return Json{{"theta", rounded(g.theta)}, {"phi", rounded(g.phi)}, {"lambda", rounded(g.lambda)}, {"target", g.target}};
}

Json complex_json(Complex z) { return Json::array({number_json(z.real()), number_json(z.imag())}); }

template <typename T>
T field(const Json& j, const char* key) {
    if (!j.contains(key)) {
        throw ConfigError(std::string("missing JSON field '") + key + "'");
    }
    return j.at(key).get<T>();
}

}  // namespace

Json number_json(double value) {
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    if (std::isnan(value)) {
        return "nan";
    }
    return value;
}

double number_from_json(const Json& j) {
    if (j.is_string()) {
        return parse_double(j.get<std::string>());
    }
    return j.get<double>();
}

Json matrix_json(const ComplexMatrix& m) {
    Json rows = Json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) {
            row.push_back(complex_json(m(r, c)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

ComplexMatrix matrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) {
        throw ConfigError("matrix JSON must be a non-empty array of rows");
    }
    const std::size_t n = j.size();
    std::vector<Complex> entries;
    for (const auto& row : j) {
        if (!row.is_array() || row.size() != n) {
            throw DimensionError("matrix JSON must be square");
        }
        for (const auto& z : row) {
            if (z.is_number()) {
                entries.emplace_back(z.get<double>(), 0.0);
            } else if (z.is_array() && z.size() == 2) {
                entries.emplace_back(number_from_json(z[0]), number_from_json(z[1]));
            } else {
                throw ConfigError("matrix entries must be numbers or [re, im] pairs");
            }
        }
    }
    return ComplexMatrix(n, n, std::move(entries));
}

Json to_json(const OptimizerConfig& cfg) {
    return Json{
        {"step_size", cfg.step_size},
        {"cooling", cfg.cooling},
        {"iterations", cfg.iterations},
        {"restarts", cfg.restarts},
        {"seed", cfg.seed},
        {"tolerance", cfg.tolerance},
        {"stall_window", cfg.stall_window},
        {"search_group", std::string(to_string(cfg.search_group))},
        {"allow_infinite", cfg.allow_infinite},
        {"polish", cfg.polish},
        {"workers", cfg.workers},
        {"direct_grid_points", cfg.direct_grid_points},
        {"direct_angle_tolerance", cfg.direct_angle_tolerance},
    };
}

OptimizerConfig optimizer_config_from_json(const Json& j) {
    OptimizerConfig cfg;
    cfg.step_size = j.value("step_size", cfg.step_size);
    cfg.cooling = j.value("cooling", cfg.cooling);
    cfg.iterations = j.value("iterations", cfg.iterations);
    cfg.restarts = j.value("restarts", cfg.restarts);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.tolerance = j.value("tolerance", cfg.tolerance);
    cfg.stall_window = j.value("stall_window", cfg.stall_window);
    if (j.contains("search_group")) {
        cfg.search_group = parse_search_group(j.at("search_group").get<std::string>());
    }
    cfg.allow_infinite = j.value("allow_infinite", cfg.allow_infinite);
    cfg.polish = j.value("polish", cfg.polish);
    cfg.workers = j.value("workers", cfg.workers);
    cfg.direct_grid_points = j.value("direct_grid_points", cfg.direct_grid_points);
    cfg.direct_angle_tolerance = j.value("direct_angle_tolerance", cfg.direct_angle_tolerance);
    cfg.validate();
    return cfg;
}

Json to_json(const StrategyReport& report) {
    Json j{
        {"strategy", std::string(to_string(report.strategy))},
        {"s_rel_nats", number_json(report.s_rel)},
        {"s_rel_bits", number_json(nats_to_bits(report.s_rel))},
        {"pair_value_nats", number_json(report.pair_value())},
        {"phi_star", report.phi_star ? Json(*report.phi_star) : Json(nullptr)},
        {"unitary", matrix_json(report.basis.unitary().matrix())},
        {"degenerate", report.degenerate},
        {"seed", report.seed},
    };
    if (report.raw_pair_value) {
        j["raw_pair_value_nats"] = number_json(*report.raw_pair_value);
    }
    if (report.separable_pair_value) {
        j["separable_pair_value_nats"] = number_json(*report.separable_pair_value);
        j["improved_over_separable"] = report.improved_over_separable();
    }
    if (!report.restart_values.empty()) {
        Json values = Json::array();
        for (const double v : report.restart_values) {
            values.push_back(number_json(v));
        }
        j["restart_values_nats"] = std::move(values);
    }
    j["config"] = to_json(report.config);
    return j;
}

StrategyReport strategy_report_from_json(const Json& j) {
    std::optional<double> phi;
    if (j.contains("phi_star") && !j.at("phi_star").is_null()) {
        phi = j.at("phi_star").get<double>();
    }
    std::optional<double> raw;
    if (j.contains("raw_pair_value_nats")) {
        raw = number_from_json(j.at("raw_pair_value_nats"));
    }
    std::optional<double> separable;
    if (j.contains("separable_pair_value_nats")) {
        separable = number_from_json(j.at("separable_pair_value_nats"));
    }
    std::vector<double> restarts;
    if (j.contains("restart_values_nats")) {
        for (const auto& v : j.at("restart_values_nats")) {
            restarts.push_back(number_from_json(v));
        }
    }
    return StrategyReport{
        .strategy = parse_strategy(field<std::string>(j, "strategy")),
        .s_rel = number_from_json(j.at("s_rel_nats")),
        .basis = MeasurementBasis(UnitaryMatrix::from(matrix_from_json(j.at("unitary")))),
        .phi_star = phi,
        .raw_pair_value = raw,
        .separable_pair_value = separable,
        .restart_values = std::move(restarts),
        .degenerate = field<bool>(j, "degenerate"),
        .seed = field<std::uint64_t>(j, "seed"),
        .config = j.contains("config") ? optimizer_config_from_json(j.at("config")) : OptimizerConfig{},
    };
}

Json to_json(const DecompositionResult& result) {
    Json locals = Json::array();
    for (const auto& g : result.locals) {
        locals.push_back(gate_json(g));
    }
    Json cnots = Json::array();
    for (const auto& c : result.cnots) {
        cnots.push_back(Json{{"control", c.control}, {"target", c.target}});
    }
    const auto& crit = result.criterion;
    return Json{
        {"locals", std::move(locals)},
        {"cnots", std::move(cnots)},
        {"global_phase", rounded(result.global_phase)},
        {"residual", result.residual},
        {"criterion",
         Json{
             {"chi", complex_json(crit.chi)},
             {"canonical_coordinates", Json::array({rounded(crit.coordinates.cx), rounded(crit.coordinates.cy),
                                                    rounded(crit.coordinates.cz)})},
             {"makhlin_g1", complex_json(crit.invariants.g1)},
             {"makhlin_g2", crit.invariants.g2},
             {"distance_to_two_cnot_class", crit.distance_to_two_cnot_class},
             {"two_cnots_suffice", crit.two_cnots_suffice},
         }},
    };
}

Json to_json(const NoiseModel& noise) {
    return Json{{"depolarizing_1q", noise.depolarizing_1q},
                {"depolarizing_2q", noise.depolarizing_2q},
                {"readout_flip", noise.readout_flip}};
}

NoiseModel noise_model_from_json(const Json& j) {
    NoiseModel n;
    n.depolarizing_1q = j.value("depolarizing_1q", 0.0);
    n.depolarizing_2q = j.value("depolarizing_2q", 0.0);
    n.readout_flip = j.value("readout_flip", 0.0);
    n.validate();
    return n;
}

Json to_json(const ShotCounts& counts) {
    Json c = Json::object();
    for (const auto& [label, n] : counts.counts) {
        c[label] = n;
    }
    return Json{{"shots", counts.shots},
                {"seed", counts.seed},
                {"workers", counts.workers},
                {"noise", to_json(counts.noise)},
                {"counts", std::move(c)}};
}

ShotCounts shot_counts_from_json(const Json& j) {
    ShotCounts counts;
    counts.shots = field<std::uint64_t>(j, "shots");
    counts.seed = field<std::uint64_t>(j, "seed");
    counts.workers = j.value("workers", std::uint64_t{1});
    if (j.contains("noise")) {
        counts.noise = noise_model_from_json(j.at("noise"));
    }
    for (const auto& [label, n] : j.at("counts").items()) {
        if (label.empty() || label.find_first_not_of("01") != std::string::npos) {
            throw ConfigError("counts keys must be bitstrings, got '" + label + "'");
        }
        counts.counts[label] = n.get<std::uint64_t>();
    }
    counts.validate();
    return counts;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace qlike
