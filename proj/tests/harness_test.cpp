#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qlike/errors.hpp"
#include "qlike/harness.hpp"
#include "qlike/qasm.hpp"

using namespace qlike;
namespace fs = std::filesystem;

namespace {

OptimizerConfig quick_config(std::uint64_t seed) {
    OptimizerConfig cfg;
    cfg.seed = seed;
    cfg.restarts = 2;
    cfg.iterations = 1000;
    return cfg;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

struct CliRun {
    int status = -1;
    std::string out;
};

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / ("qlike_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir;
}

CliRun cli(const std::string& args) {
    const fs::path out = scratch_dir() / "stdout.txt";
    const std::string cmd = std::string(QLIKE_CLI_PATH) + " " + args + " > " + out.string() + " 2>/dev/null";
    const int raw = std::system(cmd.c_str());
    return CliRun{WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out)};
}

}  // namespace

TEST(Compare, NormalizedValuesAndDiff) {
    const CompareResult r = run_compare(PreparationParams(0.2, 1.8), quick_config(1));
    const auto values = normalized_values(r);
    ASSERT_EQ(values.size(), 4u);
    EXPECT_EQ(values[0].unit, "nats");
    EXPECT_EQ(values[0].normalization, "per_qubit");
    EXPECT_EQ(values[0].direct, r.direct.s_rel);
    EXPECT_NEAR(values[1].entangled, 2 * r.entangled.s_rel, 1e-15);
    EXPECT_NEAR(values[2].direct, r.direct.s_rel / std::log(2.0), 1e-14);
    EXPECT_GT(r.diff(), 0.0);
    for (const auto& v : values) EXPECT_NEAR(v.diff, v.entangled - v.direct, 1e-12);
}

TEST(Compare, ZeroDelta) {
    const CompareResult r = run_compare(PreparationParams(0.2, 0.0), quick_config(1));
    EXPECT_TRUE(r.degenerate());
    for (const auto& v : normalized_values(r)) {
        EXPECT_EQ(v.direct, 0.0);
        EXPECT_EQ(v.entangled, 0.0);
        EXPECT_EQ(v.diff, 0.0);
    }
}

TEST(Compare, ReferenceMatching) {
    const CompareResult r = run_compare(PreparationParams(0.2, 1.8), quick_config(1));
    const auto exact = match_reference(r, 2 * r.direct.s_rel, 2 * r.entangled.s_rel);
    ASSERT_EQ(exact.size(), 4u);
    EXPECT_FALSE(exact[0].matches);
    EXPECT_TRUE(exact[1].matches);
    EXPECT_EQ(exact[1].direct_relative_error, 0.0);
    EXPECT_THROW(match_reference(r, 0.0, 1.0), ConfigError);
    const Json j = compare_json(r, Reference{1.0, 2.0});
    EXPECT_EQ(j.at("reference").at("matches").size(), 4u);
    EXPECT_EQ(j.at("metadata").at("command"), "compare");
    EXPECT_NE(compare_text(r, Reference{1.0, 2.0}).find("no convention matches"), std::string::npos);
}

TEST(Curve, RowsAndHeader) {
    CurveOptions options;
    options.n_max = 41;
    options.shots_per_point = 2;
    options.seed = 5;
    const CurveResult r = run_curve(PreparationParams(0.2, 1.8), quick_config(1), options);
    // Each point adds shots_per_point pairs, i.e. 4 measured qubits.
    ASSERT_EQ(r.rows.size(), 10u);
    EXPECT_EQ(r.rows.front().n, 4u);
    EXPECT_EQ(r.rows.back().n, 40u);
    for (const auto& row : r.rows) {
        EXPECT_TRUE(row.direct.has_value());
        EXPECT_TRUE(row.entangled.has_value());
    }
    const std::string csv = curve_csv(r, metadata_json("curve", 5, Json::object()));
    EXPECT_NE(csv.find("\nN,log_likelihood_direct,log_likelihood_entangled\n4,"), std::string::npos);
    EXPECT_EQ(csv.front(), '#');
}

TEST(Curve, DirectColumnIsBinomialOfQubitOutcomes) {
    CurveOptions options;
    options.n_max = 2;
    options.include_entangled = false;
    const CurveResult r = run_curve(PreparationParams(0.2, 1.8), quick_config(1), options);
    ASSERT_EQ(r.rows.size(), 1u);
    EXPECT_FALSE(r.rows[0].entangled.has_value());
    // Two qubits, so the log-likelihood is one of three binomial cells.
    const StatePair s = prepare_states(PreparationParams(0.2, 1.8));
    const double phi = *r.direct->phi_star;
    const double q = 0.5 * (1 + std::cos(0.2) * (std::sin(1.8) * std::sin(phi) + std::cos(1.8) * std::cos(phi)));
    const double v = *r.rows[0].direct;
    const double cells[3] = {2 * std::log(1 - q), std::log(2 * q * (1 - q)), 2 * std::log(q)};
    EXPECT_TRUE(std::abs(v - cells[0]) < 1e-12 || std::abs(v - cells[1]) < 1e-12 || std::abs(v - cells[2]) < 1e-12)
        << v;
}

TEST(Curve, Validation) {
    CurveOptions options;
    options.n_max = 1;
    EXPECT_THROW(run_curve(PreparationParams(0.2, 1.8), quick_config(1), options), ConfigError);
}

TEST(Export, DeterministicWithMetadata) {
    const auto a = build_export(PreparationParams(0.2, 1.8), Strategy::entangled, quick_config(4));
    const auto b = build_export(PreparationParams(0.2, 1.8), Strategy::entangled, quick_config(4));
    EXPECT_EQ(emit_qasm(a.a), emit_qasm(b.a));
    EXPECT_EQ(emit_qasm(a.b), emit_qasm(b.b));
    EXPECT_NE(emit_qasm(a.a).find("// qlike "), std::string::npos);
    EXPECT_NE(emit_qasm(a.a).find("state=A"), std::string::npos);
    EXPECT_EQ(a.a.cnot_count(), 4u);
}

TEST(Simulation, EstimateNearExact) {
    const SimulationResult r =
        run_simulation(PreparationParams(0.6, 1.2), Strategy::direct, quick_config(2), 200000, NoiseModel{}, 3, 2);
    EXPECT_NEAR(r.exact.nats, 2 * r.report.s_rel, 1e-9);
    EXPECT_LE(std::abs(r.estimate.smoothed - r.exact.nats), 5 * r.estimate.standard_error);
}

TEST(ConfigText, Parsing) {
    const auto kv = parse_config_text("# sweep\nbeta = 0.3\n--delta=1.2  # trailing\n\nstrict\nstrategy entangled\n");
    ASSERT_EQ(kv.size(), 4u);
    EXPECT_EQ(kv[0], (std::pair<std::string, std::string>{"beta", "0.3"}));
    EXPECT_EQ(kv[1], (std::pair<std::string, std::string>{"delta", "1.2"}));
    EXPECT_EQ(kv[2], (std::pair<std::string, std::string>{"strict", "true"}));
    EXPECT_EQ(kv[3], (std::pair<std::string, std::string>{"strategy", "entangled"}));
    EXPECT_THROW(parse_config_text("= 3\n"), ConfigError);
}

TEST(Cli, OptimizeDirectAndDeterminism) {
    const fs::path dir = scratch_dir();
    const std::string a = (dir / "a.json").string(), b = (dir / "b.json").string();
    EXPECT_EQ(cli("optimize --beta 0.2 --delta 1.8 --strategy direct --seed 7 -o " + a).status, 0);
    EXPECT_EQ(cli("optimize --beta 0.2 --delta 1.8 --strategy direct --seed 7 -o " + b).status, 0);
    EXPECT_EQ(slurp(a), slurp(b));
    const Json j = Json::parse(slurp(a));
    EXPECT_GT(j.at("s_rel_nats").get<double>(), 0.0);
    EXPECT_EQ(j.at("metadata").at("seed"), 7);
    EXPECT_EQ(j.at("metadata").at("version"), std::string(tool_version()));
}

TEST(Cli, DegenerateAndStrict) {
    const CliRun plain = cli("optimize --delta 0 --strategy entangled --seed 1 --restarts 2");
    EXPECT_EQ(plain.status, 0);
    const Json j = Json::parse(plain.out);
    EXPECT_EQ(j.at("s_rel_nats").get<double>(), 0.0);
    EXPECT_TRUE(j.at("degenerate").get<bool>());
    EXPECT_EQ(cli("optimize --delta 0 --strategy entangled --seed 1 --restarts 2 --strict").status, 3);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(cli("optimize --no-such-flag").status, 2);
    EXPECT_EQ(cli("optimize --beta 5 --seed 1").status, 2);
    EXPECT_EQ(cli("optimize --strategy sideways --seed 1").status, 2);
    EXPECT_EQ(cli("").status, 2);
    EXPECT_EQ(cli("export --seed 1").status, 2);
}

TEST(Cli, FilesystemErrorNamesPath) {
    EXPECT_EQ(cli("optimize --seed 1 -o /nonexistent/dir/out.json").status, 1);
}

TEST(Cli, ConfigFileWithOverride) {
    const fs::path dir = scratch_dir();
    const fs::path cfg = dir / "run.cfg";
    std::ofstream(cfg) << "beta = 0.3\nstrategy = entangled\nrestarts = 2\n";
    const CliRun r = cli("optimize --config " + cfg.string() + " --seed 2 --beta 0.25");
    ASSERT_EQ(r.status, 0);
    const Json j = Json::parse(r.out);
    EXPECT_EQ(j.at("strategy"), "entangled");
    EXPECT_EQ(j.at("metadata").at("parameters").at("beta"), 0.25);
    EXPECT_EQ(j.at("config").at("restarts"), 2);
}

TEST(Cli, ExportFiles) {
    const fs::path dir = scratch_dir();
    const std::string prefix = (dir / "ent").string();
    ASSERT_EQ(cli("export --strategy entangled --seed 3 --restarts 2 -o " + prefix).status, 0);
    const std::string first = slurp(prefix + "_A.qasm");
    EXPECT_EQ(parse_qasm(first).cnot_count(), 4u);
    EXPECT_EQ(parse_qasm(slurp(prefix + "_B.qasm")).cnot_count(), 4u);
    ASSERT_EQ(cli("export --strategy entangled --seed 3 --restarts 2 -o " + prefix).status, 0);
    EXPECT_EQ(slurp(prefix + "_A.qasm"), first);

    const std::string direct = (dir / "dir").string();
    ASSERT_EQ(cli("export --strategy direct --seed 3 -o " + direct).status, 0);
    EXPECT_NO_THROW(parse_qasm(slurp(direct + "_A.qasm")));
    EXPECT_NO_THROW(parse_qasm(slurp(direct + "_B.qasm")));
}

TEST(Cli, CurveCompareDecomposeSimulate) {
    const CliRun curve = cli("curve --seed 1 --n-max 10 --restarts 2");
    ASSERT_EQ(curve.status, 0);
    EXPECT_NE(curve.out.find("N,log_likelihood_direct,log_likelihood_entangled\n"), std::string::npos);

    const CliRun cmp = cli("compare --seed 1 --restarts 2 --json --reference-direct 4.506 --reference-entangled 4.723");
    ASSERT_EQ(cmp.status, 0);
    EXPECT_EQ(Json::parse(cmp.out).at("values").size(), 4u);
    EXPECT_EQ(cli("compare --seed 1 --reference-direct 4.506").status, 2);

    const CliRun dec = cli("decompose --seed 1 --restarts 2");
    ASSERT_EQ(dec.status, 0);
    EXPECT_LE(Json::parse(dec.out).at("residual").get<double>(), 1e-8);

    const CliRun sim = cli("simulate --seed 1 --shots 2000 --workers 2 --restarts 2 --strategy entangled");
    ASSERT_EQ(sim.status, 0);
    const Json s = Json::parse(sim.out);
    EXPECT_EQ(s.at("a").at("shots"), 2000);
    EXPECT_EQ(s.at("a").at("workers"), 2);
}

TEST(Cli, OmittedSeedIsRecorded) {
    const CliRun r = cli("optimize --strategy direct");
    ASSERT_EQ(r.status, 0);
    EXPECT_TRUE(Json::parse(r.out).at("metadata").at("seed").is_number_unsigned());
}
