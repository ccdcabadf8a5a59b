#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "roughpam/common.hpp"
#include "roughpam/harness.hpp"

using namespace roughpam;

namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("roughpam-test-" + name);
    fs::remove_all(p);
    return p;
}

RunConfig small_config(const fs::path& out) {
    RunConfig c;
    c.grid = SpectralGrid{32.0, 64, 2.5e-3};
    c.model.horizon = 0.025;
    c.solver = SolverSection{16, 5, 4};
    c.fk.samples = 200;
    c.fk.dt_b = 2.5e-3;
    c.fk.n_list = {1, 2};
    c.fk.t = 0.05;
    c.output_dir = out.string();
    c.threads = 1;
    return c;
}

}  // namespace

TEST(Config, DefaultsRoundTrip) {
    const RunConfig c;
    const RunConfig d = parse_config(c.to_json());
    EXPECT_EQ(c.canonical(), d.canonical());
    EXPECT_EQ(c.fingerprint(), d.fingerprint());
    EXPECT_EQ(c.fingerprint().size(), 64u);
}

TEST(Config, FingerprintIgnoresLocalSettings) {
    RunConfig a, b;
    b.output_dir = "elsewhere";
    b.threads = 7;
    EXPECT_EQ(a.fingerprint(), b.fingerprint());
    b.seed = 2;
    EXPECT_NE(a.fingerprint(), b.fingerprint());
}

TEST(Config, Errors) {
    EXPECT_THROW(parse_config(R"({"model": {"h": 0.2}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"model": {"hurst": 0.3}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"schema_version": 9})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"fk": {"eps_schedule": [0.1, 0.2, 0.01]}})"), ConfigError);
    EXPECT_THROW(parse_config(R"({"grid": {"dt": "fast"}})"), ConfigError);
    try {
        parse_config("{\n  \"seed\": 1,\n  \"model\": {\n    \"h\": 0.3,,\n  }\n}");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos) << e.what();
    }
    const RunConfig c = parse_config(R"({"model": {"u0": {"kind": "gaussian_bump", "width": 2.0}}})");
    EXPECT_EQ(c.model.u0.kind(), InitialCondition::Kind::gaussian_bump);
    EXPECT_EQ(c.model.u0.width(), 2.0);
}

TEST(Sha256, KnownDigest) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(ResultsStore, AppendOnlyWithIntegrityCheck) {
    const auto dir = scratch_dir("store");
    ResultsStore store(dir.string());
    store.append("f1", "solve", {{"a.csv", "1,2\n"}});
    store.append("f1", "solve", {{"a.csv", "1,2\n"}});
    store.append("f1", "moments", {{"b.csv", "x"}});
    EXPECT_EQ(store.records().size(), 3u);
    EXPECT_THROW(store.append("f1", "solve", {{"a.csv", "1,3\n"}}), IntegrityError);
    EXPECT_EQ(store.records().size(), 3u);
    std::ifstream in(dir / "a.csv");
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "1,2");
    {
        std::ofstream bad(dir / "records.jsonl", std::ios::app);
        bad << "{not json\n";
    }
    EXPECT_THROW(store.records(), IntegrityError);
}

TEST(Commands, ValidateFlags) {
    RunConfig c = small_config(scratch_dir("validate"));
    EXPECT_EQ(cmd_validate(c).exit_code, kExitOk);
    c.model.u0 = InitialCondition::spectral_decay(1.0, 1.0);
    const auto r = cmd_validate(c);
    EXPECT_EQ(r.exit_code, kExitConfig);
    EXPECT_NE(r.artifacts.at("validate.json").find("\"pass\": false"), std::string::npos);
}

TEST(Commands, ArtifactsEmbedFingerprint) {
    const RunConfig c = small_config(scratch_dir("fingerprint"));
    for (const auto& r : {cmd_solve(c), cmd_moments(c), cmd_intermittency(c, true)}) {
        for (const auto& [name, bytes] : r.artifacts) {
            EXPECT_NE(bytes.find(c.fingerprint()), std::string::npos) << r.command << ' ' << name;
        }
    }
}

TEST(Commands, ReplayIsByteIdentical) {
    const RunConfig c = small_config(scratch_dir("replay"));
    RunConfig d = c;
    d.threads = 2;
    EXPECT_EQ(cmd_solve(c).artifacts, cmd_solve(d).artifacts);
    EXPECT_EQ(cmd_moments(c).artifacts, cmd_moments(d).artifacts);
    const auto r = cmd_solve(c);
    persist(r, c);
    persist(r, c);
    EXPECT_EQ(ResultsStore(c.output_dir).records().size(), 2u);
}

TEST(Commands, MomentsFirstOrderEqualsHeatMean) {
    RunConfig c = small_config(scratch_dir("moments"));
    c.model.u0 = InitialCondition::constant(1.0);
    const auto r = cmd_moments(c);
    EXPECT_EQ(r.exit_code, kExitOk);
    std::istringstream csv(r.artifacts.at("moments.csv"));
    std::string line;
    int rows = 0;
    while (std::getline(csv, line)) {
        if (line.rfind("1,", 0) != 0) continue;
        std::vector<std::string> cells;
        std::istringstream ls(line);
        for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
        ASSERT_GE(cells.size(), 6u);
        EXPECT_EQ(std::stod(cells[4]), 1.0) << line;
        ++rows;
    }
    EXPECT_GE(rows, 1);
}

TEST(Commands, SyntheticIntermittencyRecoversExponents) {
    const RunConfig c = small_config(scratch_dir("synthetic"));
    const auto r = cmd_intermittency(c, true);
    EXPECT_EQ(r.exit_code, kExitOk);
    EXPECT_NE(r.artifacts.at("fits.json").find("\"pass_n\": true"), std::string::npos);
    EXPECT_NE(r.artifacts.at("fits.json").find("\"pass_kappa\": true"), std::string::npos);
}
