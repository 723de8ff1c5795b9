#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "msr/artifact.hpp"
#include "msr/process.hpp"
#include "support.hpp"

using namespace msr;
using testsup::TempDir;

namespace {

ProcessResult run_cli(std::vector<std::string> args) {
    std::vector<std::string> argv{testsup::cli_binary().string()};
    argv.insert(argv.end(), args.begin(), args.end());
    return run_process(argv);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_config(const std::filesystem::path& path, const std::string& repo) {
    std::ofstream out(path);
    out << "profile: codeface-like\n"
        << "repo_path: " << repo << "\n"
        << "window_months: 3\n"
        << "timestamp_basis: author\n"
        << "include_window_end: false\n";
}

// one mockgen + mine round, returning the artifact directory
std::filesystem::path mine_scenario(const TempDir& tmp, const std::string& scenario,
                                    const std::string& tag) {
    auto gen_dir = tmp.path / ("gen-" + tag);
    auto r1 = run_cli({"mockgen", "--scenario",
                       (testsup::scenario_dir() / (scenario + ".json")).string(), "--out",
                       gen_dir.string()});
    REQUIRE(r1.exit_code == 0);

    auto cfg = tmp.path / ("config-" + tag + ".yaml");
    write_config(cfg, (gen_dir / "repo").string());
    auto out_dir = tmp.path / ("run-" + tag);
    auto r2 = run_cli({"mine", "--config", cfg.string(), "--out", out_dir.string()});
    INFO(r2.err);
    REQUIRE(r2.exit_code == 0);
    return out_dir;
}

} // namespace

TEST_CASE("no subcommand is a usage error") {
    CHECK(run_cli({}).exit_code != 0);
}

TEST_CASE("mine exits 2 on config problems") {
    TempDir tmp;
    CHECK(run_cli({"mine", "--config", (tmp.path / "absent.yaml").string(), "--out",
                   (tmp.path / "out").string()})
              .exit_code == 2);

    auto bad = tmp.path / "bad.yaml";
    std::ofstream(bad) << "window_months: -1\n";
    CHECK(run_cli({"mine", "--config", bad.string(), "--out", (tmp.path / "out").string()})
              .exit_code == 2);

    auto no_repo = tmp.path / "norepo.yaml";
    std::ofstream(no_repo) << "window_months: 3\n";
    CHECK(run_cli({"mine", "--config", no_repo.string(), "--out", (tmp.path / "out").string()})
              .exit_code == 2);
}

TEST_CASE("mockgen exits 2 on a bad scenario") {
    TempDir tmp;
    CHECK(run_cli({"mockgen", "--scenario", (tmp.path / "absent.json").string(), "--out",
                   (tmp.path / "out").string()})
              .exit_code == 2);

    auto bad = tmp.path / "bad.json";
    std::ofstream(bad) << "{not json";
    CHECK(run_cli({"mockgen", "--scenario", bad.string(), "--out",
                   (tmp.path / "out").string()})
              .exit_code == 2);
}

TEST_CASE("mockgen writes a repository and an oracle") {
    TempDir tmp;
    auto out = tmp.path / "gen";
    auto r = run_cli({"mockgen", "--scenario",
                      (testsup::scenario_dir() / "three-linear-commits.json").string(), "--out",
                      out.string()});
    INFO(r.err);
    REQUIRE(r.exit_code == 0);
    CHECK(std::filesystem::exists(out / "repo" / ".git"));
    auto oracle = nlohmann::json::parse(slurp(out / "oracle.json"));
    CHECK(oracle.at("identity_count") == 2);
    CHECK(oracle.at("windows").size() == 1);
}

TEST_CASE("mine writes a complete artifact directory") {
    TempDir tmp;
    auto dir = mine_scenario(tmp, "three-linear-commits", "a");
    for (const char* f : {"config.yaml", "window_plan.json", "commits.csv", "files.csv",
                          "entity_changes.csv", "identities.json", "counts.json",
                          "blame_discovered.csv", "notices.log"})
        CHECK(std::filesystem::exists(dir / f));
    CHECK(std::filesystem::exists(dir / "networks" / "nodes.csv"));

    auto loaded = load_artifact(dir);
    CHECK(loaded.windows.size() == 1);
    CHECK(loaded.counts.at("commits") == std::vector<std::int64_t>{3});
    CHECK(loaded.commit_hashes.size() == 3);
    CHECK(loaded.entity_names == std::set<std::string>{"src/a.c:alpha"});
}

TEST_CASE("mining the same repository twice is byte-identical") {
    TempDir tmp;
    auto gen_dir = tmp.path / "gen";
    REQUIRE(run_cli({"mockgen", "--scenario",
                     (testsup::scenario_dir() / "merge-commit.json").string(), "--out",
                     gen_dir.string()})
                .exit_code == 0);
    auto cfg = tmp.path / "config.yaml";
    write_config(cfg, (gen_dir / "repo").string());

    auto out_a = tmp.path / "run-a";
    auto out_b = tmp.path / "run-b";
    REQUIRE(run_cli({"mine", "--config", cfg.string(), "--out", out_a.string()}).exit_code == 0);
    REQUIRE(run_cli({"mine", "--config", cfg.string(), "--out", out_b.string()}).exit_code == 0);
    for (const char* f : {"commits.csv", "files.csv", "entity_changes.csv", "identities.json",
                          "counts.json", "window_plan.json"})
        CHECK(slurp(out_a / f) == slurp(out_b / f));
}

TEST_CASE("self-comparison reports identity") {
    TempDir tmp;
    auto a = mine_scenario(tmp, "two-devs-one-function", "a");
    auto b = mine_scenario(tmp, "two-devs-one-function", "b");

    auto report_path = tmp.path / "report.json";
    auto r = run_cli({"compare", "--a", a.string(), "--b", b.string(), "--out",
                      report_path.string(), "--plot"});
    INFO(r.err);
    REQUIRE(r.exit_code == 0);

    auto rep = nlohmann::json::parse(slurp(report_path));
    for (const auto& s : rep.at("series"))
        CHECK(s.at("dtw").get<double>() == 0.0);
    for (const auto& o : rep.at("overlaps"))
        CHECK(o.at("jaccard").get<double>() == 1.0);
    for (const auto& g : rep.at("graph_stats")) {
        CHECK(g.at("ged").get<int>() == 0);
        CHECK(g.at("density_a") == g.at("density_b"));
    }
    CHECK(std::filesystem::exists(tmp.path / "report.csv"));
    CHECK(std::filesystem::exists(tmp.path / "report.svg"));
    auto svg = slurp(tmp.path / "report.svg");
    CHECK(svg.rfind("<svg", 0) == 0);
}

TEST_CASE("compare exits 3 on mismatched window plans") {
    TempDir tmp;
    auto a = mine_scenario(tmp, "three-linear-commits", "a"); // one window
    auto b = mine_scenario(tmp, "six-month-gap", "b");        // two windows
    auto r = run_cli({"compare", "--a", a.string(), "--b", b.string(), "--out",
                      (tmp.path / "report.json").string()});
    CHECK(r.exit_code == 3);
}

TEST_CASE("compare exits 1 when a directory is not an artifact") {
    TempDir tmp;
    auto a = mine_scenario(tmp, "three-linear-commits", "a");
    auto not_artifact = tmp.path / "plain";
    std::filesystem::create_directories(not_artifact);
    auto r = run_cli({"compare", "--a", a.string(), "--b", not_artifact.string(), "--out",
                      (tmp.path / "report.json").string()});
    CHECK(r.exit_code == 1);
}

TEST_CASE("profile overrides change the artifact's config snapshot") {
    TempDir tmp;
    auto gen_dir = tmp.path / "gen";
    REQUIRE(run_cli({"mockgen", "--scenario",
                     (testsup::scenario_dir() / "three-linear-commits.json").string(), "--out",
                     gen_dir.string()})
                .exit_code == 0);

    auto cfg = tmp.path / "config.yaml";
    std::ofstream(cfg) << "profile: kaiaulu-prior\n"
                       << "repo_path: " << (gen_dir / "repo").string() << "\n"
                       << "weight_scheme: nested_pairwise\n";
    auto out_dir = tmp.path / "run";
    auto r = run_cli({"mine", "--config", cfg.string(), "--out", out_dir.string()});
    INFO(r.err);
    REQUIRE(r.exit_code == 0);
    auto snapshot = slurp(out_dir / "config.yaml");
    CHECK(snapshot.find("profile: kaiaulu-prior") != std::string::npos);
    CHECK(snapshot.find("weight_scheme: nested_pairwise") != std::string::npos);
    CHECK(snapshot.find("timestamp_basis: author") != std::string::npos);
}

TEST_CASE("the --repo flag overrides the configured repository") {
    TempDir tmp;
    auto gen_dir = tmp.path / "gen";
    REQUIRE(run_cli({"mockgen", "--scenario",
                     (testsup::scenario_dir() / "three-linear-commits.json").string(), "--out",
                     gen_dir.string()})
                .exit_code == 0);
    auto cfg = tmp.path / "config.yaml";
    write_config(cfg, "/nonexistent/repo");
    auto out_dir = tmp.path / "run";
    auto r = run_cli({"mine", "--config", cfg.string(), "--repo", (gen_dir / "repo").string(),
                      "--out", out_dir.string()});
    INFO(r.err);
    CHECK(r.exit_code == 0);
}

TEST_CASE("mine on a directory that is not a repository exits 1") {
    TempDir tmp;
    auto plain = tmp.path / "plain";
    std::filesystem::create_directories(plain);
    auto cfg = tmp.path / "config.yaml";
    write_config(cfg, plain.string());
    auto r = run_cli({"mine", "--config", cfg.string(), "--out", (tmp.path / "out").string()});
    CHECK(r.exit_code == 1);
}
