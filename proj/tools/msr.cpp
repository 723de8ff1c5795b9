// msr: mine git histories into run artifacts, compare runs, generate mock
// repositories with oracle expectations.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "msr/artifact.hpp"
#include "msr/config_yaml.hpp"
#include "msr/mockgen.hpp"
#include "msr/report.hpp"

namespace fs = std::filesystem;

namespace {

int cmd_mine(const std::string& config_path, const std::string& repo,
             const std::string& out_dir) {
    msr::RunConfig cfg;
    try {
        cfg = msr::load_run_config_file(config_path);
        if (!repo.empty())
            cfg.repo_path = repo;
        if (cfg.repo_path.empty())
            throw msr::ConfigError("no repository: set repo_path in the config or pass --repo");
        if (!fs::exists(cfg.repo_path))
            throw msr::ConfigError("repository path does not exist: " + cfg.repo_path);
    } catch (const msr::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        msr::RunResult result = msr::run_pipeline(cfg);
        msr::save_artifact(result, out_dir);
        std::cout << "mined " << result.commits.size() << " commits into "
                  << result.windows.size() << " windows; " << result.entity_changes.size()
                  << " entity changes; " << result.identities.identities.size()
                  << " identities -> " << out_dir << "\n";
        return 0;
    } catch (const msr::Error& e) {
        std::cerr << "pipeline error [mine]: " << e.what() << "\n";
        return 1;
    }
}

int cmd_compare(const std::string& a_dir, const std::string& b_dir, const std::string& out_path,
                bool plot) {
    try {
        auto a = msr::load_artifact(a_dir);
        auto b = msr::load_artifact(b_dir);
        auto rep = msr::compare_runs(a, b);

        std::ofstream(out_path) << msr::report_json(rep).dump(2) << "\n";
        fs::path csv_path = fs::path(out_path).replace_extension(".csv");
        std::ofstream(csv_path) << msr::report_csv(rep);
        if (plot) {
            fs::path svg_path = fs::path(out_path).replace_extension(".svg");
            std::ofstream(svg_path) << msr::report_svg(rep);
        }
        std::cout << "report written to " << out_path << "\n";
        return 0;
    } catch (const msr::WindowPlanMismatch& e) {
        std::cerr << "window plan mismatch: " << e.what() << "\n";
        return 3;
    } catch (const msr::Error& e) {
        std::cerr << "pipeline error [compare]: " << e.what() << "\n";
        return 1;
    }
}

int cmd_mockgen(const std::string& scenario_path, const std::string& out_dir) {
    msr::mockgen::ScenarioSpec spec;
    try {
        spec = msr::mockgen::load_scenario_file(scenario_path);
    } catch (const msr::Error& e) {
        std::cerr << "scenario error: " << e.what() << "\n";
        return 2;
    }
    try {
        fs::create_directories(out_dir);
        msr::mockgen::generate(spec, fs::path(out_dir) / "repo");
        msr::mockgen::OracleConfig cfg; // derived-window defaults; axes documented
        auto oracle = msr::mockgen::expected_results(spec, cfg);
        std::ofstream(fs::path(out_dir) / "oracle.json")
            << msr::mockgen::to_json(oracle).dump(2) << "\n";
        std::cout << "generated " << spec.commits.size() << " commits at " << out_dir
                  << "/repo (oracle: " << out_dir << "/oracle.json)\n";
        return 0;
    } catch (const msr::Error& e) {
        std::cerr << "mockgen error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mining-software-repositories toolkit"};
    app.require_subcommand(1);

    std::string config_path, repo, out, a_dir, b_dir, scenario;
    bool plot = false;

    auto* mine = app.add_subcommand("mine", "run the full pipeline on a repository");
    mine->add_option("--config", config_path, "YAML run configuration")->required();
    mine->add_option("--repo", repo, "repository directory (overrides repo_path)");
    mine->add_option("--out", out, "artifact output directory")->required();

    auto* compare = app.add_subcommand("compare", "compare two run artifacts");
    compare->add_option("--a", a_dir, "first run artifact")->required();
    compare->add_option("--b", b_dir, "second run artifact")->required();
    compare->add_option("--out", out, "report JSON path")->required();
    compare->add_flag("--plot", plot, "also emit SVG line charts");

    auto* mock = app.add_subcommand("mockgen", "generate a mock repository and its oracle");
    mock->add_option("--scenario", scenario, "scenario spec (JSON)")->required();
    mock->add_option("--out", out, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    if (mine->parsed())
        return cmd_mine(config_path, repo, out);
    if (compare->parsed())
        return cmd_compare(a_dir, b_dir, out, plot);
    if (mock->parsed())
        return cmd_mockgen(scenario, out);
    return 2;
}
