#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "msr/artifact.hpp"
#include "msr/mockgen.hpp"
#include "support.hpp"

using namespace msr;
using namespace msr::mockgen;
using testsup::TempDir;

namespace {

const char* kAllScenarios[] = {
    "three-linear-commits", "merge-commit",           "six-month-gap",
    "boundary-timestamp",   "alias-identities",       "two-devs-one-function",
    "scala-unsupported-language", "test-directory-excluded",
};

ScenarioSpec load_named(const std::string& name) {
    return load_scenario_file(testsup::scenario_dir() / (name + ".json"));
}

RunConfig pipeline_config(const std::string& repo, const OracleConfig& cfg) {
    RunConfig rc;
    rc.repo_path = repo;
    rc.window_months = cfg.window_months;
    rc.timestamp_basis = cfg.basis_author ? TimestampBasis::author : TimestampBasis::committer;
    rc.include_window_end = cfg.include_window_end;
    rc.filter_profile = FilterProfile{};
    rc.filter_profile.suffix_allowlist = cfg.suffix_allowlist;
    for (const auto& p : cfg.path_exclude_prefixes)
        rc.filter_profile.path_exclude_globs.push_back(p + "**");
    rc.identity_scope = cfg.identity_cross_scope ? MatchScope::cross_column_and_table
                                                 : MatchScope::within_column;
    rc.include_merges = cfg.include_merges;
    rc.include_self_loops = cfg.include_self_loops;
    return rc;
}

// oracle developer ids -> pipeline developer ids, joined on normalized email
std::map<int, int> id_translation(const OracleBundle& b, const IdentityTable& t) {
    std::map<int, int> out;
    for (const auto& [email, oid] : b.identity_of_email) {
        int pid = -1;
        for (const auto& ident : t.identities)
            if (ident.emails.count(email)) {
                pid = ident.id;
                break;
            }
        REQUIRE(pid >= 0);
        if (out.count(oid))
            CHECK(out.at(oid) == pid);
        out[oid] = pid;
    }
    return out;
}

void check_windows_and_counts(const RunResult& r, const OracleBundle& b) {
    REQUIRE(r.windows.size() == b.windows.size());
    for (size_t w = 0; w < b.windows.size(); ++w) {
        CHECK(r.windows[w].start_ts == b.windows[w].start_ts);
        CHECK(r.windows[w].end_ts == b.windows[w].end_ts);
    }
    for (const char* metric : {"commits", "files", "entities", "developers"}) {
        REQUIRE(r.counts.count(metric) == 1);
        CHECK(r.counts.at(metric) == b.counts.at(metric));
    }
}

void check_edges(const RunResult& r, const std::map<int, std::vector<OracleEdge>>& expected,
                 const std::map<int, int>& idmap) {
    for (size_t w = 0; w < r.windows.size(); ++w) {
        EdgeMap want;
        auto it = expected.find(static_cast<int>(w));
        if (it != expected.end())
            for (const auto& e : it->second)
                want[{idmap.at(e.from), idmap.at(e.to)}] = e.weight;
        REQUIRE(r.networks.count(static_cast<int>(w)) == 1);
        const auto& got = r.networks.at(static_cast<int>(w)).directed_edges;
        CHECK(got.size() == want.size());
        for (const auto& [edge, weight] : want) {
            REQUIRE(got.count(edge) == 1);
            CHECK(got.at(edge) == Catch::Approx(weight));
        }
    }
}

} // namespace

TEST_CASE("scenario loader fills defaults and rejects bad input") {
    auto spec = load_named("three-linear-commits");
    REQUIRE(spec.commits.size() == 3);
    CHECK(spec.commits[0].committer.email == "ann@x.org"); // defaults to author
    CHECK(spec.commits[0].committer_ts == spec.commits[0].author_ts);
    CHECK(spec.commits[0].branch == "main");
    REQUIRE(spec.declared_entities.count("src/a.c") == 1);

    nlohmann::json bad = {
        {"name", "bad"},
        {"commits",
         {{{"author", {{"name", "a"}, {"email", "a@x"}}}, {"author_ts", 2000}},
          {{"author", {{"name", "a"}, {"email", "a@x"}}}, {"author_ts", 1000}}}}};
    CHECK_THROWS_AS(load_scenario(bad), ConfigError);
}

TEST_CASE("generated repository matches the scripted history") {
    auto spec = load_named("three-linear-commits");
    TempDir tmp;
    generate(spec, tmp.path);

    auto repo = open_repo(tmp.path);
    auto log = extract_log(repo, true);
    std::reverse(log.begin(), log.end()); // oldest first
    REQUIRE(log.size() == 3);
    CHECK(log[0].author_name == "Ann");
    CHECK(log[0].author_ts == 1609459200);
    CHECK(log[1].author_email == "bob@x.org");
    CHECK(log[2].author_ts == 1614556800);
    REQUIRE(log[1].file_changes.size() == 1);
    CHECK(log[1].file_changes[0].path == "src/a.c");
    CHECK(log[1].file_changes[0].lines_added == 1);
    CHECK_FALSE(log[0].is_merge);
}

TEST_CASE("generate refuses a non-empty output directory") {
    auto spec = load_named("three-linear-commits");
    TempDir tmp;
    std::ofstream(tmp.path / "junk.txt") << "x";
    CHECK_THROWS_AS(generate(spec, tmp.path), IoFailure);
}

TEST_CASE("generated merge commits carry two parents") {
    auto spec = load_named("merge-commit");
    TempDir tmp;
    generate(spec, tmp.path);
    auto repo = open_repo(tmp.path);
    auto log = extract_log(repo, true); // newest first: the merge leads
    REQUIRE(log.size() == 3);
    CHECK(log[0].is_merge);
    CHECK(log[0].parents.size() == 2);
    CHECK(log[0].author_name == "Carol");
}

TEST_CASE("the oracle rejects oversized scenarios") {
    ScenarioSpec spec;
    for (int i = 0; i < 21; ++i) {
        ScenarioCommit c;
        c.author = {"a", "a@x"};
        c.committer = c.author;
        c.author_ts = c.committer_ts = 1000 + i;
        spec.commits.push_back(c);
    }
    CHECK_THROWS_AS(expected_results(spec, {}), SpecTooLarge);
}

TEST_CASE("pipeline and oracle agree on every shipped scenario") {
    for (const char* name : kAllScenarios) {
        INFO("scenario: " << name);
        auto spec = load_named(name);
        TempDir tmp;
        generate(spec, tmp.path);

        OracleConfig cfg;
        cfg.supported_suffixes = {".c"};
        auto oracle = expected_results(spec, cfg);

        for (auto scheme : {WeightScheme::nested_pairwise, WeightScheme::flat_sum}) {
            auto rc = pipeline_config(tmp.path.string(), cfg);
            rc.weight_scheme = scheme;
            auto r = run_pipeline(rc);

            check_windows_and_counts(r, oracle);
            CHECK(static_cast<int>(r.identities.identities.size()) == oracle.identity_count);
            auto idmap = id_translation(oracle, r.identities);
            check_edges(r, scheme == WeightScheme::nested_pairwise ? oracle.nested_edges
                                                                   : oracle.flat_edges,
                        idmap);

            // entity change multiset (window, file, entity, sloc, ts)
            std::multiset<std::tuple<int, std::string, std::string, std::int64_t, std::int64_t>>
                got, want;
            for (const auto& ec : r.entity_changes)
                got.insert({ec.window_index, ec.file, ec.entity_name, ec.sloc, ec.ts});
            for (const auto& ec : oracle.entity_changes)
                want.insert({ec.window_index, ec.file, ec.entity, ec.sloc, ec.ts});
            CHECK(got == want);
        }
    }
}

TEST_CASE("the worked two-developer example reproduces both weights") {
    auto spec = load_named("two-devs-one-function");
    TempDir tmp;
    generate(spec, tmp.path);
    OracleConfig cfg;
    cfg.supported_suffixes = {".c"};
    auto oracle = expected_results(spec, cfg);

    auto rc = pipeline_config(tmp.path.string(), cfg);
    rc.weight_scheme = WeightScheme::nested_pairwise;
    auto nested = run_pipeline(rc);
    rc.weight_scheme = WeightScheme::flat_sum;
    auto flat = run_pipeline(rc);

    auto idmap = id_translation(oracle, nested.identities);
    int ann = idmap.at(oracle.identity_of_email.at("ann@x.org"));
    int bob = idmap.at(oracle.identity_of_email.at("bob@x.org"));
    CHECK(nested.networks.at(0).directed_edges.at({bob, ann}) == 40.0);
    CHECK(flat.networks.at(0).directed_edges.at({bob, ann}) == 35.0);
}

TEST_CASE("merge inclusion switch drops the merge commit on both sides") {
    auto spec = load_named("merge-commit");
    TempDir tmp;
    generate(spec, tmp.path);
    OracleConfig cfg;
    cfg.supported_suffixes = {".c"};
    cfg.include_merges = false;
    auto oracle = expected_results(spec, cfg);

    auto rc = pipeline_config(tmp.path.string(), cfg);
    auto r = run_pipeline(rc);
    check_windows_and_counts(r, oracle);
    CHECK(r.counts.at("commits") == std::vector<std::int64_t>{2});
    CHECK(r.counts.at("developers") == std::vector<std::int64_t>{2}); // no Carol

    cfg.include_merges = true;
    auto with = run_pipeline(pipeline_config(tmp.path.string(), cfg));
    CHECK(with.counts.at("commits") == std::vector<std::int64_t>{3});
    CHECK(with.counts.at("developers") == std::vector<std::int64_t>{3});
}

TEST_CASE("boundary commit flips windows with include_window_end") {
    auto spec = load_named("boundary-timestamp");
    TempDir tmp;
    generate(spec, tmp.path);
    OracleConfig cfg;
    cfg.supported_suffixes = {".c"};

    auto excl_oracle = expected_results(spec, cfg);
    auto excl = run_pipeline(pipeline_config(tmp.path.string(), cfg));
    check_windows_and_counts(excl, excl_oracle);
    CHECK(excl.windows.size() == 2);

    cfg.include_window_end = true;
    auto incl_oracle = expected_results(spec, cfg);
    auto rc = pipeline_config(tmp.path.string(), cfg);
    auto incl = run_pipeline(rc);
    check_windows_and_counts(incl, incl_oracle);
    CHECK(incl.windows.size() == 1);
    CHECK(incl.counts.at("commits") == std::vector<std::int64_t>{2});
}

TEST_CASE("path exclusion removes the tests-only commit on both sides") {
    auto spec = load_named("test-directory-excluded");
    TempDir tmp;
    generate(spec, tmp.path);
    OracleConfig cfg;
    cfg.supported_suffixes = {".c"};
    cfg.path_exclude_prefixes = {"tests/"};
    auto oracle = expected_results(spec, cfg);

    auto r = run_pipeline(pipeline_config(tmp.path.string(), cfg));
    check_windows_and_counts(r, oracle);
    CHECK(r.counts.at("commits") == std::vector<std::int64_t>{1});
    for (const auto& ec : r.entity_changes)
        CHECK(ec.file == "src/a.c");
}

TEST_CASE("unsupported language is reported, not analyzed") {
    auto spec = load_named("scala-unsupported-language");
    TempDir tmp;
    generate(spec, tmp.path);
    OracleConfig cfg;
    cfg.supported_suffixes = {".c"};
    auto oracle = expected_results(spec, cfg);
    REQUIRE(oracle.unsupported_files == std::vector<std::string>{"src/Main.scala"});

    auto r = run_pipeline(pipeline_config(tmp.path.string(), cfg));
    bool flagged = false;
    for (const auto& n : r.notices)
        if (n.kind == "UnsupportedLanguage" && n.detail == "src/Main.scala")
            flagged = true;
    CHECK(flagged);
    for (const auto& ec : r.entity_changes)
        CHECK(ec.file == "src/a.c");
    CHECK(r.counts.at("entities") == std::vector<std::int64_t>{1});

    // the scala-only developer never enters the collaboration network
    int sven = -1;
    for (const auto& ident : r.identities.identities)
        if (ident.emails.count("sven@x.org"))
            sven = ident.id;
    REQUIRE(sven >= 0);
    for (const auto& [w, net] : r.networks) {
        CHECK(net.nodes.count(sven) == 0);
        for (const auto& [edge, weight] : net.directed_edges) {
            CHECK(edge.first != sven);
            CHECK(edge.second != sven);
        }
    }
    CHECK_FALSE(r.networks.at(0).nodes.empty());
}

TEST_CASE("alias identities fold into one developer") {
    auto spec = load_named("alias-identities");
    TempDir tmp;
    generate(spec, tmp.path);
    OracleConfig cfg;
    cfg.supported_suffixes = {".c"};
    auto oracle = expected_results(spec, cfg);
    CHECK(oracle.identity_count == 2);

    auto r = run_pipeline(pipeline_config(tmp.path.string(), cfg));
    CHECK(r.identities.identities.size() == 2);
    CHECK(oracle.identity_of_email.at("jane@x.org") ==
          oracle.identity_of_email.at("jdoe@corp.com"));
    CHECK(r.counts.at("developers") == std::vector<std::int64_t>{2});
}

TEST_CASE("oracle bundle serializes to json") {
    auto spec = load_named("three-linear-commits");
    OracleConfig cfg;
    cfg.supported_suffixes = {".c"};
    auto j = to_json(expected_results(spec, cfg));
    CHECK(j.at("windows").size() == 1);
    CHECK(j.at("identity_count") == 2);
    CHECK(j.at("counts").at("commits")[0] == 3);
    CHECK_FALSE(j.at("nested_edges").empty());
}
