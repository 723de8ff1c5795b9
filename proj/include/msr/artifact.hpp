#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "msr/csv.hpp"
#include "msr/entities.hpp"
#include "msr/error.hpp"
#include "msr/filters.hpp"
#include "msr/identities.hpp"
#include "msr/network.hpp"
#include "msr/repo_io.hpp"
#include "msr/run_config.hpp"
#include "msr/windowing.hpp"

namespace msr {

struct RunResult {
    RunConfig config;
    std::vector<TimeWindow> windows;
    std::vector<CommitRecord> commits; // post-filter
    WindowAssignment assignment;
    IdentityTable identities;
    std::vector<ResolvedEntityChange> entity_changes;
    std::vector<BlameDiscovered> blame_discovered;
    std::vector<Notice> notices;
    std::map<int, DeveloperNetwork> networks;
    std::map<std::string, std::vector<std::int64_t>> counts;
};

namespace detail {

inline std::string raw_key(const std::string& name, const std::string& email,
                           const std::string& column, const std::string& table) {
    auto [nk, ek] = normalize_identity(name, email);
    return nk + '\x1f' + ek + '\x1f' + column + '\x1f' + table;
}

inline std::unordered_map<std::string, int> mapping_index(const IdentityTable& t) {
    std::unordered_map<std::string, int> idx;
    for (const auto& m : t.mapping)
        idx.emplace(raw_key(m.raw.name, m.raw.email, m.raw.source_column, m.raw.source_table),
                    m.id);
    return idx;
}

} // namespace detail

inline void compute_counts(RunResult& r) {
    size_t W = r.windows.size();
    r.counts["commits"].assign(W, 0);
    r.counts["files"].assign(W, 0);
    r.counts["entities"].assign(W, 0);
    r.counts["developers"].assign(W, 0);
    auto idx = detail::mapping_index(r.identities);
    std::vector<std::set<std::string>> files(W), entities(W);
    std::vector<std::set<int>> devs(W);
    for (const auto& [w, commits] : r.assignment.by_window) {
        if (w < 0 || static_cast<size_t>(w) >= W)
            continue;
        r.counts["commits"][w] = static_cast<std::int64_t>(commits.size());
        for (const auto& c : commits) {
            auto it = idx.find(detail::raw_key(c.author_name, c.author_email, "author", "git"));
            if (it != idx.end())
                devs[w].insert(it->second);
            for (const auto& fc : c.file_changes)
                files[w].insert(fc.path);
        }
    }
    for (const auto& ec : r.entity_changes)
        if (ec.window_index >= 0 && static_cast<size_t>(ec.window_index) < W)
            entities[ec.window_index].insert(ec.file + ":" + ec.entity_name);
    for (size_t w = 0; w < W; ++w) {
        r.counts["files"][w] = static_cast<std::int64_t>(files[w].size());
        r.counts["entities"][w] = static_cast<std::int64_t>(entities[w].size());
        r.counts["developers"][w] = static_cast<std::int64_t>(devs[w].size());
    }
}

// Full mining pipeline, end to end: log extraction, filtering, windowing,
// entity analysis, identity matching, network construction.
inline RunResult run_pipeline(const RunConfig& config) {
    RunResult r;
    r.config = config;

    RepoHandle repo = open_repo(config.repo_path);
    auto all_commits = extract_log(repo, config.include_merges, config.follow_renames);
    r.commits = apply_filters(all_commits, config.filter_profile);

    if (r.commits.empty())
        return r;

    if (config.explicit_boundaries)
        r.windows = explicit_windows(*config.explicit_boundaries, config.include_window_end);
    else
        r.windows = derive_windows(r.commits, config.window_months, config.timestamp_basis,
                                   config.include_window_end);
    r.assignment = assign_commits(r.commits, r.windows, config.timestamp_basis);

    // raws in temporal order of the basis timestamp, author before committer
    std::vector<CommitRecord> ordered = r.commits;
    std::stable_sort(ordered.begin(), ordered.end(), [&](const auto& a, const auto& b) {
        auto ta = basis_ts(a, config.timestamp_basis), tb = basis_ts(b, config.timestamp_basis);
        return ta != tb ? ta < tb : a.hash < b.hash;
    });
    std::vector<RawIdentity> raws;
    for (const auto& c : ordered) {
        raws.push_back({c.author_name, c.author_email, "author", "git"});
        raws.push_back({c.committer_name, c.committer_email, "committer", "git"});
    }
    r.identities = match_identities(raws, config.identity_scope);
    auto idx = detail::mapping_index(r.identities);

    // entity analysis per window; windows are independent work items
    auto analyze_window = [&](int w) {
        return entity_changes_for_window(repo, w, r.assignment.by_window.count(w)
                                                      ? r.assignment.by_window.at(w)
                                                      : std::vector<CommitRecord>{},
                                         config.filter_profile, config.tag_set,
                                         config.timestamp_basis);
    };
    std::map<int, EntityChangeResult> per_window;
    if (config.parallelism > 1 && r.windows.size() > 1) {
        std::vector<std::pair<int, std::future<EntityChangeResult>>> jobs;
        for (const auto& w : r.windows)
            jobs.emplace_back(w.index,
                              std::async(std::launch::async, analyze_window, w.index));
        for (auto& [w, fut] : jobs)
            per_window[w] = fut.get();
    } else {
        for (const auto& w : r.windows)
            per_window[w.index] = analyze_window(w.index);
    }

    for (auto& [w, res] : per_window) {
        for (auto& ec : res.changes) {
            ResolvedEntityChange rec;
            static_cast<EntityChange&>(rec) = ec;
            auto it = idx.find(detail::raw_key(ec.dev_name, ec.dev_email, "author", "git"));
            if (it == idx.end())
                throw UnmappedIdentity(ec.dev_name + " <" + ec.dev_email + ">");
            rec.developer_id = it->second;
            r.entity_changes.push_back(std::move(rec));
        }
        for (auto& bd : res.blame_discovered)
            r.blame_discovered.push_back(std::move(bd));
        for (auto& n : res.notices)
            r.notices.push_back(std::move(n));
    }

    // dedupe repeated notices (one file can be flagged once per commit)
    {
        std::set<std::pair<std::string, std::string>> seen;
        std::vector<Notice> unique;
        for (const auto& n : r.notices)
            if (seen.insert({n.kind, n.detail}).second)
                unique.push_back(n);
        r.notices = std::move(unique);
    }

    for (const auto& w : r.windows) {
        std::vector<ResolvedEntityChange> in_window;
        for (const auto& ec : r.entity_changes)
            if (ec.window_index == w.index)
                in_window.push_back(ec);
        r.networks[w.index] = build_network(in_window, config.weight_scheme,
                                            config.include_self_loops, w.index);
    }

    compute_counts(r);
    return r;
}

// Identity-resolved rewrite of the entity and commit tables; raw fields stay
// in place for audit.
inline std::vector<ResolvedEntityChange> apply_identities(
    const std::vector<EntityChange>& changes, const IdentityTable& table) {
    auto idx = detail::mapping_index(table);
    std::vector<ResolvedEntityChange> out;
    for (const auto& ec : changes) {
        auto it = idx.find(detail::raw_key(ec.dev_name, ec.dev_email, "author", "git"));
        if (it == idx.end())
            throw UnmappedIdentity(ec.dev_name + " <" + ec.dev_email + ">");
        ResolvedEntityChange rec;
        static_cast<EntityChange&>(rec) = ec;
        rec.developer_id = it->second;
        out.push_back(std::move(rec));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Artifact directory layout
// ---------------------------------------------------------------------------

inline nlohmann::json identity_table_json(const IdentityTable& t) {
    nlohmann::json j;
    j["identities"] = nlohmann::json::array();
    for (const auto& i : t.identities)
        j["identities"].push_back({{"id", i.id}, {"names", i.names}, {"emails", i.emails}});
    j["mapping"] = nlohmann::json::array();
    for (const auto& m : t.mapping)
        j["mapping"].push_back({{"name", m.raw.name},
                                {"email", m.raw.email},
                                {"column", m.raw.source_column},
                                {"table", m.raw.source_table},
                                {"id", m.id}});
    return j;
}

inline IdentityTable identity_table_from_json(const nlohmann::json& j) {
    IdentityTable t;
    for (const auto& ji : j.at("identities")) {
        Identity i;
        i.id = ji.at("id");
        for (const auto& n : ji.at("names"))
            i.names.insert(n.get<std::string>());
        for (const auto& e : ji.at("emails"))
            i.emails.insert(e.get<std::string>());
        t.identities.push_back(std::move(i));
    }
    for (const auto& jm : j.at("mapping")) {
        MappingEntry m;
        m.raw.name = jm.at("name");
        m.raw.email = jm.at("email");
        m.raw.source_column = jm.at("column");
        m.raw.source_table = jm.at("table");
        m.id = jm.at("id");
        t.mapping.push_back(std::move(m));
    }
    return t;
}

inline std::string config_snapshot_yaml(const RunConfig& c) {
    std::string y;
    auto add = [&](const std::string& k, const std::string& v) { y += k + ": " + v + "\n"; };
    add("profile", c.profile_name);
    add("repo_path", c.repo_path);
    add("window_months", std::to_string(c.window_months));
    add("timestamp_basis", to_string(c.timestamp_basis));
    add("include_window_end", c.include_window_end ? "true" : "false");
    if (c.explicit_boundaries) {
        std::string b = "[";
        for (size_t i = 0; i < c.explicit_boundaries->size(); ++i)
            b += (i ? ", " : "") + std::to_string((*c.explicit_boundaries)[i]);
        add("explicit_boundaries", b + "]");
    }
    add("filter_profile", c.filter_profile.name.empty() ? "custom" : c.filter_profile.name);
    {
        std::string s = "[";
        for (size_t i = 0; i < c.filter_profile.suffix_allowlist.size(); ++i)
            s += (i ? ", " : "") + c.filter_profile.suffix_allowlist[i];
        add("suffix_allowlist", s + "]");
        std::string g = "[";
        for (size_t i = 0; i < c.filter_profile.path_exclude_globs.size(); ++i)
            g += (i ? ", " : "") + ("\"" + c.filter_profile.path_exclude_globs[i] + "\"");
        add("path_exclude_globs", g + "]");
    }
    add("tag_set", c.tag_set.mode == TagSet::Mode::default_all_languages ? "default_all_languages"
                                                                         : "explicit");
    if (c.tag_set.mode == TagSet::Mode::explicit_kinds) {
        y += "tag_kinds:\n";
        for (const auto& [lang, kinds] : c.tag_set.per_language_kinds) {
            std::string k = "[";
            for (size_t i = 0; i < kinds.size(); ++i)
                k += (i ? ", " : "") + kinds[i];
            y += "  " + lang + ": " + k + "]\n";
        }
    }
    add("identity_scope", to_string(c.identity_scope));
    add("weight_scheme", to_string(c.weight_scheme));
    add("include_merges", c.include_merges ? "true" : "false");
    add("include_self_loops", c.include_self_loops ? "true" : "false");
    add("follow_renames", c.follow_renames ? "true" : "false");
    add("parallelism", std::to_string(c.parallelism));
    return y;
}

inline void save_artifact(const RunResult& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::filesystem::create_directories(dir / "networks");

    std::ofstream(dir / "config.yaml") << config_snapshot_yaml(r.config);

    {
        nlohmann::json plan = nlohmann::json::array();
        for (const auto& w : r.windows)
            plan.push_back({{"index", w.index}, {"start_ts", w.start_ts}, {"end_ts", w.end_ts}});
        std::ofstream(dir / "window_plan.json") << plan.dump(2) << "\n";
    }

    {
        // window index per commit hash
        std::map<std::string, int> window_of;
        for (const auto& [w, commits] : r.assignment.by_window)
            for (const auto& c : commits)
                window_of[c.hash] = w;
        std::ofstream out(dir / "commits.csv");
        out << "hash,author_name,author_email,author_ts,committer_name,committer_email,"
               "committer_ts,is_merge,message,window_index\n";
        for (const auto& c : r.commits) {
            int w = window_of.count(c.hash) ? window_of.at(c.hash) : -1;
            out << csv_row({c.hash, c.author_name, c.author_email, std::to_string(c.author_ts),
                            c.committer_name, c.committer_email, std::to_string(c.committer_ts),
                            c.is_merge ? "1" : "0", c.message_summary, std::to_string(w)});
        }
        std::ofstream fout(dir / "files.csv");
        fout << "commit,path,old_path,lines_added,lines_deleted,change_kind\n";
        for (const auto& c : r.commits)
            for (const auto& fc : c.file_changes)
                fout << csv_row({c.hash, fc.path, fc.old_path, std::to_string(fc.lines_added),
                                 std::to_string(fc.lines_deleted), to_string(fc.change_kind)});
    }

    {
        std::ofstream out(dir / "entity_changes.csv");
        out << "window_index,file,entity_name,entity_kind,dev_name,dev_email,commit,sloc,ts\n";
        for (const auto& ec : r.entity_changes)
            out << csv_row({std::to_string(ec.window_index), ec.file, ec.entity_name,
                            ec.entity_kind, ec.dev_name, ec.dev_email, ec.commit_hash,
                            std::to_string(ec.sloc), std::to_string(ec.ts)});
    }

    std::ofstream(dir / "identities.json") << identity_table_json(r.identities).dump(2) << "\n";

    {
        std::ofstream nodes(dir / "networks" / "nodes.csv");
        nodes << "window_index,node_id\n";
        for (const auto& [w, net] : r.networks) {
            for (int id : net.nodes)
                nodes << csv_row({std::to_string(w), std::to_string(id)});
            std::ofstream out(dir / "networks" /
                              ("window_" + std::to_string(w) + "_" +
                               std::string(to_string(net.scheme)) + ".csv"));
            out << "window_index,from_id,to_id,weight,scheme\n";
            for (const auto& [edge, weight] : net.directed_edges)
                out << csv_row({std::to_string(w), std::to_string(edge.first),
                                std::to_string(edge.second), std::to_string(weight),
                                to_string(net.scheme)});
        }
    }

    {
        std::ofstream out(dir / "blame_discovered.csv");
        out << "window_index,file,entity_name,origin_hash,origin_author_name,"
               "origin_author_email,surviving_lines,origin_ts\n";
        for (const auto& bd : r.blame_discovered)
            out << csv_row({std::to_string(bd.window_index), bd.file, bd.entity_name,
                            bd.origin_hash, bd.origin_author_name, bd.origin_author_email,
                            std::to_string(bd.surviving_lines), std::to_string(bd.origin_ts)});
    }

    {
        std::ofstream out(dir / "notices.log");
        for (const auto& n : r.notices)
            out << n.kind << "\t" << n.detail << "\n";
    }

    std::ofstream(dir / "counts.json") << nlohmann::json(r.counts).dump(2) << "\n";
}

// The slice of an artifact needed for comparison.
struct LoadedArtifact {
    std::vector<TimeWindow> windows;
    std::map<std::string, std::vector<std::int64_t>> counts;
    IdentityTable identities;
    std::set<std::string> commit_hashes;
    std::set<std::string> file_names;
    std::set<std::string> entity_names; // file:entity
    std::map<int, DeveloperNetwork> networks;
    std::string config_snapshot;
    std::vector<std::string> notices;
};

inline LoadedArtifact load_artifact(const std::filesystem::path& dir) {
    LoadedArtifact a;
    {
        std::ifstream in(dir / "window_plan.json");
        if (!in)
            throw IoFailure("not a run artifact (missing window_plan.json): " + dir.string());
        nlohmann::json plan = nlohmann::json::parse(in);
        for (const auto& jw : plan)
            a.windows.push_back({jw.at("index"), jw.at("start_ts"), jw.at("end_ts"), false});
    }
    {
        std::ifstream in(dir / "counts.json");
        nlohmann::json j = nlohmann::json::parse(in);
        for (const auto& [k, v] : j.items())
            a.counts[k] = v.get<std::vector<std::int64_t>>();
    }
    {
        std::ifstream in(dir / "identities.json");
        a.identities = identity_table_from_json(nlohmann::json::parse(in));
    }
    for (const auto& row : csv_read_file((dir / "commits.csv").string()))
        a.commit_hashes.insert(row.at(0));
    for (const auto& row : csv_read_file((dir / "files.csv").string()))
        a.file_names.insert(row.at(1));
    for (const auto& row : csv_read_file((dir / "entity_changes.csv").string()))
        a.entity_names.insert(row.at(1) + ":" + row.at(2));
    {
        std::ifstream in(dir / "config.yaml");
        std::ostringstream ss;
        ss << in.rdbuf();
        a.config_snapshot = ss.str();
    }
    {
        std::ifstream in(dir / "notices.log");
        std::string line;
        while (std::getline(in, line))
            if (!line.empty())
                a.notices.push_back(line);
    }
    for (const auto& row : csv_read_file((dir / "networks" / "nodes.csv").string())) {
        int w = std::stoi(row.at(0));
        a.networks[w].window_index = w;
        a.networks[w].nodes.insert(std::stoi(row.at(1)));
    }
    for (const auto& entry : std::filesystem::directory_iterator(dir / "networks")) {
        auto name = entry.path().filename().string();
        if (name.rfind("window_", 0) != 0)
            continue;
        for (const auto& row : csv_read_file(entry.path().string())) {
            int w = std::stoi(row.at(0));
            a.networks[w].window_index = w;
            a.networks[w].scheme = row.at(4) == "flat_sum" ? WeightScheme::flat_sum
                                                           : WeightScheme::nested_pairwise;
            a.networks[w].directed_edges[{std::stoi(row.at(1)), std::stoi(row.at(2))}] +=
                std::stod(row.at(3));
        }
    }
    return a;
}

inline LoadedArtifact to_loaded(const RunResult& r) {
    LoadedArtifact a;
    a.windows = r.windows;
    a.counts = r.counts;
    a.identities = r.identities;
    for (const auto& c : r.commits) {
        a.commit_hashes.insert(c.hash);
        for (const auto& fc : c.file_changes)
            a.file_names.insert(fc.path);
    }
    for (const auto& ec : r.entity_changes)
        a.entity_names.insert(ec.file + ":" + ec.entity_name);
    a.networks = r.networks;
    a.config_snapshot = config_snapshot_yaml(r.config);
    for (const auto& n : r.notices)
        a.notices.push_back(n.kind + "\t" + n.detail);
    return a;
}

} // namespace msr
