#pragma once

#include <algorithm>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <limits>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "msr/error.hpp"
#include "msr/process.hpp"

// Scripted mock repositories with fully known histories, plus a brute-force
// oracle computed by literal evaluation of the analysis rules. The oracle
// deliberately shares no code with the pipeline modules.

namespace msr::mockgen {

struct Person {
    std::string name;
    std::string email;
};

struct ScenarioFile {
    std::string path;
    std::string content; // full new content
    bool remove = false;
};

struct ScenarioCommit {
    Person author;
    Person committer;
    std::int64_t author_ts = 0;
    std::int64_t committer_ts = 0;
    std::string message;
    std::string branch = "main";
    std::string merge_of; // branch merged into `branch` with --no-ff
    std::vector<ScenarioFile> files;
};

struct DeclaredEntity {
    std::string name;
    std::string kind;
    int start_line = 1;
    int end_line = -1; // -1 = end of file at the revision in question
};

struct ScenarioSpec {
    std::string name;
    std::vector<ScenarioCommit> commits;
    std::map<std::string, std::vector<DeclaredEntity>> declared_entities;
};

inline ScenarioSpec load_scenario(const nlohmann::json& j) {
    ScenarioSpec spec;
    spec.name = j.value("name", "");
    std::int64_t prev_ts = std::numeric_limits<std::int64_t>::min();
    for (const auto& jc : j.at("commits")) {
        ScenarioCommit c;
        c.author = {jc.at("author").at("name"), jc.at("author").at("email")};
        if (jc.contains("committer"))
            c.committer = {jc.at("committer").at("name"), jc.at("committer").at("email")};
        else
            c.committer = c.author;
        c.author_ts = jc.at("author_ts").get<std::int64_t>();
        c.committer_ts = jc.value("committer_ts", c.author_ts);
        c.message = jc.value("message", "update");
        c.branch = jc.value("branch", "main");
        c.merge_of = jc.value("merge_of", "");
        for (const auto& jf : jc.value("files", nlohmann::json::array())) {
            ScenarioFile f;
            f.path = jf.at("path");
            f.content = jf.value("content", "");
            f.remove = jf.value("delete", false);
            c.files.push_back(std::move(f));
        }
        if (c.committer_ts < prev_ts)
            throw ConfigError("scenario timestamps must be non-decreasing");
        prev_ts = c.committer_ts;
        spec.commits.push_back(std::move(c));
    }
    if (j.contains("declared_entities"))
        for (const auto& [path, ents] : j.at("declared_entities").items())
            for (const auto& je : ents) {
                DeclaredEntity e;
                e.name = je.at("name");
                e.kind = je.value("kind", "function");
                e.start_line = je.value("start_line", 1);
                e.end_line = je.value("end_line", -1);
                spec.declared_entities[path].push_back(e);
            }
    return spec;
}

inline ScenarioSpec load_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw IoFailure("cannot read scenario: " + path.string());
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded())
        throw ConfigError("scenario is not valid JSON: " + path.string());
    return load_scenario(j);
}

namespace detail {

inline void run_git(const std::filesystem::path& dir, std::vector<std::string> args,
                    const std::vector<std::string>& env = {}) {
    std::vector<std::string> argv{"git", "-C", dir.string()};
    argv.insert(argv.end(), args.begin(), args.end());
    std::vector<std::string> full_env{"LC_ALL=C", "TZ=UTC", "GIT_PAGER=cat"};
    full_env.insert(full_env.end(), env.begin(), env.end());
    auto res = run_process(argv, full_env);
    if (res.exit_code != 0)
        throw GitInvocationFailure("git " + args.front() + " failed: " + res.err);
}

inline std::vector<std::string> commit_env(const ScenarioCommit& c) {
    return {
        "GIT_AUTHOR_NAME=" + c.author.name,
        "GIT_AUTHOR_EMAIL=" + c.author.email,
        "GIT_AUTHOR_DATE=@" + std::to_string(c.author_ts) + " +0000",
        "GIT_COMMITTER_NAME=" + c.committer.name,
        "GIT_COMMITTER_EMAIL=" + c.committer.email,
        "GIT_COMMITTER_DATE=@" + std::to_string(c.committer_ts) + " +0000",
    };
}

} // namespace detail

inline void generate(const ScenarioSpec& spec, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (std::filesystem::exists(out_dir) && !std::filesystem::is_empty(out_dir))
        throw IoFailure("output directory not empty: " + out_dir.string());

    detail::run_git(out_dir, {"init", "-q", "-b", "main"});
    detail::run_git(out_dir, {"config", "user.name", "mockgen"});
    detail::run_git(out_dir, {"config", "user.email", "mockgen@localhost"});
    detail::run_git(out_dir, {"config", "commit.gpgsign", "false"});

    std::set<std::string> branches{"main"};
    std::string current = "main";
    bool any_commit = false;
    for (const auto& c : spec.commits) {
        if (c.branch != current) {
            if (branches.count(c.branch)) {
                detail::run_git(out_dir, {"checkout", "-q", c.branch});
            } else {
                if (!any_commit)
                    throw GitInvocationFailure("cannot branch before the first commit");
                detail::run_git(out_dir, {"checkout", "-q", "-b", c.branch});
                branches.insert(c.branch);
            }
            current = c.branch;
        }
        if (!c.merge_of.empty()) {
            detail::run_git(out_dir,
                            {"merge", "-q", "--no-ff", "--no-edit", "-m", c.message, c.merge_of},
                            detail::commit_env(c));
            any_commit = true;
            continue;
        }
        for (const auto& f : c.files) {
            auto full = out_dir / f.path;
            if (f.remove) {
                std::filesystem::remove(full, ec);
                continue;
            }
            std::filesystem::create_directories(full.parent_path(), ec);
            std::ofstream out(full, std::ios::binary);
            out.write(f.content.data(), static_cast<std::streamsize>(f.content.size()));
        }
        detail::run_git(out_dir, {"add", "-A"});
        detail::run_git(out_dir, {"commit", "-q", "--allow-empty", "-m", c.message},
                        detail::commit_env(c));
        any_commit = true;
    }
    if (current != "main")
        detail::run_git(out_dir, {"checkout", "-q", "main"});
}

// ---------------------------------------------------------------------------
// Oracle side: literal brute-force evaluation of the rules, independent of
// the pipeline implementations.
// ---------------------------------------------------------------------------

struct OracleConfig {
    int window_months = 3;
    bool basis_author = true;
    bool include_window_end = false;
    bool include_merges = true;
    bool include_self_loops = true;
    std::vector<std::string> suffix_allowlist; // lowercase, leading dot
    std::vector<std::string> path_exclude_prefixes; // literal prefixes, oracle-side stand-in
    bool identity_cross_scope = true;
    std::set<std::string> supported_suffixes; // entity analysis; empty = all declared
};

struct OracleWindow {
    std::int64_t start_ts = 0;
    std::int64_t end_ts = 0;
};

struct OracleEntityChange {
    int window_index = 0;
    std::string file;
    std::string entity;
    std::string dev_email;
    int commit_index = 0;
    std::int64_t sloc = 0;
    std::int64_t ts = 0;
};

struct OracleEdge {
    int from = 0;
    int to = 0;
    double weight = 0;
};

struct OracleBundle {
    std::vector<OracleWindow> windows;
    std::map<std::string, std::vector<std::int64_t>> counts; // commits/files/entities/developers
    int identity_count = 0;
    std::map<std::string, int> identity_of_email; // normalized email -> id
    std::vector<OracleEntityChange> entity_changes;
    std::map<int, std::vector<OracleEdge>> nested_edges; // per window
    std::map<int, std::vector<OracleEdge>> flat_edges;
    std::vector<std::string> unsupported_files;
};

namespace oracle {

// independent calendar arithmetic via libc civil-time conversion
inline std::int64_t add_months(std::int64_t ts, int months) {
    time_t t = static_cast<time_t>(ts);
    std::tm tm{};
    gmtime_r(&t, &tm);
    int total = tm.tm_year * 12 + tm.tm_mon + months;
    std::tm shifted = tm;
    shifted.tm_year = total / 12;
    shifted.tm_mon = total % 12;
    // clamp day-of-month to the target month's length
    static const int mdays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    int dim = mdays[shifted.tm_mon];
    int year = shifted.tm_year + 1900;
    if (shifted.tm_mon == 1 && (year % 4 == 0 && (year % 100 != 0 || year % 400 == 0)))
        dim = 29;
    if (shifted.tm_mday > dim)
        shifted.tm_mday = dim;
    return static_cast<std::int64_t>(timegm(&shifted));
}

inline std::string lower(std::string s) {
    for (auto& c : s)
        if (c >= 'A' && c <= 'Z')
            c = static_cast<char>(c - 'A' + 'a');
    return s;
}

inline std::string norm_email(const std::string& e) {
    std::string s = e;
    if (s.size() >= 2 && s.front() == '<' && s.back() == '>')
        s = s.substr(1, s.size() - 2);
    return lower(s);
}

inline std::string norm_name(const std::string& n) {
    std::string out;
    bool sp = false;
    for (unsigned char c : n) {
        if (c == ' ' || c == '\t' || c == '\n') {
            sp = !out.empty();
            continue;
        }
        if (sp) {
            out += ' ';
            sp = false;
        }
        out += static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
    }
    return out;
}

inline bool suffix_ok(const std::string& path, const std::vector<std::string>& allow) {
    if (allow.empty())
        return true;
    auto dot = path.find_last_of('.');
    auto slash = path.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return false;
    std::string ext = lower(path.substr(dot));
    for (const auto& a : allow)
        if (a == ext)
            return true;
    return false;
}

inline bool excluded(const std::string& path, const std::vector<std::string>& prefixes) {
    for (const auto& p : prefixes)
        if (path.rfind(p, 0) == 0)
            return true;
    return false;
}

inline std::vector<std::string> split_lines(const std::string& s) {
    std::vector<std::string> lines;
    size_t start = 0;
    for (size_t i = 0; i < s.size(); ++i)
        if (s[i] == '\n') {
            lines.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    if (start < s.size())
        lines.push_back(s.substr(start));
    return lines;
}

// added line numbers in the new file, via LCS on lines
inline std::vector<int> added_lines(const std::vector<std::string>& olds,
                                    const std::vector<std::string>& news) {
    size_t n = olds.size(), m = news.size();
    std::vector<std::vector<int>> lcs(n + 1, std::vector<int>(m + 1, 0));
    for (size_t i = n; i-- > 0;)
        for (size_t j = m; j-- > 0;)
            lcs[i][j] = olds[i] == news[j] ? lcs[i + 1][j + 1] + 1
                                           : std::max(lcs[i + 1][j], lcs[i][j + 1]);
    std::vector<int> added;
    size_t i = 0, j = 0;
    while (i < n && j < m) {
        if (olds[i] == news[j]) {
            ++i;
            ++j;
        } else if (lcs[i + 1][j] >= lcs[i][j + 1]) {
            ++i;
        } else {
            added.push_back(static_cast<int>(j + 1));
            ++j;
        }
    }
    while (j < m)
        added.push_back(static_cast<int>(++j));
    return added;
}

} // namespace oracle

inline OracleBundle expected_results(const ScenarioSpec& spec, const OracleConfig& cfg) {
    if (spec.commits.size() > 20)
        throw SpecTooLarge("oracle accepts at most 20 commits");

    OracleBundle out;

    // replay file contents to know every revision, and synthesize per-commit
    // surviving file changes under the filter config
    struct Change {
        std::string path;
        std::vector<int> added; // line numbers in the new content
    };
    struct Commit {
        int index;
        std::int64_t ts;
        std::string author_email;
        std::string author_name;
        std::string committer_email;
        std::string committer_name;
        bool is_merge;
        std::vector<Change> changes;               // surviving, post-filter
        std::map<std::string, std::string> snapshot; // path -> content after commit
    };

    std::vector<Commit> commits;
    std::map<std::string, std::map<std::string, std::string>> branch_state; // branch -> files
    branch_state["main"] = {};
    std::string current = "main";
    for (size_t idx = 0; idx < spec.commits.size(); ++idx) {
        const auto& sc = spec.commits[idx];
        if (!branch_state.count(sc.branch))
            branch_state[sc.branch] = branch_state[current];
        current = sc.branch;
        auto& files = branch_state[current];

        Commit c;
        c.index = static_cast<int>(idx);
        c.ts = cfg.basis_author ? sc.author_ts : sc.committer_ts;
        c.author_email = oracle::norm_email(sc.author.email);
        c.author_name = oracle::norm_name(sc.author.name);
        c.committer_email = oracle::norm_email(sc.committer.email);
        c.committer_name = oracle::norm_name(sc.committer.name);
        c.is_merge = !sc.merge_of.empty();

        if (c.is_merge) {
            // merge state of the named branch; merge commits carry no diff
            for (const auto& [p, content] : branch_state[sc.merge_of])
                files[p] = content;
        } else {
            for (const auto& f : sc.files) {
                if (!oracle::suffix_ok(f.path, cfg.suffix_allowlist) ||
                    oracle::excluded(f.path, cfg.path_exclude_prefixes)) {
                    if (f.remove)
                        files.erase(f.path);
                    else
                        files[f.path] = f.content;
                    continue;
                }
                if (f.remove) {
                    files.erase(f.path);
                    continue;
                }
                auto old_it = files.find(f.path);
                std::vector<std::string> olds =
                    old_it == files.end() ? std::vector<std::string>{}
                                          : oracle::split_lines(old_it->second);
                auto news = oracle::split_lines(f.content);
                Change ch;
                ch.path = f.path;
                ch.added = oracle::added_lines(olds, news);
                if (!ch.added.empty() || old_it == files.end())
                    c.changes.push_back(std::move(ch));
                files[f.path] = f.content;
            }
        }
        c.snapshot = files;
        if (c.is_merge && !cfg.include_merges)
            continue;
        if (!c.is_merge && c.changes.empty() &&
            (!cfg.suffix_allowlist.empty() || !cfg.path_exclude_prefixes.empty()))
            continue; // fully filtered commit drops out
        commits.push_back(std::move(c));
    }

    if (commits.empty())
        return out;

    // --- windows: literal rule ---
    std::vector<std::int64_t> ts;
    for (const auto& c : commits)
        ts.push_back(c.ts);
    std::sort(ts.begin(), ts.end());
    {
        size_t i = 0;
        std::int64_t start = ts[0];
        while (i < ts.size()) {
            std::int64_t end = oracle::add_months(start, cfg.window_months);
            bool member = cfg.include_window_end ? (ts[i] >= start && ts[i] <= end)
                                                 : (ts[i] >= start && ts[i] < end);
            if (!member) {
                start = ts[i];
                continue;
            }
            while (i < ts.size() &&
                   (cfg.include_window_end ? ts[i] <= end : ts[i] < end))
                ++i;
            out.windows.push_back({start, end});
            start = end;
        }
    }

    auto window_of = [&](std::int64_t t) -> int {
        for (size_t w = 0; w < out.windows.size(); ++w) {
            bool in = cfg.include_window_end
                          ? (t >= out.windows[w].start_ts && t <= out.windows[w].end_ts)
                          : (t >= out.windows[w].start_ts && t < out.windows[w].end_ts);
            if (in)
                return static_cast<int>(w);
        }
        return -1;
    };

    // --- identities: literal footnote cascade ---
    struct Ident {
        std::set<std::string> names, emails;
    };
    std::vector<Ident> idents;
    auto insert_raw = [&](const std::string& nk, const std::string& ek) -> int {
        for (size_t i = 0; i < idents.size(); ++i)
            if (!nk.empty() && !ek.empty() && idents[i].names.count(nk) &&
                idents[i].emails.count(ek))
                return static_cast<int>(i);
        for (size_t i = 0; i < idents.size(); ++i)
            if (!ek.empty() && idents[i].emails.count(ek)) {
                if (!nk.empty())
                    idents[i].names.insert(nk);
                return static_cast<int>(i);
            }
        for (size_t i = 0; i < idents.size(); ++i)
            if (!nk.empty() && idents[i].names.count(nk)) {
                if (!ek.empty())
                    idents[i].emails.insert(ek);
                return static_cast<int>(i);
            }
        Ident fresh;
        if (!nk.empty())
            fresh.names.insert(nk);
        if (!ek.empty())
            fresh.emails.insert(ek);
        idents.push_back(fresh);
        return static_cast<int>(idents.size() - 1);
    };
    for (const auto& c : commits) {
        int id = insert_raw(c.author_name, c.author_email);
        out.identity_of_email.emplace(c.author_email, id);
        if (cfg.identity_cross_scope) {
            int cid = insert_raw(c.committer_name, c.committer_email);
            out.identity_of_email.emplace(c.committer_email, cid);
        }
    }
    out.identity_count = static_cast<int>(idents.size());
    if (!cfg.identity_cross_scope) {
        // count committer partition separately
        std::vector<Ident> committer_idents;
        std::swap(idents, committer_idents);
        for (const auto& c : commits)
            insert_raw(c.committer_name, c.committer_email);
        out.identity_count += static_cast<int>(idents.size());
        std::swap(idents, committer_idents);
    }

    // --- entity changes from declared entities ---
    for (const auto& c : commits) {
        int w = window_of(c.ts);
        if (w < 0)
            continue;
        for (const auto& ch : c.changes) {
            auto de = spec.declared_entities.find(ch.path);
            if (de == spec.declared_entities.end())
                continue;
            if (!cfg.supported_suffixes.empty()) {
                auto dot = ch.path.find_last_of('.');
                std::string ext = dot == std::string::npos ? "" : oracle::lower(ch.path.substr(dot));
                if (!cfg.supported_suffixes.count(ext)) {
                    out.unsupported_files.push_back(ch.path);
                    continue;
                }
            }
            int file_lines =
                static_cast<int>(oracle::split_lines(c.snapshot.at(ch.path)).size());
            for (const auto& ent : de->second) {
                int lo = ent.start_line;
                int hi = ent.end_line < 0 ? file_lines : std::min(ent.end_line, file_lines);
                std::int64_t sloc = 0;
                for (int line : ch.added)
                    if (line >= lo && line <= hi)
                        ++sloc;
                if (sloc >= 1)
                    out.entity_changes.push_back(
                        {w, ch.path, ent.name, c.author_email, c.index, sloc, c.ts});
            }
        }
    }

    // --- per-window counts ---
    size_t W = out.windows.size();
    out.counts["commits"].assign(W, 0);
    out.counts["files"].assign(W, 0);
    out.counts["entities"].assign(W, 0);
    out.counts["developers"].assign(W, 0);
    std::vector<std::set<std::string>> files_w(W), entities_w(W);
    std::vector<std::set<int>> devs_w(W);
    for (const auto& c : commits) {
        int w = window_of(c.ts);
        if (w < 0)
            continue;
        out.counts["commits"][w]++;
        devs_w[w].insert(out.identity_of_email.at(c.author_email));
        for (const auto& ch : c.changes)
            files_w[w].insert(ch.path);
    }
    for (const auto& ec : out.entity_changes)
        entities_w[ec.window_index].insert(ec.file + ":" + ec.entity);
    for (size_t w = 0; w < W; ++w) {
        out.counts["files"][w] = static_cast<std::int64_t>(files_w[w].size());
        out.counts["entities"][w] = static_cast<std::int64_t>(entities_w[w].size());
        out.counts["developers"][w] = static_cast<std::int64_t>(devs_w[w].size());
    }

    // --- edge weights: literal evaluation of the two sums ---
    for (size_t w = 0; w < W; ++w) {
        // per (file, entity): ordered contribution list
        std::map<std::pair<std::string, std::string>,
                 std::vector<const OracleEntityChange*>> per_entity;
        for (const auto& ec : out.entity_changes)
            if (ec.window_index == static_cast<int>(w))
                per_entity[{ec.file, ec.entity}].push_back(&ec);
        for (auto& [k, v] : per_entity)
            std::sort(v.begin(), v.end(), [](auto* a, auto* b) {
                return a->ts != b->ts ? a->ts < b->ts : a->commit_index < b->commit_index;
            });

        std::set<int> devs;
        for (const auto& [k, v] : per_entity)
            for (auto* e : v)
                devs.insert(out.identity_of_email.at(e->dev_email));

        std::map<std::pair<int, int>, double> nested, flat;
        for (int d2 : devs)
            for (int d1 : devs) {
                if (d2 == d1 && !cfg.include_self_loops)
                    continue;
                double wn = 0, wf = 0;
                for (const auto& [k, seq] : per_entity) {
                    for (size_t i = 0; i < seq.size(); ++i) {
                        if (out.identity_of_email.at(seq[i]->dev_email) != d2)
                            continue;
                        double prior_sum = 0;
                        int prior_cnt = 0;
                        for (size_t jj = 0; jj < i; ++jj) {
                            if (out.identity_of_email.at(seq[jj]->dev_email) != d1)
                                continue;
                            wn += static_cast<double>(seq[i]->sloc + seq[jj]->sloc);
                            prior_sum += static_cast<double>(seq[jj]->sloc);
                            ++prior_cnt;
                        }
                        if (prior_cnt > 0)
                            wf += static_cast<double>(seq[i]->sloc) + prior_sum;
                    }
                }
                if (wn > 0)
                    nested[{d2, d1}] = wn;
                if (wf > 0)
                    flat[{d2, d1}] = wf;
            }
        for (const auto& [e, weight] : nested)
            out.nested_edges[static_cast<int>(w)].push_back({e.first, e.second, weight});
        for (const auto& [e, weight] : flat)
            out.flat_edges[static_cast<int>(w)].push_back({e.first, e.second, weight});
    }

    return out;
}

inline nlohmann::json to_json(const OracleBundle& b) {
    nlohmann::json j;
    j["windows"] = nlohmann::json::array();
    for (const auto& w : b.windows)
        j["windows"].push_back({{"start_ts", w.start_ts}, {"end_ts", w.end_ts}});
    j["counts"] = b.counts;
    j["identity_count"] = b.identity_count;
    j["entity_changes"] = nlohmann::json::array();
    for (const auto& ec : b.entity_changes)
        j["entity_changes"].push_back({{"window", ec.window_index},
                                       {"file", ec.file},
                                       {"entity", ec.entity},
                                       {"dev_email", ec.dev_email},
                                       {"commit_index", ec.commit_index},
                                       {"sloc", ec.sloc},
                                       {"ts", ec.ts}});
    auto edges_json = [](const std::map<int, std::vector<OracleEdge>>& m) {
        nlohmann::json out = nlohmann::json::object();
        for (const auto& [w, edges] : m) {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& e : edges)
                arr.push_back({{"from", e.from}, {"to", e.to}, {"weight", e.weight}});
            out[std::to_string(w)] = arr;
        }
        return out;
    };
    j["nested_edges"] = edges_json(b.nested_edges);
    j["flat_edges"] = edges_json(b.flat_edges);
    j["unsupported_files"] = b.unsupported_files;
    return j;
}

} // namespace msr::mockgen
