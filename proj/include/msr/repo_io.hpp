#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "msr/error.hpp"
#include "msr/process.hpp"

namespace msr {

enum class ChangeKind { added, modified, deleted, renamed };

inline const char* to_string(ChangeKind k) {
    switch (k) {
    case ChangeKind::added: return "added";
    case ChangeKind::modified: return "modified";
    case ChangeKind::deleted: return "deleted";
    case ChangeKind::renamed: return "renamed";
    }
    return "?";
}

struct FileChange {
    std::string path;               // post-change path
    std::string old_path;           // set for renames
    std::int64_t lines_added = 0;
    std::int64_t lines_deleted = 0;
    ChangeKind change_kind = ChangeKind::modified;
};

struct CommitRecord {
    std::string hash;
    std::string author_name;
    std::string author_email;
    std::int64_t author_ts = 0;     // UTC epoch seconds
    std::string committer_name;
    std::string committer_email;
    std::int64_t committer_ts = 0;
    bool is_merge = false;
    std::vector<std::string> parents;
    std::string message_summary;
    std::vector<FileChange> file_changes;
};

struct BlameLine {
    int line_no = 0;                // 1-based final line number
    std::string origin_hash;
    std::string origin_author_name;
    std::string origin_author_email;
    std::int64_t origin_author_ts = 0;
};

namespace detail {

inline std::string git_binary() {
    if (const char* env = std::getenv("MSR_GIT_BIN"); env && *env)
        return env;
    return "git";
}

inline std::vector<std::string> git_env() {
    return {"LC_ALL=C", "GIT_PAGER=cat", "TZ=UTC", "GIT_TERMINAL_PROMPT=0"};
}

inline ProcessResult git(const std::string& repo_dir, std::vector<std::string> args,
                         const std::string& stdin_data = {}) {
    std::vector<std::string> argv{git_binary(), "--no-pager", "-C", repo_dir};
    argv.insert(argv.end(), args.begin(), args.end());
    return run_process(argv, git_env(), stdin_data);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    size_t start = 0;
    for (size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            parts.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return parts;
}

// "a/{old => new}/b.c", "old => new", or a plain path
inline std::string numstat_new_path(const std::string& p) {
    auto lb = p.find('{');
    auto arrow_in = p.find(" => ");
    if (lb != std::string::npos) {
        auto rb = p.find('}', lb);
        auto arr = p.find(" => ", lb);
        if (rb != std::string::npos && arr != std::string::npos && arr < rb) {
            std::string repl = p.substr(arr + 4, rb - (arr + 4));
            std::string out = p.substr(0, lb) + repl + p.substr(rb + 1);
            // "{old => }" collapses produce "//"
            auto dslash = out.find("//");
            while (dslash != std::string::npos) {
                out.erase(dslash, 1);
                dslash = out.find("//");
            }
            return out;
        }
    }
    if (arrow_in != std::string::npos)
        return p.substr(arrow_in + 4);
    return p;
}

} // namespace detail

class RepoHandle {
public:
    explicit RepoHandle(std::filesystem::path dir) : dir_(std::move(dir)) {}
    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
};

inline RepoHandle open_repo(const std::filesystem::path& path) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec))
        throw IoFailure("no such path: " + path.string());
    auto res = detail::git(path.string(), {"rev-parse", "--git-dir"});
    if (res.exit_code != 0)
        throw NotARepository("not a git repository: " + path.string());
    return RepoHandle(path);
}

inline bool repo_has_commits(const RepoHandle& repo) {
    return detail::git(repo.dir().string(), {"rev-parse", "--verify", "-q", "HEAD"}).exit_code == 0;
}

// One record per commit reachable from HEAD, topological-then-time order,
// all parents walked. Unit separator (0x1f) between fields, NUL before each
// record; names and subjects may contain anything printable.
inline std::vector<CommitRecord> extract_log(const RepoHandle& repo, bool include_merges,
                                             bool follow_renames = false) {
    if (!repo_has_commits(repo))
        return {};

    std::vector<std::string> args{
        "log", "--topo-order", "--numstat", "--raw", "--no-color",
        "--pretty=format:%x00%H%x1f%an%x1f%ae%x1f%at%x1f%cn%x1f%ce%x1f%ct%x1f%P%x1f%s%x1f"};
    args.push_back(follow_renames ? "-M" : "--no-renames");
    if (!include_merges)
        args.push_back("--no-merges");
    args.push_back("HEAD");

    auto res = detail::git(repo.dir().string(), args);
    if (res.exit_code != 0)
        throw CliInvocationFailure("git log failed: " + res.err);

    std::vector<CommitRecord> out;
    size_t pos = 0;
    const std::string& buf = res.out;
    while (pos < buf.size()) {
        if (buf[pos] != '\0')
            throw ParseFailure("expected NUL record separator in git log output");
        ++pos;
        size_t next = buf.find('\0', pos);
        std::string rec = buf.substr(pos, next == std::string::npos ? next : next - pos);
        pos = (next == std::string::npos) ? buf.size() : next;

        auto end_fields = rec.rfind('\x1f');
        if (end_fields == std::string::npos)
            throw ParseFailure("malformed git log record");
        auto fields = detail::split(rec.substr(0, end_fields), '\x1f');
        if (fields.size() != 9)
            throw ParseFailure("unexpected field count in git log record");

        CommitRecord c;
        c.hash = fields[0];
        c.author_name = fields[1];
        c.author_email = fields[2];
        c.author_ts = std::stoll(fields[3]);
        c.committer_name = fields[4];
        c.committer_email = fields[5];
        c.committer_ts = std::stoll(fields[6]);
        if (!fields[7].empty())
            c.parents = detail::split(fields[7], ' ');
        c.is_merge = c.parents.size() >= 2;
        c.message_summary = fields[8];

        // stat block: raw lines (":...") carry the status, numstat lines the counts
        std::map<std::string, ChangeKind> kinds;        // by new path
        std::map<std::string, std::string> old_paths;   // new path -> old path
        for (const auto& line : detail::split(rec.substr(end_fields + 1), '\n')) {
            if (line.empty())
                continue;
            if (line[0] == ':') {
                auto tab = line.find('\t');
                if (tab == std::string::npos)
                    throw ParseFailure("malformed raw line: " + line);
                auto meta = detail::split(line.substr(0, tab), ' ');
                char status = meta.back().empty() ? '?' : meta.back()[0];
                auto paths = detail::split(line.substr(tab + 1), '\t');
                ChangeKind kind = ChangeKind::modified;
                std::string new_path = paths[0], old_path;
                switch (status) {
                case 'A': kind = ChangeKind::added; break;
                case 'D': kind = ChangeKind::deleted; break;
                case 'R':
                    kind = ChangeKind::renamed;
                    old_path = paths[0];
                    new_path = paths.size() > 1 ? paths[1] : paths[0];
                    break;
                case 'C':
                    kind = ChangeKind::added;
                    new_path = paths.size() > 1 ? paths[1] : paths[0];
                    break;
                default: kind = ChangeKind::modified; break;
                }
                kinds[new_path] = kind;
                if (!old_path.empty())
                    old_paths[new_path] = old_path;
            } else {
                auto cols = detail::split(line, '\t');
                if (cols.size() < 3)
                    throw ParseFailure("malformed numstat line: " + line);
                FileChange fc;
                std::string raw_path = cols[2];
                for (size_t i = 3; i < cols.size(); ++i)
                    raw_path += "\t" + cols[i]; // rename numstat may tab-split
                fc.path = detail::numstat_new_path(raw_path);
                // binary files report "-"; sloc weights are undefined there
                fc.lines_added = (cols[0] == "-") ? 0 : std::stoll(cols[0]);
                fc.lines_deleted = (cols[1] == "-") ? 0 : std::stoll(cols[1]);
                if (auto it = kinds.find(fc.path); it != kinds.end())
                    fc.change_kind = it->second;
                if (auto it = old_paths.find(fc.path); it != old_paths.end())
                    fc.old_path = it->second;
                c.file_changes.push_back(std::move(fc));
            }
        }
        out.push_back(std::move(c));
    }
    return out;
}

inline bool path_exists_at(const RepoHandle& repo, const std::string& revision,
                           const std::string& path) {
    auto res = detail::git(repo.dir().string(), {"cat-file", "-e", revision + ":" + path});
    return res.exit_code == 0;
}

inline std::string file_at_revision(const RepoHandle& repo, const std::string& revision,
                                    const std::string& path) {
    auto res = detail::git(repo.dir().string(), {"show", revision + ":" + path});
    if (res.exit_code != 0)
        throw PathAbsentAtRevision(path + " absent at " + revision);
    return res.out;
}

inline std::vector<BlameLine> blame_file(const RepoHandle& repo, const std::string& revision,
                                         const std::string& path, bool detect_moves = false) {
    if (!path_exists_at(repo, revision, path))
        throw PathAbsentAtRevision(path + " absent at " + revision);

    std::vector<std::string> args{"blame", "--line-porcelain"};
    if (detect_moves)
        args.push_back("-M");
    args.push_back(revision);
    args.push_back("--");
    args.push_back(path);
    auto res = detail::git(repo.dir().string(), args);
    if (res.exit_code != 0)
        throw CliInvocationFailure("git blame failed: " + res.err);

    struct Origin {
        std::string name, email;
        std::int64_t ts = 0;
    };
    std::map<std::string, Origin> origins; // porcelain repeats headers only once per commit
    std::vector<BlameLine> out;

    BlameLine cur;
    bool in_entry = false;
    for (const auto& line : detail::split(res.out, '\n')) {
        if (line.empty())
            continue;
        if (!in_entry) {
            auto sp = detail::split(line, ' ');
            if (sp.size() < 3 || sp[0].size() != 40)
                throw ParseFailure("unexpected blame header: " + line);
            cur = BlameLine{};
            cur.origin_hash = sp[0];
            cur.line_no = std::stoi(sp[2]);
            in_entry = true;
        } else if (line[0] == '\t') {
            auto& o = origins[cur.origin_hash];
            cur.origin_author_name = o.name;
            cur.origin_author_email = o.email;
            cur.origin_author_ts = o.ts;
            out.push_back(cur);
            in_entry = false;
        } else if (line.rfind("author ", 0) == 0) {
            origins[cur.origin_hash].name = line.substr(7);
        } else if (line.rfind("author-mail ", 0) == 0) {
            std::string m = line.substr(12);
            if (m.size() >= 2 && m.front() == '<' && m.back() == '>')
                m = m.substr(1, m.size() - 2);
            origins[cur.origin_hash].email = m;
        } else if (line.rfind("author-time ", 0) == 0) {
            origins[cur.origin_hash].ts = std::stoll(line.substr(12));
        }
        // other porcelain keys are irrelevant here
    }
    return out;
}

} // namespace msr
