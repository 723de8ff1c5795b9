#pragma once

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>
#include <unistd.h>

#include "msr/entities_types.hpp"
#include "msr/error.hpp"
#include "msr/filters.hpp"
#include "msr/process.hpp"
#include "msr/repo_io.hpp"
#include "msr/windowing.hpp"

namespace msr {

namespace detail {

inline std::string ctags_binary() {
    if (const char* env = std::getenv("MSR_CTAGS_BIN"); env && *env)
        return env;
    return "ctags";
}

inline int count_lines(const std::string& content) {
    if (content.empty())
        return 0;
    int n = static_cast<int>(std::count(content.begin(), content.end(), '\n'));
    if (content.back() != '\n')
        ++n;
    return n;
}

struct TempTagFile {
    std::filesystem::path dir;
    std::filesystem::path file;

    TempTagFile(const std::string& content, const std::string& filename_hint) {
        auto base = std::filesystem::temp_directory_path() /
                    ("msr-tags-" + std::to_string(::getpid()) + "-" +
                     std::to_string(counter()++));
        std::filesystem::create_directories(base);
        dir = base;
        std::string leaf = std::filesystem::path(filename_hint).filename().string();
        if (leaf.empty())
            leaf = "input";
        file = base / leaf;
        std::ofstream out(file, std::ios::binary);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
    }
    ~TempTagFile() {
        std::error_code ec;
        std::filesystem::remove_all(dir, ec);
    }
    static unsigned long& counter() {
        static unsigned long c = 0;
        return c;
    }
};

} // namespace detail

struct RawTag {
    std::string name;
    std::string kind;
    int start_line = 0;
    std::optional<int> end_line;
    std::string language;
};

// end_line = next tag's start - 1, or the file's last line. Duplicate start
// lines keep the first tag and report the rest.
inline std::vector<EntityDef> resolve_spans(std::vector<RawTag> raw_tags, int file_lines,
                                            const std::string& file,
                                            std::vector<Notice>* notices = nullptr) {
    std::stable_sort(raw_tags.begin(), raw_tags.end(),
                     [](const RawTag& a, const RawTag& b) { return a.start_line < b.start_line; });
    std::vector<EntityDef> out;
    for (size_t i = 0; i < raw_tags.size(); ++i) {
        if (!out.empty() && out.back().start_line == raw_tags[i].start_line) {
            if (notices)
                notices->push_back({"DuplicateTag", file + ":" + raw_tags[i].name});
            continue;
        }
        EntityDef e;
        e.name = raw_tags[i].name;
        e.kind = raw_tags[i].kind;
        e.start_line = raw_tags[i].start_line;
        e.file = file;
        e.language = raw_tags[i].language;
        out.push_back(e);
    }
    for (size_t i = 0; i < out.size(); ++i) {
        int next_start = (i + 1 < out.size()) ? out[i + 1].start_line : file_lines + 1;
        out[i].end_line = std::max(out[i].start_line, next_start - 1);
        if (i + 1 == out.size())
            out[i].end_line = std::max(out[i].start_line, file_lines);
    }
    return out;
}

// Invokes the tag tool in its JSON-lines mode with explicit end fields and
// filters kinds through the tag set. A non-empty file producing no usable
// tags is reported as UnsupportedLanguage.
inline std::vector<EntityDef> run_ctags(const std::string& content,
                                        const std::string& filename_hint,
                                        const TagSet& tags = {},
                                        std::vector<Notice>* notices = nullptr) {
    if (content.empty())
        return {};

    detail::TempTagFile tmp(content, filename_hint);
    std::vector<std::string> argv{detail::ctags_binary(), "--output-format=json",
                                  "--fields=+neKl", "-o", "-", tmp.file.string()};
    auto res = run_process(argv);
    if (res.exit_code == 127)
        throw CliInvocationFailure("tag tool not found: " + detail::ctags_binary());
    if (res.exit_code != 0)
        throw CliInvocationFailure("tag tool failed: " + res.err);

    std::vector<RawTag> raws;
    size_t start = 0;
    while (start < res.out.size()) {
        size_t nl = res.out.find('\n', start);
        std::string line = res.out.substr(start, nl == std::string::npos ? nl : nl - start);
        start = (nl == std::string::npos) ? res.out.size() : nl + 1;
        if (line.empty())
            continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw OutputParseFailure("bad tag tool output line: " + line);
        if (j.value("_type", "") != "tag")
            continue;
        RawTag t;
        t.name = j.value("name", "");
        t.kind = j.value("kind", "");
        t.start_line = j.value("line", 0);
        if (j.contains("end"))
            t.end_line = j["end"].get<int>();
        t.language = j.value("language", "");
        if (t.name.empty() || t.start_line <= 0)
            continue;
        raws.push_back(std::move(t));
    }

    // kind filtering per tag set
    std::vector<RawTag> kept;
    for (auto& t : raws) {
        if (tags.mode == TagSet::Mode::explicit_kinds) {
            auto it = tags.per_language_kinds.find(detail::ascii_lower(t.language));
            if (it == tags.per_language_kinds.end())
                continue;
            if (std::find(it->second.begin(), it->second.end(), t.kind) == it->second.end())
                continue;
        }
        kept.push_back(std::move(t));
    }

    if (kept.empty()) {
        if (notices)
            notices->push_back({"UnsupportedLanguage", filename_hint});
        return {};
    }

    int lines = detail::count_lines(content);
    bool all_have_end = std::all_of(kept.begin(), kept.end(),
                                    [](const RawTag& t) { return t.end_line.has_value(); });
    if (all_have_end) {
        std::vector<EntityDef> out;
        std::set<int> starts;
        std::stable_sort(kept.begin(), kept.end(),
                         [](const RawTag& a, const RawTag& b) { return a.start_line < b.start_line; });
        for (const auto& t : kept) {
            if (!starts.insert(t.start_line).second) {
                if (notices)
                    notices->push_back({"DuplicateTag", filename_hint + ":" + t.name});
                continue;
            }
            out.push_back({t.name, t.kind, t.start_line,
                           std::max(t.start_line, *t.end_line), filename_hint, t.language});
        }
        // clip overlapping spans: a span ends where the next begins
        for (size_t i = 0; i + 1 < out.size(); ++i)
            if (out[i].end_line >= out[i + 1].start_line)
                out[i].end_line = out[i + 1].start_line - 1;
        return out;
    }
    return resolve_spans(kept, lines, filename_hint, notices);
}

// added-line ranges of one file in one commit, from zero-context diff hunks
inline std::vector<std::pair<int, int>> added_line_ranges(const RepoHandle& repo,
                                                          const CommitRecord& commit,
                                                          const std::string& path) {
    static const char* kEmptyTree = "4b825dc642cb6eb9a060e54bf8d69288fbee4904";
    std::string base = commit.parents.empty() ? kEmptyTree : commit.parents.front();
    auto res = detail::git(repo.dir().string(),
                           {"diff", "-U0", "--no-color", base, commit.hash, "--", path});
    if (res.exit_code != 0)
        throw CliInvocationFailure("git diff failed: " + res.err);

    std::vector<std::pair<int, int>> ranges; // [first, last] inclusive, post-image lines
    for (const auto& line : detail::split(res.out, '\n')) {
        if (line.rfind("@@", 0) != 0)
            continue;
        auto plus = line.find('+');
        if (plus == std::string::npos)
            continue;
        size_t i = plus + 1;
        long start = 0, count = 1;
        while (i < line.size() && isdigit(static_cast<unsigned char>(line[i])))
            start = start * 10 + (line[i++] - '0');
        if (i < line.size() && line[i] == ',') {
            ++i;
            count = 0;
            while (i < line.size() && isdigit(static_cast<unsigned char>(line[i])))
                count = count * 10 + (line[i++] - '0');
        }
        if (count > 0)
            ranges.emplace_back(static_cast<int>(start), static_cast<int>(start + count - 1));
    }
    return ranges;
}

inline std::int64_t overlap_lines(const std::vector<std::pair<int, int>>& ranges, int lo, int hi) {
    std::int64_t n = 0;
    for (auto [a, b] : ranges) {
        int l = std::max(a, lo), h = std::min(b, hi);
        if (l <= h)
            n += h - l + 1;
    }
    return n;
}

struct EntityChangeResult {
    std::vector<EntityChange> changes;
    std::vector<BlameDiscovered> blame_discovered;
    std::vector<Notice> notices;
};

// Entity-change extraction: per commit and surviving file, intersect added-line ranges
// with entity spans of the post-change revision; blame the pre-change revision
// to surface origin commits the main table may lack.
inline EntityChangeResult entity_changes_for_window(const RepoHandle& repo, int window_index,
                                                    const std::vector<CommitRecord>& window_commits,
                                                    const FilterProfile& profile,
                                                    const TagSet& tags, TimestampBasis basis,
                                                    bool run_blame = true) {
    EntityChangeResult result;
    std::set<std::string> table_hashes;
    for (const auto& c : window_commits)
        table_hashes.insert(c.hash);

    for (const auto& commit : window_commits) {
        for (const auto& fc : commit.file_changes) {
            if (fc.change_kind == ChangeKind::deleted)
                continue;
            if (!path_survives(fc.path, profile))
                continue;
            try {
                auto ranges = added_line_ranges(repo, commit, fc.path);
                if (ranges.empty())
                    continue;
                std::string content = file_at_revision(repo, commit.hash, fc.path);
                auto defs = run_ctags(content, fc.path, tags, &result.notices);
                for (const auto& d : defs) {
                    std::int64_t sloc = overlap_lines(ranges, d.start_line, d.end_line);
                    if (sloc < 1)
                        continue;
                    EntityChange ec;
                    ec.window_index = window_index;
                    ec.file = fc.path;
                    ec.entity_name = d.name;
                    ec.entity_kind = d.kind;
                    ec.dev_name = commit.author_name;
                    ec.dev_email = commit.author_email;
                    ec.commit_hash = commit.hash;
                    ec.sloc = sloc;
                    ec.ts = basis_ts(commit, basis);
                    result.changes.push_back(std::move(ec));
                }

                if (run_blame && !defs.empty() && !commit.parents.empty() &&
                    fc.change_kind != ChangeKind::added) {
                    const std::string& parent = commit.parents.front();
                    std::string pre_path = fc.old_path.empty() ? fc.path : fc.old_path;
                    if (path_exists_at(repo, parent, pre_path)) {
                        std::string pre = file_at_revision(repo, parent, pre_path);
                        auto pre_defs = run_ctags(pre, pre_path, tags, nullptr);
                        auto blame = blame_file(repo, parent, pre_path);
                        for (const auto& d : pre_defs) {
                            std::map<std::string, std::pair<std::int64_t, const BlameLine*>> per_origin;
                            for (const auto& bl : blame) {
                                if (bl.line_no < d.start_line || bl.line_no > d.end_line)
                                    continue;
                                if (table_hashes.count(bl.origin_hash))
                                    continue; // already captured in the main table
                                auto& slot = per_origin[bl.origin_hash];
                                slot.first++;
                                slot.second = &bl;
                            }
                            for (const auto& [hash, slot] : per_origin) {
                                BlameDiscovered bd;
                                bd.window_index = window_index;
                                bd.file = fc.path;
                                bd.entity_name = d.name;
                                bd.origin_hash = hash;
                                bd.origin_author_name = slot.second->origin_author_name;
                                bd.origin_author_email = slot.second->origin_author_email;
                                bd.surviving_lines = slot.first;
                                bd.origin_ts = slot.second->origin_author_ts;
                                result.blame_discovered.push_back(std::move(bd));
                            }
                        }
                    }
                }
            } catch (const Error& e) {
                if (dynamic_cast<const CliInvocationFailure*>(&e) &&
                    std::string(e.what()).rfind("tag tool not found", 0) == 0)
                    throw; // a missing tag tool is fatal, not a per-file condition
                result.notices.push_back({"FileSkipped", fc.path + ": " + e.what()});
            }
        }
    }
    return result;
}

} // namespace msr
