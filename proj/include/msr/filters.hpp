#pragma once

#include <algorithm>
#include <cctype>
#include <regex>
#include <string>
#include <vector>

#include "msr/error.hpp"
#include "msr/repo_io.hpp"

namespace msr {

struct FilterProfile {
    std::string name;
    std::vector<std::string> suffix_allowlist; // lowercase, leading dot; empty = allow all
    std::vector<std::string> path_exclude_globs;
};

namespace detail {

inline std::string ascii_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    return s;
}

// Glob to regex: '**' crosses directory separators, '*' and '?' do not.
// Character classes pass through; an unclosed '[' is malformed.
inline std::regex glob_to_regex(const std::string& glob) {
    std::string re;
    for (size_t i = 0; i < glob.size(); ++i) {
        char c = glob[i];
        switch (c) {
        case '*':
            if (i + 1 < glob.size() && glob[i + 1] == '*') {
                re += ".*";
                ++i;
                if (i + 1 < glob.size() && glob[i + 1] == '/')
                    ++i; // "**/" also matches zero directories
            } else {
                re += "[^/]*";
            }
            break;
        case '?':
            re += "[^/]";
            break;
        case '[': {
            auto close = glob.find(']', i + 2); // allow leading ']' or '!'
            if (close == std::string::npos)
                throw MalformedGlob("unclosed character class in glob: " + glob);
            std::string cls = glob.substr(i, close - i + 1);
            if (cls.size() > 1 && cls[1] == '!')
                cls[1] = '^';
            re += cls;
            i = close;
            break;
        }
        case '.': case '+': case '(': case ')': case '{': case '}':
        case '^': case '$': case '|': case '\\':
            re += '\\';
            re += c;
            break;
        default:
            re += c;
        }
    }
    return std::regex(re);
}

} // namespace detail

// True iff the allowlist is empty or the path's final extension matches,
// case-insensitively. Paths without an extension never match a non-empty list.
inline bool match_suffix(const std::string& path, const std::vector<std::string>& allowlist) {
    if (allowlist.empty())
        return true;
    auto slash = path.find_last_of('/');
    auto dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return false;
    std::string ext = detail::ascii_lower(path.substr(dot));
    return std::find(allowlist.begin(), allowlist.end(), ext) != allowlist.end();
}

inline bool path_excluded(const std::string& path, const std::vector<std::string>& globs) {
    for (const auto& g : globs)
        if (std::regex_match(path, detail::glob_to_regex(g)))
            return true;
    return false;
}

inline bool path_survives(const std::string& path, const FilterProfile& profile) {
    return match_suffix(path, profile.suffix_allowlist) &&
           !path_excluded(path, profile.path_exclude_globs);
}

// Drops non-surviving file changes; commits left with none are removed.
// Merge commits carry no diff of their own and pass through unchanged.
inline std::vector<CommitRecord> apply_filters(const std::vector<CommitRecord>& records,
                                               const FilterProfile& profile) {
    // validate globs up front so MalformedGlob fires even on empty input
    for (const auto& g : profile.path_exclude_globs)
        detail::glob_to_regex(g);

    std::vector<CommitRecord> out;
    for (const auto& rec : records) {
        CommitRecord copy = rec;
        copy.file_changes.clear();
        for (const auto& fc : rec.file_changes)
            if (path_survives(fc.path, profile))
                copy.file_changes.push_back(fc);
        if (!copy.file_changes.empty() || rec.is_merge)
            out.push_back(std::move(copy));
    }
    return out;
}

// Built-in filter profiles for the two emulated tools.
inline FilterProfile kaiaulu_prior_profile() {
    FilterProfile p;
    p.name = "kaiaulu-prior";
    p.suffix_allowlist = {".c", ".cc", ".ccp", ".java", ".js", ".py", ".r"};
    p.path_exclude_globs = {"test*/**", "example*/**", "**/test*/**", "**/example*/**"};
    return p;
}

inline FilterProfile codeface_like_profile() {
    FilterProfile p;
    p.name = "codeface-like";
    return p;
}

} // namespace msr
