#pragma once

#include <string>

#include <yaml-cpp/yaml.h>

#include "msr/error.hpp"
#include "msr/run_config.hpp"

namespace msr {

// YAML run configuration. `profile` selects a built-in semantic profile as
// the baseline; every other key overrides one axis.
inline RunConfig load_run_config(const YAML::Node& root) {
    RunConfig cfg;
    if (root["profile"])
        cfg = profile_config(root["profile"].as<std::string>());

    if (root["repo_path"])
        cfg.repo_path = root["repo_path"].as<std::string>();
    if (root["window_months"]) {
        cfg.window_months = root["window_months"].as<int>();
        if (cfg.window_months <= 0)
            throw ConfigError("window_months must be positive");
    }
    if (root["timestamp_basis"]) {
        auto v = root["timestamp_basis"].as<std::string>();
        if (v == "author")
            cfg.timestamp_basis = TimestampBasis::author;
        else if (v == "committer")
            cfg.timestamp_basis = TimestampBasis::committer;
        else
            throw ConfigError("timestamp_basis must be author or committer");
    }
    if (root["include_window_end"])
        cfg.include_window_end = root["include_window_end"].as<bool>();
    if (root["explicit_boundaries"]) {
        std::vector<std::int64_t> b;
        for (const auto& n : root["explicit_boundaries"])
            b.push_back(n.as<std::int64_t>());
        cfg.explicit_boundaries = b;
    }
    if (root["filter_profile"]) {
        const auto& fp = root["filter_profile"];
        if (fp.IsScalar()) {
            auto name = fp.as<std::string>();
            if (name == "kaiaulu-prior")
                cfg.filter_profile = kaiaulu_prior_profile();
            else if (name == "codeface-like")
                cfg.filter_profile = codeface_like_profile();
            else
                throw ConfigError("unknown filter_profile: " + name);
        } else {
            FilterProfile p;
            p.name = fp["name"] ? fp["name"].as<std::string>() : "custom";
            if (fp["suffix_allowlist"])
                for (const auto& s : fp["suffix_allowlist"]) {
                    auto suffix = s.as<std::string>();
                    if (suffix.empty() || suffix[0] != '.')
                        throw ConfigError("suffixes must start with '.': " + suffix);
                    p.suffix_allowlist.push_back(detail::ascii_lower(suffix));
                }
            if (fp["path_exclude_globs"])
                for (const auto& g : fp["path_exclude_globs"])
                    p.path_exclude_globs.push_back(g.as<std::string>());
            cfg.filter_profile = p;
        }
    }
    if (root["tag_set"]) {
        const auto& ts = root["tag_set"];
        if (ts.IsScalar()) {
            auto v = ts.as<std::string>();
            if (v == "default_all_languages")
                cfg.tag_set = TagSet{};
            else if (v == "kaiaulu-prior")
                cfg.tag_set = kaiaulu_prior_tagset();
            else
                throw ConfigError("unknown tag_set: " + v);
        } else {
            TagSet t;
            t.mode = TagSet::Mode::explicit_kinds;
            for (const auto& kv : ts) {
                std::vector<std::string> kinds;
                for (const auto& k : kv.second)
                    kinds.push_back(k.as<std::string>());
                t.per_language_kinds[detail::ascii_lower(kv.first.as<std::string>())] = kinds;
            }
            if (t.per_language_kinds.empty())
                throw ConfigError("explicit tag_set needs at least one language");
            cfg.tag_set = t;
        }
    }
    if (root["identity_scope"]) {
        auto v = root["identity_scope"].as<std::string>();
        if (v == "within_column")
            cfg.identity_scope = MatchScope::within_column;
        else if (v == "cross_column_and_table")
            cfg.identity_scope = MatchScope::cross_column_and_table;
        else
            throw ConfigError("identity_scope must be within_column or cross_column_and_table");
    }
    if (root["weight_scheme"]) {
        auto v = root["weight_scheme"].as<std::string>();
        if (v == "nested_pairwise")
            cfg.weight_scheme = WeightScheme::nested_pairwise;
        else if (v == "flat_sum")
            cfg.weight_scheme = WeightScheme::flat_sum;
        else
            throw ConfigError("weight_scheme must be nested_pairwise or flat_sum");
    }
    if (root["include_merges"])
        cfg.include_merges = root["include_merges"].as<bool>();
    if (root["include_self_loops"])
        cfg.include_self_loops = root["include_self_loops"].as<bool>();
    if (root["follow_renames"])
        cfg.follow_renames = root["follow_renames"].as<bool>();
    if (root["parallelism"]) {
        cfg.parallelism = root["parallelism"].as<int>();
        if (cfg.parallelism < 1)
            throw ConfigError("parallelism must be >= 1");
    }
    return cfg;
}

inline RunConfig load_run_config_file(const std::string& path) {
    YAML::Node root;
    try {
        root = YAML::LoadFile(path);
    } catch (const YAML::Exception& e) {
        throw ConfigError("cannot parse config " + path + ": " + e.what());
    }
    try {
        return load_run_config(root);
    } catch (const YAML::Exception& e) {
        throw ConfigError("bad config value in " + path + ": " + e.what());
    }
}

} // namespace msr
