#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "msr/entities_types.hpp"
#include "msr/filters.hpp"
#include "msr/identities.hpp"
#include "msr/network.hpp"
#include "msr/windowing.hpp"

namespace msr {

struct RunConfig {
    std::string repo_path;
    int window_months = 3;
    TimestampBasis timestamp_basis = TimestampBasis::committer;
    bool include_window_end = true;
    std::optional<std::vector<std::int64_t>> explicit_boundaries;
    FilterProfile filter_profile = codeface_like_profile();
    TagSet tag_set;
    MatchScope identity_scope = MatchScope::cross_column_and_table;
    WeightScheme weight_scheme = WeightScheme::nested_pairwise;
    bool include_merges = true;
    bool include_self_loops = true;
    bool follow_renames = false;
    int parallelism = 1;
    std::string profile_name = "codeface-like";
};

// Tag kinds used by the kaiaulu-prior tag set: function-level structures for
// the languages covered by the suffix allowlist.
inline TagSet kaiaulu_prior_tagset() {
    TagSet t;
    t.mode = TagSet::Mode::explicit_kinds;
    t.per_language_kinds = {
        {"c", {"function", "struct"}},
        {"c++", {"function", "class", "struct"}},
        {"java", {"method", "class"}},
        {"javascript", {"function", "class", "method"}},
        {"python", {"function", "class", "member"}},
        {"r", {"function"}},
    };
    return t;
}

// Named semantic profiles bundling the defaults of the two emulated tools.
inline RunConfig profile_config(const std::string& profile) {
    RunConfig cfg;
    if (profile == "codeface-like") {
        cfg.profile_name = profile;
        cfg.timestamp_basis = TimestampBasis::committer;
        cfg.include_window_end = true;
        cfg.filter_profile = codeface_like_profile();
        cfg.tag_set.mode = TagSet::Mode::default_all_languages;
        cfg.identity_scope = MatchScope::cross_column_and_table;
        cfg.weight_scheme = WeightScheme::nested_pairwise;
        cfg.include_merges = true;
    } else if (profile == "kaiaulu-prior") {
        cfg.profile_name = profile;
        cfg.timestamp_basis = TimestampBasis::author;
        cfg.include_window_end = false;
        cfg.filter_profile = kaiaulu_prior_profile();
        cfg.tag_set = kaiaulu_prior_tagset();
        cfg.identity_scope = MatchScope::within_column;
        cfg.weight_scheme = WeightScheme::flat_sum;
        cfg.include_merges = false;
    } else {
        throw ConfigError("unknown profile: " + profile);
    }
    return cfg;
}

} // namespace msr
