#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace msr {

struct EntityDef {
    std::string name;
    std::string kind; // function, class, method, macro, ...
    int start_line = 0; // 1-based
    int end_line = 0;
    std::string file;
    std::string language;
};

struct TagSet {
    enum class Mode { default_all_languages, explicit_kinds };
    Mode mode = Mode::default_all_languages;
    std::map<std::string, std::vector<std::string>> per_language_kinds; // lowercase language
};

struct EntityChange {
    int window_index = 0;
    std::string file;
    std::string entity_name;
    std::string entity_kind;
    std::string dev_name;
    std::string dev_email;
    std::string commit_hash;
    std::int64_t sloc = 0; // >= 1
    std::int64_t ts = 0;   // basis-resolved
};

// EntityChange after identity resolution; raw fields retained for audit.
struct ResolvedEntityChange : EntityChange {
    int developer_id = 0;
};

struct Notice {
    std::string kind; // e.g. UnsupportedLanguage, DuplicateTag, FileSkipped
    std::string detail;
};

// Lines surviving from before a change, attributed to origin commits that the
// main commit table may not contain.
struct BlameDiscovered {
    int window_index = 0;
    std::string file;
    std::string entity_name;
    std::string origin_hash;
    std::string origin_author_name;
    std::string origin_author_email;
    std::int64_t surviving_lines = 0;
    std::int64_t origin_ts = 0;
};

} // namespace msr
