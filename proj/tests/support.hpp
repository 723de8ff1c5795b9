#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "msr/repo_io.hpp"

namespace testsup {

// Self-deleting scratch directory under the system temp root.
struct TempDir {
    std::filesystem::path path;
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

struct GitRepoBuilder {
    std::filesystem::path dir;

    explicit GitRepoBuilder(const std::filesystem::path& where);
    void write(const std::string& rel_path, const std::string& content);
    void remove(const std::string& rel_path);
    // Returns the new commit hash.
    std::string commit(const std::string& message, const std::string& author_name,
                       const std::string& author_email, std::int64_t author_ts,
                       const std::string& committer_name = "", const std::string& committer_email = "",
                       std::int64_t committer_ts = -1);
    void checkout_new_branch(const std::string& name);
    void checkout(const std::string& name);
    std::string merge(const std::string& branch, const std::string& message,
                      const std::string& name, const std::string& email, std::int64_t ts);
    std::string head() const;
};

std::filesystem::path scenario_dir();
std::filesystem::path cli_binary();

} // namespace testsup
