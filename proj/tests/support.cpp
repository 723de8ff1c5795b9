#include "support.hpp"

#include <cstdlib>
#include <fstream>
#include <random>

#include "msr/error.hpp"
#include "msr/process.hpp"

namespace testsup {

namespace fs = std::filesystem;

TempDir::TempDir() {
    static std::mt19937_64 rng{std::random_device{}()};
    path = fs::temp_directory_path() /
           ("msr-test-" + std::to_string(::getpid()) + "-" + std::to_string(rng()));
    fs::create_directories(path);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
}

namespace {

void git(const fs::path& dir, std::vector<std::string> args,
         const std::vector<std::string>& env = {}) {
    std::vector<std::string> argv{"git", "-C", dir.string()};
    argv.insert(argv.end(), args.begin(), args.end());
    std::vector<std::string> full_env{"LC_ALL=C", "TZ=UTC"};
    full_env.insert(full_env.end(), env.begin(), env.end());
    auto res = msr::run_process(argv, full_env);
    if (res.exit_code != 0)
        throw msr::GitInvocationFailure("git " + args.front() + ": " + res.err);
}

std::string git_out(const fs::path& dir, std::vector<std::string> args) {
    std::vector<std::string> argv{"git", "-C", dir.string()};
    argv.insert(argv.end(), args.begin(), args.end());
    auto res = msr::run_process(argv, {"LC_ALL=C", "TZ=UTC"});
    if (res.exit_code != 0)
        throw msr::GitInvocationFailure("git " + args.front() + ": " + res.err);
    while (!res.out.empty() && (res.out.back() == '\n' || res.out.back() == '\r'))
        res.out.pop_back();
    return res.out;
}

std::vector<std::string> person_env(const std::string& an, const std::string& ae,
                                    std::int64_t ats, const std::string& cn,
                                    const std::string& ce, std::int64_t cts) {
    return {
        "GIT_AUTHOR_NAME=" + an,
        "GIT_AUTHOR_EMAIL=" + ae,
        "GIT_AUTHOR_DATE=@" + std::to_string(ats) + " +0000",
        "GIT_COMMITTER_NAME=" + cn,
        "GIT_COMMITTER_EMAIL=" + ce,
        "GIT_COMMITTER_DATE=@" + std::to_string(cts) + " +0000",
    };
}

} // namespace

GitRepoBuilder::GitRepoBuilder(const fs::path& where) : dir(where) {
    fs::create_directories(dir);
    git(dir, {"init", "-q", "-b", "main"});
    git(dir, {"config", "user.name", "test"});
    git(dir, {"config", "user.email", "test@localhost"});
    git(dir, {"config", "commit.gpgsign", "false"});
}

void GitRepoBuilder::write(const std::string& rel_path, const std::string& content) {
    auto full = dir / rel_path;
    fs::create_directories(full.parent_path());
    std::ofstream out(full, std::ios::binary);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

void GitRepoBuilder::remove(const std::string& rel_path) {
    fs::remove(dir / rel_path);
}

std::string GitRepoBuilder::commit(const std::string& message, const std::string& author_name,
                                   const std::string& author_email, std::int64_t author_ts,
                                   const std::string& committer_name,
                                   const std::string& committer_email,
                                   std::int64_t committer_ts) {
    std::string cn = committer_name.empty() ? author_name : committer_name;
    std::string ce = committer_email.empty() ? author_email : committer_email;
    std::int64_t cts = committer_ts < 0 ? author_ts : committer_ts;
    git(dir, {"add", "-A"});
    git(dir, {"commit", "-q", "--allow-empty", "-m", message},
        person_env(author_name, author_email, author_ts, cn, ce, cts));
    return head();
}

void GitRepoBuilder::checkout_new_branch(const std::string& name) {
    git(dir, {"checkout", "-q", "-b", name});
}

void GitRepoBuilder::checkout(const std::string& name) {
    git(dir, {"checkout", "-q", name});
}

std::string GitRepoBuilder::merge(const std::string& branch, const std::string& message,
                                  const std::string& name, const std::string& email,
                                  std::int64_t ts) {
    git(dir, {"merge", "-q", "--no-ff", "--no-edit", "-m", message, branch},
        person_env(name, email, ts, name, email, ts));
    return head();
}

std::string GitRepoBuilder::head() const {
    return git_out(dir, {"rev-parse", "HEAD"});
}

fs::path scenario_dir() {
    return fs::path(MSR_SOURCE_DIR) / "data" / "scenarios";
}

fs::path cli_binary() {
    if (const char* env = std::getenv("MSR_CLI_BIN"); env && *env)
        return env;
    return fs::path(MSR_BUILD_DIR) / "msr";
}

} // namespace testsup
