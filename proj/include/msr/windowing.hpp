#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <map>
#include <vector>

#include "msr/error.hpp"
#include "msr/repo_io.hpp"

namespace msr {

struct TimeWindow {
    int index = 0;
    std::int64_t start_ts = 0;
    std::int64_t end_ts = 0;
    bool include_end = false;
};

enum class TimestampBasis { author, committer };

inline const char* to_string(TimestampBasis b) {
    return b == TimestampBasis::author ? "author" : "committer";
}

inline std::int64_t basis_ts(const CommitRecord& c, TimestampBasis b) {
    return b == TimestampBasis::author ? c.author_ts : c.committer_ts;
}

// Calendar-month arithmetic on UTC epoch seconds, clamping day-of-month
// (Jan 31 + 1 month -> Feb 28/29). Time of day is preserved.
inline std::int64_t add_months_utc(std::int64_t ts, int months) {
    using namespace std::chrono;
    sys_seconds tp{seconds{ts}};
    auto day_point = floor<days>(tp);
    seconds tod = tp - day_point;
    year_month_day ymd{day_point};
    year_month ym = ymd.year() / ymd.month();
    ym += std::chrono::months{months};
    year_month_day shifted = ym / ymd.day();
    if (!shifted.ok())
        shifted = ym / last;
    return (sys_days{shifted} + tod).time_since_epoch().count();
}

inline bool window_contains(const TimeWindow& w, std::int64_t ts) {
    if (ts < w.start_ts)
        return false;
    return w.include_end ? ts <= w.end_ts : ts < w.end_ts;
}

// Windows anchor at the earliest basis timestamp. A span with no commits is
// not emitted; the next window restarts at the first commit after the gap.
inline std::vector<TimeWindow> derive_windows(const std::vector<CommitRecord>& commits,
                                              int window_months, TimestampBasis basis,
                                              bool include_end) {
    if (commits.empty())
        throw EmptyHistory("derive_windows: no commits");

    std::vector<std::int64_t> ts;
    ts.reserve(commits.size());
    for (const auto& c : commits)
        ts.push_back(basis_ts(c, basis));
    std::sort(ts.begin(), ts.end());

    std::vector<TimeWindow> windows;
    size_t i = 0; // first commit not yet covered by an emitted window
    std::int64_t start = ts.front();
    while (i < ts.size()) {
        TimeWindow w;
        w.start_ts = start;
        w.end_ts = add_months_utc(start, window_months);
        w.include_end = include_end;
        // commits already claimed by the previous window (boundary, include_end)
        // were consumed below, so membership here is a plain containment test
        size_t first_in = i;
        while (first_in < ts.size() && ts[first_in] < w.start_ts)
            ++first_in; // cannot happen with sorted input, kept for clarity
        if (first_in >= ts.size() || !window_contains(w, ts[first_in])) {
            // empty span: restart at the first uncovered commit
            start = ts[i];
            continue;
        }
        while (i < ts.size() && window_contains(w, ts[i]))
            ++i;
        w.index = static_cast<int>(windows.size());
        windows.push_back(w);
        start = w.end_ts;
    }
    return windows;
}

inline std::vector<TimeWindow> explicit_windows(const std::vector<std::int64_t>& boundaries,
                                                bool include_end) {
    if (boundaries.size() < 2)
        throw NonMonotonicBoundaries("need at least two boundaries");
    for (size_t i = 1; i < boundaries.size(); ++i)
        if (boundaries[i] <= boundaries[i - 1])
            throw NonMonotonicBoundaries("boundaries must be strictly increasing");
    std::vector<TimeWindow> windows;
    for (size_t i = 0; i + 1 < boundaries.size(); ++i)
        windows.push_back({static_cast<int>(i), boundaries[i], boundaries[i + 1], include_end});
    return windows;
}

struct WindowAssignment {
    std::map<int, std::vector<CommitRecord>> by_window;
    std::vector<CommitRecord> unassigned;
};

// Boundary commits go to the earlier window when include_end is set (the
// earlier window's end-inclusive test claims them first).
inline WindowAssignment assign_commits(const std::vector<CommitRecord>& commits,
                                       const std::vector<TimeWindow>& windows,
                                       TimestampBasis basis) {
    WindowAssignment out;
    for (const auto& c : commits) {
        std::int64_t ts = basis_ts(c, basis);
        bool placed = false;
        for (const auto& w : windows) {
            if (window_contains(w, ts)) {
                out.by_window[w.index].push_back(c);
                placed = true;
                break;
            }
        }
        if (!placed)
            out.unassigned.push_back(c);
    }
    return out;
}

} // namespace msr
