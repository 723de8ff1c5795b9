#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <zlib.h>

#include "msr/error.hpp"
#include "msr/identities.hpp"
#include "msr/network.hpp"

namespace msr {

enum class CountMetric { commits, files, entities, developers };

inline const char* to_string(CountMetric m) {
    switch (m) {
    case CountMetric::commits: return "commits";
    case CountMetric::files: return "files";
    case CountMetric::entities: return "entities";
    case CountMetric::developers: return "developers";
    }
    return "?";
}

struct CountSeries {
    CountMetric metric = CountMetric::commits;
    std::vector<std::int64_t> values; // indexed by window
};

struct OverlapReport {
    std::string metric;
    std::int64_t joint = 0;
    std::int64_t only_a = 0;
    std::int64_t only_b = 0;
    double jaccard = 0.0;
    double frac_of_a = 0.0;
    double frac_of_b = 0.0;
};

namespace detail {

inline std::string serialize_series(const std::vector<std::int64_t>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i)
            s += ',';
        s += std::to_string(v[i]);
    }
    return s;
}

inline size_t deflate_len(const std::string& data) {
    uLongf bound = compressBound(static_cast<uLong>(data.size()));
    std::vector<Bytef> buf(bound);
    uLongf out_len = bound;
    int rc = compress2(buf.data(), &out_len,
                       reinterpret_cast<const Bytef*>(data.data()),
                       static_cast<uLong>(data.size()), Z_BEST_COMPRESSION);
    if (rc != Z_OK)
        throw IoFailure("deflate failed");
    return out_len;
}

inline std::vector<double> minmax_normalize(const std::vector<std::int64_t>& v) {
    auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    std::vector<double> out(v.size());
    double lo = static_cast<double>(*mn), hi = static_cast<double>(*mx);
    for (size_t i = 0; i < v.size(); ++i)
        out[i] = (hi > lo) ? (static_cast<double>(v[i]) - lo) / (hi - lo) : 0.0;
    return out;
}

inline std::vector<double> average_ranks(const std::vector<std::int64_t>& v) {
    size_t n = v.size();
    std::vector<size_t> idx(n);
    for (size_t i = 0; i < n; ++i)
        idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        while (j + 1 < n && v[idx[j + 1]] == v[idx[i]])
            ++j;
        double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (size_t k = i; k <= j; ++k)
            ranks[idx[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

} // namespace detail

// Normalised compression distance over the canonical decimal-CSV serialization,
// deflate at maximum level.
inline double ncd(const CountSeries& x, const CountSeries& y) {
    if (x.values.empty() || y.values.empty())
        throw EmptySeries("ncd: empty series");
    std::string sx = detail::serialize_series(x.values);
    std::string sy = detail::serialize_series(y.values);
    double cx = static_cast<double>(detail::deflate_len(sx));
    double cy = static_cast<double>(detail::deflate_len(sy));
    double cxy = static_cast<double>(detail::deflate_len(sx + "," + sy));
    return (cxy - std::min(cx, cy)) / std::max(cx, cy);
}

// Classic DP over |.| cost on min-max-normalized series; minimal accumulated
// cost divided by n + m (the warping-path length in alignment steps).
inline double dtw(const CountSeries& xs, const CountSeries& ys) {
    if (xs.values.empty() || ys.values.empty())
        throw EmptySeries("dtw: empty series");
    auto x = detail::minmax_normalize(xs.values);
    auto y = detail::minmax_normalize(ys.values);
    size_t n = x.size(), m = y.size();
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> d(n + 1, std::vector<double>(m + 1, inf));
    d[0][0] = 0.0;
    for (size_t i = 1; i <= n; ++i)
        for (size_t j = 1; j <= m; ++j) {
            double cost = std::abs(x[i - 1] - y[j - 1]);
            d[i][j] = cost + std::min({d[i - 1][j], d[i][j - 1], d[i - 1][j - 1]});
        }
    return d[n][m] / static_cast<double>(n + m);
}

// Pearson correlation of average-rank vectors; null for a constant input.
inline std::optional<double> spearman(const CountSeries& xs, const CountSeries& ys) {
    if (xs.values.size() != ys.values.size() || xs.values.size() < 2)
        throw EmptySeries("spearman: need equal lengths >= 2");
    auto rx = detail::average_ranks(xs.values);
    auto ry = detail::average_ranks(ys.values);
    size_t n = rx.size();
    double mx = 0, my = 0;
    for (size_t i = 0; i < n; ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0, sxx = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0)
        return std::nullopt; // ConstantSeries
    return sxy / std::sqrt(sxx * syy);
}

inline OverlapReport overlap(const std::set<std::string>& a, const std::set<std::string>& b,
                             const std::string& metric = {}) {
    OverlapReport r;
    r.metric = metric;
    for (const auto& x : a)
        b.count(x) ? ++r.joint : ++r.only_a;
    for (const auto& x : b)
        if (!a.count(x))
            ++r.only_b;
    std::int64_t uni = r.joint + r.only_a + r.only_b;
    r.jaccard = uni > 0 ? static_cast<double>(r.joint) / static_cast<double>(uni) : 1.0;
    r.frac_of_a = a.empty() ? 1.0 : static_cast<double>(r.joint) / static_cast<double>(a.size());
    r.frac_of_b = b.empty() ? 1.0 : static_cast<double>(r.joint) / static_cast<double>(b.size());
    return r;
}

// 2m / (n(n-1)) on the undirected collapse, self-loops excluded; 0 for n < 2.
inline double density(const DeveloperNetwork& net) {
    const DeveloperNetwork& u = net.undirected ? net : collapse_undirected(net);
    size_t n = u.nodes.size();
    if (n < 2)
        return 0.0;
    size_t m = 0;
    for (const auto& [edge, w] : u.directed_edges)
        if (edge.first != edge.second && w > 0)
            ++m;
    return 2.0 * static_cast<double>(m) /
           (static_cast<double>(n) * (static_cast<double>(n) - 1.0));
}

struct WeightStats {
    std::optional<double> mean_nonzero;
    std::optional<double> max;
};

inline WeightStats weight_stats(const DeveloperNetwork& net, bool include_self_loops = false) {
    const DeveloperNetwork& u = net.undirected ? net : collapse_undirected(net);
    double sum = 0, mx = 0;
    size_t cnt = 0;
    for (const auto& [edge, w] : u.directed_edges) {
        if (edge.first == edge.second && !include_self_loops)
            continue;
        if (w <= 0)
            continue;
        sum += w;
        mx = std::max(mx, w);
        ++cnt;
    }
    WeightStats s;
    if (cnt > 0) {
        s.mean_nonzero = sum / static_cast<double>(cnt);
        s.max = mx;
    }
    return s;
}

// Labeled graph with canonical string node labels, for cross-run comparison.
struct LabeledGraph {
    std::set<std::string> nodes;
    std::set<std::pair<std::string, std::string>> edges; // undirected, first <= second
};

inline LabeledGraph to_labeled(const DeveloperNetwork& net,
                               const std::map<int, std::string>& labels) {
    const DeveloperNetwork u = net.undirected ? net : collapse_undirected(net);
    LabeledGraph g;
    auto label = [&](int id) {
        auto it = labels.find(id);
        if (it == labels.end())
            throw UnalignedIdentities("no label for developer id " + std::to_string(id));
        return it->second;
    };
    for (int id : u.nodes)
        g.nodes.insert(label(id));
    for (const auto& [edge, w] : u.directed_edges) {
        if (w <= 0)
            continue;
        std::string a = label(edge.first), b = label(edge.second);
        if (b < a)
            std::swap(a, b);
        g.edges.insert({a, b});
    }
    return g;
}

// Exact labeled GED: symmetric difference of node and edge sets.
inline std::int64_t graph_edit_distance(const LabeledGraph& a, const LabeledGraph& b) {
    std::int64_t d = 0;
    for (const auto& n : a.nodes)
        if (!b.nodes.count(n))
            ++d;
    for (const auto& n : b.nodes)
        if (!a.nodes.count(n))
            ++d;
    for (const auto& e : a.edges)
        if (!b.edges.count(e))
            ++d;
    for (const auto& e : b.edges)
        if (!a.edges.count(e))
            ++d;
    return d;
}

// Cross-run identity alignment: normalized email first, full name second.
// Returns canonical labels usable by both runs; unalignable identities get
// run-qualified labels and thus count as insert + delete in the GED.
inline std::pair<std::map<int, std::string>, std::map<int, std::string>>
align_identities(const IdentityTable& a, const IdentityTable& b) {
    std::map<int, std::string> la, lb;
    std::map<std::string, int> b_by_email, b_by_name;
    for (const auto& ident : b.identities) {
        for (const auto& e : ident.emails)
            b_by_email.emplace(e, ident.id);
        for (const auto& n : ident.names)
            b_by_name.emplace(n, ident.id);
    }
    std::map<int, int> b_to_a;
    for (const auto& ident : a.identities) {
        std::string label = "a#" + std::to_string(ident.id);
        la[ident.id] = label;
        int match = -1;
        for (const auto& e : ident.emails)
            if (auto it = b_by_email.find(e); it != b_by_email.end()) {
                match = it->second;
                break;
            }
        if (match < 0)
            for (const auto& n : ident.names)
                if (auto it = b_by_name.find(n); it != b_by_name.end()) {
                    match = it->second;
                    break;
                }
        if (match >= 0 && !b_to_a.count(match)) {
            b_to_a[match] = ident.id;
            lb[match] = label;
        }
    }
    for (const auto& ident : b.identities)
        if (!lb.count(ident.id))
            lb[ident.id] = "b#" + std::to_string(ident.id);
    return {la, lb};
}

} // namespace msr
