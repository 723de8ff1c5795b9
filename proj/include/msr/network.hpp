#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "msr/entities_types.hpp"

namespace msr {

enum class WeightScheme { nested_pairwise, flat_sum };

inline const char* to_string(WeightScheme s) {
    return s == WeightScheme::nested_pairwise ? "nested_pairwise" : "flat_sum";
}

struct Contribution {
    int developer_id = 0;
    std::string commit_hash;
    std::int64_t sloc = 0;
    std::int64_t ts = 0;
};

// per (file, entity): time-ordered contribution list, scoped to one window
using EntityKey = std::pair<std::string, std::string>;
using ContributionSeq = std::map<EntityKey, std::vector<Contribution>>;

using EdgeMap = std::map<std::pair<int, int>, double>; // (from,to) -> weight

struct DeveloperNetwork {
    std::set<int> nodes;
    EdgeMap directed_edges;
    int window_index = 0;
    WeightScheme scheme = WeightScheme::nested_pairwise;
    bool include_self_loops = true;
    bool undirected = false;
};

inline ContributionSeq build_contributions(const std::vector<ResolvedEntityChange>& changes) {
    ContributionSeq seq;
    for (const auto& ec : changes)
        seq[{ec.file, ec.entity_name}].push_back(
            {ec.developer_id, ec.commit_hash, ec.sloc, ec.ts});
    for (auto& [key, list] : seq)
        std::stable_sort(list.begin(), list.end(), [](const Contribution& a, const Contribution& b) {
            return a.ts != b.ts ? a.ts < b.ts : a.commit_hash < b.commit_hash;
        });
    return seq;
}

// For commit c_i by b and each earlier commit c_j by a on the same entity,
// add sloc(c_i) + sloc(c_j) to edge (b,a).
inline EdgeMap edge_weight_nested(const std::vector<Contribution>& seq,
                                  bool include_self_loops = true) {
    EdgeMap w;
    for (size_t i = 0; i < seq.size(); ++i) {
        int b = seq[i].developer_id;
        for (size_t j = 0; j < i; ++j) {
            int a = seq[j].developer_id;
            if (a == b && !include_self_loops)
                continue;
            w[{b, a}] += static_cast<double>(seq[i].sloc + seq[j].sloc);
        }
    }
    return w;
}

// For commit c_i by b and each collaborator a with earlier commits on the
// entity, add sloc(c_i) once plus the sum of a's earlier slocs.
inline EdgeMap edge_weight_flat(const std::vector<Contribution>& seq,
                                bool include_self_loops = true) {
    EdgeMap w;
    for (size_t i = 0; i < seq.size(); ++i) {
        int b = seq[i].developer_id;
        std::map<int, std::int64_t> prior; // collaborator -> summed earlier sloc
        for (size_t j = 0; j < i; ++j)
            prior[seq[j].developer_id] += seq[j].sloc;
        for (const auto& [a, sum] : prior) {
            if (a == b && !include_self_loops)
                continue;
            w[{b, a}] += static_cast<double>(seq[i].sloc + sum);
        }
    }
    return w;
}

inline DeveloperNetwork build_network(const std::vector<ResolvedEntityChange>& changes,
                                      WeightScheme scheme, bool include_self_loops,
                                      int window_index = 0) {
    DeveloperNetwork net;
    net.window_index = window_index;
    net.scheme = scheme;
    net.include_self_loops = include_self_loops;
    for (const auto& ec : changes)
        net.nodes.insert(ec.developer_id);
    for (const auto& [key, seq] : build_contributions(changes)) {
        EdgeMap part = scheme == WeightScheme::nested_pairwise
                           ? edge_weight_nested(seq, include_self_loops)
                           : edge_weight_flat(seq, include_self_loops);
        for (const auto& [edge, weight] : part)
            net.directed_edges[edge] += weight;
    }
    return net;
}

// Undirected weight(u,v) = w(u,v) + w(v,u), keyed with u <= v. Self-loop
// weights carry over unchanged.
inline DeveloperNetwork collapse_undirected(const DeveloperNetwork& net) {
    DeveloperNetwork out = net;
    out.undirected = true;
    out.directed_edges.clear();
    for (const auto& [edge, weight] : net.directed_edges) {
        auto [u, v] = edge;
        if (u == v)
            out.directed_edges[{u, u}] = weight;
        else
            out.directed_edges[{std::min(u, v), std::max(u, v)}] += weight;
    }
    return out;
}

} // namespace msr
