#pragma once

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "msr/error.hpp"

namespace msr {

struct RawIdentity {
    std::string name;
    std::string email;
    std::string source_column; // "author" | "committer"
    std::string source_table;  // e.g. "git", "entity"
};

enum class MatchScope { within_column, cross_column_and_table };

inline const char* to_string(MatchScope s) {
    return s == MatchScope::within_column ? "within_column" : "cross_column_and_table";
}

// ASCII lowercase + whitespace collapse; email additionally loses surrounding
// angle brackets. Non-ASCII bytes pass through untouched.
inline std::pair<std::string, std::string> normalize_identity(const std::string& name,
                                                              const std::string& email) {
    auto collapse = [](const std::string& in) {
        std::string out;
        bool pending_space = false;
        for (unsigned char c : in) {
            if (std::isspace(c)) {
                if (!out.empty())
                    pending_space = true;
                continue;
            }
            if (pending_space) {
                out += ' ';
                pending_space = false;
            }
            out += static_cast<char>(std::isupper(c) ? std::tolower(c) : c);
        }
        return out;
    };
    std::string e = email;
    if (e.size() >= 2 && e.front() == '<' && e.back() == '>')
        e = e.substr(1, e.size() - 2);
    return {collapse(name), collapse(e)};
}

struct Identity {
    int id = 0;
    std::set<std::string> names;  // normalized
    std::set<std::string> emails; // normalized
};

struct MappingEntry {
    RawIdentity raw;
    int id = 0;
};

struct IdentityTable {
    std::vector<Identity> identities;
    std::vector<MappingEntry> mapping;

    std::optional<int> lookup(const RawIdentity& raw) const {
        auto [nk, ek] = normalize_identity(raw.name, raw.email);
        for (const auto& m : mapping) {
            auto [mn, me] = normalize_identity(m.raw.name, m.raw.email);
            if (mn == nk && me == ek && m.raw.source_column == raw.source_column &&
                m.raw.source_table == raw.source_table)
                return m.id;
        }
        return std::nullopt;
    }
};

namespace detail {

struct CascadeState {
    std::vector<Identity> identities;           // index == provisional id
    std::vector<int> alive;                     // provisional id -> canonical (union-find style)

    int find(int id) {
        while (alive[id] != id)
            id = alive[id] = alive[alive[id]];
        return id;
    }

    void merge_into(int winner, int loser) {
        winner = find(winner);
        loser = find(loser);
        if (winner == loser)
            return;
        identities[winner].names.insert(identities[loser].names.begin(),
                                        identities[loser].names.end());
        identities[winner].emails.insert(identities[loser].emails.begin(),
                                         identities[loser].emails.end());
        identities[loser].names.clear();
        identities[loser].emails.clear();
        alive[loser] = winner;
    }
};

// The footnote cascade: (name,email) -> email -> full name -> new identity.
// Empty keys never participate in the fallback matches.
inline int cascade_insert(CascadeState& st, const std::string& nk, const std::string& ek) {
    int by_pair = -1, by_email = -1, by_name = -1;
    for (size_t i = 0; i < st.identities.size(); ++i) {
        if (st.alive[i] != static_cast<int>(i))
            continue;
        const auto& ident = st.identities[i];
        bool has_n = !nk.empty() && ident.names.count(nk);
        bool has_e = !ek.empty() && ident.emails.count(ek);
        if (has_n && has_e && by_pair < 0)
            by_pair = static_cast<int>(i);
        if (has_e && by_email < 0)
            by_email = static_cast<int>(i);
        if (has_n && by_name < 0)
            by_name = static_cast<int>(i);
    }
    int hit = by_pair >= 0 ? by_pair : (by_email >= 0 ? by_email : by_name);
    if (hit < 0) {
        Identity fresh;
        if (!nk.empty())
            fresh.names.insert(nk);
        if (!ek.empty())
            fresh.emails.insert(ek);
        st.identities.push_back(std::move(fresh));
        st.alive.push_back(static_cast<int>(st.identities.size() - 1));
        return static_cast<int>(st.identities.size() - 1);
    }
    // adopt the raw's keys; if that makes the hit share a key with another
    // identity, fold that identity in (keeps email/name uniqueness)
    if (!nk.empty() && by_name >= 0 && by_name != hit)
        st.merge_into(hit, by_name);
    if (!ek.empty() && by_email >= 0 && by_email != hit)
        st.merge_into(hit, by_email);
    hit = st.find(hit);
    if (!nk.empty())
        st.identities[hit].names.insert(nk);
    if (!ek.empty())
        st.identities[hit].emails.insert(ek);
    return hit;
}

} // namespace detail

// Raws must arrive in temporal order of first appearance; the cascade is
// order-dependent by definition. within_column scope partitions the stream
// by (source_table, source_column) and matches independently per partition.
inline IdentityTable match_identities(const std::vector<RawIdentity>& raws, MatchScope scope) {
    using PartitionKey = std::pair<std::string, std::string>;
    std::map<PartitionKey, detail::CascadeState> states;
    auto key_of = [&](const RawIdentity& r) -> PartitionKey {
        if (scope == MatchScope::cross_column_and_table)
            return {"", ""};
        return {r.source_table, r.source_column};
    };

    struct Pending {
        RawIdentity raw;
        PartitionKey part;
        int provisional;
    };
    std::vector<Pending> pending;

    for (const auto& raw : raws) {
        auto [nk, ek] = normalize_identity(raw.name, raw.email);
        if (nk.empty() && ek.empty())
            continue;
        auto part = key_of(raw);
        int prov = detail::cascade_insert(states[part], nk, ek);
        pending.push_back({raw, part, prov});
    }

    // densify ids across partitions in first-appearance order
    IdentityTable table;
    std::map<std::pair<PartitionKey, int>, int> dense;
    for (auto& p : pending) {
        auto& st = states[p.part];
        int canon = st.find(p.provisional);
        auto key = std::make_pair(p.part, canon);
        auto it = dense.find(key);
        int id;
        if (it == dense.end()) {
            id = static_cast<int>(table.identities.size());
            dense[key] = id;
            Identity ident = st.identities[canon];
            ident.id = id;
            table.identities.push_back(std::move(ident));
        } else {
            id = it->second;
            table.identities[id] = [&] {
                Identity ident = st.identities[canon];
                ident.id = id;
                return ident;
            }();
        }
        table.mapping.push_back({p.raw, id});
    }
    return table;
}

} // namespace msr
