#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "msr/artifact.hpp"
#include "msr/simdiff.hpp"

namespace msr {

struct SeriesComparison {
    std::string metric;
    double ncd = 0.0;
    double dtw = 0.0;
    std::optional<double> spearman;
};

struct WindowGraphStats {
    int window_index = 0;
    double density_a = 0.0, density_b = 0.0;
    std::optional<double> mean_w_a, mean_w_b;
    std::optional<double> max_w_a, max_w_b;
    std::int64_t ged = 0;
};

struct ComparisonReport {
    std::vector<SeriesComparison> series;
    std::vector<OverlapReport> overlaps;
    std::vector<WindowGraphStats> graph_stats;
    std::map<std::string, std::vector<std::int64_t>> counts_a, counts_b;
    std::string config_a, config_b;
    std::string normalization_note =
        "dtw: series min-max normalized, cost divided by n+m; "
        "ncd: decimal CSV serialization, deflate level 9";
};

inline ComparisonReport compare_runs(const LoadedArtifact& a, const LoadedArtifact& b) {
    if (a.windows.size() != b.windows.size())
        throw WindowPlanMismatch("window counts differ: " + std::to_string(a.windows.size()) +
                                 " vs " + std::to_string(b.windows.size()));
    for (size_t i = 0; i < a.windows.size(); ++i)
        if (a.windows[i].start_ts != b.windows[i].start_ts ||
            a.windows[i].end_ts != b.windows[i].end_ts)
            throw WindowPlanMismatch("window " + std::to_string(i) + " boundaries differ");

    ComparisonReport rep;
    rep.counts_a = a.counts;
    rep.counts_b = b.counts;
    rep.config_a = a.config_snapshot;
    rep.config_b = b.config_snapshot;

    for (CountMetric m : {CountMetric::commits, CountMetric::files, CountMetric::entities,
                          CountMetric::developers}) {
        CountSeries xa{m, a.counts.at(to_string(m))};
        CountSeries xb{m, b.counts.at(to_string(m))};
        SeriesComparison sc;
        sc.metric = to_string(m);
        sc.ncd = ncd(xa, xb);
        sc.dtw = dtw(xa, xb);
        if (xa.values.size() >= 2)
            sc.spearman = spearman(xa, xb);
        rep.series.push_back(sc);
    }

    rep.overlaps.push_back(overlap(a.commit_hashes, b.commit_hashes, "commits"));
    rep.overlaps.push_back(overlap(a.file_names, b.file_names, "files"));
    rep.overlaps.push_back(overlap(a.entity_names, b.entity_names, "entities"));
    auto [la, lb] = align_identities(a.identities, b.identities);
    {
        std::set<std::string> da, db;
        for (const auto& [id, label] : la)
            da.insert(label);
        for (const auto& [id, label] : lb)
            db.insert(label);
        rep.overlaps.push_back(overlap(da, db, "developers"));
    }

    for (const auto& w : a.windows) {
        DeveloperNetwork na = a.networks.count(w.index) ? a.networks.at(w.index)
                                                        : DeveloperNetwork{};
        DeveloperNetwork nb = b.networks.count(w.index) ? b.networks.at(w.index)
                                                        : DeveloperNetwork{};
        WindowGraphStats gs;
        gs.window_index = w.index;
        gs.density_a = density(na);
        gs.density_b = density(nb);
        auto wa = weight_stats(na), wb = weight_stats(nb);
        gs.mean_w_a = wa.mean_nonzero;
        gs.mean_w_b = wb.mean_nonzero;
        gs.max_w_a = wa.max;
        gs.max_w_b = wb.max;
        gs.ged = graph_edit_distance(to_labeled(na, la), to_labeled(nb, lb));
        rep.graph_stats.push_back(gs);
    }
    return rep;
}

inline nlohmann::json report_json(const ComparisonReport& rep) {
    nlohmann::json j;
    j["series"] = nlohmann::json::array();
    for (const auto& s : rep.series) {
        nlohmann::json js{{"metric", s.metric}, {"ncd", s.ncd}, {"dtw", s.dtw}};
        js["spearman"] = s.spearman ? nlohmann::json(*s.spearman) : nlohmann::json(nullptr);
        j["series"].push_back(js);
    }
    j["overlaps"] = nlohmann::json::array();
    for (const auto& o : rep.overlaps)
        j["overlaps"].push_back({{"metric", o.metric},
                                 {"joint", o.joint},
                                 {"only_a", o.only_a},
                                 {"only_b", o.only_b},
                                 {"jaccard", o.jaccard},
                                 {"frac_of_a", o.frac_of_a},
                                 {"frac_of_b", o.frac_of_b}});
    j["graph_stats"] = nlohmann::json::array();
    auto opt = [](const std::optional<double>& v) {
        return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    for (const auto& g : rep.graph_stats)
        j["graph_stats"].push_back({{"window_index", g.window_index},
                                    {"density_a", g.density_a},
                                    {"density_b", g.density_b},
                                    {"mean_w_a", opt(g.mean_w_a)},
                                    {"mean_w_b", opt(g.mean_w_b)},
                                    {"max_w_a", opt(g.max_w_a)},
                                    {"max_w_b", opt(g.max_w_b)},
                                    {"ged", g.ged}});
    j["counts_a"] = rep.counts_a;
    j["counts_b"] = rep.counts_b;
    j["metadata"] = {{"config_a", rep.config_a},
                     {"config_b", rep.config_b},
                     {"normalization", rep.normalization_note}};
    return j;
}

// companion CSV: one row per window for plotting
inline std::string report_csv(const ComparisonReport& rep) {
    std::string out =
        "window_index,commits_a,commits_b,files_a,files_b,entities_a,entities_b,"
        "developers_a,developers_b,density_a,density_b,mean_w_a,mean_w_b,ged\n";
    auto opt = [](const std::optional<double>& v) {
        return v ? std::to_string(*v) : std::string();
    };
    for (const auto& g : rep.graph_stats) {
        size_t w = static_cast<size_t>(g.window_index);
        auto cnt = [&](const std::map<std::string, std::vector<std::int64_t>>& c,
                       const char* k) {
            return std::to_string(c.at(k).at(w));
        };
        out += csv_row({std::to_string(g.window_index), cnt(rep.counts_a, "commits"),
                        cnt(rep.counts_b, "commits"), cnt(rep.counts_a, "files"),
                        cnt(rep.counts_b, "files"), cnt(rep.counts_a, "entities"),
                        cnt(rep.counts_b, "entities"), cnt(rep.counts_a, "developers"),
                        cnt(rep.counts_b, "developers"), std::to_string(g.density_a),
                        std::to_string(g.density_b), opt(g.mean_w_a), opt(g.mean_w_b),
                        std::to_string(g.ged)});
    }
    return out;
}

// static SVG line charts of the four count series, two lines per panel
inline std::string report_svg(const ComparisonReport& rep) {
    const int panel_w = 360, panel_h = 200, pad = 40;
    const char* metrics[] = {"commits", "files", "entities", "developers"};
    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                      std::to_string(2 * panel_w) + "\" height=\"" +
                      std::to_string(2 * panel_h) + "\">\n";
    for (int p = 0; p < 4; ++p) {
        int ox = (p % 2) * panel_w, oy = (p / 2) * panel_h;
        const auto& va = rep.counts_a.at(metrics[p]);
        const auto& vb = rep.counts_b.at(metrics[p]);
        std::int64_t mx = 1;
        for (auto v : va)
            mx = std::max(mx, v);
        for (auto v : vb)
            mx = std::max(mx, v);
        size_t n = std::max<size_t>(va.size(), 2);
        auto polyline = [&](const std::vector<std::int64_t>& v, const char* color) {
            std::string pts;
            for (size_t i = 0; i < v.size(); ++i) {
                double x = ox + pad + (panel_w - 2.0 * pad) * static_cast<double>(i) /
                                          static_cast<double>(n - 1);
                double y = oy + panel_h - pad -
                           (panel_h - 2.0 * pad) * static_cast<double>(v[i]) /
                               static_cast<double>(mx);
                pts += std::to_string(x) + "," + std::to_string(y) + " ";
            }
            return "<polyline fill=\"none\" stroke=\"" + std::string(color) +
                   "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        };
        svg += "<text x=\"" + std::to_string(ox + pad) + "\" y=\"" + std::to_string(oy + 20) +
               "\" font-size=\"12\">" + metrics[p] + "</text>\n";
        svg += polyline(va, "#1f77b4");
        svg += polyline(vb, "#d62728");
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace msr
