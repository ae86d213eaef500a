#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "squeeze/constants.hpp"
#include "squeeze/errors.hpp"
#include "squeeze/io/config.hpp"
#include "squeeze/model.hpp"
#include "squeeze/verification/oracle_report.hpp"

namespace squeeze::io {

inline constexpr const char* tool_version = "0.1.0";

/// Writes `content` to a sibling temporary file, then renames it into place.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write '" + tmp.string() + "'");
        out << content;
        out.flush();
        if (!out) throw ConfigError("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

/// 17 significant digits: exact and locale-independent.
inline std::string csv_number(double x) {
    if (x == 0.0) x = 0.0;  // no "-0"
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

struct SeriesRow {
    double t, min_gap, X_norm, ball_distance, u_center, w_center;
};

inline std::vector<SeriesRow> series_rows(const Trajectory& tr, double theta_2) {
    std::vector<SeriesRow> rows;
    rows.reserve(tr.size());
    for (std::size_t i = 0; i < tr.size(); ++i) {
        const Grid& g = tr.states[i].grid();
        const std::size_t c = g.center_node();
        const GridField w = dst_inverse(tr.states[i].w);
        rows.push_back({tr.times[i], tr.min_gap[i], tr.X_norm[i], tr.ball_distance[i], tr.pressures[i].values[c],
                        w.values[c] + theta_2});
    }
    return rows;
}

inline std::string timeseries_csv(const Trajectory& tr, double theta_2) {
    std::string out = "t,min_gap,X_norm,ball_distance,u_center,w_center\r\n";
    for (const auto& r : series_rows(tr, theta_2)) {
        out += csv_number(r.t) + ',' + csv_number(r.min_gap) + ',' + csv_number(r.X_norm) + ',' +
               csv_number(r.ball_distance) + ',' + csv_number(r.u_center) + ',' + csv_number(r.w_center) + "\r\n";
    }
    return out;
}

inline nlohmann::json grid_json(const Grid& g) {
    nlohmann::json j;
    j["dim"] = g.dim();
    for (int a = 0; a < g.dim(); ++a)
        j["axes"].push_back({{"length", g.axis(a).length},
                             {"n_interior", g.axis(a).n_interior},
                             {"n_modes", g.axis(a).n_modes}});
    return j;
}

inline std::string timeseries_json(const Trajectory& tr, double theta_2) {
    nlohmann::json j = nlohmann::json::object();
    for (const char* k : {"t", "min_gap", "X_norm", "ball_distance", "u_center", "w_center"}) j[k] = nlohmann::json::array();
    for (const auto& r : series_rows(tr, theta_2)) {
        j["t"].push_back(r.t);
        j["min_gap"].push_back(r.min_gap);
        j["X_norm"].push_back(r.X_norm);
        j["ball_distance"].push_back(r.ball_distance);
        j["u_center"].push_back(r.u_center);
        j["w_center"].push_back(r.w_center);
    }
    return j.dump(1) + "\n";
}

/// Every `every`-th sample: nodal gap w, velocity v and pressure u.
inline std::string snapshots_json(const Trajectory& tr, double theta_2, std::size_t every) {
    nlohmann::json j;
    j["grid"] = grid_json(tr.states.empty() ? Grid::interval(1, 1, 1) : tr.states.front().grid());
    j["theta_2"] = theta_2;
    j["snapshots"] = nlohmann::json::array();
    for (std::size_t i = 0; every > 0 && i < tr.size(); i += every) {
        GridField w = dst_inverse(tr.states[i].w);
        for (auto& x : w.values) x += theta_2;
        j["snapshots"].push_back({{"index", i},
                                  {"t", tr.times[i]},
                                  {"w", w.values},
                                  {"v", dst_inverse(tr.states[i].v).values},
                                  {"u", tr.pressures[i].values}});
    }
    return j.dump() + "\n";
}

inline std::string quench_json(const QuenchEvent& q) {
    nlohmann::json j{{"time", q.time}, {"location", {q.location[0], q.location[1]}}, {"min_gap", q.min_gap}};
    return j.dump(1) + "\n";
}

inline nlohmann::json ledger_json(const ConstantsLedger& L) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& e : L.entries()) {
        nlohmann::json row{{"name", e.name}, {"provenance", e.provenance}, {"note", e.note}};
        // JSON has no infinity; keep it readable
        if (std::isfinite(e.value))
            row["value"] = e.value;
        else
            row["value"] = std::isnan(e.value) ? "nan" : (e.value > 0 ? "inf" : "-inf");
        j.push_back(row);
    }
    return j;
}

inline std::string ledger_text(const ConstantsLedger& L) {
    std::ostringstream o;
    for (const auto& e : L.entries()) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%-18s %-24.10g", e.name.c_str(), e.value);
        o << buf << e.provenance;
        if (!e.note.empty()) o << "  (" << e.note << ")";
        o << "\n";
    }
    return o.str();
}

inline std::string ledger_csv(const ConstantsLedger& L) {
    std::string out = "name,value,provenance\r\n";
    for (const auto& e : L.entries()) out += e.name + ',' + csv_number(e.value) + ',' + e.provenance + "\r\n";
    return out;
}

/// The fully resolved config plus ledger and run metadata; loadable as a config.
inline std::string manifest_ini(const SimConfig& cfg, const ConstantsLedger& L, const std::vector<std::string>& outputs) {
    std::ostringstream o;
    o << serialize_config(cfg) << "\n[ledger]\n";
    for (const auto& e : L.entries()) o << e.name << " = " << csv_number(e.value) << "\n";
    o << "\n[provenance]\n";
    for (const auto& e : L.entries()) o << e.name << " = " << e.provenance << "\n";
    o << "\n[run]\n"
      << "seed = " << cfg.seed << "\n"
      << "tool_version = " << tool_version << "\n"
      << "outputs = ";
    for (std::size_t i = 0; i < outputs.size(); ++i) o << (i ? " " : "") << outputs[i];
    o << "\n";
    return o.str();
}

inline nlohmann::json report_json(const std::vector<OracleReport>& reports) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& r : reports) {
        nlohmann::json row{{"name", r.name}, {"tolerance", r.tolerance}, {"pass", r.pass},
                           {"samples", r.samples}, {"notes", r.notes}, {"seed", r.seed}};
        if (std::isfinite(r.max_error))
            row["max_error"] = r.max_error;
        else
            row["max_error"] = std::isnan(r.max_error) ? "nan" : "inf";
        j.push_back(row);
    }
    return j;
}

inline std::string report_csv(const std::vector<OracleReport>& reports) {
    auto quote = [](const std::string& s) {
        std::string q = "\"";
        for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
    };
    std::string out = "name,max_error,tolerance,pass,samples,seed,notes\r\n";
    for (const auto& r : reports)
        out += r.name + ',' + csv_number(r.max_error) + ',' + csv_number(r.tolerance) + ',' + (r.pass ? "true" : "false") +
               ',' + std::to_string(r.samples) + ',' + std::to_string(r.seed) + ',' + quote(r.notes) + "\r\n";
    return out;
}

}  // namespace squeeze::io
