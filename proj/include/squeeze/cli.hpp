#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "squeeze/constants.hpp"
#include "squeeze/evolution.hpp"
#include "squeeze/io/config.hpp"
#include "squeeze/io/output.hpp"
#include "squeeze/verification/estimate_suite.hpp"

namespace squeeze::cli {

enum ExitCode : int { ok = 0, error = 1, quench = 2 };

struct Options {
    std::filesystem::path config;
    std::filesystem::path out = "squeeze_out";
    std::optional<std::uint64_t> seed;
    std::optional<std::string> format;  // csv | json; per-command default when empty
    std::optional<double> window;
    bool quiet = false;
};

namespace detail {

inline SimConfig resolved_config(const Options& o) {
    SimConfig c = io::load_config(o.config);
    if (o.seed) c.seed = *o.seed;
    if (o.window) {
        if (!(*o.window >= 0.0)) throw ConfigError("--window must be non-negative");
        c.window = *o.window;
    }
    if (!c.tolerance_manifest.empty()) {
        std::filesystem::path p(c.tolerance_manifest);
        if (p.is_relative()) p = o.config.parent_path() / p;
        c.tolerance_manifest = std::filesystem::weakly_canonical(p).string();
    }
    return c;
}

inline std::string format_or(const Options& o, const std::string& fallback) {
    const std::string f = o.format.value_or(fallback);
    if (f != "csv" && f != "json" && f != "text") throw ConfigError("--format must be csv or json");
    return f;
}

template <class F>
int guarded(F&& body, bool quiet) {
    try {
        return body();
    } catch (const std::exception& e) {
        (void)quiet;
        std::cerr << "error: " << e.what() << "\n";
        return ExitCode::error;
    }
}

}  // namespace detail

/// Runs evolve and writes the time series, snapshots, manifest and (on quench) a quench record.
inline int cmd_simulate(const Options& o) {
    return detail::guarded([&] {
        const SimConfig cfg = detail::resolved_config(o);
        const std::string fmt = detail::format_or(o, "csv");
        if (fmt == "text") throw ConfigError("--format must be csv or json");
        const ConstantsLedger L = compute_constants(cfg);
        const Trajectory tr = evolve(cfg);

        std::vector<std::string> outputs;
        const std::string series = fmt == "csv" ? "timeseries.csv" : "timeseries.json";
        io::write_atomic(o.out / series, fmt == "csv" ? io::timeseries_csv(tr, cfg.params.theta_2)
                                                      : io::timeseries_json(tr, cfg.params.theta_2));
        outputs.push_back(series);
        if (cfg.snapshot_every > 0) {
            io::write_atomic(o.out / "snapshots.json", io::snapshots_json(tr, cfg.params.theta_2, cfg.snapshot_every));
            outputs.push_back("snapshots.json");
        }
        if (tr.quench) {
            io::write_atomic(o.out / "quench.json", io::quench_json(*tr.quench));
            outputs.push_back("quench.json");
        }
        io::write_atomic(o.out / "manifest.ini", io::manifest_ini(cfg, L, outputs));

        if (!o.quiet) {
            std::cout << "samples " << tr.size() << ", final t " << io::format_double(tr.times.empty() ? 0.0 : tr.times.back())
                      << ", T0 " << io::format_double(L.T0) << "\n";
            if (tr.outside_guarantee) std::cerr << "note: horizon exceeds the guaranteed existence time T0\n";
            if (!tr.inside_ball) std::cerr << "note: trajectory left the ball B_r around the initial gap\n";
        }
        if (tr.quench) {
            if (!o.quiet)
                std::cerr << "quench at t = " << io::format_double(tr.quench->time) << ", x = ("
                          << io::format_double(tr.quench->location[0]) << ", " << io::format_double(tr.quench->location[1])
                          << "), min gap " << io::format_double(tr.quench->min_gap) << "\n";
            return int(ExitCode::quench);
        }
        return int(ExitCode::ok);
    }, o.quiet);
}

/// Runs the estimate suite; exit 0 iff every item passes.
inline int cmd_verify(const Options& o) {
    return detail::guarded([&] {
        const SimConfig cfg = detail::resolved_config(o);
        const std::string fmt = detail::format_or(o, "json");
        if (fmt == "text") throw ConfigError("--format must be csv or json");
        const auto tol = io::effective_tolerances(cfg, {});
        for (const auto& [name, v] : tol)
            if (!default_tolerances().count(name)) throw ConfigError("unknown tolerance entry '" + name + "'");
        if (cfg.verify_trials == 0)
            std::cerr << "warning: [verify] trials = 0, nothing to check\n";
        const auto reports = run_estimate_suite(cfg, cfg.verify_trials, tol);
        const std::string name = fmt == "csv" ? "report.csv" : "report.json";
        io::write_atomic(o.out / name, fmt == "csv" ? io::report_csv(reports) : io::report_json(reports).dump(1) + "\n");
        bool all = true;
        for (const auto& r : reports) {
            all = all && r.pass;
            if (!o.quiet)
                std::cout << (r.pass ? "PASS " : "FAIL ") << r.name << "  " << fmt_g(r.max_error) << " <= "
                          << fmt_g(r.tolerance) << "  " << r.notes << "\n";
        }
        return int(all ? ExitCode::ok : ExitCode::error);
    }, o.quiet);
}

/// Prints the constants ledger with provenance.
inline int cmd_constants(const Options& o) {
    return detail::guarded([&] {
        const SimConfig cfg = detail::resolved_config(o);
        const std::string fmt = detail::format_or(o, "text");
        ConstantsLedger L = compute_constants(cfg);
        if (cfg.verify_trials > 0) measure_into(L, cfg, cfg.verify_trials, cfg.seed);
        if (fmt == "json")
            std::cout << io::ledger_json(L).dump(1) << "\n";
        else if (fmt == "csv")
            std::cout << io::ledger_csv(L);
        else
            std::cout << io::ledger_text(L);
        return int(ExitCode::ok);
    }, o.quiet);
}

struct SweepRow {
    io::SweepSpec::Point point;
    std::string status;  // ok | quench | error
    double T0 = std::numeric_limits<double>::quiet_NaN();
    double end_time = std::numeric_limits<double>::quiet_NaN();
    double quench_time = std::numeric_limits<double>::quiet_NaN();
    double max_contraction = std::numeric_limits<double>::quiet_NaN();  // Picard ratios over [0, T0/2]
    std::string message;
};

inline SweepRow run_sweep_point(const io::SweepSpec::Point& p, std::optional<double> window) {
    SweepRow row;
    row.point = p;
    row.status = "ok";
    try {
        SimConfig c = p.config;
        if (window) c.window = *window;
        row.T0 = compute_constants(c).T0;
        const Trajectory tr = evolve(c);
        row.end_time = tr.times.empty() ? 0.0 : tr.times.back();
        row.max_contraction = contraction_study(c, false).max_ratio;
        if (tr.quench) {
            row.status = "quench";
            row.quench_time = tr.quench->time;
        }
    } catch (const std::exception& e) {
        row.status = "error";
        row.message = e.what();
    }
    return row;
}

inline std::size_t sweep_threads(std::size_t jobs) {
    std::size_t n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("SQUEEZE_SIM_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) n = static_cast<std::size_t>(v);
    }
    return std::max<std::size_t>(1, std::min(n, jobs));
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows) {
    auto quote = [](const std::string& s) {
        std::string q = "\"";
        for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
        return q + "\"";
    };
    std::string out = "index,beta_F,beta_p,theta_1,theta_2,resolution,status,T0,end_time,quench_time,max_contraction,message\r\n";
    for (const auto& r : rows) {
        const auto& p = r.point;
        out += std::to_string(p.index) + ',' + io::csv_number(p.beta_F) + ',' + io::csv_number(p.beta_p) + ',' +
               io::csv_number(p.theta_1) + ',' + io::csv_number(p.theta_2) + ',' + std::to_string(p.resolution) + ',' +
               r.status + ',' + io::csv_number(r.T0) + ',' + io::csv_number(r.end_time) + ',' +
               io::csv_number(r.quench_time) + ',' + io::csv_number(r.max_contraction) + ',' + quote(r.message) + "\r\n";
    }
    return out;
}

/// Runs every grid point of a sweep file concurrently; rows ordered by grid index.
inline int cmd_sweep(const Options& o) {
    return detail::guarded([&] {
        const io::SweepSpec spec = io::load_sweep(o.config);
        const std::string fmt = detail::format_or(o, "csv");
        const auto points = spec.points();
        std::vector<SweepRow> rows(points.size());
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i; (i = next.fetch_add(1)) < points.size();) rows[i] = run_sweep_point(points[i], o.window);
        };
        std::vector<std::thread> pool;
        for (std::size_t t = 1; t < sweep_threads(points.size()); ++t) pool.emplace_back(worker);
        worker();
        for (auto& t : pool) t.join();

        if (fmt == "json") {
            nlohmann::json j = nlohmann::json::array();
            for (const auto& r : rows)
                j.push_back({{"index", r.point.index}, {"beta_F", r.point.beta_F}, {"beta_p", r.point.beta_p},
                             {"theta_1", r.point.theta_1}, {"theta_2", r.point.theta_2},
                             {"resolution", r.point.resolution}, {"status", r.status}, {"T0", io::csv_number(r.T0)},
                             {"end_time", io::csv_number(r.end_time)}, {"quench_time", io::csv_number(r.quench_time)},
                             {"max_contraction", io::csv_number(r.max_contraction)}, {"message", r.message}});
            io::write_atomic(o.out / "summary.json", j.dump(1) + "\n");
        } else {
            io::write_atomic(o.out / "summary.csv", sweep_csv(rows));
        }
        std::size_t good = 0;
        for (const auto& r : rows) {
            good += r.status != "error";
            if (!o.quiet)
                std::cout << r.point.index << " " << r.status << " T0 " << io::format_double(r.T0)
                          << (r.message.empty() ? "" : "  " + r.message) << "\n";
        }
        return int(good > 0 ? ExitCode::ok : ExitCode::error);
    }, o.quiet);
}

}  // namespace squeeze::cli
