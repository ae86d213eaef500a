#pragma once

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "squeeze/errors.hpp"
#include "squeeze/model.hpp"

namespace squeeze::io {

namespace pt = boost::property_tree;

/// Shortest text that parses back to exactly `x`.
inline std::string format_double(double x) {
    char buf[32];
    for (int digits = 15; digits <= 17; ++digits) {
        std::snprintf(buf, sizeof buf, "%.*g", digits, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

namespace detail {

inline std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

/// Source text of an INI document; used only to point diagnostics at a line.
class SourceMap {
public:
    SourceMap(std::string origin, const std::string& text) : origin_(std::move(origin)) {
        std::istringstream in(text);
        std::string line, section;
        for (int n = 1; std::getline(in, line); ++n) {
            const std::string t = trim(line);
            if (t.empty() || t[0] == ';' || t[0] == '#') continue;
            if (t.front() == '[' && t.back() == ']') {
                section = trim(t.substr(1, t.size() - 2));
                lines_[section] = n;
            } else if (auto eq = t.find('='); eq != std::string::npos) {
                lines_[section + "." + trim(t.substr(0, eq))] = n;
            }
        }
    }

    std::string where(const std::string& section, const std::string& key = {}) const {
        const std::string id = key.empty() ? section : section + "." + key;
        std::string out = origin_;
        if (auto it = lines_.find(id); it != lines_.end()) out += ":" + std::to_string(it->second);
        return out + ": [" + section + "]" + (key.empty() ? "" : " " + key);
    }

private:
    std::string origin_;
    std::map<std::string, int> lines_;
};

class Reader {
public:
    Reader(const pt::ptree& tree, const SourceMap& src) : tree_(tree), src_(src) {}

    std::optional<std::string> raw(const std::string& sec, const std::string& key) const {
        seen_.insert(sec + "." + key);
        const auto s = tree_.get_child_optional(pt::ptree::path_type(sec, '\x1f'));
        if (!s) return std::nullopt;
        const auto v = s->get_child_optional(pt::ptree::path_type(key, '\x1f'));
        if (!v) return std::nullopt;
        return trim(v->data());
    }

    double number(const std::string& sec, const std::string& key, double fallback) const {
        const auto r = raw(sec, key);
        if (!r) return fallback;
        return parse_number(*r, sec, key);
    }

    double parse_number(const std::string& text, const std::string& sec, const std::string& key) const {
        double x = 0.0;
        const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
        if (res.ec != std::errc() || res.ptr != text.data() + text.size() || text.empty())
            fail(sec, key, "expected a number, got '" + text + "'");
        return x;
    }

    template <class Int>
    Int integer(const std::string& sec, const std::string& key, Int fallback) const {
        const auto r = raw(sec, key);
        if (!r) return fallback;
        Int x{};
        const auto res = std::from_chars(r->data(), r->data() + r->size(), x);
        if (res.ec != std::errc() || res.ptr != r->data() + r->size() || r->empty())
            fail(sec, key, "expected a non-negative integer, got '" + *r + "'");
        return x;
    }

    [[noreturn]] void fail(const std::string& sec, const std::string& key, const std::string& msg) const {
        throw ConfigError(src_.where(sec, key) + ": " + msg);
    }

    /// Rejects keys nobody asked for, so typos do not pass silently.
    void reject_unknown(const std::set<std::string>& passthrough_sections) const {
        for (const auto& [sec, body] : tree_) {
            if (passthrough_sections.count(sec)) continue;
            if (body.empty() && !body.data().empty()) throw ConfigError(src_.where(sec) + ": key outside any section");
            for (const auto& [key, val] : body)
                if (!seen_.count(sec + "." + key)) fail(sec, key, "unknown key");
        }
    }

    const SourceMap& source() const { return src_; }

private:
    const pt::ptree& tree_;
    const SourceMap& src_;
    mutable std::set<std::string> seen_;
};

inline std::vector<ModeAmp> parse_modes(const Reader& r, const std::string& sec, const std::string& key, int dim) {
    std::vector<ModeAmp> out;
    const auto text = r.raw(sec, key);
    if (!text) return out;
    std::string norm = *text;
    for (char& c : norm)
        if (c == ';') c = ' ';
    std::istringstream in(norm);
    std::string item;
    while (in >> item) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) r.fail(sec, key, "expected 'k:amp' entries, got '" + item + "'");
        const std::string waves = item.substr(0, colon);
        ModeAmp m;
        m.amp = r.parse_number(item.substr(colon + 1), sec, key);
        auto wave = [&](const std::string& w) {
            std::size_t k = 0;
            const auto res = std::from_chars(w.data(), w.data() + w.size(), k);
            if (res.ec != std::errc() || res.ptr != w.data() + w.size() || k < 1)
                r.fail(sec, key, "bad wave number '" + w + "' in '" + item + "'");
            return k;
        };
        if (const auto comma = waves.find(','); comma != std::string::npos) {
            if (dim != 2) r.fail(sec, key, "'kx,ky:amp' entries need dim = 2");
            m.kx = wave(waves.substr(0, comma));
            m.ky = wave(waves.substr(comma + 1));
        } else {
            if (dim != 1) r.fail(sec, key, "entries must be 'kx,ky:amp' when dim = 2");
            m.kx = wave(waves);
        }
        out.push_back(m);
    }
    return out;
}

inline std::string format_modes(const std::vector<ModeAmp>& modes, int dim) {
    std::string s;
    for (const auto& m : modes) {
        if (!s.empty()) s += ' ';
        s += std::to_string(m.kx);
        if (dim == 2) s += "," + std::to_string(m.ky);
        s += ":" + format_double(m.amp);
    }
    return s;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline pt::ptree parse_ini(const std::string& text, const std::string& origin) {
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(origin + ":" + std::to_string(e.line()) + ": " + e.message());
    }
    return tree;
}

}  // namespace detail

/// Sections a run manifest adds on top of a config; ignored when loading.
inline const std::set<std::string>& manifest_sections() {
    static const std::set<std::string> s = {"ledger", "provenance", "run"};
    return s;
}

/// Parses INI text into a validated config. `origin` prefixes diagnostics.
inline SimConfig parse_config(const std::string& text, const std::string& origin = "<config>") {
    const pt::ptree tree = detail::parse_ini(text, origin);
    const detail::SourceMap src(origin, text);
    const detail::Reader r(tree, src);
    SimConfig c;

    c.params.beta_F = r.number("physics", "beta_F", c.params.beta_F);
    c.params.beta_p = r.number("physics", "beta_p", c.params.beta_p);
    c.params.theta_1 = r.number("physics", "theta_1", c.params.theta_1);
    c.params.theta_2 = r.number("physics", "theta_2", c.params.theta_2);

    const int dim = r.integer<int>("domain", "dim", 1);
    if (dim != 1 && dim != 2) r.fail("domain", "dim", "must be 1 or 2");
    const double length = r.number("domain", "length", 1.0);
    const auto n = r.integer<std::size_t>("domain", "n_interior", 128);
    const auto k = r.integer<std::size_t>("domain", "n_modes", n);
    try {
        if (dim == 1) {
            for (const char* key : {"length_y", "n_interior_y", "n_modes_y"})
                if (r.raw("domain", key)) r.fail("domain", key, "only valid when dim = 2");
            c.grid = Grid::interval(length, n, k);
        } else {
            const double ly = r.number("domain", "length_y", length);
            const auto ny = r.integer<std::size_t>("domain", "n_interior_y", n);
            const auto ky = r.integer<std::size_t>("domain", "n_modes_y", ny);
            c.grid = Grid::rectangle({length, ly}, {n, ny}, {k, ky});
        }
    } catch (const ConfigError& e) {
        if (std::string(e.what()).rfind(origin, 0) == 0) throw;
        throw ConfigError(src.where("domain") + ": " + e.what());
    }

    c.w0_modes = detail::parse_modes(r, "initial", "w0", dim);
    c.v0_modes = detail::parse_modes(r, "initial", "v0", dim);

    c.horizon = r.number("time", "horizon", c.horizon);
    c.dt = r.number("time", "dt", c.dt);
    c.window = r.number("time", "window", c.window);

    c.picard_tol = r.number("solver", "picard_tol", c.picard_tol);
    c.picard_max_iters = r.integer<int>("solver", "picard_max_iters", c.picard_max_iters);
    if (auto br = r.raw("solver", "ball_radius"); br && *br != "auto")
        c.ball_radius = r.parse_number(*br, "solver", "ball_radius");
    c.quench_margin = r.number("solver", "quench_margin", c.quench_margin);
    c.quench_floor = r.number("solver", "quench_floor", c.quench_floor);

    c.snapshot_every = r.integer<std::size_t>("output", "snapshot_every", c.snapshot_every);

    c.verify_trials = r.integer<std::size_t>("verify", "trials", c.verify_trials);
    c.seed = r.integer<std::uint64_t>("verify", "seed", c.seed);
    c.tolerance_manifest = r.raw("verify", "tolerance_manifest").value_or("");

    if (const auto tol = tree.get_child_optional("tolerances"))
        for (const auto& [key, val] : *tol) {
            (void)val;
            c.tolerances[key] = r.number("tolerances", key, 0.0);
        }

    r.reject_unknown(manifest_sections());

    try {
        c.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    return c;
}

inline SimConfig load_config(const std::filesystem::path& path) {
    return parse_config(detail::read_file(path), path.string());
}

/// INI text that parse_config maps back to an identical config.
inline std::string serialize_config(const SimConfig& c) {
    std::ostringstream o;
    const auto& g = c.grid;
    o << "[physics]\n"
      << "beta_F = " << format_double(c.params.beta_F) << "\n"
      << "beta_p = " << format_double(c.params.beta_p) << "\n"
      << "theta_1 = " << format_double(c.params.theta_1) << "\n"
      << "theta_2 = " << format_double(c.params.theta_2) << "\n\n";
    o << "[domain]\n"
      << "dim = " << g.dim() << "\n"
      << "length = " << format_double(g.axis(0).length) << "\n"
      << "n_interior = " << g.axis(0).n_interior << "\n"
      << "n_modes = " << g.axis(0).n_modes << "\n";
    if (g.dim() == 2)
        o << "length_y = " << format_double(g.axis(1).length) << "\n"
          << "n_interior_y = " << g.axis(1).n_interior << "\n"
          << "n_modes_y = " << g.axis(1).n_modes << "\n";
    o << "\n[initial]\n"
      << "w0 = " << detail::format_modes(c.w0_modes, g.dim()) << "\n"
      << "v0 = " << detail::format_modes(c.v0_modes, g.dim()) << "\n\n";
    o << "[time]\n"
      << "horizon = " << format_double(c.horizon) << "\n"
      << "dt = " << format_double(c.dt) << "\n"
      << "window = " << format_double(c.window) << "\n\n";
    o << "[solver]\n"
      << "picard_tol = " << format_double(c.picard_tol) << "\n"
      << "picard_max_iters = " << c.picard_max_iters << "\n"
      << "ball_radius = " << (c.ball_radius ? format_double(*c.ball_radius) : std::string("auto")) << "\n"
      << "quench_margin = " << format_double(c.quench_margin) << "\n"
      << "quench_floor = " << format_double(c.quench_floor) << "\n\n";
    o << "[output]\n"
      << "snapshot_every = " << c.snapshot_every << "\n\n";
    o << "[verify]\n"
      << "trials = " << c.verify_trials << "\n"
      << "seed = " << c.seed << "\n"
      << "tolerance_manifest = " << c.tolerance_manifest << "\n";
    if (!c.tolerances.empty()) {
        o << "\n[tolerances]\n";
        for (const auto& [k, v] : c.tolerances) o << k << " = " << format_double(v) << "\n";
    }
    return o.str();
}

/// Tolerances from a manifest file: a [tolerances] section of name = value.
inline std::map<std::string, double> load_tolerance_manifest(const std::filesystem::path& path) {
    const std::string text = detail::read_file(path);
    const pt::ptree tree = detail::parse_ini(text, path.string());
    const detail::SourceMap src(path.string(), text);
    const detail::Reader r(tree, src);
    std::map<std::string, double> out;
    if (const auto tol = tree.get_child_optional("tolerances"))
        for (const auto& [key, val] : *tol) {
            (void)val;
            out[key] = r.number("tolerances", key, 0.0);
        }
    r.reject_unknown({});
    return out;
}

/// Manifest file (resolved against `base_dir`), then the config's own [tolerances] on top.
inline std::map<std::string, double> effective_tolerances(const SimConfig& c, const std::filesystem::path& base_dir) {
    std::map<std::string, double> out;
    if (!c.tolerance_manifest.empty()) {
        std::filesystem::path p(c.tolerance_manifest);
        if (p.is_relative()) p = base_dir / p;
        out = load_tolerance_manifest(p);
    }
    for (const auto& [k, v] : c.tolerances) out[k] = v;
    return out;
}

/// A parameter grid over a base config. Axes vary in the fixed order below,
/// the last one fastest.
struct SweepSpec {
    SimConfig base;
    std::filesystem::path base_path;
    std::vector<double> beta_F, beta_p, theta_1, theta_2;
    std::vector<std::size_t> resolution;  // n_interior = n_modes on every axis

    struct Point {
        std::size_t index = 0;
        SimConfig config;
        double beta_F, beta_p, theta_1, theta_2;
        std::size_t resolution;
    };

    std::vector<Point> points() const {
        auto axis = [](const std::vector<double>& v, double d) { return v.empty() ? std::vector<double>{d} : v; };
        const auto bf = axis(beta_F, base.params.beta_F), bp = axis(beta_p, base.params.beta_p),
                   t1 = axis(theta_1, base.params.theta_1), t2 = axis(theta_2, base.params.theta_2);
        const auto res = resolution.empty() ? std::vector<std::size_t>{base.grid.axis(0).n_interior} : resolution;
        std::vector<Point> out;
        for (double a : bf)
            for (double b : bp)
                for (double c1 : t1)
                    for (double c2 : t2)
                        for (std::size_t n : res) {
                            Point pnt{out.size(), base, a, b, c1, c2, n};
                            pnt.config.params = {a, b, c1, c2};
                            if (!resolution.empty()) {
                                const Grid& g = base.grid;
                                pnt.config.grid = g.dim() == 1
                                                      ? Grid::interval(g.axis(0).length, n, n)
                                                      : Grid::rectangle({g.axis(0).length, g.axis(1).length}, {n, n}, {n, n});
                            }
                            out.push_back(std::move(pnt));
                        }
        return out;
    }
};

inline SweepSpec load_sweep(const std::filesystem::path& path) {
    const std::string text = detail::read_file(path);
    const pt::ptree tree = detail::parse_ini(text, path.string());
    const detail::SourceMap src(path.string(), text);
    const detail::Reader r(tree, src);
    SweepSpec s;
    const auto base = r.raw("sweep", "base");
    if (!base || base->empty()) r.fail("sweep", "base", "missing base config path");
    s.base_path = std::filesystem::path(*base);
    if (s.base_path.is_relative()) s.base_path = path.parent_path() / s.base_path;
    s.base = load_config(s.base_path);

    auto list = [&](const std::string& key) {
        std::vector<double> v;
        if (const auto text = r.raw("sweep", key)) {
            std::string t = *text;
            for (char& ch : t)
                if (ch == ',' || ch == ';') ch = ' ';
            std::istringstream in(t);
            std::string item;
            while (in >> item) v.push_back(r.parse_number(item, "sweep", key));
        }
        return v;
    };
    s.beta_F = list("beta_F");
    s.beta_p = list("beta_p");
    s.theta_1 = list("theta_1");
    s.theta_2 = list("theta_2");
    for (double x : list("resolution")) {
        if (!(x >= 1.0) || x != static_cast<double>(static_cast<std::size_t>(x)))
            r.fail("sweep", "resolution", "expected positive integers");
        s.resolution.push_back(static_cast<std::size_t>(x));
    }
    r.reject_unknown({});
    for (const auto& p : s.points()) {
        try {
            p.config.validate();
        } catch (const ConfigError& e) {
            throw ConfigError(src.where("sweep") + ": grid point " + std::to_string(p.index) + ": " + e.what());
        }
    }
    return s;
}

}  // namespace squeeze::io
