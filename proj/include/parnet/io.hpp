#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "dataset.hpp"
#include "types.hpp"

namespace parnet {

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

inline double parse_double(const std::string& s, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw ParseError("");
        return v;
    } catch (...) {
        throw ParseError("line " + std::to_string(line_no) + ": bad number '" + s + "'");
    }
}

inline std::uint64_t parse_u64(const std::string& s, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        std::uint64_t v = std::stoull(s, &pos);
        if (pos != s.size()) throw ParseError("");
        return v;
    } catch (...) {
        throw ParseError("line " + std::to_string(line_no) + ": bad integer '" + s + "'");
    }
}

}  // namespace detail

inline constexpr const char* kDatasetMagic = "# parnet dataset v1";

inline void save_dataset(const Dataset& ds, const std::string& path) {
    std::ofstream out(path);
    require(out.good(), "save_dataset: cannot open " + path);
    out << kDatasetMagic << "\n";
    const SynthesisConfig& c = ds.config;
    out << std::setprecision(17);
    out << "# config degree=" << c.degree << " num_ctrl=" << c.num_ctrl_points
        << " sigma_x=" << c.sigma_x << " sigma_y=" << c.sigma_y
        << " mu_start=" << c.mu_start << " delta_mu=" << c.delta_mu << " l=" << c.l
        << " mode=" << to_string(c.mode) << " density=" << c.intersection_density
        << " seed=" << c.seed << "\n";
    out << "# count " << ds.instances.size() << "\n";
    out << "# test";
    std::unordered_set<std::uint64_t> seen;
    for (const auto& inst : ds.instances)
        if (inst.in_test && seen.insert(inst.curve_id).second) out << " " << inst.curve_id;
    out << "\n";
    for (const auto& inst : ds.instances) {
        out << inst.curve_id << "," << (inst.flipped ? 1 : 0);
        for (const auto& p : inst.points) out << "," << p.x;
        for (const auto& p : inst.points) out << "," << p.y;
        out << "\n";
    }
    require(out.good(), "save_dataset: write failed for " + path);
}

inline Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw ParseError("load_dataset: cannot open " + path);
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || line != kDatasetMagic)
        throw ParseError("line 1: not a dataset file (bad magic)");

    Dataset ds;
    std::unordered_set<std::uint64_t> test_ids;
    std::size_t declared = 0;
    while (in.peek() == '#' && std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string hash, key;
        ls >> hash >> key;
        if (key == "config") {
            std::string tok;
            while (ls >> tok) {
                auto kv = detail::split(tok, '=');
                if (kv.size() != 2)
                    throw ParseError("line " + std::to_string(line_no) +
                                     ": bad config token '" + tok + "'");
                const std::string &k = kv[0], &v = kv[1];
                if (k == "degree")
                    ds.config.degree = static_cast<int>(detail::parse_u64(v, line_no));
                else if (k == "num_ctrl")
                    ds.config.num_ctrl_points = detail::parse_u64(v, line_no);
                else if (k == "sigma_x")
                    ds.config.sigma_x = detail::parse_double(v, line_no);
                else if (k == "sigma_y")
                    ds.config.sigma_y = detail::parse_double(v, line_no);
                else if (k == "mu_start")
                    ds.config.mu_start = detail::parse_double(v, line_no);
                else if (k == "delta_mu")
                    ds.config.delta_mu = detail::parse_double(v, line_no);
                else if (k == "l")
                    ds.config.l = detail::parse_u64(v, line_no);
                else if (k == "mode")
                    ds.config.mode = sampling_mode_from(v);
                else if (k == "density")
                    ds.config.intersection_density =
                        static_cast<int>(detail::parse_u64(v, line_no));
                else if (k == "seed")
                    ds.config.seed = detail::parse_u64(v, line_no);
                else
                    throw ParseError("line " + std::to_string(line_no) +
                                     ": unknown config key '" + k + "'");
            }
        } else if (key == "count") {
            ls >> declared;
        } else if (key == "test") {
            std::uint64_t id;
            while (ls >> id) test_ids.insert(id);
        } else {
            throw ParseError("line " + std::to_string(line_no) + ": unknown header '" +
                             key + "'");
        }
    }

    const std::size_t l = ds.config.l;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto tok = detail::split(line, ',');
        if (tok.size() != 2 + 2 * l)
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(2 + 2 * l) + " fields, got " +
                             std::to_string(tok.size()));
        Instance inst;
        inst.curve_id = detail::parse_u64(tok[0], line_no);
        inst.flipped = detail::parse_u64(tok[1], line_no) != 0;
        inst.in_test = test_ids.count(inst.curve_id) > 0;
        inst.points.resize(l);
        for (std::size_t i = 0; i < l; ++i) {
            inst.points[i].x = detail::parse_double(tok[2 + i], line_no);
            inst.points[i].y = detail::parse_double(tok[2 + l + i], line_no);
        }
        ds.instances.push_back(std::move(inst));
    }
    if (declared != 0 && declared != ds.instances.size())
        throw ParseError("dataset: header declares " + std::to_string(declared) +
                         " instances, file has " + std::to_string(ds.instances.size()));
    return ds;
}

/// Flat key=value config file; '#' starts a comment, blank lines skipped.
inline std::vector<std::pair<std::string, std::string>> load_config_file(
    const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw ParseError("load_config_file: cannot open " + path);
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(line_no) + ": expected key=value");
        auto strip = [](std::string s) {
            auto a = s.find_first_not_of(" \t");
            auto b = s.find_last_not_of(" \t");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        std::string key = strip(line.substr(0, eq)), value = strip(line.substr(eq + 1));
        if (key.empty())
            throw ParseError("line " + std::to_string(line_no) + ": empty key");
        entries.emplace_back(key, value);
    }
    return entries;
}

inline constexpr const char* kCurveMagic = "# parnet curve v1";

/// Decimal text: degree, the knot values, then one control point per line.
inline void save_curve(const BSplineCurve& curve, const std::string& path) {
    std::ofstream out(path);
    require(out.good(), "save_curve: cannot open " + path);
    out << kCurveMagic << "\n" << std::setprecision(17);
    out << "degree " << curve.knots().degree() << "\n";
    out << "knots";
    for (double v : curve.knots().values()) out << " " << v;
    out << "\n";
    out << "ctrl " << curve.control_points().size() << "\n";
    for (const Vec2& c : curve.control_points()) out << c.x << " " << c.y << "\n";
    require(out.good(), "save_curve: write failed for " + path);
}

inline BSplineCurve load_curve(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw ParseError("load_curve: cannot open " + path);
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || line != kCurveMagic)
        throw ParseError("load_curve: not a curve file");
    int degree = -1;
    std::vector<double> knots;
    PointSeq ctrl;
    std::size_t ctrl_declared = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "degree") {
            std::string v;
            ls >> v;
            degree = static_cast<int>(detail::parse_u64(v, line_no));
        } else if (key == "knots") {
            std::string v;
            while (ls >> v) knots.push_back(detail::parse_double(v, line_no));
        } else if (key == "ctrl") {
            std::string v;
            ls >> v;
            ctrl_declared = detail::parse_u64(v, line_no);
            break;
        } else {
            throw ParseError("line " + std::to_string(line_no) + ": unknown key '" + key +
                             "'");
        }
    }
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = detail::split(line, ' ');
        if (fields.size() != 2)
            throw ParseError("line " + std::to_string(line_no) + ": expected 'x y'");
        ctrl.push_back({detail::parse_double(fields[0], line_no),
                        detail::parse_double(fields[1], line_no)});
    }
    if (degree < 0) throw ParseError("load_curve: missing degree");
    if (ctrl.size() != ctrl_declared)
        throw ParseError("load_curve: declared " + std::to_string(ctrl_declared) +
                         " control points, found " + std::to_string(ctrl.size()));
    return BSplineCurve(KnotVector(std::move(knots), degree), std::move(ctrl));
}

inline constexpr const char* kPointsMagic = "# parnet points v1";

/// One "x y" pair per line; comment and blank lines are skipped on read.
inline void save_points(const PointSeq& points, const std::string& path) {
    std::ofstream out(path);
    require(out.good(), "save_points: cannot open " + path);
    out << kPointsMagic << "\n" << std::setprecision(17);
    for (const Vec2& p : points) out << p.x << " " << p.y << "\n";
    require(out.good(), "save_points: write failed for " + path);
}

inline PointSeq load_points(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw ParseError("load_points: cannot open " + path);
    PointSeq out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string xs, ys, extra;
        ls >> xs >> ys;
        if (ys.empty() || (ls >> extra))
            throw ParseError("line " + std::to_string(line_no) +
                             ": expected one 'x y' pair");
        out.push_back({detail::parse_double(xs, line_no), detail::parse_double(ys, line_no)});
    }
    if (out.size() < 2)
        throw ParseError("load_points: need at least two points, found " +
                         std::to_string(out.size()));
    return out;
}

struct SvgPolyline {
    PointSeq points;
    std::string color = "#444444";
    double width = 1.5;
};

/// Minimal standalone vector graphic: the polylines over shared axes
/// plus dot markers, y up, aspect preserved.
inline void write_svg(const std::string& path, const std::vector<SvgPolyline>& lines,
                      const PointSeq& markers) {
    Vec2 lo{0.0, 0.0}, hi{1.0, 1.0};
    bool seeded = false;
    auto grow = [&](const Vec2& q) {
        if (!seeded) {
            lo = hi = q;
            seeded = true;
            return;
        }
        lo.x = std::min(lo.x, q.x);
        lo.y = std::min(lo.y, q.y);
        hi.x = std::max(hi.x, q.x);
        hi.y = std::max(hi.y, q.y);
    };
    for (const SvgPolyline& pl : lines)
        for (const Vec2& q : pl.points) grow(q);
    for (const Vec2& q : markers) grow(q);
    require(seeded, "write_svg: nothing to draw");

    const double w = 800.0, h = 600.0, margin = 30.0;
    double sx = hi.x > lo.x ? (w - 2 * margin) / (hi.x - lo.x) : 1.0;
    double sy = hi.y > lo.y ? (h - 2 * margin) / (hi.y - lo.y) : 1.0;
    double s = std::min(sx, sy);
    auto map = [&](const Vec2& q) {
        return Vec2{margin + (q.x - lo.x) * s, h - margin - (q.y - lo.y) * s};
    };

    std::ofstream out(path);
    require(out.good(), "write_svg: cannot open " + path);
    out << std::setprecision(8);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << w << " " << h
        << "\">\n";
    out << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
    for (const SvgPolyline& pl : lines) {
        out << "<polyline fill=\"none\" stroke=\"" << pl.color << "\" stroke-width=\""
            << pl.width << "\" points=\"";
        for (const Vec2& q : pl.points) {
            Vec2 m = map(q);
            out << m.x << "," << m.y << " ";
        }
        out << "\"/>\n";
    }
    for (const Vec2& q : markers) {
        Vec2 m = map(q);
        out << "<circle cx=\"" << m.x << "\" cy=\"" << m.y
            << "\" r=\"2.5\" fill=\"black\"/>\n";
    }
    out << "</svg>\n";
    require(out.good(), "write_svg: write failed for " + path);
}

}  // namespace parnet
