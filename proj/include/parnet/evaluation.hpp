#pragma once

#include <atomic>
#include <charconv>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "dataset.hpp"
#include "fit.hpp"
#include "geometry.hpp"
#include "parametrization.hpp"
#include "pipeline.hpp"
#include "training.hpp"
#include "types.hpp"

namespace parnet {

namespace detail {

/// Run body(0..n-1) across hardware threads; each index writes only its
/// own slot, so results are identical to the sequential order.
template <typename F>
inline void parallel_for(std::size_t n, F&& body) {
    unsigned hw = std::thread::hardware_concurrency();
    std::size_t workers = std::min<std::size_t>(hw ? hw : 1, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            try {
                for (std::size_t i; (i = next.fetch_add(1)) < n;) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(n);
            }
        });
    for (std::thread& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace detail

/// Per-instance Hausdorff distances by method, plus their exact means.
struct EvalReport {
    std::vector<std::string> methods;
    std::vector<std::vector<double>> per_instance;  // [instance][method]
    std::vector<double> mean;
};

inline std::vector<double> column_means(const std::vector<std::vector<double>>& rows) {
    require(!rows.empty(), "column_means: no rows");
    std::vector<double> m(rows.front().size(), 0.0);
    for (const auto& r : rows) {
        require(r.size() == m.size(), "column_means: ragged rows");
        for (std::size_t j = 0; j < m.size(); ++j) m[j] += r[j];
    }
    for (double& v : m) v /= static_cast<double>(rows.size());
    return m;
}

/// Single-span comparison: resample each instance to the network length,
/// parametrize by each method on the raw resampled points, fit with no
/// interior knots, and measure Hausdorff against the full instance.
/// Pass a null network to evaluate the classical baselines alone.
inline EvalReport compare_parametrizations(const Dataset& set, const Mlp* ppn, std::size_t l,
                                           int degree = 3, std::size_t density = 10) {
    require(!set.instances.empty(), "compare_parametrizations: empty set");
    EvalReport rep;
    if (ppn) {
        require(ppn->input_dim() == 2 * l, "compare_parametrizations: network length mismatch");
        rep.methods = {"ppn", "uniform", "chordal", "centripetal"};
    } else {
        rep.methods = {"uniform", "chordal", "centripetal"};
    }
    rep.per_instance.resize(set.instances.size());
    const KnotVector kv = KnotVector::bezier(degree);
    detail::parallel_for(set.instances.size(), [&](std::size_t i) {
        const PointSeq& full = set.instances[i].points;
        PointSeq rp = resample(full, l).points;
        auto h_for = [&](const ParamVec& t) {
            return hausdorff_curve_points(fit_unconstrained(rp, t, kv), full, density);
        };
        std::vector<double>& row = rep.per_instance[i];
        if (ppn) row.push_back(h_for(ppn_parametrize(*ppn, rp)));
        row.push_back(h_for(parametrize_uniform(rp)));
        row.push_back(h_for(parametrize_chordal(rp)));
        row.push_back(h_for(parametrize_centripetal(rp)));
    });
    rep.mean = column_means(rep.per_instance);
    return rep;
}

/// Classical reference: centripetal parameters, averaged knots, endpoint
/// constrained least squares.
inline BSplineCurve nktp_fit(const PointSeq& points, std::size_t interior_knots,
                             int degree = 3) {
    ParamVec t = parametrize_centripetal(points);
    KnotVector kv =
        knots_by_averaging(t, degree, interior_knots + static_cast<std::size_t>(degree) + 1);
    return fit_constrained(points, t, kv);
}

inline double nktp_hausdorff(const PointSeq& points, std::size_t interior_knots,
                             int degree = 3, std::size_t density = 10) {
    return hausdorff_curve_points(nktp_fit(points, interior_knots, degree), points, density);
}

/// Pipeline run capped at `interior_knots`, measured like the baseline.
inline double parnet_hausdorff(const PointSeq& points, const Mlp& ppn, const Mlp* ksn,
                               PipelineConfig cfg, std::size_t interior_knots,
                               std::size_t density = 10) {
    cfg.max_knots = interior_knots;
    cfg.hausdorff_target = 0.0;  // unreachable: always spend the full budget
    ApproximationResult res = parnet_approximate(points, ppn, ksn, cfg);
    return hausdorff_curve_points(res.curve, points, density);
}

struct SweepRow {
    std::size_t interior_knots = 0;
    double parnet = 0.0;
    double nktp = 0.0;
};

/// Mean Hausdorff of the pipeline against the classical reference for
/// every requested interior-knot count.
inline std::vector<SweepRow> sweep_knots(const Dataset& set, const Mlp& ppn, const Mlp& ksn,
                                         const std::vector<std::size_t>& counts,
                                         const PipelineConfig& cfg, std::size_t density = 10) {
    require(!set.instances.empty(), "sweep_knots: empty set");
    std::vector<SweepRow> rows;
    for (std::size_t k : counts) {
        std::vector<double> ph(set.instances.size()), nh(set.instances.size());
        detail::parallel_for(set.instances.size(), [&](std::size_t i) {
            const PointSeq& p = set.instances[i].points;
            ph[i] = parnet_hausdorff(p, ppn, &ksn, cfg, k, density);
            nh[i] = nktp_hausdorff(p, k, cfg.degree, density);
        });
        SweepRow row;
        row.interior_knots = k;
        for (double v : ph) row.parnet += v;
        for (double v : nh) row.nktp += v;
        row.parnet /= static_cast<double>(ph.size());
        row.nktp /= static_cast<double>(nh.size());
        rows.push_back(row);
    }
    return rows;
}

/// Mean Hausdorff after `extra_knots` refinement rounds on top of the
/// segmentation's own boundary knots, for one refinement strategy.
inline double refinement_mean_hausdorff(const Dataset& set, const Mlp& ppn, const Mlp* ksn,
                                        const PipelineConfig& base, std::size_t extra_knots,
                                        std::size_t density = 10) {
    require(!set.instances.empty(), "refinement_mean_hausdorff: empty set");
    std::vector<double> h(set.instances.size());
    detail::parallel_for(set.instances.size(), [&](std::size_t i) {
        const PointSeq& p = set.instances[i].points;
        PipelineConfig cfg = base;
        cfg.hausdorff_target = 0.0;
        cfg.max_knots = make_segments(p, cfg).size() - 1 + extra_knots;
        ApproximationResult res = parnet_approximate(p, ppn, ksn, cfg);
        h[i] = hausdorff_curve_points(res.curve, p, density);
    });
    double sum = 0.0;
    for (double v : h) sum += v;
    return sum / static_cast<double>(h.size());
}

/// Flat "key value" provenance text; values are written verbatim.
inline void write_report(const std::string& path,
                         const std::vector<std::pair<std::string, std::string>>& entries) {
    std::ofstream out(path);
    require(out.good(), "write_report: cannot open " + path);
    for (const auto& [key, value] : entries) out << key << " " << value << "\n";
    require(out.good(), "write_report: write failed for " + path);
}

/// Reads a report back as ordered key/value pairs; the value is
/// everything after the first space and may itself contain spaces.
inline std::vector<std::pair<std::string, std::string>> load_report(const std::string& path) {
    std::ifstream in(path);
    if (!in.good()) throw ParseError("load_report: cannot open " + path);
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto sp = line.find(' ');
        if (sp == std::string::npos)
            entries.emplace_back(line, "");
        else
            entries.emplace_back(line.substr(0, sp), line.substr(sp + 1));
    }
    return entries;
}

/// Shortest decimal digits that read back to the same double; always a
/// decimal point, never locale-dependent.
inline std::string format_double(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    require(ec == std::errc(), "format_double: value does not fit");
    return std::string(buf, end);
}

/// Comma-delimited plot data, decimal-point formatting.
inline void write_csv(const std::string& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    require(out.good(), "write_csv: cannot open " + path);
    for (std::size_t j = 0; j < header.size(); ++j)
        out << (j ? "," : "") << header[j];
    out << "\n";
    for (const auto& row : rows) {
        require(row.size() == header.size(), "write_csv: row width != header width");
        for (std::size_t j = 0; j < row.size(); ++j)
            out << (j ? "," : "") << format_double(row[j]);
        out << "\n";
    }
    require(out.good(), "write_csv: write failed for " + path);
}

}  // namespace parnet
