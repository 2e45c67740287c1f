// Command line surface. Parsing and wiring only; all logic lives in the
// library headers. Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <algorithm>
#include <cstdint>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "parnet/dataset.hpp"
#include "parnet/evaluation.hpp"
#include "parnet/io.hpp"
#include "parnet/mlp.hpp"
#include "parnet/pipeline.hpp"
#include "parnet/training.hpp"

namespace {

using namespace parnet;

/// Usage mistake that CLI11's validators cannot express; mapped to exit 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Every tunable the tool understands. Values come from built-in
/// defaults, then an optional --config key=value file, then flags; the
/// resolved state is embedded in every report for provenance.
struct Settings {
    std::uint64_t seed = 0;
    std::size_t count = 100;       // instances to synthesize or evaluate
    std::size_t points = 100;      // raw points per evaluation instance
    std::size_t l = 100;           // resampled instance length (model-free runs)
    int degree = 3;
    std::string ppn_hidden = "128,128,128";
    std::string ksn_hidden = "64,64,64";
    double dropout = 0.2;
    double learning_rate = 1e-4;
    std::size_t batch_size = 256;
    std::size_t ppn_epochs = 150;
    std::size_t ksn_epochs = 60;
    double kappa_percentile = 98.0;
    double threshold = 1e-2;       // Hausdorff refinement target
    std::size_t max_knots = 20;    // interior-knot budget / sweep upper end
    std::size_t min_knots = 3;     // sweep lower end
    std::size_t step = 1;          // sweep stride
    std::size_t density = 10;                 // Hausdorff sampling multiplier
    std::string mode = "uniform-arclength";   // synthesis sampling mode
};

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        std::uint64_t r = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return r;
    } catch (const std::exception&) {
        throw UsageError("config: bad integer for " + key + ": '" + v + "'");
    }
}

double to_f64(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        double r = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return r;
    } catch (const std::exception&) {
        throw UsageError("config: bad number for " + key + ": '" + v + "'");
    }
}

void apply_setting(Settings& s, const std::string& key, const std::string& value) {
    if (key == "seed")
        s.seed = to_u64(key, value);
    else if (key == "count")
        s.count = to_u64(key, value);
    else if (key == "points")
        s.points = to_u64(key, value);
    else if (key == "l")
        s.l = to_u64(key, value);
    else if (key == "degree")
        s.degree = static_cast<int>(to_u64(key, value));
    else if (key == "ppn_hidden")
        s.ppn_hidden = value;
    else if (key == "ksn_hidden")
        s.ksn_hidden = value;
    else if (key == "dropout")
        s.dropout = to_f64(key, value);
    else if (key == "learning_rate")
        s.learning_rate = to_f64(key, value);
    else if (key == "batch_size")
        s.batch_size = to_u64(key, value);
    else if (key == "ppn_epochs")
        s.ppn_epochs = to_u64(key, value);
    else if (key == "ksn_epochs")
        s.ksn_epochs = to_u64(key, value);
    else if (key == "kappa_percentile")
        s.kappa_percentile = to_f64(key, value);
    else if (key == "threshold")
        s.threshold = to_f64(key, value);
    else if (key == "max_knots")
        s.max_knots = to_u64(key, value);
    else if (key == "min_knots")
        s.min_knots = to_u64(key, value);
    else if (key == "step")
        s.step = to_u64(key, value);
    else if (key == "density")
        s.density = to_u64(key, value);
    else if (key == "mode")
        s.mode = value;
    else
        throw UsageError("config: unknown key '" + key + "'");
}

std::vector<std::size_t> parse_sizes(const std::string& spec) {
    std::vector<std::size_t> sizes;
    for (const std::string& tok : detail::split(spec, ','))
        sizes.push_back(to_u64("hidden sizes", tok));
    if (sizes.empty()) throw UsageError("hidden sizes: empty list");
    return sizes;
}

std::string join(const std::vector<std::string>& parts, char sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

/// The resolved settings, one report line per key.
void append_config(std::vector<std::pair<std::string, std::string>>& rep,
                   const Settings& s) {
    rep.emplace_back("config.seed", std::to_string(s.seed));
    rep.emplace_back("config.count", std::to_string(s.count));
    rep.emplace_back("config.points", std::to_string(s.points));
    rep.emplace_back("config.l", std::to_string(s.l));
    rep.emplace_back("config.degree", std::to_string(s.degree));
    rep.emplace_back("config.ppn_hidden", s.ppn_hidden);
    rep.emplace_back("config.ksn_hidden", s.ksn_hidden);
    rep.emplace_back("config.dropout", format_double(s.dropout));
    rep.emplace_back("config.learning_rate", format_double(s.learning_rate));
    rep.emplace_back("config.batch_size", std::to_string(s.batch_size));
    rep.emplace_back("config.ppn_epochs", std::to_string(s.ppn_epochs));
    rep.emplace_back("config.ksn_epochs", std::to_string(s.ksn_epochs));
    rep.emplace_back("config.kappa_percentile", format_double(s.kappa_percentile));
    rep.emplace_back("config.threshold", format_double(s.threshold));
    rep.emplace_back("config.max_knots", std::to_string(s.max_knots));
    rep.emplace_back("config.min_knots", std::to_string(s.min_knots));
    rep.emplace_back("config.step", std::to_string(s.step));
    rep.emplace_back("config.density", std::to_string(s.density));
    rep.emplace_back("config.mode", s.mode);
}

std::pair<Mlp, ModelInfo> load_model_kind(const std::string& path, const std::string& kind) {
    auto loaded = load_model(path);
    if (loaded.second.kind != kind)
        throw UsageError(path + ": expected a " + kind + " model, found '" +
                         loaded.second.kind + "'");
    return loaded;
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
    bool train = false;
    int set = 0;
    std::string out;
};

void cmd_synth(const Settings& s, const SynthArgs& a) {
    if (a.train == (a.set != 0))
        throw UsageError("synth: choose exactly one of --train / --set");
    SynthesisConfig cfg;
    cfg.degree = s.degree;
    cfg.seed = s.seed;
    cfg.mode = sampling_mode_from(s.mode);
    Dataset ds;
    if (a.train) {
        cfg.l = s.points;
        ds = build_training_set(cfg, s.count);
    } else {
        ds = build_eval_set(a.set, s.count, s.points, cfg);
    }
    save_dataset(ds, a.out);
    std::cout << "wrote " << ds.instances.size() << " instances ("
              << ds.config.l << " points each) to " << a.out << "\n";
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
    std::string network;
    std::string data;
    std::string out;
    std::string history;
    std::string ppn;
    std::size_t epochs = 0;
    bool epochs_given = false;
    std::string hidden;
};

void cmd_train(const Settings& s, const TrainArgs& a) {
    Dataset ds = load_dataset(a.data);
    TrainConfig tc;
    tc.seed = s.seed;
    tc.degree = s.degree;
    tc.dropout = s.dropout;
    tc.adam.lr = s.learning_rate;
    tc.batch_size = s.batch_size;
    tc.ppn_hidden = parse_sizes(a.hidden.empty() || a.network != "ppn" ? s.ppn_hidden
                                                                       : a.hidden);
    tc.ksn_hidden = parse_sizes(a.hidden.empty() || a.network != "ksn" ? s.ksn_hidden
                                                                       : a.hidden);
    if (a.epochs_given) {
        tc.ppn_epochs = a.epochs;
        tc.ksn_epochs = a.epochs;
    } else {
        tc.ppn_epochs = s.ppn_epochs;
        tc.ksn_epochs = s.ksn_epochs;
    }

    TrainResult res = [&] {
        if (a.network == "ppn") return train_ppn(ds, tc);
        if (a.ppn.empty())
            throw UsageError("train: ksn training needs a trained ppn (--ppn <model>)");
        auto [pnet, pinfo] = load_model_kind(a.ppn, "ppn");
        return train_ksn(ds, ppn_parametrize_dataset(pnet, ds), tc);
    }();
    if (a.network == "ppn")
        res.info.kappa_threshold = compute_kappa_threshold(ds, s.kappa_percentile);

    save_model(res.net, res.info, a.out);
    std::string hist = a.history.empty() ? a.out + ".history" : a.history;
    save_history(res.history, hist);

    const auto& h = res.history.entries;
    std::cout << a.network << ": " << h.size() << " epochs, final train loss "
              << format_double(h.back().train_loss) << ", test loss "
              << format_double(h.back().test_loss) << "\n";
    std::cout << "model -> " << a.out << "\nhistory -> " << hist << "\n";
}

// ---------------------------------------------------------------------------
// compare-param

struct CompareArgs {
    int set = 1;
    std::string ppn;
    bool baselines_only = false;
    std::string out;
    std::string csv;
};

void cmd_compare_param(const Settings& s, const CompareArgs& a) {
    if (!a.baselines_only && a.ppn.empty())
        throw UsageError("compare-param: need --ppn <model> or --baselines-only");

    SynthesisConfig cfg;
    cfg.degree = s.degree;
    cfg.seed = s.seed;
    Dataset set = build_eval_set(a.set, s.count, s.points, cfg);

    Mlp net;
    ModelInfo info;
    std::size_t l = s.l;
    int degree = s.degree;
    if (!a.baselines_only) {
        std::tie(net, info) = load_model_kind(a.ppn, "ppn");
        l = info.l;
        degree = info.degree;
    }
    EvalReport rep = compare_parametrizations(set, a.baselines_only ? nullptr : &net, l,
                                              degree, s.density);

    std::vector<std::pair<std::string, std::string>> lines;
    lines.emplace_back("report", "compare-param");
    lines.emplace_back("set", std::to_string(a.set));
    lines.emplace_back("instances", std::to_string(rep.per_instance.size()));
    lines.emplace_back("l", std::to_string(l));
    lines.emplace_back("methods", join(rep.methods, ','));
    lines.emplace_back("note",
                       "reference values for this comparison exist in two near-duplicate "
                       "blocks; a single comparison per method is emitted");
    for (std::size_t m = 0; m < rep.methods.size(); ++m)
        lines.emplace_back("mean." + rep.methods[m], format_double(rep.mean[m]));
    for (std::size_t i = 0; i < rep.per_instance.size(); ++i)
        for (std::size_t m = 0; m < rep.methods.size(); ++m)
            lines.emplace_back("instance." + std::to_string(i) + "." + rep.methods[m],
                               format_double(rep.per_instance[i][m]));
    append_config(lines, s);
    write_report(a.out, lines);

    if (!a.csv.empty()) write_csv(a.csv, rep.methods, rep.per_instance);

    std::cout << "set " << a.set << ", " << rep.per_instance.size() << " instances\n";
    for (std::size_t m = 0; m < rep.methods.size(); ++m)
        std::cout << "mean." << rep.methods[m] << " = " << format_double(rep.mean[m])
                  << "\n";
    std::cout << "report -> " << a.out << "\n";
}

// ---------------------------------------------------------------------------
// sweep-knots

struct SweepArgs {
    int set = 3;
    std::string ppn;
    std::string ksn;
    std::string out;
    std::string csv;
};

void cmd_sweep_knots(const Settings& s, const SweepArgs& a) {
    if (a.ppn.empty() || a.ksn.empty())
        throw UsageError("sweep-knots: needs both --ppn and --ksn models");
    if (s.min_knots > s.max_knots)
        throw UsageError("sweep-knots: min_knots exceeds max_knots");
    auto [pnet, pinfo] = load_model_kind(a.ppn, "ppn");
    auto [knet, kinfo] = load_model_kind(a.ksn, "ksn");
    if (pinfo.l != kinfo.l)
        throw UsageError("sweep-knots: ppn and ksn models disagree on instance length");

    SynthesisConfig cfg;
    cfg.degree = s.degree;
    cfg.seed = s.seed;
    Dataset set = build_eval_set(a.set, s.count, s.points, cfg);

    PipelineConfig pcfg;
    pcfg.degree = pinfo.degree;
    pcfg.l = pinfo.l;
    pcfg.kappa_threshold = pinfo.kappa_threshold;
    pcfg.sample_density = s.density;
    pcfg.strategy = RefinementStrategy::kKsn;

    std::vector<std::size_t> counts;
    for (std::size_t k = s.min_knots; k <= s.max_knots; k += std::max<std::size_t>(1, s.step))
        counts.push_back(k);
    std::vector<SweepRow> rows = sweep_knots(set, pnet, knet, counts, pcfg, s.density);

    std::vector<std::pair<std::string, std::string>> lines;
    lines.emplace_back("report", "sweep-knots");
    lines.emplace_back("set", std::to_string(a.set));
    lines.emplace_back("instances", std::to_string(set.instances.size()));
    lines.emplace_back("axis", "interior knot count (clamped end knots excluded)");
    lines.emplace_back("methods", "parnet,nktp");
    lines.emplace_back("method.dpkp", "absent (not implemented)");
    for (const SweepRow& r : rows) {
        lines.emplace_back("row." + std::to_string(r.interior_knots) + ".parnet",
                           format_double(r.parnet));
        lines.emplace_back("row." + std::to_string(r.interior_knots) + ".nktp",
                           format_double(r.nktp));
    }
    append_config(lines, s);
    write_report(a.out, lines);

    if (!a.csv.empty()) {
        std::vector<std::vector<double>> data;
        for (const SweepRow& r : rows)
            data.push_back({static_cast<double>(r.interior_knots), r.parnet, r.nktp});
        write_csv(a.csv, {"interior_knots", "parnet", "nktp"}, data);
    }

    std::cout << "interior_knots parnet nktp   (dpkp absent)\n";
    for (const SweepRow& r : rows)
        std::cout << r.interior_knots << " " << format_double(r.parnet) << " "
                  << format_double(r.nktp) << "\n";
    std::cout << "report -> " << a.out << "\n";
}

// ---------------------------------------------------------------------------
// approximate

struct ApproxArgs {
    std::string in;
    std::string ppn;
    std::string ksn;
    std::string strategy;
    std::string out;
    std::string report;
    std::size_t samples = 0;
};

void cmd_approximate(const Settings& s, const ApproxArgs& a) {
    PointSeq p = load_points(a.in);
    auto [pnet, pinfo] = load_model_kind(a.ppn, "ppn");

    Mlp knet;
    bool have_ksn = !a.ksn.empty();
    if (have_ksn) {
        ModelInfo kinfo;
        std::tie(knet, kinfo) = load_model_kind(a.ksn, "ksn");
        if (kinfo.l != pinfo.l)
            throw UsageError("approximate: ppn and ksn models disagree on instance length");
    }
    std::string strategy = a.strategy.empty() ? (have_ksn ? "ksn" : "midpoint") : a.strategy;
    if (strategy == "ksn" && !have_ksn)
        throw UsageError("approximate: --strategy ksn needs a --ksn model");

    PipelineConfig pcfg;
    pcfg.degree = pinfo.degree;
    pcfg.l = pinfo.l;
    pcfg.kappa_threshold = pinfo.kappa_threshold;
    pcfg.hausdorff_target = s.threshold;
    pcfg.max_knots = s.max_knots;
    pcfg.sample_density = s.density;
    pcfg.strategy = refinement_strategy_from(strategy);

    ApproximationResult res = parnet_approximate(p, pnet, have_ksn ? &knet : nullptr, pcfg);
    save_curve(res.curve, a.out);

    const auto& hist = res.hausdorff_history;
    double best = *std::min_element(hist.begin(), hist.end());
    std::size_t interior =
        res.curve.knots().size() - 2 * (static_cast<std::size_t>(pcfg.degree) + 1);

    if (!a.report.empty()) {
        std::vector<std::pair<std::string, std::string>> lines;
        lines.emplace_back("report", "approximate");
        lines.emplace_back("input", a.in);
        lines.emplace_back("input_points", std::to_string(p.size()));
        lines.emplace_back("strategy", strategy);
        lines.emplace_back("threshold", format_double(s.threshold));
        lines.emplace_back("max_knots", std::to_string(s.max_knots));
        lines.emplace_back("refinements", std::to_string(hist.size() - 1));
        lines.emplace_back("interior_knots", std::to_string(interior));
        lines.emplace_back("hausdorff", format_double(best));
        lines.emplace_back("reached_target", res.reached_target ? "true" : "false");
        for (std::size_t i = 0; i < hist.size(); ++i)
            lines.emplace_back("history." + std::to_string(i), format_double(hist[i]));
        for (std::size_t i = 0; i < res.inserted_knots.size(); ++i)
            lines.emplace_back("knot." + std::to_string(i),
                               format_double(res.inserted_knots[i]));
        append_config(lines, s);
        write_report(a.report, lines);
    }
    if (a.samples >= 2) save_points(res.curve.sample(a.samples), a.out + ".samples");

    std::cout << "hausdorff " << format_double(best) << " after " << hist.size() - 1
              << " refinements (" << interior << " interior knots)\n";
    std::cout << "curve -> " << a.out << "\n";
}

// ---------------------------------------------------------------------------
// export

struct ExportArgs {
    std::string report;
    std::string csv;
    std::vector<std::string> curves;
    std::string points;
    std::string svg;
};

std::string report_value(const std::vector<std::pair<std::string, std::string>>& rep,
                         const std::string& key) {
    for (const auto& [k, v] : rep)
        if (k == key) return v;
    throw ParseError("report: missing key '" + key + "'");
}

void export_report_csv(const std::string& report_path, const std::string& csv_path) {
    auto rep = load_report(report_path);
    std::string kind = report_value(rep, "report");
    if (kind == "compare-param") {
        std::vector<std::string> methods = detail::split(report_value(rep, "methods"), ',');
        std::size_t n = to_u64("instances", report_value(rep, "instances"));
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> row;
            for (const std::string& m : methods)
                row.push_back(to_f64(m, report_value(rep, "instance." + std::to_string(i) +
                                                              "." + m)));
            rows.push_back(std::move(row));
        }
        write_csv(csv_path, methods, rows);
    } else if (kind == "sweep-knots") {
        std::vector<std::vector<double>> rows;
        for (const auto& [k, v] : rep) {
            if (k.rfind("row.", 0) != 0 || k.size() < 11) continue;
            if (k.compare(k.size() - 7, 7, ".parnet") != 0) continue;
            std::string knots = k.substr(4, k.size() - 11);
            rows.push_back({to_f64("knots", knots), to_f64(k, v),
                            to_f64(k, report_value(rep, "row." + knots + ".nktp"))});
        }
        if (rows.empty()) throw ParseError("report: no sweep rows found");
        write_csv(csv_path, {"interior_knots", "parnet", "nktp"}, rows);
    } else {
        throw UsageError("export: no tabular data in a '" + kind + "' report");
    }
}

void cmd_export(const ExportArgs& a) {
    bool did = false;
    if (!a.report.empty() && !a.csv.empty()) {
        export_report_csv(a.report, a.csv);
        std::cout << "csv -> " << a.csv << "\n";
        did = true;
    }
    if (!a.curves.empty() && !a.svg.empty()) {
        static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                        "#8c564b"};
        std::vector<SvgPolyline> lines;
        for (std::size_t i = 0; i < a.curves.size(); ++i) {
            BSplineCurve c = load_curve(a.curves[i]);
            lines.push_back({c.sample(256), palette[i % 5], 1.5});
        }
        PointSeq markers;
        if (!a.points.empty()) markers = load_points(a.points);
        write_svg(a.svg, lines, markers);
        std::cout << "svg -> " << a.svg << "\n";
        did = true;
    }
    if (!did)
        throw UsageError("export: nothing to do (--report with --csv, or --curve with --svg)");
}

// ---------------------------------------------------------------------------

int run(int argc, char** argv) {
    Settings s;

    // The config file seeds the defaults, so it must be read before the
    // regular flag pass; a plain argv scan finds it wherever it appears.
    std::string config_path;
    for (int i = 1; i < argc; ++i) {
        std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc)
            config_path = argv[i + 1];
        else if (arg.rfind("--config=", 0) == 0)
            config_path = arg.substr(9);
    }
    if (!config_path.empty()) {
        try {
            for (const auto& [k, v] : load_config_file(config_path)) apply_setting(s, k, v);
        } catch (const ParseError& e) {
            throw UsageError(e.what());
        }
    }

    CLI::App app{"B-spline curve approximation with learned parametrization"};
    app.require_subcommand(1);
    std::string config_opt;  // consumed above; declared so the flag parses

    SynthArgs synth;
    auto* sc = app.add_subcommand("synth", "generate a training or evaluation dataset");
    sc->add_flag("--train", synth.train, "training corpus (flip-augmented, 80/20 split)");
    sc->add_option("--set", synth.set, "evaluation set number")->check(CLI::Range(1, 4));
    sc->add_option("--count", s.count, "curves to generate");
    sc->add_option("--points", s.points, "points sampled per curve");
    sc->add_option("--seed", s.seed, "generator seed");
    sc->add_option("--mode", s.mode, "sampling mode")
        ->check(CLI::IsMember(
            {"uniform-parameter", "uniform-arclength", "random-parameter", "mixed"}));
    sc->add_option("--out", synth.out, "output dataset file")->required();
    sc->add_option("--config", config_opt, "key=value defaults file");

    TrainArgs train;
    auto* tc = app.add_subcommand("train", "train a parametrization or knot network");
    tc->add_option("--network", train.network, "which network to train")
        ->required()
        ->check(CLI::IsMember({"ppn", "ksn"}));
    tc->add_option("--data", train.data, "training dataset file")->required();
    tc->add_option("--out", train.out, "output model file")->required();
    tc->add_option("--history", train.history, "loss log path (default <out>.history)");
    tc->add_option("--ppn", train.ppn, "trained ppn model (required for ksn)");
    auto* epochs_opt = tc->add_option("--epochs", train.epochs, "override epoch count");
    tc->add_option("--hidden", train.hidden, "hidden sizes, comma separated");
    tc->add_option("--dropout", s.dropout, "hidden-layer dropout rate");
    tc->add_option("--lr", s.learning_rate, "Adam learning rate");
    tc->add_option("--batch", s.batch_size, "minibatch size");
    tc->add_option("--seed", s.seed, "training seed");
    tc->add_option("--config", config_opt, "key=value defaults file");

    CompareArgs cmp;
    auto* cc = app.add_subcommand("compare-param",
                                  "average Hausdorff by parametrization method");
    cc->add_option("--set", cmp.set, "evaluation set (1 or 2)")->check(CLI::Range(1, 2));
    cc->add_option("--count", s.count, "instances to evaluate");
    cc->add_option("--points", s.points, "points per instance");
    cc->add_option("--ppn", cmp.ppn, "trained ppn model");
    cc->add_flag("--baselines-only", cmp.baselines_only,
                 "classical parametrizations only, no model needed");
    cc->add_option("--l", s.l, "resample length when no model is given");
    cc->add_option("--seed", s.seed, "evaluation set seed");
    cc->add_option("--density", s.density, "Hausdorff sampling multiplier");
    cc->add_option("--out", cmp.out, "report file")->required();
    cc->add_option("--csv", cmp.csv, "also write per-instance table");
    cc->add_option("--config", config_opt, "key=value defaults file");

    SweepArgs sweep;
    auto* wc = app.add_subcommand("sweep-knots",
                                  "mean Hausdorff per interior-knot count");
    wc->add_option("--set", sweep.set, "evaluation set (3 or 4)")->check(CLI::Range(3, 4));
    wc->add_option("--count", s.count, "instances to evaluate");
    wc->add_option("--points", s.points, "points per instance");
    wc->add_option("--ppn", sweep.ppn, "trained ppn model")->required();
    wc->add_option("--ksn", sweep.ksn, "trained ksn model")->required();
    wc->add_option("--min-knots", s.min_knots, "smallest interior-knot count");
    wc->add_option("--max-knots", s.max_knots, "largest interior-knot count");
    wc->add_option("--step", s.step, "knot-count stride");
    wc->add_option("--seed", s.seed, "evaluation set seed");
    wc->add_option("--density", s.density, "Hausdorff sampling multiplier");
    wc->add_option("--out", sweep.out, "report file")->required();
    wc->add_option("--csv", sweep.csv, "also write plot data");
    wc->add_option("--config", config_opt, "key=value defaults file");

    ApproxArgs approx;
    auto* ac = app.add_subcommand("approximate", "fit one point sequence end to end");
    ac->add_option("--in", approx.in, "input points file")->required();
    ac->add_option("--ppn", approx.ppn, "trained ppn model")->required();
    ac->add_option("--ksn", approx.ksn, "trained ksn model");
    ac->add_option("--strategy", approx.strategy, "knot proposal strategy")
        ->check(CLI::IsMember({"ksn", "midpoint"}));
    ac->add_option("--threshold", s.threshold, "Hausdorff refinement target");
    ac->add_option("--max-knots", s.max_knots, "interior-knot budget");
    ac->add_option("--density", s.density, "Hausdorff sampling multiplier");
    ac->add_option("--out", approx.out, "output curve file")->required();
    ac->add_option("--report", approx.report, "also write a run report");
    ac->add_option("--samples", approx.samples,
                   "write <out>.samples with this many curve samples");
    ac->add_option("--config", config_opt, "key=value defaults file");

    ExportArgs exp;
    auto* ec = app.add_subcommand("export", "plot data or a vector graphic from results");
    ec->add_option("--report", exp.report, "report file to tabulate");
    ec->add_option("--csv", exp.csv, "output table path");
    ec->add_option("--curve", exp.curves, "curve file (repeatable)");
    ec->add_option("--points", exp.points, "points file for markers");
    ec->add_option("--svg", exp.svg, "output vector graphic path");
    ec->add_option("--config", config_opt, "key=value defaults file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    train.epochs_given = epochs_opt->count() > 0;
    if (sc->parsed()) cmd_synth(s, synth);
    if (tc->parsed()) cmd_train(s, train);
    if (cc->parsed()) cmd_compare_param(s, cmp);
    if (wc->parsed()) cmd_sweep_knots(s, sweep);
    if (ac->parsed()) cmd_approximate(s, approx);
    if (ec->parsed()) cmd_export(exp);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "parnet: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "parnet: " << e.what() << "\n";
        return 1;
    }
}
