// End-to-end tests of the command line tool: each case drives the real
// binary through a shell and inspects exit codes, output files, and the
// reports it writes. A shared fixture trains tiny models once.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "parnet/evaluation.hpp"
#include "parnet/io.hpp"
#include "parnet/mlp.hpp"

namespace fs = std::filesystem;
using namespace parnet;

namespace {

fs::path ws() {
    static fs::path dir = fs::temp_directory_path() / "parnet_cli_tests";
    return dir;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct RunResult {
    int code;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    fs::path out = ws() / ("stdout_" + std::to_string(counter) + ".txt");
    fs::path err = ws() / ("stderr_" + std::to_string(counter) + ".txt");
    ++counter;
    std::string cmd = std::string(PARNET_CLI_PATH) + " " + args + " >" + out.string() +
                      " 2>" + err.string();
    int status = std::system(cmd.c_str());
    int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return {code, read_file(out), read_file(err)};
}

std::string path(const std::string& name) { return (ws() / name).string(); }

std::string report_value(const std::string& report_path, const std::string& key) {
    for (const auto& [k, v] : load_report(report_path))
        if (k == key) return v;
    return "<missing>";
}

std::size_t count_substr(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos;
         pos = text.find(needle, pos + needle.size()))
        ++n;
    return n;
}

/// Builds the shared corpus: a tiny training set, a trained model pair,
/// and two input point files.
class CliEnvironment : public ::testing::Environment {
  public:
    void SetUp() override {
        fs::remove_all(ws());
        fs::create_directories(ws());

        ASSERT_EQ(run_cli("synth --train --count 12 --points 16 --seed 3 --out " +
                          path("train.csv"))
                      .code,
                  0);
        ASSERT_EQ(run_cli("train --network ppn --data " + path("train.csv") + " --out " +
                          path("ppn.model") +
                          " --epochs 40 --hidden 16,16 --dropout 0 --lr 2e-3 --batch 8 "
                          "--seed 5")
                      .code,
                  0);
        ASSERT_EQ(run_cli("train --network ksn --data " + path("train.csv") + " --ppn " +
                          path("ppn.model") + " --out " + path("ksn.model") +
                          " --epochs 15 --hidden 16 --dropout 0 --lr 1e-3 --batch 8 "
                          "--seed 5")
                      .code,
                  0);

        std::ofstream line(ws() / "line.pts");
        line << "# parnet points v1\n";
        for (int i = 0; i <= 100; ++i) {
            double t = i / 100.0;
            line << t << " " << 0.5 * t << "\n";
        }
        line.close();

        std::ofstream wave(ws() / "wave.pts");
        wave << "# parnet points v1\n";
        for (int i = 0; i < 48; ++i) {
            double x = i / 47.0;
            wave << x << " " << std::sin(4.0 * M_PI * x) << "\n";
        }
    }
};

const ::testing::Environment* const kEnv =
    ::testing::AddGlobalTestEnvironment(new CliEnvironment);

TEST(Usage, NoSubcommandFails) { EXPECT_EQ(run_cli("").code, 2); }

TEST(Usage, HelpExitsZero) {
    RunResult r = run_cli("--help");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("synth"), std::string::npos);
    EXPECT_NE(r.out.find("approximate"), std::string::npos);
}

TEST(Synth, WritesDeterministicDataset) {
    RunResult r = run_cli("synth --set 1 --count 10 --points 50 --seed 7 --out " +
                          path("s1a.csv"));
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("10 instances"), std::string::npos);
    ASSERT_EQ(run_cli("synth --set 1 --count 10 --points 50 --seed 7 --out " +
                      path("s1b.csv"))
                  .code,
              0);
    std::string a = read_file(ws() / "s1a.csv"), b = read_file(ws() / "s1b.csv");
    ASSERT_FALSE(a.empty());
    EXPECT_EQ(a, b);
}

TEST(Synth, RejectsUnknownSet) {
    EXPECT_EQ(run_cli("synth --set 5 --count 10 --points 50 --out " + path("bad.csv")).code,
              2);
}

TEST(Synth, NeedsExactlyOneKind) {
    EXPECT_EQ(run_cli("synth --count 10 --points 50 --out " + path("bad.csv")).code, 2);
    EXPECT_EQ(run_cli("synth --train --set 1 --count 10 --points 50 --out " +
                      path("bad.csv"))
                  .code,
              2);
}

TEST(Train, PpnModelRoundTrips) {
    auto [net, info] = load_model(path("ppn.model"));
    EXPECT_EQ(info.kind, "ppn");
    EXPECT_EQ(info.l, 16u);
    EXPECT_GT(info.kappa_threshold, 0.0);
    std::string hist = read_file(ws() / "ppn.model.history");
    EXPECT_EQ(hist.rfind("# step train_loss test_loss", 0), 0u);
}

TEST(Train, SeedFixesHistoryByteForByte) {
    std::string common = "train --network ppn --data " + path("train.csv") +
                         " --epochs 6 --hidden 8 --dropout 0 --batch 8 ";
    ASSERT_EQ(run_cli(common + "--seed 21 --out " + path("pa.model")).code, 0);
    ASSERT_EQ(run_cli(common + "--seed 21 --out " + path("pb.model")).code, 0);
    ASSERT_EQ(run_cli(common + "--seed 22 --out " + path("pc.model")).code, 0);
    std::string a = read_file(ws() / "pa.model.history");
    EXPECT_EQ(a, read_file(ws() / "pb.model.history"));
    EXPECT_NE(a, read_file(ws() / "pc.model.history"));
}

TEST(Train, KsnWithoutPpnIsUsageError) {
    RunResult r = run_cli("train --network ksn --data " + path("train.csv") + " --out " +
                          path("k.model"));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("--ppn"), std::string::npos);
}

TEST(CompareParam, ReportCarriesMethodsNoteAndConfig) {
    ASSERT_EQ(run_cli("compare-param --set 1 --count 6 --points 30 --ppn " +
                      path("ppn.model") + " --seed 11 --out " + path("cmp.txt") +
                      " --csv " + path("cmp.csv"))
                  .code,
              0);
    EXPECT_EQ(report_value(path("cmp.txt"), "methods"), "ppn,uniform,chordal,centripetal");
    EXPECT_EQ(report_value(path("cmp.txt"), "instances"), "6");
    EXPECT_NE(report_value(path("cmp.txt"), "note"), "<missing>");
    EXPECT_EQ(report_value(path("cmp.txt"), "config.seed"), "11");
    std::string text = read_file(ws() / "cmp.txt");
    EXPECT_EQ(count_substr(text, "instance."), 24u);  // 6 instances x 4 methods
    std::string csv = read_file(ws() / "cmp.csv");
    EXPECT_EQ(csv.rfind("ppn,uniform,chordal,centripetal\n", 0), 0u);
    EXPECT_EQ(count_substr(csv, "\n"), 7u);  // header + 6 rows
}

TEST(CompareParam, BaselinesOnlyNeedsNoModel) {
    ASSERT_EQ(run_cli("compare-param --set 2 --count 4 --points 24 --baselines-only "
                      "--l 12 --seed 2 --out " +
                      path("cmpb.txt"))
                  .code,
              0);
    EXPECT_EQ(report_value(path("cmpb.txt"), "methods"), "uniform,chordal,centripetal");
    EXPECT_EQ(run_cli("compare-param --set 2 --count 4 --points 24 --seed 2 --out " +
                      path("cmpc.txt"))
                  .code,
              2);
}

TEST(CompareParam, RerunIsByteIdentical) {
    std::string common = "compare-param --set 1 --count 5 --points 30 --ppn " +
                         path("ppn.model") + " --seed 4 --out ";
    ASSERT_EQ(run_cli(common + path("da.txt")).code, 0);
    ASSERT_EQ(run_cli(common + path("db.txt")).code, 0);
    std::string a = read_file(ws() / "da.txt");
    ASSERT_FALSE(a.empty());
    EXPECT_EQ(a, read_file(ws() / "db.txt"));
}

TEST(SweepKnots, TableCsvAndAbsenceMarkers) {
    ASSERT_EQ(run_cli("sweep-knots --set 3 --count 4 --points 40 --ppn " +
                      path("ppn.model") + " --ksn " + path("ksn.model") +
                      " --min-knots 2 --max-knots 4 --seed 13 --out " + path("sw.txt") +
                      " --csv " + path("sw.csv"))
                  .code,
              0);
    std::string rep = read_file(ws() / "sw.txt");
    EXPECT_NE(rep.find("row.2.parnet "), std::string::npos);
    EXPECT_NE(rep.find("row.3.nktp "), std::string::npos);
    EXPECT_NE(rep.find("row.4.parnet "), std::string::npos);
    EXPECT_NE(report_value(path("sw.txt"), "axis").find("interior"), std::string::npos);
    EXPECT_EQ(report_value(path("sw.txt"), "method.dpkp"), "absent (not implemented)");
    std::string csv = read_file(ws() / "sw.csv");
    EXPECT_EQ(csv.rfind("interior_knots,parnet,nktp\n", 0), 0u);
    EXPECT_EQ(count_substr(csv, "\n"), 4u);  // header + one row per knot count
}

TEST(SweepKnots, RequiresBothModels) {
    EXPECT_EQ(run_cli("sweep-knots --set 3 --count 4 --points 40 --ppn " +
                      path("ppn.model") + " --out " + path("swb.txt"))
                  .code,
              2);
}

TEST(Approximate, HonorsThresholdAndBudgetInReport) {
    ASSERT_EQ(run_cli("approximate --in " + path("line.pts") + " --ppn " +
                      path("ppn.model") + " --threshold 1e-2 --max-knots 30 --out " +
                      path("line.curve") + " --report " + path("line.rep"))
                  .code,
              0);
    EXPECT_EQ(report_value(path("line.rep"), "threshold"), "0.01");
    EXPECT_EQ(report_value(path("line.rep"), "max_knots"), "30");
    // Straight-line input is reproduced by the very first fit.
    EXPECT_EQ(report_value(path("line.rep"), "refinements"), "0");
    EXPECT_EQ(report_value(path("line.rep"), "reached_target"), "true");
    BSplineCurve c = load_curve(path("line.curve"));
    EXPECT_EQ(c.degree(), 3);
}

TEST(Approximate, RefinesWavyInputAndSamples) {
    ASSERT_EQ(run_cli("approximate --in " + path("wave.pts") + " --ppn " +
                      path("ppn.model") + " --ksn " + path("ksn.model") +
                      " --threshold 1e-3 --max-knots 6 --out " + path("wave.curve") +
                      " --report " + path("wave.rep") + " --samples 100")
                  .code,
              0);
    EXPECT_EQ(report_value(path("wave.rep"), "strategy"), "ksn");
    EXPECT_EQ(report_value(path("wave.rep"), "interior_knots"), "6");
    PointSeq samples = load_points(path("wave.curve") + ".samples");
    EXPECT_EQ(samples.size(), 100u);
}

TEST(Approximate, MalformedInputNamesTheLine) {
    std::ofstream bad(ws() / "bad.pts");
    bad << "# parnet points v1\n1 2\n3 4\nnope nope\n";
    bad.close();
    RunResult r = run_cli("approximate --in " + path("bad.pts") + " --ppn " +
                          path("ppn.model") + " --out " + path("bad.curve"));
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("line 4"), std::string::npos);
}

TEST(Export, CsvFromSweepReportMatchesDirectCsv) {
    ASSERT_EQ(run_cli("export --report " + path("sw.txt") + " --csv " + path("sw2.csv"))
                  .code,
              0);
    EXPECT_EQ(read_file(ws() / "sw2.csv"), read_file(ws() / "sw.csv"));
}

TEST(Export, SvgHasOnePolylinePerCurvePlusMarkers) {
    ASSERT_EQ(run_cli("export --curve " + path("wave.curve") + " --curve " +
                      path("line.curve") + " --points " + path("wave.pts") + " --svg " +
                      path("pair.svg"))
                  .code,
              0);
    std::string svg = read_file(ws() / "pair.svg");
    EXPECT_EQ(count_substr(svg, "<polyline"), 2u);
    EXPECT_EQ(count_substr(svg, "<circle"), 48u);
}

TEST(Export, NothingToDoIsUsageError) {
    EXPECT_EQ(run_cli("export --report " + path("sw.txt")).code, 2);
}

TEST(Config, FileSeedsDefaultsAndFlagsOverride) {
    std::ofstream cfg(ws() / "my.cfg");
    cfg << "seed = 99\ncount = 5\npoints = 24\nl = 12\n";
    cfg.close();
    ASSERT_EQ(run_cli("compare-param --set 2 --baselines-only --config " + path("my.cfg") +
                      " --count 4 --out " + path("cfg.txt"))
                  .code,
              0);
    EXPECT_EQ(report_value(path("cfg.txt"), "config.seed"), "99");
    EXPECT_EQ(report_value(path("cfg.txt"), "config.count"), "4");  // flag wins
    EXPECT_EQ(report_value(path("cfg.txt"), "config.points"), "24");
    EXPECT_EQ(report_value(path("cfg.txt"), "instances"), "4");
}

TEST(Config, UnknownKeyIsUsageError) {
    std::ofstream cfg(ws() / "bad.cfg");
    cfg << "bogus = 1\n";
    cfg.close();
    RunResult r = run_cli("compare-param --set 2 --baselines-only --config " +
                          path("bad.cfg") + " --out " + path("x.txt"));
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("bogus"), std::string::npos);
}

}  // namespace
