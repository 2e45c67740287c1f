#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "parnet/dataset.hpp"
#include "parnet/geometry.hpp"
#include "parnet/io.hpp"

using namespace parnet;

namespace {

SynthesisConfig base_config(std::uint64_t seed = 42) {
    SynthesisConfig cfg;
    cfg.seed = seed;
    return cfg;
}

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST(RandomCurve, ZeroSigmaIsDeterministicAtMeans) {
    SynthesisConfig cfg = base_config();
    cfg.sigma_x = 0.0;
    cfg.sigma_y = 0.0;
    auto g = rng::derive(cfg.seed, 0);
    BSplineCurve c = random_curve(cfg, g);
    ASSERT_EQ(c.control_points().size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_DOUBLE_EQ(c.control_points()[i].x, 10.0 + static_cast<double>(i));
        EXPECT_DOUBLE_EQ(c.control_points()[i].y, 10.0);
    }
}

TEST(RandomCurve, SeedDeterminism) {
    SynthesisConfig cfg = base_config(7);
    auto g1 = rng::derive(cfg.seed, 3);
    auto g2 = rng::derive(cfg.seed, 3);
    BSplineCurve a = random_curve(cfg, g1);
    BSplineCurve b = random_curve(cfg, g2);
    ASSERT_EQ(a.control_points().size(), b.control_points().size());
    for (std::size_t i = 0; i < a.control_points().size(); ++i)
        EXPECT_EQ(a.control_points()[i], b.control_points()[i]);
}

TEST(RandomCurve, NearbySeedsShareNoCurves) {
    // A raw xor seed combine would alias streams across datasets: 42^803
    // equals 777^0, so one corpus would silently contain another's curves.
    auto a = rng::derive(42, 803);
    auto b = rng::derive(777, 0);
    EXPECT_NE(a(), b());
    SynthesisConfig c1 = base_config(42), c2 = base_config(43);
    Dataset d1 = build_training_set(c1, 20), d2 = build_training_set(c2, 20);
    for (const auto& x : d1.instances)
        for (const auto& y : d2.instances) EXPECT_NE(x.points, y.points);
}

TEST(RandomCurve, AcceptedCurvesPassDenserRecheck) {
    SynthesisConfig cfg = base_config(11);
    for (std::size_t i = 0; i < 60; ++i) {
        auto g = rng::derive(cfg.seed, i);
        BSplineCurve c = random_curve(cfg, g);
        EXPECT_FALSE(detect_self_intersection(c, 2 * cfg.intersection_density));
    }
}

TEST(RandomCurve, DegenerateConfigExhaustsBudget) {
    SynthesisConfig cfg = base_config();
    cfg.sigma_x = 0.0;
    cfg.sigma_y = 0.0;
    cfg.delta_mu = 0.0;  // all control points coincide: every draw rejected
    auto g = rng::derive(cfg.seed, 0);
    EXPECT_THROW(random_curve(cfg, g), SynthesisError);
}

TEST(RandomKnottedCurve, KnotContract) {
    SynthesisConfig cfg = base_config(13);
    cfg.num_ctrl_points = 12;  // upper bound; actual count follows the knot draw
    for (std::size_t i = 0; i < 30; ++i) {
        auto g = rng::derive(cfg.seed, i);
        BSplineCurve c = random_knotted_curve(cfg, g);
        auto interior = c.knots().interior();
        EXPECT_GE(interior.size(), 3u);
        EXPECT_LE(interior.size(), 8u);
        for (std::size_t j = 0; j < interior.size(); ++j) {
            EXPECT_GT(interior[j], 0.0);
            EXPECT_LT(interior[j], 1.0);
            if (j > 0) EXPECT_GT(interior[j], interior[j - 1]);  // distinct
        }
        EXPECT_EQ(c.control_points().size(), interior.size() + 4);
    }
}

TEST(SelfIntersection, DetectsKnownShapes) {
    // Control polygon forcing the spline through a crossing loop.
    KnotVector kv = KnotVector::clamped(3, {0.25, 0.5, 0.75});
    PointSeq loop{{0, 0}, {4, 0}, {4, 3}, {-2, 3}, {-2, 0}, {2, 0}, {2, 4}};
    EXPECT_TRUE(detect_self_intersection(BSplineCurve(kv, loop), 20));
    PointSeq convex{{0, 0}, {1, 2}, {2, 3}, {3, 3}, {4, 2}, {5, 1}, {6, 0}};
    EXPECT_FALSE(detect_self_intersection(BSplineCurve(kv, convex), 20));
}

TEST(SampleCurve, TwoPointsAreEndpointsInAllModes) {
    SynthesisConfig cfg = base_config(17);
    auto g = rng::derive(cfg.seed, 0);
    BSplineCurve c = random_curve(cfg, g);
    for (auto mode : {SamplingMode::kUniformParameter, SamplingMode::kUniformArclength,
                      SamplingMode::kRandomParameter}) {
        auto s = rng::derive(cfg.seed, 0, rng::kSamplingSalt);
        PointSeq p = sample_curve(c, 2, mode, s);
        ASSERT_EQ(p.size(), 2u);
        EXPECT_NEAR(distance(p.front(), c.evaluate(0.0)), 0.0, 1e-14);
        EXPECT_NEAR(distance(p.back(), c.evaluate(1.0)), 0.0, 1e-14);
    }
}

TEST(SampleCurve, StraightLineArclengthMatchesUniform) {
    BSplineCurve line(KnotVector::bezier(3), {{0, 0}, {1, 1}, {2, 2}, {3, 3}});
    auto g = rng::derive(0, 0);
    PointSeq ua = sample_curve(line, 25, SamplingMode::kUniformArclength, g);
    PointSeq up = sample_curve(line, 25, SamplingMode::kUniformParameter, g);
    // Equal spacing in arc length, not equal parameters: compare geometry.
    for (std::size_t i = 0; i < ua.size(); ++i) {
        double s = static_cast<double>(i) / 24.0;
        EXPECT_NEAR(ua[i].x, 3.0 * s, 1e-6);
        EXPECT_NEAR(ua[i].y, 3.0 * s, 1e-6);
    }
    ASSERT_EQ(up.size(), ua.size());
}

TEST(SampleCurve, ArclengthChordsNearlyEqual) {
    // Chords only approximate arcs to second order in the spacing, so the
    // equal-chord check needs samples dense enough to drown curvature.
    for (std::uint64_t seed : {19, 20, 21}) {
        SynthesisConfig cfg = base_config(seed);
        auto g = rng::derive(cfg.seed, 2);
        BSplineCurve c = random_curve(cfg, g);
        auto s = rng::derive(cfg.seed, 2, rng::kSamplingSalt);
        PointSeq p = sample_curve(c, 400, SamplingMode::kUniformArclength, s);
        std::vector<double> chords;
        for (std::size_t i = 0; i + 1 < p.size(); ++i)
            chords.push_back(distance(p[i], p[i + 1]));
        double mean = 0.0;
        for (double v : chords) mean += v;
        mean /= static_cast<double>(chords.size());
        for (double v : chords) EXPECT_LT(std::abs(v - mean) / mean, 0.02);
    }
}

TEST(SampleCurve, RandomParameterKeepsSortedEndpoints) {
    SynthesisConfig cfg = base_config(23);
    auto g = rng::derive(cfg.seed, 1);
    BSplineCurve c = random_curve(cfg, g);
    auto s = rng::derive(cfg.seed, 1, rng::kSamplingSalt);
    PointSeq p = sample_curve(c, 50, SamplingMode::kRandomParameter, s);
    ASSERT_EQ(p.size(), 50u);
    EXPECT_NEAR(distance(p.front(), c.evaluate(0.0)), 0.0, 1e-14);
    EXPECT_NEAR(distance(p.back(), c.evaluate(1.0)), 0.0, 1e-14);
}

TEST(Flip, InvolutionAndInvariants) {
    SynthesisConfig cfg = base_config(29);
    auto g = rng::derive(cfg.seed, 0);
    BSplineCurve c = random_curve(cfg, g);
    auto s = rng::derive(cfg.seed, 0, rng::kSamplingSalt);
    PointSeq p = sample_curve(c, 40, SamplingMode::kUniformArclength, s);
    PointSeq f = flip(p);
    EXPECT_EQ(flip(f), p);
    EXPECT_EQ(f.front(), p.back());
    EXPECT_DOUBLE_EQ(arclen(f), arclen(p));
    EXPECT_NEAR(total_curvature(f, curvature(f)), total_curvature(p, curvature(p)), 1e-9);
}

TEST(TrainingSet, SplitArithmeticAndDeterminism) {
    SynthesisConfig cfg = base_config(31);
    cfg.l = 20;
    Dataset ds = build_training_set(cfg, 10);
    EXPECT_EQ(ds.instances.size(), 20u);
    EXPECT_EQ(ds.split_indices(false).size(), 16u);
    EXPECT_EQ(ds.split_indices(true).size(), 4u);
    for (const auto& inst : ds.instances) EXPECT_EQ(inst.points.size(), 20u);
    // Flip twins exist and share their curve's split.
    for (std::size_t i = 0; i < ds.instances.size(); i += 2) {
        EXPECT_EQ(ds.instances[i].curve_id, ds.instances[i + 1].curve_id);
        EXPECT_FALSE(ds.instances[i].flipped);
        EXPECT_TRUE(ds.instances[i + 1].flipped);
        EXPECT_EQ(ds.instances[i].in_test, ds.instances[i + 1].in_test);
        EXPECT_EQ(flip(ds.instances[i].points), ds.instances[i + 1].points);
    }
    Dataset again = build_training_set(cfg, 10);
    for (std::size_t i = 0; i < ds.instances.size(); ++i)
        EXPECT_EQ(ds.instances[i].points, again.instances[i].points);
    EXPECT_THROW(build_training_set(cfg, 5), std::invalid_argument);
}

TEST(TrainingSet, MixedModeAlternatesSpacingByCurveId) {
    SynthesisConfig cfg = base_config(33);
    cfg.l = 20;
    cfg.mode = SamplingMode::kMixed;
    Dataset mixed = build_training_set(cfg, 10);
    cfg.mode = SamplingMode::kUniformArclength;
    Dataset arc = build_training_set(cfg, 10);
    cfg.mode = SamplingMode::kRandomParameter;
    Dataset rnd = build_training_set(cfg, 10);
    // Same curve and sampling streams, so each mixed instance matches the
    // pure corpus of whichever rule its curve id selects.
    for (std::size_t i = 0; i < 10; ++i) {
        const Dataset& ref = i % 2 == 0 ? arc : rnd;
        EXPECT_EQ(mixed.instances[2 * i].points, ref.instances[2 * i].points);
    }
    EXPECT_EQ(sampling_mode_from(to_string(SamplingMode::kMixed)), SamplingMode::kMixed);
    auto g = rng::derive(1, 2);
    BSplineCurve c = random_curve(cfg, g);
    EXPECT_THROW(sample_curve(c, 10, SamplingMode::kMixed, g), std::invalid_argument);
}

TEST(EvalSets, SizesAndSharedCurves) {
    SynthesisConfig cfg = base_config(37);
    Dataset s1 = build_eval_set(1, 8, 60, cfg);
    Dataset s2 = build_eval_set(2, 8, 60, cfg);
    Dataset s3 = build_eval_set(3, 8, 60, cfg);
    Dataset s4 = build_eval_set(4, 8, 60, cfg);
    for (const auto* ds : {&s1, &s2, &s3, &s4}) {
        EXPECT_EQ(ds->instances.size(), 8u);
        for (const auto& inst : ds->instances) {
            EXPECT_EQ(inst.points.size(), 60u);
            EXPECT_FALSE(inst.in_test);
        }
    }
    // Same seed, same curve stream: sets 1/2 (and 3/4) share curves, so
    // the curve endpoints coincide even though sampling differs.
    for (std::size_t i = 0; i < 8; ++i) {
        EXPECT_EQ(s1.instances[i].points.front(), s2.instances[i].points.front());
        EXPECT_EQ(s1.instances[i].points.back(), s2.instances[i].points.back());
        EXPECT_EQ(s3.instances[i].points.front(), s4.instances[i].points.front());
        EXPECT_EQ(s3.instances[i].points.back(), s4.instances[i].points.back());
    }
    EXPECT_THROW(build_eval_set(5, 4, 60, cfg), std::invalid_argument);
    EXPECT_THROW(build_eval_set(0, 4, 60, cfg), std::invalid_argument);
}

TEST(DatasetIo, RoundTripExact) {
    SynthesisConfig cfg = base_config(41);
    cfg.l = 16;
    Dataset ds = build_training_set(cfg, 10);
    std::string path = temp_path("parnet_ds_roundtrip.txt");
    save_dataset(ds, path);
    Dataset back = load_dataset(path);
    EXPECT_EQ(back.config.l, cfg.l);
    EXPECT_EQ(back.config.seed, cfg.seed);
    EXPECT_EQ(back.config.mode, cfg.mode);
    ASSERT_EQ(back.instances.size(), ds.instances.size());
    for (std::size_t i = 0; i < ds.instances.size(); ++i) {
        EXPECT_EQ(back.instances[i].curve_id, ds.instances[i].curve_id);
        EXPECT_EQ(back.instances[i].flipped, ds.instances[i].flipped);
        EXPECT_EQ(back.instances[i].in_test, ds.instances[i].in_test);
        EXPECT_EQ(back.instances[i].points, ds.instances[i].points);
    }
    std::remove(path.c_str());
}

TEST(DatasetIo, SameSeedSameBytes) {
    SynthesisConfig cfg = base_config(43);
    cfg.l = 12;
    std::string p1 = temp_path("parnet_ds_a.txt"), p2 = temp_path("parnet_ds_b.txt");
    save_dataset(build_training_set(cfg, 10), p1);
    save_dataset(build_training_set(cfg, 10), p2);
    std::ifstream f1(p1), f2(p2);
    std::string s1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    std::string s2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    EXPECT_EQ(s1, s2);
    EXPECT_FALSE(s1.empty());
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}

TEST(DatasetIo, MalformedFilesFail) {
    std::string path = temp_path("parnet_ds_bad.txt");
    {
        std::ofstream out(path);
        out << "not a dataset\n";
    }
    EXPECT_THROW(load_dataset(path), ParseError);
    {
        std::ofstream out(path);
        out << kDatasetMagic << "\n# config l=4 seed=1\n# count 1\n# test\n";
        out << "0,0,1.0,2.0\n";  // too few fields for l=4
    }
    EXPECT_THROW(load_dataset(path), ParseError);
    {
        std::ofstream out(path);
        out << kDatasetMagic << "\n# config l=2 seed=1\n# count 1\n# test\n";
        out << "0,0,1.0,oops,3.0,4.0\n";
    }
    EXPECT_THROW(load_dataset(path), ParseError);
    EXPECT_THROW(load_dataset(temp_path("parnet_missing_file.txt")), ParseError);
    std::remove(path.c_str());
}

TEST(ConfigFile, ParsesAndRejects) {
    std::string path = temp_path("parnet_cfg.txt");
    {
        std::ofstream out(path);
        out << "# a comment\n\n l = 100 \nppn_hidden=128,128,128\nseed=9\n";
    }
    auto entries = load_config_file(path);
    ASSERT_EQ(entries.size(), 3u);
    EXPECT_EQ(entries[0].first, "l");
    EXPECT_EQ(entries[0].second, "100");
    EXPECT_EQ(entries[1].second, "128,128,128");
    {
        std::ofstream out(path);
        out << "novalue\n";
    }
    EXPECT_THROW(load_config_file(path), ParseError);
    std::remove(path.c_str());
}
