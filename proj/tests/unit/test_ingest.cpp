#include "doctest.h"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hvae/fixtures/fixtures.hpp"
#include "hvae/ingest/ingest.hpp"
#include "hvae/nn/rng.hpp"

using namespace hvae;
using namespace hvae::ingest;

namespace {

ChannelSchema xyf() { return ChannelSchema::planar_with_force(kRecordingPeriod); }

Trajectory force_profile(const std::vector<double>& f) {
    std::vector<double> d;
    for (std::size_t i = 0; i < f.size(); ++i) d.insert(d.end(), {0.001 * static_cast<double>(i), 0.0, f[i]});
    return Trajectory(xyf(), d);
}

}  // namespace

TEST_CASE("segmentation examples") {
    RawRecording rec{force_profile({0, 0.3, 0.3, 0.1, 0.4, 0.4, 0}), "toy"};
    auto strokes = segment_strokes(rec, {.min_stroke_samples = 2});
    REQUIRE(strokes.size() == 2);
    CHECK(strokes[0].size() == 2);
    CHECK(strokes[1].size() == 2);
    CHECK(strokes[1].at(0, 2) == 0.4);

    RawRecording flat{force_profile(std::vector<double>(10, 0.0)), "flat"};
    CHECK_THROWS_WITH_AS(segment_strokes(flat, {}), doctest::Contains("no stroke found"), std::runtime_error);

    RawRecording blip{force_profile({0, 0.5, 0, 0.5, 0.5, 0.5, 0.5, 0.5, 0}), "blip"};
    CHECK(segment_strokes(blip, {}).size() == 1);

    CHECK_THROWS(segment_strokes(rec, {.force_channel = "f_x"}));
    CHECK_THROWS(segment_strokes(rec, {.force_threshold = 0.0}));
    CHECK_THROWS(segment_strokes(rec, {.min_stroke_samples = 1}));
}

TEST_CASE("segmentation invariants") {
    nn::Rng rng(3);
    std::vector<double> f(400);
    for (auto& v : f) v = rng.uniform(0.0, 0.5);
    RawRecording rec{force_profile(f), "noise"};
    auto strokes = segment_strokes(rec, {.min_stroke_samples = 2});
    double prev_x = -1.0;
    for (const auto& s : strokes) {
        CHECK(s.size() >= 2);
        CHECK(s.at(0, 0) > prev_x);
        for (std::size_t n = 0; n < s.size(); ++n) CHECK(s.at(n, 2) >= 0.25);
        prev_x = s.at(s.size() - 1, 0);
    }
}

TEST_CASE("letter A segments into three strokes") {
    nn::Rng rng(1);
    auto ch = fixtures::make_character('A', 0.1, rng);
    auto strokes = segment_strokes({ch.recording, "A"}, {});
    CHECK(strokes.size() == 3);
    auto ends = extract_endpoints(strokes);
    REQUIRE(ends.size() == 3);
    CHECK(ends == ch.endpoints);
}

TEST_CASE("endpoint extraction") {
    Trajectory s(xyf(), std::vector<double>{0, 0, 1, 1, 1, 1, 2, 2, 1});
    std::vector<Trajectory> one{s};
    auto e = extract_endpoints(one);
    CHECK(e[0].start == Sample({0, 0, 1}));
    CHECK(e[0].end == Sample({2, 2, 1}));
    std::vector<Trajectory> two{s, s};
    auto e2 = extract_endpoints(two);
    CHECK(e2[0].start == e2[1].start);
    CHECK(e2[0].end == e2[1].end);
    CHECK(e2[0].stroke_index == 1);
    CHECK(e2[1].stroke_index == 2);
    CHECK_THROWS(extract_endpoints(std::vector<Trajectory>{}));
}

TEST_CASE("downsampling") {
    nn::Rng rng(9);
    std::vector<double> d;
    for (int i = 0; i < 800; ++i) d.insert(d.end(), {rng.normal(), rng.normal(), rng.normal()});
    Trajectory t(xyf(), d);
    auto ds = downsample(t, 100);
    CHECK(ds.size() == 100);
    CHECK(ds.front() == t.front());
    CHECK(ds.back() == t.back());
    CHECK(ds.sample_period() == doctest::Approx(kRecordingPeriod * 799.0 / 99.0));
    CHECK(downsample(t, 800) == t);
    CHECK_THROWS(downsample(t, 801));
    CHECK_THROWS(downsample(t, 1));

    for (std::size_t target : {2u, 3u, 17u, 64u, 100u, 333u}) {
        std::vector<double> r;
        for (int i = 0; i < 500; ++i) r.insert(r.end(), {0.25 * i - 3.0, 0.0, 1.0});
        auto out = downsample(Trajectory(xyf(), r), target);
        // Every kept value lies on the source ramp: (v + 3) / 0.25 is an index.
        for (std::size_t n = 0; n < out.size(); ++n) {
            const double idx = (out.at(n, 0) + 3.0) / 0.25;
            CHECK(std::abs(idx - std::round(idx)) < 1e-12);
        }
    }
}

TEST_CASE("fit_length stretches short strokes") {
    Trajectory t(xyf(), std::vector<double>{0, 0, 1, 1, 2, 3});
    auto up = fit_length(t, 5);
    CHECK(up.size() == 5);
    CHECK(up.at(2, 0) == doctest::Approx(0.5));
    CHECK(up.back() == t.back());
}

TEST_CASE("offset to origin") {
    Trajectory t(xyf(), std::vector<double>{2, 3, 0.7, 4, 5, 0.9});
    auto r = offset_to_origin(t);
    CHECK(r.start == Sample({2, 3, 0.7}));
    CHECK(r.trajectory.at(0, 0) == 0.0);
    CHECK(r.trajectory.at(0, 1) == 0.0);
    CHECK(r.trajectory.at(1, 0) == 2.0);
    CHECK(r.trajectory.at(1, 1) == 2.0);
    CHECK(r.trajectory.at(0, 2) == 0.7);  // force untouched

    Trajectory at0(xyf(), std::vector<double>{0, 0, 1, 1, 2, 1});
    CHECK(offset_to_origin(at0).trajectory == at0);

    nn::Rng rng(4);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> d(3 * 10);
        for (auto& v : d) v = rng.uniform(-5, 5);
        Trajectory x(xyf(), d);
        auto o = offset_to_origin(x);
        auto back = add_start(o.trajectory, o.start);
        for (std::size_t i = 0; i < d.size(); ++i) CHECK(std::abs(back.data()[i] - d[i]) <= 1e-12);
    }
}

TEST_CASE("augmentation") {
    nn::Rng rng(6);
    std::vector<Trajectory> ds;
    for (int i = 0; i < 10; ++i) {
        std::vector<double> d(3 * 12);
        for (auto& v : d) v = rng.uniform(-1, 1);
        ds.push_back(Trajectory(xyf(), d));
    }
    auto angles = rotation_angles(20.0);
    CHECK(angles.size() == 18);
    CHECK(angles.back() == 340.0);
    auto out = augment(ds, angles, {});
    REQUIRE(out.size() == 180);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK(out[i * 18] == ds[i]);
        for (std::size_t a = 0; a < 18; ++a) {
            const auto& r = out[i * 18 + a];
            for (std::size_t n = 0; n < r.size(); ++n) {
                CHECK(std::hypot(r.at(n, 0), r.at(n, 1)) ==
                      doctest::Approx(std::hypot(ds[i].at(n, 0), ds[i].at(n, 1))).epsilon(1e-12));
                CHECK(r.at(n, 2) == ds[i].at(n, 2));
            }
        }
    }
    std::vector<Translation> tr{{0, 0}, {0.5, -1}};
    CHECK(augment(ds, angles, tr).size() == 360);
    CHECK_THROWS(augment(ds, std::vector<double>{}, tr));

    Trajectory unit(xyf(), std::vector<double>{1, 0, 1, 1, 0, 1});
    std::vector<Trajectory> u{unit};
    auto rot = augment(u, std::vector<double>{90.0}, {});
    CHECK(std::abs(rot[0].at(0, 0)) < 1e-12);
    CHECK(std::abs(rot[0].at(0, 1) - 1.0) < 1e-12);

    // Centroid pivot keeps the dataset centroid fixed.
    auto c = augment(u, std::vector<double>{180.0}, {}, Pivot::Centroid);
    CHECK(c[0].at(0, 0) == doctest::Approx(1.0));

    // Velocity channels rotate with positions.
    ChannelSchema with_v({{"x", "m", ChannelRole::Position},
                          {"y", "m", ChannelRole::Position},
                          {"f_z", "N", ChannelRole::Force},
                          {"v_x", "m/s", ChannelRole::Velocity},
                          {"v_y", "m/s", ChannelRole::Velocity}},
                         kRecordingPeriod);
    std::vector<Trajectory> v{Trajectory(with_v, std::vector<double>{0, 0, 1, 2, 0, 1, 0, 1, 2, 0})};
    auto vr = augment(v, std::vector<double>{90.0}, {});
    CHECK(std::abs(vr[0].at(0, 3)) < 1e-12);
    CHECK(vr[0].at(0, 4) == doctest::Approx(2.0));
}
