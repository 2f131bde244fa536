#include "doctest.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "hvae/compose/composer.hpp"
#include "hvae/fixtures/fixtures.hpp"
#include "hvae/ingest/ingest.hpp"

using namespace hvae;

namespace {

ChannelSchema xyf(double period) { return ChannelSchema::planar_with_force(period); }

Trajectory line(std::size_t n, double period, double dx, double dy, double f = 1.0) {
    std::vector<double> d;
    for (std::size_t i = 0; i < n; ++i) d.insert(d.end(), {dx * static_cast<double>(i), dy * static_cast<double>(i), f});
    return Trajectory(xyf(period), d);
}

std::vector<Trajectory> training_strokes(std::size_t n, int count, std::uint64_t seed) {
    nn::Rng rng(seed);
    std::vector<Trajectory> out;
    for (int i = 0; i < count; ++i) {
        fixtures::SyntheticStrokeSpec spec{.kind = fixtures::StrokeKind::Zigzag,
                                           .amplitude = 0.005,
                                           .frequency = 2.0,
                                           .length = 0.05 + 0.01 * i,
                                           .angle_deg = 30.0 * i,
                                           .peak_force = 1.2};
        out.push_back(ingest::downsample(fixtures::make_stroke(spec, 4 * n, rng), n));
    }
    return out;
}

ComposedPlan small_plan(std::uint64_t seed) {
    const auto strokes = training_strokes(12, 6, seed);
    std::vector<std::vector<StrokeEndpoints>> chars;
    std::vector<StrokeEndpoints> one;
    for (std::size_t i = 0; i < 3; ++i) {
        std::vector<double> start{0.01 * i, 0.02, 1.0}, end{0.01 * i + 0.04, 0.05, 1.0};
        one.push_back({Sample(start), Sample(end), static_cast<int>(i + 1)});
    }
    chars.push_back(one);
    auto pm = std::make_shared<PointModel>(
        PointModel::create({.hidden = 8, .latent = 2, .readout = 8, .max_strokes = 4},
                           ChannelSchema::planar_with_force(ingest::kRecordingPeriod), chars, seed));
    auto tm = std::make_shared<TrajModel>(
        TrajModel::create({.hidden = 6, .layers = 1, .latent = 2, .readout = 6, .samples = 12}, strokes, seed));
    return ComposedPlan{pm, tm, std::vector<double>(2, 0.0), {}, 3};
}

}  // namespace

TEST_CASE("resampled count") {
    CHECK(resampled_count(100, 0.008, 0.001) == 793);
    CHECK(resampled_count(2, 0.001, 0.001) == 2);
    CHECK(resampled_count(100, 0.0064646464646464646, 0.001) == 641);
    CHECK_THROWS(resampled_count(1, 0.008, 0.001));
    CHECK_THROWS(resampled_count(10, 0.008, 0.0));
}

TEST_CASE("natural spline") {
    // Cubic through 0, 1, 8, 27 against the hand-solved natural spline with
    // h = 1: second derivatives m1 = 4.8, m2 = 16.8, so at the middle of the
    // second interval S = 4.5 - (1/24)(1.5 * 4.8 + 1.5 * 16.8) = 3.15.
    NaturalSpline s({0.0, 1.0, 8.0, 27.0}, 1.0);
    CHECK(s.value(0, 0.0) == 0.0);
    CHECK(s.value(2, 1.0) == doctest::Approx(27.0));
    CHECK(s.value(1, 0.5) == doctest::Approx(3.15).epsilon(1e-14));
    // Linear data stays linear with constant derivative.
    NaturalSpline lin({1.0, 3.0, 5.0, 7.0, 9.0}, 0.5);
    for (std::size_t i = 0; i < 4; ++i)
        for (double u : {0.0, 0.1, 0.25, 0.4}) {
            CHECK(lin.value(i, u) == doctest::Approx(1.0 + 2.0 * (i * 0.5 + u) / 0.5));
            CHECK(lin.derivative(i, u) == doctest::Approx(4.0));
        }
    CHECK_THROWS(NaturalSpline({1.0}, 1.0));
    CHECK_THROWS(NaturalSpline({1.0, 2.0}, 0.0));
}

TEST_CASE("spline resampling of one stroke") {
    MultiStrokeTrajectory t{{line(100, 0.008, 0.001, 0.0005)}, {}};
    auto r = resample_spline(t);
    CHECK(r.warnings.empty());
    const auto& out = r.trajectory.strokes.at(0);
    CHECK(out.size() == 793);
    CHECK(out.sample_period() == 0.001);
    CHECK(out.schema().index_of("v_x").has_value());
    // Knots land on every 8th output sample and are copied exactly.
    const auto& src = t.strokes[0];
    for (std::size_t k = 0; k < 100; ++k)
        for (std::size_t c = 0; c < 3; ++c) CHECK(out.at(8 * k, c) == src.at(k, c));
    // Collinear input stays on the line, the velocity is constant.
    for (std::size_t n = 0; n < out.size(); ++n) {
        CHECK(std::abs(out.at(n, 1) - 0.5 * out.at(n, 0)) < 1e-9);
        CHECK(out.at(n, 3) == doctest::Approx(0.125));
        CHECK(out.at(n, 4) == doctest::Approx(0.0625));
    }
}

TEST_CASE("resampling preserves path length of a smooth curve") {
    std::vector<double> d;
    for (int i = 0; i < 100; ++i) {
        const double a = 2.0 * 3.14159265358979 * i / 99.0;
        d.insert(d.end(), {0.05 * std::cos(a), 0.05 * std::sin(a), 1.0});
    }
    MultiStrokeTrajectory t{{Trajectory(xyf(0.008), d)}, {}};
    auto r = resample_spline(t, {.add_velocity = false});
    const double before = planar_path_length(t.strokes[0]);
    const double after = planar_path_length(r.trajectory.strokes[0]);
    CHECK(std::abs(after - before) / before < 0.01);
    CHECK(r.trajectory.strokes[0].channels() == 3);
}

TEST_CASE("resampling short strokes falls back to linear") {
    MultiStrokeTrajectory t{{line(3, 0.004, 0.002, 0.0), line(10, 0.004, 0.0, 0.001)}, {}};
    auto r = resample_spline(t);
    REQUIRE(r.warnings.size() == 1);
    CHECK(r.warnings[0].find("stroke 1") != std::string::npos);
    const auto& s = r.trajectory.strokes[0];
    CHECK(s.size() == 9);
    CHECK(s.at(1, 0) == doctest::Approx(0.0005));
    CHECK(s.at(8, 0) == 0.004);
    CHECK(r.trajectory.strokes[1].size() == 37);
}

TEST_CASE("compose continuity and determinism") {
    auto plan = small_plan(3);
    auto c1 = compose(plan);
    auto c2 = compose(plan);
    CHECK(c1.trajectory == c2.trajectory);
    REQUIRE(c1.trajectory.strokes.size() == 3);
    REQUIRE(c1.endpoints.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        const auto& s = c1.trajectory.strokes[i];
        CHECK(s.size() == 12);
        CHECK(s.at(0, 0) == c1.endpoints[i].start[0]);
        CHECK(s.at(0, 1) == c1.endpoints[i].start[1]);
        const double dx = s.at(11, 0) - c1.endpoints[i].end[0], dy = s.at(11, 1) - c1.endpoints[i].end[1];
        CHECK(c1.end_errors[i] == doctest::Approx(std::hypot(dx, dy)));
    }
}

TEST_CASE("swapping the lower decoder") {
    auto plan = small_plan(4);
    auto same = swap_models(plan, std::make_shared<TrajModel>(*plan.traj_model));
    CHECK(compose(same).trajectory == compose(plan).trajectory);
    CHECK(same.point_model == plan.point_model);

    auto other = std::make_shared<TrajModel>(
        TrajModel::create({.hidden = 6, .layers = 1, .latent = 2, .readout = 6, .samples = 12},
                          training_strokes(12, 4, 99), 99));
    auto swapped = compose(swap_models(plan, other));
    auto base = compose(plan);
    CHECK(swapped.endpoints == base.endpoints);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t c : {0u, 1u})
            CHECK(swapped.trajectory.strokes[i].at(0, c) == base.trajectory.strokes[i].at(0, c));

    ChannelSchema xy({{"x", "m", ChannelRole::Position}, {"y", "m", ChannelRole::Position}}, 0.008);
    std::vector<Trajectory> xy_strokes{Trajectory(xy, std::vector<double>{0, 0, 0.01, 0.01, 0.02, 0.02})};
    auto mismatched = std::make_shared<TrajModel>(
        TrajModel::create({.hidden = 4, .layers = 1, .latent = 2, .readout = 4, .samples = 3}, xy_strokes, 1));
    CHECK_THROWS_AS(swap_models(plan, mismatched), std::invalid_argument);
}

TEST_CASE("plan validation") {
    auto plan = small_plan(5);
    auto bad = plan;
    bad.z_point = {0.0};
    CHECK_THROWS(compose(bad));
    bad = plan;
    bad.m_count = 0;
    CHECK_THROWS(compose(bad));
    bad = plan;
    bad.z_traj = {{0.0, 0.0}, {0.0, 0.0}};
    CHECK_THROWS(compose(bad));
    bad = plan;
    bad.z_traj = {{0.5, -0.5}};
    CHECK_NOTHROW(compose(bad));
}

TEST_CASE("csv round trip") {
    auto plan = small_plan(6);
    auto c = compose(plan).trajectory;
    c.config = {{"seed", "6"}, {"m", "3"}};
    std::stringstream ss;
    write_csv(ss, c);
    const std::string text = ss.str();
    auto back = read_csv(ss);
    CHECK(back == c);
    CHECK(back.config == c.config);
    std::stringstream again;
    write_csv(again, back);
    CHECK(again.str() == text);
    std::stringstream bad("x,y\n1,2\n");
    CHECK_THROWS(read_csv(bad));
}

TEST_CASE("svg output") {
    MultiStrokeTrajectory empty;
    std::stringstream e;
    write_svg(e, empty);
    CHECK(e.str().find("<svg") != std::string::npos);
    CHECK(e.str().find("</svg>") != std::string::npos);

    MultiStrokeTrajectory three{{line(5, 0.008, 0.01, 0, 1.0), line(5, 0.008, 0, 0.01, 2.0), line(5, 0.008, 0.01, 0.01, 0.5)},
                                {}};
    std::stringstream s;
    write_svg(s, three);
    const std::string text = s.str();
    std::size_t count = 0;
    for (auto p = text.find("<polyline"); p != std::string::npos; p = text.find("<polyline", p + 1)) ++count;
    CHECK(count == 3);
    CHECK(text.find("id=\"stroke-3\"") != std::string::npos);
    CHECK(text.find("stroke-width=\"4.000\"") != std::string::npos);
}
