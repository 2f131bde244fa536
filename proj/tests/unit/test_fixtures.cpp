#include "doctest.h"

#include <cmath>

#include "hvae/fixtures/fixtures.hpp"
#include "hvae/ingest/ingest.hpp"

using namespace hvae;
using namespace hvae::fixtures;

TEST_CASE("straight stroke endpoints") {
    nn::Rng rng(1);
    SyntheticStrokeSpec spec{.length = 0.1, .angle_deg = 90.0, .peak_force = 2.0};
    auto s = make_stroke(spec, 50, rng);
    CHECK(s.size() == 50);
    CHECK(s.at(0, 0) == 0.0);
    CHECK(s.at(0, 1) == 0.0);
    CHECK(std::abs(s.at(49, 0)) < 1e-15);
    CHECK(s.at(49, 1) == doctest::Approx(0.1));
    for (std::size_t n = 0; n < s.size(); ++n) CHECK(s.at(n, 2) == 2.0);
    CHECK(s.sample_period() == ingest::kRecordingPeriod);
}

TEST_CASE("zigzag with zero amplitude is the straight stroke") {
    SyntheticStrokeSpec straight{.length = 0.08, .angle_deg = 30.0, .noise_sigma = 1e-4};
    SyntheticStrokeSpec zig = straight;
    zig.kind = StrokeKind::Zigzag;
    zig.frequency = 3.0;
    nn::Rng a(11), b(11);
    CHECK(make_stroke(straight, 40, a) == make_stroke(zig, 40, b));
}

TEST_CASE("zigzag with whole cycles ends on the chord") {
    nn::Rng rng(2);
    SyntheticStrokeSpec spec{.kind = StrokeKind::Zigzag, .amplitude = 0.01, .frequency = 2.0, .length = 0.1};
    auto s = make_stroke(spec, 101, rng);
    CHECK(s.at(100, 0) == doctest::Approx(0.1));
    CHECK(std::abs(s.at(100, 1)) < 1e-12);
    double max_lat = 0.0;
    for (std::size_t n = 0; n < s.size(); ++n) max_lat = std::max(max_lat, std::abs(s.at(n, 1)));
    CHECK(max_lat == doctest::Approx(0.01).epsilon(1e-3));
}

TEST_CASE("trapezoid force profile") {
    nn::Rng rng(3);
    SyntheticStrokeSpec spec{.profile = ForceProfile::Trapezoid, .peak_force = 1.5, .base_fraction = 0.4};
    auto s = make_stroke(spec, 101, rng);
    CHECK(s.at(0, 2) == doctest::Approx(0.6));
    CHECK(s.at(100, 2) == doctest::Approx(0.6));
    CHECK(s.at(50, 2) == 1.5);
}

TEST_CASE("stroke spec validation") {
    nn::Rng rng(4);
    CHECK_THROWS(make_stroke({.length = 0.0}, 10, rng));
    CHECK_THROWS(make_stroke({.peak_force = 0.2}, 10, rng));
    CHECK_THROWS(make_stroke({}, 1, rng));
    CHECK_THROWS(parse_stroke_kind("spiral"));
    CHECK(parse_stroke_kind("arc") == StrokeKind::Arc);
}

TEST_CASE("characters") {
    nn::Rng rng(5);
    auto a = make_character('A', 0.1, rng);
    CHECK(a.endpoints.size() == 3);
    CHECK(canonical_stroke_count('A') == 3);
    CHECK(a.endpoints[0].start[0] == 0.0);
    CHECK(a.endpoints[1].end[0] == doctest::Approx(0.1));
    CHECK_THROWS(make_character('A', 0.0, rng));
    CHECK_THROWS(make_character('?', 0.1, rng));

    nn::Rng r1(42), r2(42);
    CharacterOptions noisy{.corner_jitter = 1e-3, .noise_sigma = 1e-4};
    CHECK(make_character('E', 0.05, r1, noisy).recording == make_character('E', 0.05, r2, noisy).recording);
}

TEST_CASE("every letter segments back into its strokes") {
    nn::Rng rng(6);
    for (char c : supported_letters()) {
        CAPTURE(c);
        auto ch = make_character(c, 0.1, rng, {.corner_jitter = 5e-4, .noise_sigma = 5e-5});
        auto strokes = ingest::segment_strokes({ch.recording, std::string(1, c)}, {});
        CHECK(strokes.size() == canonical_stroke_count(c));
        CHECK(ingest::extract_endpoints(strokes) == ch.endpoints);
    }
}
