#include "doctest.h"

#include <sstream>
#include <stdexcept>

#include "hvae/fixtures/fixtures.hpp"
#include "hvae/ingest/ingest.hpp"
#include "hvae/models/model_io.hpp"

using namespace hvae;

namespace {

PointModel point_model(std::uint64_t seed) {
    std::vector<EndpointSequence> data{{
        {Sample({0.0, 0.0, 1.0}), Sample({0.05, 0.08, 1.2}), 1},
        {Sample({0.05, 0.08, 1.0}), Sample({0.1, 0.0, 1.1}), 2},
    }};
    auto m = PointModel::create({.hidden = 5, .latent = 3, .readout = 4, .max_strokes = 4},
                                ChannelSchema::planar_with_force(ingest::kRecordingPeriod), data, seed);
    m.run_config = {{"seed", std::to_string(seed)}, {"epochs", "0"}};
    return m;
}

TrajModel traj_model(std::uint64_t seed) {
    nn::Rng rng(seed);
    std::vector<Trajectory> strokes;
    for (int i = 0; i < 3; ++i)
        strokes.push_back(fixtures::make_stroke({.length = 0.05 + 0.01 * i, .angle_deg = 40.0 * i}, 8, rng));
    auto m = TrajModel::create({.hidden = 4, .layers = 2, .latent = 2, .readout = 3, .samples = 8}, strokes, seed);
    m.run_config = {{"seed", std::to_string(seed)}};
    return m;
}

}  // namespace

TEST_CASE("point model file round trip is exact and byte-stable") {
    auto m = point_model(3);
    std::stringstream a;
    write_model(a, m);
    const std::string text = a.str();
    auto back = read_point_model(a);
    CHECK(back.config() == m.config());
    CHECK(back.schema().same_channels(m.schema()));
    CHECK(back.stats() == m.stats());
    CHECK(back.run_config == m.run_config);
    CHECK(std::equal(back.parameters().values().begin(), back.parameters().values().end(),
                     m.parameters().values().begin(), m.parameters().values().end()));
    std::stringstream b;
    write_model(b, back);
    CHECK(b.str() == text);
    std::vector<double> z{0.3, -0.2, 0.1};
    CHECK(back.decode(z, 2) == m.decode(z, 2));
}

TEST_CASE("traj model file round trip is exact and byte-stable") {
    auto m = traj_model(4);
    std::stringstream a;
    write_model(a, m);
    const std::string text = a.str();
    auto back = read_traj_model(a);
    CHECK(back.config() == m.config());
    CHECK(back.sample_period() == m.sample_period());
    CHECK(back.stats() == m.stats());
    std::stringstream b;
    write_model(b, back);
    CHECK(b.str() == text);
    std::vector<double> z{0.5, -1.0};
    Sample end({0.04, 0.02, 1.0});
    CHECK(back.decode(z, end).trajectory == m.decode(z, end).trajectory);
}

TEST_CASE("model files with different seeds differ") {
    std::stringstream a, b;
    write_model(a, point_model(1));
    write_model(b, point_model(2));
    CHECK(a.str() != b.str());
}

TEST_CASE("malformed model files are rejected") {
    std::stringstream point;
    write_model(point, point_model(5));
    const std::string text = point.str();

    std::stringstream wrong_kind(text);
    CHECK_THROWS_WITH_AS(read_traj_model(wrong_kind), doctest::Contains("expected a traj model"), std::runtime_error);

    std::stringstream junk("not json");
    CHECK_THROWS_AS(read_point_model(junk), std::runtime_error);

    std::string versioned = text;
    versioned.replace(versioned.find("\"version\": 1"), 12, "\"version\": 7");
    std::stringstream v(versioned);
    CHECK_THROWS_WITH_AS(read_point_model(v), doctest::Contains("version"), std::runtime_error);

    std::string renamed = text;
    renamed.replace(renamed.find("encoder.lstm"), 12, "encoder.gru_");
    std::stringstream r(renamed);
    CHECK_THROWS_WITH_AS(read_point_model(r), doctest::Contains("layout expects"), std::runtime_error);

    std::string resized = text;
    resized.replace(resized.find("\"hidden\": 5"), 11, "\"hidden\": 6");
    std::stringstream s(resized);
    CHECK_THROWS_AS(read_point_model(s), std::runtime_error);
}
