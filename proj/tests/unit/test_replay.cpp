#include "doctest.h"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "hvae/nn/rng.hpp"
#include "hvae/replay/replay.hpp"

using namespace hvae;
using namespace hvae::replay;

namespace {

PlantState run(const ReplayConfig& cfg, PlantState s, const Command& cmd, const StepOptions& opt, double seconds) {
    const auto steps = static_cast<std::size_t>(std::lround(seconds / cfg.gains.ts));
    for (std::size_t k = 0; k < steps; ++k) s = control_step(cfg, s, cmd, opt);
    return s;
}

MultiStrokeTrajectory horizontal_line(std::size_t n, double force) {
    std::vector<double> d;
    for (std::size_t i = 0; i < n; ++i) d.insert(d.end(), {1e-4 * static_cast<double>(i), 0.0, force});
    return {{Trajectory(ChannelSchema::planar_with_force(0.001), d)}, {{"seed", "1"}}};
}

}  // namespace

TEST_CASE("default gains") {
    ControllerGains g;
    CHECK(g.kp == Axes{500, 500, 100});
    CHECK(g.kd == Axes{35, 35, 200});
    CHECK(g.kf == Axes{0, 0, 0.15});
    CHECK(g.inertia == Axes{1.6, 0.72, 0.32});
    CHECK(g.cutoff_hz == 10.0);
    CHECK(g.ts == 0.001);
}

TEST_CASE("a free mass with zero gains coasts") {
    ReplayConfig cfg;
    cfg.gains.kp = cfg.gains.kd = cfg.gains.kf = Axes{};
    cfg.plant.surface_height = -1.0;
    auto s = make_state(cfg, {0.1, 0.2, 0.0}, {0.05, -0.02, 0.01});
    s = run(cfg, s, {}, {.force_control = false, .dob = false}, 1.0);
    CHECK(s.position[0] == doctest::Approx(0.15).epsilon(1e-12));
    CHECK(s.position[1] == doctest::Approx(0.18).epsilon(1e-12));
    CHECK(s.position[2] == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(s.velocity == Axes{0.05, -0.02, 0.01});
    CHECK(s.time == doctest::Approx(1.0));
}

TEST_CASE("position step settles within 2% in half a second") {
    ReplayConfig cfg;
    cfg.plant.surface_height = -1.0;
    for (bool dob : {false, true}) {
        CAPTURE(dob);
        auto s = make_state(cfg, {0, 0, 0});
        Command cmd{.position = {0.01, -0.01, 0.0}};
        const StepOptions opt{.force_control = false, .dob = dob};
        s = run(cfg, s, cmd, opt, 0.5);
        for (int k = 0; k < 500; ++k) {
            s = control_step(cfg, s, cmd, opt);
            CHECK(std::abs(s.position[0] - 0.01) <= 2e-4);
            CHECK(std::abs(s.position[1] + 0.01) <= 2e-4);
        }
    }
}

TEST_CASE("force control regulates contact force against a stiff surface") {
    ReplayConfig cfg;
    for (bool dob : {false, true}) {
        for (double f_cmd : {0.6, 2.0, 5.0}) {
            CAPTURE(dob);
            CAPTURE(f_cmd);
            auto s = make_state(cfg, {0, 0, 0.0});
            Command cmd{.position = {0, 0, 0}, .force = f_cmd};
            s = run(cfg, s, cmd, {.force_control = true, .dob = dob}, 3.0);
            // Without the observer the surface reaction is not cancelled and
            // the balance I Kf (f_cmd - f) = f leaves f = I Kf f_cmd / (1 + I Kf).
            const double mk = cfg.gains.inertia[2] * cfg.gains.kf[2];
            const double expected = dob ? f_cmd : mk * f_cmd / (1.0 + mk);
            CHECK(std::abs(s.contact_force - expected) <= 0.02 * expected);
            CHECK(s.position[2] == doctest::Approx(-expected / cfg.plant.k_env).epsilon(0.02));
        }
    }
}

TEST_CASE("position mode into the surface behaves as a spring") {
    ReplayConfig cfg;
    auto s = make_state(cfg, {0, 0, 0});
    Command cmd{.position = {0, 0, -0.001}};
    // Kp 100 against Kd 200 makes this loop slow (time constant about 7 s).
    s = run(cfg, s, cmd, {.force_control = false, .dob = true}, 40.0);
    CHECK(s.contact_force == doctest::Approx(10.0).epsilon(0.01));
}

TEST_CASE("observer estimate is a first-order lag of a constant disturbance") {
    ReplayConfig cfg;
    cfg.plant.surface_height = -1.0;
    const double g = 2.0 * std::numbers::pi * cfg.gains.cutoff_hz;
    auto s = make_state(cfg, {0, 0, 0});
    const StepOptions opt{.force_control = false, .dob = true, .disturbance = {5.0, 0.0, 0.0}};
    const auto settle = static_cast<int>(std::ceil(5.0 / g / cfg.gains.ts));
    for (int k = 1; k <= settle; ++k) {
        s = control_step(cfg, s, {}, opt);
        const double expected = 5.0 * (1.0 - std::pow(1.0 - cfg.gains.ts * g, k));
        CHECK(s.disturbance_estimate[0] == doctest::Approx(expected).epsilon(1e-9));
    }
    CHECK(std::abs(s.disturbance_estimate[0] - 5.0) <= 0.1);
    CHECK(std::abs(s.disturbance_estimate[1]) < 1e-15);
}

TEST_CASE("observer removes the steady error of a constant push") {
    ReplayConfig cfg;
    cfg.plant.surface_height = -1.0;
    const StepOptions push{.force_control = false, .dob = false, .disturbance = {5.0, 0.0, 0.0}};
    auto off = run(cfg, make_state(cfg, {0, 0, 0}), {}, push, 3.0);
    // Without compensation the spring Kp m balances the push: 5 / (1.6 * 500).
    CHECK(off.position[0] == doctest::Approx(5.0 / (1.6 * 500.0)).epsilon(0.01));
    StepOptions with = push;
    with.dob = true;
    auto on = run(cfg, make_state(cfg, {0, 0, 0}), {}, with, 3.0);
    CHECK(std::abs(on.position[0]) < 0.2 * std::abs(off.position[0]));
    CHECK(std::abs(on.position[0]) < 1e-5);
}

TEST_CASE("observer keeps force tracking under a constant push along z") {
    ReplayConfig cfg;
    const StepOptions off{.force_control = true, .dob = false, .disturbance = {0.0, 0.0, 0.5}};
    StepOptions on = off;
    on.dob = true;
    Command cmd{.force = 2.0};
    auto a = run(cfg, make_state(cfg, {0, 0, 0}), cmd, off, 3.0);
    auto b = run(cfg, make_state(cfg, {0, 0, 0}), cmd, on, 3.0);
    const double err_off = std::abs(a.contact_force - 2.0), err_on = std::abs(b.contact_force - 2.0);
    CHECK(err_off > 0.5);
    CHECK(err_on < 0.2 * err_off);
    CHECK(err_on < 0.02);
}

TEST_CASE("replay heights: reference depth and offset") {
    ReplayConfig cfg;
    cfg.plant.k_env = 500.0;
    auto traj = horizontal_line(15000, 1.5);
    for (double offset_mm : {0.0, 1.0, 2.0}) {
        CAPTURE(offset_mm);
        auto log = run_replay(cfg, traj, {.force_control = false, .reference_depth = 0.003, .height_offset = 1e-3 * offset_mm});
        CHECK(log.position_cmd.front()[2] == doctest::Approx(-0.003 + 1e-3 * offset_mm));
        CHECK(log.force.back() == doctest::Approx(500.0 * (0.003 - 1e-3 * offset_mm)).epsilon(0.02));
    }
    CHECK_THROWS(run_replay(cfg, traj, {.height_offset = std::nan("")}));
}

TEST_CASE("pure damping never adds energy") {
    ReplayConfig cfg;
    cfg.gains.kp = Axes{};
    cfg.gains.kf = Axes{};
    cfg.gains.cutoff_hz = 0.0;
    cfg.plant.surface_height = -1.0;
    nn::Rng rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        Axes v{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
        auto s = make_state(cfg, {0, 0, 0}, v);
        auto energy = [&](const PlantState& p) {
            double e = 0.0;
            for (std::size_t a = 0; a < kAxes; ++a) e += 0.5 * cfg.gains.inertia[a] * p.velocity[a] * p.velocity[a];
            return e;
        };
        double prev = energy(s);
        for (int k = 0; k < 300; ++k) {
            s = control_step(cfg, s, {.position = {rng.uniform(-1, 1), rng.uniform(-1, 1), 0}}, {.force_control = false, .dob = false});
            const double e = energy(s);
            CHECK(e <= prev);
            prev = e;
        }
    }
}

TEST_CASE("contact force is never negative") {
    ReplayConfig cfg;
    nn::Rng rng(9);
    auto s = make_state(cfg, {0, 0, 0.002});
    for (int k = 0; k < 3000; ++k) {
        Command cmd{.position = {rng.uniform(-0.01, 0.01), rng.uniform(-0.01, 0.01), rng.uniform(-0.003, 0.003)},
                    .force = rng.uniform(0.0, 3.0)};
        s = control_step(cfg, s, cmd, {.force_control = (k / 500) % 2 == 0, .dob = true});
        CHECK(s.contact_force >= 0.0);
        CHECK(s.contact_force == cfg.plant.contact_force(s.position[2]));
    }
}

TEST_CASE("replay of a stroke") {
    ReplayConfig cfg;
    auto traj = horizontal_line(2000, 1.5);
    auto log = run_replay(cfg, traj, {});
    REQUIRE(log.size() == 2000);
    CHECK(log.config == traj.config);
    CHECK(log.stroke.front() == 1);
    CHECK(log.time.front() == doctest::Approx(0.001));
    CHECK(std::abs(log.force.back() - 1.5) <= 0.03);
    for (std::size_t i = 0; i < log.size(); ++i) CHECK(log.force[i] >= 0.0);

    auto again = run_replay(cfg, traj, {});
    CHECK(again.position == log.position);
    CHECK(again.force == log.force);

    std::stringstream a, b;
    write_log(a, log);
    write_log(b, again);
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("#hvae-replay 1\n", 0) == 0);

    MultiStrokeTrajectory empty;
    CHECK(run_replay(cfg, empty, {}).size() == 0);

    auto coarse = traj;
    coarse.strokes[0] = Trajectory(ChannelSchema::planar_with_force(0.008),
                                   std::vector<double>(traj.strokes[0].data().begin(), traj.strokes[0].data().end()));
    CHECK_THROWS_WITH_AS(run_replay(cfg, coarse, {}), doctest::Contains("resample"), std::invalid_argument);
}

TEST_CASE("gains file") {
    std::stringstream in(
        "# table\nKp = 500, 500, 100, 600, 600, 600\nKd=35,35,200\nKf = 0,0,0.15 # force\n"
        "I = 1.6, 0.72, 0.32, 0.3, 0.3, 0.04\ng = 10\nTs = 0.001\nK_env = 5000\nz_position_in_force_mode = on\n");
    auto cfg = parse_config(in);
    CHECK(cfg.gains.kp == Axes{500, 500, 100});
    CHECK(cfg.gains.inertia == Axes{1.6, 0.72, 0.32});
    CHECK(cfg.plant.k_env == 5000.0);
    CHECK(cfg.gains.z_position_in_force_mode);

    std::stringstream out;
    write_config(out, cfg);
    auto back = parse_config(out);
    CHECK(back.gains.kd == cfg.gains.kd);
    CHECK(back.plant.k_env == cfg.plant.k_env);
    CHECK(back.gains.z_position_in_force_mode);

    for (const char* bad : {"Kp = 1, 2\n", "Kq = 1\n", "Ts = 0\n", "I = 1, 0, 1\n", "Kd = -1, 0, 0\n", "g 10\n",
                            "z_position_in_force_mode = maybe\n"}) {
        CAPTURE(bad);
        std::stringstream s(bad);
        CHECK_THROWS_AS(parse_config(s), std::invalid_argument);
    }
}
