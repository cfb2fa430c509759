#include <doctest.h>

#include <enose/events.hpp>
#include <enose/signal_model.hpp>

using namespace enose;

TEST_CASE("single-sensor delta t is EM rise minus CD rise") {
    EventLog log;
    log.declare("Out_CD");
    log.declare("Out_EM");
    log.record("Out_CD", 0.10, true);
    log.record("Out_EM", 0.35, true);
    auto dt = delta_t_single(log);
    REQUIRE(dt.has_value());
    CHECK(*dt == doctest::Approx(0.25));
}

TEST_CASE("missing EM pulse gives an absent delta t") {
    EventLog log;
    log.declare("Out_CD");
    log.declare("Out_EM");
    log.record("Out_CD", 0.10, true);
    CHECK_FALSE(delta_t_single(log).has_value());
}

TEST_CASE("concentration vector is measured against Q_out") {
    EventLog log;
    for (const char* n : {"Q_out", "EM1", "EM2", "EM3"}) log.declare(n);
    log.record("Q_out", 0.08, true);
    log.record("EM1", 0.20, true);
    log.record("EM2", 0.45, true);
    log.record("EM3", 0.90, true);
    auto v = concentration_vector(log);
    CHECK(*v.per_sensor[0] == doctest::Approx(0.12));
    CHECK(*v.per_sensor[1] == doctest::Approx(0.37));
    CHECK(*v.per_sensor[2] == doctest::Approx(0.82));
}

TEST_CASE("a missing EM channel stays absent, the others survive") {
    EventLog log;
    for (const char* n : {"Q_out", "EM1", "EM2", "EM3"}) log.declare(n);
    log.record("Q_out", 0.08, true);
    log.record("EM1", 0.20, true);
    log.record("EM3", 0.90, true);
    auto v = concentration_vector(log);
    CHECK(v.per_sensor[0].has_value());
    CHECK_FALSE(v.per_sensor[1].has_value());
    CHECK(v.per_sensor[2].has_value());
}

TEST_CASE("no Q_out means an all-absent vector") {
    EventLog log;
    for (const char* n : {"Q_out", "EM1", "EM2", "EM3"}) log.declare(n);
    auto v = concentration_vector(log);
    for (int s = 0; s < 3; ++s) CHECK_FALSE(v.per_sensor[s].has_value());
}

TEST_CASE("inverse code is the elementwise reciprocal with absents preserved") {
    CHECK(*inverse(DeltaT{0.25}) == doctest::Approx(4.0));
    CHECK_FALSE(inverse(std::nullopt).has_value());
    ConcentrationVector v;
    v.per_sensor = {DeltaT{0.5}, std::nullopt, DeltaT{2.0}};
    auto inv = inverse_code(v);
    CHECK(*inv[0] == doctest::Approx(2.0));
    CHECK_FALSE(inv[1].has_value());
    CHECK(*inv[2] == doctest::Approx(0.5));
}

TEST_CASE("noiseless level sweep gives strictly decreasing delta t for EB on sensor 1") {
    auto params = default_sensor_params(0.0);
    auto cfg = default_circuit_config();
    double previous = 1e9;
    for (int level = 1; level <= 5; ++level) {
        Stimulus stim{{"EB"}, ConcentrationLevel::of_level(level), 0.0, 1.0};
        auto trace = synthesize_trace(params[0], stim, 1e-3, -1.0, 10.0, 1);
        auto dt = delta_t_single(run_single_sensor(trace, cfg));
        REQUIRE(dt.has_value());
        CHECK(*dt < previous);
        previous = *dt;
    }
}
