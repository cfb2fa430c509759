#include <doctest.h>

#include <enose/signal_model.hpp>

using namespace enose;

namespace {

SensorModelParams simple_params(double noise_sigma = 0.0) {
    SensorModelParams p;
    p.sensor_id = 1;
    p.baseline_v = 0.2;
    p.sensitivity_v = {{"EB", 1.0}, {"zero", 0.0}};
    p.tau_rise_s = {{"EB", 0.3}, {"zero", 0.3}};
    p.tau_decay_s = {{"EB", 2.0}, {"zero", 2.0}};
    p.noise_sigma_v = noise_sigma;
    return p;
}

Stimulus eb_stim(int level = 1) {
    return {{"EB"}, ConcentrationLevel::of_level(level), 0.0, 1.0};
}

} // namespace

TEST_CASE("zero-sensitivity stimulus leaves the trace at baseline") {
    auto p = simple_params();
    Stimulus stim{{"zero"}, ConcentrationLevel::of_level(5), 0.0, 1.0};
    auto trace = synthesize_trace(p, stim, 1e-3, -0.5, 3.0, 1);
    for (double v : trace.samples) CHECK(v == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("first-order step response reaches 63.2% of A at one rise time") {
    auto p = simple_params();
    Stimulus stim = eb_stim(5); // A = 1.0
    auto trace = synthesize_trace(p, stim, 1e-3, -0.1, 2.0, 1);
    // t = onset + tau_rise = 0.3 s is sample index 400
    const double expected = 0.2 + 1.0 * (1.0 - std::exp(-1.0));
    CHECK(std::abs(trace.samples[400] - expected) < 1e-6);
}

TEST_CASE("peak amplitude above baseline is linear in relative concentration") {
    auto p = simple_params();
    Stimulus c1 = eb_stim(1), c5 = eb_stim(5);
    c1.duration_s = c5.duration_s = 6.0; // duration much longer than tau_rise
    auto t1 = synthesize_trace(p, c1, 1e-3, -0.1, 6.0, 1);
    auto t5 = synthesize_trace(p, c5, 1e-3, -0.1, 6.0, 1);
    const double peak1 = *std::max_element(t1.samples.begin(), t1.samples.end()) - 0.2;
    const double peak5 = *std::max_element(t5.samples.begin(), t5.samples.end()) - 0.2;
    CHECK(peak5 == doctest::Approx(5.0 * peak1).epsilon(1e-6));
}

TEST_CASE("noiseless traces are monotone during rise and after offset") {
    auto p = simple_params();
    auto trace = synthesize_trace(p, eb_stim(3), 1e-3, -0.5, 8.0, 1);
    for (std::size_t i = 1; i < trace.samples.size(); ++i) {
        const double t = trace.time_at(i);
        if (t > 0.0 && t <= 1.0) CHECK(trace.samples[i] >= trace.samples[i - 1]);
        if (t > 1.0 + 1e-9) CHECK(trace.samples[i] <= trace.samples[i - 1]);
    }
}

TEST_CASE("synthesis is bit-reproducible for a fixed seed") {
    auto p = simple_params(0.01);
    auto a = synthesize_trace(p, eb_stim(2), 1e-3, -0.5, 3.0, 1234);
    auto b = synthesize_trace(p, eb_stim(2), 1e-3, -0.5, 3.0, 1234);
    CHECK(a.samples == b.samples);
    auto c = synthesize_trace(p, eb_stim(2), 1e-3, -0.5, 3.0, 1235);
    CHECK(a.samples != c.samples);
}

TEST_CASE("synthesize_trace rejects bad arguments") {
    auto p = simple_params();
    CHECK_THROWS(synthesize_trace(p, eb_stim(1), 0.0, -0.5, 3.0, 1));
    CHECK_THROWS(synthesize_trace(p, eb_stim(1), -1e-3, -0.5, 3.0, 1));
    CHECK_THROWS(synthesize_trace(p, eb_stim(1), 1e-3, 0.5, 3.0, 1)); // onset before start
    Stimulus unknown{{"XX"}, ConcentrationLevel::of_level(1), 0.0, 1.0};
    CHECK_THROWS(synthesize_trace(p, unknown, 1e-3, -0.5, 3.0, 1));
    auto bad = p;
    bad.baseline_v = std::nan("");
    CHECK_THROWS(synthesize_trace(bad, eb_stim(1), 1e-3, -0.5, 3.0, 1));
}

TEST_CASE("default campaign has 300 trials with every pair 20 times") {
    CampaignSpec spec;
    spec.dt_s = 1e-2; // coarse sampling keeps this test fast
    auto trials = campaign(spec, default_sensor_params(0.001), 99);
    CHECK(trials.size() == 300);
    std::map<std::pair<std::string, int>, int> counts;
    for (const auto& t : trials)
        counts[{t.stimulus.gas.label, t.stimulus.level.level}]++;
    CHECK(counts.size() == 15);
    for (const auto& [key, n] : counts) CHECK(n == 20);
}

TEST_CASE("minimal campaign") {
    CampaignSpec spec;
    spec.gases = {{"EB"}};
    spec.levels = {3};
    spec.n_trials = 1;
    spec.dt_s = 1e-2;
    auto trials = campaign(spec, default_sensor_params(0.0), 7);
    CHECK(trials.size() == 1);
    CHECK(trials[0].stimulus.level.level == 3);
}

TEST_CASE("campaign is deterministic in the schedule seed") {
    CampaignSpec spec;
    spec.n_trials = 2;
    spec.dt_s = 1e-2;
    spec.t_end_s = 3.0;
    auto params = default_sensor_params(0.002);
    auto a = campaign(spec, params, 5);
    auto b = campaign(spec, params, 5);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].stimulus.gas.label == b[i].stimulus.gas.label);
        CHECK(a[i].stimulus.level.level == b[i].stimulus.level.level);
        for (int s = 0; s < 3; ++s) CHECK(a[i].traces[s].samples == b[i].traces[s].samples);
    }
    // per-trial noise seeds are distinct
    CHECK(a[0].traces[0].samples != a[1].traces[0].samples);
}

TEST_CASE("campaign rejects empty gas or level sets") {
    CampaignSpec spec;
    spec.gases.clear();
    CHECK_THROWS(campaign(spec, default_sensor_params(), 1));
    spec = CampaignSpec{};
    spec.levels.clear();
    CHECK_THROWS(campaign(spec, default_sensor_params(), 1));
    spec = CampaignSpec{};
    spec.n_trials = 0;
    CHECK_THROWS(campaign(spec, default_sensor_params(), 1));
}
