#include <doctest.h>

#include <algorithm>
#include <random>

#include <enose/decoder.hpp>

using namespace enose;

namespace {

Stimulus stim(const std::string& gas, int level) {
    return {{gas}, ConcentrationLevel::of_level(level), 0.0, 1.0};
}

ConcentrationVector vec(DeltaT a, DeltaT b, DeltaT c) {
    ConcentrationVector v;
    v.per_sensor = {a, b, c};
    return v;
}

// small labeled set with well separated classes
std::vector<std::pair<Stimulus, ConcentrationVector>> two_class_set() {
    std::vector<std::pair<Stimulus, ConcentrationVector>> out;
    for (int i = 0; i < 4; ++i) {
        out.emplace_back(stim("EB", 1), vec(0.50, 0.60, 0.70));
        out.emplace_back(stim("Eu", 2), vec(0.25, 0.20, 0.35));
    }
    return out;
}

} // namespace

TEST_CASE("identical noiseless trials calibrate to the trial itself with zero std") {
    std::vector<std::pair<Stimulus, ConcentrationVector>> labeled;
    for (int i = 0; i < 20; ++i) labeled.emplace_back(stim("EB", 1), vec(0.5, 0.25, 0.1));
    auto cal = calibrate(labeled);
    const auto& stats = cal.classes.at({"EB", 1});
    CHECK(*stats.mean_inv_dt[0] == doctest::Approx(2.0));
    CHECK(*stats.mean_inv_dt[1] == doctest::Approx(4.0));
    CHECK(*stats.mean_inv_dt[2] == doctest::Approx(10.0));
    for (int s = 0; s < 3; ++s) CHECK(*stats.std_inv_dt[s] == doctest::Approx(0.0));
    CHECK(stats.n_trials == 20);
}

TEST_CASE("sensors missing in under half the trials still enter the centroid") {
    std::vector<std::pair<Stimulus, ConcentrationVector>> labeled;
    // sensor 2 missing in 8 of 20 trials, present with value 0.4 in the other 12
    for (int i = 0; i < 20; ++i)
        labeled.emplace_back(stim("EB", 1), vec(0.5, (i < 8) ? DeltaT{} : DeltaT{0.4}, 0.8));
    auto cal = calibrate(labeled);
    const auto& stats = cal.classes.at({"EB", 1});
    CHECK(stats.n_present[1] == 12);
    REQUIRE(stats.mean_inv_dt[1].has_value());
    CHECK(*stats.mean_inv_dt[1] == doctest::Approx(2.5));
}

TEST_CASE("sensors missing in most trials are dropped from the class") {
    std::vector<std::pair<Stimulus, ConcentrationVector>> labeled;
    for (int i = 0; i < 20; ++i)
        labeled.emplace_back(stim("EB", 1), vec(0.5, (i < 11) ? DeltaT{} : DeltaT{0.4}, 0.8));
    auto cal = calibrate(labeled);
    CHECK_FALSE(cal.classes.at({"EB", 1}).mean_inv_dt[1].has_value());
}

TEST_CASE("calibrate rejects empty input and fully absent classes") {
    CHECK_THROWS(calibrate({}));
    std::vector<std::pair<Stimulus, ConcentrationVector>> labeled;
    labeled.emplace_back(stim("EB", 1), vec({}, {}, {}));
    CHECK_THROWS(calibrate(labeled));
}

TEST_CASE("calibrate is permutation invariant") {
    auto labeled = two_class_set();
    // add some spread so std is nonzero
    labeled[0].second.per_sensor[0] = 0.52;
    labeled[2].second.per_sensor[0] = 0.48;
    auto shuffled = labeled;
    std::mt19937 rng(3);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    auto a = calibrate(labeled);
    auto b = calibrate(shuffled);
    REQUIRE(a.classes.size() == b.classes.size());
    for (const auto& [key, sa] : a.classes) {
        const auto& sb = b.classes.at(key);
        for (int s = 0; s < 3; ++s) {
            CHECK(*sa.mean_inv_dt[s] == doctest::Approx(*sb.mean_inv_dt[s]));
            CHECK(*sa.std_inv_dt[s] == doctest::Approx(*sb.std_inv_dt[s]));
        }
    }
}

TEST_CASE("a vector equal to a centroid classifies to it with score zero") {
    auto cal = calibrate(two_class_set());
    auto result = infer(vec(0.50, 0.60, 0.70), cal);
    CHECK(result.gas.label == "EB");
    CHECK(result.level == 1);
    CHECK(result.score == doctest::Approx(0.0));
}

TEST_CASE("inference works on a single present coordinate") {
    auto cal = calibrate(two_class_set());
    auto result = infer(vec(0.26, {}, {}), cal);
    CHECK(result.gas.label == "Eu");
    CHECK(result.level == 2);
}

TEST_CASE("infer rejects degenerate queries") {
    auto cal = calibrate(two_class_set());
    CHECK_THROWS(infer(vec({}, {}, {}), cal));
    CHECK_THROWS(infer(vec(0.5, {}, {}), Calibration{}));
}

TEST_CASE("infer fails when no class shares a coordinate with the query") {
    // class with only sensor 1; query with only sensor 3
    std::vector<std::pair<Stimulus, ConcentrationVector>> labeled;
    labeled.emplace_back(stim("EB", 1), vec(0.5, {}, {}));
    auto cal = calibrate(labeled);
    CHECK_THROWS(infer(vec({}, {}, 0.5), cal));
}

TEST_CASE("infer is scale consistent") {
    auto labeled = two_class_set();
    labeled[0].second.per_sensor[0] = 0.52; // nonzero std on one coordinate
    auto cal = calibrate(labeled);
    auto query = vec(0.45, 0.55, 0.75);
    auto base = infer(query, cal);

    const double c = 3.7;
    Calibration scaled = cal;
    for (auto& [key, stats] : scaled.classes)
        for (int s = 0; s < 3; ++s) {
            if (stats.mean_inv_dt[s]) *stats.mean_inv_dt[s] *= c;
            if (stats.std_inv_dt[s]) *stats.std_inv_dt[s] *= c;
        }
    scaled.std_floor *= c;
    auto scaled_query = query;
    for (int s = 0; s < 3; ++s) *scaled_query.per_sensor[s] /= c; // 1/dt scales by c
    auto result = infer(scaled_query, scaled);
    CHECK(result.gas.label == base.gas.label);
    CHECK(result.level == base.level);
}

TEST_CASE("masking a redundant coordinate does not change the answer") {
    auto cal = calibrate(two_class_set());
    auto full = infer(vec(0.50, 0.60, 0.70), cal);
    auto masked = infer(vec(0.50, {}, 0.70), cal);
    CHECK(full.gas.label == masked.gas.label);
    CHECK(full.level == masked.level);
}

TEST_CASE("evaluate on noiseless training data is the identity confusion matrix") {
    auto labeled = two_class_set();
    auto cal = calibrate(labeled);
    auto ev = evaluate(labeled, cal);
    CHECK(ev.joint_accuracy() == doctest::Approx(1.0));
    for (std::size_t i = 0; i < ev.gas_labels.size(); ++i)
        for (std::size_t j = 0; j < ev.gas_labels.size(); ++j)
            if (i != j) CHECK(ev.gas_confusion[i][j] == 0);
}

TEST_CASE("evaluate edge cases") {
    auto cal = calibrate(two_class_set());
    CHECK_THROWS(evaluate({}, cal));
    std::vector<std::pair<Stimulus, ConcentrationVector>> one;
    one.emplace_back(stim("EB", 1), vec(0.50, 0.60, 0.70));
    auto ev = evaluate(one, cal);
    CHECK(ev.n_total == 1);
    CHECK(ev.n_correct_joint == 1);
}
