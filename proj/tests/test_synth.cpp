#include <doctest.h>

#include <cmath>

#include "ergo/error.hpp"
#include "ergo/streams.hpp"
#include "ergo/synth.hpp"
#include "helpers.hpp"

using namespace ergo;

namespace {

double index_sum(const GloveFrame& g) {
    TaxelMap map = TaxelMap::default_map();
    double sum = 0.0;
    for (int i = 0; i < kTaxels; ++i)
        if (map.sites[i].finger == FingerId::Index) sum += g.taxels[i];
    return sum;
}

}  // namespace

TEST_CASE("constant 5 N on the index fingertip sums to 5 N every frame") {
    synth::Scenario sc = testing::neutral_scenario(10.0);
    synth::ForcePrimitive hold;
    hold.type = synth::PrimitiveType::Hold;
    hold.finger = FingerId::Index;
    hold.peak_n = 5.0;
    hold.start_s = 0.0;
    hold.end_s = 10.0;
    sc.primitives.push_back(hold);

    TrialBundle bundle = synth::generate_trial(sc, 1);
    for (Side side : {Side::Left, Side::Right}) {
        const SensorStream& glove = bundle.stream({Modality::Glove, side});
        REQUIRE(!glove.empty());
        for (const GloveFrame& frame : glove.glove) CHECK(index_sum(frame) == 5.0);
    }
}

TEST_CASE("generation is a pure function of scenario and seed") {
    synth::Scenario sc = testing::active_scenario(4.0);
    sc.force_noise_n = 0.2;
    sc.pose_noise_m = 0.002;
    sc.amp_jitter_pct = 10.0;
    TrialBundle a = synth::generate_trial(sc, 42);
    TrialBundle b = synth::generate_trial(sc, 42);
    for (const auto& [kind, stream] : a.streams)
        CHECK(streams::serialize_stream(stream) ==
              streams::serialize_stream(b.stream(kind)));

    TrialBundle c = synth::generate_trial(sc, 43);
    bool any_difference = false;
    for (const auto& [kind, stream] : a.streams)
        if (streams::serialize_stream(stream) != streams::serialize_stream(c.stream(kind)))
            any_difference = true;
    CHECK(any_difference);
}

TEST_CASE("a 2 Hz pinch crosses the 15 N finger threshold twice per second") {
    synth::Scenario sc = testing::neutral_scenario(10.0);
    synth::ForcePrimitive pinch;
    pinch.type = synth::PrimitiveType::Pinch;
    pinch.finger = FingerId::Index;
    pinch.peak_n = 20.0;
    pinch.freq_hz = 2.0;
    pinch.start_s = 0.0;
    pinch.end_s = 10.0;
    sc.primitives.push_back(pinch);

    TrialBundle bundle = synth::generate_trial(sc, 1);
    const SensorStream& glove = bundle.stream({Modality::Glove, Side::Left});
    // oracle: count upward crossings of the threshold in the generated trace
    int crossings = 0;
    double prev = 0.0;
    for (const GloveFrame& frame : glove.glove) {
        double cur = index_sum(frame);
        if (prev <= 15.0 && cur > 15.0) ++crossings;
        prev = cur;
    }
    CHECK(crossings == 20);  // 2 per second for 10 s
}

TEST_CASE("invalid scenarios are rejected") {
    synth::Scenario sc = testing::neutral_scenario();
    sc.duration_s = 0.0;
    CHECK_THROWS_AS(synth::generate_trial(sc, 1), PreconditionError);
    sc = testing::neutral_scenario();
    sc.glove_rate = -25.0;
    CHECK_THROWS_AS(synth::generate_trial(sc, 1), PreconditionError);
    sc = testing::neutral_scenario();
    synth::ForcePrimitive bad;
    bad.start_s = 5.0;
    bad.end_s = 1.0;
    sc.primitives.push_back(bad);
    CHECK_THROWS_AS(synth::generate_trial(sc, 1), PreconditionError);
}

TEST_CASE("streams honor their native rates") {
    synth::Scenario sc = testing::active_scenario(6.0);
    TrialBundle bundle = synth::generate_trial(sc, 9);
    auto expect_rate = [&](StreamKind kind, double rate) {
        const SensorStream& s = bundle.stream(kind);
        CHECK(s.size() == static_cast<size_t>(std::floor(sc.duration_s * rate + 1e-9)) + 1);
        CHECK(s.native_rate == doctest::Approx(rate).epsilon(0.01));
    };
    expect_rate({Modality::BodyPose, std::nullopt}, sc.body_rate);
    expect_rate({Modality::HandPose, Side::Left}, sc.hand_rate);
    expect_rate({Modality::Gonio, Side::Right}, sc.gonio_rate);
    expect_rate({Modality::Glove, Side::Left}, sc.glove_rate);
}

TEST_CASE("hand pose is kinematically consistent with the body skeleton") {
    TrialBundle bundle = synth::generate_trial(testing::active_scenario(2.0), 4);
    const SensorStream& body = bundle.stream({Modality::BodyPose, std::nullopt});
    const SensorStream& hand = bundle.stream({Modality::HandPose, Side::Left});
    // both streams start at t=0, where the hand wrist must sit on the body wrist
    REQUIRE(body.t[0] == 0.0);
    REQUIRE(hand.t[0] == 0.0);
    Vec3 body_wrist = body.body[0].at(joints::kLeftWrist);
    CHECK((hand.hand[0].wrist - body_wrist).norm() < 1e-12);
    // palm normals are unit everywhere
    for (const HandPoseFrame& f : hand.hand)
        CHECK(std::fabs(f.palm_normal.norm() - 1.0) < 1e-9);
    // body frames carry the derived midpoints
    CHECK(body.body[0].has(joints::kMidShoulder));
    CHECK(body.body[0].has(joints::kMidHip));
}

TEST_CASE("scenario parses from a config file") {
    Config cfg = Config::parse(
        "[trial]\n"
        "participant_id = P7\n"
        "tool = convex_mold\n"
        "duration_s = 12\n"
        "[rates]\n"
        "glove = 40\n"
        "[motion]\n"
        "trunk_lean_deg = 3\n"
        "[forces]\n"
        "primitive = pinch:index:20:2:0:6\n"
        "primitive = press:all:60:0.5:6:12:right\n");
    synth::Scenario sc = synth::Scenario::from_config(cfg);
    CHECK(sc.participant_id == "P7");
    CHECK(sc.tool == "convex_mold");
    CHECK(sc.duration_s == 12.0);
    CHECK(sc.glove_rate == 40.0);
    CHECK(sc.trunk_lean_deg == 3.0);
    REQUIRE(sc.primitives.size() == 2);
    CHECK(sc.primitives[0].type == synth::PrimitiveType::Pinch);
    CHECK(sc.primitives[0].finger == FingerId::Index);
    CHECK(sc.primitives[1].all_fingers);
    CHECK(sc.primitives[1].side == Side::Right);
    CHECK_THROWS_AS(synth::ForcePrimitive::parse("wiggle:index:1:1:0:1"), ParseError);
}

TEST_CASE("palm primitive loads only palm taxels") {
    synth::Scenario sc = testing::neutral_scenario(2.0);
    synth::ForcePrimitive palm;
    palm.type = synth::PrimitiveType::Palm;
    palm.peak_n = 12.0;
    palm.start_s = 0.0;
    palm.end_s = 2.0;
    sc.primitives.push_back(palm);
    TrialBundle bundle = synth::generate_trial(sc, 1);
    const GloveFrame& g = bundle.stream({Modality::Glove, Side::Left}).glove[0];
    TaxelMap map = TaxelMap::default_map();
    double palm_total = 0.0, finger_total = 0.0;
    for (int i = 0; i < kTaxels; ++i)
        (map.sites[i].finger == FingerId::Palm ? palm_total : finger_total) += g.taxels[i];
    CHECK(palm_total == 12.0);
    CHECK(finger_total == 0.0);
}
