#include <doctest.h>

#include <cmath>

#include "ergo/error.hpp"
#include "ergo/rula.hpp"
#include "ergo/synth.hpp"
#include "helpers.hpp"
#include "rula_postures.hpp"

using namespace ergo;
using namespace ergo::rula;

namespace {

// Minimal upright skeleton; arms hang straight down unless displaced.
BodyPoseFrame vertical_skeleton() {
    BodyPoseFrame f;
    f.joints[joints::kMidHip] = {0, 0, 1.0};
    f.joints[joints::kLeftHip] = {0, 0.14, 1.0};
    f.joints[joints::kRightHip] = {0, -0.14, 1.0};
    f.joints[joints::kMidShoulder] = {0, 0, 1.5};
    f.joints[joints::kLeftShoulder] = {0, 0.19, 1.5};
    f.joints[joints::kRightShoulder] = {0, -0.19, 1.5};
    f.joints[joints::kNose] = {0, 0, 1.76};
    f.joints[joints::kLeftEye] = {0.02, 0.033, 1.78};
    f.joints[joints::kRightEye] = {0.02, -0.033, 1.78};
    f.joints[joints::kLeftElbow] = {0, 0.19, 1.2};
    f.joints[joints::kRightElbow] = {0, -0.19, 1.2};
    f.joints[joints::kLeftWrist] = {0, 0.19, 0.93};
    f.joints[joints::kRightWrist] = {0, -0.19, 0.93};
    return f;
}

}  // namespace

TEST_CASE("checked-in tables file matches the embedded tables") {
    Tables from_file = Tables::load(std::string(ERGO_SOURCE_DIR) + "/data/rula_tables.json");
    CHECK(from_file == Tables::builtin());
}

TEST_CASE("band edges are lower-inclusive") {
    const Bands& b = Tables::builtin().bands;
    CHECK(band_upper_arm(b, 19.999) == 1);
    CHECK(band_upper_arm(b, 20.0) == 2);  // 20 falls in the 20-45 band
    CHECK(band_upper_arm(b, 45.0) == 3);
    CHECK(band_upper_arm(b, 90.0) == 4);
    CHECK(band_upper_arm(b, -20.0) == 1);
    CHECK(band_upper_arm(b, -20.5) == 2);
    CHECK(band_lower_arm(b, 60.0) == 1);
    CHECK(band_lower_arm(b, 100.0) == 2);
    CHECK(band_lower_arm(b, 0.0) == 2);
    CHECK(band_wrist(b, 0.0) == 1);
    CHECK(band_wrist(b, 15.0) == 3);
    CHECK(band_wrist(b, -7.0) == 2);
    CHECK(band_neck(b, 10.0) == 2);
    CHECK(band_neck(b, -0.001) == 4);
    CHECK(band_trunk(b, 0.0) == 1);
    CHECK(band_trunk(b, 20.0) == 3);
    CHECK(band_trunk(b, 60.0) == 4);
}

TEST_CASE("vertical skeleton yields zero trunk, neck and upper-arm angles") {
    BodyPoseFrame body = vertical_skeleton();
    GonioSample gl{Side::Left, 0, 0}, gr{Side::Right, 0, 0};
    UpperBodyAngles a = joint_angles(body, gl, gr);
    CHECK(a.trunk_flexion_deg == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(a.neck_flexion_deg == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(a.left.upper_arm_flexion_deg == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(a.right.upper_arm_flexion_deg == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(a.left.lower_arm_flexion_deg == doctest::Approx(0.0).epsilon(1e-9));
    CHECK_FALSE(a.left.shoulder_raised);
    CHECK_FALSE(a.neck_twisted);
    CHECK_FALSE(a.trunk_twisted);
}

TEST_CASE("horizontal upper arm reads ninety degrees") {
    BodyPoseFrame body = vertical_skeleton();
    body.joints[joints::kRightElbow] = Vec3{0.3, -0.19, 1.5};
    body.joints[joints::kRightWrist] = Vec3{0.6, -0.19, 1.5};
    GonioSample g{Side::Right, 0, 0};
    UpperBodyAngles a = joint_angles(body, g, g);
    CHECK(a.right.upper_arm_flexion_deg == doctest::Approx(90.0).epsilon(1e-9));
    CHECK(a.right.lower_arm_flexion_deg == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("degenerate trunk is reported as a missing joint") {
    BodyPoseFrame body = vertical_skeleton();
    body.joints[joints::kMidShoulder] = body.joints[joints::kMidHip];
    GonioSample g{Side::Left, 0, 0};
    CHECK_THROWS_WITH_AS(joint_angles(body, g, g), doctest::Contains("missing joint"),
                         PreconditionError);

    BodyPoseFrame gone = vertical_skeleton();
    gone.joints.erase(joints::kNose);
    CHECK_THROWS_AS(joint_angles(gone, g, g), PreconditionError);
}

TEST_CASE("goniometer channels feed the wrist sub-scores") {
    BodyPoseFrame body = vertical_skeleton();
    GonioSample gl{Side::Left, 12.0, -20.0};
    GonioSample gr{Side::Right, -3.0, 4.0};
    UpperBodyAngles a = joint_angles(body, gl, gr);
    CHECK(a.left.wrist_flexion_deg == 12.0);
    CHECK(a.left.wrist_deviation);        // |-20| >= 15
    CHECK_FALSE(a.right.wrist_deviation); // |4| < 15
    CHECK(a.right.wrist_flexion_deg == -3.0);
    CHECK(a.left.wrist_twist_score == 1);
}

TEST_CASE("curated worksheet postures score exactly") {
    const Tables& tables = Tables::builtin();
    for (const testing::ScoredPosture& sp : testing::curated_postures()) {
        RulaResult r = frame_score(tables, sp.angles, sp.adj, Side::Right);
        INFO("posture: ", sp.name);
        CHECK(r.final_score == sp.expected_final);
        CHECK(r.final_score >= 1);
        CHECK(r.final_score <= 7);
    }
}

TEST_CASE("neutral posture with the paper's adjustments walks to 4") {
    UpperBodyAngles neutral =
        testing::posture(0, false, 80, false, 0, false, 1, 0, false, 0, false);
    RulaResult r = frame_score(Tables::builtin(), neutral, {1, 2, 1}, Side::Left);
    CHECK(r.score_a == 1);
    CHECK(r.score_b == 1);
    CHECK(r.score_c == 4);
    CHECK(r.score_d == 4);
    CHECK(r.final_score == 4);
}

TEST_CASE("frame scoring is pure") {
    UpperBodyAngles a = testing::posture(35, true, 40, false, 18, true, 2, 12, true, 25, false);
    RulaResult r1 = frame_score(Tables::builtin(), a, {1, 2, 1}, Side::Right);
    RulaResult r2 = frame_score(Tables::builtin(), a, {1, 2, 1}, Side::Right);
    CHECK(r1.final_score == r2.final_score);
    CHECK(r1.score_a == r2.score_a);
    CHECK(r1.score_c == r2.score_c);
}

TEST_CASE("worsening any sub-score never lowers the final score") {
    const Tables& tables = Tables::builtin();
    int checked = 0;
    for (int ua = 1; ua <= 6; ++ua)
        for (int la = 1; la <= 3; ++la)
            for (int wr = 1; wr <= 4; ++wr)
                for (int tw = 1; tw <= 2; ++tw)
                    for (int neck = 1; neck <= 6; ++neck)
                        for (int trunk = 1; trunk <= 6; ++trunk)
                            for (int legs = 1; legs <= 2; ++legs)
                                for (int muscle = 0; muscle <= 1; ++muscle)
                                    for (int force = 0; force <= 3; ++force) {
                                        SubScores s{ua, la, wr, tw, neck, trunk, legs};
                                        RulaAdjustments adj{muscle, force, legs};
                                        int base =
                                            score_from_subscores(tables, s, adj, Side::Left)
                                                .final_score;
                                        auto bump = [&](SubScores b, RulaAdjustments a2) {
                                            int v = score_from_subscores(tables, b, a2,
                                                                         Side::Left)
                                                        .final_score;
                                            CHECK(v >= base);
                                            ++checked;
                                        };
                                        if (ua < 6) bump({ua + 1, la, wr, tw, neck, trunk, legs}, adj);
                                        if (la < 3) bump({ua, la + 1, wr, tw, neck, trunk, legs}, adj);
                                        if (wr < 4) bump({ua, la, wr + 1, tw, neck, trunk, legs}, adj);
                                        if (tw < 2) bump({ua, la, wr, tw + 1, neck, trunk, legs}, adj);
                                        if (neck < 6) bump({ua, la, wr, tw, neck + 1, trunk, legs}, adj);
                                        if (trunk < 6) bump({ua, la, wr, tw, neck, trunk + 1, legs}, adj);
                                        if (legs < 2)
                                            bump({ua, la, wr, tw, neck, trunk, legs + 1},
                                                 {muscle, force, legs + 1});
                                        if (muscle < 1)
                                            bump(s, {muscle + 1, force, legs});
                                        if (force < 3)
                                            bump(s, {muscle, force + 1, legs});
                                    }
    CHECK(checked > 500000);
}

TEST_CASE("table lookups clamp instead of indexing out of bounds") {
    const Tables& tables = Tables::builtin();
    SubScores worst{99, 99, 99, 99, 99, 99, 99};
    RulaResult r = score_from_subscores(tables, worst, {1, 3, 2}, Side::Left);
    CHECK(r.final_score == 7);
    SubScores low{-5, 0, 0, 0, -2, 0, 0};
    RulaResult r2 = score_from_subscores(tables, low, {0, 0, 1}, Side::Left);
    CHECK(r2.final_score >= 1);
}

TEST_CASE("adjustment ranges are validated") {
    UpperBodyAngles neutral =
        testing::posture(0, false, 80, false, 0, false, 1, 0, false, 0, false);
    CHECK_THROWS_AS(frame_score(Tables::builtin(), neutral, {2, 2, 1}, Side::Left),
                    PreconditionError);
    CHECK_THROWS_AS(frame_score(Tables::builtin(), neutral, {1, 4, 1}, Side::Left),
                    PreconditionError);
    CHECK_THROWS_AS(frame_score(Tables::builtin(), neutral, {1, 2, 3}, Side::Left),
                    PreconditionError);
}

TEST_CASE("a still neutral trial scores a constant series of 4") {
    TrialBundle bundle = synth::generate_trial(testing::neutral_scenario(2.0), 1);
    sync::SyncedTrial trial = sync::synchronize(bundle);
    ScoreSeries s = series(trial, Tables::builtin(), {1, 2, 1});
    REQUIRE(s.size() == trial.size());
    for (size_t i = 0; i < s.size(); ++i) {
        CHECK(s.left[i] == 4.0);
        CHECK(s.right[i] == 4.0);
    }
}

TEST_CASE("an empty trial produces an empty series") {
    sync::SyncedTrial empty;
    ScoreSeries s = series(empty, Tables::builtin(), {1, 2, 1});
    CHECK(s.size() == 0);
    CHECK(s.right.empty());
}

TEST_CASE("alternating postures alternate scores frame by frame") {
    // neutral frame (final 4) alternated with a heavy-lean frame
    BodyPoseFrame neutral = vertical_skeleton();
    // 80 degree elbow bend keeps the forearm in the working band
    double a = 80.0 * M_PI / 180.0;
    for (Side side : {Side::Left, Side::Right}) {
        double y = side == Side::Left ? 0.19 : -0.19;
        Vec3 elbow{0, y, 1.2};
        neutral.joints[side == Side::Left ? joints::kLeftWrist : joints::kRightWrist] =
            elbow + Vec3{std::sin(a), 0, -std::cos(a)} * 0.27;
    }

    BodyPoseFrame worst = neutral;  // trunk 70 degrees, arm 100, elbow straight, wrist 30/20
    {
        double t = 70.0 * M_PI / 180.0;
        Vec3 mid_hip{0, 0, 1.0};
        Vec3 trunk_dir{std::sin(t), 0, std::cos(t)};
        Vec3 mid_shoulder = mid_hip + trunk_dir * 0.5;
        worst.joints[joints::kMidShoulder] = mid_shoulder;
        worst.joints[joints::kLeftShoulder] = mid_shoulder + Vec3{0, 0.19, 0};
        worst.joints[joints::kRightShoulder] = mid_shoulder + Vec3{0, -0.19, 0};
        worst.joints[joints::kNose] = mid_shoulder + trunk_dir * 0.26;
        worst.joints[joints::kLeftEye] = mid_shoulder + trunk_dir * 0.26 + Vec3{0, 0.033, 0.02};
        worst.joints[joints::kRightEye] = mid_shoulder + trunk_dir * 0.26 + Vec3{0, -0.033, 0.02};
        // arm 100 degrees from the down-trunk direction, elbow straight
        double raise = 100.0 * M_PI / 180.0;
        Vec3 down = -trunk_dir;
        Vec3 arm{std::cos(raise) * down.x + std::sin(raise) * down.z, 0,
                 -std::sin(raise) * down.x + std::cos(raise) * down.z};
        for (Side side : {Side::Left, Side::Right}) {
            double y = side == Side::Left ? 0.19 : -0.19;
            Vec3 shoulder = mid_shoulder + Vec3{0, y, 0};
            Vec3 elbow = shoulder + arm * 0.3;
            worst.joints[side == Side::Left ? joints::kLeftElbow : joints::kRightElbow] = elbow;
            worst.joints[side == Side::Left ? joints::kLeftWrist : joints::kRightWrist] =
                elbow + arm * 0.27;
        }
    }

    sync::SyncedTrial trial;
    trial.participant_id = "T";
    trial.tool = "stringer";
    for (int i = 0; i < 10; ++i) {
        bool odd = i % 2 == 1;
        trial.t.push_back(i / 60.0);
        trial.body.push_back(odd ? worst : neutral);
        trial.hand_left.push_back({});
        trial.hand_right.push_back({});
        GonioSample gl{Side::Left, odd ? 30.0 : 0.0, odd ? 20.0 : 0.0};
        GonioSample gr{Side::Right, odd ? 30.0 : 0.0, odd ? 20.0 : 0.0};
        trial.gonio_left.push_back(gl);
        trial.gonio_right.push_back(gr);
        trial.glove_left.push_back({});
        trial.glove_right.push_back({});
    }
    ScoreSeries s = series(trial, Tables::builtin(), {1, 2, 1});
    for (size_t i = 0; i < s.size(); ++i) {
        double expected = i % 2 == 1 ? 7.0 : 4.0;
        CHECK(s.left[i] == expected);
        CHECK(s.right[i] == expected);
    }
}
