#pragma once

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "ergo/sync.hpp"
#include "ergo/types.hpp"

namespace ergo::rula {

// Angle-band edges. Bands are half-open and lower-inclusive: an angle equal
// to an edge falls in the band above it.
struct Bands {
    // upper arm: <ext_limit -> 2; [ext_limit,e0) -> 1; [e0,e1) -> 2; [e1,e2) -> 3; >=e2 -> 4
    double upper_arm_extension_limit_deg = -20.0;
    std::array<double, 3> upper_arm_edges_deg{20.0, 45.0, 90.0};
    // lower arm: flexion from straight in [min,max) -> 1, else 2
    double lower_arm_score1_min_deg = 60.0;
    double lower_arm_score1_max_deg = 100.0;
    // wrist: |flexion| < tol -> 1; < edge -> 2; >= edge -> 3
    double wrist_neutral_tol_deg = 0.5;
    double wrist_edge_deg = 15.0;
    // neck: extension (<0) -> 4; [0,e0) -> 1; [e0,e1) -> 2; >=e1 -> 3
    std::array<double, 2> neck_edges_deg{10.0, 20.0};
    // trunk: < tol -> 1; [tol,e0) -> 2; [e0,e1) -> 3; >=e1 -> 4
    double trunk_upright_tol_deg = 0.5;
    std::array<double, 2> trunk_edges_deg{20.0, 60.0};
};

// The published lookup tables. Table A rows are (upper arm 1-6) x (lower arm
// 1-3), columns (wrist 1-4) x (twist 1-2). Table B rows are neck 1-6,
// columns (trunk 1-6) x (legs 1-2). Table C is wrist/arm 1-8+ by
// neck/trunk/leg 1-7+.
struct Tables {
    Bands bands;
    std::array<std::array<int, 8>, 18> table_a{};
    std::array<std::array<int, 12>, 6> table_b{};
    std::array<std::array<int, 7>, 8> table_c{};

    static const Tables& builtin();
    static Tables from_json(const nlohmann::json& doc);
    static Tables load(const std::string& path);
    nlohmann::json to_json() const;
    void validate() const;

    bool operator==(const Tables&) const;
};

int band_upper_arm(const Bands& b, double deg);
int band_lower_arm(const Bands& b, double deg);
int band_wrist(const Bands& b, double deg);
int band_neck(const Bands& b, double deg);
int band_trunk(const Bands& b, double deg);

struct SideAngles {
    double upper_arm_flexion_deg = 0.0;
    bool shoulder_raised = false;
    double lower_arm_flexion_deg = 0.0;  // deviation from a straight elbow
    bool lower_arm_cross_midline = false;
    double wrist_flexion_deg = 0.0;  // goniometer ch1
    bool wrist_deviation = false;    // |ch2| beyond threshold
    int wrist_twist_score = 1;       // 1 near-neutral, 2 near end of range
};

struct UpperBodyAngles {
    SideAngles left, right;
    double neck_flexion_deg = 0.0;
    bool neck_twisted = false;
    double trunk_flexion_deg = 0.0;
    bool trunk_twisted = false;

    const SideAngles& side(Side s) const { return s == Side::Left ? left : right; }
};

// The paper's fixed adjustment scores: muscle use 1, force/load 2, legs 1.
struct RulaAdjustments {
    int muscle_use = 1;
    int force_load = 2;
    int leg_score = 1;
    void validate() const;
};

struct RulaResult {
    int score_a = 0;  // Table A (wrist & arm posture)
    int score_b = 0;  // Table B (neck, trunk, legs posture)
    int score_c = 0;  // score_a + muscle + force (row into Table C)
    int score_d = 0;  // score_b + muscle + force (column into Table C)
    int final_score = 0;
    Side side = Side::Left;
};

// Sub-scores after band mapping and posture-flag increments, pre-clamp.
struct SubScores {
    int upper_arm = 1, lower_arm = 1, wrist = 1, wrist_twist = 1;
    int neck = 1, trunk = 1, legs = 1;
};

RulaResult score_from_subscores(const Tables& tables, const SubScores& s,
                                const RulaAdjustments& adj, Side side);
RulaResult frame_score(const Tables& tables, const UpperBodyAngles& angles,
                       const RulaAdjustments& adj, Side side);

struct AngleConfig {
    Vec3 gravity_up{0, 0, 1};
    double wrist_deviation_threshold_deg = 15.0;
    double shoulder_raised_clearance_m = 0.04;
    double cross_midline_clearance_m = 0.02;
    double twist_threshold_deg = 20.0;
    int wrist_twist_score = 1;
};

// Trunk/neck/arm angles from the 3D skeleton plus wrist channels from the
// goniometers. Throws when a required joint is absent or degenerate.
UpperBodyAngles joint_angles(const BodyPoseFrame& body, const GonioSample& gonio_left,
                             const GonioSample& gonio_right, const AngleConfig& cfg = {});

std::vector<UpperBodyAngles> angle_series(const sync::SyncedTrial& trial,
                                          const AngleConfig& cfg = {});

ScoreSeries series(const sync::SyncedTrial& trial, const Tables& tables,
                   const RulaAdjustments& adj, const AngleConfig& cfg = {});

}  // namespace ergo::rula
