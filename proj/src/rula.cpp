#include "ergo/rula.hpp"

#include <algorithm>
#include <cmath>

#include "ergo/error.hpp"
#include "ergo/io_util.hpp"

using nlohmann::json;

namespace ergo::rula {

const Tables& Tables::builtin() {
    static const Tables tables = [] {
        Tables t;
        // Table A, rows (upper-1)*3 + (lower-1), cols (wrist-1)*2 + (twist-1)
        t.table_a = {{
            {1, 2, 2, 2, 2, 3, 3, 3},  // U1 L1
            {2, 2, 2, 2, 3, 3, 3, 3},  // U1 L2
            {2, 3, 3, 3, 3, 3, 4, 4},  // U1 L3
            {2, 3, 3, 3, 3, 4, 4, 4},  // U2 L1
            {3, 3, 3, 3, 3, 4, 4, 4},  // U2 L2
            {3, 4, 4, 4, 4, 4, 5, 5},  // U2 L3
            {3, 3, 4, 4, 4, 4, 5, 5},  // U3 L1
            {3, 4, 4, 4, 4, 4, 5, 5},  // U3 L2
            {4, 4, 4, 4, 4, 5, 5, 5},  // U3 L3
            {4, 4, 4, 4, 4, 5, 5, 5},  // U4 L1
            {4, 4, 4, 4, 4, 5, 5, 5},  // U4 L2
            {4, 4, 4, 5, 5, 5, 6, 6},  // U4 L3
            {5, 5, 5, 5, 5, 6, 6, 7},  // U5 L1
            {5, 6, 6, 6, 6, 7, 7, 7},  // U5 L2
            {6, 6, 6, 7, 7, 7, 7, 8},  // U5 L3
            {7, 7, 7, 7, 7, 8, 8, 9},  // U6 L1
            {8, 8, 8, 8, 8, 9, 9, 9},  // U6 L2
            {9, 9, 9, 9, 9, 9, 9, 9},  // U6 L3
        }};
        // Table B, rows neck-1, cols (trunk-1)*2 + (legs-1)
        t.table_b = {{
            {1, 3, 2, 3, 3, 4, 5, 5, 6, 6, 7, 7},
            {2, 3, 2, 3, 4, 5, 5, 5, 6, 7, 7, 7},
            {3, 3, 3, 4, 4, 5, 5, 6, 6, 7, 7, 7},
            {5, 5, 5, 6, 6, 7, 7, 7, 7, 7, 8, 8},
            {7, 7, 7, 7, 7, 8, 8, 8, 8, 8, 8, 8},
            {8, 8, 8, 8, 8, 8, 8, 9, 9, 9, 9, 9},
        }};
        // Table C, rows wrist/arm 1-8+, cols neck/trunk/legs 1-7+
        t.table_c = {{
            {1, 2, 3, 3, 4, 5, 5},
            {2, 2, 3, 4, 4, 5, 5},
            {3, 3, 3, 4, 4, 5, 6},
            {3, 3, 3, 4, 5, 6, 6},
            {4, 4, 4, 5, 6, 7, 7},
            {4, 4, 5, 6, 6, 7, 7},
            {5, 5, 6, 6, 7, 7, 7},
            {5, 5, 6, 7, 7, 7, 7},
        }};
        t.validate();
        return t;
    }();
    return tables;
}

void Tables::validate() const {
    auto check = [](int v, const char* where) {
        if (v < 1 || v > 9)
            throw ValidationError("rula_scorer",
                                  std::string("table entry out of range in ") + where);
    };
    for (const auto& row : table_a)
        for (int v : row) check(v, "table_a");
    for (const auto& row : table_b)
        for (int v : row) check(v, "table_b");
    for (const auto& row : table_c)
        for (int v : row) {
            check(v, "table_c");
            if (v > 7) throw ValidationError("rula_scorer", "table_c entry above 7");
        }
    if (!(bands.upper_arm_edges_deg[0] < bands.upper_arm_edges_deg[1] &&
          bands.upper_arm_edges_deg[1] < bands.upper_arm_edges_deg[2]))
        throw ValidationError("rula_scorer", "upper arm edges not increasing");
    if (!(bands.lower_arm_score1_min_deg < bands.lower_arm_score1_max_deg))
        throw ValidationError("rula_scorer", "lower arm band empty");
}

json Tables::to_json() const {
    json doc;
    doc["schema"] = "ergo.rula_tables.v1";
    doc["bands"] = {
        {"upper_arm",
         {{"extension_limit_deg", bands.upper_arm_extension_limit_deg},
          {"edges_deg", bands.upper_arm_edges_deg}}},
        {"lower_arm",
         {{"score1_min_deg", bands.lower_arm_score1_min_deg},
          {"score1_max_deg", bands.lower_arm_score1_max_deg}}},
        {"wrist",
         {{"neutral_tol_deg", bands.wrist_neutral_tol_deg},
          {"edge_deg", bands.wrist_edge_deg}}},
        {"neck", {{"edges_deg", bands.neck_edges_deg}}},
        {"trunk",
         {{"upright_tol_deg", bands.trunk_upright_tol_deg},
          {"edges_deg", bands.trunk_edges_deg}}},
    };
    doc["table_a"] = table_a;
    doc["table_b"] = table_b;
    doc["table_c"] = table_c;
    return doc;
}

Tables Tables::from_json(const json& doc) {
    Tables t;
    try {
        const json& b = doc.at("bands");
        t.bands.upper_arm_extension_limit_deg =
            b.at("upper_arm").at("extension_limit_deg").get<double>();
        auto ua = b.at("upper_arm").at("edges_deg").get<std::vector<double>>();
        if (ua.size() != 3) throw ValidationError("rula_scorer", "upper_arm needs 3 edges");
        std::copy(ua.begin(), ua.end(), t.bands.upper_arm_edges_deg.begin());
        t.bands.lower_arm_score1_min_deg = b.at("lower_arm").at("score1_min_deg").get<double>();
        t.bands.lower_arm_score1_max_deg = b.at("lower_arm").at("score1_max_deg").get<double>();
        t.bands.wrist_neutral_tol_deg = b.at("wrist").at("neutral_tol_deg").get<double>();
        t.bands.wrist_edge_deg = b.at("wrist").at("edge_deg").get<double>();
        auto ne = b.at("neck").at("edges_deg").get<std::vector<double>>();
        if (ne.size() != 2) throw ValidationError("rula_scorer", "neck needs 2 edges");
        std::copy(ne.begin(), ne.end(), t.bands.neck_edges_deg.begin());
        t.bands.trunk_upright_tol_deg = b.at("trunk").at("upright_tol_deg").get<double>();
        auto tr = b.at("trunk").at("edges_deg").get<std::vector<double>>();
        if (tr.size() != 2) throw ValidationError("rula_scorer", "trunk needs 2 edges");
        std::copy(tr.begin(), tr.end(), t.bands.trunk_edges_deg.begin());

        auto load_table = [&doc](const char* name, auto& table) {
            const json& rows = doc.at(name);
            if (!rows.is_array() || rows.size() != table.size())
                throw ValidationError("rula_scorer", std::string(name) + ": wrong row count");
            for (size_t r = 0; r < table.size(); ++r) {
                if (rows[r].size() != table[r].size())
                    throw ValidationError("rula_scorer",
                                          std::string(name) + ": wrong column count");
                for (size_t c = 0; c < table[r].size(); ++c)
                    table[r][c] = rows[r][c].get<int>();
            }
        };
        load_table("table_a", t.table_a);
        load_table("table_b", t.table_b);
        load_table("table_c", t.table_c);
    } catch (const json::exception& e) {
        throw ParseError("rula_scorer", std::string("rula tables: ") + e.what());
    }
    t.validate();
    return t;
}

Tables Tables::load(const std::string& path) {
    try {
        return from_json(json::parse(read_text_file(path)));
    } catch (const json::exception& e) {
        throw ParseError("rula_scorer", std::string("rula tables: ") + e.what());
    }
}

bool Tables::operator==(const Tables& o) const {
    return table_a == o.table_a && table_b == o.table_b && table_c == o.table_c &&
           bands.upper_arm_extension_limit_deg == o.bands.upper_arm_extension_limit_deg &&
           bands.upper_arm_edges_deg == o.bands.upper_arm_edges_deg &&
           bands.lower_arm_score1_min_deg == o.bands.lower_arm_score1_min_deg &&
           bands.lower_arm_score1_max_deg == o.bands.lower_arm_score1_max_deg &&
           bands.wrist_neutral_tol_deg == o.bands.wrist_neutral_tol_deg &&
           bands.wrist_edge_deg == o.bands.wrist_edge_deg &&
           bands.neck_edges_deg == o.bands.neck_edges_deg &&
           bands.trunk_upright_tol_deg == o.bands.trunk_upright_tol_deg &&
           bands.trunk_edges_deg == o.bands.trunk_edges_deg;
}

int band_upper_arm(const Bands& b, double deg) {
    if (deg < b.upper_arm_extension_limit_deg) return 2;
    if (deg < b.upper_arm_edges_deg[0]) return 1;
    if (deg < b.upper_arm_edges_deg[1]) return 2;
    if (deg < b.upper_arm_edges_deg[2]) return 3;
    return 4;
}

int band_lower_arm(const Bands& b, double deg) {
    return (deg >= b.lower_arm_score1_min_deg && deg < b.lower_arm_score1_max_deg) ? 1 : 2;
}

int band_wrist(const Bands& b, double deg) {
    double a = std::fabs(deg);
    if (a < b.wrist_neutral_tol_deg) return 1;
    if (a < b.wrist_edge_deg) return 2;
    return 3;
}

int band_neck(const Bands& b, double deg) {
    if (deg < 0.0) return 4;  // extension
    if (deg < b.neck_edges_deg[0]) return 1;
    if (deg < b.neck_edges_deg[1]) return 2;
    return 3;
}

int band_trunk(const Bands& b, double deg) {
    if (deg < b.trunk_upright_tol_deg) return 1;
    if (deg < b.trunk_edges_deg[0]) return 2;
    if (deg < b.trunk_edges_deg[1]) return 3;
    return 4;
}

void RulaAdjustments::validate() const {
    if (muscle_use < 0 || muscle_use > 1)
        throw PreconditionError("rula_scorer", "muscle use score must be 0 or 1");
    if (force_load < 0 || force_load > 3)
        throw PreconditionError("rula_scorer", "force/load score must be in 0..3");
    if (leg_score < 1 || leg_score > 2)
        throw PreconditionError("rula_scorer", "leg score must be 1 or 2");
}

RulaResult score_from_subscores(const Tables& tables, const SubScores& s,
                                const RulaAdjustments& adj, Side side) {
    adj.validate();
    int ua = std::clamp(s.upper_arm, 1, 6);
    int la = std::clamp(s.lower_arm, 1, 3);
    int wr = std::clamp(s.wrist, 1, 4);
    int tw = std::clamp(s.wrist_twist, 1, 2);
    int neck = std::clamp(s.neck, 1, 6);
    int trunk = std::clamp(s.trunk, 1, 6);
    int legs = std::clamp(s.legs, 1, 2);

    RulaResult r;
    r.side = side;
    r.score_a = tables.table_a[(ua - 1) * 3 + (la - 1)][(wr - 1) * 2 + (tw - 1)];
    r.score_b = tables.table_b[neck - 1][(trunk - 1) * 2 + (legs - 1)];
    r.score_c = r.score_a + adj.muscle_use + adj.force_load;
    r.score_d = r.score_b + adj.muscle_use + adj.force_load;
    r.final_score = tables.table_c[std::min(r.score_c, 8) - 1][std::min(r.score_d, 7) - 1];
    return r;
}

RulaResult frame_score(const Tables& tables, const UpperBodyAngles& angles,
                       const RulaAdjustments& adj, Side side) {
    const SideAngles& sa = angles.side(side);
    SubScores s;
    s.upper_arm = band_upper_arm(tables.bands, sa.upper_arm_flexion_deg) +
                  (sa.shoulder_raised ? 1 : 0);
    s.lower_arm = band_lower_arm(tables.bands, sa.lower_arm_flexion_deg) +
                  (sa.lower_arm_cross_midline ? 1 : 0);
    s.wrist = band_wrist(tables.bands, sa.wrist_flexion_deg) + (sa.wrist_deviation ? 1 : 0);
    s.wrist_twist = sa.wrist_twist_score;
    s.neck = band_neck(tables.bands, angles.neck_flexion_deg) + (angles.neck_twisted ? 1 : 0);
    s.trunk =
        band_trunk(tables.bands, angles.trunk_flexion_deg) + (angles.trunk_twisted ? 1 : 0);
    s.legs = adj.leg_score;
    return score_from_subscores(tables, s, adj, side);
}

namespace {

const Vec3& need(const BodyPoseFrame& body, const char* joint) {
    auto it = body.joints.find(joint);
    if (it == body.joints.end() || !it->second.finite())
        throw PreconditionError("rula_scorer", std::string("missing joint: ") + joint);
    return it->second;
}

// nullptr when the horizontal projection is too short to carry a direction
bool horizontal_angle_exceeds(const Vec3& a, const Vec3& b, const Vec3& up, double thr_deg) {
    Vec3 pa = a - up * a.dot(up);
    Vec3 pb = b - up * b.dot(up);
    if (pa.norm() < 1e-9 || pb.norm() < 1e-9) return false;
    return angle_between_deg(pa, pb, "rula_scorer") > thr_deg;
}

}  // namespace

UpperBodyAngles joint_angles(const BodyPoseFrame& body, const GonioSample& gonio_left,
                             const GonioSample& gonio_right, const AngleConfig& cfg) {
    const Vec3& nose = need(body, joints::kNose);
    const Vec3& mid_shoulder = need(body, joints::kMidShoulder);
    const Vec3& mid_hip = need(body, joints::kMidHip);
    Vec3 up = cfg.gravity_up.normalized("rula_scorer");

    Vec3 trunk_up = mid_shoulder - mid_hip;
    if (trunk_up.norm() < 1e-9)
        throw PreconditionError("rula_scorer",
                                "missing joint: degenerate trunk (mid_shoulder == mid_hip)");
    Vec3 neck = nose - mid_shoulder;
    if (neck.norm() < 1e-9)
        throw PreconditionError("rula_scorer",
                                "missing joint: degenerate neck (nose == mid_shoulder)");

    UpperBodyAngles out;
    out.trunk_flexion_deg = angle_between_deg(trunk_up, up, "rula_scorer");
    out.neck_flexion_deg = angle_between_deg(neck, trunk_up, "rula_scorer");

    const Vec3& l_eye = need(body, joints::kLeftEye);
    const Vec3& r_eye = need(body, joints::kRightEye);
    const Vec3& l_shoulder = need(body, joints::kLeftShoulder);
    const Vec3& r_shoulder = need(body, joints::kRightShoulder);
    const Vec3& l_hip = need(body, joints::kLeftHip);
    const Vec3& r_hip = need(body, joints::kRightHip);
    out.neck_twisted = horizontal_angle_exceeds(r_eye - l_eye, r_shoulder - l_shoulder, up,
                                                cfg.twist_threshold_deg);
    out.trunk_twisted = horizontal_angle_exceeds(r_shoulder - l_shoulder, r_hip - l_hip, up,
                                                 cfg.twist_threshold_deg);

    Vec3 trunk_down = mid_hip - mid_shoulder;
    for (Side side : {Side::Left, Side::Right}) {
        const bool left = side == Side::Left;
        const Vec3& shoulder = need(body, left ? joints::kLeftShoulder : joints::kRightShoulder);
        const Vec3& elbow = need(body, left ? joints::kLeftElbow : joints::kRightElbow);
        const Vec3& wrist = need(body, left ? joints::kLeftWrist : joints::kRightWrist);
        const GonioSample& gonio = left ? gonio_left : gonio_right;

        Vec3 upper = elbow - shoulder;
        Vec3 fore = wrist - elbow;
        if (upper.norm() < 1e-9)
            throw PreconditionError("rula_scorer", "missing joint: degenerate upper arm");
        if (fore.norm() < 1e-9)
            throw PreconditionError("rula_scorer", "missing joint: degenerate forearm");

        SideAngles sa;
        sa.upper_arm_flexion_deg = angle_between_deg(upper, trunk_down, "rula_scorer");
        double interior = angle_between_deg(-upper, fore, "rula_scorer");
        sa.lower_arm_flexion_deg = 180.0 - interior;
        sa.shoulder_raised =
            (shoulder - mid_shoulder).dot(up) > cfg.shoulder_raised_clearance_m;
        Vec3 side_dir = shoulder - mid_shoulder;
        if (side_dir.norm() > 1e-9)
            sa.lower_arm_cross_midline =
                (wrist - mid_shoulder).dot(side_dir.normalized("rula_scorer")) <
                -cfg.cross_midline_clearance_m;
        sa.wrist_flexion_deg = gonio.ch1;
        sa.wrist_deviation = std::fabs(gonio.ch2) >= cfg.wrist_deviation_threshold_deg;
        sa.wrist_twist_score = cfg.wrist_twist_score;
        (left ? out.left : out.right) = sa;
    }
    return out;
}

std::vector<UpperBodyAngles> angle_series(const sync::SyncedTrial& trial,
                                          const AngleConfig& cfg) {
    std::vector<UpperBodyAngles> out;
    out.reserve(trial.size());
    for (size_t i = 0; i < trial.size(); ++i)
        out.push_back(
            joint_angles(trial.body[i], trial.gonio_left[i], trial.gonio_right[i], cfg));
    return out;
}

ScoreSeries series(const sync::SyncedTrial& trial, const Tables& tables,
                   const RulaAdjustments& adj, const AngleConfig& cfg) {
    ScoreSeries out;
    out.kind = "rula";
    out.left.reserve(trial.size());
    out.right.reserve(trial.size());
    for (size_t i = 0; i < trial.size(); ++i) {
        UpperBodyAngles angles =
            joint_angles(trial.body[i], trial.gonio_left[i], trial.gonio_right[i], cfg);
        out.left.push_back(frame_score(tables, angles, adj, Side::Left).final_score);
        out.right.push_back(frame_score(tables, angles, adj, Side::Right).final_score);
    }
    return out;
}

}  // namespace ergo::rula
