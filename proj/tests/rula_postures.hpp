#pragma once

#include <vector>

#include "ergo/rula.hpp"

namespace ergo::testing {

// Curated postures hand-scored on the published RULA worksheet. Each entry
// records the full walk: band scores, Table A/B lookups, the muscle/force
// additions and the final Table C value.
struct ScoredPosture {
    const char* name;
    rula::UpperBodyAngles angles;  // the scored side is the right side
    rula::RulaAdjustments adj;
    int expected_final;
};

inline rula::UpperBodyAngles posture(double ua, bool raised, double la, bool cross,
                                     double wrist, bool dev, int twist, double neck,
                                     bool ntw, double trunk, bool ttw) {
    rula::UpperBodyAngles a;
    rula::SideAngles s;
    s.upper_arm_flexion_deg = ua;
    s.shoulder_raised = raised;
    s.lower_arm_flexion_deg = la;
    s.lower_arm_cross_midline = cross;
    s.wrist_flexion_deg = wrist;
    s.wrist_deviation = dev;
    s.wrist_twist_score = twist;
    a.left = a.right = s;
    a.neck_flexion_deg = neck;
    a.neck_twisted = ntw;
    a.trunk_flexion_deg = trunk;
    a.trunk_twisted = ttw;
    return a;
}

inline const std::vector<ScoredPosture>& curated_postures() {
    static const std::vector<ScoredPosture> postures = [] {
        std::vector<ScoredPosture> p;
        rula::RulaAdjustments paper{1, 2, 1};  // muscle 1, force 2, legs 1
        // neutral working posture: UA1 LA1 W1 T1 -> A=1, C=1+1+2=4;
        // N1 Tr1 L1 -> B=1, D=1+1+2=4; TableC(4,4)=4
        p.push_back({"neutral", posture(0, false, 80, false, 0, false, 1, 0, false, 0, false),
                     paper, 4});
        // everything at its worst band, force 3, legs 2:
        // UA 4+1=5, LA 2+1=3, W 3+1=4, T2 -> A=8, C=8+1+3=12->8;
        // neck ext 4+1=5, trunk 4+1=5, legs 2 -> B=8, D=12->7; C(8,7)=7
        p.push_back({"maximal", posture(100, true, 10, true, 20, true, 2, -5, true, 70, true),
                     {1, 3, 2}, 7});
        // zero adjustments: A=1, C=1; B=1, D=1; C(1,1)=1
        p.push_back({"zero_adjustments",
                     posture(0, false, 80, false, 0, false, 1, 0, false, 0, false),
                     {0, 0, 1}, 1});
        // UA band 2: A=TableA(2,1,1,1)=2, C=5; D=4; C(5,4)=5
        p.push_back({"arm_30", posture(30, false, 80, false, 0, false, 1, 0, false, 0, false),
                     paper, 5});
        // UA band 3: A=3, C=6; D=4; C(6,4)=6
        p.push_back({"arm_50", posture(50, false, 80, false, 0, false, 1, 0, false, 0, false),
                     paper, 6});
        // UA band 4: A=4, C=7; D=4; C(7,4)=6
        p.push_back({"arm_95", posture(95, false, 80, false, 0, false, 1, 0, false, 0, false),
                     paper, 6});
        // UA 4+1(raised)=5: A=5, C=8; D=4; C(8,4)=7
        p.push_back({"arm_95_raised",
                     posture(95, true, 80, false, 0, false, 1, 0, false, 0, false), paper, 7});
        // upper-arm extension beyond -20: band 2 -> A=2, C=5; D=4; C(5,4)=5
        p.push_back({"arm_extension",
                     posture(-30, false, 80, false, 0, false, 1, 0, false, 0, false), paper, 5});
        // wrist band 2: A=TableA(1,1,2,1)=2, C=5; D=4; C(5,4)=5
        p.push_back({"wrist_10", posture(0, false, 80, false, 10, false, 1, 0, false, 0, false),
                     paper, 5});
        // wrist band 3: A=TableA(1,1,3,1)=2, C=5; D=4; C(5,4)=5
        p.push_back({"wrist_20", posture(0, false, 80, false, -20, false, 1, 0, false, 0, false),
                     paper, 5});
        // wrist band 3 + deviation -> wrist 4: A=TableA(1,1,4,1)=3, C=6; D=4; C(6,4)=6
        p.push_back({"wrist_20_deviated",
                     posture(0, false, 80, false, 20, true, 1, 0, false, 0, false), paper, 6});
        // wrist twist 2: A=TableA(1,1,1,2)=2, C=5; D=4; C(5,4)=5
        p.push_back({"wrist_twist_end",
                     posture(0, false, 80, false, 0, false, 2, 0, false, 0, false), paper, 5});
        // straight elbow leaves the 60-100 working range: LA 2 -> A=2, C=5; C(5,4)=5
        p.push_back({"elbow_straight",
                     posture(0, false, 0, false, 0, false, 1, 0, false, 0, false), paper, 5});
        // forearm working across the midline: LA 1+1=2 -> A=2, C=5; C(5,4)=5
        p.push_back({"cross_midline",
                     posture(0, false, 80, true, 0, false, 1, 0, false, 0, false), paper, 5});
        // neck band 2: B=TableB(2,1,1)=2, D=5; A=1, C=4; C(4,5)=5
        p.push_back({"neck_15", posture(0, false, 80, false, 0, false, 1, 15, false, 0, false),
                     paper, 5});
        // neck band 3: B=3, D=6; C(4,6)=6
        p.push_back({"neck_25", posture(0, false, 80, false, 0, false, 1, 25, false, 0, false),
                     paper, 6});
        // neck in extension: band 4, B=TableB(4,1,1)=5, D=8->7; C(4,7)=6
        p.push_back({"neck_extension",
                     posture(0, false, 80, false, 0, false, 1, -10, false, 0, false), paper, 6});
        // trunk band 2: B=TableB(1,2,1)=2, D=5; C(4,5)=5
        p.push_back({"trunk_10", posture(0, false, 80, false, 0, false, 1, 0, false, 10, false),
                     paper, 5});
        // trunk band 3: B=TableB(1,3,1)=3, D=6; C(4,6)=6
        p.push_back({"trunk_30", posture(0, false, 80, false, 0, false, 1, 0, false, 30, false),
                     paper, 6});
        // trunk band 4: B=TableB(1,4,1)=5, D=8->7; C(4,7)=6
        p.push_back({"trunk_70", posture(0, false, 80, false, 0, false, 1, 0, false, 70, false),
                     paper, 6});
        // legs unsupported with trunk band 3: B=TableB(1,3,2)=4, D=7; C(4,7)=6
        p.push_back({"trunk_30_legs_2",
                     posture(0, false, 80, false, 0, false, 1, 0, false, 30, false),
                     {1, 2, 2}, 6});
        return p;
    }();
    return postures;
}

}  // namespace ergo::testing
