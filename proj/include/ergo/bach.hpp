#pragma once

#include <vector>

#include "ergo/sync.hpp"
#include "ergo/types.hpp"

namespace ergo::bach {

// Maximum isometric wrist flexion moment (N m) as a piecewise fit of the
// flexion angle in degrees: linear on (-90, -8], quadratic on (-8, 90).
// Inputs outside (-90, 90) are clamped to the domain edges.
double m_flex(double theta_deg);

// Global maximum of m_flex, taken analytically at the quadratic vertex.
double m_flex_max();
double m_flex_vertex_deg();

// Inverse-capacity scaling: max_theta M_flex / M_flex(theta); >= 1 on the
// whole domain with equality only at the vertex.
double alpha_wr(double theta_deg);

enum class TorqueScalar {
    Magnitude,         // norm of the net moment about the wrist point
    FlexionComponent,  // |moment . flexion axis| (palm-lateral axis)
};

// Net torque at the wrist from all taxel forces. Each taxel force acts at
// its mapped landmark (plus hand-local offset) along -palm_normal.
double wrist_torque(const HandPoseFrame& hand, const GloveFrame& glove,
                    const TaxelMap& map, TorqueScalar scalar = TorqueScalar::Magnitude);

struct BachConfig {
    TorqueScalar scalar = TorqueScalar::Magnitude;
};

// Two passes: per-frame torques, then per-hand median normalization and
// inverse-moment scaling. Fails when a hand's median torque is zero.
ScoreSeries series(const sync::SyncedTrial& trial, const TaxelMap& map,
                   const BachConfig& cfg = {});

// Per-frame diagnostics for plotting: torque, wrist angle, scaling, score.
struct FrameDiag {
    double tau = 0.0;
    double theta_deg = 0.0;
    double alpha = 0.0;
    double score = 0.0;
};
struct Diagnostics {
    std::vector<FrameDiag> left, right;
    double tau_median_left = 0.0, tau_median_right = 0.0;
};
Diagnostics diagnostics(const sync::SyncedTrial& trial, const TaxelMap& map,
                        const BachConfig& cfg = {});

}  // namespace ergo::bach
