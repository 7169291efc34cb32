#include "ergo/bach.hpp"

#include <algorithm>
#include <cmath>

#include "ergo/error.hpp"

namespace ergo::bach {

namespace {

constexpr double kLinearSlope = 0.041;
constexpr double kLinearIntercept = 9.696;
constexpr double kQuadA = -0.001;
constexpr double kQuadB = 0.083;
constexpr double kQuadC = 10.110;
constexpr double kBranchEdgeDeg = -8.0;
constexpr double kDomainDeg = 90.0;

double median(std::vector<double> v) {
    size_t n = v.size();
    size_t mid = n / 2;
    std::nth_element(v.begin(), v.begin() + mid, v.end());
    double hi = v[mid];
    if (n % 2 == 1) return hi;
    std::nth_element(v.begin(), v.begin() + (mid - 1), v.begin() + mid);
    return 0.5 * (v[mid - 1] + hi);
}

}  // namespace

double m_flex(double theta_deg) {
    double theta = std::clamp(theta_deg, -kDomainDeg, kDomainDeg);
    if (theta <= kBranchEdgeDeg) return kLinearSlope * theta + kLinearIntercept;
    return kQuadA * theta * theta + kQuadB * theta + kQuadC;
}

double m_flex_vertex_deg() { return -kQuadB / (2.0 * kQuadA); }

double m_flex_max() {
    double v = m_flex_vertex_deg();
    return kQuadA * v * v + kQuadB * v + kQuadC;
}

double alpha_wr(double theta_deg) { return m_flex_max() / m_flex(theta_deg); }

double wrist_torque(const HandPoseFrame& hand, const GloveFrame& glove,
                    const TaxelMap& map, TorqueScalar scalar) {
    if (hand.side != glove.side)
        throw PreconditionError("bach_scorer", "hand pose and glove sides differ");
    if (std::fabs(hand.palm_normal.norm() - 1.0) > 1e-6)
        throw PreconditionError("bach_scorer", "degenerate palm normal");
    Vec3 n = hand.palm_normal;

    // hand-local frame for taxel offsets: palm-forward, palm-lateral, normal
    Vec3 u{1, 0, 0};
    {
        Vec3 forward = hand.landmarks[finger_landmark(2, 0)] - hand.wrist;
        Vec3 proj = forward - n * forward.dot(n);
        if (proj.norm() > 1e-9) u = proj.normalized("bach_scorer");
        else {
            // wrist coincides with the middle-finger base: fall back to any
            // axis orthogonal to the normal
            Vec3 seed = std::fabs(n.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
            u = (seed - n * seed.dot(n)).normalized("bach_scorer");
        }
    }
    Vec3 v = n.cross(u);

    Vec3 moment{};
    for (int i = 0; i < kTaxels; ++i) {
        double f = glove.taxels[i];
        if (f == 0.0) continue;
        const TaxelSite& site = map.sites[i];
        Vec3 p = hand.landmarks[site.landmark] + u * site.offset.x + v * site.offset.y +
                 n * site.offset.z;
        Vec3 force = -n * f;  // pressing into the material
        moment += (p - hand.wrist).cross(force);
    }
    switch (scalar) {
        case TorqueScalar::Magnitude:
            return moment.norm();
        case TorqueScalar::FlexionComponent:
            return std::fabs(moment.dot(v));
    }
    return moment.norm();
}

namespace {

void side_series(const sync::SyncedTrial& trial, const TaxelMap& map, const BachConfig& cfg,
                 Side side, std::vector<double>* scores, std::vector<FrameDiag>* diags,
                 double* tau_median_out) {
    const auto& hands = trial.hand(side);
    const auto& gloves = trial.glove(side);
    const auto& gonio = trial.gonio(side);
    size_t n = trial.size();

    std::vector<double> taus(n);
    for (size_t i = 0; i < n; ++i)
        taus[i] = wrist_torque(hands[i], gloves[i], map, cfg.scalar);

    double tau_median = n ? median(taus) : 0.0;
    if (!(tau_median > 0.0))
        throw PreconditionError("bach_scorer",
                                std::string(side_name(side)) +
                                    " hand: undefined normalization (median torque is zero)");
    if (tau_median_out) *tau_median_out = tau_median;

    if (scores) scores->resize(n);
    if (diags) diags->resize(n);
    for (size_t i = 0; i < n; ++i) {
        double theta = std::clamp(gonio[i].ch1, -kDomainDeg, kDomainDeg);
        double alpha = alpha_wr(theta);
        double score = taus[i] / tau_median * alpha;
        if (scores) (*scores)[i] = score;
        if (diags) (*diags)[i] = {taus[i], theta, alpha, score};
    }
}

}  // namespace

ScoreSeries series(const sync::SyncedTrial& trial, const TaxelMap& map,
                   const BachConfig& cfg) {
    if (trial.size() == 0)
        throw PreconditionError("bach_scorer", "empty trial");
    ScoreSeries out;
    out.kind = "bach";
    side_series(trial, map, cfg, Side::Left, &out.left, nullptr, nullptr);
    side_series(trial, map, cfg, Side::Right, &out.right, nullptr, nullptr);
    return out;
}

Diagnostics diagnostics(const sync::SyncedTrial& trial, const TaxelMap& map,
                        const BachConfig& cfg) {
    if (trial.size() == 0)
        throw PreconditionError("bach_scorer", "empty trial");
    Diagnostics d;
    side_series(trial, map, cfg, Side::Left, nullptr, &d.left, &d.tau_median_left);
    side_series(trial, map, cfg, Side::Right, nullptr, &d.right, &d.tau_median_right);
    return d;
}

}  // namespace ergo::bach
