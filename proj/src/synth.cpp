#include "ergo/synth.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ergo/error.hpp"
#include "ergo/rng.hpp"

namespace ergo::synth {

namespace {

constexpr double kPi = 3.141592653589793;
constexpr double kDegToRad = kPi / 180.0;

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
}

// Rotation about +Y by angle_deg applied to a vector in the XZ plane
// (the sagittal plane of the generated skeleton).
Vec3 rot_y(const Vec3& v, double angle_deg) {
    double a = angle_deg * kDegToRad;
    double c = std::cos(a), s = std::sin(a);
    return {c * v.x + s * v.z, v.y, -s * v.x + c * v.z};
}

struct AmpJitter {
    double posture = 1.0;
    double force = 1.0;
};

// Continuous-time skeleton model shared by the body, hand and gonio
// generators so that multi-rate streams stay kinematically consistent.
struct SkeletonModel {
    const Scenario& sc;
    AmpJitter jit;

    double trunk_angle(double t) const {
        return jit.posture * (sc.trunk_lean_deg +
                              sc.trunk_sway_deg * std::sin(2 * kPi * sc.trunk_sway_hz * t));
    }
    double arm_angle(double t, Side side) const {
        double phase = side == Side::Left ? 0.0 : kPi / 3.0;
        double a = sc.arm_raise_deg +
                   sc.arm_sway_deg * std::sin(2 * kPi * sc.arm_sway_hz * t + phase);
        return std::max(0.0, jit.posture * a);
    }
    double elbow_angle(double t, Side side) const {
        double phase = side == Side::Left ? kPi / 5.0 : 0.0;
        double a = sc.elbow_flex_deg +
                   sc.elbow_sway_deg * std::sin(2 * kPi * sc.elbow_sway_hz * t + phase);
        return std::clamp(jit.posture * a, 0.0, 150.0);
    }
    double gonio_ch1(double t, Side side) const {
        double phase = side == Side::Left ? 0.0 : kPi / 4.0;
        return jit.posture * (sc.wrist_flex_bias_deg +
                              sc.wrist_flex_amp_deg *
                                  std::sin(2 * kPi * sc.wrist_flex_hz * t + phase));
    }
    double gonio_ch2(double t, Side side) const {
        double phase = side == Side::Left ? kPi / 6.0 : 0.0;
        return jit.posture * sc.wrist_dev_amp_deg *
               std::sin(2 * kPi * sc.wrist_dev_hz * t + phase);
    }

    Vec3 trunk_dir(double t) const {
        double a = trunk_angle(t) * kDegToRad;
        return {std::sin(a), 0.0, std::cos(a)};
    }
    Vec3 mid_hip() const { return {0.0, 0.0, 1.0}; }
    Vec3 mid_shoulder(double t) const { return mid_hip() + trunk_dir(t) * 0.50; }
    Vec3 shoulder(double t, Side side) const {
        double s = side == Side::Left ? 1.0 : -1.0;
        return mid_shoulder(t) + Vec3{0, s * 0.19, 0};
    }
    Vec3 hip(Side side) const {
        double s = side == Side::Left ? 1.0 : -1.0;
        return mid_hip() + Vec3{0, s * 0.14, 0};
    }
    Vec3 nose(double t) const {
        double a = (trunk_angle(t) + jit.posture * sc.neck_lean_deg) * kDegToRad;
        return mid_shoulder(t) + Vec3{std::sin(a), 0.0, std::cos(a)} * 0.26;
    }
    Vec3 arm_dir(double t, Side side) const {
        Vec3 down = -trunk_dir(t);
        return rot_y(down, -arm_angle(t, side));
    }
    Vec3 elbow(double t, Side side) const {
        return shoulder(t, side) + arm_dir(t, side) * 0.30;
    }
    Vec3 forearm_dir(double t, Side side) const {
        return rot_y(arm_dir(t, side), -elbow_angle(t, side));
    }
    Vec3 wrist(double t, Side side) const {
        return elbow(t, side) + forearm_dir(t, side) * 0.27;
    }
};

std::vector<double> time_grid(double duration, double rate) {
    long n = static_cast<long>(std::floor(duration * rate + 1e-9));
    std::vector<double> out(static_cast<size_t>(n) + 1);
    for (long k = 0; k <= n; ++k) out[static_cast<size_t>(k)] = k / rate;
    return out;
}

double primitive_wave(const ForcePrimitive& p, double t) {
    if (t < p.start_s || t > p.end_s) return 0.0;
    double rel = t - p.start_s;
    switch (p.type) {
        case PrimitiveType::Hold:
            return 1.0;
        case PrimitiveType::Pinch:
        case PrimitiveType::Press:
        case PrimitiveType::Palm:
            if (p.freq_hz <= 0.0) return 1.0;
            return std::max(0.0, std::sin(2 * kPi * p.freq_hz * rel));
        case PrimitiveType::Smooth:
            if (p.freq_hz <= 0.0) return 1.0;
            return 0.5 + 0.5 * std::sin(2 * kPi * p.freq_hz * rel);
    }
    return 0.0;
}

// Splits a finger's force over its three fingertip taxels with
// binary-exact weights so finger sums reproduce the requested amplitude.
void add_fingertip_force(GloveFrame& g, int finger, double amount) {
    int base = finger * 12 + 9;
    g.taxels[base + 0] += amount * 0.25;
    g.taxels[base + 1] += amount * 0.25;
    g.taxels[base + 2] += amount * 0.5;
}

void add_palm_force(GloveFrame& g, double amount) {
    static constexpr double w[5] = {0.25, 0.25, 0.25, 0.125, 0.125};
    for (int k = 0; k < 5; ++k) g.taxels[60 + k] += amount * w[k];
}

}  // namespace

ForcePrimitive ForcePrimitive::parse(const std::string& text) {
    auto parts = split(text, ':');
    if (parts.size() < 6 || parts.size() > 7)
        throw ParseError("sensor_streams",
                         "primitive '" + text +
                             "': expected type:finger:peak:freq:start:end[:side]");
    ForcePrimitive p;
    const std::string& type = parts[0];
    if (type == "hold") p.type = PrimitiveType::Hold;
    else if (type == "pinch") p.type = PrimitiveType::Pinch;
    else if (type == "smooth") p.type = PrimitiveType::Smooth;
    else if (type == "press") p.type = PrimitiveType::Press;
    else if (type == "palm") p.type = PrimitiveType::Palm;
    else throw ParseError("sensor_streams", "unknown primitive type: " + type);
    if (parts[1] == "all") {
        p.all_fingers = true;
    } else if (p.type != PrimitiveType::Palm) {
        p.finger = finger_from_name(parts[1]);
        if (p.finger == FingerId::Palm)
            throw ParseError("sensor_streams", "use the 'palm' primitive for palm loads");
    }
    try {
        p.peak_n = std::stod(parts[2]);
        p.freq_hz = std::stod(parts[3]);
        p.start_s = std::stod(parts[4]);
        p.end_s = std::stod(parts[5]);
    } catch (const std::exception&) {
        throw ParseError("sensor_streams", "primitive '" + text + "': bad number");
    }
    if (parts.size() == 7) {
        if (parts[6] == "left") p.side = Side::Left;
        else if (parts[6] == "right") p.side = Side::Right;
        else throw ParseError("sensor_streams", "primitive side must be left or right");
    }
    return p;
}

Scenario Scenario::from_config(const Config& cfg) {
    Scenario sc;
    sc.participant_id = cfg.get_string("trial.participant_id", sc.participant_id);
    sc.tool = cfg.get_string("trial.tool", sc.tool);
    sc.duration_s = cfg.get_double("trial.duration_s", sc.duration_s);
    sc.body_rate = cfg.get_double("rates.body", sc.body_rate);
    sc.hand_rate = cfg.get_double("rates.hand", sc.hand_rate);
    sc.gonio_rate = cfg.get_double("rates.gonio", sc.gonio_rate);
    sc.glove_rate = cfg.get_double("rates.glove", sc.glove_rate);
    sc.trunk_lean_deg = cfg.get_double("motion.trunk_lean_deg", sc.trunk_lean_deg);
    sc.trunk_sway_deg = cfg.get_double("motion.trunk_sway_deg", sc.trunk_sway_deg);
    sc.trunk_sway_hz = cfg.get_double("motion.trunk_sway_hz", sc.trunk_sway_hz);
    sc.neck_lean_deg = cfg.get_double("motion.neck_lean_deg", sc.neck_lean_deg);
    sc.arm_raise_deg = cfg.get_double("motion.arm_raise_deg", sc.arm_raise_deg);
    sc.arm_sway_deg = cfg.get_double("motion.arm_sway_deg", sc.arm_sway_deg);
    sc.arm_sway_hz = cfg.get_double("motion.arm_sway_hz", sc.arm_sway_hz);
    sc.elbow_flex_deg = cfg.get_double("motion.elbow_flex_deg", sc.elbow_flex_deg);
    sc.elbow_sway_deg = cfg.get_double("motion.elbow_sway_deg", sc.elbow_sway_deg);
    sc.elbow_sway_hz = cfg.get_double("motion.elbow_sway_hz", sc.elbow_sway_hz);
    sc.wrist_flex_bias_deg = cfg.get_double("motion.wrist_flex_bias_deg", sc.wrist_flex_bias_deg);
    sc.wrist_flex_amp_deg = cfg.get_double("motion.wrist_flex_amp_deg", sc.wrist_flex_amp_deg);
    sc.wrist_flex_hz = cfg.get_double("motion.wrist_flex_hz", sc.wrist_flex_hz);
    sc.wrist_dev_amp_deg = cfg.get_double("motion.wrist_dev_amp_deg", sc.wrist_dev_amp_deg);
    sc.wrist_dev_hz = cfg.get_double("motion.wrist_dev_hz", sc.wrist_dev_hz);
    sc.pose_noise_m = cfg.get_double("motion.pose_noise_m", sc.pose_noise_m);
    sc.force_noise_n = cfg.get_double("forces.force_noise_n", sc.force_noise_n);
    sc.amp_jitter_pct = cfg.get_double("trial.amp_jitter_pct", sc.amp_jitter_pct);
    for (const std::string& line : cfg.get_all("forces.primitive"))
        sc.primitives.push_back(ForcePrimitive::parse(line));
    sc.validate();
    return sc;
}

void Scenario::validate() const {
    if (!(duration_s > 0.0))
        throw PreconditionError("sensor_streams", "scenario duration must be positive");
    for (double r : {body_rate, hand_rate, gonio_rate, glove_rate})
        if (!(r > 0.0))
            throw PreconditionError("sensor_streams", "scenario rates must be positive");
    for (const ForcePrimitive& p : primitives) {
        if (p.peak_n < 0.0)
            throw PreconditionError("sensor_streams", "primitive peak must be >= 0");
        if (p.end_s <= p.start_s)
            throw PreconditionError("sensor_streams", "primitive end must follow start");
    }
    if (tool != "stringer" && tool != "convex_mold")
        throw PreconditionError("sensor_streams", "unknown tool: " + tool);
}

TrialBundle generate_trial(const Scenario& sc, uint64_t seed) {
    sc.validate();
    Rng root(seed ^ fnv1a64("ergo.synth"));
    AmpJitter jit;
    if (sc.amp_jitter_pct > 0.0) {
        Rng jr = root.fork(1);
        jit.posture = 1.0 + sc.amp_jitter_pct / 100.0 * jr.uniform(-1.0, 1.0);
        jit.force = 1.0 + sc.amp_jitter_pct / 100.0 * jr.uniform(-1.0, 1.0);
    }
    SkeletonModel model{sc, jit};

    TrialBundle bundle;
    bundle.participant_id = sc.participant_id;
    bundle.tool = sc.tool;

    // body pose
    {
        SensorStream s;
        s.kind = {Modality::BodyPose, std::nullopt};
        s.native_rate = sc.body_rate;
        s.t = time_grid(sc.duration_s, sc.body_rate);
        Rng noise = root.fork(2);
        for (double t : s.t) {
            BodyPoseFrame f;
            f.joints[joints::kNose] = model.nose(t);
            f.joints[joints::kLeftEye] = model.nose(t) + Vec3{0.02, 0.033, 0.02};
            f.joints[joints::kRightEye] = model.nose(t) + Vec3{0.02, -0.033, 0.02};
            for (Side side : {Side::Left, Side::Right}) {
                std::string sfx = side == Side::Left ? "left" : "right";
                f.joints[sfx + "_shoulder"] = model.shoulder(t, side);
                f.joints[sfx + "_elbow"] = model.elbow(t, side);
                f.joints[sfx + "_wrist"] = model.wrist(t, side);
                f.joints[sfx + "_hip"] = model.hip(side);
            }
            if (sc.pose_noise_m > 0.0)
                for (auto& [name, p] : f.joints)
                    p += Vec3{noise.normal(), noise.normal(), noise.normal()} * sc.pose_noise_m;
            f.derive_midpoints();
            s.body.push_back(std::move(f));
        }
        bundle.streams[s.kind] = std::move(s);
    }

    // hand pose
    for (Side side : {Side::Left, Side::Right}) {
        SensorStream s;
        s.kind = {Modality::HandPose, side};
        s.native_rate = sc.hand_rate;
        s.t = time_grid(sc.duration_s, sc.hand_rate);
        double mirror = side == Side::Left ? 1.0 : -1.0;
        for (double t : s.t) {
            HandPoseFrame f;
            f.side = side;
            f.wrist = model.wrist(t, side);
            Vec3 u = model.forearm_dir(t, side);
            Vec3 out{0.0, mirror, 0.0};
            Vec3 n = u.cross(out);
            if (n.norm() < 1e-9) n = Vec3{0, 0, -1};
            n = n.normalized();
            if (n.z > 0) n = -n;  // palm faces the work surface
            // wrist flexion tilts the palm about the lateral axis
            {
                double a = model.gonio_ch1(t, side) * kDegToRad;
                double c = std::cos(a), sn = std::sin(a);
                Vec3 axis = out;
                // Rodrigues rotation about `axis`
                n = n * c + axis.cross(n) * sn + axis * (axis.dot(n) * (1 - c));
                n = n.normalized();
            }
            Vec3 v1 = (u - n * u.dot(n)).normalized();
            Vec3 v2 = n.cross(v1);
            static constexpr double spread_deg[5] = {50, 20, 0, -20, -40};
            static constexpr double palm_len[5] = {0.04, 0.09, 0.095, 0.09, 0.08};
            static constexpr double seg_len[5] = {0.030, 0.025, 0.026, 0.024, 0.020};
            f.landmarks[0] = f.wrist;
            for (int finger = 0; finger < 5; ++finger) {
                double a = mirror * spread_deg[finger] * kDegToRad;
                Vec3 dir = v1 * std::cos(a) + v2 * std::sin(a);
                for (int j = 0; j < 4; ++j) {
                    double along = palm_len[finger] + seg_len[finger] * j;
                    // slight curl toward the contact surface
                    f.landmarks[finger_landmark(finger, j)] =
                        f.wrist + dir * along + n * (0.002 * j);
                }
            }
            f.palm_normal = n;
            s.hand.push_back(std::move(f));
        }
        bundle.streams[s.kind] = std::move(s);
    }

    // goniometer
    for (Side side : {Side::Left, Side::Right}) {
        SensorStream s;
        s.kind = {Modality::Gonio, side};
        s.native_rate = sc.gonio_rate;
        s.t = time_grid(sc.duration_s, sc.gonio_rate);
        for (double t : s.t) {
            GonioSample g;
            g.side = side;
            g.ch1 = std::clamp(model.gonio_ch1(t, side), -kGonioCh1Limit, kGonioCh1Limit);
            g.ch2 = std::clamp(model.gonio_ch2(t, side), -kGonioCh2Limit, kGonioCh2Limit);
            s.gonio.push_back(g);
        }
        bundle.streams[s.kind] = std::move(s);
    }

    // glove
    for (Side side : {Side::Left, Side::Right}) {
        SensorStream s;
        s.kind = {Modality::Glove, side};
        s.native_rate = sc.glove_rate;
        s.t = time_grid(sc.duration_s, sc.glove_rate);
        Rng noise = root.fork(side == Side::Left ? 3 : 4);
        for (double t : s.t) {
            GloveFrame g;
            g.side = side;
            for (const ForcePrimitive& p : sc.primitives) {
                if (p.side && *p.side != side) continue;
                double amount = jit.force * p.peak_n * primitive_wave(p, t);
                if (amount <= 0.0) continue;
                if (p.type == PrimitiveType::Palm) {
                    add_palm_force(g, amount);
                } else if (p.all_fingers) {
                    for (int finger = 0; finger < 5; ++finger)
                        add_fingertip_force(g, finger, amount / 5.0);
                } else {
                    add_fingertip_force(g, static_cast<int>(p.finger), amount);
                }
            }
            if (sc.force_noise_n > 0.0)
                for (double& f : g.taxels) f += sc.force_noise_n * noise.uniform();
            for (int i = 0; i < kTaxels; ++i)
                g.saturated[i] = g.taxels[i] >= kDefaultSaturationCeilingN;
            s.glove.push_back(std::move(g));
        }
        bundle.streams[s.kind] = std::move(s);
    }

    for (auto& [kind, stream] : bundle.streams) stream.check_consistent();
    return bundle;
}

}  // namespace ergo::synth
