#include "ergo/types.hpp"

#include "ergo/error.hpp"

namespace ergo {

std::string kind_tag(StreamKind kind) {
    std::string base;
    switch (kind.modality) {
        case Modality::BodyPose: return "body_pose";
        case Modality::HandPose: base = "hand_pose"; break;
        case Modality::Gonio: base = "gonio"; break;
        case Modality::Glove: base = "glove"; break;
    }
    if (!kind.side) throw ValidationError("sensor_streams", base + " stream needs a side");
    return base + "_" + side_name(*kind.side);
}

StreamKind kind_from_tag(const std::string& tag) {
    for (StreamKind k : all_stream_kinds())
        if (kind_tag(k) == tag) return k;
    throw ValidationError("sensor_streams", "unknown stream kind: " + tag);
}

std::vector<StreamKind> all_stream_kinds() {
    std::vector<StreamKind> kinds;
    kinds.push_back({Modality::BodyPose, std::nullopt});
    for (Side s : {Side::Left, Side::Right}) {
        kinds.push_back({Modality::HandPose, s});
        kinds.push_back({Modality::Gonio, s});
        kinds.push_back({Modality::Glove, s});
    }
    return kinds;
}

const std::vector<std::string>& required_joints() {
    static const std::vector<std::string> names = {
        joints::kNose,      joints::kLeftEye,   joints::kRightEye,
        joints::kLeftShoulder, joints::kRightShoulder,
        joints::kLeftElbow, joints::kRightElbow,
        joints::kLeftWrist, joints::kRightWrist,
        joints::kLeftHip,   joints::kRightHip,
        joints::kMidShoulder, joints::kMidHip,
    };
    return names;
}

const std::vector<std::string>& known_joints() {
    static const std::vector<std::string> names = {
        joints::kNose,
        joints::kLeftEye, joints::kRightEye,
        "left_ear", "right_ear",
        joints::kLeftShoulder, joints::kRightShoulder,
        joints::kLeftElbow, joints::kRightElbow,
        joints::kLeftWrist, joints::kRightWrist,
        joints::kLeftHip, joints::kRightHip,
        "left_knee", "right_knee",
        "left_ankle", "right_ankle",
        joints::kMidShoulder, joints::kMidHip,
    };
    return names;
}

const Vec3& BodyPoseFrame::at(const std::string& name) const {
    auto it = joints.find(name);
    if (it == joints.end())
        throw PreconditionError("sensor_streams", "missing joint: " + name);
    return it->second;
}

void BodyPoseFrame::derive_midpoints() {
    if (!has(joints::kMidShoulder) && has(joints::kLeftShoulder) &&
        has(joints::kRightShoulder))
        joints[joints::kMidShoulder] =
            midpoint(at(joints::kLeftShoulder), at(joints::kRightShoulder));
    if (!has(joints::kMidHip) && has(joints::kLeftHip) && has(joints::kRightHip))
        joints[joints::kMidHip] = midpoint(at(joints::kLeftHip), at(joints::kRightHip));
}

const char* finger_name(FingerId f) {
    switch (f) {
        case FingerId::Thumb: return "thumb";
        case FingerId::Index: return "index";
        case FingerId::Middle: return "middle";
        case FingerId::Ring: return "ring";
        case FingerId::Little: return "little";
        case FingerId::Palm: return "palm";
    }
    return "?";
}

FingerId finger_from_name(const std::string& name) {
    for (int i = 0; i <= 5; ++i) {
        FingerId f = static_cast<FingerId>(i);
        if (name == finger_name(f)) return f;
    }
    throw ValidationError("sensor_streams", "unknown finger: " + name);
}

TaxelMap TaxelMap::default_map() {
    TaxelMap map;
    int idx = 0;
    for (int finger = 0; finger < 5; ++finger) {
        for (int joint = 0; joint < 4; ++joint) {
            for (int k = 0; k < 3; ++k) {
                map.sites[idx].landmark = finger_landmark(finger, joint);
                map.sites[idx].offset = Vec3{};
                map.sites[idx].finger = static_cast<FingerId>(finger);
                ++idx;
            }
        }
    }
    // palm taxels: wrist plus the proximal landmark of each non-thumb finger
    const int palm_landmarks[5] = {0, finger_landmark(1, 0), finger_landmark(2, 0),
                                   finger_landmark(3, 0), finger_landmark(4, 0)};
    for (int k = 0; k < 5; ++k) {
        map.sites[idx].landmark = palm_landmarks[k];
        map.sites[idx].offset = Vec3{};
        map.sites[idx].finger = FingerId::Palm;
        ++idx;
    }
    map.validate();
    return map;
}

void TaxelMap::validate() const {
    for (int i = 0; i < kTaxels; ++i) {
        const TaxelSite& s = sites[i];
        if (s.landmark < 0 || s.landmark >= kHandLandmarks)
            throw ValidationError("sensor_streams",
                                  "taxel " + std::to_string(i) + ": landmark out of range");
        if (!s.offset.finite())
            throw ValidationError("sensor_streams",
                                  "taxel " + std::to_string(i) + ": non-finite offset");
    }
}

void SensorStream::check_consistent() const {
    size_t n = t.size();
    size_t frames = 0;
    switch (kind.modality) {
        case Modality::BodyPose: frames = body.size(); break;
        case Modality::HandPose: frames = hand.size(); break;
        case Modality::Gonio: frames = gonio.size(); break;
        case Modality::Glove: frames = glove.size(); break;
    }
    if (frames != n)
        throw ValidationError("sensor_streams", kind_tag(kind) + ": frame/timestamp count mismatch");
    for (size_t i = 0; i + 1 < n; ++i)
        if (!(t[i] < t[i + 1]))
            throw ValidationError("sensor_streams",
                                  kind_tag(kind) + ": timestamps not strictly increasing at index " +
                                      std::to_string(i + 1));
    for (double ts : t)
        if (!std::isfinite(ts))
            throw ValidationError("sensor_streams", kind_tag(kind) + ": non-finite timestamp");
}

const SensorStream& TrialBundle::stream(StreamKind kind) const {
    auto it = streams.find(kind);
    if (it == streams.end())
        throw PreconditionError("sensor_streams", "bundle missing stream: " + kind_tag(kind));
    return it->second;
}

}  // namespace ergo
