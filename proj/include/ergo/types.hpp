#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ergo/vec3.hpp"

namespace ergo {

// Seconds since the shared recording epoch.
using Timestamp = double;

enum class Side { Left, Right };
enum class Modality { BodyPose, HandPose, Gonio, Glove };

inline const char* side_name(Side s) { return s == Side::Left ? "left" : "right"; }

// A stream is identified by modality plus side; body pose has no side.
struct StreamKind {
    Modality modality;
    std::optional<Side> side;

    bool operator==(const StreamKind&) const = default;
    bool operator<(const StreamKind& o) const {
        if (modality != o.modality) return modality < o.modality;
        return side < o.side;
    }
};

// Tag strings used in manifests and on the CLI: "body_pose",
// "hand_pose_left", "gonio_right", "glove_left", ...
std::string kind_tag(StreamKind kind);
StreamKind kind_from_tag(const std::string& tag);
std::vector<StreamKind> all_stream_kinds();

// --- Body pose ------------------------------------------------------------

namespace joints {
inline constexpr const char* kNose = "nose";
inline constexpr const char* kLeftEye = "left_eye";
inline constexpr const char* kRightEye = "right_eye";
inline constexpr const char* kLeftShoulder = "left_shoulder";
inline constexpr const char* kRightShoulder = "right_shoulder";
inline constexpr const char* kLeftElbow = "left_elbow";
inline constexpr const char* kRightElbow = "right_elbow";
inline constexpr const char* kLeftWrist = "left_wrist";
inline constexpr const char* kRightWrist = "right_wrist";
inline constexpr const char* kLeftHip = "left_hip";
inline constexpr const char* kRightHip = "right_hip";
inline constexpr const char* kMidShoulder = "mid_shoulder";
inline constexpr const char* kMidHip = "mid_hip";
}  // namespace joints

// Joints every scoring path depends on (derived mids included).
const std::vector<std::string>& required_joints();
// The fixed 17-keypoint superset plus the two derived midpoints; defines
// canonical column order for serialization.
const std::vector<std::string>& known_joints();

struct BodyPoseFrame {
    // absent key = joint missing in this frame
    std::map<std::string, Vec3> joints;

    bool has(const std::string& name) const { return joints.count(name) > 0; }
    const Vec3& at(const std::string& name) const;

    // Inserts mid_shoulder / mid_hip when both parents are present and the
    // midpoint is absent.
    void derive_midpoints();
};

// --- Hand pose --------------------------------------------------------------

inline constexpr int kHandLandmarks = 21;

// Landmark layout: 0 = wrist, then four joints per finger proximal to tip:
// thumb 1-4, index 5-8, middle 9-12, ring 13-16, little 17-20.
inline constexpr int finger_landmark(int finger, int joint) {
    return 1 + finger * 4 + joint;
}

struct HandPoseFrame {
    Side side = Side::Left;
    std::array<Vec3, kHandLandmarks> landmarks{};
    Vec3 palm_normal{0, 0, 1};
    Vec3 wrist{};
};

// --- Goniometer -------------------------------------------------------------

// ch1: flexion(+)/extension(-), ch2: radial/ulnar deviation, both degrees.
struct GonioSample {
    Side side = Side::Left;
    double ch1 = 0.0;
    double ch2 = 0.0;
};

inline constexpr double kGonioCh1Limit = 120.0;
inline constexpr double kGonioCh2Limit = 90.0;

// --- Tactile glove ----------------------------------------------------------

inline constexpr int kTaxels = 65;
inline constexpr double kDefaultSaturationCeilingN = 100.0;

struct GloveFrame {
    Side side = Side::Left;
    std::array<double, kTaxels> taxels{};
    std::array<bool, kTaxels> saturated{};
};

// --- Taxel placement --------------------------------------------------------

enum class FingerId { Thumb = 0, Index, Middle, Ring, Little, Palm };

const char* finger_name(FingerId f);
FingerId finger_from_name(const std::string& name);

struct TaxelSite {
    int landmark = 0;    // 0..20
    Vec3 offset{};       // hand-local frame, meters
    FingerId finger = FingerId::Palm;
};

// Maps each of the 65 taxels to a hand landmark. Default layout: 12 taxels
// per finger (3 at each of its 4 landmarks) and 5 palm taxels at the wrist
// and the four finger bases.
struct TaxelMap {
    std::array<TaxelSite, kTaxels> sites{};

    static TaxelMap default_map();
    static TaxelMap from_json_file(const std::string& path);
    void validate() const;
};

// --- Streams and bundles ----------------------------------------------------

struct SensorStream {
    StreamKind kind{Modality::BodyPose, std::nullopt};
    double native_rate = 0.0;  // Hz, estimated from timestamps at load
    std::vector<Timestamp> t;

    // exactly one of these is populated, matching kind.modality
    std::vector<BodyPoseFrame> body;
    std::vector<HandPoseFrame> hand;
    std::vector<GonioSample> gonio;
    std::vector<GloveFrame> glove;

    size_t size() const { return t.size(); }
    bool empty() const { return t.empty(); }
    // asserts timestamps strictly increasing and frame count == t count
    void check_consistent() const;
};

struct TrialBundle {
    std::string participant_id;
    std::string tool;  // "stringer" or "convex_mold"
    std::map<StreamKind, SensorStream> streams;

    const SensorStream& stream(StreamKind kind) const;
    bool has(StreamKind kind) const { return streams.count(kind) > 0; }
};

// One risk score per synced tick, per body side.
struct ScoreSeries {
    std::string kind;  // "rula" | "hal" | "bach"
    std::vector<double> left;
    std::vector<double> right;

    size_t size() const { return left.size(); }
};

}  // namespace ergo
