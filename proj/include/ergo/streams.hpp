#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ergo/io_util.hpp"
#include "ergo/types.hpp"

namespace ergo::streams {

struct LoadOptions {
    // Taxels at or above this force are flagged saturated.
    double saturation_ceiling_n = kDefaultSaturationCeilingN;
};

// JSONL: one sample object per line, field "t" plus modality payload.
//   body:  {"joints": {"nose": [x,y,z], ...}, "t": 0.0}
//   hand:  {"landmarks": [[x,y,z] x21], "palm_normal": [x,y,z], "t": 0.0, "wrist": [x,y,z]}
//   gonio: {"ch1": deg, "ch2": deg, "t": 0.0}
//   glove: {"t": 0.0, "taxels": [65 newtons]}
SensorStream parse_stream(const std::string& text, StreamKind kind,
                          const LoadOptions& opts = {});
SensorStream load_stream(const std::string& path, StreamKind kind,
                         const LoadOptions& opts = {});
std::string serialize_stream(const SensorStream& stream);
void save_stream(const SensorStream& stream, const std::string& path);

// Bundle manifest: single JSON document naming the trial and one stream
// file per modality per side, paths relative to the manifest location.
TrialBundle load_bundle(const std::string& manifest_path, const LoadOptions& opts = {});
// Writes all stream files plus <dir>/<manifest_name>; returns manifest path.
std::string save_bundle(const TrialBundle& bundle, const std::string& dir,
                        const std::string& manifest_name, const Producer& producer);

// --- Validation -------------------------------------------------------------

// Gaps no longer than this are bridged (hold-last-value) when resampling;
// anything longer is fatal for synchronization.
inline constexpr double kBridgeableGapS = 0.5;
// A timestamp step counts as a gap when it exceeds this multiple of the
// stream's median sample period.
inline constexpr double kGapFactor = 2.0;

struct StreamIssue {
    enum class Kind { MissingStream, EmptyStream, Gap, Saturation };
    Kind kind;
    std::string stream;     // kind tag
    double at_t = 0.0;      // gap start (Gap only)
    double duration = 0.0;  // gap length in seconds (Gap only)
    double fraction = 0.0;  // saturated taxel fraction (Saturation only)
    bool fatal = false;
    std::string detail;
};

struct ValidationReport {
    std::vector<StreamIssue> issues;
    // fraction of (frame, taxel) readings at the ceiling, per glove stream
    std::map<std::string, double> saturation_fraction;

    bool fatal() const;
    nlohmann::json to_json() const;
};

ValidationReport validate_bundle(const TrialBundle& bundle);

}  // namespace ergo::streams
