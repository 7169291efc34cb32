#include "ergo/streams.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>

#include "ergo/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ergo::streams {

namespace {

Vec3 vec3_from_json(const json& j, const std::string& what, int lineno) {
    if (!j.is_array() || j.size() != 3)
        throw ParseError("sensor_streams",
                         "line " + std::to_string(lineno) + ": " + what +
                             " must be a 3-element array");
    Vec3 v{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
    if (!v.finite())
        throw ValidationError("sensor_streams",
                              "line " + std::to_string(lineno) + ": " + what +
                                  " has non-finite coordinates");
    return v;
}

json vec3_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

const json& field(const json& obj, const char* name, StreamKind kind, int lineno) {
    auto it = obj.find(name);
    if (it == obj.end())
        throw ParseError("sensor_streams",
                         "line " + std::to_string(lineno) + ": modality mismatch for " +
                             kind_tag(kind) + ": missing field '" + name + "'");
    return *it;
}

double median_dt(const std::vector<double>& t) {
    if (t.size() < 2) return 0.0;
    std::vector<double> dts(t.size() - 1);
    for (size_t i = 0; i + 1 < t.size(); ++i) dts[i] = t[i + 1] - t[i];
    size_t mid = dts.size() / 2;
    std::nth_element(dts.begin(), dts.begin() + mid, dts.end());
    return dts[mid];
}

}  // namespace

SensorStream parse_stream(const std::string& text, StreamKind kind,
                          const LoadOptions& opts) {
    SensorStream stream;
    stream.kind = kind;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::exception& e) {
            throw ParseError("sensor_streams",
                             "line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!obj.is_object())
            throw ParseError("sensor_streams",
                             "line " + std::to_string(lineno) + ": expected an object");
        double ts;
        try {
            ts = field(obj, "t", kind, lineno).get<double>();
        } catch (const json::exception&) {
            throw ParseError("sensor_streams",
                             "line " + std::to_string(lineno) + ": field 't' must be a number");
        }
        if (!std::isfinite(ts))
            throw ValidationError("sensor_streams",
                                  "line " + std::to_string(lineno) + ": non-finite timestamp");
        if (!stream.t.empty() && !(ts > stream.t.back()))
            throw ValidationError("sensor_streams",
                                  "line " + std::to_string(lineno) +
                                      ": timestamps must be strictly increasing");
        try {
            switch (kind.modality) {
                case Modality::BodyPose: {
                    const json& js = field(obj, "joints", kind, lineno);
                    if (!js.is_object())
                        throw ParseError("sensor_streams",
                                         "line " + std::to_string(lineno) +
                                             ": 'joints' must be an object");
                    BodyPoseFrame frame;
                    for (auto it = js.begin(); it != js.end(); ++it)
                        frame.joints[it.key()] =
                            vec3_from_json(it.value(), "joint " + it.key(), lineno);
                    frame.derive_midpoints();
                    stream.body.push_back(std::move(frame));
                    break;
                }
                case Modality::HandPose: {
                    const json& lms = field(obj, "landmarks", kind, lineno);
                    if (!lms.is_array() || lms.size() != kHandLandmarks)
                        throw ValidationError("sensor_streams",
                                              "line " + std::to_string(lineno) +
                                                  ": expected exactly 21 landmarks");
                    HandPoseFrame frame;
                    frame.side = *kind.side;
                    for (int i = 0; i < kHandLandmarks; ++i)
                        frame.landmarks[i] =
                            vec3_from_json(lms[i], "landmark " + std::to_string(i), lineno);
                    frame.palm_normal =
                        vec3_from_json(field(obj, "palm_normal", kind, lineno),
                                       "palm_normal", lineno);
                    if (std::fabs(frame.palm_normal.norm() - 1.0) > 1e-6)
                        throw ValidationError("sensor_streams",
                                              "line " + std::to_string(lineno) +
                                                  ": palm_normal is not a unit vector");
                    frame.wrist =
                        vec3_from_json(field(obj, "wrist", kind, lineno), "wrist", lineno);
                    stream.hand.push_back(std::move(frame));
                    break;
                }
                case Modality::Gonio: {
                    GonioSample s;
                    s.side = *kind.side;
                    s.ch1 = field(obj, "ch1", kind, lineno).get<double>();
                    s.ch2 = field(obj, "ch2", kind, lineno).get<double>();
                    if (!std::isfinite(s.ch1) || !std::isfinite(s.ch2))
                        throw ValidationError("sensor_streams",
                                              "line " + std::to_string(lineno) +
                                                  ": non-finite goniometer angle");
                    // validation clamping to anatomical range
                    s.ch1 = std::clamp(s.ch1, -kGonioCh1Limit, kGonioCh1Limit);
                    s.ch2 = std::clamp(s.ch2, -kGonioCh2Limit, kGonioCh2Limit);
                    stream.gonio.push_back(s);
                    break;
                }
                case Modality::Glove: {
                    const json& tx = field(obj, "taxels", kind, lineno);
                    if (!tx.is_array() || tx.size() != kTaxels)
                        throw ValidationError("sensor_streams",
                                              "line " + std::to_string(lineno) +
                                                  ": expected exactly 65 taxel forces");
                    GloveFrame frame;
                    frame.side = *kind.side;
                    for (int i = 0; i < kTaxels; ++i) {
                        double f = tx[i].get<double>();
                        if (!std::isfinite(f))
                            throw ValidationError("sensor_streams",
                                                  "line " + std::to_string(lineno) +
                                                      ": non-finite taxel force");
                        if (f < 0.0)
                            throw ValidationError("sensor_streams",
                                                  "line " + std::to_string(lineno) +
                                                      ": negative taxel force");
                        frame.taxels[i] = f;
                        frame.saturated[i] = f >= opts.saturation_ceiling_n;
                    }
                    stream.glove.push_back(frame);
                    break;
                }
            }
        } catch (const json::exception& e) {
            throw ParseError("sensor_streams",
                             "line " + std::to_string(lineno) + ": " + e.what());
        }
        stream.t.push_back(ts);
    }
    // body pose: the joint set must be constant across frames (a joint a
    // sensor never tracked is simply absent everywhere)
    if (kind.modality == Modality::BodyPose && stream.body.size() > 1) {
        const auto& first = stream.body.front().joints;
        for (size_t i = 1; i < stream.body.size(); ++i) {
            const auto& cur = stream.body[i].joints;
            if (cur.size() != first.size() ||
                !std::equal(cur.begin(), cur.end(), first.begin(),
                            [](const auto& a, const auto& b) { return a.first == b.first; }))
                throw ValidationError("sensor_streams",
                                      "body pose joint set changes at sample " +
                                          std::to_string(i));
        }
    }
    stream.native_rate = stream.t.size() >= 2 ? 1.0 / median_dt(stream.t) : 0.0;
    stream.check_consistent();
    return stream;
}

SensorStream load_stream(const std::string& path, StreamKind kind,
                         const LoadOptions& opts) {
    return parse_stream(read_text_file(path), kind, opts);
}

std::string serialize_stream(const SensorStream& stream) {
    std::string out;
    for (size_t i = 0; i < stream.size(); ++i) {
        json obj;
        obj["t"] = stream.t[i];
        switch (stream.kind.modality) {
            case Modality::BodyPose: {
                json js = json::object();
                for (const auto& [name, pos] : stream.body[i].joints)
                    js[name] = vec3_to_json(pos);
                obj["joints"] = std::move(js);
                break;
            }
            case Modality::HandPose: {
                json lms = json::array();
                for (const Vec3& lm : stream.hand[i].landmarks)
                    lms.push_back(vec3_to_json(lm));
                obj["landmarks"] = std::move(lms);
                obj["palm_normal"] = vec3_to_json(stream.hand[i].palm_normal);
                obj["wrist"] = vec3_to_json(stream.hand[i].wrist);
                break;
            }
            case Modality::Gonio:
                obj["ch1"] = stream.gonio[i].ch1;
                obj["ch2"] = stream.gonio[i].ch2;
                break;
            case Modality::Glove: {
                json tx = json::array();
                for (double f : stream.glove[i].taxels) tx.push_back(f);
                obj["taxels"] = std::move(tx);
                break;
            }
        }
        out += obj.dump();
        out += '\n';
    }
    return out;
}

void save_stream(const SensorStream& stream, const std::string& path) {
    write_text_file(path, serialize_stream(stream));
}

TrialBundle load_bundle(const std::string& manifest_path, const LoadOptions& opts) {
    json doc;
    try {
        doc = json::parse(read_text_file(manifest_path));
    } catch (const json::exception& e) {
        throw ParseError("sensor_streams", std::string("bundle manifest: ") + e.what());
    }
    TrialBundle bundle;
    try {
        bundle.participant_id = doc.at("participant_id").get<std::string>();
        bundle.tool = doc.at("tool").get<std::string>();
    } catch (const json::exception& e) {
        throw ParseError("sensor_streams", std::string("bundle manifest: ") + e.what());
    }
    if (bundle.tool != "stringer" && bundle.tool != "convex_mold")
        throw ValidationError("sensor_streams", "unknown tool: " + bundle.tool);
    if (!doc.contains("streams") || !doc["streams"].is_object())
        throw ParseError("sensor_streams", "bundle manifest: missing 'streams' object");
    fs::path base = fs::path(manifest_path).parent_path();
    for (auto it = doc["streams"].begin(); it != doc["streams"].end(); ++it) {
        StreamKind kind = kind_from_tag(it.key());
        fs::path p = it.value().get<std::string>();
        if (p.is_relative()) p = base / p;
        if (bundle.streams.count(kind))
            throw ValidationError("sensor_streams", "duplicate stream: " + it.key());
        bundle.streams[kind] = load_stream(p.string(), kind, opts);
    }
    return bundle;
}

std::string save_bundle(const TrialBundle& bundle, const std::string& dir,
                        const std::string& manifest_name, const Producer& producer) {
    fs::create_directories(dir);
    json streams_obj = json::object();
    std::string prefix = bundle.participant_id + "_" + bundle.tool + "_";
    for (const auto& [kind, stream] : bundle.streams) {
        std::string fname = prefix + kind_tag(kind) + ".jsonl";
        save_stream(stream, (fs::path(dir) / fname).string());
        streams_obj[kind_tag(kind)] = fname;
    }
    json doc;
    doc["schema"] = "ergo.bundle.v1";
    doc["participant_id"] = bundle.participant_id;
    doc["tool"] = bundle.tool;
    doc["producer"] = {{"subcommand", producer.subcommand},
                       {"config_hash", producer.config_hash},
                       {"seed", producer.seed}};
    doc["streams"] = std::move(streams_obj);
    std::string manifest_path = (fs::path(dir) / manifest_name).string();
    write_text_file(manifest_path, doc.dump(2) + "\n");
    return manifest_path;
}

bool ValidationReport::fatal() const {
    return std::any_of(issues.begin(), issues.end(),
                       [](const StreamIssue& i) { return i.fatal; });
}

}  // namespace ergo::streams

namespace ergo {

// Override file: {"taxels": [{"landmark": 0..20, "offset": [x,y,z],
// "finger": "thumb|index|middle|ring|little|palm"} x65]}
TaxelMap TaxelMap::from_json_file(const std::string& path) {
    json doc;
    try {
        doc = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw ParseError("sensor_streams", std::string("taxel map: ") + e.what());
    }
    if (!doc.contains("taxels") || !doc["taxels"].is_array() ||
        doc["taxels"].size() != kTaxels)
        throw ValidationError("sensor_streams", "taxel map must list exactly 65 taxels");
    TaxelMap map;
    for (int i = 0; i < kTaxels; ++i) {
        const json& e = doc["taxels"][i];
        try {
            map.sites[i].landmark = e.at("landmark").get<int>();
            const json& off = e.at("offset");
            map.sites[i].offset =
                Vec3{off.at(0).get<double>(), off.at(1).get<double>(), off.at(2).get<double>()};
            map.sites[i].finger = finger_from_name(e.at("finger").get<std::string>());
        } catch (const json::exception& ex) {
            throw ParseError("sensor_streams",
                             "taxel map entry " + std::to_string(i) + ": " + ex.what());
        }
    }
    map.validate();
    return map;
}

}  // namespace ergo

namespace ergo::streams {

json ValidationReport::to_json() const {
    json arr = json::array();
    for (const StreamIssue& i : issues) {
        json obj;
        switch (i.kind) {
            case StreamIssue::Kind::MissingStream: obj["kind"] = "missing_stream"; break;
            case StreamIssue::Kind::EmptyStream: obj["kind"] = "empty_stream"; break;
            case StreamIssue::Kind::Gap: obj["kind"] = "gap"; break;
            case StreamIssue::Kind::Saturation: obj["kind"] = "saturation"; break;
        }
        obj["stream"] = i.stream;
        obj["fatal"] = i.fatal;
        obj["detail"] = i.detail;
        if (i.kind == StreamIssue::Kind::Gap) {
            obj["at_t"] = i.at_t;
            obj["duration_s"] = i.duration;
        }
        if (i.kind == StreamIssue::Kind::Saturation) obj["fraction"] = i.fraction;
        arr.push_back(std::move(obj));
    }
    json doc;
    doc["issues"] = std::move(arr);
    doc["saturation_fraction"] = saturation_fraction;
    doc["fatal"] = fatal();
    return doc;
}

ValidationReport validate_bundle(const TrialBundle& bundle) {
    ValidationReport report;
    for (StreamKind kind : all_stream_kinds()) {
        std::string tag = kind_tag(kind);
        auto it = bundle.streams.find(kind);
        if (it == bundle.streams.end()) {
            report.issues.push_back({StreamIssue::Kind::MissingStream, tag, 0, 0, 0, true,
                                     tag + " absent"});
            continue;
        }
        const SensorStream& s = it->second;
        if (s.empty()) {
            report.issues.push_back(
                {StreamIssue::Kind::EmptyStream, tag, 0, 0, 0, true, tag + " has no samples"});
            continue;
        }
        if (s.size() >= 2) {
            double med = median_dt(s.t);
            double gap_threshold = kGapFactor * med;
            for (size_t i = 0; i + 1 < s.size(); ++i) {
                double dt = s.t[i + 1] - s.t[i];
                if (dt > gap_threshold) {
                    bool fatal = dt > kBridgeableGapS;
                    report.issues.push_back(
                        {StreamIssue::Kind::Gap, tag, s.t[i], dt, 0, fatal,
                         fatal ? "gap exceeds bridgeable limit" : "gap bridged by hold-last-value"});
                }
            }
        }
        if (kind.modality == Modality::Glove) {
            size_t saturated = 0;
            for (const GloveFrame& g : s.glove)
                saturated += std::count(g.saturated.begin(), g.saturated.end(), true);
            double fraction =
                static_cast<double>(saturated) / (static_cast<double>(s.size()) * kTaxels);
            report.saturation_fraction[tag] = fraction;
            if (fraction > 0.0)
                report.issues.push_back({StreamIssue::Kind::Saturation, tag, 0, 0, fraction,
                                         false, "taxels at configured ceiling"});
        }
    }
    return report;
}

}  // namespace ergo::streams
