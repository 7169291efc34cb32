#include "ergo/sync.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "ergo/error.hpp"
#include "ergo/streams.hpp"

using nlohmann::json;

namespace ergo::sync {

namespace {

// --- generic channel view over the four frame types -------------------------

std::vector<std::string> body_joint_order(const SensorStream& s) {
    std::vector<std::string> names;
    if (!s.body.empty())
        for (const auto& [name, pos] : s.body.front().joints) names.push_back(name);
    return names;  // std::map iteration: already sorted
}

size_t channel_count(const SensorStream& s) {
    switch (s.kind.modality) {
        case Modality::BodyPose: return body_joint_order(s).size() * 3;
        case Modality::HandPose: return kHandLandmarks * 3 + 6;
        case Modality::Gonio: return 2;
        case Modality::Glove: return kTaxels;
    }
    return 0;
}

void read_channels(const SensorStream& s, const std::vector<std::string>& joint_order,
                   size_t i, double* out) {
    switch (s.kind.modality) {
        case Modality::BodyPose: {
            const BodyPoseFrame& f = s.body[i];
            for (const std::string& name : joint_order) {
                const Vec3& p = f.at(name);
                *out++ = p.x;
                *out++ = p.y;
                *out++ = p.z;
            }
            break;
        }
        case Modality::HandPose: {
            const HandPoseFrame& f = s.hand[i];
            for (const Vec3& lm : f.landmarks) {
                *out++ = lm.x;
                *out++ = lm.y;
                *out++ = lm.z;
            }
            *out++ = f.palm_normal.x;
            *out++ = f.palm_normal.y;
            *out++ = f.palm_normal.z;
            *out++ = f.wrist.x;
            *out++ = f.wrist.y;
            *out++ = f.wrist.z;
            break;
        }
        case Modality::Gonio:
            *out++ = s.gonio[i].ch1;
            *out++ = s.gonio[i].ch2;
            break;
        case Modality::Glove:
            for (double f : s.glove[i].taxels) *out++ = f;
            break;
    }
}

void append_frame(SensorStream& s, const std::vector<std::string>& joint_order,
                  const double* in, double saturation_ceiling) {
    switch (s.kind.modality) {
        case Modality::BodyPose: {
            BodyPoseFrame f;
            for (const std::string& name : joint_order) {
                Vec3 p{in[0], in[1], in[2]};
                in += 3;
                f.joints[name] = p;
            }
            s.body.push_back(std::move(f));
            break;
        }
        case Modality::HandPose: {
            HandPoseFrame f;
            f.side = *s.kind.side;
            for (int k = 0; k < kHandLandmarks; ++k) {
                f.landmarks[k] = Vec3{in[0], in[1], in[2]};
                in += 3;
            }
            f.palm_normal = Vec3{in[0], in[1], in[2]}.normalized("sync_engine");
            in += 3;
            f.wrist = Vec3{in[0], in[1], in[2]};
            s.hand.push_back(std::move(f));
            break;
        }
        case Modality::Gonio: {
            GonioSample g;
            g.side = *s.kind.side;
            g.ch1 = in[0];
            g.ch2 = in[1];
            s.gonio.push_back(g);
            break;
        }
        case Modality::Glove: {
            GloveFrame g;
            g.side = *s.kind.side;
            for (int k = 0; k < kTaxels; ++k) {
                g.taxels[k] = std::max(0.0, in[k]);
                g.saturated[k] = g.taxels[k] >= saturation_ceiling;
            }
            s.glove.push_back(std::move(g));
            break;
        }
    }
}

double median_step(const std::vector<double>& t) {
    std::vector<double> dts(t.size() - 1);
    for (size_t i = 0; i + 1 < t.size(); ++i) dts[i] = t[i + 1] - t[i];
    size_t mid = dts.size() / 2;
    std::nth_element(dts.begin(), dts.begin() + mid, dts.end());
    return dts[mid];
}

}  // namespace

TimeWindow common_window(const TrialBundle& bundle) {
    if (bundle.streams.empty())
        throw PreconditionError("sync_engine", "bundle has no streams");
    TimeWindow w{-1e300, 1e300};
    for (const auto& [kind, s] : bundle.streams) {
        if (s.empty())
            throw PreconditionError("sync_engine", kind_tag(kind) + " is empty");
        w.start = std::max(w.start, s.t.front());
        w.end = std::min(w.end, s.t.back());
    }
    if (!(w.end > w.start))
        throw PreconditionError("sync_engine",
                                "streams have no common time window (empty intersection)");
    return w;
}

size_t tick_count(TimeWindow w) {
    return static_cast<size_t>(std::floor((w.end - w.start + kBoundaryEps) * kRate)) + 1;
}

SensorStream resample(const SensorStream& stream, TimeWindow window,
                      const SyncOptions& opts) {
    stream.check_consistent();
    if (stream.size() < 2)
        throw PreconditionError("sync_engine",
                                kind_tag(stream.kind) + ": need at least 2 samples to resample");
    if (stream.t.front() > window.start + kBoundaryEps ||
        stream.t.back() < window.end - kBoundaryEps)
        throw PreconditionError("sync_engine",
                                kind_tag(stream.kind) + " does not cover the requested window");

    std::vector<std::string> joint_order = body_joint_order(stream);
    size_t channels = channel_count(stream);
    size_t n_out = tick_count(window);

    double gap_threshold = streams::kGapFactor * median_step(stream.t);

    SensorStream out;
    out.kind = stream.kind;
    out.native_rate = kRate;
    out.t.reserve(n_out);

    std::vector<double> lo(channels), hi(channels), cur(channels);
    size_t seg = 0;  // current segment [t[seg], t[seg+1])
    bool seg_loaded = false;

    for (size_t k = 0; k < n_out; ++k) {
        double tk = window.start + static_cast<double>(k) / kRate;
        // advance to the segment containing tk
        while (seg + 2 < stream.size() && stream.t[seg + 1] <= tk) {
            ++seg;
            seg_loaded = false;
        }
        if (!seg_loaded) {
            read_channels(stream, joint_order, seg, lo.data());
            read_channels(stream, joint_order, seg + 1, hi.data());
            seg_loaded = true;
        }
        double t0 = stream.t[seg], t1 = stream.t[seg + 1];
        double dt = t1 - t0;
        if (tk >= t1) {
            // only possible at the stream tail (boundary tolerance)
            std::copy(hi.begin(), hi.end(), cur.begin());
        } else if (tk <= t0) {
            std::copy(lo.begin(), lo.end(), cur.begin());
        } else if (dt > gap_threshold) {
            if (dt > streams::kBridgeableGapS)
                throw PreconditionError(
                    "sync_engine", kind_tag(stream.kind) + ": unbridgeable " +
                                       format_double(dt) + " s gap at t=" + format_double(t0));
            std::copy(lo.begin(), lo.end(), cur.begin());  // hold last value
        } else {
            double a = (tk - t0) / dt;
            for (size_t c = 0; c < channels; ++c) cur[c] = lo[c] + (hi[c] - lo[c]) * a;
        }
        out.t.push_back(tk);
        append_frame(out, joint_order, cur.data(), opts.saturation_ceiling_n);
    }
    out.check_consistent();
    return out;
}

SyncedTrial synchronize(const TrialBundle& bundle, const SyncOptions& opts) {
    streams::ValidationReport report = streams::validate_bundle(bundle);
    if (report.fatal()) {
        for (const auto& issue : report.issues)
            if (issue.fatal)
                throw ValidationError("sync_engine",
                                      "bundle fails validation: " + issue.stream + ": " +
                                          issue.detail);
    }
    TimeWindow window = common_window(bundle);

    SyncedTrial trial;
    trial.participant_id = bundle.participant_id;
    trial.tool = bundle.tool;
    size_t n = tick_count(window);
    trial.t.resize(n);
    for (size_t k = 0; k < n; ++k)
        trial.t[k] = window.start + static_cast<double>(k) / kRate;

    auto take = [&](StreamKind kind) {
        return resample(bundle.stream(kind), window, opts);
    };
    trial.body = take({Modality::BodyPose, std::nullopt}).body;
    trial.hand_left = take({Modality::HandPose, Side::Left}).hand;
    trial.hand_right = take({Modality::HandPose, Side::Right}).hand;
    trial.gonio_left = take({Modality::Gonio, Side::Left}).gonio;
    trial.gonio_right = take({Modality::Gonio, Side::Right}).gonio;
    trial.glove_left = take({Modality::Glove, Side::Left}).glove;
    trial.glove_right = take({Modality::Glove, Side::Right}).glove;

    for (size_t len : {trial.body.size(), trial.hand_left.size(), trial.hand_right.size(),
                       trial.gonio_left.size(), trial.gonio_right.size(),
                       trial.glove_left.size(), trial.glove_right.size()})
        if (len != n)
            throw Error("sync_engine", "internal: modality frame count mismatch");
    return trial;
}

TrialBundle to_bundle(const SyncedTrial& trial) {
    TrialBundle bundle;
    bundle.participant_id = trial.participant_id;
    bundle.tool = trial.tool;
    auto put = [&](StreamKind kind) -> SensorStream& {
        SensorStream s;
        s.kind = kind;
        s.native_rate = trial.rate;
        s.t = trial.t;
        auto [it, ok] = bundle.streams.emplace(kind, std::move(s));
        return it->second;
    };
    put({Modality::BodyPose, std::nullopt}).body = trial.body;
    put({Modality::HandPose, Side::Left}).hand = trial.hand_left;
    put({Modality::HandPose, Side::Right}).hand = trial.hand_right;
    put({Modality::Gonio, Side::Left}).gonio = trial.gonio_left;
    put({Modality::Gonio, Side::Right}).gonio = trial.gonio_right;
    put({Modality::Glove, Side::Left}).glove = trial.glove_left;
    put({Modality::Glove, Side::Right}).glove = trial.glove_right;
    return bundle;
}

// --- CSV persistence ---------------------------------------------------------

namespace {

std::vector<std::string> column_names(const std::vector<std::string>& body_joints) {
    std::vector<std::string> cols;
    cols.push_back("t");
    for (const std::string& j : body_joints)
        for (const char* ax : {".x", ".y", ".z"}) cols.push_back("body." + j + ax);
    for (const char* hand : {"hand_left", "hand_right"}) {
        for (int k = 0; k < kHandLandmarks; ++k) {
            char buf[16];
            std::snprintf(buf, sizeof(buf), ".lm%02d", k);
            for (const char* ax : {".x", ".y", ".z"})
                cols.push_back(std::string(hand) + buf + ax);
        }
        for (const char* ax : {".x", ".y", ".z"})
            cols.push_back(std::string(hand) + ".palm_normal" + ax);
        for (const char* ax : {".x", ".y", ".z"})
            cols.push_back(std::string(hand) + ".wrist" + ax);
    }
    for (const char* g : {"gonio_left", "gonio_right"}) {
        cols.push_back(std::string(g) + ".ch1");
        cols.push_back(std::string(g) + ".ch2");
    }
    for (const char* g : {"glove_left", "glove_right"})
        for (int k = 0; k < kTaxels; ++k) {
            char buf[8];
            std::snprintf(buf, sizeof(buf), ".t%02d", k);
            cols.push_back(std::string(g) + buf);
        }
    return cols;
}

}  // namespace

void write_csv(const SyncedTrial& trial, const std::string& csv_path,
               const std::string& header_path, const Producer& producer,
               const SyncOptions& opts) {
    std::vector<std::string> body_joints;
    if (!trial.body.empty())
        for (const auto& [name, pos] : trial.body.front().joints)
            body_joints.push_back(name);
    std::vector<std::string> cols = column_names(body_joints);

    std::string out = producer.csv_header();
    for (size_t c = 0; c < cols.size(); ++c) {
        if (c) out += ',';
        out += cols[c];
    }
    out += '\n';
    for (size_t i = 0; i < trial.size(); ++i) {
        out += format_double(trial.t[i]);
        auto emit3 = [&out](const Vec3& v) {
            out += ',' + format_double(v.x) + ',' + format_double(v.y) + ',' +
                   format_double(v.z);
        };
        for (const std::string& j : body_joints) emit3(trial.body[i].at(j));
        for (const auto* hand : {&trial.hand_left, &trial.hand_right}) {
            const HandPoseFrame& f = (*hand)[i];
            for (const Vec3& lm : f.landmarks) emit3(lm);
            emit3(f.palm_normal);
            emit3(f.wrist);
        }
        for (const auto* g : {&trial.gonio_left, &trial.gonio_right}) {
            out += ',' + format_double((*g)[i].ch1);
            out += ',' + format_double((*g)[i].ch2);
        }
        for (const auto* g : {&trial.glove_left, &trial.glove_right})
            for (double f : (*g)[i].taxels) out += ',' + format_double(f);
        out += '\n';
    }
    write_text_file(csv_path, out);

    json hdr;
    hdr["schema"] = "ergo.synced.v1";
    hdr["participant_id"] = trial.participant_id;
    hdr["tool"] = trial.tool;
    hdr["rate_hz"] = trial.rate;
    hdr["rows"] = trial.size();
    hdr["body_joints"] = body_joints;
    hdr["columns"] = cols;
    hdr["saturation_ceiling_n"] = opts.saturation_ceiling_n;
    hdr["producer"] = {{"subcommand", producer.subcommand},
                       {"config_hash", producer.config_hash},
                       {"seed", producer.seed}};
    write_text_file(header_path, hdr.dump(2) + "\n");
}

SyncedTrial read_csv(const std::string& csv_path, const std::string& header_path) {
    json hdr;
    try {
        hdr = json::parse(read_text_file(header_path));
    } catch (const json::exception& e) {
        throw ParseError("sync_engine", std::string("synced header: ") + e.what());
    }
    SyncedTrial trial;
    std::vector<std::string> body_joints;
    double ceiling = kDefaultSaturationCeilingN;
    try {
        trial.participant_id = hdr.at("participant_id").get<std::string>();
        trial.tool = hdr.at("tool").get<std::string>();
        trial.rate = hdr.at("rate_hz").get<double>();
        body_joints = hdr.at("body_joints").get<std::vector<std::string>>();
        ceiling = hdr.at("saturation_ceiling_n").get<double>();
    } catch (const json::exception& e) {
        throw ParseError("sync_engine", std::string("synced header: ") + e.what());
    }

    std::istringstream in(read_text_file(csv_path));
    std::string line;
    size_t expected = column_names(body_joints).size();
    bool saw_columns = false;
    std::vector<double> vals;
    vals.reserve(expected);
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!saw_columns) {  // column-name row
            saw_columns = true;
            continue;
        }
        vals.clear();
        const char* p = line.c_str();
        char* endp = nullptr;
        while (true) {
            double v = std::strtod(p, &endp);
            if (endp == p)
                throw ParseError("sync_engine", "synced csv: malformed number in row");
            vals.push_back(v);
            p = endp;
            if (*p == ',') ++p;
            else break;
        }
        if (vals.size() != expected)
            throw ParseError("sync_engine", "synced csv: wrong column count in row");

        size_t c = 0;
        trial.t.push_back(vals[c++]);
        auto take3 = [&]() {
            Vec3 v{vals[c], vals[c + 1], vals[c + 2]};
            c += 3;
            return v;
        };
        BodyPoseFrame bf;
        for (const std::string& j : body_joints) bf.joints[j] = take3();
        trial.body.push_back(std::move(bf));
        for (auto* hand : {&trial.hand_left, &trial.hand_right}) {
            HandPoseFrame f;
            f.side = hand == &trial.hand_left ? Side::Left : Side::Right;
            for (int k = 0; k < kHandLandmarks; ++k) f.landmarks[k] = take3();
            f.palm_normal = take3();
            f.wrist = take3();
            hand->push_back(std::move(f));
        }
        for (auto* g : {&trial.gonio_left, &trial.gonio_right}) {
            GonioSample s;
            s.side = g == &trial.gonio_left ? Side::Left : Side::Right;
            s.ch1 = vals[c++];
            s.ch2 = vals[c++];
            g->push_back(s);
        }
        for (auto* g : {&trial.glove_left, &trial.glove_right}) {
            GloveFrame f;
            f.side = g == &trial.glove_left ? Side::Left : Side::Right;
            for (int k = 0; k < kTaxels; ++k) {
                f.taxels[k] = vals[c++];
                f.saturated[k] = f.taxels[k] >= ceiling;
            }
            g->push_back(std::move(f));
        }
    }
    return trial;
}

}  // namespace ergo::sync
