#include "ergo/gru.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "ergo/config.hpp"
#include "ergo/error.hpp"
#include "ergo/io_util.hpp"

using nlohmann::json;

namespace ergo::gru {

namespace {

// tensor ids within a layer block
enum : int { kWir = 0, kWiz, kWin, kWhr, kWhz, kWhn, kBr, kBz, kBin, kBhn, kPerLayer };

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

}  // namespace

GruParams::GruParams(GruDims dims) : dims_(dims) {
    if (dims.input < 1 || dims.hidden < 1 || dims.layers < 1 || dims.head_hidden < 1 ||
        dims.seq_len < 1)
        throw PreconditionError("ml_models", "invalid GRU dimensions");
    offsets_.clear();
    size_t off = 0;
    for (int l = 0; l < dims.layers; ++l) {
        int in = dims.layer_input(l);
        const size_t sizes[kPerLayer] = {
            static_cast<size_t>(in * dims.hidden),     // W_ir
            static_cast<size_t>(in * dims.hidden),     // W_iz
            static_cast<size_t>(in * dims.hidden),     // W_in
            static_cast<size_t>(dims.hidden * dims.hidden),  // W_hr
            static_cast<size_t>(dims.hidden * dims.hidden),  // W_hz
            static_cast<size_t>(dims.hidden * dims.hidden),  // W_hn
            static_cast<size_t>(dims.hidden),          // b_r
            static_cast<size_t>(dims.hidden),          // b_z
            static_cast<size_t>(dims.hidden),          // b_in
            static_cast<size_t>(dims.hidden),          // b_hn
        };
        for (size_t s : sizes) {
            offsets_.push_back(off);
            off += s;
        }
    }
    offsets_.push_back(off);  // head W1
    off += static_cast<size_t>(dims.hidden * dims.head_hidden);
    offsets_.push_back(off);  // head b1
    off += static_cast<size_t>(dims.head_hidden);
    offsets_.push_back(off);  // head W2
    off += static_cast<size_t>(dims.head_hidden);
    offsets_.push_back(off);  // head b2
    off += 1;
    offsets_.push_back(off);  // total
    theta_.assign(off, 0.0);
    norm_mean.assign(dims.input, 0.0);
    norm_std.assign(dims.input, 1.0);
}

#define ERGO_GRU_MAT(name, tensor, rows_expr, cols_expr)                              \
    GruParams::MapM GruParams::name(int l) {                                         \
        return MapM(theta_.data() + offsets_[l * kPerLayer + tensor], (rows_expr),   \
                    (cols_expr));                                                     \
    }                                                                                 \
    GruParams::CMapM GruParams::name(int l) const {                                  \
        return CMapM(theta_.data() + offsets_[l * kPerLayer + tensor], (rows_expr),  \
                     (cols_expr));                                                    \
    }
#define ERGO_GRU_VEC(name, tensor)                                                    \
    GruParams::MapV GruParams::name(int l) {                                         \
        return MapV(theta_.data() + offsets_[l * kPerLayer + tensor], dims_.hidden); \
    }                                                                                 \
    GruParams::CMapV GruParams::name(int l) const {                                  \
        return CMapV(theta_.data() + offsets_[l * kPerLayer + tensor], dims_.hidden);\
    }

ERGO_GRU_MAT(w_ir, kWir, dims_.layer_input(l), dims_.hidden)
ERGO_GRU_MAT(w_iz, kWiz, dims_.layer_input(l), dims_.hidden)
ERGO_GRU_MAT(w_in, kWin, dims_.layer_input(l), dims_.hidden)
ERGO_GRU_MAT(w_hr, kWhr, dims_.hidden, dims_.hidden)
ERGO_GRU_MAT(w_hz, kWhz, dims_.hidden, dims_.hidden)
ERGO_GRU_MAT(w_hn, kWhn, dims_.hidden, dims_.hidden)
ERGO_GRU_VEC(b_r, kBr)
ERGO_GRU_VEC(b_z, kBz)
ERGO_GRU_VEC(b_in, kBin)
ERGO_GRU_VEC(b_hn, kBhn)

#undef ERGO_GRU_MAT
#undef ERGO_GRU_VEC

GruParams::MapM GruParams::head_w1() {
    return MapM(theta_.data() + offsets_[dims_.layers * kPerLayer], dims_.hidden,
                dims_.head_hidden);
}
GruParams::CMapM GruParams::head_w1() const {
    return CMapM(theta_.data() + offsets_[dims_.layers * kPerLayer], dims_.hidden,
                 dims_.head_hidden);
}
GruParams::MapV GruParams::head_b1() {
    return MapV(theta_.data() + offsets_[dims_.layers * kPerLayer + 1], dims_.head_hidden);
}
GruParams::CMapV GruParams::head_b1() const {
    return CMapV(theta_.data() + offsets_[dims_.layers * kPerLayer + 1], dims_.head_hidden);
}
GruParams::MapM GruParams::head_w2() {
    return MapM(theta_.data() + offsets_[dims_.layers * kPerLayer + 2], dims_.head_hidden, 1);
}
GruParams::CMapM GruParams::head_w2() const {
    return CMapM(theta_.data() + offsets_[dims_.layers * kPerLayer + 2], dims_.head_hidden, 1);
}
double& GruParams::head_b2() { return theta_[offsets_[dims_.layers * kPerLayer + 3]]; }
double GruParams::head_b2() const { return theta_[offsets_[dims_.layers * kPerLayer + 3]]; }

void GruParams::init_random(Rng& rng) {
    double gru_bound = 1.0 / std::sqrt(static_cast<double>(dims_.hidden));
    size_t head_w1_off = offsets_[dims_.layers * kPerLayer];
    size_t head_w2_off = offsets_[dims_.layers * kPerLayer + 2];
    double head1_bound = 1.0 / std::sqrt(static_cast<double>(dims_.hidden));
    double head2_bound = 1.0 / std::sqrt(static_cast<double>(dims_.head_hidden));
    for (size_t i = 0; i < theta_.size(); ++i) {
        double bound = i < head_w1_off ? gru_bound
                       : i < head_w2_off ? head1_bound
                                         : head2_bound;
        theta_[i] = rng.uniform(-bound, bound);
    }
}

StepResult cell_step(const GruParams& p, int layer, const RowVec& x, const RowVec& h_prev) {
    const GruDims& d = p.dims();
    if (layer < 0 || layer >= d.layers)
        throw PreconditionError("ml_models", "cell_step: bad layer");
    if (x.size() != d.layer_input(layer) || h_prev.size() != d.hidden)
        throw PreconditionError("ml_models", "cell_step: bad shapes");
    StepResult s;
    RowVec pre_r = x * p.w_ir(layer) + h_prev * p.w_hr(layer) + p.b_r(layer);
    RowVec pre_z = x * p.w_iz(layer) + h_prev * p.w_hz(layer) + p.b_z(layer);
    RowVec hn_pre = h_prev * p.w_hn(layer) + p.b_hn(layer);
    s.r = pre_r.unaryExpr([](double v) { return sigmoid(v); });
    s.z = pre_z.unaryExpr([](double v) { return sigmoid(v); });
    RowVec pre_n = x * p.w_in(layer) + p.b_in(layer) + s.r.cwiseProduct(hn_pre);
    s.n = pre_n.array().tanh();
    s.h = (RowVec::Ones(d.hidden) - s.z).cwiseProduct(s.n) + s.z.cwiseProduct(h_prev);
    return s;
}

double forward(const GruParams& p, const Mat& window, ForwardCache* cache,
               const ForwardOptions& opts) {
    const GruDims& d = p.dims();
    if (window.rows() != d.seq_len || window.cols() != d.input)
        throw PreconditionError("ml_models",
                                "window shape " + std::to_string(window.rows()) + "x" +
                                    std::to_string(window.cols()) + " != " +
                                    std::to_string(d.seq_len) + "x" + std::to_string(d.input));
    bool dropping = opts.training && opts.dropout > 0.0;
    if (dropping && opts.rng == nullptr)
        throw PreconditionError("ml_models", "training forward needs an rng for dropout");

    int T = d.seq_len, L = d.layers, H = d.hidden;
    if (cache) {
        cache->x.assign(L, Mat());
        cache->r.assign(L, Mat(T, H));
        cache->z.assign(L, Mat(T, H));
        cache->n.assign(L, Mat(T, H));
        cache->h.assign(L, Mat(T, H));
        cache->hn_pre.assign(L, Mat(T, H));
        for (int l = 0; l < L; ++l) cache->x[l].resize(T, d.layer_input(l));
        cache->drop.assign(L - 1, Mat());
    }

    // inter-layer inverted-dropout masks, one element per (step, unit)
    std::vector<Mat> drop;
    if (dropping) {
        double keep = 1.0 - opts.dropout;
        drop.assign(L - 1, Mat(T, H));
        for (int g = 0; g < L - 1; ++g)
            for (int t = 0; t < T; ++t)
                for (int j = 0; j < H; ++j)
                    drop[g](t, j) = opts.rng->bernoulli(keep) ? 1.0 / keep : 0.0;
        if (cache) cache->drop = drop;
    }

    std::vector<RowVec> h(L, RowVec::Zero(H));
    RowVec x, pre, hn_pre, r, z, n, h_new;
    for (int t = 0; t < T; ++t) {
        x = window.row(t);
        for (int l = 0; l < L; ++l) {
            if (l > 0) {
                x = h[l - 1];
                if (dropping) x = x.cwiseProduct(drop[l - 1].row(t));
            }
            hn_pre = h[l] * p.w_hn(l) + p.b_hn(l);
            pre = x * p.w_ir(l) + h[l] * p.w_hr(l) + p.b_r(l);
            r = pre.unaryExpr([](double v) { return sigmoid(v); });
            pre = x * p.w_iz(l) + h[l] * p.w_hz(l) + p.b_z(l);
            z = pre.unaryExpr([](double v) { return sigmoid(v); });
            pre = x * p.w_in(l) + p.b_in(l) + r.cwiseProduct(hn_pre);
            n = pre.array().tanh();
            h_new = (RowVec::Ones(H) - z).cwiseProduct(n) + z.cwiseProduct(h[l]);
            if (cache) {
                cache->x[l].row(t) = x;
                cache->r[l].row(t) = r;
                cache->z[l].row(t) = z;
                cache->n[l].row(t) = n;
                cache->hn_pre[l].row(t) = hn_pre;
                cache->h[l].row(t) = h_new;
            }
            h[l] = h_new;
        }
    }

    RowVec act = (h[L - 1] * p.head_w1() + p.head_b1()).array().tanh();
    RowVec mask;
    if (dropping) {
        double keep = 1.0 - opts.dropout;
        mask.resize(d.head_hidden);
        for (int j = 0; j < d.head_hidden; ++j)
            mask(j) = opts.rng->bernoulli(keep) ? 1.0 / keep : 0.0;
    }
    RowVec act_used = dropping ? RowVec(act.cwiseProduct(mask)) : act;
    double raw = (act_used * p.head_w2())(0) + p.head_b2();
    if (cache) {
        cache->head_act = act;
        cache->head_mask = dropping ? mask : RowVec();
        cache->raw = raw;
    }
    return raw;
}

double predict_hal(const GruParams& p, const Mat& raw_window) {
    const GruDims& d = p.dims();
    if (raw_window.cols() != d.input)
        throw PreconditionError("ml_models", "window channel count mismatch");
    Mat w = raw_window;
    for (int c = 0; c < d.input; ++c) {
        double mean = p.norm_mean[c];
        double stdv = std::max(p.norm_std[c], 1e-8);
        for (int t = 0; t < w.rows(); ++t) w(t, c) = (w(t, c) - mean) / stdv;
    }
    double raw = forward(p, w);
    return std::clamp(raw, kHalClampLo, kHalClampHi);
}

void backward(const GruParams& p, const ForwardCache& cache, double dloss_draw,
              GruParams& grad) {
    const GruDims& d = p.dims();
    int T = d.seq_len, L = d.layers, H = d.hidden;
    bool dropped = !cache.drop.empty() && cache.drop[0].size() > 0;

    // head
    RowVec h_last = cache.h[L - 1].row(T - 1);
    RowVec act = cache.head_act;
    bool head_mask = cache.head_mask.size() > 0;
    RowVec act_used = head_mask ? RowVec(act.cwiseProduct(cache.head_mask)) : act;
    grad.head_w2().noalias() += act_used.transpose() * dloss_draw;
    grad.head_b2() += dloss_draw;
    RowVec dact = dloss_draw * p.head_w2().transpose();
    if (head_mask) dact = dact.cwiseProduct(cache.head_mask);
    RowVec dpre1 = dact.cwiseProduct(RowVec::Ones(d.head_hidden) - act.cwiseProduct(act));
    grad.head_w1().noalias() += h_last.transpose() * dpre1;
    grad.head_b1() += dpre1;

    std::vector<RowVec> dh_carry(L, RowVec::Zero(H));
    dh_carry[L - 1] = dpre1 * p.head_w1().transpose();

    RowVec zero = RowVec::Zero(H);
    for (int t = T - 1; t >= 0; --t) {
        for (int l = L - 1; l >= 0; --l) {
            RowVec dh = dh_carry[l];
            RowVec x = cache.x[l].row(t);
            RowVec h_prev = t > 0 ? RowVec(cache.h[l].row(t - 1)) : zero;
            RowVec r = cache.r[l].row(t);
            RowVec z = cache.z[l].row(t);
            RowVec n = cache.n[l].row(t);
            RowVec hn_pre = cache.hn_pre[l].row(t);

            RowVec dz = dh.cwiseProduct(h_prev - n);
            RowVec dn = dh.cwiseProduct(RowVec::Ones(H) - z);
            RowVec dh_prev = dh.cwiseProduct(z);

            RowVec dn_pre = dn.cwiseProduct(RowVec::Ones(H) - n.cwiseProduct(n));
            grad.w_in(l).noalias() += x.transpose() * dn_pre;
            grad.b_in(l) += dn_pre;
            RowVec dx = dn_pre * p.w_in(l).transpose();
            RowVec dr = dn_pre.cwiseProduct(hn_pre);
            RowVec dhn_pre = dn_pre.cwiseProduct(r);
            grad.w_hn(l).noalias() += h_prev.transpose() * dhn_pre;
            grad.b_hn(l) += dhn_pre;
            dh_prev += dhn_pre * p.w_hn(l).transpose();

            RowVec dz_pre = dz.cwiseProduct(z).cwiseProduct(RowVec::Ones(H) - z);
            grad.w_iz(l).noalias() += x.transpose() * dz_pre;
            grad.b_z(l) += dz_pre;
            dx += dz_pre * p.w_iz(l).transpose();
            grad.w_hz(l).noalias() += h_prev.transpose() * dz_pre;
            dh_prev += dz_pre * p.w_hz(l).transpose();

            RowVec dr_pre = dr.cwiseProduct(r).cwiseProduct(RowVec::Ones(H) - r);
            grad.w_ir(l).noalias() += x.transpose() * dr_pre;
            grad.b_r(l) += dr_pre;
            dx += dr_pre * p.w_ir(l).transpose();
            grad.w_hr(l).noalias() += h_prev.transpose() * dr_pre;
            dh_prev += dr_pre * p.w_hr(l).transpose();

            dh_carry[l] = dh_prev;
            if (l > 0) {
                if (dropped) dx = dx.cwiseProduct(cache.drop[l - 1].row(t));
                dh_carry[l - 1] += dx;
            }
        }
    }
}

double loss_at(const GruParams& p, const Mat& window, double target) {
    double raw = forward(p, window);
    double e = raw - target;
    return e * e;
}

double loss_and_grad(const GruParams& p, const Mat& window, double target, GruParams& grad) {
    ForwardCache cache;
    double raw = forward(p, window, &cache);
    double e = raw - target;
    backward(p, cache, 2.0 * e, grad);
    return e * e;
}

GradCheckResult gradient_check(const GruParams& params, const Mat& window, double target,
                               int n_samples, uint64_t seed) {
    GruParams grad(params.dims());
    loss_and_grad(params, window, target, grad);

    size_t total = params.size();
    std::vector<size_t> picks;
    if (static_cast<size_t>(n_samples) >= total) {
        picks.resize(total);
        std::iota(picks.begin(), picks.end(), 0);
    } else {
        Rng rng(seed);
        std::set<size_t> chosen;
        while (chosen.size() < static_cast<size_t>(n_samples))
            chosen.insert(rng.next_u64() % total);
        picks.assign(chosen.begin(), chosen.end());
    }

    GruParams work = params;
    const double h = 1e-5;
    GradCheckResult result;
    for (size_t idx : picks) {
        double saved = work.flat()[idx];
        work.flat()[idx] = saved + h;
        double lp = loss_at(work, window, target);
        work.flat()[idx] = saved - h;
        double lm = loss_at(work, window, target);
        work.flat()[idx] = saved;
        double numeric = (lp - lm) / (2.0 * h);
        double analytic = grad.flat()[idx];
        // the 1e-4 floor keeps roundoff on negligible gradients from
        // dominating the ratio; real disagreements sit far above it
        double rel = std::fabs(analytic - numeric) /
                     std::max(std::fabs(analytic) + std::fabs(numeric), 1e-4);
        result.max_rel_error = std::max(result.max_rel_error, rel);
        ++result.checked;
    }
    return result;
}

TrainResult train(const Dataset& dataset, const TrainConfig& cfg) {
    if (dataset.windows.empty())
        throw PreconditionError("ml_models", "train_gru: empty dataset");
    if (dataset.windows.size() != dataset.targets.size())
        throw PreconditionError("ml_models", "train_gru: window/target count mismatch");
    const GruDims& d = cfg.dims;
    for (const Mat& w : dataset.windows)
        if (w.rows() != d.seq_len || w.cols() != d.input)
            throw PreconditionError("ml_models", "train_gru: window shape mismatch");

    Rng rng(cfg.seed ^ fnv1a64("ergo.gru.train"));
    TrainResult result{GruParams(d), {}};
    GruParams& params = result.params;
    {
        Rng init_rng = rng.fork(1);
        params.init_random(init_rng);
    }

    // per-channel statistics over the training windows only
    size_t count = dataset.windows.size() * static_cast<size_t>(d.seq_len);
    for (int c = 0; c < d.input; ++c) {
        double sum = 0.0;
        for (const Mat& w : dataset.windows) sum += w.col(c).sum();
        double mean = sum / static_cast<double>(count);
        double var = 0.0;
        for (const Mat& w : dataset.windows)
            var += (w.col(c).array() - mean).square().sum();
        params.norm_mean[c] = mean;
        params.norm_std[c] = std::max(std::sqrt(var / static_cast<double>(count)), 1e-8);
    }
    std::vector<Mat> windows(dataset.windows.size());
    for (size_t i = 0; i < dataset.windows.size(); ++i) {
        windows[i] = dataset.windows[i];
        for (int c = 0; c < d.input; ++c)
            windows[i].col(c) =
                (windows[i].col(c).array() - params.norm_mean[c]) / params.norm_std[c];
    }

    std::vector<double> m(params.size(), 0.0), v(params.size(), 0.0);
    GruParams grad(d);
    ForwardCache cache;
    std::vector<size_t> order(windows.size());
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng = rng.fork(2);
    Rng dropout_rng = rng.fork(3);
    long step = 0;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[shuffle_rng.next_u64() % i]);
        double epoch_loss = 0.0;
        for (size_t i : order) {
            ForwardOptions opts;
            opts.training = cfg.dropout > 0.0;
            opts.dropout = cfg.dropout;
            opts.rng = &dropout_rng;
            double raw = forward(params, windows[i], &cache, opts);
            double err = raw - dataset.targets[i];
            epoch_loss += err * err;
            std::fill(grad.flat().begin(), grad.flat().end(), 0.0);
            backward(params, cache, 2.0 * err, grad);

            ++step;
            double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(step));
            double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(step));
            for (size_t j = 0; j < params.size(); ++j) {
                double g = grad.flat()[j];
                m[j] = cfg.adam_beta1 * m[j] + (1.0 - cfg.adam_beta1) * g;
                v[j] = cfg.adam_beta2 * v[j] + (1.0 - cfg.adam_beta2) * g * g;
                params.flat()[j] -=
                    cfg.learning_rate * (m[j] / bc1) / (std::sqrt(v[j] / bc2) + cfg.adam_eps);
            }
        }
        result.loss_trace.push_back(epoch_loss / static_cast<double>(windows.size()));
    }
    return result;
}

// --- serialization -----------------------------------------------------------

namespace {

json mat_to_json(const Eigen::Ref<const Mat>& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

void mat_from_json(const json& doc, Eigen::Ref<Mat> out, const char* what) {
    if (!doc.is_array() || static_cast<Eigen::Index>(doc.size()) != out.rows())
        throw ParseError("ml_models", std::string("gru model: bad shape for ") + what);
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
        const json& row = doc[r];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != out.cols())
            throw ParseError("ml_models", std::string("gru model: bad shape for ") + what);
        for (Eigen::Index c = 0; c < out.cols(); ++c) out(r, c) = row[c].get<double>();
    }
}

json vec_to_json(const Eigen::Ref<const RowVec>& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

void vec_from_json(const json& doc, Eigen::Ref<RowVec> out, const char* what) {
    if (!doc.is_array() || static_cast<Eigen::Index>(doc.size()) != out.size())
        throw ParseError("ml_models", std::string("gru model: bad shape for ") + what);
    for (Eigen::Index i = 0; i < out.size(); ++i) out(i) = doc[i].get<double>();
}

}  // namespace

json GruParams::to_json() const {
    json doc;
    doc["schema"] = "ergo.gru.v1";
    doc["dims"] = {{"input", dims_.input},
                   {"hidden", dims_.hidden},
                   {"layers", dims_.layers},
                   {"head_hidden", dims_.head_hidden},
                   {"seq_len", dims_.seq_len}};
    doc["norm_mean"] = norm_mean;
    doc["norm_std"] = norm_std;
    json layers = json::array();
    for (int l = 0; l < dims_.layers; ++l) {
        json layer;
        layer["w_ir"] = mat_to_json(w_ir(l));
        layer["w_iz"] = mat_to_json(w_iz(l));
        layer["w_in"] = mat_to_json(w_in(l));
        layer["w_hr"] = mat_to_json(w_hr(l));
        layer["w_hz"] = mat_to_json(w_hz(l));
        layer["w_hn"] = mat_to_json(w_hn(l));
        layer["b_r"] = vec_to_json(b_r(l));
        layer["b_z"] = vec_to_json(b_z(l));
        layer["b_in"] = vec_to_json(b_in(l));
        layer["b_hn"] = vec_to_json(b_hn(l));
        layers.push_back(std::move(layer));
    }
    doc["layers"] = std::move(layers);
    doc["head"] = {{"w1", mat_to_json(head_w1())},
                   {"b1", vec_to_json(head_b1())},
                   {"w2", mat_to_json(head_w2())},
                   {"b2", head_b2()}};
    return doc;
}

GruParams GruParams::from_json(const json& doc) {
    try {
        if (doc.at("schema").get<std::string>() != "ergo.gru.v1")
            throw ParseError("ml_models", "unknown gru model schema");
        GruDims d;
        d.input = doc.at("dims").at("input").get<int>();
        d.hidden = doc.at("dims").at("hidden").get<int>();
        d.layers = doc.at("dims").at("layers").get<int>();
        d.head_hidden = doc.at("dims").at("head_hidden").get<int>();
        d.seq_len = doc.at("dims").at("seq_len").get<int>();
        GruParams p(d);
        p.norm_mean = doc.at("norm_mean").get<std::vector<double>>();
        p.norm_std = doc.at("norm_std").get<std::vector<double>>();
        if (p.norm_mean.size() != static_cast<size_t>(d.input) ||
            p.norm_std.size() != static_cast<size_t>(d.input))
            throw ParseError("ml_models", "gru model: wrong normalization size");
        const json& layers = doc.at("layers");
        if (static_cast<int>(layers.size()) != d.layers)
            throw ParseError("ml_models", "gru model: wrong layer count");
        for (int l = 0; l < d.layers; ++l) {
            const json& layer = layers[l];
            mat_from_json(layer.at("w_ir"), p.w_ir(l), "w_ir");
            mat_from_json(layer.at("w_iz"), p.w_iz(l), "w_iz");
            mat_from_json(layer.at("w_in"), p.w_in(l), "w_in");
            mat_from_json(layer.at("w_hr"), p.w_hr(l), "w_hr");
            mat_from_json(layer.at("w_hz"), p.w_hz(l), "w_hz");
            mat_from_json(layer.at("w_hn"), p.w_hn(l), "w_hn");
            vec_from_json(layer.at("b_r"), p.b_r(l), "b_r");
            vec_from_json(layer.at("b_z"), p.b_z(l), "b_z");
            vec_from_json(layer.at("b_in"), p.b_in(l), "b_in");
            vec_from_json(layer.at("b_hn"), p.b_hn(l), "b_hn");
        }
        mat_from_json(doc.at("head").at("w1"), p.head_w1(), "head.w1");
        vec_from_json(doc.at("head").at("b1"), p.head_b1(), "head.b1");
        mat_from_json(doc.at("head").at("w2"), p.head_w2(), "head.w2");
        p.head_b2() = doc.at("head").at("b2").get<double>();
        return p;
    } catch (const json::exception& e) {
        throw ParseError("ml_models", std::string("gru model: ") + e.what());
    }
}

void GruParams::save(const std::string& path, const json& producer) const {
    json doc = to_json();
    doc["producer"] = producer;
    write_text_file(path, doc.dump() + "\n");
}

GruParams GruParams::load(const std::string& path) {
    try {
        return from_json(json::parse(read_text_file(path)));
    } catch (const json::exception& e) {
        throw ParseError("ml_models", std::string("gru model: ") + e.what());
    }
}

}  // namespace ergo::gru
