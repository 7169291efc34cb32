#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "ergo/rng.hpp"

namespace ergo::gru {

using Mat = Eigen::MatrixXd;
using RowVec = Eigen::RowVectorXd;

struct GruDims {
    int input = 6;
    int hidden = 10;
    int layers = 3;
    int head_hidden = 90;
    int seq_len = 250;

    bool operator==(const GruDims&) const = default;
    int layer_input(int layer) const { return layer == 0 ? input : hidden; }
};

// All weights live in one flat vector; named Eigen views are mapped over it
// so the optimizer and the finite-difference check can treat parameters
// uniformly. Cell equations (row-vector convention):
//   r_t = sigmoid(x_t W_ir + h_{t-1} W_hr + b_r)
//   z_t = sigmoid(x_t W_iz + h_{t-1} W_hz + b_z)
//   n_t = tanh(x_t W_in + b_in + r_t o (h_{t-1} W_hn + b_hn))
//   h_t = (1 - z_t) o n_t + z_t o h_{t-1}
// Head: dense(hidden -> head_hidden), tanh, dropout, dense(head_hidden -> 1).
class GruParams {
public:
    GruParams() : GruParams(GruDims{}) {}
    explicit GruParams(GruDims dims);

    const GruDims& dims() const { return dims_; }
    size_t size() const { return theta_.size(); }
    std::vector<double>& flat() { return theta_; }
    const std::vector<double>& flat() const { return theta_; }

    using MapM = Eigen::Map<Mat>;
    using CMapM = Eigen::Map<const Mat>;
    using MapV = Eigen::Map<RowVec>;
    using CMapV = Eigen::Map<const RowVec>;

    MapM w_ir(int l); CMapM w_ir(int l) const;
    MapM w_iz(int l); CMapM w_iz(int l) const;
    MapM w_in(int l); CMapM w_in(int l) const;
    MapM w_hr(int l); CMapM w_hr(int l) const;
    MapM w_hz(int l); CMapM w_hz(int l) const;
    MapM w_hn(int l); CMapM w_hn(int l) const;
    MapV b_r(int l); CMapV b_r(int l) const;
    MapV b_z(int l); CMapV b_z(int l) const;
    MapV b_in(int l); CMapV b_in(int l) const;
    MapV b_hn(int l); CMapV b_hn(int l) const;
    MapM head_w1(); CMapM head_w1() const;   // hidden x head_hidden
    MapV head_b1(); CMapV head_b1() const;
    MapM head_w2(); CMapM head_w2() const;   // head_hidden x 1
    double& head_b2(); double head_b2() const;

    // PyTorch-style U(-1/sqrt(fan), +1/sqrt(fan)) per tensor.
    void init_random(Rng& rng);

    // z-score statistics for the 6 input channels, from the training split
    std::vector<double> norm_mean, norm_std;

    nlohmann::json to_json() const;
    static GruParams from_json(const nlohmann::json& doc);
    void save(const std::string& path, const nlohmann::json& producer) const;
    static GruParams load(const std::string& path);

private:
    GruDims dims_;
    std::vector<double> theta_;
    std::vector<size_t> offsets_;
};

// Per-step activations kept for backpropagation through time.
struct ForwardCache {
    std::vector<Mat> x;       // layer inputs, T x in
    std::vector<Mat> r, z, n, h;  // T x hidden per layer
    std::vector<Mat> hn_pre;  // h_{t-1} W_hn + b_hn, T x hidden
    std::vector<Mat> drop;    // inter-layer dropout masks (layers-1), T x hidden
    RowVec head_act;          // tanh of first head layer
    RowVec head_mask;         // head dropout mask
    double raw = 0.0;
};

struct ForwardOptions {
    bool training = false;  // enables inverted dropout; needs rng
    double dropout = 0.5;
    Rng* rng = nullptr;
};

// Raw (unclamped) scalar output. The window must already be normalized and
// shaped seq_len x input.
double forward(const GruParams& params, const Mat& window, ForwardCache* cache = nullptr,
               const ForwardOptions& opts = {});

// One cell step, exposed for unit checks of the gate algebra.
struct StepResult {
    RowVec r, z, n, h;
};
StepResult cell_step(const GruParams& params, int layer, const RowVec& x,
                     const RowVec& h_prev);

// Normalizes with the stored statistics, runs the network, clamps to [0,10].
double predict_hal(const GruParams& params, const Mat& raw_window);

inline constexpr double kHalClampLo = 0.0;
inline constexpr double kHalClampHi = 10.0;

// Squared-error loss and its gradient via BPTT (dropout off).
double loss_at(const GruParams& params, const Mat& window, double target);
double loss_and_grad(const GruParams& params, const Mat& window, double target,
                     GruParams& grad);
// Backward pass reusing an existing forward cache (dropout masks included).
void backward(const GruParams& params, const ForwardCache& cache, double dloss_draw,
              GruParams& grad);

struct GradCheckResult {
    double max_rel_error = 0.0;
    int checked = 0;
};
// Central finite differences (step 1e-5) against the analytic gradient on a
// deterministic sample of parameters.
GradCheckResult gradient_check(const GruParams& params, const Mat& window, double target,
                               int n_samples = 200, uint64_t seed = 7);

struct Dataset {
    std::vector<Mat> windows;  // raw (unnormalized), seq_len x input
    std::vector<double> targets;
};

struct TrainConfig {
    uint64_t seed = 0;
    int epochs = 50;
    double learning_rate = 1e-3;
    double dropout = 0.5;
    GruDims dims{};
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
};

struct TrainResult {
    GruParams params;
    std::vector<double> loss_trace;  // mean training MSE per epoch
};

// Adam on per-window gradients, shuffled each epoch; fully deterministic
// for a fixed seed.
TrainResult train(const Dataset& dataset, const TrainConfig& cfg);

}  // namespace ergo::gru
