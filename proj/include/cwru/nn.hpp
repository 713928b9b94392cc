#ifndef CWRU_NN_HPP
#define CWRU_NN_HPP

// Minimal neural-network core for WDCNN: 1-D convolution, batch norm,
// ReLU, max-pool and dense layers with hand-derived backward passes,
// binary cross-entropy with logits, and Adam. Templated on the scalar type:
// production uses float, test oracles instantiate double.

#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "cwru/prng.hpp"

namespace cwru::nn {

// Standard normal via Box-Muller on the replayable generator.
inline double normal_sample(SplitMix64& rng) {
    double u1 = rng.next_double();
    if (u1 < 1e-300) u1 = 1e-300;
    const double u2 = rng.next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

template <typename Real>
class Layer {
public:
    virtual ~Layer() = default;
    virtual std::string name() const = 0;
    virtual std::size_t param_count() const { return 0; }
    virtual std::size_t buffer_count() const { return 0; }
    virtual void init_params(Real* /*params*/, SplitMix64& /*rng*/) {}
    virtual void init_buffers(Real* /*buffers*/) {}
    // x is [batch * in_size()] row-major; fills y as [batch * out_size()].
    virtual void forward(const Real* params, Real* buffers, const std::vector<Real>& x,
                         std::size_t batch, std::vector<Real>& y, bool training) = 0;
    // dy -> dx, accumulating parameter gradients into dparams.
    virtual void backward(const Real* params, const std::vector<Real>& dy, std::size_t batch,
                          std::vector<Real>& dx, Real* dparams) = 0;
    virtual std::size_t in_size() const = 0;
    virtual std::size_t out_size() const = 0;
};

// ---------------------------------------------------------------------------

template <typename Real>
class Conv1d final : public Layer<Real> {
public:
    Conv1d(std::size_t in_ch, std::size_t in_len, std::size_t out_ch, std::size_t kernel,
           std::size_t stride, std::size_t pad)
        : in_ch_(in_ch), in_len_(in_len), out_ch_(out_ch), k_(kernel), stride_(stride), pad_(pad) {
        if (in_len + 2 * pad < kernel)
            throw std::invalid_argument("conv1d: window longer than padded input");
        out_len_ = (in_len + 2 * pad - kernel) / stride + 1;
    }

    std::string name() const override { return "conv1d"; }
    std::size_t param_count() const override { return out_ch_ * in_ch_ * k_ + out_ch_; }
    std::size_t in_size() const override { return in_ch_ * in_len_; }
    std::size_t out_size() const override { return out_ch_ * out_len_; }
    std::size_t out_channels() const { return out_ch_; }
    std::size_t out_length() const { return out_len_; }

    void init_params(Real* p, SplitMix64& rng) override {
        const double std = std::sqrt(2.0 / static_cast<double>(in_ch_ * k_));
        const std::size_t nw = out_ch_ * in_ch_ * k_;
        for (std::size_t i = 0; i < nw; ++i) p[i] = static_cast<Real>(normal_sample(rng) * std);
        for (std::size_t i = 0; i < out_ch_; ++i) p[nw + i] = Real(0);
    }

    void forward(const Real* params, Real*, const std::vector<Real>& x, std::size_t batch,
                 std::vector<Real>& y, bool) override {
        x_ = x;
        const Real* w = params;
        const Real* b = params + out_ch_ * in_ch_ * k_;
        y.assign(batch * out_ch_ * out_len_, Real(0));
        for (std::size_t n = 0; n < batch; ++n) {
            const Real* xn = x.data() + n * in_ch_ * in_len_;
            Real* yn = y.data() + n * out_ch_ * out_len_;
            for (std::size_t o = 0; o < out_ch_; ++o) {
                for (std::size_t j = 0; j < out_len_; ++j) {
                    Real acc = b[o];
                    const std::ptrdiff_t start =
                        static_cast<std::ptrdiff_t>(j * stride_) - static_cast<std::ptrdiff_t>(pad_);
                    for (std::size_t i = 0; i < in_ch_; ++i) {
                        const Real* wi = w + (o * in_ch_ + i) * k_;
                        const Real* xi = xn + i * in_len_;
                        for (std::size_t t = 0; t < k_; ++t) {
                            const std::ptrdiff_t idx = start + static_cast<std::ptrdiff_t>(t);
                            if (idx >= 0 && idx < static_cast<std::ptrdiff_t>(in_len_))
                                acc += wi[t] * xi[idx];
                        }
                    }
                    yn[o * out_len_ + j] = acc;
                }
            }
        }
    }

    void backward(const Real* params, const std::vector<Real>& dy, std::size_t batch,
                  std::vector<Real>& dx, Real* dparams) override {
        const Real* w = params;
        Real* dw = dparams;
        Real* db = dparams + out_ch_ * in_ch_ * k_;
        dx.assign(batch * in_ch_ * in_len_, Real(0));
        for (std::size_t n = 0; n < batch; ++n) {
            const Real* xn = x_.data() + n * in_ch_ * in_len_;
            const Real* dyn = dy.data() + n * out_ch_ * out_len_;
            Real* dxn = dx.data() + n * in_ch_ * in_len_;
            for (std::size_t o = 0; o < out_ch_; ++o) {
                for (std::size_t j = 0; j < out_len_; ++j) {
                    const Real g = dyn[o * out_len_ + j];
                    if (g == Real(0)) continue;
                    db[o] += g;
                    const std::ptrdiff_t start =
                        static_cast<std::ptrdiff_t>(j * stride_) - static_cast<std::ptrdiff_t>(pad_);
                    for (std::size_t i = 0; i < in_ch_; ++i) {
                        const Real* wi = w + (o * in_ch_ + i) * k_;
                        Real* dwi = dw + (o * in_ch_ + i) * k_;
                        const Real* xi = xn + i * in_len_;
                        Real* dxi = dxn + i * in_len_;
                        for (std::size_t t = 0; t < k_; ++t) {
                            const std::ptrdiff_t idx = start + static_cast<std::ptrdiff_t>(t);
                            if (idx >= 0 && idx < static_cast<std::ptrdiff_t>(in_len_)) {
                                dwi[t] += g * xi[idx];
                                dxi[idx] += g * wi[t];
                            }
                        }
                    }
                }
            }
        }
    }

private:
    std::size_t in_ch_, in_len_, out_ch_, k_, stride_, pad_, out_len_;
    std::vector<Real> x_;
};

// ---------------------------------------------------------------------------
// Batch norm over channels of a [N, C, L] activation (L = 1 after dense
// layers). Training mode uses batch statistics (population variance) and
// updates running statistics with momentum 0.1; inference uses the running
// statistics.

template <typename Real>
class BatchNorm1d final : public Layer<Real> {
public:
    BatchNorm1d(std::size_t channels, std::size_t len) : c_(channels), l_(len) {}

    std::string name() const override { return "batchnorm1d"; }
    std::size_t param_count() const override { return 2 * c_; }
    std::size_t buffer_count() const override { return 2 * c_; }
    std::size_t in_size() const override { return c_ * l_; }
    std::size_t out_size() const override { return c_ * l_; }

    void init_params(Real* p, SplitMix64&) override {
        for (std::size_t i = 0; i < c_; ++i) p[i] = Real(1);          // scale
        for (std::size_t i = 0; i < c_; ++i) p[c_ + i] = Real(0);     // shift
    }
    void init_buffers(Real* b) override {
        for (std::size_t i = 0; i < c_; ++i) b[i] = Real(0);          // running mean
        for (std::size_t i = 0; i < c_; ++i) b[c_ + i] = Real(1);     // running var
    }

    void forward(const Real* params, Real* buffers, const std::vector<Real>& x, std::size_t batch,
                 std::vector<Real>& y, bool training) override {
        const Real* gamma = params;
        const Real* beta = params + c_;
        y.resize(x.size());
        const std::size_t m = batch * l_;
        if (training) {
            training_ = true;
            mean_.assign(c_, Real(0));
            var_.assign(c_, Real(0));
            for (std::size_t ch = 0; ch < c_; ++ch) {
                double sum = 0.0;
                for (std::size_t n = 0; n < batch; ++n)
                    for (std::size_t t = 0; t < l_; ++t) sum += x[(n * c_ + ch) * l_ + t];
                const double mean = sum / static_cast<double>(m);
                double ss = 0.0;
                for (std::size_t n = 0; n < batch; ++n)
                    for (std::size_t t = 0; t < l_; ++t) {
                        const double d = static_cast<double>(x[(n * c_ + ch) * l_ + t]) - mean;
                        ss += d * d;
                    }
                const double var = ss / static_cast<double>(m);
                mean_[ch] = static_cast<Real>(mean);
                var_[ch] = static_cast<Real>(var);
                buffers[ch] = static_cast<Real>(0.9 * buffers[ch] + 0.1 * mean);
                buffers[c_ + ch] = static_cast<Real>(0.9 * buffers[c_ + ch] + 0.1 * var);
            }
            xhat_.resize(x.size());
            for (std::size_t ch = 0; ch < c_; ++ch) {
                const Real inv = Real(1) / std::sqrt(var_[ch] + Real(kEps));
                for (std::size_t n = 0; n < batch; ++n)
                    for (std::size_t t = 0; t < l_; ++t) {
                        const std::size_t idx = (n * c_ + ch) * l_ + t;
                        xhat_[idx] = (x[idx] - mean_[ch]) * inv;
                        y[idx] = gamma[ch] * xhat_[idx] + beta[ch];
                    }
            }
        } else {
            training_ = false;
            for (std::size_t ch = 0; ch < c_; ++ch) {
                const Real inv = Real(1) / std::sqrt(buffers[c_ + ch] + Real(kEps));
                for (std::size_t n = 0; n < batch; ++n)
                    for (std::size_t t = 0; t < l_; ++t) {
                        const std::size_t idx = (n * c_ + ch) * l_ + t;
                        y[idx] = gamma[ch] * (x[idx] - buffers[ch]) * inv + beta[ch];
                    }
            }
        }
    }

    void backward(const Real* params, const std::vector<Real>& dy, std::size_t batch,
                  std::vector<Real>& dx, Real* dparams) override {
        if (!training_)
            throw std::logic_error("batchnorm backward requires a training-mode forward");
        const Real* gamma = params;
        Real* dgamma = dparams;
        Real* dbeta = dparams + c_;
        dx.resize(dy.size());
        const double m = static_cast<double>(batch * l_);
        for (std::size_t ch = 0; ch < c_; ++ch) {
            const double inv = 1.0 / std::sqrt(static_cast<double>(var_[ch]) + kEps);
            double sum_dy = 0.0, sum_dy_xhat = 0.0;
            for (std::size_t n = 0; n < batch; ++n)
                for (std::size_t t = 0; t < l_; ++t) {
                    const std::size_t idx = (n * c_ + ch) * l_ + t;
                    sum_dy += dy[idx];
                    sum_dy_xhat += static_cast<double>(dy[idx]) * xhat_[idx];
                }
            dgamma[ch] += static_cast<Real>(sum_dy_xhat);
            dbeta[ch] += static_cast<Real>(sum_dy);
            const double g = gamma[ch];
            for (std::size_t n = 0; n < batch; ++n)
                for (std::size_t t = 0; t < l_; ++t) {
                    const std::size_t idx = (n * c_ + ch) * l_ + t;
                    const double d = m * dy[idx] - sum_dy - xhat_[idx] * sum_dy_xhat;
                    dx[idx] = static_cast<Real>(g * inv * d / m);
                }
        }
    }

    static constexpr double kEps = 1e-5;

private:
    std::size_t c_, l_;
    bool training_ = false;
    std::vector<Real> mean_, var_, xhat_;
};

// ---------------------------------------------------------------------------

template <typename Real>
class ReLU final : public Layer<Real> {
public:
    explicit ReLU(std::size_t size) : size_(size) {}
    std::string name() const override { return "relu"; }
    std::size_t in_size() const override { return size_; }
    std::size_t out_size() const override { return size_; }

    void forward(const Real*, Real*, const std::vector<Real>& x, std::size_t, std::vector<Real>& y,
                 bool) override {
        y.resize(x.size());
        mask_.resize(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            mask_[i] = x[i] > Real(0);
            y[i] = mask_[i] ? x[i] : Real(0);
        }
    }

    void backward(const Real*, const std::vector<Real>& dy, std::size_t, std::vector<Real>& dx,
                  Real*) override {
        dx.resize(dy.size());
        for (std::size_t i = 0; i < dy.size(); ++i) dx[i] = mask_[i] ? dy[i] : Real(0);
    }

private:
    std::size_t size_;
    std::vector<char> mask_;
};

// Max pool, kernel 2 stride 2; odd trailing element dropped. Ties route the
// gradient to the lowest index.
template <typename Real>
class MaxPool2 final : public Layer<Real> {
public:
    MaxPool2(std::size_t channels, std::size_t in_len) : c_(channels), in_len_(in_len) {
        out_len_ = in_len / 2;
        if (out_len_ == 0) throw std::invalid_argument("maxpool2: input too short");
    }
    std::string name() const override { return "maxpool2"; }
    std::size_t in_size() const override { return c_ * in_len_; }
    std::size_t out_size() const override { return c_ * out_len_; }
    std::size_t out_length() const { return out_len_; }

    void forward(const Real*, Real*, const std::vector<Real>& x, std::size_t batch,
                 std::vector<Real>& y, bool) override {
        y.resize(batch * c_ * out_len_);
        argmax_.resize(y.size());
        for (std::size_t n = 0; n < batch; ++n)
            for (std::size_t ch = 0; ch < c_; ++ch) {
                const Real* xi = x.data() + (n * c_ + ch) * in_len_;
                const std::size_t base = (n * c_ + ch) * out_len_;
                for (std::size_t j = 0; j < out_len_; ++j) {
                    const std::size_t a = 2 * j;
                    // strict > keeps the lowest index on ties
                    const std::size_t pick = xi[a + 1] > xi[a] ? a + 1 : a;
                    y[base + j] = xi[pick];
                    argmax_[base + j] = static_cast<std::uint32_t>(pick);
                }
            }
    }

    void backward(const Real*, const std::vector<Real>& dy, std::size_t batch,
                  std::vector<Real>& dx, Real*) override {
        dx.assign(batch * c_ * in_len_, Real(0));
        for (std::size_t n = 0; n < batch; ++n)
            for (std::size_t ch = 0; ch < c_; ++ch) {
                const std::size_t base = (n * c_ + ch) * out_len_;
                Real* dxi = dx.data() + (n * c_ + ch) * in_len_;
                for (std::size_t j = 0; j < out_len_; ++j)
                    dxi[argmax_[base + j]] += dy[base + j];
            }
    }

private:
    std::size_t c_, in_len_, out_len_;
    std::vector<std::uint32_t> argmax_;
};

// ---------------------------------------------------------------------------

template <typename Real>
class Dense final : public Layer<Real> {
public:
    Dense(std::size_t in, std::size_t out) : in_(in), out_(out) {}
    std::string name() const override { return "dense"; }
    std::size_t param_count() const override { return out_ * in_ + out_; }
    std::size_t in_size() const override { return in_; }
    std::size_t out_size() const override { return out_; }

    void init_params(Real* p, SplitMix64& rng) override {
        const double std = std::sqrt(2.0 / static_cast<double>(in_));
        for (std::size_t i = 0; i < out_ * in_; ++i)
            p[i] = static_cast<Real>(normal_sample(rng) * std);
        for (std::size_t i = 0; i < out_; ++i) p[out_ * in_ + i] = Real(0);
    }

    void forward(const Real* params, Real*, const std::vector<Real>& x, std::size_t batch,
                 std::vector<Real>& y, bool) override {
        x_ = x;
        const Real* w = params;
        const Real* b = params + out_ * in_;
        y.resize(batch * out_);
        for (std::size_t n = 0; n < batch; ++n)
            for (std::size_t o = 0; o < out_; ++o) {
                Real acc = b[o];
                const Real* wo = w + o * in_;
                const Real* xn = x.data() + n * in_;
                for (std::size_t i = 0; i < in_; ++i) acc += wo[i] * xn[i];
                y[n * out_ + o] = acc;
            }
    }

    void backward(const Real* params, const std::vector<Real>& dy, std::size_t batch,
                  std::vector<Real>& dx, Real* dparams) override {
        const Real* w = params;
        Real* dw = dparams;
        Real* db = dparams + out_ * in_;
        dx.assign(batch * in_, Real(0));
        for (std::size_t n = 0; n < batch; ++n) {
            const Real* xn = x_.data() + n * in_;
            Real* dxn = dx.data() + n * in_;
            for (std::size_t o = 0; o < out_; ++o) {
                const Real g = dy[n * out_ + o];
                db[o] += g;
                const Real* wo = w + o * in_;
                Real* dwo = dw + o * in_;
                for (std::size_t i = 0; i < in_; ++i) {
                    dwo[i] += g * xn[i];
                    dxn[i] += g * wo[i];
                }
            }
        }
    }

private:
    std::size_t in_, out_;
    std::vector<Real> x_;
};

// ---------------------------------------------------------------------------
// Model: an ordered layer stack over one flat parameter vector (plus a flat
// buffer vector for batch-norm running statistics).

template <typename Real>
class Model {
public:
    void add(std::unique_ptr<Layer<Real>> layer) {
        if (!layers_.empty() && layers_.back()->out_size() != layer->in_size())
            throw std::invalid_argument("layer size mismatch: " + layers_.back()->name() +
                                        " -> " + layer->name());
        layers_.push_back(std::move(layer));
    }

    void finalize(std::uint64_t seed) {
        param_offsets_.clear();
        buffer_offsets_.clear();
        std::size_t p = 0, b = 0;
        for (const auto& l : layers_) {
            param_offsets_.push_back(p);
            buffer_offsets_.push_back(b);
            p += l->param_count();
            b += l->buffer_count();
        }
        params_.assign(p, Real(0));
        buffers_.assign(b, Real(0));
        SplitMix64 rng(seed);
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            layers_[i]->init_params(params_.data() + param_offsets_[i], rng);
            layers_[i]->init_buffers(buffers_.data() + buffer_offsets_[i]);
        }
    }

    std::size_t param_count() const { return params_.size(); }
    std::vector<Real>& params() { return params_; }
    const std::vector<Real>& params() const { return params_; }
    std::vector<Real>& buffers() { return buffers_; }
    const std::vector<Real>& buffers() const { return buffers_; }
    std::size_t input_size() const { return layers_.front()->in_size(); }
    std::size_t output_size() const { return layers_.back()->out_size(); }

    std::vector<Real> forward(const std::vector<Real>& x, std::size_t batch, bool training) {
        if (x.size() != batch * input_size())
            throw std::invalid_argument("forward: input size mismatch");
        std::vector<Real> cur = x, next;
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            layers_[i]->forward(params_.data() + param_offsets_[i],
                                buffers_.data() + buffer_offsets_[i], cur, batch, next, training);
            cur.swap(next);
        }
        return cur;
    }

    // Gradient of whatever loss produced dlogits; requires a preceding
    // training-mode forward on the same batch.
    std::vector<Real> backward(const std::vector<Real>& dlogits, std::size_t batch) {
        std::vector<Real> grads(params_.size(), Real(0));
        std::vector<Real> cur = dlogits, next;
        for (std::size_t i = layers_.size(); i-- > 0;) {
            layers_[i]->backward(params_.data() + param_offsets_[i], cur, batch, next,
                                 grads.data() + param_offsets_[i]);
            cur.swap(next);
        }
        return grads;
    }

private:
    std::vector<std::unique_ptr<Layer<Real>>> layers_;
    std::vector<Real> params_, buffers_;
    std::vector<std::size_t> param_offsets_, buffer_offsets_;
};

// ---------------------------------------------------------------------------
// WDCNN.

struct WdcnnConfig {
    std::size_t input_length = 2048;
    std::size_t num_outputs = 3;
    std::uint64_t seed = 0;
};

// Wide-first-kernel stack: Conv(64, stride 16, 16f, pad 24) then four
// Conv(3) blocks, each Conv -> BN -> ReLU -> MaxPool2, then
// Dense(100) -> BN -> ReLU -> Dense(num_outputs).
// Totals ~53.8K parameters for input 2048 and ~41.0K for input 1024.
template <typename Real = float>
Model<Real> build_wdcnn(const WdcnnConfig& config) {
    struct ConvSpec {
        std::size_t out_ch, kernel, stride, pad;
    };
    static constexpr std::array<ConvSpec, 5> kStack{{
        {16, 64, 16, 24},
        {32, 3, 1, 1},
        {64, 3, 1, 1},
        {64, 3, 1, 1},
        {64, 3, 1, 0},
    }};

    Model<Real> model;
    std::size_t ch = 1, len = config.input_length;
    for (const auto& spec : kStack) {
        if (len + 2 * spec.pad < spec.kernel || (len + 2 * spec.pad - spec.kernel) / spec.stride + 1 < 2)
            throw std::invalid_argument(
                "build_wdcnn: input length " + std::to_string(config.input_length) +
                " does not survive the conv/pool chain");
        auto conv = std::make_unique<Conv1d<Real>>(ch, len, spec.out_ch, spec.kernel, spec.stride,
                                                   spec.pad);
        ch = spec.out_ch;
        len = conv->out_length();
        model.add(std::move(conv));
        model.add(std::make_unique<BatchNorm1d<Real>>(ch, len));
        model.add(std::make_unique<ReLU<Real>>(ch * len));
        auto pool = std::make_unique<MaxPool2<Real>>(ch, len);
        len = pool->out_length();
        model.add(std::move(pool));
    }
    model.add(std::make_unique<Dense<Real>>(ch * len, 100));
    model.add(std::make_unique<BatchNorm1d<Real>>(100, 1));
    model.add(std::make_unique<ReLU<Real>>(100));
    model.add(std::make_unique<Dense<Real>>(100, config.num_outputs));
    model.finalize(config.seed);
    return model;
}

// ---------------------------------------------------------------------------
// Binary cross-entropy with logits, mean over batch x labels, accumulated in
// double and evaluated in the stable max(z,0) - z*y + log1p(exp(-|z|)) form.

template <typename Real>
double bce_with_logits(const std::vector<Real>& logits,
                       const std::vector<std::uint8_t>& labels) {
    if (logits.size() != labels.size())
        throw std::invalid_argument("bce_with_logits: shape mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        const double z = logits[i];
        const double y = labels[i];
        sum += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
    }
    return sum / static_cast<double>(logits.size());
}

// d(mean BCE)/dz = (sigmoid(z) - y) / n
template <typename Real>
std::vector<Real> bce_with_logits_grad(const std::vector<Real>& logits,
                                       const std::vector<std::uint8_t>& labels) {
    std::vector<Real> dz(logits.size());
    const double n = static_cast<double>(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) {
        const double z = logits[i];
        const double s = 1.0 / (1.0 + std::exp(-z));
        dz[i] = static_cast<Real>((s - static_cast<double>(labels[i])) / n);
    }
    return dz;
}

// ---------------------------------------------------------------------------
// Adam with bias correction; constant learning rate.

template <typename Real>
struct AdamState {
    std::vector<Real> m, v;
    long t = 0;

    explicit AdamState(std::size_t n) : m(n, Real(0)), v(n, Real(0)) {}
};

inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEps = 1e-8;

template <typename Real>
void adam_step(std::vector<Real>& params, const std::vector<Real>& grads, AdamState<Real>& state,
               double lr) {
    if (params.size() != grads.size() || params.size() != state.m.size())
        throw std::invalid_argument("adam_step: dimension mismatch");
    for (const Real g : grads)
        if (!std::isfinite(static_cast<double>(g)))
            throw std::runtime_error("adam_step: non-finite gradient");
    state.t += 1;
    const double bc1 = 1.0 - std::pow(kAdamBeta1, state.t);
    const double bc2 = 1.0 - std::pow(kAdamBeta2, state.t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        const double m = kAdamBeta1 * state.m[i] + (1.0 - kAdamBeta1) * g;
        const double v = kAdamBeta2 * state.v[i] + (1.0 - kAdamBeta2) * g * g;
        state.m[i] = static_cast<Real>(m);
        state.v[i] = static_cast<Real>(v);
        const double mhat = m / bc1;
        const double vhat = v / bc2;
        params[i] = static_cast<Real>(params[i] - lr * mhat / (std::sqrt(vhat) + kAdamEps));
    }
}

}  // namespace cwru::nn

#endif  // CWRU_NN_HPP
