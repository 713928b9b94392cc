#ifndef CWRU_TRAINING_HPP
#define CWRU_TRAINING_HPP

// WDCNN training loop: seeded shuffles, Adam, optional best-epoch
// checkpointing on validation macro-AUROC, and checkpoint file I/O.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "cwru/container.hpp"
#include "cwru/eval.hpp"
#include "cwru/features.hpp"
#include "cwru/nn.hpp"
#include "cwru/prng.hpp"

namespace cwru::nn {

struct HyperParams {
    int batch_size = 32;
    double learning_rate = 1e-3;
    int max_epochs = 10;
};

struct TrainingLogEntry {
    int epoch = 0;            // 1-based
    double loss = 0.0;        // mean BCE over the epoch
    double val_metric = 0.0;  // validation macro-AUROC; 0 when no validation
};

struct TrainedModel {
    Model<float> model;
    WdcnnConfig config;
    HyperParams hyper;
    dsp::ZScoreStats norm_stats;
    std::uint64_t seed = 0;
    int best_epoch = 0;  // checkpointed epoch (1-based); max_epochs if no validation
    std::vector<TrainingLogEntry> log;
};

// Macro-average AUROC over the six detectors, skipping any that are
// single-class in this set.
template <typename Real>
double macro_auroc(Model<Real>& model, const dsp::FeatureSet& features) {
    auto scored = eval::evaluate_scored(eval::score(model, features));
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& a : scored.auroc)
        if (a) {
            sum += *a;
            ++n;
        }
    if (n == 0) throw std::runtime_error("macro_auroc: no detector has both classes");
    return sum / static_cast<double>(n);
}

// Deterministic single-threaded training. With a validation set, keeps the
// parameters of the epoch with the highest validation macro-AUROC; without
// one, trains exactly hyper.max_epochs epochs (the tuned count).
inline TrainedModel train(const dsp::FeatureSet& features, const HyperParams& hyper,
                          std::uint64_t seed, const dsp::FeatureSet* validation = nullptr) {
    if (features.size() == 0) throw std::invalid_argument("train: empty feature set");
    if (features.dims.size() != 1)
        throw std::invalid_argument("train: WDCNN takes 1-D representations only");

    TrainedModel tm;
    tm.config = WdcnnConfig{features.input_length(), 3, seed};
    tm.hyper = hyper;
    tm.norm_stats = features.norm_stats;
    tm.seed = seed;
    tm.model = build_wdcnn<float>(tm.config);

    AdamState<float> opt(tm.model.param_count());
    SplitMix64 shuffle_rng(SplitMix64(seed).next() ^ 0x5348554646ull);  // independent stream

    std::vector<std::size_t> order(features.size());
    std::iota(order.begin(), order.end(), 0);
    const std::size_t len = features.input_length();
    const std::size_t bs = static_cast<std::size_t>(hyper.batch_size);

    double best_metric = -1.0;
    std::vector<float> best_params, best_buffers;

    for (int epoch = 1; epoch <= hyper.max_epochs; ++epoch) {
        seeded_shuffle(order, shuffle_rng);
        double loss_sum = 0.0;
        std::size_t seen = 0;
        for (std::size_t start = 0; start < order.size(); start += bs) {
            const std::size_t batch = std::min(bs, order.size() - start);
            std::vector<float> x(batch * len);
            std::vector<std::uint8_t> y(batch * 3);
            for (std::size_t i = 0; i < batch; ++i) {
                const std::size_t idx = order[start + i];
                std::copy(features.inputs[idx].begin(), features.inputs[idx].end(),
                          x.begin() + static_cast<std::ptrdiff_t>(i * len));
                for (std::size_t k = 0; k < 3; ++k) y[i * 3 + k] = features.labels[idx][k];
            }
            const auto logits = tm.model.forward(x, batch, /*training=*/true);
            loss_sum += bce_with_logits(logits, y) * static_cast<double>(batch);
            seen += batch;
            const auto dlogits = bce_with_logits_grad(logits, y);
            const auto grads = tm.model.backward(dlogits, batch);
            adam_step(tm.model.params(), grads, opt, hyper.learning_rate);
        }
        TrainingLogEntry entry;
        entry.epoch = epoch;
        entry.loss = loss_sum / static_cast<double>(seen);
        if (validation) {
            entry.val_metric = macro_auroc(tm.model, *validation);
            if (entry.val_metric > best_metric) {
                best_metric = entry.val_metric;
                best_params = tm.model.params();
                best_buffers = tm.model.buffers();
                tm.best_epoch = epoch;
            }
        }
        tm.log.push_back(entry);
    }

    if (validation) {
        tm.model.params() = best_params;
        tm.model.buffers() = best_buffers;
    } else {
        tm.best_epoch = hyper.max_epochs;
    }
    for (float p : tm.model.params())
        if (!std::isfinite(static_cast<double>(p)))
            throw std::runtime_error("train: non-finite parameter after optimization");
    return tm;
}

// ---------------------------------------------------------------------------
// Checkpoint: JSON header + float32 parameter block, then buffer block.

inline void save_checkpoint(const std::filesystem::path& path, const TrainedModel& tm) {
    nlohmann::json h;
    h["kind"] = "wdcnn-checkpoint";
    h["input_length"] = tm.config.input_length;
    h["num_outputs"] = tm.config.num_outputs;
    h["seed"] = tm.seed;
    h["batch_size"] = tm.hyper.batch_size;
    h["learning_rate"] = tm.hyper.learning_rate;
    h["max_epochs"] = tm.hyper.max_epochs;
    h["best_epoch"] = tm.best_epoch;
    h["norm_mean"] = tm.norm_stats.mean;
    h["norm_std"] = tm.norm_stats.std;
    h["param_count"] = tm.model.param_count();
    h["buffer_count"] = tm.model.buffers().size();
    std::vector<float> payload = tm.model.params();
    payload.insert(payload.end(), tm.model.buffers().begin(), tm.model.buffers().end());
    container::write_file(path, h, payload);
}

inline TrainedModel load_checkpoint(const std::filesystem::path& path) {
    auto fp = container::read_file(path);
    if (fp.header.value("kind", "") != "wdcnn-checkpoint")
        throw std::runtime_error("not a checkpoint file: " + path.string());
    TrainedModel tm;
    tm.config.input_length = fp.header.at("input_length").get<std::size_t>();
    tm.config.num_outputs = fp.header.at("num_outputs").get<std::size_t>();
    tm.config.seed = fp.header.at("seed").get<std::uint64_t>();
    tm.seed = tm.config.seed;
    tm.hyper.batch_size = fp.header.at("batch_size").get<int>();
    tm.hyper.learning_rate = fp.header.at("learning_rate").get<double>();
    tm.hyper.max_epochs = fp.header.at("max_epochs").get<int>();
    tm.best_epoch = fp.header.at("best_epoch").get<int>();
    tm.norm_stats.mean = fp.header.at("norm_mean").get<double>();
    tm.norm_stats.std = fp.header.at("norm_std").get<double>();
    tm.model = build_wdcnn<float>(tm.config);
    const std::size_t np = fp.header.at("param_count").get<std::size_t>();
    const std::size_t nb = fp.header.at("buffer_count").get<std::size_t>();
    if (np != tm.model.param_count() || nb != tm.model.buffers().size() ||
        fp.payload.size() != np + nb)
        throw std::runtime_error("checkpoint size mismatch: " + path.string());
    std::copy(fp.payload.begin(), fp.payload.begin() + static_cast<std::ptrdiff_t>(np),
              tm.model.params().begin());
    std::copy(fp.payload.begin() + static_cast<std::ptrdiff_t>(np), fp.payload.end(),
              tm.model.buffers().begin());
    return tm;
}

}  // namespace cwru::nn

#endif  // CWRU_TRAINING_HPP
