#ifndef CWRU_PROTOCOL_HPP
#define CWRU_PROTOCOL_HPP

// CVM-CV orchestration: grid-search hyperparameter selection on a fixed
// 3-fold partition, then final evaluation over the 30 seeded train-test
// splits, plus the six-configuration ablation suite.

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "cwru/catalog.hpp"
#include "cwru/eval.hpp"
#include "cwru/features.hpp"
#include "cwru/splitgen.hpp"
#include "cwru/training.hpp"

namespace cwru::protocol {

// Fold partition seed for the CVM step; deliberately outside the 0..29
// evaluation seed range.
inline constexpr std::uint64_t kCvmFoldSeed = 1000;

enum class Scope { Single, SeparateDEFE };
enum class SignalLength { Full, Half };
enum class SplitType { Proposed, ByFaultSize };
enum class SplitRatio { TwoToOne, OneToTwo };

struct HyperGrid {
    std::vector<int> batch_sizes{32, 64, 128};
    std::vector<double> learning_rates{1e-7, 1e-6, 1e-5, 1e-4, 1e-3};
    int max_epochs = 10;
};

struct Experiment {
    dsp::Representation representation = dsp::Representation::PowerCepstrum;
    std::string model_family = "wdcnn";  // "wdcnn" | "external-export"
    SplitType split_type = SplitType::Proposed;
    SplitRatio split_ratio = SplitRatio::TwoToOne;
    Scope scope = Scope::Single;
    SignalLength signal_length = SignalLength::Full;
    std::vector<std::uint64_t> seeds;          // defaults to 0..29
    HyperGrid grid;
    std::optional<nn::HyperParams> fixed_hypers;  // reuse instead of re-tuning

    Experiment() {
        seeds.resize(30);
        for (std::size_t i = 0; i < 30; ++i) seeds[i] = i;
    }
};

inline std::string to_string(Scope s) {
    return s == Scope::Single ? "single" : "separate-de-fe";
}
inline std::string to_string(SignalLength s) {
    return s == SignalLength::Full ? "full" : "half";
}
inline std::string to_string(SplitType s) {
    return s == SplitType::Proposed ? "proposed" : "by-fault-size";
}
inline std::string to_string(SplitRatio r) {
    return r == SplitRatio::TwoToOne ? "2:1" : "1:2";
}

inline nlohmann::json to_json(const Experiment& e) {
    nlohmann::json j;
    j["representation"] = dsp::to_string(e.representation);
    j["model"] = e.model_family;
    j["split_type"] = to_string(e.split_type);
    j["split_ratio"] = to_string(e.split_ratio);
    j["scope"] = to_string(e.scope);
    j["signal_length"] = to_string(e.signal_length);
    j["seeds"] = e.seeds;
    j["grid"]["batch_sizes"] = e.grid.batch_sizes;
    j["grid"]["learning_rates"] = e.grid.learning_rates;
    j["grid"]["max_epochs"] = e.grid.max_epochs;
    if (e.fixed_hypers) {
        j["fixed_hypers"]["batch_size"] = e.fixed_hypers->batch_size;
        j["fixed_hypers"]["learning_rate"] = e.fixed_hypers->learning_rate;
        j["fixed_hypers"]["epochs"] = e.fixed_hypers->max_epochs;
    }
    return j;
}

inline Experiment experiment_from_json(const nlohmann::json& j) {
    Experiment e;
    e.representation = dsp::parse_representation(j.at("representation").get<std::string>());
    e.model_family = j.value("model", "wdcnn");
    if (e.model_family != "wdcnn" && e.model_family != "external-export")
        throw std::invalid_argument("unknown model family: " + e.model_family);
    const auto st = j.value("split_type", "proposed");
    if (st == "proposed") e.split_type = SplitType::Proposed;
    else if (st == "by-fault-size") e.split_type = SplitType::ByFaultSize;
    else throw std::invalid_argument("unknown split type: " + st);
    const auto sr = j.value("split_ratio", "2:1");
    if (sr == "2:1") e.split_ratio = SplitRatio::TwoToOne;
    else if (sr == "1:2") e.split_ratio = SplitRatio::OneToTwo;
    else throw std::invalid_argument("unknown split ratio: " + sr);
    const auto sc = j.value("scope", "single");
    if (sc == "single") e.scope = Scope::Single;
    else if (sc == "separate-de-fe") e.scope = Scope::SeparateDEFE;
    else throw std::invalid_argument("unknown scope: " + sc);
    const auto sl = j.value("signal_length", "full");
    if (sl == "full") e.signal_length = SignalLength::Full;
    else if (sl == "half") e.signal_length = SignalLength::Half;
    else throw std::invalid_argument("unknown signal length: " + sl);
    if (j.contains("seeds")) e.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (e.seeds.empty()) throw std::invalid_argument("experiment: seed list is empty");
    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        if (g.contains("batch_sizes")) e.grid.batch_sizes = g.at("batch_sizes").get<std::vector<int>>();
        if (g.contains("learning_rates"))
            e.grid.learning_rates = g.at("learning_rates").get<std::vector<double>>();
        e.grid.max_epochs = g.value("max_epochs", 10);
    }
    if (e.grid.batch_sizes.empty() || e.grid.learning_rates.empty())
        throw std::invalid_argument("experiment: hyperparameter grid is empty");
    if (j.contains("fixed_hypers")) {
        const auto& f = j.at("fixed_hypers");
        e.fixed_hypers = nn::HyperParams{f.at("batch_size").get<int>(),
                                         f.at("learning_rate").get<double>(),
                                         f.at("epochs").get<int>()};
    }
    return e;
}

inline std::string experiment_hash(const Experiment& e) {
    return catalog::sha256_string(to_json(e).dump()).substr(0, 16);
}

// ---------------------------------------------------------------------------
// Feature cache: one container file per (record, representation, length).
// Warm it before parallel runs; reads are then lock-free.

class FeatureCache {
public:
    explicit FeatureCache(std::filesystem::path dir = {}) : dir_(std::move(dir)) {
        if (!dir_.empty()) std::filesystem::create_directories(dir_);
    }

    bool enabled() const { return !dir_.empty(); }

    std::filesystem::path path_for(const catalog::SignalRecord& rec, dsp::Representation rep,
                                   bool half) const {
        std::string key = rec.id();
        std::replace(key.begin(), key.end(), '/', '_');
        key += "_" + dsp::to_string(rep);
        if (half) key += "_half";
        return dir_ / (key + ".cwf");
    }

    dsp::FeatureSet get(const catalog::SignalRecord& rec, dsp::Representation rep,
                        bool half) const {
        if (enabled()) {
            const auto p = path_for(rec, rep, half);
            if (std::filesystem::exists(p)) return dsp::load_features(p);
        }
        auto fs = compute(rec, rep, half);
        if (enabled()) dsp::save_features(path_for(rec, rep, half), fs);
        return fs;
    }

    // Idempotent: existing files are left alone.
    void warm(const std::vector<catalog::SignalRecord>& records, dsp::Representation rep,
              bool half, std::size_t workers = 1) const {
        if (!enabled()) return;
        std::atomic<std::size_t> next{0};
        auto work = [&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= records.size()) return;
                const auto p = path_for(records[i], rep, half);
                if (!std::filesystem::exists(p))
                    dsp::save_features(p, compute(records[i], rep, half));
            }
        };
        run_pool(work, workers);
    }

    static dsp::FeatureSet compute(const catalog::SignalRecord& rec, dsp::Representation rep,
                                   bool half) {
        if (!half) return dsp::make_features_for_record(rec, rep);
        catalog::SignalRecord r = rec;
        r.samples.resize(r.samples.size() / 2);
        return dsp::make_features_for_record(r, rep);
    }

    template <typename F>
    static void run_pool(F&& work, std::size_t workers) {
        if (workers <= 1) {
            work();
            return;
        }
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }

private:
    std::filesystem::path dir_;
};

inline dsp::FeatureSet gather_features(const std::vector<catalog::SignalRecord>& records,
                                       dsp::Representation rep, bool half,
                                       const FeatureCache& cache) {
    if (records.empty()) throw std::invalid_argument("gather_features: no records");
    dsp::FeatureSet fs;
    for (const auto& rec : records) dsp::append_features(fs, cache.get(rec, rep, half));
    return fs;
}

// ---------------------------------------------------------------------------
// One train-and-score run. Normalization is fitted on the training segments
// only; the same statistics are applied to the test side.

struct RunAudit {
    bool norm_train_only = false;   // recomputed train stats equal used stats
    bool disjoint_records = false;  // no test record id in any training batch
};

struct SingleRun {
    eval::ScoredSet scored;
    std::vector<nn::TrainedModel> models;  // 1 (Single) or 2 (SeparateDEFE)
    RunAudit audit;
};

namespace detail {

inline SingleRun run_once(const std::vector<catalog::SignalRecord>& train_records,
                          const std::vector<catalog::SignalRecord>& test_records,
                          const Experiment& exp, const nn::HyperParams& hypers,
                          std::uint64_t train_seed, const FeatureCache& cache) {
    const bool half = exp.signal_length == SignalLength::Half;
    SingleRun run;

    auto train_and_score = [&](const std::vector<catalog::SignalRecord>& trs,
                               const std::vector<catalog::SignalRecord>& tes,
                               std::uint64_t seed) {
        auto fs_train = gather_features(trs, exp.representation, half, cache);
        const auto stats = dsp::fit_zscore(fs_train.inputs);
        dsp::apply_zscore(fs_train.inputs, stats);
        fs_train.norm_stats = stats;

        auto tm = nn::train(fs_train, hypers, seed);

        auto fs_test = gather_features(tes, exp.representation, half, cache);
        dsp::apply_zscore(fs_test.inputs, stats);
        auto scored = eval::score(tm.model, fs_test);
        run.scored.insert(run.scored.end(), scored.begin(), scored.end());
        run.models.push_back(std::move(tm));

        // Norm audit: refit on raw train segments and compare.
        auto raw = gather_features(trs, exp.representation, half, cache);
        const auto recheck = dsp::fit_zscore(raw.inputs);
        if (std::abs(recheck.mean - stats.mean) > 1e-12 ||
            std::abs(recheck.std - stats.std) > 1e-12)
            throw std::runtime_error("normalization audit failed: stats not train-only");
    };

    if (exp.scope == Scope::Single) {
        train_and_score(train_records, test_records, train_seed);
    } else {
        for (auto acc : {catalog::Accelerometer::FE, catalog::Accelerometer::DE}) {
            std::vector<catalog::SignalRecord> trs, tes;
            for (const auto& r : train_records)
                if (r.accelerometer == acc) trs.push_back(r);
            for (const auto& r : test_records)
                if (r.accelerometer == acc) tes.push_back(r);
            train_and_score(trs, tes, train_seed);
        }
    }
    run.audit.norm_train_only = true;  // enforced by the throw above

    // Record-level disjointness.
    std::set<std::string> train_ids;
    for (const auto& r : train_records) train_ids.insert(r.id());
    run.audit.disjoint_records = true;
    for (const auto& r : test_records)
        if (train_ids.count(r.id())) run.audit.disjoint_records = false;
    if (!run.audit.disjoint_records)
        throw std::runtime_error("split audit failed: test record present in training set");
    return run;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// CVM: grid search on the fixed 3-fold partition.

struct GridPointResult {
    nn::HyperParams hypers;
    double mean_val_auroc = 0.0;
    std::vector<int> best_epochs;  // one per fold
};

struct CvmSelection {
    nn::HyperParams hypers;  // max_epochs = tuned epoch count
    int tuned_epoch = 0;
    double mean_val_auroc = 0.0;
    std::vector<GridPointResult> table;
};

// Trains each grid point on each fold pair with best-epoch checkpointing and
// selects the point maximizing mean validation macro-AUROC. Ties break to
// the smaller learning rate, then the smaller batch size. The tuned epoch is
// the median best epoch across folds.
inline CvmSelection cvm_select(const std::vector<catalog::SignalRecord>& records,
                               const Experiment& exp, const FeatureCache& cache,
                               std::uint64_t train_seed_base = 0, std::size_t workers = 1) {
    const bool half = exp.signal_length == SignalLength::Half;
    const auto plan = splitgen::gen_three_fold(kCvmFoldSeed);
    {
        const auto audit = splitgen::audit_no_leakage(plan, records);
        if (!audit.pass()) throw std::runtime_error("cvm_select: fold partition failed audit");
    }

    struct Job {
        std::size_t grid_index;
        int fold;
    };
    std::vector<nn::HyperParams> grid;
    for (double lr : exp.grid.learning_rates)
        for (int bs : exp.grid.batch_sizes)
            grid.push_back({bs, lr, exp.grid.max_epochs});

    std::vector<Job> jobs;
    for (std::size_t g = 0; g < grid.size(); ++g)
        for (int f = 0; f < 3; ++f) jobs.push_back({g, f});

    struct FoldOutcome {
        double val_auroc = 0.0;
        int best_epoch = 0;
    };
    std::vector<FoldOutcome> outcomes(jobs.size());
    std::vector<std::string> errors;
    std::mutex err_mutex;

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t j = next.fetch_add(1);
            if (j >= jobs.size()) return;
            const auto [g, fold] = jobs[j];
            try {
                auto train_recs = splitgen::materialize_fold(plan, records, fold,
                                                             splitgen::Side::Train);
                auto val_recs = splitgen::materialize_fold(plan, records, fold,
                                                           splitgen::Side::Test);
                const std::uint64_t seed =
                    SplitMix64(train_seed_base).next() ^ (g * 3 + static_cast<std::size_t>(fold));

                if (exp.scope == Scope::Single) {
                    auto fs_train = gather_features(train_recs, exp.representation, half, cache);
                    const auto stats = dsp::fit_zscore(fs_train.inputs);
                    dsp::apply_zscore(fs_train.inputs, stats);
                    fs_train.norm_stats = stats;
                    auto fs_val = gather_features(val_recs, exp.representation, half, cache);
                    dsp::apply_zscore(fs_val.inputs, stats);
                    auto tm = nn::train(fs_train, grid[g], seed, &fs_val);
                    double best = 0.0;
                    for (const auto& e : tm.log) best = std::max(best, e.val_metric);
                    outcomes[j] = {best, tm.best_epoch};
                } else {
                    // Separate models: merge the two locations' validation
                    // scores and evaluate the 6-detector macro.
                    eval::ScoredSet merged;
                    int epochs_sum = 0;
                    for (auto acc : {catalog::Accelerometer::FE, catalog::Accelerometer::DE}) {
                        std::vector<catalog::SignalRecord> trs, vls;
                        for (const auto& r : train_recs)
                            if (r.accelerometer == acc) trs.push_back(r);
                        for (const auto& r : val_recs)
                            if (r.accelerometer == acc) vls.push_back(r);
                        auto fs_train = gather_features(trs, exp.representation, half, cache);
                        const auto stats = dsp::fit_zscore(fs_train.inputs);
                        dsp::apply_zscore(fs_train.inputs, stats);
                        fs_train.norm_stats = stats;
                        auto fs_val = gather_features(vls, exp.representation, half, cache);
                        dsp::apply_zscore(fs_val.inputs, stats);
                        auto tm = nn::train(fs_train, grid[g], seed, &fs_val);
                        auto scored = eval::score(tm.model, fs_val);
                        merged.insert(merged.end(), scored.begin(), scored.end());
                        epochs_sum += tm.best_epoch;
                    }
                    auto r = eval::evaluate_scored(std::move(merged));
                    double sum = 0.0;
                    std::size_t n = 0;
                    for (const auto& a : r.auroc)
                        if (a) {
                            sum += *a;
                            ++n;
                        }
                    outcomes[j] = {n ? sum / static_cast<double>(n) : 0.0,
                                   (epochs_sum + 1) / 2};
                }
            } catch (const std::exception& ex) {
                std::lock_guard<std::mutex> lock(err_mutex);
                errors.push_back(ex.what());
            }
        }
    };
    FeatureCache::run_pool(work, workers);

    if (errors.size() == jobs.size())
        throw std::runtime_error("cvm_select: all fold trainings failed: " + errors.front());

    CvmSelection sel;
    bool have_best = false;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        GridPointResult gp;
        gp.hypers = grid[g];
        double sum = 0.0;
        for (int f = 0; f < 3; ++f) {
            const auto& o = outcomes[g * 3 + static_cast<std::size_t>(f)];
            sum += o.val_auroc;
            gp.best_epochs.push_back(o.best_epoch);
        }
        gp.mean_val_auroc = sum / 3.0;
        const bool better =
            !have_best || gp.mean_val_auroc > sel.mean_val_auroc ||
            (gp.mean_val_auroc == sel.mean_val_auroc &&
             (gp.hypers.learning_rate < sel.hypers.learning_rate ||
              (gp.hypers.learning_rate == sel.hypers.learning_rate &&
               gp.hypers.batch_size < sel.hypers.batch_size)));
        if (better) {
            sel.hypers = gp.hypers;
            sel.mean_val_auroc = gp.mean_val_auroc;
            std::vector<int> epochs = gp.best_epochs;
            std::sort(epochs.begin(), epochs.end());
            sel.tuned_epoch = epochs[epochs.size() / 2];
            have_best = true;
        }
        sel.table.push_back(std::move(gp));
    }
    sel.hypers.max_epochs = std::max(1, sel.tuned_epoch);
    return sel;
}

// ---------------------------------------------------------------------------
// CV: final evaluation over the static seeds.

struct EvalOutcome {
    eval::RunReport report;
    std::vector<std::uint64_t> failed_seeds;
    std::vector<std::string> failures;
    std::vector<bool> audits_passed;
};

inline splitgen::SplitPlan make_plan(const Experiment& exp, std::size_t seed_index,
                                     std::uint64_t seed) {
    if (exp.split_type == SplitType::Proposed)
        return exp.split_ratio == SplitRatio::TwoToOne ? splitgen::gen_holdout(seed)
                                                       : splitgen::gen_holdout_inverted(seed);
    // By fault size: 3 splits x 10 repetitions over a 30-seed list.
    const int size = catalog::kFaultSizes[(seed_index / 10) % 3];
    return exp.split_ratio == SplitRatio::TwoToOne ? splitgen::gen_by_fault_size(size)
                                                   : splitgen::gen_by_fault_size_inverted(size);
}

inline EvalOutcome cv_evaluate(const std::vector<catalog::SignalRecord>& records,
                               const Experiment& exp, const nn::HyperParams& hypers,
                               const FeatureCache& cache, std::size_t workers = 1) {
    const bool half = exp.signal_length == SignalLength::Half;
    cache.warm(records, exp.representation, half, workers);

    struct Slot {
        std::optional<eval::RealizationScores> result;
        std::string error;
        bool audit = false;
    };
    std::vector<Slot> slots(exp.seeds.size());

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= exp.seeds.size()) return;
            const std::uint64_t seed = exp.seeds[i];
            try {
                const auto plan = make_plan(exp, i, seed);
                const auto audit = splitgen::audit_no_leakage(plan, records);
                if (!audit.pass())
                    throw std::runtime_error("split audit failed: " + audit.violations.front());
                auto train_recs = splitgen::materialize(plan, records, splitgen::Side::Train);
                auto test_recs = splitgen::materialize(plan, records, splitgen::Side::Test);
                auto run = detail::run_once(train_recs, test_recs, exp, hypers, seed, cache);
                slots[i].result = eval::evaluate_scored(std::move(run.scored), seed);
                slots[i].audit = run.audit.norm_train_only && run.audit.disjoint_records;
            } catch (const std::exception& ex) {
                slots[i].error = ex.what();
            }
        }
    };
    FeatureCache::run_pool(work, workers);

    EvalOutcome out;
    std::vector<eval::RealizationScores> realizations;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i].result) {
            realizations.push_back(std::move(*slots[i].result));
            out.audits_passed.push_back(slots[i].audit);
        } else {
            out.failed_seeds.push_back(exp.seeds[i]);
            out.failures.push_back(slots[i].error);
        }
    }
    if (realizations.empty())
        throw std::runtime_error("cv_evaluate: every seed failed: " +
                                 (out.failures.empty() ? "?" : out.failures.front()));
    out.report = eval::aggregate(realizations);
    return out;
}

// ---------------------------------------------------------------------------
// Ablation suite: six configurations under one model family,
// all sharing the same seed list.

struct AblationRow {
    Experiment experiment;
    CvmSelection selection;
    EvalOutcome outcome;
};

inline std::vector<Experiment> ablation_experiments(const Experiment& base) {
    struct RowSpec {
        Scope scope;
        SplitType split_type;
        SplitRatio ratio;
        SignalLength length;
    };
    static constexpr std::array<RowSpec, 6> kRows{{
        {Scope::Single, SplitType::Proposed, SplitRatio::TwoToOne, SignalLength::Full},
        {Scope::SeparateDEFE, SplitType::Proposed, SplitRatio::TwoToOne, SignalLength::Full},
        {Scope::Single, SplitType::ByFaultSize, SplitRatio::TwoToOne, SignalLength::Full},
        {Scope::Single, SplitType::Proposed, SplitRatio::OneToTwo, SignalLength::Full},
        {Scope::Single, SplitType::Proposed, SplitRatio::TwoToOne, SignalLength::Half},
        {Scope::SeparateDEFE, SplitType::ByFaultSize, SplitRatio::OneToTwo, SignalLength::Full},
    }};
    std::vector<Experiment> rows;
    for (const auto& spec : kRows) {
        Experiment e = base;
        e.scope = spec.scope;
        e.split_type = spec.split_type;
        e.split_ratio = spec.ratio;
        e.signal_length = spec.length;
        rows.push_back(std::move(e));
    }
    return rows;
}

// Each row re-tunes its hyperparameters unless base.fixed_hypers is set, in
// which case every row reuses them.
inline std::vector<AblationRow> run_ablation_suite(
    const std::vector<catalog::SignalRecord>& records, const Experiment& base,
    const FeatureCache& cache, std::size_t workers = 1) {
    std::vector<AblationRow> rows;
    for (const auto& exp : ablation_experiments(base)) {
        AblationRow row;
        row.experiment = exp;
        if (exp.fixed_hypers) {
            row.selection.hypers = *exp.fixed_hypers;
            row.selection.tuned_epoch = exp.fixed_hypers->max_epochs;
        } else {
            row.selection = cvm_select(records, exp, cache, 0, workers);
        }
        row.outcome = cv_evaluate(records, exp, row.selection.hypers, cache, workers);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace cwru::protocol

#endif  // CWRU_PROTOCOL_HPP
