// Command-line benchmark runner: data fetching and ingestion, feature cache
// construction, split generation and auditing, hyperparameter tuning, seeded
// evaluation runs, the ablation suite, and report re-emission.
//
// Exit codes: 0 success, 1 validation or audit failure, 2 I/O or data error.

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include "cwru/catalog.hpp"
#include "cwru/protocol.hpp"
#include "cwru/report.hpp"
#include "cwru/splitgen.hpp"

namespace fs = std::filesystem;
using namespace cwru;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

struct CliConfig {
    fs::path data_dir = "data";
    fs::path cache_dir;  // default: <data_dir>/cache, or CWRU_CACHE_DIR
    fs::path results_dir = "results";
    std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
    std::string log_level = "info";

    fs::path raw_dir() const { return data_dir / "raw"; }
    fs::path manifest_path() const { return data_dir / "manifest.json"; }

    void finalize() {
        if (cache_dir.empty()) {
            if (const char* env = std::getenv("CWRU_CACHE_DIR"))
                cache_dir = env;
            else
                cache_dir = data_dir / "cache";
        }
        if (workers < 1) workers = 1;
    }

    bool verbose() const { return log_level == "debug"; }
};

void info(const CliConfig& cfg, const std::string& msg) {
    if (cfg.log_level != "quiet") std::cout << msg << "\n";
}

catalog::Manifest load_manifest_or_throw(const CliConfig& cfg) {
    return catalog::load_manifest(cfg.manifest_path());
}

std::vector<catalog::SignalRecord> load_catalog(const CliConfig& cfg) {
    const auto manifest = load_manifest_or_throw(cfg);
    auto records = catalog::build_catalog(manifest, cfg.raw_dir());
    if (records.size() != 114)
        throw std::runtime_error("expected 114 signal records, got " +
                                 std::to_string(records.size()));
    return records;
}

// ---------------------------------------------------------------------------
// fetch

bool download(const std::string& url, const fs::path& dest, std::string& error) {
    // Split https://host/path.
    const std::string prefix = "https://";
    if (url.rfind(prefix, 0) != 0) {
        error = "unsupported url scheme: " + url;
        return false;
    }
    const auto slash = url.find('/', prefix.size());
    if (slash == std::string::npos) {
        error = "malformed url: " + url;
        return false;
    }
    const std::string host = url.substr(prefix.size(), slash - prefix.size());
    const std::string path = url.substr(slash);

    httplib::SSLClient client(host);
    client.set_follow_location(true);
    client.set_connection_timeout(30);
    client.set_read_timeout(120);
    for (int attempt = 0; attempt < 3; ++attempt) {
        auto res = client.Get(path);
        if (res && res->status == 200) {
            std::ofstream out(dest, std::ios::binary);
            out.write(res->body.data(), static_cast<std::streamsize>(res->body.size()));
            return out.good();
        }
        error = res ? "HTTP " + std::to_string(res->status)
                    : "connection failed: " + httplib::to_string(res.error());
    }
    return false;
}

int cmd_fetch(const CliConfig& cfg) {
    const auto manifest = load_manifest_or_throw(cfg);
    fs::create_directories(cfg.raw_dir());
    std::size_t fetched = 0, present = 0, failed = 0;
    for (const auto& e : manifest.entries) {
        const auto dest = cfg.raw_dir() / e.filename();
        if (fs::exists(dest)) {
            if (!e.sha256.empty() && catalog::sha256_file(dest) != e.sha256) {
                const auto quarantine = dest.string() + ".quarantine";
                fs::rename(dest, quarantine);
                std::cerr << "checksum mismatch, quarantined: " << quarantine << "\n";
                ++failed;
            } else {
                ++present;
            }
            continue;
        }
        std::string error;
        info(cfg, "fetching " + e.url);
        if (!download(e.url, dest, error)) {
            std::cerr << "download failed for " << e.url << ": " << error << "\n";
            if (fs::exists(dest)) fs::remove(dest);
            ++failed;
            continue;
        }
        if (!e.sha256.empty() && catalog::sha256_file(dest) != e.sha256) {
            const auto quarantine = dest.string() + ".quarantine";
            fs::rename(dest, quarantine);
            std::cerr << "checksum mismatch after download, quarantined: " << quarantine << "\n";
            ++failed;
            continue;
        }
        ++fetched;
    }
    info(cfg, std::to_string(present) + " present, " + std::to_string(fetched) + " fetched, " +
                  std::to_string(failed) + " failed");
    return failed == 0 ? kExitOk : kExitIo;
}

// ---------------------------------------------------------------------------
// ingest

int cmd_ingest(const CliConfig& cfg) {
    const auto manifest = load_manifest_or_throw(cfg);
    const auto report = catalog::verify_manifest(manifest, cfg.raw_dir());
    for (const auto& item : report.items) {
        if (item.status == catalog::EntryStatus::Missing)
            std::cerr << "missing: " << item.detail << "\n";
        else if (item.status == catalog::EntryStatus::Corrupted)
            std::cerr << "corrupted: " << item.detail << "\n";
    }
    if (!report.all_present()) {
        std::cerr << report.count(catalog::EntryStatus::Missing) << " missing, "
                  << report.count(catalog::EntryStatus::Corrupted)
                  << " corrupted; run `fetch` first\n";
        return kExitIo;
    }
    const auto records = load_catalog(cfg);
    std::size_t healthy = 0, positive = 0;
    for (const auto& r : records) {
        if (r.condition.healthy()) ++healthy;
        if (r.label[0] || r.label[1] || r.label[2]) ++positive;
    }
    info(cfg, "catalog: " + std::to_string(records.size()) + " records (" +
                  std::to_string(healthy) + " healthy, " + std::to_string(positive) +
                  " with a positive label), all at 12 kHz");
    return kExitOk;
}

// ---------------------------------------------------------------------------
// features

int cmd_features(const CliConfig& cfg, const std::string& rep_name, bool half,
                 bool export_spectrograms) {
    const auto records = load_catalog(cfg);
    const protocol::FeatureCache cache(cfg.cache_dir);
    if (export_spectrograms) {
        cache.warm(records, dsp::Representation::Spectrogram, half, cfg.workers);
        info(cfg, "spectrogram tensors exported to " + cfg.cache_dir.string());
        return kExitOk;
    }
    const auto rep = dsp::parse_representation(rep_name);
    cache.warm(records, rep, half, cfg.workers);
    info(cfg, "feature cache warmed for " + rep_name + (half ? " (half signals)" : "") +
                  " in " + cfg.cache_dir.string());
    return kExitOk;
}

// ---------------------------------------------------------------------------
// split / audit

int cmd_split(const std::string& mode, std::uint64_t seed, int size, const std::string& out) {
    splitgen::SplitPlan plan;
    const auto m = splitgen::parse_split_mode(mode);
    switch (m) {
        case splitgen::SplitMode::ProposedHoldout: plan = splitgen::gen_holdout(seed); break;
        case splitgen::SplitMode::ProposedHoldoutInverted:
            plan = splitgen::gen_holdout_inverted(seed);
            break;
        case splitgen::SplitMode::ProposedThreeFold: plan = splitgen::gen_three_fold(seed); break;
        case splitgen::SplitMode::ByFaultSize: plan = splitgen::gen_by_fault_size(size); break;
    }
    const auto j = splitgen::to_json(plan).dump(2) + "\n";
    if (out.empty() || out == "-") {
        std::cout << j;
    } else {
        std::ofstream f(out);
        if (!f) {
            std::cerr << "cannot write " << out << "\n";
            return kExitIo;
        }
        f << j;
    }
    return kExitOk;
}

int audit_one(const splitgen::SplitPlan& plan, const std::string& label) {
    const auto report = splitgen::audit_no_leakage(plan);
    for (const auto& v : report.violations) std::cerr << label << ": " << v << "\n";
    return report.pass() ? kExitOk : kExitValidation;
}

int cmd_audit(const CliConfig& cfg, const std::string& plan_file, const std::string& all_seeds) {
    if (!all_seeds.empty()) {
        // "lo..hi" inclusive; audits the hold-out plan for each seed.
        const auto dots = all_seeds.find("..");
        if (dots == std::string::npos) {
            std::cerr << "--all-seeds expects LO..HI\n";
            return kExitIo;
        }
        const auto lo = std::stoull(all_seeds.substr(0, dots));
        const auto hi = std::stoull(all_seeds.substr(dots + 2));
        int worst = kExitOk;
        for (std::uint64_t s = lo; s <= hi; ++s)
            worst = std::max(worst, audit_one(splitgen::gen_holdout(s),
                                              "seed " + std::to_string(s)));
        if (worst == kExitOk)
            info(cfg, "all " + std::to_string(hi - lo + 1) + " plans pass");
        return worst;
    }
    std::ifstream in(plan_file);
    if (!in) {
        std::cerr << "cannot open plan file: " << plan_file << "\n";
        return kExitIo;
    }
    nlohmann::json j;
    in >> j;
    const auto plan = splitgen::plan_from_json(j);
    const int rc = audit_one(plan, plan_file);
    if (rc == kExitOk) info(cfg, "plan passes");
    return rc;
}

// ---------------------------------------------------------------------------
// tune / run / ablate

protocol::Experiment load_experiment(const std::string& file) {
    if (file.empty()) return protocol::Experiment{};  // default configuration
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open experiment file: " + file);
    nlohmann::json j;
    in >> j;
    return protocol::experiment_from_json(j);
}

std::string manifest_hash_or_empty(const CliConfig& cfg) {
    std::error_code ec;
    if (!fs::exists(cfg.manifest_path(), ec)) return {};
    return catalog::sha256_file(cfg.manifest_path());
}

void print_summary(const eval::RunReport& r) {
    std::cout << "\n" << report::diagnosis_csv(r);
    std::cout << "\n" << report::detection_csv(r);
}

int cmd_tune(const CliConfig& cfg, const std::string& experiment_file) {
    const auto exp = load_experiment(experiment_file);
    const auto records = load_catalog(cfg);
    const protocol::FeatureCache cache(cfg.cache_dir);
    cache.warm(records, exp.representation, exp.signal_length == protocol::SignalLength::Half,
               cfg.workers);
    const auto sel = protocol::cvm_select(records, exp, cache, 0, cfg.workers);
    std::cout << "batch_size,learning_rate,mean_val_auroc\n";
    for (const auto& gp : sel.table)
        std::cout << gp.hypers.batch_size << "," << gp.hypers.learning_rate << ","
                  << gp.mean_val_auroc << "\n";
    std::cout << "selected: batch_size=" << sel.hypers.batch_size
              << " learning_rate=" << sel.hypers.learning_rate
              << " epochs=" << sel.hypers.max_epochs << "\n";

    fs::create_directories(cfg.results_dir);
    nlohmann::json out;
    out["experiment_hash"] = protocol::experiment_hash(exp);
    out["batch_size"] = sel.hypers.batch_size;
    out["learning_rate"] = sel.hypers.learning_rate;
    out["epochs"] = sel.hypers.max_epochs;
    out["mean_val_auroc"] = sel.mean_val_auroc;
    report::write_text(cfg.results_dir / ("tuned-" + protocol::experiment_hash(exp) + ".json"),
                       out.dump(2) + "\n");
    return kExitOk;
}

int cmd_run(const CliConfig& cfg, const std::string& experiment_file, bool export_spectrograms) {
    auto exp = load_experiment(experiment_file);
    const auto records = load_catalog(cfg);
    const protocol::FeatureCache cache(cfg.cache_dir);

    if (export_spectrograms)
        cache.warm(records, dsp::Representation::Spectrogram,
                   exp.signal_length == protocol::SignalLength::Half, cfg.workers);

    if (exp.model_family == "external-export") {
        info(cfg, "external-export experiment: tensors written to " + cfg.cache_dir.string() +
                      "; no in-repo model is trained");
        cache.warm(records, exp.representation,
                   exp.signal_length == protocol::SignalLength::Half, cfg.workers);
        return kExitOk;
    }

    nn::HyperParams hypers;
    if (exp.fixed_hypers) {
        hypers = *exp.fixed_hypers;
    } else {
        info(cfg, "tuning hyperparameters (3-fold grid search)");
        const auto sel = protocol::cvm_select(records, exp, cache, 0, cfg.workers);
        hypers = sel.hypers;
        info(cfg, "selected batch_size=" + std::to_string(hypers.batch_size) +
                      " learning_rate=" + std::to_string(hypers.learning_rate) +
                      " epochs=" + std::to_string(hypers.max_epochs));
    }

    info(cfg, "evaluating " + std::to_string(exp.seeds.size()) + " seeded splits");
    const auto outcome = protocol::cv_evaluate(records, exp, hypers, cache, cfg.workers);
    for (std::size_t i = 0; i < outcome.failed_seeds.size(); ++i)
        std::cerr << "seed " << outcome.failed_seeds[i] << " failed: " << outcome.failures[i]
                  << "\n";

    report::Provenance prov;
    prov.manifest_hash = manifest_hash_or_empty(cfg);
    prov.experiment_hash = protocol::experiment_hash(exp);
    const auto dir = cfg.results_dir / prov.experiment_hash;
    report::write_report(dir, outcome.report, exp, hypers, prov);
    info(cfg, "report written to " + dir.string());
    print_summary(outcome.report);
    return outcome.failed_seeds.empty() ? kExitOk : kExitValidation;
}

int cmd_ablate(const CliConfig& cfg, const std::string& experiment_file) {
    const auto base = load_experiment(experiment_file);
    const auto records = load_catalog(cfg);
    const protocol::FeatureCache cache(cfg.cache_dir);
    const auto rows = protocol::run_ablation_suite(records, base, cache, cfg.workers);

    fs::create_directories(cfg.results_dir);
    const auto csv = report::ablation_csv(rows);
    report::write_text(cfg.results_dir / "ablation.csv", csv);
    std::cout << csv;

    for (const auto& row : rows) {
        report::Provenance prov;
        prov.manifest_hash = manifest_hash_or_empty(cfg);
        prov.experiment_hash = protocol::experiment_hash(row.experiment);
        report::write_report(cfg.results_dir / prov.experiment_hash, row.outcome.report,
                             row.experiment, row.selection.hypers, prov);
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// report: re-emit the console summary from a stored report.json.

int cmd_report(const std::string& report_file) {
    std::ifstream in(report_file);
    if (!in) {
        std::cerr << "cannot open report: " << report_file << "\n";
        return kExitIo;
    }
    nlohmann::json j;
    in >> j;
    std::cout << "fault_type,fe,de,average\n";
    const std::array<std::pair<std::string, std::array<std::string, 2>>, 3> rows{{
        {"inner", {"fan-inner", "drive-inner"}},
        {"outer", {"fan-outer", "drive-outer"}},
        {"ball", {"fan-ball", "drive-ball"}},
    }};
    for (const auto& [type, cells] : rows) {
        std::cout << type;
        for (const auto& c : cells)
            std::cout << "," << j.at("diagnosis").at("cells").at(c).at("mean").get<double>();
        std::cout << "," << j.at("diagnosis").at("fe_de_average").at(type).at("mean").get<double>()
                  << "\n";
    }
    std::cout << "macro,,," << j.at("diagnosis").at("macro").at("mean").get<double>() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CWRU bearing-fault benchmark harness"};
    app.require_subcommand(1);

    CliConfig cfg;
    app.add_option("--data-dir", cfg.data_dir, "Dataset directory (manifest + raw files)");
    app.add_option("--cache-dir", cfg.cache_dir,
                   "Feature cache directory (default: <data-dir>/cache or $CWRU_CACHE_DIR)");
    app.add_option("--results-dir", cfg.results_dir, "Output directory for reports");
    app.add_option("--workers", cfg.workers, "Worker thread count");
    app.add_option("--log-level", cfg.log_level, "quiet | info | debug");

    app.add_subcommand("fetch", "Download and verify the raw dataset files");
    app.add_subcommand("ingest", "Verify raw files and build the 114-record catalog");

    auto* features = app.add_subcommand("features", "Populate the feature cache");
    std::string rep_name = "power-cepstrum";
    bool half = false, export_spectrograms = false;
    features->add_option("--representation", rep_name,
                         "time | spectrum | power-cepstrum | spectrogram");
    features->add_flag("--half", half, "Use only the first half of each signal");
    features->add_flag("--export-spectrograms", export_spectrograms,
                       "Export 224x224 spectrogram tensors for external models");

    auto* split = app.add_subcommand("split", "Generate a split plan as JSON");
    std::string split_mode = "proposed-holdout", split_out;
    std::uint64_t split_seed = 0;
    int split_size = 7;
    split->add_option("--mode", split_mode,
                      "proposed-holdout | proposed-holdout-inverted | proposed-three-fold | "
                      "by-fault-size");
    split->add_option("--seed", split_seed, "Plan seed");
    split->add_option("--size", split_size, "Test fault size in mils (by-fault-size only)");
    split->add_option("-o,--output", split_out, "Output file (default stdout)");

    auto* audit = app.add_subcommand("audit", "Check a split plan for leakage");
    std::string audit_file, audit_all;
    audit->add_option("plan", audit_file, "Split plan JSON file");
    audit->add_option("--all-seeds", audit_all, "Audit generated plans for seeds LO..HI");

    auto* tune = app.add_subcommand("tune", "Grid-search hyperparameters on the 3-fold partition");
    std::string tune_exp;
    tune->add_option("--experiment", tune_exp, "Experiment JSON file (default configuration)");

    auto* run = app.add_subcommand("run", "Tune (unless fixed) and evaluate over the seeds");
    std::string run_exp;
    bool run_export = false;
    run->add_option("--experiment", run_exp, "Experiment JSON file (default configuration)");
    run->add_flag("--export-spectrograms", run_export,
                  "Also export spectrogram tensors to the cache");

    auto* ablate = app.add_subcommand("ablate", "Run the six-configuration ablation suite");
    std::string ablate_exp;
    ablate->add_option("--experiment", ablate_exp, "Base experiment JSON file");

    auto* rep = app.add_subcommand("report", "Print the summary table from a stored report");
    std::string report_file;
    rep->add_option("report_json", report_file, "Path to report.json")->required();

    CLI11_PARSE(app, argc, argv);
    cfg.finalize();

    try {
        if (app.got_subcommand("fetch")) return cmd_fetch(cfg);
        if (app.got_subcommand("ingest")) return cmd_ingest(cfg);
        if (app.got_subcommand("features"))
            return cmd_features(cfg, rep_name, half, export_spectrograms);
        if (app.got_subcommand("split"))
            return cmd_split(split_mode, split_seed, split_size, split_out);
        if (app.got_subcommand("audit")) {
            if (audit_file.empty() && audit_all.empty()) {
                std::cerr << "audit: give a plan file or --all-seeds LO..HI\n";
                return kExitIo;
            }
            return cmd_audit(cfg, audit_file, audit_all);
        }
        if (app.got_subcommand("tune")) return cmd_tune(cfg, tune_exp);
        if (app.got_subcommand("run")) return cmd_run(cfg, run_exp, run_export);
        if (app.got_subcommand("ablate")) return cmd_ablate(cfg, ablate_exp);
        if (app.got_subcommand("report")) return cmd_report(report_file);
    } catch (const std::invalid_argument& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitIo;
    }
    return kExitIo;
}
