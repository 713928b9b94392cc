#ifndef CWRU_SPLITGEN_HPP
#define CWRU_SPLITGEN_HPP

// Leakage-free dataset divisions. All randomness comes from the in-repo
// SplitMix64 generator (see prng.hpp) so plans replay identically on any
// platform. Healthy signals are never assigned: they always belong to the
// test side of whichever evaluation is performed.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "cwru/catalog.hpp"
#include "cwru/prng.hpp"

namespace cwru::splitgen {

enum class SplitMode { ProposedHoldout, ProposedThreeFold, ByFaultSize, ProposedHoldoutInverted };
enum class Side { Train, Test };

inline std::string to_string(SplitMode m) {
    switch (m) {
        case SplitMode::ProposedHoldout: return "proposed-holdout";
        case SplitMode::ProposedThreeFold: return "proposed-three-fold";
        case SplitMode::ByFaultSize: return "by-fault-size";
        case SplitMode::ProposedHoldoutInverted: return "proposed-holdout-inverted";
    }
    return "?";
}

inline SplitMode parse_split_mode(const std::string& s) {
    if (s == "proposed-holdout") return SplitMode::ProposedHoldout;
    if (s == "proposed-three-fold") return SplitMode::ProposedThreeFold;
    if (s == "by-fault-size") return SplitMode::ByFaultSize;
    if (s == "proposed-holdout-inverted") return SplitMode::ProposedHoldoutInverted;
    throw std::invalid_argument("unknown split mode: " + s);
}

// Assignment groups: hold-out modes use 0=Train / 1=Test; the 3-fold mode
// uses fold indices 0/1/2. Stored as an explicit list (not a map) so that
// tampered plans with duplicate conditions remain representable and
// auditable.
struct SplitPlan {
    SplitMode mode = SplitMode::ProposedHoldout;
    std::uint64_t seed = 0;
    int test_size_mils = 0;  // ByFaultSize only
    std::vector<std::pair<catalog::FaultCondition, int>> assignment;

    std::optional<int> group_of(const catalog::FaultCondition& c) const {
        for (const auto& [cond, g] : assignment)
            if (cond == c) return g;
        return std::nullopt;
    }
};

inline SplitPlan gen_holdout(std::uint64_t seed) {
    SplitPlan plan{SplitMode::ProposedHoldout, seed, 0, {}};
    SplitMix64 rng(seed);
    for (const auto& col : catalog::fault_columns()) {
        const std::size_t test_idx = static_cast<std::size_t>(rng.next_below(3));
        for (std::size_t s = 0; s < catalog::kFaultSizes.size(); ++s)
            plan.assignment.push_back(
                {{col.location, col.fault_type, catalog::kFaultSizes[s]},
                 s == test_idx ? 1 : 0});
    }
    return plan;
}

// 1:2 ablation: per column, one size is drawn for Train; the other two test.
inline SplitPlan gen_holdout_inverted(std::uint64_t seed) {
    SplitPlan plan{SplitMode::ProposedHoldoutInverted, seed, 0, {}};
    SplitMix64 rng(seed);
    for (const auto& col : catalog::fault_columns()) {
        const std::size_t train_idx = static_cast<std::size_t>(rng.next_below(3));
        for (std::size_t s = 0; s < catalog::kFaultSizes.size(); ++s)
            plan.assignment.push_back(
                {{col.location, col.fault_type, catalog::kFaultSizes[s]},
                 s == train_idx ? 0 : 1});
    }
    return plan;
}

// Fold 0 is drawn as in gen_holdout; the remaining two sizes per column are
// assigned to folds 1/2 by a binary draw. Fold identity is unordered for
// counting purposes (3^6 * 2^6 / 6 distinct partitions).
inline SplitPlan gen_three_fold(std::uint64_t seed) {
    SplitPlan plan{SplitMode::ProposedThreeFold, seed, 0, {}};
    SplitMix64 rng(seed);
    for (const auto& col : catalog::fault_columns()) {
        const std::size_t first = static_cast<std::size_t>(rng.next_below(3));
        std::vector<std::size_t> rest;
        for (std::size_t s = 0; s < 3; ++s)
            if (s != first) rest.push_back(s);
        const std::size_t flip = static_cast<std::size_t>(rng.next_below(2));
        std::array<int, 3> fold_of{};
        fold_of[first] = 0;
        fold_of[rest[flip]] = 1;
        fold_of[rest[1 - flip]] = 2;
        for (std::size_t s = 0; s < 3; ++s)
            plan.assignment.push_back(
                {{col.location, col.fault_type, catalog::kFaultSizes[s]}, fold_of[s]});
    }
    return plan;
}

inline SplitPlan gen_by_fault_size(int size_mils) {
    if (size_mils != 7 && size_mils != 14 && size_mils != 21)
        throw std::invalid_argument("by-fault-size split: size must be 7, 14 or 21");
    SplitPlan plan{SplitMode::ByFaultSize, 0, size_mils, {}};
    for (const auto& cond : catalog::faulty_conditions())
        plan.assignment.push_back({cond, cond.fault_size_mils == size_mils ? 1 : 0});
    return plan;
}

// 1:2 by-fault-size split (the Hendriks-style ratio): the chosen size
// trains, the other two sizes test. Structurally this is an inverted plan
// (exactly one Train size per column), so it carries that mode tag; the
// chosen size is recorded in test_size_mils.
inline SplitPlan gen_by_fault_size_inverted(int size_mils) {
    if (size_mils != 7 && size_mils != 14 && size_mils != 21)
        throw std::invalid_argument("by-fault-size split: size must be 7, 14 or 21");
    SplitPlan plan{SplitMode::ProposedHoldoutInverted, 0, size_mils, {}};
    for (const auto& cond : catalog::faulty_conditions())
        plan.assignment.push_back({cond, cond.fault_size_mils == size_mils ? 0 : 1});
    return plan;
}

// ---------------------------------------------------------------------------
// Audit.

struct AuditReport {
    std::vector<std::string> violations;
    bool pass() const { return violations.empty(); }
};

inline AuditReport audit_no_leakage(const SplitPlan& plan) {
    AuditReport report;
    std::map<catalog::FaultCondition, std::set<int>> groups;
    for (const auto& [cond, g] : plan.assignment) {
        if (cond.healthy()) {
            if (plan.mode == SplitMode::ProposedThreeFold || g == 0)
                report.violations.push_back("healthy condition assigned to a training side");
            continue;
        }
        groups[cond].insert(g);
    }
    for (const auto& [cond, gs] : groups)
        if (gs.size() > 1)
            report.violations.push_back("condition " + catalog::condition_id(cond) +
                                        " appears on multiple sides");

    const int max_group = plan.mode == SplitMode::ProposedThreeFold ? 2 : 1;
    for (const auto& [cond, g] : plan.assignment)
        if (g < 0 || g > max_group)
            report.violations.push_back("condition " + catalog::condition_id(cond) +
                                        " has out-of-range group " + std::to_string(g));

    // Per-column structure.
    for (const auto& col : catalog::fault_columns()) {
        std::vector<int> gs;
        for (int size : catalog::kFaultSizes) {
            auto g = plan.group_of({col.location, col.fault_type, size});
            if (g) gs.push_back(*g);
        }
        if (gs.size() != 3) {
            report.violations.push_back("column " + catalog::to_string(col.location) + "-" +
                                        catalog::to_string(col.fault_type) +
                                        " does not cover all three sizes");
            continue;
        }
        const std::string col_name =
            catalog::to_string(col.location) + "-" + catalog::to_string(col.fault_type);
        switch (plan.mode) {
            case SplitMode::ProposedHoldout:
            case SplitMode::ByFaultSize:
                if (std::count(gs.begin(), gs.end(), 1) != 1)
                    report.violations.push_back("column " + col_name +
                                                " must have exactly one Test size");
                break;
            case SplitMode::ProposedHoldoutInverted:
                if (std::count(gs.begin(), gs.end(), 0) != 1)
                    report.violations.push_back("column " + col_name +
                                                " must have exactly one Train size");
                break;
            case SplitMode::ProposedThreeFold: {
                std::set<int> uniq(gs.begin(), gs.end());
                if (uniq.size() != 3)
                    report.violations.push_back("column " + col_name +
                                                " sizes must map bijectively onto the folds");
                break;
            }
        }
    }
    return report;
}

// Brute-force record-level check on top of the structural one.
inline AuditReport audit_no_leakage(const SplitPlan& plan,
                                    const std::vector<catalog::SignalRecord>& records) {
    AuditReport report = audit_no_leakage(plan);
    std::map<catalog::FaultCondition, std::set<int>> seen;
    for (const auto& rec : records) {
        if (rec.condition.healthy()) continue;
        auto g = plan.group_of(rec.condition);
        if (g) seen[rec.condition].insert(*g);
    }
    for (const auto& [cond, gs] : seen)
        if (gs.size() > 1)
            report.violations.push_back("records of condition " + catalog::condition_id(cond) +
                                        " appear on both sides");
    return report;
}

// ---------------------------------------------------------------------------
// Materialization.

inline std::vector<catalog::SignalRecord> materialize(
    const SplitPlan& plan, const std::vector<catalog::SignalRecord>& records, Side side,
    std::optional<catalog::Accelerometer> accel_filter = std::nullopt) {
    if (plan.mode == SplitMode::ProposedThreeFold)
        throw std::invalid_argument("materialize: use materialize_fold for 3-fold plans");
    std::vector<catalog::SignalRecord> out;
    for (const auto& rec : records) {
        if (accel_filter && rec.accelerometer != *accel_filter) continue;
        if (rec.condition.healthy()) {
            if (side == Side::Test) out.push_back(rec);
            continue;
        }
        auto g = plan.group_of(rec.condition);
        if (!g) continue;
        if ((side == Side::Test) == (*g == 1)) out.push_back(rec);
    }
    return out;
}

// Fold evaluation: test = conditions of `fold` plus healthy; train = the
// other two folds.
inline std::vector<catalog::SignalRecord> materialize_fold(
    const SplitPlan& plan, const std::vector<catalog::SignalRecord>& records, int fold,
    Side side, std::optional<catalog::Accelerometer> accel_filter = std::nullopt) {
    if (plan.mode != SplitMode::ProposedThreeFold)
        throw std::invalid_argument("materialize_fold: plan is not a 3-fold partition");
    if (fold < 0 || fold > 2) throw std::invalid_argument("materialize_fold: fold out of range");
    std::vector<catalog::SignalRecord> out;
    for (const auto& rec : records) {
        if (accel_filter && rec.accelerometer != *accel_filter) continue;
        if (rec.condition.healthy()) {
            if (side == Side::Test) out.push_back(rec);
            continue;
        }
        auto g = plan.group_of(rec.condition);
        if (!g) continue;
        if ((side == Side::Test) == (*g == fold)) out.push_back(rec);
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON serialization (replayable, diffable).

inline nlohmann::json to_json(const SplitPlan& plan) {
    nlohmann::json j;
    j["mode"] = to_string(plan.mode);
    j["seed"] = plan.seed;
    j["prng"] = std::string(SplitMix64::algorithm_id);
    if (plan.mode == SplitMode::ByFaultSize) j["test_size_mils"] = plan.test_size_mils;
    nlohmann::json assignment = nlohmann::json::array();
    for (const auto& [cond, g] : plan.assignment) {
        nlohmann::json e;
        e["condition"] = catalog::condition_id(cond);
        if (plan.mode == SplitMode::ProposedThreeFold)
            e["fold"] = g;
        else
            e["side"] = (g == 1 ? "test" : "train");
        assignment.push_back(std::move(e));
    }
    j["assignment"] = std::move(assignment);
    return j;
}

inline SplitPlan plan_from_json(const nlohmann::json& j) {
    SplitPlan plan;
    plan.mode = parse_split_mode(j.at("mode").get<std::string>());
    plan.seed = j.at("seed").get<std::uint64_t>();
    plan.test_size_mils = j.value("test_size_mils", 0);
    for (const auto& e : j.at("assignment")) {
        const auto cond = catalog::parse_condition_id(e.at("condition").get<std::string>());
        int g;
        if (plan.mode == SplitMode::ProposedThreeFold) {
            g = e.at("fold").get<int>();
        } else {
            const auto side = e.at("side").get<std::string>();
            if (side != "train" && side != "test")
                throw std::invalid_argument("bad side in plan: " + side);
            g = side == "test" ? 1 : 0;
        }
        plan.assignment.push_back({cond, g});
    }
    return plan;
}

}  // namespace cwru::splitgen

#endif  // CWRU_SPLITGEN_HPP
