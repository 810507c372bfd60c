#include "airkit/waterfill.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <json.hpp>

#include "airkit/error.hpp"
#include "airkit/kernels.hpp"

namespace airkit {

SubcarrierCnrs::SubcarrierCnrs(std::vector<double> cnrs) : cnrs_(std::move(cnrs)) {
    if (cnrs_.empty()) throw InvalidParameter("at least one subcarrier is required");
    for (double c : cnrs_) {
        if (!(c > 0.0) || !std::isfinite(c)) throw InvalidParameter("CNR values must be positive and finite");
    }
}

PowerBudget::PowerBudget(double total_mw) : total_mw_(total_mw) {
    if (!(total_mw > 0.0) || !std::isfinite(total_mw)) throw InvalidParameter("power budget must be positive");
}

std::string_view to_string(Verdict::Kind kind) {
    switch (kind) {
        case Verdict::Kind::Optimal: return "optimal";
        case Verdict::Kind::Suboptimal: return "suboptimal";
        case Verdict::Kind::Infeasible: return "infeasible";
    }
    return "unknown";
}

Allocation waterfill(const SubcarrierCnrs& cnrs, PowerBudget budget) {
    const std::size_t k_total = cnrs.size();
    std::vector<double> inverse(k_total);
    for (std::size_t k = 0; k < k_total; ++k) inverse[k] = 1.0 / cnrs[k];

    std::vector<std::size_t> order(k_total);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return inverse[a] < inverse[b]; });

    // Grow the active set in order of increasing 1/c. Stop once the next
    // inverse CNR sits at or above the level implied by the current set.
    double prefix = inverse[order[0]];
    double level = budget.mw() + prefix;
    for (std::size_t m = 1; m < k_total; ++m) {
        const double next = inverse[order[m]];
        if (next >= level) break;
        prefix += next;
        level = (budget.mw() + prefix) / static_cast<double>(m + 1);
    }

    Allocation out;
    out.powers_mw.resize(k_total);
    kernels::clipped_level(inverse, level, out.powers_mw);
    out.water_level = level;
    out.capacity_bits = capacity(out.powers_mw, cnrs);
    return out;
}

double capacity(std::span<const double> powers_mw, const SubcarrierCnrs& cnrs) {
    if (powers_mw.size() != cnrs.size()) {
        throw LengthMismatch("capacity: " + std::to_string(powers_mw.size()) + " powers for " +
                             std::to_string(cnrs.size()) + " subcarriers");
    }
    double bits = 0.0;
    for (std::size_t k = 0; k < powers_mw.size(); ++k) bits += std::log1p(powers_mw[k] * cnrs[k]);
    return bits / std::numbers::ln2;
}

namespace {

double scaled(double tol, double magnitude) { return tol * std::max(1.0, std::abs(magnitude)); }

}  // namespace

bool kkt_check(const Allocation& alloc, const SubcarrierCnrs& cnrs, PowerBudget budget, double tol) {
    const auto& p = alloc.powers_mw;
    if (p.size() != cnrs.size()) return false;
    double total = 0.0;
    for (double v : p) {
        if (!std::isfinite(v) || v < -tol) return false;
        total += v;
    }
    if (std::abs(total - budget.mw()) > scaled(tol, budget.mw())) return false;

    // Common level estimated from the active subcarriers.
    double level_sum = 0.0;
    std::size_t active = 0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k] > tol) {
            level_sum += p[k] + 1.0 / cnrs[k];
            ++active;
        }
    }
    if (active == 0) return false;
    const double level = level_sum / static_cast<double>(active);
    const double slack = scaled(tol, level);
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double inverse = 1.0 / cnrs[k];
        if (p[k] > tol) {
            if (std::abs(p[k] + inverse - level) > slack) return false;
        } else if (inverse < level - slack) {
            return false;
        }
    }
    return true;
}

Verdict validate_external_solution(std::span<const double> proposed_mw, const SubcarrierCnrs& cnrs,
                                   PowerBudget budget, double tol) {
    if (proposed_mw.size() != cnrs.size()) {
        throw LengthMismatch("proposed allocation has " + std::to_string(proposed_mw.size()) +
                             " entries, problem has " + std::to_string(cnrs.size()) + " subcarriers");
    }
    Verdict v;
    double total = 0.0;
    double worst_negative = 0.0;
    for (double p : proposed_mw) {
        if (!std::isfinite(p)) {
            v.kind = Verdict::Kind::Infeasible;
            v.violation = "non-finite";
            v.magnitude = std::abs(p);
            return v;
        }
        worst_negative = std::min(worst_negative, p);
        total += p;
    }
    if (worst_negative < -tol) {
        v.kind = Verdict::Kind::Infeasible;
        v.violation = "nonnegativity";
        v.magnitude = -worst_negative;
        return v;
    }
    const double budget_error = std::abs(total - budget.mw());
    if (budget_error > tol * std::max(1.0, budget.mw())) {
        v.kind = Verdict::Kind::Infeasible;
        v.violation = "budget";
        v.magnitude = budget_error;
        return v;
    }
    const double optimum = waterfill(cnrs, budget).capacity_bits;
    const double gap = optimum - capacity(proposed_mw, cnrs);
    if (gap <= tol) {
        v.kind = Verdict::Kind::Optimal;
        v.gap_bits = std::max(gap, 0.0);
    } else {
        v.kind = Verdict::Kind::Suboptimal;
        v.gap_bits = gap;
    }
    return v;
}

namespace {

std::vector<double> numbers(const nlohmann::json& j, const char* key) {
    const auto& arr = j.at(key);
    if (!arr.is_array()) throw FormatError(std::string("\"") + key + "\" must be an array");
    std::vector<double> out;
    out.reserve(arr.size());
    for (const auto& v : arr) {
        if (!v.is_number()) throw FormatError(std::string("\"") + key + "\" must hold numbers only");
        out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace

WaterfillProblem problem_from_json(std::string_view text) {
    try {
        const auto j = nlohmann::json::parse(text);
        if (!j.at("budget_mw").is_number()) throw FormatError("\"budget_mw\" must be a number");
        return {SubcarrierCnrs(numbers(j, "cnrs")), PowerBudget(j.at("budget_mw").get<double>())};
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("problem JSON: ") + e.what());
    }
}

std::string problem_to_json(const WaterfillProblem& problem) {
    nlohmann::ordered_json j;
    j["cnrs"] = std::vector<double>(problem.cnrs.values().begin(), problem.cnrs.values().end());
    j["budget_mw"] = problem.budget.mw();
    return j.dump();
}

std::string allocation_to_json(const Allocation& alloc) {
    nlohmann::ordered_json j;
    j["powers_mw"] = alloc.powers_mw;
    j["water_level_mw"] = alloc.water_level;
    j["capacity_bits"] = alloc.capacity_bits;
    return j.dump();
}

std::string verdict_to_json(const Verdict& verdict) {
    nlohmann::ordered_json j;
    j["verdict"] = std::string(to_string(verdict.kind));
    switch (verdict.kind) {
        case Verdict::Kind::Optimal:
        case Verdict::Kind::Suboptimal:
            j["gap_bits"] = verdict.gap_bits;
            break;
        case Verdict::Kind::Infeasible:
            j["violation"] = verdict.violation;
            j["magnitude"] = verdict.magnitude;
            break;
    }
    return j.dump();
}

std::vector<double> proposed_powers_from_json(std::string_view text) {
    try {
        return numbers(nlohmann::json::parse(text), "powers_mw");
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("proposed solution JSON: ") + e.what());
    }
}

}  // namespace airkit
