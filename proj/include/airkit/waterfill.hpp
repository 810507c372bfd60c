#pragma once
// Sum-capacity power allocation over parallel subcarriers:
//   maximize sum log2(1 + p_k c_k)  s.t.  sum p_k = P, p_k >= 0
// solved exactly by water-filling, p_k = max(0, mu - 1/c_k).

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace airkit {

// Carrier-to-noise ratio per unit power (1/mW), one per subcarrier. Callers
// holding (gain, noise) pairs pass g_k / sigma^2.
class SubcarrierCnrs {
  public:
    explicit SubcarrierCnrs(std::vector<double> cnrs);

    std::span<const double> values() const { return cnrs_; }
    std::size_t size() const { return cnrs_.size(); }
    double operator[](std::size_t k) const { return cnrs_[k]; }

  private:
    std::vector<double> cnrs_;
};

class PowerBudget {
  public:
    explicit PowerBudget(double total_mw);
    double mw() const { return total_mw_; }

  private:
    double total_mw_;
};

struct Allocation {
    std::vector<double> powers_mw;
    double water_level = 0.0;  // mW
    double capacity_bits = 0.0;
};

struct Verdict {
    enum class Kind { Optimal, Suboptimal, Infeasible };

    Kind kind = Kind::Optimal;
    double gap_bits = 0.0;   // Suboptimal: internal optimum minus proposal
    std::string violation;   // Infeasible: "nonnegativity", "budget" or "non-finite"
    double magnitude = 0.0;  // Infeasible: size of the worst violation
};

std::string_view to_string(Verdict::Kind kind);

Allocation waterfill(const SubcarrierCnrs& cnrs, PowerBudget budget);

double capacity(std::span<const double> powers_mw, const SubcarrierCnrs& cnrs);

// KKT certificate: budget met, powers nonnegative, and one water level fits
// every active (p_k > tol) and inactive subcarrier. Tolerances scale with
// max(1, |value|) of the quantity compared.
bool kkt_check(const Allocation& alloc, const SubcarrierCnrs& cnrs, PowerBudget budget, double tol);

Verdict validate_external_solution(std::span<const double> proposed_mw, const SubcarrierCnrs& cnrs,
                                   PowerBudget budget, double tol);

// File formats.
struct WaterfillProblem {
    SubcarrierCnrs cnrs;
    PowerBudget budget;
};

WaterfillProblem problem_from_json(std::string_view text);
std::string problem_to_json(const WaterfillProblem& problem);
std::string allocation_to_json(const Allocation& alloc);
std::string verdict_to_json(const Verdict& verdict);
// Reads "powers_mw" from a proposed-solution document; other keys ignored.
std::vector<double> proposed_powers_from_json(std::string_view text);

}  // namespace airkit
