#pragma once
// Prompt construction for the sensing and power-allocation tasks and the
// parsers that turn model replies back into decisions.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "airkit/error.hpp"
#include "airkit/signal.hpp"
#include "airkit/waterfill.hpp"

namespace airkit {

enum class PromptStyle { ZeroShot, FewShot, ChainOfThought, ChainOfThoughtWithProgram };

std::string_view to_string(PromptStyle style);
// Accepts the names produced by to_string ("zero-shot", "few-shot", "cot", "cot-program").
PromptStyle parse_prompt_style(std::string_view text);

struct LabeledExample {
    std::vector<double> observation;  // energy samples, mW
    Hypothesis label;
};

struct RenderedPrompt {
    std::string system_text;
    std::string user_text;
    PromptStyle style = PromptStyle::ZeroShot;
    std::string fingerprint;  // SHA-256 hex of canonical_prompt()
};

// "[system]\n" + system + "\n[user]\n" + user
std::string canonical_prompt(std::string_view system_text, std::string_view user_text);
RenderedPrompt make_prompt(std::string system_text, std::string user_text, PromptStyle style);

struct ParsedDecision {
    std::optional<Hypothesis> decision;
    std::string raw_excerpt;  // set only when undecided, at most 256 bytes

    bool decided() const { return decision.has_value(); }
};

inline constexpr int kMaxPrecisionDigits = 17;
inline constexpr std::size_t kDefaultStride = 5;
inline constexpr int kDefaultPrecisionDigits = 4;

// |x(n)|^2 at n = 0, stride, 2*stride, ..., each rounded to `precision_digits`
// significant digits. 17 digits keep the exact double.
std::vector<double> downsample(const SensingFrame& frame, std::size_t stride, int precision_digits);

// Scientific notation with `digits` significant digits.
std::string format_scientific(double value, int digits);

struct SensingPromptOptions {
    int precision_digits = kDefaultPrecisionDigits;
    // User-message template with {{task}}, {{examples}} and {{query}}
    // placeholders; the built-in layout when empty.
    std::string user_template;
};

std::string load_prompt_template(const std::filesystem::path& path);

RenderedPrompt render_sensing_prompt(std::span<const LabeledExample> examples,
                                     std::span<const double> query, PromptStyle style,
                                     const SensingPromptOptions& options = {});

RenderedPrompt render_power_prompt(const SubcarrierCnrs& cnrs, PowerBudget budget, PromptStyle style);

ParsedDecision parse_decision(std::string_view response);

class AllocationParseError : public FormatError {
  public:
    enum class Kind { MissingMarker, Arity, NonNumeric };
    AllocationParseError(Kind kind, const std::string& what) : FormatError(what), kind_(kind) {}
    Kind kind() const { return kind_; }

  private:
    Kind kind_;
};

// Values from the last line starting with "ALLOCATION:".
std::vector<double> parse_allocation(std::string_view response, std::size_t k);

// Inverse of the renderers, used by the offline oracle backends. Return
// nullopt when the prompt does not carry the expected block.
std::optional<std::vector<double>> extract_sensing_query(std::string_view user_text);
std::optional<WaterfillProblem> extract_power_problem(std::string_view user_text);

}  // namespace airkit
