#include "airkit/prompting.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>

#include "airkit/digest.hpp"

namespace airkit {

std::string_view to_string(PromptStyle style) {
    switch (style) {
        case PromptStyle::ZeroShot: return "zero-shot";
        case PromptStyle::FewShot: return "few-shot";
        case PromptStyle::ChainOfThought: return "cot";
        case PromptStyle::ChainOfThoughtWithProgram: return "cot-program";
    }
    return "unknown";
}

PromptStyle parse_prompt_style(std::string_view text) {
    for (auto s : {PromptStyle::ZeroShot, PromptStyle::FewShot, PromptStyle::ChainOfThought,
                   PromptStyle::ChainOfThoughtWithProgram}) {
        if (text == to_string(s)) return s;
    }
    throw InvalidParameter("unknown prompt style \"" + std::string(text) + "\"");
}

std::string canonical_prompt(std::string_view system_text, std::string_view user_text) {
    std::string out;
    out.reserve(system_text.size() + user_text.size() + 20);
    out += "[system]\n";
    out += system_text;
    out += "\n[user]\n";
    out += user_text;
    return out;
}

RenderedPrompt make_prompt(std::string system_text, std::string user_text, PromptStyle style) {
    RenderedPrompt p{std::move(system_text), std::move(user_text), style, {}};
    p.fingerprint = sha256_hex(canonical_prompt(p.system_text, p.user_text));
    return p;
}

namespace {

void check_digits(int digits) {
    if (digits < 1 || digits > kMaxPrecisionDigits) {
        throw InvalidParameter("precision digits must lie in [1, 17], got " + std::to_string(digits));
    }
}

bool is_alnum(unsigned char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

unsigned char lower(unsigned char c) { return (c >= 'A' && c <= 'Z') ? c + ('a' - 'A') : c; }

// Case-insensitive match of lowercase `word` at `pos` with non-alphanumeric
// neighbours on both sides.
bool standalone_at(std::string_view text, std::size_t pos, std::string_view word) {
    if (pos + word.size() > text.size()) return false;
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (lower(static_cast<unsigned char>(text[pos + i])) != static_cast<unsigned char>(word[i])) return false;
    }
    if (pos > 0 && is_alnum(static_cast<unsigned char>(text[pos - 1]))) return false;
    const std::size_t end = pos + word.size();
    return end == text.size() || !is_alnum(static_cast<unsigned char>(text[end]));
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::optional<double> parse_finite(std::string_view token) {
    token = trim(token);
    if (!token.empty() && token.front() == '+') token.remove_prefix(1);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

std::optional<std::vector<double>> parse_list(std::string_view body) {
    std::vector<double> out;
    body = trim(body);
    if (body.empty()) return out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = body.find(',', start);
        const auto v = parse_finite(body.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                                      : comma - start));
        if (!v) return std::nullopt;
        out.push_back(*v);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string join_scientific(std::span<const double> values, int digits) {
    std::string out = "[";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += ", ";
        out += format_scientific(values[i], digits);
    }
    out += ']';
    return out;
}

std::string format_exact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void replace_all(std::string& text, std::string_view key, std::string_view value) {
    std::size_t pos = 0;
    while ((pos = text.find(key, pos)) != std::string::npos) {
        text.replace(pos, key.size(), value);
        pos += value.size();
    }
}

constexpr std::string_view kSensingSystem =
    "You are a spectrum sensing assistant for a cognitive radio secondary user.";

constexpr std::string_view kSensingTask =
    "Each input lists received energy samples |x(n)|^2 in mW, down-sampled from one sensing "
    "window of a frequency band. Label the window H0 when it holds background noise only "
    "(primary user absent) and H1 when a primary user signal is present on top of the noise. "
    "Answer with H0 or H1.";

constexpr std::string_view kSensingReasoning =
    "Reason step by step: estimate the average energy of the query, compare it with the "
    "labeled examples, then give the final label (H0 or H1) on the last line.\n\n";

constexpr std::string_view kDefaultSensingTemplate = "{{task}}\n\n{{examples}}{{query}}";

constexpr std::string_view kPowerSystem =
    "You are an expert in radio resource allocation for OFDM systems.";
constexpr std::string_view kChannelLabel = "Channel states c_k (carrier-to-noise ratio per mW): ";
constexpr std::string_view kBudgetLabel = "Total power budget P (mW): ";
constexpr std::string_view kQueryMarker = "Query:\nInput: [";

}  // namespace

std::string format_scientific(double value, int digits) {
    check_digits(digits);
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*e", digits - 1, value);
    return buf;
}

std::vector<double> downsample(const SensingFrame& frame, std::size_t stride, int precision_digits) {
    if (stride == 0) throw InvalidParameter("down-sampling stride must be at least 1");
    check_digits(precision_digits);
    const std::vector<double> energies = sample_energies(frame.samples);
    std::vector<double> out;
    out.reserve((energies.size() + stride - 1) / stride);
    for (std::size_t n = 0; n < energies.size(); n += stride) {
        const std::string text = format_scientific(energies[n], precision_digits);
        out.push_back(std::strtod(text.c_str(), nullptr));
    }
    return out;
}

std::string load_prompt_template(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot read prompt template " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    for (std::string_view key : {"{{examples}}", "{{query}}"}) {
        if (text.find(key) == std::string::npos) {
            throw FormatError("prompt template " + path.string() + " lacks " + std::string(key));
        }
    }
    return text;
}

RenderedPrompt render_sensing_prompt(std::span<const LabeledExample> examples,
                                     std::span<const double> query, PromptStyle style,
                                     const SensingPromptOptions& options) {
    check_digits(options.precision_digits);
    if (style == PromptStyle::FewShot && examples.empty()) {
        throw InvalidParameter("few-shot prompts need at least one labeled example");
    }
    if (style == PromptStyle::ZeroShot && !examples.empty()) {
        throw InvalidParameter("zero-shot prompts take no labeled examples");
    }
    std::string example_block;
    for (std::size_t i = 0; i < examples.size(); ++i) {
        const auto& ex = examples[i];
        if (ex.observation.empty()) throw InvalidParameter("labeled example has no observation");
        example_block += "Example " + std::to_string(i + 1) + ":\nInput: " +
                         join_scientific(ex.observation, options.precision_digits) +
                         "\nOutput: " + std::string(to_string(ex.label)) + "\n\n";
    }
    std::string query_block;
    if (style == PromptStyle::ChainOfThought || style == PromptStyle::ChainOfThoughtWithProgram) {
        query_block += kSensingReasoning;
    }
    query_block += "Query:\nInput: " + join_scientific(query, options.precision_digits) + "\nOutput:";

    std::string user(options.user_template.empty() ? kDefaultSensingTemplate : options.user_template);
    replace_all(user, "{{task}}", kSensingTask);
    replace_all(user, "{{examples}}", example_block);
    replace_all(user, "{{query}}", query_block);
    return make_prompt(std::string(kSensingSystem), std::move(user), style);
}

RenderedPrompt render_power_prompt(const SubcarrierCnrs& cnrs, PowerBudget budget, PromptStyle style) {
    const std::size_t k = cnrs.size();
    std::string user = "Allocate transmit power across K = " + std::to_string(k) +
                       " OFDM subcarriers to maximize the sum capacity sum_k log2(1 + p_k * c_k) "
                       "subject to sum_k p_k = P and p_k >= 0.\n";
    user += kChannelLabel;
    user += '[';
    for (std::size_t i = 0; i < k; ++i) {
        if (i > 0) user += ", ";
        user += format_exact(cnrs[i]);
    }
    user += "]\n";
    user += kBudgetLabel;
    user += format_exact(budget.mw());
    user += "\n";
    switch (style) {
        case PromptStyle::ZeroShot:
        case PromptStyle::FewShot:
            user += "Report the power allocated to each subcarrier in mW.\n";
            break;
        case PromptStyle::ChainOfThought:
        case PromptStyle::ChainOfThoughtWithProgram:
            user +=
                "\nSolve the task step by step:\n"
                "1. State the optimization problem and its constraints.\n"
                "2. Derive the optimality conditions.\n"
                "3. Find the water level and the set of active subcarriers.\n"
                "4. Compute the power of every subcarrier and check the budget.\n";
            break;
    }
    if (style == PromptStyle::ChainOfThoughtWithProgram) {
        user +=
            "For each step, write a short runnable program that performs its computation.\n"
            "End your answer with a final line of exactly this form, listing the K powers in mW "
            "in subcarrier order:\nALLOCATION: p1, p2, ..., pK\n";
    }
    return make_prompt(std::string(kPowerSystem), std::move(user), style);
}

ParsedDecision parse_decision(std::string_view response) {
    static constexpr std::pair<std::string_view, Hypothesis> kTokens[] = {
        {"h0", Hypothesis::H0}, {"h1", Hypothesis::H1}, {"absent", Hypothesis::H0}, {"present", Hypothesis::H1}};
    std::optional<Hypothesis> last;
    for (std::size_t pos = 0; pos < response.size(); ++pos) {
        for (const auto& [word, h] : kTokens) {
            if (standalone_at(response, pos, word)) last = h;
        }
    }
    ParsedDecision out;
    if (last) {
        out.decision = last;
        return out;
    }
    std::size_t cut = std::min<std::size_t>(response.size(), 256);
    // do not split a UTF-8 sequence
    while (cut > 0 && cut < response.size() && (static_cast<unsigned char>(response[cut]) & 0xC0) == 0x80) --cut;
    out.raw_excerpt = std::string(response.substr(0, cut));
    return out;
}

std::vector<double> parse_allocation(std::string_view response, std::size_t k) {
    if (k == 0) throw InvalidParameter("allocation arity must be at least 1");
    constexpr std::string_view kMarker = "ALLOCATION:";
    std::optional<std::string_view> body;
    std::size_t start = 0;
    while (start <= response.size()) {
        std::size_t end = response.find('\n', start);
        if (end == std::string_view::npos) end = response.size();
        std::string_view line = response.substr(start, end - start);
        while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
        if (line.starts_with(kMarker)) body = line.substr(kMarker.size());
        start = end + 1;
    }
    if (!body) {
        throw AllocationParseError(AllocationParseError::Kind::MissingMarker, "response has no ALLOCATION: line");
    }
    std::vector<std::string_view> tokens;
    std::string_view rest = trim(*body);
    if (!rest.empty()) {
        std::size_t pos = 0;
        while (true) {
            const std::size_t comma = rest.find(',', pos);
            tokens.push_back(rest.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
            if (comma == std::string_view::npos) break;
            pos = comma + 1;
        }
    }
    if (tokens.size() != k) {
        throw AllocationParseError(AllocationParseError::Kind::Arity,
                                   "expected " + std::to_string(k) + " allocation values, found " +
                                       std::to_string(tokens.size()));
    }
    std::vector<double> out;
    out.reserve(k);
    for (std::string_view token : tokens) {
        const auto v = parse_finite(token);
        if (!v) {
            throw AllocationParseError(AllocationParseError::Kind::NonNumeric,
                                       "allocation value \"" + std::string(trim(token).substr(0, 64)) +
                                           "\" is not a finite number");
        }
        out.push_back(*v);
    }
    return out;
}

std::optional<std::vector<double>> extract_sensing_query(std::string_view user_text) {
    const std::size_t at = user_text.rfind(kQueryMarker);
    if (at == std::string_view::npos) return std::nullopt;
    const std::size_t open = at + kQueryMarker.size();
    const std::size_t close = user_text.find(']', open);
    if (close == std::string_view::npos) return std::nullopt;
    auto values = parse_list(user_text.substr(open, close - open));
    if (!values || values->empty()) return std::nullopt;
    return values;
}

std::optional<WaterfillProblem> extract_power_problem(std::string_view user_text) {
    const std::size_t at = user_text.find(kChannelLabel);
    const std::size_t budget_at = user_text.find(kBudgetLabel);
    if (at == std::string_view::npos || budget_at == std::string_view::npos) return std::nullopt;
    const std::size_t open = user_text.find('[', at);
    const std::size_t close = user_text.find(']', at);
    if (open == std::string_view::npos || close == std::string_view::npos || close < open) return std::nullopt;
    auto cnrs = parse_list(user_text.substr(open + 1, close - open - 1));
    const std::size_t budget_start = budget_at + kBudgetLabel.size();
    std::size_t budget_end = user_text.find('\n', budget_start);
    if (budget_end == std::string_view::npos) budget_end = user_text.size();
    auto budget = parse_finite(user_text.substr(budget_start, budget_end - budget_start));
    if (!cnrs || cnrs->empty() || !budget) return std::nullopt;
    try {
        return WaterfillProblem{SubcarrierCnrs(std::move(*cnrs)), PowerBudget(*budget)};
    } catch (const InvalidParameter&) {
        return std::nullopt;
    }
}

}  // namespace airkit
