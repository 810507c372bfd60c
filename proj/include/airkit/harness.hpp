#pragma once
// Experiment drivers behind the command-line tool. Each command writes its
// outputs plus a manifest.json that is enough to rerun it offline and compare
// output digests byte for byte.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "airkit/detector.hpp"
#include "airkit/llm.hpp"
#include "airkit/ragstore.hpp"
#include "airkit/waterfill.hpp"

namespace airkit {

// Process exit codes of the CLI.
enum class ExitCode : int {
    Ok = 0,
    Unexpected = 1,
    ConfigError = 2,        // bad arguments, unreadable or malformed input files
    BackendFailure = 3,     // LLM backend errors (network, replay miss, credentials)
    ValidationFailure = 4,  // non-optimal proposal, rerun digest mismatch
};

std::string toolkit_version();

// One line of the detector CSV: snr_db,n,pf_target,method,pd,pf,trials,half_width
struct RateRow {
    double snr_db = 0.0;
    std::size_t n = 0;
    double pf_target = 0.0;
    std::string method;  // "energy" or "llm"
    double pd = 0.0;
    double pf = 0.0;
    std::size_t trials = 0;
    double half_width = 0.0;
};

inline constexpr const char* kRateCsvHeader = "snr_db,n,pf_target,method,pd,pf,trials,half_width";

// Stable-sorts by (snr_db, method) and renders the CSV, header included.
std::string rate_rows_to_csv(std::vector<RateRow> rows);

// Defaults are the reference preset; every field can be overridden from JSON.
struct SenseBenchConfig {
    std::vector<double> snr_db_list{-20.0, -10.0, -6.0, 0.0};
    double noise_dbm = -100.0;
    double pf_target = 0.5;
    std::size_t n_samples = 50;
    std::size_t few_shot_examples = 20;     // split evenly between H0 and H1
    std::size_t test_prompts_per_snr = 20;  // per hypothesis
    std::size_t energy_trials = 100;
    std::size_t stride = kDefaultStride;
    int precision_digits = kDefaultPrecisionDigits;
    std::uint64_t seed = 1;
    std::filesystem::path prompt_template;  // optional override
    BackendConfig backend;

    void validate() const;
    std::string to_json() const;
    static SenseBenchConfig from_json(std::string_view text);
    static SenseBenchConfig load(const std::filesystem::path& path);
};

struct LlmSnrSummary {
    double snr_db = 0.0;
    bool completed = false;
    std::string error;
    std::size_t unparseable = 0;
    RatePair llm;                // on the query frames
    RatePair energy_on_queries;  // energy detector on the very same query frames
};

struct SenseBenchResult {
    std::vector<RateRow> rows;
    std::vector<LlmSnrSummary> llm;
    std::string csv;
    bool backend_failed() const;
};

struct RunOptions {
    std::optional<std::filesystem::path> transcript;  // record exchanges here
    HttpTransport transport;                          // tests inject a fake network
};

SenseBenchResult run_sense_bench(const SenseBenchConfig& config, const RunOptions& options = {});
// Writes results.csv and manifest.json into out_dir.
SenseBenchResult sense_bench(const SenseBenchConfig& config, const std::filesystem::path& out_dir,
                             const RunOptions& options = {});

struct RocParams {
    double noise_dbm = -100.0;
    double snr_db = 0.0;
    std::size_t n = 50;
    std::vector<double> pf_grid{0.5};
    std::size_t trials = 100000;
    std::uint64_t seed = 1;
};

// Every pf_target reuses the same frames (same seed), so the rows are paired.
std::vector<RateRow> run_roc(const RocParams& params);
// Writes roc.csv and manifest.json.
std::vector<RateRow> roc(const RocParams& params, const std::filesystem::path& out_dir);

struct WaterfillRequest {
    std::filesystem::path problem;
    std::optional<std::filesystem::path> proposed;
    // Ask a backend for the allocation instead of reading a proposal file.
    std::optional<BackendConfig> backend;
    PromptStyle style = PromptStyle::ChainOfThoughtWithProgram;
    double tol = 1e-6;
};

struct WaterfillOutcome {
    std::string json;  // solution or verdict document
    std::optional<Verdict> verdict;
    std::string llm_response;
};

WaterfillOutcome run_waterfill(const WaterfillRequest& request, const RunOptions& options = {});
WaterfillOutcome waterfill_command(const WaterfillRequest& request, const std::optional<std::filesystem::path>& out_dir,
                                   const RunOptions& options = {});

void rag_ingest(const std::filesystem::path& docs, const std::filesystem::path& index_path,
                std::size_t chunk_tokens, std::size_t overlap_tokens);

std::string format_ranked(const std::vector<ScoredChunk>& ranked);

struct RagEvalParams {
    std::filesystem::path index;
    std::filesystem::path questions;
    BackendConfig backend;
    std::size_t k = 5;
    bool no_rag = false;
};

struct RagEvalResult {
    EvalReport report;
    std::size_t backend_errors = 0;
};

// retrieve -> augment -> complete -> parse_choice -> grade. Failed completions
// count as unparseable and are tallied in backend_errors.
RagEvalResult run_rag_eval(const RagEvalParams& params, const RunOptions& options = {});
// Writes report.json, report.txt and manifest.json.
RagEvalResult rag_eval(const RagEvalParams& params, const std::filesystem::path& out_dir,
                       const RunOptions& options = {});

struct FileCheck {
    std::string name;
    std::string expected;
    std::string actual;
    bool match() const { return expected == actual; }
};

struct RerunReport {
    std::string command;
    std::vector<FileCheck> files;
    bool all_match() const;
};

// Re-executes the command described by a manifest into out_dir and compares
// output digests.
RerunReport rerun_from_manifest(const std::filesystem::path& manifest, const std::filesystem::path& out_dir,
                                const RunOptions& options = {});

}  // namespace airkit
