// airkit: command-line driver for the sensing, allocation and protocol-QA
// experiments. Exit codes: 0 ok, 1 unexpected, 2 config/input error,
// 3 backend error, 4 validation failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "airkit/harness.hpp"
#include "airkit/kernels.hpp"
#include "airkit/prompting.hpp"

namespace fs = std::filesystem;
using namespace airkit;

namespace {

int code(ExitCode c) { return static_cast<int>(c); }

void print_rows(const std::string& csv) { std::cout << csv; }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"airkit: spectrum sensing, water-filling and protocol-QA experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", toolkit_version());

    // sense-bench
    auto* sense = app.add_subcommand("sense-bench", "energy detector vs few-shot LLM detector across SNRs");
    fs::path sense_config;
    fs::path sense_out = "sense-bench-out";
    std::optional<std::size_t> sense_trials;
    std::optional<fs::path> sense_transcript;
    sense->add_option("--config", sense_config, "JSON config (reference preset when omitted)")->check(CLI::ExistingFile);
    sense->add_option("--out", sense_out, "output directory")->required();
    sense->add_option("--trials", sense_trials, "override energy_trials");
    sense->add_option("--transcript", sense_transcript, "record LLM exchanges to this JSON-lines file");

    // roc
    auto* roc_cmd = app.add_subcommand("roc", "Monte Carlo detection/false-alarm rates over target Pf values");
    RocParams roc_params;
    fs::path roc_out;
    roc_cmd->add_option("--noise-dbm", roc_params.noise_dbm)->capture_default_str();
    roc_cmd->add_option("--snr-db", roc_params.snr_db)->capture_default_str();
    roc_cmd->add_option("--n", roc_params.n)->capture_default_str();
    roc_cmd->add_option("--pf", roc_params.pf_grid, "target false-alarm values")->expected(1, -1);
    roc_cmd->add_option("--trials", roc_params.trials)->capture_default_str();
    roc_cmd->add_option("--seed", roc_params.seed)->capture_default_str();
    roc_cmd->add_option("--out", roc_out)->required();

    // waterfill
    auto* wf = app.add_subcommand("waterfill", "solve a power allocation problem or validate a proposal");
    WaterfillRequest wf_req;
    std::optional<fs::path> wf_backend;
    std::optional<fs::path> wf_out;
    std::optional<fs::path> wf_transcript;
    std::string wf_style = "cot-program";
    wf->add_option("--problem", wf_req.problem)->required()->check(CLI::ExistingFile);
    wf->add_option("--proposed", wf_req.proposed, "proposed solution JSON with powers_mw")->check(CLI::ExistingFile);
    wf->add_option("--tol", wf_req.tol)->capture_default_str();
    wf->add_option("--backend", wf_backend, "ask this backend for the allocation")->check(CLI::ExistingFile);
    wf->add_option("--style", wf_style, "prompt style for --backend")->capture_default_str();
    wf->add_option("--out", wf_out, "also write the document and a manifest here");
    wf->add_option("--transcript", wf_transcript);

    // rag
    auto* rag = app.add_subcommand("rag", "retrieval-augmented protocol QA");
    rag->require_subcommand(1);
    auto* ingest_cmd = rag->add_subcommand("ingest", "build a chunk index from a document corpus");
    fs::path docs_path, index_path;
    std::size_t chunk_tokens = 256, overlap_tokens = 64;
    ingest_cmd->add_option("--docs", docs_path)->required()->check(CLI::ExistingFile);
    ingest_cmd->add_option("--index", index_path)->required();
    ingest_cmd->add_option("--chunk-tokens", chunk_tokens)->capture_default_str();
    ingest_cmd->add_option("--overlap", overlap_tokens)->capture_default_str();

    auto* query_cmd = rag->add_subcommand("query", "print the top-k chunks for a question");
    std::string query_text;
    std::size_t k = 5;
    query_cmd->add_option("--index", index_path)->required()->check(CLI::ExistingFile);
    query_cmd->add_option("--k", k)->capture_default_str();
    query_cmd->add_option("--query,query", query_text)->required();

    auto* eval_cmd = rag->add_subcommand("eval", "answer a question file and grade per category");
    RagEvalParams eval_params;
    fs::path eval_backend;
    fs::path eval_out = "rag-eval-out";
    std::optional<fs::path> eval_transcript;
    eval_cmd->add_option("--index", eval_params.index);
    eval_cmd->add_option("--questions", eval_params.questions)->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--backend", eval_backend)->required()->check(CLI::ExistingFile);
    eval_cmd->add_option("--k", eval_params.k)->capture_default_str();
    eval_cmd->add_flag("--no-rag", eval_params.no_rag, "pure-LLM baseline without retrieved context");
    eval_cmd->add_option("--transcript", eval_transcript);
    eval_cmd->add_option("--out", eval_out)->capture_default_str();

    // frame
    auto* frame_cmd = app.add_subcommand("frame", "export one sensing frame as JSON");
    std::string truth = "H1";
    double noise_dbm = -100.0, snr_db = 0.0;
    std::size_t frame_n = 50;
    std::uint64_t frame_seed = 1;
    frame_cmd->add_option("--truth", truth)->check(CLI::IsMember({"H0", "H1"}));
    frame_cmd->add_option("--noise-dbm", noise_dbm);
    frame_cmd->add_option("--snr-db", snr_db);
    frame_cmd->add_option("--n", frame_n);
    frame_cmd->add_option("--seed", frame_seed);

    // rerun
    auto* rerun_cmd = app.add_subcommand("rerun", "re-execute a manifest offline and compare output digests");
    fs::path manifest_path, rerun_out;
    rerun_cmd->add_option("--manifest", manifest_path)->required()->check(CLI::ExistingFile);
    rerun_cmd->add_option("--out", rerun_out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : code(ExitCode::ConfigError);
    }

    try {
        if (*sense) {
            SenseBenchConfig config = sense_config.empty() ? SenseBenchConfig{} : SenseBenchConfig::load(sense_config);
            if (sense_trials) config.energy_trials = *sense_trials;
            RunOptions options;
            options.transcript = sense_transcript;
            const auto result = sense_bench(config, sense_out, options);
            print_rows(result.csv);
            for (const auto& s : result.llm) {
                if (!s.completed) std::cerr << "llm rows at " << s.snr_db << " dB aborted: " << s.error << "\n";
            }
            return code(result.backend_failed() ? ExitCode::BackendFailure : ExitCode::Ok);
        }
        if (*roc_cmd) {
            print_rows(rate_rows_to_csv(roc(roc_params, roc_out)));
            return 0;
        }
        if (*wf) {
            if (wf_backend) wf_req.backend = BackendConfig::load(*wf_backend);
            wf_req.style = parse_prompt_style(wf_style);
            RunOptions options;
            options.transcript = wf_transcript;
            const auto outcome = waterfill_command(wf_req, wf_out, options);
            std::cout << outcome.json << "\n";
            const bool ok = !outcome.verdict || outcome.verdict->kind == Verdict::Kind::Optimal;
            return code(ok ? ExitCode::Ok : ExitCode::ValidationFailure);
        }
        if (*ingest_cmd) {
            rag_ingest(docs_path, index_path, chunk_tokens, overlap_tokens);
            std::cout << "wrote " << index_path.string() << "\n";
            return 0;
        }
        if (*query_cmd) {
            const auto index = ChunkIndex::load(index_path);
            std::cout << format_ranked(index.retrieve(query_text, k));
            return 0;
        }
        if (*eval_cmd) {
            eval_params.backend = BackendConfig::load(eval_backend);
            RunOptions options;
            options.transcript = eval_transcript;
            const auto result = rag_eval(eval_params, eval_out, options);
            std::cout << result.report.to_table();
            return code(result.backend_errors > 0 ? ExitCode::BackendFailure : ExitCode::Ok);
        }
        if (*frame_cmd) {
            const auto frame = generate_frame(parse_hypothesis(truth), NoisePower::from_dbm(noise_dbm),
                                              SnrSpec::from_db(snr_db), frame_n, frame_seed);
            std::cout << frame_to_json(frame) << "\n";
            return 0;
        }
        if (*rerun_cmd) {
            const auto report = rerun_from_manifest(manifest_path, rerun_out);
            for (const auto& f : report.files) {
                std::cout << (f.match() ? "match    " : "MISMATCH ") << f.name << " " << f.actual << "\n";
            }
            return code(report.all_match() ? ExitCode::Ok : ExitCode::ValidationFailure);
        }
    } catch (const BackendError& e) {
        std::cerr << "backend error: " << e.what() << "\n";
        return code(ExitCode::BackendFailure);
    } catch (const AllocationParseError& e) {
        std::cerr << "could not read the model's allocation: " << e.what() << "\n";
        return code(ExitCode::ValidationFailure);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return code(ExitCode::ConfigError);
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return code(ExitCode::Unexpected);
    }
    return 0;
}
