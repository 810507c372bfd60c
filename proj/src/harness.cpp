#include "airkit/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "airkit/digest.hpp"
#include "airkit/kernels.hpp"

namespace airkit {

using ojson = nlohmann::ordered_json;

#ifndef AIRKIT_VERSION
#define AIRKIT_VERSION "dev"
#endif

std::string toolkit_version() { return AIRKIT_VERSION; }

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot read " + path.string());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string shortest(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

ojson manifest_base(std::string_view command) {
    ojson m;
    m["command"] = std::string(command);
    m["toolkit_version"] = toolkit_version();
    return m;
}

// Outputs are written first, then the manifest with their digests.
void finish_manifest(ojson manifest, const std::filesystem::path& out_dir, const std::vector<std::string>& outputs) {
    ojson digests = ojson::object();
    for (const auto& name : outputs) digests[name] = sha256_file(out_dir / name);
    manifest["outputs"] = digests;
    write_file(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

ojson parse_object(std::string_view text) {
    try {
        return ojson::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(e.what());
    }
}

// Fisher-Yates driven by the counter-based generator.
template <typename T>
void seeded_shuffle(std::vector<T>& items, std::uint64_t seed) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::uint64_t r = splitmix64_at(seed, i);
        const std::size_t j = static_cast<std::size_t>(r % i);
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace

std::string rate_rows_to_csv(std::vector<RateRow> rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const RateRow& a, const RateRow& b) {
        if (a.snr_db != b.snr_db) return a.snr_db < b.snr_db;
        return a.method < b.method;
    });
    std::string out = kRateCsvHeader;
    out += '\n';
    for (const auto& r : rows) {
        out += shortest(r.snr_db) + ',' + std::to_string(r.n) + ',' + shortest(r.pf_target) + ',' + r.method + ',' +
               shortest(r.pd) + ',' + shortest(r.pf) + ',' + std::to_string(r.trials) + ',' + shortest(r.half_width) +
               '\n';
    }
    return out;
}

// ---------------------------------------------------------------------------
// sense-bench

void SenseBenchConfig::validate() const {
    if (snr_db_list.empty()) throw InvalidParameter("snr_db_list must not be empty");
    if (n_samples == 0 || few_shot_examples == 0 || test_prompts_per_snr == 0 || energy_trials == 0 || stride == 0) {
        throw InvalidParameter("sense-bench counts must all be at least 1");
    }
    if (few_shot_examples % 2 != 0) throw InvalidParameter("few_shot_examples must be even (split H0/H1)");
    if (precision_digits < 1 || precision_digits > kMaxPrecisionDigits) {
        throw InvalidParameter("precision_digits must lie in [1, 17]");
    }
    TargetFalseAlarm{pf_target};
    NoisePower::from_dbm(noise_dbm);
    for (double s : snr_db_list) SnrSpec::from_db(s);
    backend.validate();
}

std::string SenseBenchConfig::to_json() const {
    ojson j;
    j["snr_db_list"] = snr_db_list;
    j["noise_dbm"] = noise_dbm;
    j["pf_target"] = pf_target;
    j["n_samples"] = n_samples;
    j["few_shot_examples"] = few_shot_examples;
    j["test_prompts_per_snr"] = test_prompts_per_snr;
    j["energy_trials"] = energy_trials;
    j["stride"] = stride;
    j["precision_digits"] = precision_digits;
    j["seed"] = seed;
    j["prompt_template"] = prompt_template.string();
    j["backend"] = ojson::parse(backend.to_json());
    return j.dump();
}

SenseBenchConfig SenseBenchConfig::from_json(std::string_view text) {
    try {
        const auto j = nlohmann::json::parse(text);
        SenseBenchConfig c;
        c.snr_db_list = j.value("snr_db_list", c.snr_db_list);
        c.noise_dbm = j.value("noise_dbm", c.noise_dbm);
        c.pf_target = j.value("pf_target", c.pf_target);
        c.n_samples = j.value("n_samples", c.n_samples);
        c.few_shot_examples = j.value("few_shot_examples", c.few_shot_examples);
        c.test_prompts_per_snr = j.value("test_prompts_per_snr", c.test_prompts_per_snr);
        c.energy_trials = j.value("energy_trials", c.energy_trials);
        c.stride = j.value("stride", c.stride);
        c.precision_digits = j.value("precision_digits", c.precision_digits);
        c.seed = j.value("seed", c.seed);
        c.prompt_template = j.value("prompt_template", std::string());
        if (j.contains("backend")) c.backend = BackendConfig::from_json(j.at("backend").dump());
        c.validate();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("sense-bench config: ") + e.what());
    }
}

SenseBenchConfig SenseBenchConfig::load(const std::filesystem::path& path) {
    SenseBenchConfig c = from_json(read_file(path));
    const auto base = path.parent_path();
    if (!c.prompt_template.empty() && c.prompt_template.is_relative()) c.prompt_template = base / c.prompt_template;
    if (!c.backend.replay_path.empty() && c.backend.replay_path.is_relative()) {
        c.backend.replay_path = base / c.backend.replay_path;
    }
    return c;
}

bool SenseBenchResult::backend_failed() const {
    return std::any_of(llm.begin(), llm.end(), [](const LlmSnrSummary& s) { return !s.completed; });
}

SenseBenchResult run_sense_bench(const SenseBenchConfig& config, const RunOptions& options) {
    config.validate();
    const NoisePower noise = NoisePower::from_dbm(config.noise_dbm);
    const TargetFalseAlarm pf_target(config.pf_target);
    const std::size_t n = config.n_samples;
    const EnergyThreshold threshold = np_threshold(pf_target, n, noise);

    SenseBenchResult result;
    const std::uint64_t energy_root = derive_seed(config.seed, "energy");
    const std::uint64_t example_root = derive_seed(config.seed, "examples");
    const std::uint64_t query_root = derive_seed(config.seed, "queries");
    const std::uint64_t shuffle_root = derive_seed(config.seed, "shuffle");

    // Energy rows first: they never depend on the backend.
    for (std::size_t i = 0; i < config.snr_db_list.size(); ++i) {
        const SnrSpec snr = SnrSpec::from_db(config.snr_db_list[i]);
        const RatePair r = monte_carlo_rates(noise, snr, n, pf_target, config.energy_trials, derive_seed(energy_root, i));
        result.rows.push_back({snr.db(), n, pf_target.value(), "energy", r.pd, r.pf, r.trials, r.half_width});
    }

    SensingPromptOptions prompt_options;
    prompt_options.precision_digits = config.precision_digits;
    if (!config.prompt_template.empty()) prompt_options.user_template = load_prompt_template(config.prompt_template);

    BackendConfig backend = config.backend;
    if (backend.kind == BackendKind::OracleSensing) backend.oracle_eta_mw = threshold.eta_mw;
    LlmClient client(backend, options.transport);
    std::optional<TranscriptWriter> transcript;
    if (options.transcript) {
        transcript.emplace(*options.transcript, backend);
        client.set_transcript(&*transcript);
    }

    const std::size_t per_label = config.few_shot_examples / 2;
    const std::size_t queries = config.test_prompts_per_snr;
    for (std::size_t i = 0; i < config.snr_db_list.size(); ++i) {
        const SnrSpec snr = SnrSpec::from_db(config.snr_db_list[i]);
        const std::uint64_t example_seed = derive_seed(example_root, i);
        const std::uint64_t query_seed = derive_seed(query_root, i);

        std::vector<LabeledExample> examples;
        for (std::size_t e = 0; e < 2 * per_label; ++e) {
            const Hypothesis label = e < per_label ? Hypothesis::H0 : Hypothesis::H1;
            const auto frame = generate_frame(label, noise, snr, n, derive_seed(example_seed, e));
            examples.push_back({downsample(frame, config.stride, config.precision_digits), label});
        }
        seeded_shuffle(examples, derive_seed(shuffle_root, i));

        std::vector<RenderedPrompt> prompts;
        std::vector<Hypothesis> truths;
        std::size_t energy_present[2] = {0, 0};
        for (Hypothesis h : {Hypothesis::H0, Hypothesis::H1}) {
            for (std::size_t q = 0; q < queries; ++q) {
                const auto frame =
                    generate_frame(h, noise, snr, n, derive_seed(query_seed, 2 * q + (h == Hypothesis::H1 ? 1 : 0)));
                if (detect(empirical_energy(frame), threshold) == Decision::Present) {
                    ++energy_present[h == Hypothesis::H1 ? 1 : 0];
                }
                const auto observation = downsample(frame, config.stride, config.precision_digits);
                prompts.push_back(render_sensing_prompt(examples, observation, PromptStyle::FewShot, prompt_options));
                truths.push_back(h);
            }
        }

        LlmSnrSummary summary;
        summary.snr_db = snr.db();
        const double denom = static_cast<double>(queries);
        summary.energy_on_queries = {energy_present[1] / denom, energy_present[0] / denom, queries,
                                     binomial_half_width(queries)};

        const auto completions = complete_all(client, prompts);
        const auto failed = std::find_if(completions.begin(), completions.end(),
                                         [](const CompletionResult& c) { return !c.exchange.has_value(); });
        if (failed != completions.end()) {
            summary.error = failed->error;
        } else {
            std::size_t present[2] = {0, 0};
            for (std::size_t p = 0; p < completions.size(); ++p) {
                const ParsedDecision parsed = parse_decision(completions[p].exchange->response_text);
                if (!parsed.decided()) ++summary.unparseable;
                // unparseable counts as Absent
                if (parsed.decision == Hypothesis::H1) ++present[truths[p] == Hypothesis::H1 ? 1 : 0];
            }
            summary.completed = true;
            summary.llm = {present[1] / denom, present[0] / denom, queries, binomial_half_width(queries)};
            result.rows.push_back({snr.db(), n, pf_target.value(), "llm", summary.llm.pd, summary.llm.pf, queries,
                                   summary.llm.half_width});
        }
        result.llm.push_back(std::move(summary));
    }
    result.csv = rate_rows_to_csv(result.rows);
    return result;
}

SenseBenchResult sense_bench(const SenseBenchConfig& config, const std::filesystem::path& out_dir,
                             const RunOptions& options) {
    SenseBenchResult result = run_sense_bench(config, options);
    write_file(out_dir / "results.csv", result.csv);

    ojson m = manifest_base("sense-bench");
    m["config"] = ojson::parse(config.to_json());
    const auto threshold = np_threshold(TargetFalseAlarm(config.pf_target), config.n_samples,
                                        NoisePower::from_dbm(config.noise_dbm));
    m["parameters"] = {{"threshold_mw", threshold.eta_mw},
                       {"threshold_nonpositive", threshold.nonpositive()},
                       {"stride", config.stride},
                       {"precision_digits", config.precision_digits},
                       {"examples_per_hypothesis", config.few_shot_examples / 2},
                       {"queries_per_hypothesis", config.test_prompts_per_snr},
                       {"h1_examples_at_test_snr", true},
                       {"unparseable_maps_to", "absent"},
                       {"oracle_exact_mode", config.stride == 1 && config.precision_digits == kMaxPrecisionDigits}};
    m["seeds"] = {{"root", config.seed},
                  {"energy", derive_seed(config.seed, "energy")},
                  {"examples", derive_seed(config.seed, "examples")},
                  {"queries", derive_seed(config.seed, "queries")},
                  {"shuffle", derive_seed(config.seed, "shuffle")}};
    ojson llm = ojson::array();
    for (const auto& s : result.llm) {
        ojson e;
        e["snr_db"] = s.snr_db;
        e["completed"] = s.completed;
        if (!s.completed) e["error"] = s.error;
        e["unparseable"] = s.unparseable;
        e["energy_on_queries"] = {{"pd", s.energy_on_queries.pd}, {"pf", s.energy_on_queries.pf}};
        llm.push_back(std::move(e));
    }
    m["llm"] = std::move(llm);
    finish_manifest(std::move(m), out_dir, {"results.csv"});
    return result;
}

// ---------------------------------------------------------------------------
// roc

std::vector<RateRow> run_roc(const RocParams& params) {
    if (params.pf_grid.empty()) throw InvalidParameter("roc needs at least one pf value");
    const NoisePower noise = NoisePower::from_dbm(params.noise_dbm);
    const SnrSpec snr = SnrSpec::from_db(params.snr_db);
    std::vector<RateRow> rows;
    for (double pf : params.pf_grid) {
        const RatePair r = monte_carlo_rates(noise, snr, params.n, TargetFalseAlarm(pf), params.trials, params.seed);
        rows.push_back({snr.db(), params.n, pf, "energy", r.pd, r.pf, r.trials, r.half_width});
    }
    return rows;
}

std::vector<RateRow> roc(const RocParams& params, const std::filesystem::path& out_dir) {
    auto rows = run_roc(params);
    write_file(out_dir / "roc.csv", rate_rows_to_csv(rows));
    ojson m = manifest_base("roc");
    m["config"] = {{"noise_dbm", params.noise_dbm}, {"snr_db", params.snr_db}, {"n", params.n},
                   {"pf_grid", params.pf_grid},     {"trials", params.trials}, {"seed", params.seed}};
    finish_manifest(std::move(m), out_dir, {"roc.csv"});
    return rows;
}

// ---------------------------------------------------------------------------
// waterfill

WaterfillOutcome run_waterfill(const WaterfillRequest& request, const RunOptions& options) {
    if (!(request.tol > 0.0)) throw InvalidParameter("tolerance must be positive");
    const WaterfillProblem problem = problem_from_json(read_file(request.problem));
    WaterfillOutcome out;
    std::optional<std::vector<double>> proposal;
    if (request.proposed) {
        proposal = proposed_powers_from_json(read_file(*request.proposed));
    } else if (request.backend) {
        LlmClient client(*request.backend, options.transport);
        std::optional<TranscriptWriter> transcript;
        if (options.transcript) {
            transcript.emplace(*options.transcript, *request.backend);
            client.set_transcript(&*transcript);
        }
        const auto prompt = render_power_prompt(problem.cnrs, problem.budget, request.style);
        out.llm_response = client.complete(prompt).response_text;
        proposal = parse_allocation(out.llm_response, problem.cnrs.size());
    }
    if (!proposal) {
        out.json = allocation_to_json(waterfill(problem.cnrs, problem.budget));
        return out;
    }
    out.verdict = validate_external_solution(*proposal, problem.cnrs, problem.budget, request.tol);
    out.json = verdict_to_json(*out.verdict);
    return out;
}

WaterfillOutcome waterfill_command(const WaterfillRequest& request, const std::optional<std::filesystem::path>& out_dir,
                                   const RunOptions& options) {
    WaterfillOutcome out = run_waterfill(request, options);
    if (out_dir) {
        const std::string name = out.verdict ? "verdict.json" : "solution.json";
        write_file(*out_dir / name, out.json + "\n");
        ojson m = manifest_base("waterfill");
        m["config"] = {{"problem", request.problem.string()},
                       {"proposed", request.proposed ? request.proposed->string() : std::string()},
                       {"tol", request.tol},
                       {"style", std::string(to_string(request.style))}};
        if (request.backend) m["config"]["backend"] = ojson::parse(request.backend->to_json());
        m["inputs"] = {{"problem", sha256_file(request.problem)}};
        finish_manifest(std::move(m), *out_dir, {name});
    }
    return out;
}

// ---------------------------------------------------------------------------
// rag

void rag_ingest(const std::filesystem::path& docs, const std::filesystem::path& index_path, std::size_t chunk_tokens,
                std::size_t overlap_tokens) {
    const auto records = documents_from_json(read_file(docs));
    const ChunkIndex index = ingest(records, chunk_tokens, overlap_tokens);
    if (index_path.has_parent_path()) std::filesystem::create_directories(index_path.parent_path());
    index.save(index_path);
    ojson m = manifest_base("rag-ingest");
    m["config"] = {{"docs", docs.string()},
                   {"index", index_path.string()},
                   {"chunk_tokens", chunk_tokens},
                   {"overlap_tokens", overlap_tokens},
                   {"k1", index.params().k1},
                   {"b", index.params().b}};
    m["inputs"] = {{"docs", sha256_file(docs)}};
    m["outputs"] = {{index_path.filename().string(), sha256_file(index_path)}};
    write_file(index_path.string() + ".manifest.json", m.dump(2) + "\n");
}

std::string format_ranked(const std::vector<ScoredChunk>& ranked) {
    std::string out;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        const Chunk& c = *ranked[i].chunk;
        char score[32];
        std::snprintf(score, sizeof score, "%.6f", ranked[i].score);
        out += std::to_string(i + 1) + ". score=" + score + " doc=" + c.doc_id + " source=" + c.source +
               " chars=" + std::to_string(c.start_char) + "-" + std::to_string(c.end_char) + "\n";
        std::string preview = c.text.substr(0, 160);
        std::replace(preview.begin(), preview.end(), '\n', ' ');
        out += "   " + preview + (c.text.size() > 160 ? "..." : "") + "\n";
    }
    return out;
}

RagEvalResult run_rag_eval(const RagEvalParams& params, const RunOptions& options) {
    if (params.k == 0) throw InvalidParameter("k must be at least 1");
    const auto questions = questions_from_json(read_file(params.questions));
    std::optional<ChunkIndex> index;
    if (!params.no_rag) {
        if (!std::filesystem::exists(params.index)) throw FormatError("index not found: " + params.index.string());
        index = ChunkIndex::load(params.index);
    }
    std::vector<RenderedPrompt> prompts;
    prompts.reserve(questions.size());
    for (const auto& q : questions) {
        std::vector<const Chunk*> contexts;
        if (index) {
            for (const auto& hit : index->retrieve(q.question, params.k)) contexts.push_back(hit.chunk);
        }
        prompts.push_back(augment(q, contexts));
    }

    LlmClient client(params.backend, options.transport);
    std::optional<TranscriptWriter> transcript;
    if (options.transcript) {
        transcript.emplace(*options.transcript, params.backend);
        client.set_transcript(&*transcript);
    }
    const auto completions = complete_all(client, prompts);

    RagEvalResult result;
    std::vector<std::optional<std::size_t>> predictions;
    for (std::size_t i = 0; i < questions.size(); ++i) {
        if (!completions[i].exchange) {
            ++result.backend_errors;
            predictions.push_back(std::nullopt);
            continue;
        }
        predictions.push_back(parse_choice(completions[i].exchange->response_text, questions[i].options.size()));
    }
    result.report = grade(predictions, questions);
    return result;
}

RagEvalResult rag_eval(const RagEvalParams& params, const std::filesystem::path& out_dir, const RunOptions& options) {
    RagEvalResult result = run_rag_eval(params, options);
    write_file(out_dir / "report.json", result.report.to_json() + "\n");
    write_file(out_dir / "report.txt", result.report.to_table());
    ojson m = manifest_base("rag-eval");
    m["config"] = {{"index", params.index.string()},
                   {"questions", params.questions.string()},
                   {"k", params.k},
                   {"no_rag", params.no_rag},
                   {"backend", ojson::parse(params.backend.to_json())}};
    ojson inputs = {{"questions", sha256_file(params.questions)}};
    if (!params.no_rag) inputs["index"] = sha256_file(params.index);
    m["inputs"] = std::move(inputs);
    m["backend_errors"] = result.backend_errors;
    finish_manifest(std::move(m), out_dir, {"report.json", "report.txt"});
    return result;
}

// ---------------------------------------------------------------------------
// rerun

bool RerunReport::all_match() const {
    return !files.empty() && std::all_of(files.begin(), files.end(), [](const FileCheck& f) { return f.match(); });
}

RerunReport rerun_from_manifest(const std::filesystem::path& manifest_path, const std::filesystem::path& out_dir,
                                const RunOptions& options) {
    const ojson m = parse_object(read_file(manifest_path));
    RerunReport report;
    try {
        report.command = m.at("command").get<std::string>();
        const auto& cfg = m.at("config");
        if (report.command == "sense-bench") {
            const auto config = SenseBenchConfig::from_json(cfg.dump());
            if (config.backend.kind == BackendKind::Http) {
                throw InvalidParameter("rerun needs an offline backend (replay or oracle)");
            }
            sense_bench(config, out_dir, options);
        } else if (report.command == "roc") {
            RocParams p;
            p.noise_dbm = cfg.at("noise_dbm").get<double>();
            p.snr_db = cfg.at("snr_db").get<double>();
            p.n = cfg.at("n").get<std::size_t>();
            p.pf_grid = cfg.at("pf_grid").get<std::vector<double>>();
            p.trials = cfg.at("trials").get<std::size_t>();
            p.seed = cfg.at("seed").get<std::uint64_t>();
            roc(p, out_dir);
        } else if (report.command == "rag-eval") {
            RagEvalParams p;
            p.index = cfg.at("index").get<std::string>();
            p.questions = cfg.at("questions").get<std::string>();
            p.k = cfg.at("k").get<std::size_t>();
            p.no_rag = cfg.at("no_rag").get<bool>();
            p.backend = BackendConfig::from_json(cfg.at("backend").dump());
            if (p.backend.kind == BackendKind::Http) {
                throw InvalidParameter("rerun needs an offline backend (replay or oracle)");
            }
            const auto& inputs = m.at("inputs");
            if (sha256_file(p.questions) != inputs.at("questions").get<std::string>() ||
                (!p.no_rag && sha256_file(p.index) != inputs.at("index").get<std::string>())) {
                throw FormatError("rag-eval inputs changed since the manifest was written");
            }
            rag_eval(p, out_dir, options);
        } else {
            throw InvalidParameter("rerun does not support command \"" + report.command + "\"");
        }
        for (const auto& [name, digest] : m.at("outputs").items()) {
            report.files.push_back({name, digest.get<std::string>(), sha256_file(out_dir / name)});
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("manifest " + manifest_path.string() + ": " + e.what());
    }
    return report;
}

}  // namespace airkit
