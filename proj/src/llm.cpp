#include "airkit/llm.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <iterator>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "airkit/digest.hpp"
#include "airkit/kernels.hpp"
#include "airkit/waterfill.hpp"

namespace airkit {

std::string_view to_string(BackendKind kind) {
    switch (kind) {
        case BackendKind::Http: return "http";
        case BackendKind::ReplayFile: return "replay";
        case BackendKind::OracleSensing: return "oracle-sensing";
        case BackendKind::OracleWaterfill: return "oracle-waterfill";
    }
    return "unknown";
}

BackendKind parse_backend_kind(std::string_view text) {
    for (auto k : {BackendKind::Http, BackendKind::ReplayFile, BackendKind::OracleSensing,
                   BackendKind::OracleWaterfill}) {
        if (text == to_string(k)) return k;
    }
    throw InvalidParameter("unknown backend kind \"" + std::string(text) + "\"");
}

void BackendConfig::validate() const {
    if (concurrency_limit < 1) throw InvalidParameter("backend concurrency_limit must be at least 1");
    if (!(temperature >= 0.0)) throw InvalidParameter("backend temperature must be nonnegative");
    if (kind == BackendKind::Http && endpoint_url.empty()) throw InvalidParameter("http backend needs endpoint_url");
    if (kind == BackendKind::ReplayFile && replay_path.empty()) {
        throw InvalidParameter("replay backend needs replay_path");
    }
}

std::string BackendConfig::to_json() const {
    nlohmann::ordered_json j;
    j["kind"] = std::string(airkit::to_string(kind));
    j["endpoint_url"] = endpoint_url;
    j["model_name"] = model_name;
    j["auth_token_env"] = auth_token_env;
    j["temperature"] = temperature;
    j["max_tokens"] = max_tokens;
    j["timeout_ms"] = timeout_ms;
    j["max_retries"] = max_retries;
    j["backoff_base_ms"] = backoff_base_ms;
    j["concurrency_limit"] = concurrency_limit;
    j["replay_path"] = replay_path.string();
    if (oracle_eta_mw) j["oracle_eta_mw"] = *oracle_eta_mw;
    return j.dump();
}

BackendConfig BackendConfig::from_json(std::string_view text) {
    try {
        const auto j = nlohmann::json::parse(text);
        BackendConfig c;
        c.kind = parse_backend_kind(j.at("kind").get<std::string>());
        c.endpoint_url = j.value("endpoint_url", c.endpoint_url);
        c.model_name = j.value("model_name", c.model_name);
        c.auth_token_env = j.value("auth_token_env", c.auth_token_env);
        c.temperature = j.value("temperature", c.temperature);
        c.max_tokens = j.value("max_tokens", c.max_tokens);
        c.timeout_ms = j.value("timeout_ms", c.timeout_ms);
        c.max_retries = j.value("max_retries", c.max_retries);
        c.backoff_base_ms = j.value("backoff_base_ms", c.backoff_base_ms);
        c.concurrency_limit = j.value("concurrency_limit", c.concurrency_limit);
        c.replay_path = j.value("replay_path", std::string());
        if (j.contains("oracle_eta_mw") && !j.at("oracle_eta_mw").is_null()) {
            c.oracle_eta_mw = j.at("oracle_eta_mw").get<double>();
        }
        c.validate();
        return c;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("backend config: ") + e.what());
    }
}

BackendConfig BackendConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot read backend config " + path.string());
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    BackendConfig c = from_json(text);
    // relative replay paths resolve against the config file's directory
    if (!c.replay_path.empty() && c.replay_path.is_relative()) c.replay_path = path.parent_path() / c.replay_path;
    return c;
}

std::string chat_request_body(const BackendConfig& config, const RenderedPrompt& prompt) {
    nlohmann::ordered_json j;
    j["model"] = config.model_name;
    j["messages"] = nlohmann::ordered_json::array(
        {nlohmann::ordered_json{{"role", "system"}, {"content", prompt.system_text}},
         nlohmann::ordered_json{{"role", "user"}, {"content", prompt.user_text}}});
    j["temperature"] = config.temperature;
    j["max_tokens"] = config.max_tokens;
    return j.dump();
}

std::string chat_response_text(std::string_view body) {
    try {
        const auto j = nlohmann::json::parse(body);
        const auto& content = j.at("choices").at(0).at("message").at("content");
        if (!content.is_string()) throw MalformedResponse("chat response content is not a string");
        return content.get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw MalformedResponse(std::string("malformed chat response: ") + e.what());
    }
}

std::string replay_key(std::string_view fingerprint, std::string_view model_name, double temperature) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", temperature);
    std::string key(fingerprint);
    key += '|';
    key += model_name;
    key += '|';
    key += buf;
    return key;
}

namespace {

class HttpBackend final : public Backend {
  public:
    HttpBackend(BackendConfig config, HttpTransport transport, Sleeper sleeper)
        : config_(std::move(config)), transport_(std::move(transport)), sleeper_(std::move(sleeper)) {}

    std::string complete(const RenderedPrompt& prompt) override {
        const char* token = std::getenv(config_.auth_token_env.c_str());
        if (token == nullptr || *token == '\0') {
            throw CredentialMissing("environment variable " + config_.auth_token_env + " is not set");
        }
        const HttpRequest request{config_.endpoint_url, chat_request_body(config_, prompt), token, config_.timeout_ms};
        std::string last_failure;
        for (std::size_t attempt = 0; attempt <= config_.max_retries; ++attempt) {
            const HttpResponse response = transport_(request);
            const bool retryable = response.transport_error || response.status == 429 || response.status >= 500;
            if (!retryable) {
                if (response.status >= 200 && response.status < 300) return chat_response_text(response.body);
                throw BackendError("HTTP " + std::to_string(response.status) + ": " + response.body.substr(0, 200));
            }
            last_failure = response.transport_error ? response.error : "HTTP " + std::to_string(response.status);
            if (attempt < config_.max_retries) {
                sleeper_(std::chrono::milliseconds(config_.backoff_base_ms << attempt));
            }
        }
        throw NetworkError("request failed after " + std::to_string(config_.max_retries + 1) +
                           " attempts: " + last_failure);
    }

  private:
    BackendConfig config_;
    HttpTransport transport_;
    Sleeper sleeper_;
};

class ReplayBackend final : public Backend {
  public:
    explicit ReplayBackend(const BackendConfig& config) : model_(config.model_name), temperature_(config.temperature) {
        for (auto& ex : load_transcript(config.replay_path)) {
            // first occurrence wins
            responses_.try_emplace(replay_key(ex.prompt_fingerprint, ex.model_name, ex.temperature),
                                   std::move(ex.response_text));
        }
    }

    std::string complete(const RenderedPrompt& prompt) override {
        const auto it = responses_.find(replay_key(prompt.fingerprint, model_, temperature_));
        if (it == responses_.end()) throw ReplayMiss(prompt.fingerprint);
        return it->second;
    }

  private:
    std::string model_;
    double temperature_;
    std::unordered_map<std::string, std::string> responses_;
};

class OracleSensingBackend final : public Backend {
  public:
    explicit OracleSensingBackend(const BackendConfig& config) {
        if (!config.oracle_eta_mw) throw InvalidParameter("oracle-sensing backend needs oracle_eta_mw");
        eta_ = *config.oracle_eta_mw;
    }

    std::string complete(const RenderedPrompt& prompt) override {
        const auto values = extract_sensing_query(prompt.user_text);
        if (!values) throw MalformedResponse("oracle-sensing: prompt carries no query observation");
        const double mean = kernels::sum(*values) / static_cast<double>(values->size());
        return mean >= eta_ ? "H1" : "H0";
    }

  private:
    double eta_ = 0.0;
};

class OracleWaterfillBackend final : public Backend {
  public:
    std::string complete(const RenderedPrompt& prompt) override {
        const auto problem = extract_power_problem(prompt.user_text);
        if (!problem) throw MalformedResponse("oracle-waterfill: prompt carries no allocation problem");
        const Allocation alloc = waterfill(problem->cnrs, problem->budget);
        std::string out = "Water-filling over the active subcarriers.\nALLOCATION: ";
        char buf[40];
        for (std::size_t k = 0; k < alloc.powers_mw.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", alloc.powers_mw[k]);
            if (k > 0) out += ", ";
            out += buf;
        }
        return out;
    }
};

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

std::unique_ptr<Backend> make_backend(const BackendConfig& config, HttpTransport transport, Sleeper sleeper) {
    config.validate();
    switch (config.kind) {
        case BackendKind::Http:
            if (!transport) transport = default_http_transport();
            if (!sleeper) sleeper = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
            return std::make_unique<HttpBackend>(config, std::move(transport), std::move(sleeper));
        case BackendKind::ReplayFile: return std::make_unique<ReplayBackend>(config);
        case BackendKind::OracleSensing: return std::make_unique<OracleSensingBackend>(config);
        case BackendKind::OracleWaterfill: return std::make_unique<OracleWaterfillBackend>();
    }
    throw InvalidParameter("unsupported backend kind");
}

namespace {

const std::filesystem::path& with_parent_dir(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    return path;
}

}  // namespace

TranscriptWriter::TranscriptWriter(const std::filesystem::path& path, const BackendConfig& config)
    : out_(with_parent_dir(path), std::ios::binary | std::ios::trunc) {
    if (!out_) throw FormatError("cannot write transcript " + path.string());
    nlohmann::ordered_json header;
    header["airkit_transcript"] = 1;
    header["backend"] = std::string(to_string(config.kind));
    header["model_name"] = config.model_name;
    header["temperature"] = config.temperature;
    out_ << header.dump() << '\n';
    out_.flush();
}

void TranscriptWriter::append(const ChatExchange& ex) {
    nlohmann::ordered_json j;
    j["system_text"] = ex.system_text;
    j["user_text"] = ex.user_text;
    j["response_text"] = ex.response_text;
    j["model_name"] = ex.model_name;
    j["temperature"] = ex.temperature;
    j["latency_ms"] = ex.latency_ms;
    j["prompt_fingerprint"] = ex.prompt_fingerprint;
    j["timestamp"] = ex.timestamp;
    const std::string line = j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
    std::lock_guard lock(mutex_);
    out_ << line << '\n';
    out_.flush();
}

void TranscriptWriter::append_error(const RenderedPrompt& prompt, const BackendConfig& config,
                                    std::string_view message) {
    nlohmann::ordered_json j;
    j["error"] = std::string(message);
    j["prompt_fingerprint"] = prompt.fingerprint;
    j["model_name"] = config.model_name;
    j["temperature"] = config.temperature;
    j["timestamp"] = utc_now();
    const std::string line = j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
    std::lock_guard lock(mutex_);
    out_ << line << '\n';
    out_.flush();
}

std::vector<ChatExchange> load_transcript(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot read transcript " + path.string());
    std::vector<ChatExchange> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const auto j = nlohmann::json::parse(line);
            if (j.contains("airkit_transcript") || j.contains("error")) continue;
            ChatExchange ex;
            ex.system_text = j.at("system_text").get<std::string>();
            ex.user_text = j.at("user_text").get<std::string>();
            ex.response_text = j.at("response_text").get<std::string>();
            ex.model_name = j.at("model_name").get<std::string>();
            ex.temperature = j.value("temperature", 0.0);
            ex.latency_ms = j.value("latency_ms", std::size_t{0});
            ex.prompt_fingerprint = j.at("prompt_fingerprint").get<std::string>();
            ex.timestamp = j.value("timestamp", std::string());
            if (sha256_hex(canonical_prompt(ex.system_text, ex.user_text)) != ex.prompt_fingerprint) {
                throw FormatError("fingerprint does not match the recorded prompt");
            }
            out.push_back(std::move(ex));
        } catch (const nlohmann::json::exception& e) {
            throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        } catch (const FormatError& e) {
            throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

LlmClient::LlmClient(BackendConfig config, HttpTransport transport, Sleeper sleeper)
    : config_(std::move(config)), backend_(make_backend(config_, std::move(transport), std::move(sleeper))) {}

ChatExchange LlmClient::complete(const RenderedPrompt& prompt) {
    const auto start = std::chrono::steady_clock::now();
    std::string response;
    try {
        response = backend_->complete(prompt);
    } catch (const std::exception& e) {
        if (transcript_ != nullptr) transcript_->append_error(prompt, config_, e.what());
        throw;
    }
    const auto elapsed = std::chrono::steady_clock::now() - start;
    ChatExchange ex{prompt.system_text,
                    prompt.user_text,
                    std::move(response),
                    config_.model_name,
                    config_.temperature,
                    static_cast<std::size_t>(std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count()),
                    prompt.fingerprint,
                    utc_now()};
    if (transcript_ != nullptr) transcript_->append(ex);
    return ex;
}

std::vector<CompletionResult> complete_all(LlmClient& client, std::span<const RenderedPrompt> prompts) {
    std::vector<CompletionResult> results(prompts.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < prompts.size(); i = next++) {
            try {
                results[i].exchange = client.complete(prompts[i]);
            } catch (const std::exception& e) {
                results[i].error = e.what();
            }
        }
    };
    const std::size_t workers = std::min(client.config().concurrency_limit, prompts.size());
    if (workers <= 1) {
        worker();
        return results;
    }
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    pool.clear();
    return results;
}

ChatExchange complete(const BackendConfig& config, const RenderedPrompt& prompt) {
    LlmClient client(config);
    return client.complete(prompt);
}

void record_session(const BackendConfig& config, std::span<const RenderedPrompt> prompts,
                    const std::filesystem::path& transcript_path, HttpTransport transport, Sleeper sleeper) {
    LlmClient client(config, std::move(transport), std::move(sleeper));
    TranscriptWriter writer(transcript_path, config);
    client.set_transcript(&writer);
    complete_all(client, prompts);
}

}  // namespace airkit
