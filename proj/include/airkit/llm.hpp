#pragma once
// Chat-completion boundary. One live HTTP backend plus offline backends
// (transcript replay, sensing oracle, water-filling oracle) so every pipeline
// runs without network access.

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "airkit/error.hpp"
#include "airkit/prompting.hpp"

namespace airkit {

enum class BackendKind { Http, ReplayFile, OracleSensing, OracleWaterfill };

std::string_view to_string(BackendKind kind);
BackendKind parse_backend_kind(std::string_view text);

struct BackendConfig {
    BackendKind kind = BackendKind::OracleSensing;
    std::string endpoint_url;  // Http: full chat-completions URL
    std::string model_name = "offline";
    std::string auth_token_env = "AIRKIT_API_KEY";  // name only, never the value
    double temperature = 0.0;
    std::size_t max_tokens = 512;
    std::size_t timeout_ms = 30000;
    std::size_t max_retries = 3;
    std::size_t backoff_base_ms = 500;
    std::size_t concurrency_limit = 1;
    std::filesystem::path replay_path;    // ReplayFile
    std::optional<double> oracle_eta_mw;  // OracleSensing, set by the harness

    void validate() const;
    std::string to_json() const;
    static BackendConfig from_json(std::string_view text);
    static BackendConfig load(const std::filesystem::path& path);
};

class BackendError : public Error {
  public:
    using Error::Error;
};

class ReplayMiss : public BackendError {
  public:
    explicit ReplayMiss(std::string fingerprint)
        : BackendError("replay miss: no recorded response for prompt " + fingerprint),
          fingerprint_(std::move(fingerprint)) {}
    const std::string& fingerprint() const { return fingerprint_; }

  private:
    std::string fingerprint_;
};

class CredentialMissing : public BackendError {
  public:
    using BackendError::BackendError;
};

class MalformedResponse : public BackendError {
  public:
    using BackendError::BackendError;
};

// Transport failure, or a retryable status that persisted through every retry.
class NetworkError : public BackendError {
  public:
    using BackendError::BackendError;
};

struct HttpRequest {
    std::string url;
    std::string body;
    std::string bearer_token;
    std::size_t timeout_ms = 0;
};

struct HttpResponse {
    int status = 0;
    std::string body;
    bool transport_error = false;  // no HTTP response at all (DNS, connect, timeout)
    std::string error;
};

using HttpTransport = std::function<HttpResponse(const HttpRequest&)>;
using Sleeper = std::function<void(std::chrono::milliseconds)>;

HttpTransport default_http_transport();

// {"model", "messages": [system, user], "temperature", "max_tokens"}
std::string chat_request_body(const BackendConfig& config, const RenderedPrompt& prompt);
// choices[0].message.content; MalformedResponse otherwise.
std::string chat_response_text(std::string_view body);

class Backend {
  public:
    virtual ~Backend() = default;
    virtual std::string complete(const RenderedPrompt& prompt) = 0;
};

// `transport` and `sleeper` default to the real network and a real sleep.
std::unique_ptr<Backend> make_backend(const BackendConfig& config, HttpTransport transport = {},
                                      Sleeper sleeper = {});

struct ChatExchange {
    std::string system_text;
    std::string user_text;
    std::string response_text;
    std::string model_name;
    double temperature = 0.0;
    std::size_t latency_ms = 0;
    std::string prompt_fingerprint;
    std::string timestamp;  // UTC, ISO 8601
};

std::string replay_key(std::string_view fingerprint, std::string_view model_name, double temperature);

// JSON-lines transcript: a header line, then one object per exchange.
// Appends are serialized; safe to share between worker threads.
class TranscriptWriter {
  public:
    TranscriptWriter(const std::filesystem::path& path, const BackendConfig& config);

    void append(const ChatExchange& exchange);
    void append_error(const RenderedPrompt& prompt, const BackendConfig& config, std::string_view message);

  private:
    std::mutex mutex_;
    std::ofstream out_;
};

std::vector<ChatExchange> load_transcript(const std::filesystem::path& path);

class LlmClient {
  public:
    explicit LlmClient(BackendConfig config, HttpTransport transport = {}, Sleeper sleeper = {});

    const BackendConfig& config() const { return config_; }
    // Optional; every exchange (or failure) is appended when set.
    void set_transcript(TranscriptWriter* writer) { transcript_ = writer; }

    ChatExchange complete(const RenderedPrompt& prompt);

  private:
    BackendConfig config_;
    std::unique_ptr<Backend> backend_;
    TranscriptWriter* transcript_ = nullptr;
};

struct CompletionResult {
    std::optional<ChatExchange> exchange;
    std::string error;  // set when exchange is empty
};

// Runs prompts with at most config().concurrency_limit in flight; results come
// back in prompt order regardless of completion order.
std::vector<CompletionResult> complete_all(LlmClient& client, std::span<const RenderedPrompt> prompts);

ChatExchange complete(const BackendConfig& config, const RenderedPrompt& prompt);

// Sends every prompt through the (Http) backend and writes the transcript;
// failures are recorded as error lines and do not stop the session.
void record_session(const BackendConfig& config, std::span<const RenderedPrompt> prompts,
                    const std::filesystem::path& transcript_path, HttpTransport transport = {},
                    Sleeper sleeper = {});

}  // namespace airkit
