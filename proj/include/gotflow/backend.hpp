#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gotflow/errors.hpp"

namespace gotflow {

struct GenerationSettings {
    std::string model = "gpt-4o-mini";
    double temperature = 0.0;  // deterministic by default
    int max_tokens = 1024;
    double timeout_seconds = 30.0;

    bool operator==(const GenerationSettings&) const = default;
};

/// One completion capability. Implementations must tolerate concurrent
/// complete() calls. `node_id` identifies the calling node so scripted mocks
/// can match on it and recordings can key by it.
class LLMBackend {
public:
    virtual ~LLMBackend() = default;

    /// Returns the completion text, or throws BackendError.
    virtual std::string complete(const std::string& node_id, const std::string& prompt,
                                 const GenerationSettings& settings) = 0;
};

// --- scripted mock -------------------------------------------------------

struct MockRule {
    enum class Match { node_id, prompt_substring };
    Match match = Match::node_id;
    std::string pattern;
    std::string response;
};

struct MockScript {
    std::vector<MockRule> rules;  // first matching rule wins
    std::optional<std::string> default_response;

    /// Load the CLI script format: a JSON object mapping node ids to
    /// responses. The key "*" sets the default response.
    static MockScript from_json(std::string_view text);
};

class MockBackend : public LLMBackend {
public:
    explicit MockBackend(MockScript script) : script_(std::move(script)) {}

    std::string complete(const std::string& node_id, const std::string& prompt,
                         const GenerationSettings& settings) override;

private:
    MockScript script_;
};

// --- record / replay ------------------------------------------------------

/// Wraps another backend and appends one JSON line per call to a cassette
/// file: {node_id, prompt_sha256, prompt, response, settings}. Failed calls
/// are logged with an "error" field and re-thrown. Appends are serialized
/// and flushed per record.
class RecordingBackend : public LLMBackend {
public:
    RecordingBackend(std::shared_ptr<LLMBackend> inner, std::filesystem::path cassette_path);

    std::string complete(const std::string& node_id, const std::string& prompt,
                         const GenerationSettings& settings) override;

private:
    std::shared_ptr<LLMBackend> inner_;
    std::filesystem::path path_;
    std::mutex mu_;
};

std::shared_ptr<LLMBackend> record_and_wrap(std::shared_ptr<LLMBackend> inner,
                                            std::filesystem::path cassette_path);

/// Answers from a cassette, keyed by (node_id, prompt digest), so an edited
/// prompt template invalidates its recording loudly instead of replaying a
/// stale answer.
class ReplayBackend : public LLMBackend {
public:
    static ReplayBackend from_cassette_file(const std::filesystem::path& path);
    static ReplayBackend from_cassette_text(std::string_view text);

    std::string complete(const std::string& node_id, const std::string& prompt,
                         const GenerationSettings& settings) override;

private:
    struct Entry {
        std::string response;
        bool is_error = false;
        std::string error_message;
    };
    std::map<std::pair<std::string, std::string>, Entry> entries_;
};

// --- OpenAI-compatible HTTP client ---------------------------------------

struct HttpBackendOptions {
    std::string base_url;  // e.g. "http://localhost:8089/v1"
    std::string api_key;   // sent as a bearer token when non-empty
    int max_retries = 3;   // retries after the first attempt
    int initial_backoff_ms = 250;

    /// Reads GF_API_BASE and GF_API_KEY from the process environment.
    static HttpBackendOptions from_env();
};

/// POSTs {base_url}/chat/completions with a single user message and returns
/// the first choice's message content verbatim. Transient failures
/// (connection errors, timeouts, 429, 5xx) are retried with exponential
/// backoff up to max_retries, then classified into a BackendError.
class HttpBackend : public LLMBackend {
public:
    explicit HttpBackend(HttpBackendOptions options);

    std::string complete(const std::string& node_id, const std::string& prompt,
                         const GenerationSettings& settings) override;

private:
    HttpBackendOptions options_;
};

}  // namespace gotflow
