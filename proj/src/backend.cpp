#include "gotflow/backend.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "gotflow/util.hpp"

namespace gotflow {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json settings_to_json(const GenerationSettings& s) {
    ordered_json j;
    j["model"] = s.model;
    j["temperature"] = s.temperature;
    j["max_tokens"] = s.max_tokens;
    j["timeout"] = s.timeout_seconds;
    return j;
}

void validate_settings(const GenerationSettings& s) {
    if (s.temperature < 0.0 || s.temperature > 2.0) {
        throw BackendError(BackendErrorKind::malformed_response,
                           "temperature must be in [0, 2]");
    }
    if (s.max_tokens <= 0) {
        throw BackendError(BackendErrorKind::malformed_response,
                           "max_tokens must be positive");
    }
}

}  // namespace

MockScript MockScript::from_json(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& ex) {
        throw BackendError(BackendErrorKind::malformed_response,
                           std::string("mock script is not valid JSON: ") + ex.what());
    }
    if (!doc.is_object()) {
        throw BackendError(BackendErrorKind::malformed_response,
                           "mock script must be a JSON object of node id -> response");
    }
    MockScript script;
    for (const auto& [key, value] : doc.items()) {
        if (!value.is_string()) {
            throw BackendError(BackendErrorKind::malformed_response,
                               "mock script value for \"" + key + "\" must be a string");
        }
        if (key == "*") {
            script.default_response = value.get<std::string>();
        } else {
            script.rules.push_back(
                {MockRule::Match::node_id, key, value.get<std::string>()});
        }
    }
    return script;
}

std::string MockBackend::complete(const std::string& node_id, const std::string& prompt,
                                  const GenerationSettings&) {
    for (const MockRule& rule : script_.rules) {
        const bool hit = rule.match == MockRule::Match::node_id
                             ? rule.pattern == node_id
                             : prompt.find(rule.pattern) != std::string::npos;
        if (hit) return rule.response;
    }
    if (script_.default_response) return *script_.default_response;
    throw BackendError(BackendErrorKind::no_rule_matched,
                       "no mock rule matched node '" + node_id + "'");
}

RecordingBackend::RecordingBackend(std::shared_ptr<LLMBackend> inner,
                                   std::filesystem::path cassette_path)
    : inner_(std::move(inner)), path_(std::move(cassette_path)) {}

std::string RecordingBackend::complete(const std::string& node_id, const std::string& prompt,
                                       const GenerationSettings& settings) {
    ordered_json record;
    record["node_id"] = node_id;
    record["prompt_sha256"] = sha256_hex(prompt);
    record["prompt"] = prompt;
    std::string response;
    std::string error;
    try {
        response = inner_->complete(node_id, prompt, settings);
        record["response"] = response;
    } catch (const std::exception& ex) {
        error = ex.what();
        record["error"] = error;
    }
    record["settings"] = settings_to_json(settings);

    {
        std::lock_guard<std::mutex> lock(mu_);
        std::ofstream out(path_, std::ios::app | std::ios::binary);
        if (!out) {
            throw IoError("cannot open cassette file " + path_.string());
        }
        out << record.dump() << '\n';
        out.flush();
        if (!out) {
            throw IoError("failed writing cassette file " + path_.string());
        }
    }
    if (!error.empty()) {
        throw BackendError(BackendErrorKind::io, error);
    }
    return response;
}

std::shared_ptr<LLMBackend> record_and_wrap(std::shared_ptr<LLMBackend> inner,
                                            std::filesystem::path cassette_path) {
    return std::make_shared<RecordingBackend>(std::move(inner), std::move(cassette_path));
}

ReplayBackend ReplayBackend::from_cassette_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open cassette file " + path.string());
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_cassette_text(text);
}

ReplayBackend ReplayBackend::from_cassette_text(std::string_view text) {
    ReplayBackend backend;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        const std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (line.empty()) continue;
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& ex) {
            throw BackendError(BackendErrorKind::malformed_response,
                               "cassette line " + std::to_string(line_no) +
                                   " is not valid JSON: " + ex.what());
        }
        if (!record.contains("node_id") || !record.contains("prompt_sha256")) {
            throw BackendError(BackendErrorKind::malformed_response,
                               "cassette line " + std::to_string(line_no) +
                                   " lacks node_id/prompt_sha256");
        }
        Entry entry;
        if (record.contains("error")) {
            entry.is_error = true;
            entry.error_message = record["error"].get<std::string>();
        } else if (record.contains("response")) {
            entry.response = record["response"].get<std::string>();
        } else {
            throw BackendError(BackendErrorKind::malformed_response,
                               "cassette line " + std::to_string(line_no) +
                                   " has neither response nor error");
        }
        backend.entries_[{record["node_id"].get<std::string>(),
                          record["prompt_sha256"].get<std::string>()}] = std::move(entry);
    }
    return backend;
}

std::string ReplayBackend::complete(const std::string& node_id, const std::string& prompt,
                                    const GenerationSettings&) {
    auto it = entries_.find({node_id, sha256_hex(prompt)});
    if (it == entries_.end()) {
        throw BackendError(BackendErrorKind::no_rule_matched,
                           "cassette has no recording for node '" + node_id +
                               "' with this prompt; the prompt template likely changed");
    }
    if (it->second.is_error) {
        throw BackendError(BackendErrorKind::io, it->second.error_message);
    }
    return it->second.response;
}

HttpBackendOptions HttpBackendOptions::from_env() {
    HttpBackendOptions options;
    if (const char* base = std::getenv("GF_API_BASE")) options.base_url = base;
    if (const char* key = std::getenv("GF_API_KEY")) options.api_key = key;
    return options;
}

HttpBackend::HttpBackend(HttpBackendOptions options) : options_(std::move(options)) {
    if (options_.base_url.empty()) {
        throw BackendError(BackendErrorKind::io,
                           "no API base URL configured (set GF_API_BASE)");
    }
}

std::string HttpBackend::complete(const std::string&, const std::string& prompt,
                                  const GenerationSettings& settings) {
    validate_settings(settings);

    // Split base_url into scheme://host[:port] and a path prefix.
    std::string base = options_.base_url;
    while (!base.empty() && base.back() == '/') base.pop_back();
    std::string host = base;
    std::string path_prefix;
    const std::size_t scheme = base.find("://");
    const std::size_t path_start = base.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    if (path_start != std::string::npos) {
        host = base.substr(0, path_start);
        path_prefix = base.substr(path_start);
    }
    const std::string path = path_prefix + "/chat/completions";

    ordered_json body;
    body["model"] = settings.model;
    body["messages"] = ordered_json::array({ordered_json{{"role", "user"}, {"content", prompt}}});
    body["temperature"] = settings.temperature;
    body["max_tokens"] = settings.max_tokens;
    const std::string payload = body.dump();

    httplib::Headers headers;
    if (!options_.api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + options_.api_key);
    }

    int backoff_ms = options_.initial_backoff_ms;
    std::optional<BackendError> last_error;
    for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
        if (attempt > 0) {
            std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
            backoff_ms *= 2;
        }

        httplib::Client client(host);
        const auto timeout_s = static_cast<time_t>(settings.timeout_seconds);
        const auto timeout_us = static_cast<time_t>(
            (settings.timeout_seconds - static_cast<double>(timeout_s)) * 1e6);
        client.set_connection_timeout(timeout_s, timeout_us);
        client.set_read_timeout(timeout_s, timeout_us);
        client.set_write_timeout(timeout_s, timeout_us);

        auto result = client.Post(path, headers, payload, "application/json");
        if (!result) {
            const auto err = result.error();
            const bool is_timeout = err == httplib::Error::ConnectionTimeout ||
                                    err == httplib::Error::Read || err == httplib::Error::Write;
            last_error = BackendError(
                is_timeout ? BackendErrorKind::timeout : BackendErrorKind::io,
                "request failed: " + httplib::to_string(err));
            continue;  // transient, retry
        }

        const int status = result->status;
        if (status == 429) {
            last_error = BackendError(BackendErrorKind::rate_limited,
                                      "rate limited (HTTP 429)", status);
            continue;
        }
        if (status >= 500) {
            last_error = BackendError(BackendErrorKind::http_status,
                                      "server error (HTTP " + std::to_string(status) + ")",
                                      status);
            continue;
        }
        if (status != 200) {
            throw BackendError(BackendErrorKind::http_status,
                               "unexpected HTTP status " + std::to_string(status), status);
        }

        nlohmann::json response;
        try {
            response = nlohmann::json::parse(result->body);
        } catch (const nlohmann::json::exception& ex) {
            throw BackendError(BackendErrorKind::malformed_response,
                               std::string("response is not valid JSON: ") + ex.what());
        }
        try {
            return response.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception&) {
            throw BackendError(BackendErrorKind::malformed_response,
                               "response lacks choices[0].message.content");
        }
    }
    throw *last_error;
}

}  // namespace gotflow
