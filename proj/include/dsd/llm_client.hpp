#pragma once

#include <chrono>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "dsd/errors.hpp"
#include "dsd/http_provider.hpp"
#include "dsd/llm.hpp"
#include "dsd/span.hpp"

namespace dsd {

struct LlmConfig {
    std::string endpoint;  // full URL of the chat-completions route
    std::string model_id;
    double temperature = 0.0;
    std::size_t max_retries = 3;  // additional attempts after a malformed response
    std::chrono::milliseconds timeout{60000};
    std::string api_key_env = "DSD_API_KEY";
};

struct LlmAttempt {
    std::string raw_response;
    std::string parse_error;  // empty when this attempt parsed
};

struct LlmAnnotation {
    bool ok = false;
    std::vector<SpanAnnotation> spans;
    std::string system_prompt;
    std::string user_prompt;
    std::vector<LlmAttempt> attempts;

    std::size_t attempt_count() const { return attempts.size(); }
};

struct ChatMessage {
    std::string role;
    std::string content;
};

/// Single chat-completion call; returns the first choice's message content.
inline std::string chat_complete(const LlmConfig& cfg, const std::vector<ChatMessage>& messages) {
    if (cfg.endpoint.empty()) throw ConfigError("llm: endpoint not configured");
    auto [base, path] = detail::split_url(cfg.endpoint);
    httplib::Client client(base);
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(cfg.timeout));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(cfg.timeout));

    httplib::Headers headers;
    if (const char* key = std::getenv(cfg.api_key_env.c_str()); key && *key)
        headers.emplace("Authorization", std::string("Bearer ") + key);

    nlohmann::json body;
    body["model"] = cfg.model_id;
    body["temperature"] = cfg.temperature;
    body["messages"] = nlohmann::json::array();
    for (const ChatMessage& m : messages)
        body["messages"].push_back({{"role", m.role}, {"content", m.content}});

    httplib::Result res = client.Post(path, headers, body.dump(), "application/json");
    if (!res)
        throw ProviderError("chat request failed: " + httplib::to_string(res.error()),
                            /*retryable=*/true);
    if (res->status != 200)
        throw ProviderError("chat endpoint returned " + std::to_string(res->status) + ": " +
                            res->body);
    nlohmann::json reply = nlohmann::json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.contains("choices") || reply["choices"].empty() ||
        !reply["choices"][0].contains("message"))
        throw ProviderError("malformed chat response: " + res->body.substr(0, 200));
    return reply["choices"][0]["message"].value("content", "");
}

/// Prompts for an annotated hypothesis and validates the reply. On a parse
/// failure the error is appended as a corrective user turn and the exchange
/// retried up to max_retries times; all raw responses are retained.
inline LlmAnnotation annotate_with_llm(const std::string& premise, const std::string& hypothesis,
                                       const LlmConfig& cfg) {
    LlmAnnotation result;
    PromptPair prompt = build_prompt(premise, hypothesis);
    result.system_prompt = prompt.system_prompt;
    result.user_prompt = prompt.user_prompt;

    std::vector<ChatMessage> messages{{"system", prompt.system_prompt},
                                      {"user", prompt.user_prompt}};
    for (std::size_t attempt = 0; attempt <= cfg.max_retries; ++attempt) {
        std::string raw = chat_complete(cfg, messages);
        LlmAttempt record{raw, ""};
        try {
            result.spans = parse_llm_annotation(raw, hypothesis);
            result.attempts.push_back(std::move(record));
            result.ok = true;
            return result;
        } catch (const LlmParseError& e) {
            record.parse_error = e.what();
            result.attempts.push_back(std::move(record));
            messages.push_back({"assistant", raw});
            messages.push_back({"user",
                                std::string("Your previous answer could not be parsed: ") +
                                    e.what() +
                                    " Please reply again with the annotated hypothesis enclosed "
                                    "in a ``` code block, changing only the \"{{\" and \"}}\" "
                                    "markers."});
        }
    }
    result.ok = false;
    return result;
}

}  // namespace dsd
