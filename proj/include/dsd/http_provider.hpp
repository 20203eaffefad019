#pragma once

#include <cstdlib>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "dsd/errors.hpp"
#include "dsd/provider.hpp"

namespace dsd {

namespace detail {

/// Splits "http://host:port/some/path" into base and path parts for httplib.
inline std::pair<std::string, std::string> split_url(const std::string& url) {
    std::size_t scheme = url.find("://");
    if (scheme == std::string::npos) throw ConfigError("endpoint URL must include a scheme: " + url);
    std::size_t path = url.find('/', scheme + 3);
    if (path == std::string::npos) return {url, "/"};
    return {url.substr(0, path), url.substr(path)};
}

}  // namespace detail

/// OpenAI-compatible embedding endpoint: POST {"model", "input": [...]},
/// response {"data": [{"index", "embedding"}, ...]} re-ordered by index.
/// The bearer token is read from the environment variable named in the
/// config; requests time out per config. HTTP 5xx and transport failures are
/// retryable, 4xx is not.
class HttpEmbeddingBackend : public EmbeddingBackend {
public:
    explicit HttpEmbeddingBackend(ProviderConfig cfg) : cfg_(std::move(cfg)) {
        if (cfg_.endpoint.empty()) throw ConfigError("http provider requires an endpoint URL");
        std::tie(base_, path_) = detail::split_url(cfg_.endpoint);
    }

    std::string provider_id() const override { return "http:" + base_; }

    std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override {
        httplib::Client client(base_);
        client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(cfg_.timeout));
        client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(cfg_.timeout));

        httplib::Headers headers;
        if (const char* key = std::getenv(cfg_.api_key_env.c_str()); key && *key)
            headers.emplace("Authorization", std::string("Bearer ") + key);

        nlohmann::json body{{"model", cfg_.model_id}, {"input", texts}};
        httplib::Result res = client.Post(path_, headers, body.dump(), "application/json");
        if (!res)
            throw ProviderError("embedding request failed: " + httplib::to_string(res.error()),
                                /*retryable=*/true);
        if (res->status >= 500)
            throw ProviderError("embedding endpoint returned " + std::to_string(res->status),
                                /*retryable=*/true);
        if (res->status != 200)
            throw ProviderError("embedding endpoint returned " + std::to_string(res->status) +
                                ": " + res->body);

        nlohmann::json reply = nlohmann::json::parse(res->body, nullptr, false);
        if (reply.is_discarded() || !reply.contains("data") || !reply["data"].is_array())
            throw ProviderError("malformed embedding response: " + res->body.substr(0, 200));

        std::vector<std::vector<double>> out(texts.size());
        std::vector<bool> filled(texts.size(), false);
        for (const nlohmann::json& item : reply["data"]) {
            if (!item.contains("index") || !item.contains("embedding"))
                throw ProviderError("embedding response item missing index/embedding");
            std::size_t idx = item["index"].get<std::size_t>();
            if (idx >= texts.size()) throw ProviderError("embedding response index out of range");
            out[idx] = item["embedding"].get<std::vector<double>>();
            filled[idx] = true;
        }
        for (std::size_t i = 0; i < filled.size(); ++i)
            if (!filled[i])
                throw ProviderError("embedding response missing entry for input " + std::to_string(i));
        return out;
    }

private:
    ProviderConfig cfg_;
    std::string base_;
    std::string path_;
};

/// Builds a provider with the backend matching cfg.kind.
inline std::shared_ptr<EmbeddingProvider> make_embedding_provider(const ProviderConfig& cfg) {
    if (cfg.kind == ProviderKind::http_embedding)
        return std::make_shared<EmbeddingProvider>(cfg, std::make_shared<HttpEmbeddingBackend>(cfg));
    return std::make_shared<EmbeddingProvider>(cfg);
}

}  // namespace dsd
