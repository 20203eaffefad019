#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dsd/embedding.hpp"
#include "dsd/errors.hpp"
#include "dsd/rng.hpp"

namespace dsd {

enum class ProviderKind { http_embedding, cached_file, deterministic_mock };

struct ProviderConfig {
    ProviderKind kind = ProviderKind::deterministic_mock;
    std::string endpoint;                    // http_embedding: full URL of the embeddings route
    std::string model_id = "hash-16";
    std::string api_key_env = "DSD_API_KEY";  // bearer token read from this variable
    std::size_t max_batch_size = 64;
    std::size_t max_in_flight = 4;
    std::chrono::milliseconds timeout{30000};
    std::size_t max_retries = 2;             // network-level retries per request
    std::string cache_path;                  // persistent cache file; empty = in-memory only
    std::size_t mock_dimension = 16;
    std::uint64_t mock_seed = 0;
    bool allow_empty_text = false;           // mock accepts ""; http providers reject it
};

/// Raw transport: one call, one request. Implementations must be safe to call
/// from multiple threads.
class EmbeddingBackend {
public:
    virtual ~EmbeddingBackend() = default;
    virtual std::string provider_id() const = 0;
    virtual bool accepts_empty_text() const { return false; }
    virtual std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) = 0;
};

/// Deterministic offline stand-in: unit-norm vector derived from a seeded
/// hash of the text. Specific texts can be planted with fixed vectors so
/// tests can construct exact similarity landscapes.
class MockBackend : public EmbeddingBackend {
public:
    explicit MockBackend(std::size_t dimension = 16, std::uint64_t seed = 0)
        : dimension_(dimension), seed_(seed) {}

    std::string provider_id() const override { return "mock"; }
    bool accepts_empty_text() const override { return true; }

    void plant(const std::string& text, std::vector<double> vec) {
        std::lock_guard lock(mutex_);
        planted_[text] = std::move(vec);
    }

    std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override {
        std::vector<std::vector<double>> out;
        out.reserve(texts.size());
        for (const std::string& t : texts) out.push_back(vector_for(t));
        return out;
    }

    std::vector<double> vector_for(const std::string& text) const {
        {
            std::lock_guard lock(mutex_);
            auto it = planted_.find(text);
            if (it != planted_.end()) return it->second;
        }
        std::uint64_t state = fnv1a64(text) ^ (seed_ * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL);
        std::vector<double> v(dimension_);
        double norm2 = 0.0;
        for (double& x : v) {
            x = 2.0 * (static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53) - 1.0;
            norm2 += x * x;
        }
        if (norm2 < 1e-12) {
            v.assign(dimension_, 0.0);
            v[0] = 1.0;
            return v;
        }
        double inv = 1.0 / std::sqrt(norm2);
        for (double& x : v) x *= inv;
        return v;
    }

private:
    std::size_t dimension_;
    std::uint64_t seed_;
    mutable std::mutex mutex_;
    std::unordered_map<std::string, std::vector<double>> planted_;
};

/// Backend for cache-only operation: every miss is an error.
class CacheOnlyBackend : public EmbeddingBackend {
public:
    std::string provider_id() const override { return "cached-file"; }
    std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override {
        throw ProviderError("cache-only provider has no embedding for: '" +
                            (texts.empty() ? std::string() : texts.front()) + "'");
    }
};

/// Append-only embedding store: one JSON record per line, loaded into memory
/// on open. Appends are serialized and flushed; readers share the in-memory
/// index.
class EmbeddingCache {
public:
    explicit EmbeddingCache(std::string path = {}) : path_(std::move(path)) {
        if (path_.empty()) return;
        std::ifstream in(path_);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            nlohmann::json rec = nlohmann::json::parse(line, nullptr, false);
            if (rec.is_discarded()) continue;  // tolerate a torn trailing append
            std::vector<double> v = rec.value("v", std::vector<double>{});
            index_[key(rec.value("p", ""), rec.value("m", ""), rec.value("t", ""))] = v;
            by_model_.emplace(key("", rec.value("m", ""), rec.value("t", "")), std::move(v));
        }
    }

    std::optional<std::vector<double>> lookup(const std::string& provider,
                                              const std::string& model,
                                              const std::string& text) const {
        std::lock_guard lock(mutex_);
        auto it = index_.find(key(provider, model, text));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    /// Lookup irrespective of which provider originally fetched the vector;
    /// the cache-only provider serves replays of other providers' runs.
    std::optional<std::vector<double>> lookup_any_provider(const std::string& model,
                                                           const std::string& text) const {
        std::lock_guard lock(mutex_);
        auto it = by_model_.find(key("", model, text));
        if (it == by_model_.end()) return std::nullopt;
        return it->second;
    }

    void store(const std::string& provider, const std::string& model, const std::string& text,
               const std::vector<double>& values) {
        std::lock_guard lock(mutex_);
        auto [it, inserted] = index_.emplace(key(provider, model, text), values);
        if (!inserted) return;
        by_model_.emplace(key("", model, text), values);
        if (path_.empty()) return;
        if (!append_.is_open()) append_.open(path_, std::ios::app);
        nlohmann::json rec{{"p", provider}, {"m", model}, {"t", text}, {"v", values}};
        append_ << rec.dump() << '\n';
        append_.flush();
    }

    std::size_t size() const {
        std::lock_guard lock(mutex_);
        return index_.size();
    }

private:
    static std::string key(const std::string& provider, const std::string& model,
                           const std::string& text) {
        std::string k;
        k.reserve(provider.size() + model.size() + text.size() + 2);
        k += provider;
        k += '\x1f';
        k += model;
        k += '\x1f';
        k += text;
        return k;
    }

    std::string path_;
    mutable std::mutex mutex_;
    std::ofstream append_;
    std::unordered_map<std::string, std::vector<double>> index_;
    std::unordered_map<std::string, std::vector<double>> by_model_;
};

struct ProviderStats {
    std::size_t requests = 0;        // backend calls issued
    std::size_t texts_embedded = 0;  // texts sent to the backend
    std::size_t cache_hits = 0;
};

/// Uniform embedding surface: dedup, cache, batching and bounded request
/// concurrency around a backend.
class EmbeddingProvider {
public:
    explicit EmbeddingProvider(ProviderConfig cfg,
                               std::shared_ptr<EmbeddingBackend> backend = nullptr)
        : cfg_(std::move(cfg)), backend_(std::move(backend)),
          cache_(std::make_shared<EmbeddingCache>(cfg_.cache_path)) {
        if (cfg_.max_batch_size < 1) throw ConfigError("max_batch_size must be >= 1");
        if (cfg_.max_in_flight < 1) throw ConfigError("max_in_flight must be >= 1");
        if (!backend_) backend_ = default_backend();
        if (cfg_.kind == ProviderKind::deterministic_mock) cfg_.allow_empty_text = true;
    }

    const ProviderConfig& config() const { return cfg_; }
    const std::string& model_id() const { return cfg_.model_id; }
    std::string provider_id() const { return backend_->provider_id(); }
    bool accepts_empty_text() const { return cfg_.allow_empty_text && backend_->accepts_empty_text(); }

    ProviderStats stats() const {
        std::lock_guard lock(stats_mutex_);
        return stats_;
    }

    EmbeddingVector embed(const std::string& text) {
        return embed_batch({text}).front();
    }

    /// One vector per text, order preserving. Duplicate texts are embedded
    /// once; the cache is consulted before the backend.
    std::vector<EmbeddingVector> embed_batch(const std::vector<std::string>& texts) {
        if (texts.empty()) throw ConfigError("embed_batch: no texts");
        for (const std::string& t : texts)
            if (t.empty() && !accepts_empty_text())
                throw ConfigError("embed_batch: empty text rejected by provider");

        const std::string provider = provider_id();
        auto cached = [&](const std::string& t) {
            return cfg_.kind == ProviderKind::cached_file
                       ? cache_->lookup_any_provider(cfg_.model_id, t)
                       : cache_->lookup(provider, cfg_.model_id, t);
        };
        std::vector<std::string> missing;
        std::size_t hits = 0;
        {
            std::unordered_set<std::string> seen;
            for (const std::string& t : texts) {
                if (!seen.insert(t).second) continue;
                if (cached(t))
                    ++hits;
                else
                    missing.push_back(t);
            }
        }
        {
            std::lock_guard lock(stats_mutex_);
            stats_.cache_hits += hits;
        }

        if (!missing.empty()) fetch_and_store(provider, missing);

        std::vector<EmbeddingVector> out;
        out.reserve(texts.size());
        std::optional<std::size_t> dim;
        for (const std::string& t : texts) {
            auto values = cached(t);
            if (!values) throw ProviderError("embedding missing after fetch for: '" + t + "'");
            if (dim && values->size() != *dim)
                throw ProviderError("dimension mismatch across batch: " +
                                    std::to_string(values->size()) + " vs " + std::to_string(*dim));
            dim = values->size();
            out.push_back({std::move(*values), provider, cfg_.model_id});
        }
        return out;
    }

private:
    std::shared_ptr<EmbeddingBackend> default_backend() const {
        switch (cfg_.kind) {
            case ProviderKind::deterministic_mock:
                return std::make_shared<MockBackend>(cfg_.mock_dimension, cfg_.mock_seed);
            case ProviderKind::cached_file:
                if (cfg_.cache_path.empty())
                    throw ConfigError("cached_file provider requires cache_path");
                return std::make_shared<CacheOnlyBackend>();
            case ProviderKind::http_embedding:
                throw ConfigError(
                    "http provider needs an explicit backend; use make_embedding_provider() "
                    "from dsd/http_provider.hpp");
        }
        throw ConfigError("unknown provider kind");
    }

    void fetch_and_store(const std::string& provider, const std::vector<std::string>& missing) {
        std::vector<std::vector<std::string>> chunks;
        for (std::size_t i = 0; i < missing.size(); i += cfg_.max_batch_size) {
            std::size_t end = std::min(missing.size(), i + cfg_.max_batch_size);
            chunks.emplace_back(missing.begin() + i, missing.begin() + end);
        }

        std::mutex err_mutex;
        std::exception_ptr first_error;
        std::size_t next = 0;
        std::mutex next_mutex;

        auto worker = [&] {
            while (true) {
                std::size_t idx;
                {
                    std::lock_guard lock(next_mutex);
                    if (next >= chunks.size()) return;
                    idx = next++;
                }
                try {
                    run_chunk(provider, chunks[idx]);
                } catch (...) {
                    std::lock_guard lock(err_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        };

        std::size_t n_workers = std::min(cfg_.max_in_flight, chunks.size());
        if (n_workers <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            pool.reserve(n_workers);
            for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
            for (std::thread& t : pool) t.join();
        }
        if (first_error) std::rethrow_exception(first_error);
    }

    void run_chunk(const std::string& provider, const std::vector<std::string>& chunk) {
        std::vector<std::vector<double>> vectors;
        std::size_t attempt = 0;
        while (true) {
            try {
                vectors = backend_->embed(chunk);
                break;
            } catch (const ProviderError& e) {
                if (!e.retryable() || attempt >= cfg_.max_retries) throw;
                ++attempt;
                std::this_thread::sleep_for(std::chrono::milliseconds(50 * attempt));
            }
        }
        if (vectors.size() != chunk.size())
            throw ProviderError("backend returned " + std::to_string(vectors.size()) +
                                " vectors for " + std::to_string(chunk.size()) + " texts");
        std::optional<std::size_t> dim;
        for (std::size_t i = 0; i < vectors.size(); ++i) {
            if (vectors[i].empty())
                throw ProviderError("backend returned empty vector for: '" + chunk[i] + "'");
            if (dim && vectors[i].size() != *dim)
                throw ProviderError("dimension mismatch across batch");
            dim = vectors[i].size();
            for (double v : vectors[i])
                if (!std::isfinite(v))
                    throw ProviderError("non-finite embedding value for: '" + chunk[i] + "'");
            cache_->store(provider, cfg_.model_id, chunk[i], vectors[i]);
        }
        std::lock_guard lock(stats_mutex_);
        ++stats_.requests;
        stats_.texts_embedded += chunk.size();
    }

    ProviderConfig cfg_;
    std::shared_ptr<EmbeddingBackend> backend_;
    std::shared_ptr<EmbeddingCache> cache_;
    mutable std::mutex stats_mutex_;
    ProviderStats stats_;
};

}  // namespace dsd
