#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dsd/provider.hpp"

namespace dsd::testing {

/// Wraps a backend and counts how often the network layer is hit.
class CountingBackend : public EmbeddingBackend {
public:
    explicit CountingBackend(std::shared_ptr<EmbeddingBackend> inner) : inner_(std::move(inner)) {}

    std::string provider_id() const override { return inner_->provider_id(); }
    bool accepts_empty_text() const override { return inner_->accepts_empty_text(); }

    std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override {
        ++calls;
        texts_seen += texts.size();
        return inner_->embed(texts);
    }

    std::atomic<std::size_t> calls{0};
    std::atomic<std::size_t> texts_seen{0};

private:
    std::shared_ptr<EmbeddingBackend> inner_;
};

/// Returns planted vectors and a fixed default for everything else; lets a
/// test pin the whole similarity landscape.
class FixedBackend : public EmbeddingBackend {
public:
    explicit FixedBackend(std::vector<double> default_vector)
        : default_(std::move(default_vector)) {}

    std::string provider_id() const override { return "fixed"; }
    bool accepts_empty_text() const override { return true; }

    void plant(const std::string& text, std::vector<double> vec) {
        planted_[text] = std::move(vec);
    }

    std::vector<std::vector<double>> embed(const std::vector<std::string>& texts) override {
        std::vector<std::vector<double>> out;
        out.reserve(texts.size());
        for (const std::string& t : texts) {
            auto it = planted_.find(t);
            out.push_back(it == planted_.end() ? default_ : it->second);
        }
        return out;
    }

private:
    std::vector<double> default_;
    std::unordered_map<std::string, std::vector<double>> planted_;
};

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) {
        path = (std::filesystem::temp_directory_path() / name).string();
        std::remove(path.c_str());
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace dsd::testing
