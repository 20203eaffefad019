#include <catch2/catch_amalgamated.hpp>

#include <atomic>

#include <httplib.h>

#include "dsd/http_provider.hpp"
#include "dsd/provider.hpp"
#include "support.hpp"

using namespace dsd;
using dsd::testing::CountingBackend;
using dsd::testing::TempFile;

TEST_CASE("cosine similarity spot values") {
    auto vec = [](std::vector<double> v) { return EmbeddingVector{std::move(v), "t", "t"}; };
    CHECK(cosine_similarity(vec({1, 2, 3}), vec({1, 2, 3})) == Catch::Approx(1.0));
    CHECK(cosine_similarity(vec({1, 0}), vec({0, 1})) == Catch::Approx(0.0).margin(1e-15));
    CHECK(cosine_similarity(vec({1, 0}), vec({1, 1})) == Catch::Approx(0.70710678).margin(1e-9));

    CHECK_THROWS_AS(cosine_similarity(vec({1, 0}), vec({1, 0, 0})), ConfigError);
    CHECK_THROWS_AS(cosine_similarity(vec({0, 0}), vec({1, 0})), ConfigError);
}

TEST_CASE("dissimilarity score is 1 - cosine") {
    auto vec = [](std::vector<double> v) { return EmbeddingVector{std::move(v), "t", "t"}; };
    CHECK(dissimilarity_score(vec({2, 0}), vec({5, 0})) == Catch::Approx(0.0).margin(1e-15));
    CHECK(dissimilarity_score(vec({1, 0}), vec({0, 3})) == Catch::Approx(1.0));
    CHECK(dissimilarity_score(vec({1, 0}), vec({-2, 0})) == Catch::Approx(2.0));
}

TEST_CASE("cosine properties: scale invariance and symmetry") {
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        std::size_t dim = 2 + rng.next_index(6);
        EmbeddingVector a{{}, "t", "t"}, b{{}, "t", "t"};
        for (std::size_t d = 0; d < dim; ++d) {
            a.values.push_back(rng.next_symmetric() + 0.01);
            b.values.push_back(rng.next_symmetric() + 0.01);
        }
        double lambda = 0.1 + 5.0 * rng.next_unit();
        double mu = 0.1 + 5.0 * rng.next_unit();
        EmbeddingVector a2 = a, b2 = b;
        for (double& v : a2.values) v *= lambda;
        for (double& v : b2.values) v *= mu;
        CHECK(cosine_similarity(a2, b2) == Catch::Approx(cosine_similarity(a, b)).margin(1e-9));
        CHECK(cosine_similarity(a, b) == Catch::Approx(cosine_similarity(b, a)).margin(1e-15));
    }
}

TEST_CASE("mock provider is deterministic, unit-norm, dimension 16") {
    EmbeddingProvider provider{ProviderConfig{}};
    auto batch = provider.embed_batch({"the bird flies", "the bird flies", "another"});
    REQUIRE(batch.size() == 3);
    CHECK(batch[0].dimension() == 16);
    CHECK(batch[0].values == batch[1].values);  // bitwise identical
    CHECK(batch[0].values != batch[2].values);
    CHECK(batch[0].finite());

    double norm2 = 0.0;
    for (double v : batch[0].values) norm2 += v * v;
    CHECK(norm2 == Catch::Approx(1.0).margin(1e-12));

    EmbeddingProvider again{ProviderConfig{}};
    CHECK(again.embed("the bird flies").values == batch[0].values);
}

TEST_CASE("planted vectors override the hash construction") {
    auto backend = std::make_shared<MockBackend>();
    backend->plant("special", {1.0, 0.0});
    EmbeddingProvider provider{ProviderConfig{}, backend};
    CHECK(provider.embed("special").values == std::vector<double>{1.0, 0.0});
}

TEST_CASE("embed_batch validates input") {
    EmbeddingProvider provider{ProviderConfig{}};
    CHECK_THROWS_AS(provider.embed_batch({}), ConfigError);

    ProviderConfig strict;
    strict.kind = ProviderKind::deterministic_mock;
    EmbeddingProvider mock{strict};
    CHECK_NOTHROW(mock.embed_batch({""}));  // the mock accepts empty text

    // dimension mismatch across a batch is fatal
    auto backend = std::make_shared<MockBackend>();
    backend->plant("short", {1.0, 0.0});
    backend->plant("long", {1.0, 0.0, 0.0});
    EmbeddingProvider mixed{ProviderConfig{}, backend};
    CHECK_THROWS_AS(mixed.embed_batch({"short", "long"}), ProviderError);
}

TEST_CASE("second call for a cached text performs zero backend requests") {
    auto counting = std::make_shared<CountingBackend>(std::make_shared<MockBackend>());
    EmbeddingProvider provider{ProviderConfig{}, counting};

    provider.embed_batch({"alpha", "beta", "alpha"});  // duplicates deduplicated
    CHECK(counting->calls == 1);
    CHECK(counting->texts_seen == 2);

    provider.embed_batch({"alpha", "beta"});
    CHECK(counting->calls == 1);  // served from cache
    CHECK(provider.stats().cache_hits >= 2);
}

TEST_CASE("persistent cache round-trips and feeds the cache-only provider") {
    TempFile cache_file("dsd_test_cache.jsonl");

    std::vector<double> first;
    {
        ProviderConfig cfg;
        cfg.cache_path = cache_file.path;
        EmbeddingProvider provider{cfg};
        first = provider.embed("persist me").values;
    }
    {
        ProviderConfig cfg;
        cfg.kind = ProviderKind::cached_file;
        cfg.cache_path = cache_file.path;
        cfg.model_id = "hash-16";
        // the cached-file provider must serve without a real backend...
        auto counting = std::make_shared<CountingBackend>(std::make_shared<MockBackend>());
        EmbeddingProvider provider{cfg, std::make_shared<CacheOnlyBackend>()};
        CHECK(provider.embed("persist me").values == first);
        // ...and fail loudly on a miss
        CHECK_THROWS_AS(provider.embed("never seen"), ProviderError);
    }
}

TEST_CASE("cached vectors equal uncached vectors") {
    TempFile cache_file("dsd_test_cache2.jsonl");
    ProviderConfig with_cache;
    with_cache.cache_path = cache_file.path;
    EmbeddingProvider cached{with_cache};
    EmbeddingProvider uncached{ProviderConfig{}};
    for (const char* text : {"a", "bb", "ccc dd", "x y z"})
        CHECK(cached.embed(text).values == uncached.embed(text).values);
}

TEST_CASE("http backend speaks the embeddings protocol") {
    httplib::Server server;
    std::atomic<int> requests{0};
    std::string seen_auth;
    server.Post("/v1/embeddings", [&](const httplib::Request& req, httplib::Response& res) {
        ++requests;
        if (req.has_header("Authorization")) seen_auth = req.get_header_value("Authorization");
        nlohmann::json body = nlohmann::json::parse(req.body);
        nlohmann::json data = nlohmann::json::array();
        // answer out of order on purpose; the client must re-order by index
        for (std::size_t i = body["input"].size(); i-- > 0;) {
            double x = static_cast<double>(i) + 1.0;
            data.push_back({{"index", i}, {"embedding", {x, 0.0, 0.0}}});
        }
        res.set_content(nlohmann::json{{"data", data}}.dump(), "application/json");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    auto thread = std::thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    setenv("DSD_TEST_KEY", "sekrit", 1);
    ProviderConfig cfg;
    cfg.kind = ProviderKind::http_embedding;
    cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/embeddings";
    cfg.model_id = "test-model";
    cfg.api_key_env = "DSD_TEST_KEY";
    auto provider = make_embedding_provider(cfg);

    auto out = provider->embed_batch({"one", "two", "three"});
    REQUIRE(out.size() == 3);
    CHECK(out[0].values == std::vector<double>{1.0, 0.0, 0.0});
    CHECK(out[1].values == std::vector<double>{2.0, 0.0, 0.0});
    CHECK(out[2].values == std::vector<double>{3.0, 0.0, 0.0});
    CHECK(requests == 1);
    CHECK(seen_auth == "Bearer sekrit");

    // cache prevents a second request
    provider->embed_batch({"two", "one"});
    CHECK(requests == 1);

    server.stop();
    thread.join();
}

TEST_CASE("http backend retries 5xx and fails fast on 4xx") {
    httplib::Server server;
    std::atomic<int> requests{0};
    server.Post("/flaky", [&](const httplib::Request&, httplib::Response& res) {
        if (++requests == 1) {
            res.status = 503;
            return;
        }
        nlohmann::json data = nlohmann::json::array();
        data.push_back({{"index", 0}, {"embedding", {1.0, 2.0}}});
        res.set_content(nlohmann::json{{"data", data}}.dump(), "application/json");
    });
    server.Post("/denied", [&](const httplib::Request&, httplib::Response& res) {
        ++requests;
        res.status = 401;
        res.set_content("{\"error\": \"bad key\"}", "application/json");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    auto thread = std::thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    std::string base = "http://127.0.0.1:" + std::to_string(port);

    ProviderConfig cfg;
    cfg.kind = ProviderKind::http_embedding;
    cfg.endpoint = base + "/flaky";
    cfg.max_retries = 2;
    auto provider = make_embedding_provider(cfg);
    CHECK(provider->embed("hello").values == std::vector<double>{1.0, 2.0});
    CHECK(requests == 2);

    requests = 0;
    cfg.endpoint = base + "/denied";
    auto denied = make_embedding_provider(cfg);
    CHECK_THROWS_AS(denied->embed("hello"), ProviderError);
    CHECK(requests == 1);  // 4xx is not retried

    server.stop();
    thread.join();
}
