#include <gtest/gtest.h>

#include <atomic>
#include <thread>

#include "metaforge/gateway/gateway.hpp"
#include "support/fixtures.hpp"

using namespace metaforge;
using namespace metaforge::gateway;

namespace {

std::filesystem::path gateway_fixtures() { return testsupport::fixtures() / "gateway"; }

struct OfflineRig {
    AdapterSet live = fail_on_contact_adapters();
    AuthorityGateway gw{GatewayConfig{.offline = true}, live, fixture_adapters(gateway_fixtures())};

    std::size_t contacts() const {
        std::size_t n = 0;
        for (const auto& a : {live.orcid, live.ror, live.comptox})
            n += static_cast<const FailOnContactAdapter&>(*a).contacts();
        return n;
    }
};

template <class F>
std::string error_code(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

// Scripted adapter: counts calls, can time out a number of times, can answer
// with a fixed status, and tracks peak concurrency.
class ScriptedAdapter : public AuthorityAdapter {
public:
    explicit ScriptedAdapter(AuthoritySource s) : source_(s) {}
    AuthoritySource source() const override { return source_; }

    RawResponse search(const std::string& q, int, std::chrono::milliseconds) const override {
        auto now = ++active;
        for (auto seen = peak.load(); now > seen && !peak.compare_exchange_weak(seen, now);) {
        }
        ++calls;
        if (delay.count() > 0) std::this_thread::sleep_for(delay);
        --active;
        if (timeouts_left > 0) {
            --timeouts_left;
            throw Error("UPSTREAM_TIMEOUT", "scripted timeout");
        }
        if (status != 200) return {status, "{}"};
        json items = json::array();
        for (int i = 0; i < results; ++i)
            items.push_back({{"id", "https://ror.org/0" + std::string(6, "abcdefghjk"[i % 10]) + "12"},
                             {"name", q + " " + std::to_string(i)}});
        return {200, json{{"items", items}}.dump()};
    }

    RawResponse resolve(const std::string&, std::chrono::milliseconds) const override {
        ++calls;
        return {status == 200 ? 404 : status, "{}"};
    }

    mutable std::atomic<int> calls{0};
    mutable std::atomic<int> active{0};
    mutable std::atomic<int> peak{0};
    mutable std::atomic<int> timeouts_left{0};
    int status = 200;
    int results = 3;
    std::chrono::milliseconds delay{0};

private:
    AuthoritySource source_;
};

struct ScriptedRig {
    std::shared_ptr<ScriptedAdapter> ror = std::make_shared<ScriptedAdapter>(AuthoritySource::ror);
    std::chrono::steady_clock::time_point now{};
    GatewayConfig config;

    AuthorityGateway make() {
        AdapterSet live{nullptr, ror, nullptr};
        return AuthorityGateway(config, live, fail_on_contact_adapters(), {}, [this] { return now; });
    }
};

}  // namespace

TEST(Gateway, StanfordSearchMatchesRecordedOrder) {
    OfflineRig rig;
    auto got = rig.gw.search_authority("ror", "stanford");
    std::vector<std::pair<std::string, std::string>> seen;
    for (const auto& s : got) seen.emplace_back(s.label, s.id);
    std::vector<std::pair<std::string, std::string>> want = {
        {"Stanford SystemX Alliance", "https://ror.org/0551gkb08"},
        {"Stanford Cancer Institute", "https://ror.org/014qe3j22"},
        {"Stanford Health Care", "https://ror.org/019wqcg20"},
        {"Stanford Medicine", "https://ror.org/03mtd9a03"},
        {"Stanford University", "https://ror.org/00f54p054"},
    };
    EXPECT_EQ(seen, want);
    EXPECT_EQ(got.back().detail.at("country"), "United States");
    EXPECT_EQ(rig.contacts(), 0u);
}

TEST(Gateway, QueriesAreNormalizedBeforeLookup) {
    OfflineRig rig;
    EXPECT_EQ(rig.gw.search_authority("ror", "  STANFORD ").size(), 5u);
    EXPECT_EQ(rig.gw.search_authority("orcid", "Martin O'Connor").front().id,
              "https://orcid.org/0000-0002-2256-2421");
    auto pfoa = rig.gw.search_authority("comptox", "PFOA");
    ASSERT_EQ(pfoa.size(), 1u);
    EXPECT_EQ(pfoa[0].id, "https://comptox.epa.gov/dashboard/chemical/details/DTXSID8031865");
    EXPECT_EQ(pfoa[0].label, "Perfluorooctanoic acid");
    EXPECT_EQ(rig.contacts(), 0u);
}

TEST(Gateway, UnrecordedQueryIsEmpty) {
    OfflineRig rig;
    EXPECT_TRUE(rig.gw.search_authority("ror", "nowhere at all").empty());
    EXPECT_EQ(rig.contacts(), 0u);
}

TEST(Gateway, RequestErrors) {
    OfflineRig rig;
    EXPECT_EQ(error_code([&] { rig.gw.search_authority("ror", "   "); }), "QUERY_EMPTY");
    EXPECT_EQ(error_code([&] { rig.gw.search_authority("wikidata", "x"); }), "UNKNOWN_SOURCE");
    EXPECT_EQ(error_code([&] { rig.gw.resolve_identifier("orcid", ""); }), "INVALID_IDENTIFIER");
    EXPECT_EQ(error_code([&] { rig.gw.resolve_identifier("orcid", "0000-0002-2256-2420"); }), "INVALID_IDENTIFIER");
    EXPECT_EQ(error_code([&] { rig.gw.resolve_identifier("ror", "0aaaaaa99"); }), "NOT_FOUND");
    EXPECT_EQ(rig.contacts(), 0u);
}

TEST(Gateway, ResolveReturnsLabel) {
    OfflineRig rig;
    auto orcid = rig.gw.resolve_identifier("orcid", "0000000222562421");
    EXPECT_EQ(orcid.id, "https://orcid.org/0000-0002-2256-2421");
    EXPECT_EQ(orcid.label, "Martin O'Connor");
    auto ror = rig.gw.resolve_identifier("ror", "https://ror.org/00f54p054");
    EXPECT_EQ(ror.label, "Stanford University");
    auto comptox = rig.gw.resolve_identifier("comptox", "DTXSID8031865");
    EXPECT_EQ(comptox.detail.at("casrn"), "335-67-1");
}

TEST(Gateway, ResultIdsAreCanonical) {
    OfflineRig rig;
    for (auto [src, q] : {std::pair{"ror", "stanford"}, {"orcid", "o'connor"}, {"comptox", "perfluorooctan"}}) {
        auto source = *parse_authority_source(src);
        for (const auto& s : rig.gw.search_authority(src, q)) {
            EXPECT_TRUE(identifiers::is_canonical(source, s.id)) << s.id;
            EXPECT_FALSE(s.label.empty());
        }
    }
}

TEST(Normalize, ShapesAndEmptyPayloads) {
    EXPECT_TRUE(normalize_response(AuthoritySource::orcid, json{{"expanded-result", nullptr}}).empty());
    EXPECT_TRUE(normalize_response(AuthoritySource::ror, json{{"items", json::array()}}).empty());
    EXPECT_TRUE(normalize_response(AuthoritySource::comptox, json::array()).empty());
    EXPECT_EQ(error_code([] { normalize_response(AuthoritySource::ror, json{{"items", json::array({json{{"name", "x"}}})}}); }),
              "UPSTREAM_SHAPE_ERROR");
    EXPECT_EQ(error_code([] { normalize_response(AuthoritySource::ror, json::array()); }), "UPSTREAM_SHAPE_ERROR");
    EXPECT_EQ(error_code([] { normalize_response(AuthoritySource::orcid, json{{"expanded-result", json::array({json{{"x", 1}}})}}); }),
              "UPSTREAM_SHAPE_ERROR");
    // ROR v1 shape still normalizes.
    auto v1 = normalize_response(AuthoritySource::ror,
                                 json{{"items", json::array({json{{"id", "https://ror.org/00f54p054"},
                                                                   {"name", "Stanford University"},
                                                                   {"country", {{"country_name", "United States"}}}}})}});
    ASSERT_EQ(v1.size(), 1u);
    EXPECT_EQ(v1[0].label, "Stanford University");
}

TEST(GatewayCache, HitWithinTtlMissAfter) {
    ScriptedRig rig;
    auto gw = rig.make();
    gw.search_authority("ror", "alpha");
    gw.search_authority("ror", "ALPHA");
    EXPECT_EQ(rig.ror->calls, 1);
    rig.now += std::chrono::minutes(14);
    gw.search_authority("ror", "alpha");
    EXPECT_EQ(rig.ror->calls, 1);
    rig.now += std::chrono::minutes(2);
    gw.search_authority("ror", "alpha");
    EXPECT_EQ(rig.ror->calls, 2);
    gw.search_authority("ror", "alpha", 2);  // different limit, different key
    EXPECT_EQ(rig.ror->calls, 3);
}

TEST(GatewayCache, LeastRecentlyUsedIsEvicted) {
    TtlLruCache<int> cache(std::chrono::minutes(15), 2);
    cache.put("a", 1);
    cache.put("b", 2);
    ASSERT_TRUE(cache.get("a"));
    cache.put("c", 3);
    EXPECT_TRUE(cache.get("a"));
    EXPECT_FALSE(cache.get("b"));
    EXPECT_TRUE(cache.get("c"));
    EXPECT_EQ(cache.size(), 2u);
}

TEST(GatewayUpstream, OneRetryOnTimeout) {
    ScriptedRig rig;
    auto gw = rig.make();
    rig.ror->timeouts_left = 1;
    EXPECT_EQ(gw.search_authority("ror", "x").size(), 3u);
    EXPECT_EQ(rig.ror->calls, 2);
    rig.ror->timeouts_left = 2;
    EXPECT_EQ(error_code([&] { gw.search_authority("ror", "y"); }), "UPSTREAM_TIMEOUT");
    EXPECT_EQ(rig.ror->calls, 4);
}

TEST(GatewayUpstream, NonSuccessStatusIsUpstreamError) {
    ScriptedRig rig;
    rig.ror->status = 503;
    auto gw = rig.make();
    EXPECT_EQ(error_code([&] { gw.search_authority("ror", "x"); }), "UPSTREAM_ERROR");
    EXPECT_EQ(error_code([&] { gw.resolve_identifier("ror", "00f54p054"); }), "UPSTREAM_ERROR");
}

TEST(GatewayUpstream, LimitIsClampedAndApplied) {
    ScriptedRig rig;
    rig.ror->results = 60;
    auto gw = rig.make();
    EXPECT_EQ(gw.search_authority("ror", "x").size(), 10u);
    EXPECT_EQ(gw.search_authority("ror", "x", 3).size(), 3u);
    EXPECT_EQ(gw.search_authority("ror", "x", 500).size(), 50u);
    EXPECT_EQ(gw.search_authority("ror", "x", 0).size(), 1u);
}

TEST(GatewayUpstream, InFlightCallsAreBounded) {
    ScriptedRig rig;
    rig.ror->delay = std::chrono::milliseconds(20);
    auto gw = rig.make();
    std::vector<std::thread> threads;
    for (int i = 0; i < 32; ++i)
        threads.emplace_back([&gw, i] { gw.search_authority("ror", "q" + std::to_string(i)); });
    for (auto& t : threads) t.join();
    EXPECT_EQ(rig.ror->calls, 32);
    EXPECT_LE(rig.ror->peak, 8);
    EXPECT_GE(rig.ror->peak, 2);
}
