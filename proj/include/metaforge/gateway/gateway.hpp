#pragma once

#include <algorithm>
#include <chrono>
#include <memory>
#include <semaphore>
#include <string>
#include <vector>

#include "metaforge/gateway/adapter.hpp"
#include "metaforge/gateway/cache.hpp"
#include "metaforge/gateway/normalize.hpp"
#include "metaforge/gateway/ontology.hpp"

namespace metaforge::gateway {

inline constexpr int kDefaultLimit = 10;
inline constexpr int kMaxLimit = 50;

inline int clamp_limit(int limit) { return std::clamp(limit, 1, kMaxLimit); }

struct GatewayConfig {
    bool offline = false;
    std::chrono::milliseconds timeout{2000};
    int retries_on_timeout = 1;
    std::chrono::steady_clock::duration ttl = std::chrono::minutes(15);
    std::size_t cache_capacity = 10000;
    int max_in_flight = 8;
};

/// Single entry point for authority and ontology lookups. Offline mode routes
/// every authority call to the fixture adapters and never touches the live set.
class AuthorityGateway {
public:
    AuthorityGateway(GatewayConfig config, AdapterSet live, AdapterSet fixtures, TermIndex terms = {},
                     Clock clock = steady_clock_source())
        : config_(config),
          live_(std::move(live)),
          fixtures_(std::move(fixtures)),
          terms_(std::move(terms)),
          searches_(config.ttl, config.cache_capacity, clock),
          records_(config.ttl, config.cache_capacity, clock),
          in_flight_(std::clamp(config.max_in_flight, 1, 1024)) {}

    const GatewayConfig& config() const { return config_; }
    const TermIndex& terms() const { return terms_; }

    std::vector<AuthoritySuggestion> search_authority(std::string_view source, std::string_view query,
                                                      int limit = kDefaultLimit) {
        return search_authority(parse_source(source), query, limit);
    }

    /// Normalized suggestions in upstream order, at most `limit` (clamped to 1..50).
    std::vector<AuthoritySuggestion> search_authority(AuthoritySource source, std::string_view query,
                                                      int limit = kDefaultLimit) {
        auto q = text::normalize_query(query);
        if (q.empty()) throw Error("QUERY_EMPTY", "query is empty");
        limit = clamp_limit(limit);
        auto key = std::string(to_string(source)) + "\n" + q + "\n" + std::to_string(limit);
        if (auto hit = searches_.get(key)) return *hit;

        const auto& adapter = adapters().at(source);
        auto raw = call([&] { return adapter.search(q, limit, config_.timeout); });
        if (raw.status < 200 || raw.status >= 300)
            throw Error("UPSTREAM_ERROR", std::string(to_string(source)) + " answered status " +
                                              std::to_string(raw.status));
        auto out = normalize_response(source, parse_body(source, raw.body));
        if (out.size() > static_cast<std::size_t>(limit)) out.resize(static_cast<std::size_t>(limit));
        searches_.put(key, out);
        return out;
    }

    AuthoritySuggestion resolve_identifier(std::string_view source, std::string_view id) {
        return resolve_identifier(parse_source(source), id);
    }

    /// Canonicalize (and checksum for ORCID), then look the record up for its label.
    AuthoritySuggestion resolve_identifier(AuthoritySource source, std::string_view id) {
        if (text::trim(id).empty()) throw Error("INVALID_IDENTIFIER", "identifier is empty");
        auto canonical = identifiers::canonicalize(source, id);
        auto key = std::string(to_string(source)) + "\n" + canonical;
        if (auto hit = records_.get(key)) return *hit;

        const auto& adapter = adapters().at(source);
        auto bare = identifiers::bare_identifier(source, canonical);
        auto raw = call([&] { return adapter.resolve(bare, config_.timeout); });
        if (raw.status == 404) throw Error("NOT_FOUND", "no " + std::string(to_string(source)) + " record for " + canonical);
        if (raw.status < 200 || raw.status >= 300)
            throw Error("UPSTREAM_ERROR", std::string(to_string(source)) + " answered status " +
                                              std::to_string(raw.status));
        auto rec = normalize_record(source, canonical, parse_body(source, raw.body));
        records_.put(key, rec);
        return rec;
    }

    std::vector<TermSuggestion> search_ontology(const std::vector<TermSourceSpec>& sources, std::string_view query,
                                                int limit = kDefaultLimit) const {
        return gateway::search_ontology(terms_, sources, query, static_cast<std::size_t>(clamp_limit(limit)));
    }

private:
    static AuthoritySource parse_source(std::string_view source) {
        auto s = parse_authority_source(source);
        if (!s) throw Error("UNKNOWN_SOURCE", "unknown authority source '" + std::string(source) + "'");
        return *s;
    }

    const AdapterSet& adapters() const { return config_.offline ? fixtures_ : live_; }

    static json parse_body(AuthoritySource source, const std::string& body) {
        json j = json::parse(body, nullptr, false);
        if (j.is_discarded()) throw Error("UPSTREAM_SHAPE_ERROR", std::string(to_string(source)) + " payload is not JSON");
        return j;
    }

    // Bounded parallelism plus one retry on timeout.
    template <class F>
    RawResponse call(F&& f) {
        for (int attempt = 0;; ++attempt) {
            in_flight_.acquire();
            try {
                auto r = f();
                in_flight_.release();
                return r;
            } catch (const Error& e) {
                in_flight_.release();
                if (e.code() != "UPSTREAM_TIMEOUT" || attempt >= config_.retries_on_timeout) throw;
            } catch (...) {
                in_flight_.release();
                throw;
            }
        }
    }

    GatewayConfig config_;
    AdapterSet live_;
    AdapterSet fixtures_;
    TermIndex terms_;
    TtlLruCache<std::vector<AuthoritySuggestion>> searches_;
    TtlLruCache<AuthoritySuggestion> records_;
    std::counting_semaphore<1024> in_flight_;
};

}  // namespace metaforge::gateway
