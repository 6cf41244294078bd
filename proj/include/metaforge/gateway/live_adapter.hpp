#pragma once

#include <chrono>
#include <cstdlib>
#include <memory>
#include <string>

#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include "metaforge/gateway/adapter.hpp"

// HTTPS adapters for the public registries. Only constructed when the gateway
// runs online; tests never build these.

namespace metaforge::gateway {

class HttpAdapter : public AuthorityAdapter {
public:
    HttpAdapter(AuthoritySource source, std::string host) : source_(source), host_(std::move(host)) {}

    AuthoritySource source() const override { return source_; }

protected:
    RawResponse get(const std::string& path, std::chrono::milliseconds timeout, httplib::Headers headers = {}) const {
        httplib::Client client("https://" + host_);
        auto secs = timeout.count() / 1000;
        auto usecs = (timeout.count() % 1000) * 1000;
        client.set_connection_timeout(secs, usecs);
        client.set_read_timeout(secs, usecs);
        client.set_follow_location(true);
        headers.emplace("Accept", "application/json");
        auto res = client.Get(path, headers);
        if (!res) {
            auto err = res.error();
            if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read)
                throw Error("UPSTREAM_TIMEOUT", host_ + " did not answer in time");
            throw Error("UPSTREAM_ERROR", host_ + ": " + httplib::to_string(err));
        }
        return {res->status, res->body};
    }

    static std::string enc(const std::string& s) { return httplib::detail::encode_query_param(s); }

    AuthoritySource source_;
    std::string host_;
};

class OrcidAdapter : public HttpAdapter {
public:
    OrcidAdapter() : HttpAdapter(AuthoritySource::orcid, "pub.orcid.org") {}

    RawResponse search(const std::string& query, int limit, std::chrono::milliseconds timeout) const override {
        return get("/v3.0/expanded-search/?q=" + enc(query) + "&rows=" + std::to_string(limit), timeout);
    }
    RawResponse resolve(const std::string& bare_id, std::chrono::milliseconds timeout) const override {
        return get("/v3.0/" + enc(bare_id) + "/person", timeout);
    }
};

class RorAdapter : public HttpAdapter {
public:
    RorAdapter() : HttpAdapter(AuthoritySource::ror, "api.ror.org") {}

    RawResponse search(const std::string& query, int, std::chrono::milliseconds timeout) const override {
        return get("/v2/organizations?query=" + enc(query), timeout);
    }
    RawResponse resolve(const std::string& bare_id, std::chrono::milliseconds timeout) const override {
        return get("/v2/organizations/" + enc(bare_id), timeout);
    }
};

/// Needs COMPTOX_API_KEY; without it every call is an UPSTREAM_ERROR.
class ComptoxAdapter : public HttpAdapter {
public:
    explicit ComptoxAdapter(std::string api_key)
        : HttpAdapter(AuthoritySource::comptox, "api-ccte.epa.gov"), key_(std::move(api_key)) {}

    RawResponse search(const std::string& query, int, std::chrono::milliseconds timeout) const override {
        return get("/chemical/search/contain/" + enc(query), timeout, auth());
    }
    RawResponse resolve(const std::string& bare_id, std::chrono::milliseconds timeout) const override {
        return get("/chemical/detail/search/by-dtxsid/" + enc(bare_id), timeout, auth());
    }

private:
    httplib::Headers auth() const {
        if (key_.empty()) throw Error("UPSTREAM_ERROR", "COMPTOX_API_KEY is not set");
        return {{"x-api-key", key_}};
    }

    std::string key_;
};

inline AdapterSet live_adapters() {
    const char* key = std::getenv("COMPTOX_API_KEY");
    return {std::make_shared<OrcidAdapter>(), std::make_shared<RorAdapter>(),
            std::make_shared<ComptoxAdapter>(key ? key : "")};
}

}  // namespace metaforge::gateway
