#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "metaforge/error.hpp"
#include "metaforge/identifiers.hpp"
#include "metaforge/text.hpp"

namespace metaforge::gateway {

/// Raw upstream answer. `status` is the HTTP status (200 on success).
struct RawResponse {
    int status = 200;
    std::string body;
};

/// One external authority. Implementations keep no per-query state so a
/// single instance can serve concurrent requests; caching lives in the gateway.
/// A timed-out request throws Error("UPSTREAM_TIMEOUT").
class AuthorityAdapter {
public:
    virtual ~AuthorityAdapter() = default;
    virtual AuthoritySource source() const = 0;
    virtual RawResponse search(const std::string& query, int limit, std::chrono::milliseconds timeout) const = 0;
    /// `bare_id` is the identifier without its IRI prefix.
    virtual RawResponse resolve(const std::string& bare_id, std::chrono::milliseconds timeout) const = 0;
};

/// Fixture file stem for a query: normalized, with anything outside
/// [a-z0-9._-] replaced by '_'.
inline std::string fixture_slug(std::string_view query) {
    auto s = text::normalize_query(query);
    for (char& c : s) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
        if (!ok) c = '_';
    }
    return s;
}

/// Serves recorded upstream payloads from
/// `<root>/<source>/search/<slug>.json` and `<root>/<source>/resolve/<bare id>.json`.
/// An unrecorded search answers with an empty result payload; an unrecorded
/// resolve answers 404.
class FixtureAdapter : public AuthorityAdapter {
public:
    FixtureAdapter(AuthoritySource source, std::filesystem::path root) : source_(source), root_(std::move(root)) {}

    AuthoritySource source() const override { return source_; }

    RawResponse search(const std::string& query, int, std::chrono::milliseconds) const override {
        auto file = root_ / std::string(to_string(source_)) / "search" / (fixture_slug(query) + ".json");
        if (auto body = read(file)) return {200, *body};
        return {200, empty_payload()};
    }

    RawResponse resolve(const std::string& bare_id, std::chrono::milliseconds) const override {
        auto file = root_ / std::string(to_string(source_)) / "resolve" / (fixture_slug(bare_id) + ".json");
        if (auto body = read(file)) return {200, *body};
        return {404, R"({"error":"not found"})"};
    }

private:
    std::string empty_payload() const {
        switch (source_) {
            case AuthoritySource::orcid: return R"({"expanded-result":[],"num-found":0})";
            case AuthoritySource::ror: return R"({"items":[],"number_of_results":0})";
            case AuthoritySource::comptox: return "[]";
        }
        return "[]";
    }

    static std::optional<std::string> read(const std::filesystem::path& file) {
        std::ifstream in(file, std::ios::binary);
        if (!in) return std::nullopt;
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    AuthoritySource source_;
    std::filesystem::path root_;
};

/// Stands in for a live adapter where no network access is allowed. Any call
/// counts as a contact and throws.
class FailOnContactAdapter : public AuthorityAdapter {
public:
    explicit FailOnContactAdapter(AuthoritySource source) : source_(source) {}

    AuthoritySource source() const override { return source_; }

    RawResponse search(const std::string&, int, std::chrono::milliseconds) const override { contact(); }
    RawResponse resolve(const std::string&, std::chrono::milliseconds) const override { contact(); }

    std::size_t contacts() const { return contacts_.load(); }

private:
    [[noreturn]] void contact() const {
        contacts_.fetch_add(1);
        throw Error("UPSTREAM_ERROR", std::string("network contact attempted for ") + std::string(to_string(source_)));
    }

    AuthoritySource source_;
    mutable std::atomic<std::size_t> contacts_{0};
};

/// One adapter per source.
struct AdapterSet {
    std::shared_ptr<const AuthorityAdapter> orcid;
    std::shared_ptr<const AuthorityAdapter> ror;
    std::shared_ptr<const AuthorityAdapter> comptox;

    const AuthorityAdapter& at(AuthoritySource s) const {
        const auto& a = s == AuthoritySource::orcid ? orcid : s == AuthoritySource::ror ? ror : comptox;
        if (!a) throw Error("UPSTREAM_ERROR", std::string("no adapter configured for ") + std::string(to_string(s)));
        return *a;
    }
};

inline AdapterSet fixture_adapters(const std::filesystem::path& root) {
    return {std::make_shared<FixtureAdapter>(AuthoritySource::orcid, root),
            std::make_shared<FixtureAdapter>(AuthoritySource::ror, root),
            std::make_shared<FixtureAdapter>(AuthoritySource::comptox, root)};
}

inline AdapterSet fail_on_contact_adapters() {
    return {std::make_shared<FailOnContactAdapter>(AuthoritySource::orcid),
            std::make_shared<FailOnContactAdapter>(AuthoritySource::ror),
            std::make_shared<FailOnContactAdapter>(AuthoritySource::comptox)};
}

}  // namespace metaforge::gateway
