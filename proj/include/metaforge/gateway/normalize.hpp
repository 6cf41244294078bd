#pragma once

#include <optional>
#include <string>
#include <vector>

#include "metaforge/error.hpp"
#include "metaforge/gateway/suggestion.hpp"
#include "metaforge/text.hpp"

// Upstream payload shapes → AuthoritySuggestion.
//
//   ORCID expanded-search: {"expanded-result":[{"orcid-id","given-names","family-names",
//                           "institution-name":[...]}], "num-found":N}
//   ORCID person record:   {"name":{"given-names":{"value"},"family-name":{"value"},
//                           "credit-name":{"value"}}}
//   ROR (v1 or v2):        {"items":[{"id","name"|"names":[{"value","types"}], ...}]}
//   CompTox:               [{"dtxsid","preferredName","casrn"}]

namespace metaforge::gateway {

namespace detail {

inline Error shape_error(AuthoritySource source, const std::string& what) {
    return Error("UPSTREAM_SHAPE_ERROR", std::string(to_string(source)) + " payload: " + what);
}

inline std::string string_at(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it != obj.end() && it->is_string() ? it->get<std::string>() : std::string{};
}

inline std::string nested_value(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_object()) return {};
    return string_at(*it, "value");
}

inline std::string join(const json& arr, const char* sep) {
    std::string out;
    if (!arr.is_array()) return out;
    for (const auto& v : arr) {
        if (!v.is_string()) continue;
        if (!out.empty()) out += sep;
        out += v.get<std::string>();
    }
    return out;
}

inline std::optional<AuthoritySuggestion> orcid_entry(const json& item) {
    if (!item.is_object() || !item.contains("orcid-id") || !item["orcid-id"].is_string())
        throw shape_error(AuthoritySource::orcid, "result without orcid-id");
    std::string id;
    try {
        id = identifiers::canonical_orcid(item["orcid-id"].get<std::string>());
    } catch (const Error&) {
        return std::nullopt;
    }
    auto label = text::trim(string_at(item, "given-names") + " " + string_at(item, "family-names"));
    if (label.empty()) label = string_at(item, "credit-name");
    if (label.empty()) label = identifiers::bare_identifier(AuthoritySource::orcid, id);
    AuthoritySuggestion s{AuthoritySource::orcid, id, label, {}};
    if (auto inst = join(item.value("institution-name", json::array()), "; "); !inst.empty())
        s.detail["institution"] = inst;
    return s;
}

inline std::optional<AuthoritySuggestion> ror_entry(const json& item) {
    if (!item.is_object() || !item.contains("id") || !item["id"].is_string())
        throw shape_error(AuthoritySource::ror, "item without id");
    std::string id;
    try {
        id = identifiers::canonical_ror(item["id"].get<std::string>());
    } catch (const Error&) {
        return std::nullopt;
    }
    std::string label = string_at(item, "name");
    std::vector<std::string> aliases;
    if (auto names = item.find("names"); names != item.end() && names->is_array()) {
        for (const auto& n : *names) {
            auto value = string_at(n, "value");
            bool display = false;
            for (const auto& t : n.value("types", json::array())) display = display || t == "ror_display";
            if (display && label.empty()) label = value;
            else if (!value.empty() && value != label) aliases.push_back(value);
        }
        if (label.empty() && !aliases.empty()) {
            label = aliases.front();
            aliases.erase(aliases.begin());
        }
    }
    if (label.empty()) throw shape_error(AuthoritySource::ror, "item without name");
    AuthoritySuggestion s{AuthoritySource::ror, id, label, {}};
    if (auto c = item.find("country"); c != item.end() && c->is_object())
        if (auto name = string_at(*c, "country_name"); !name.empty()) s.detail["country"] = name;
    if (auto locs = item.find("locations"); locs != item.end() && locs->is_array() && !locs->empty()) {
        const auto& first = locs->front();
        if (auto g = first.find("geonames_details"); g != first.end() && g->is_object())
            if (auto name = string_at(*g, "country_name"); !name.empty()) s.detail["country"] = name;
    }
    if (auto a = join(item.value("aliases", json::array()), "; "); !a.empty()) s.detail["aliases"] = a;
    else if (!aliases.empty()) {
        std::string joined;
        for (const auto& a2 : aliases) joined += (joined.empty() ? "" : "; ") + a2;
        s.detail["aliases"] = joined;
    }
    return s;
}

inline std::optional<AuthoritySuggestion> comptox_entry(const json& item) {
    if (!item.is_object() || !item.contains("dtxsid") || !item["dtxsid"].is_string())
        throw shape_error(AuthoritySource::comptox, "result without dtxsid");
    auto label = string_at(item, "preferredName");
    if (label.empty()) throw shape_error(AuthoritySource::comptox, "result without preferredName");
    std::string id;
    try {
        id = identifiers::canonical_comptox(item["dtxsid"].get<std::string>());
    } catch (const Error&) {
        return std::nullopt;
    }
    AuthoritySuggestion s{AuthoritySource::comptox, id, label, {}};
    if (auto cas = string_at(item, "casrn"); !cas.empty()) s.detail["casrn"] = cas;
    return s;
}

}  // namespace detail

/// Map a raw search payload to suggestions, preserving upstream order.
/// Entries whose identifier is not canonicalizable are dropped; missing
/// required keys raise UPSTREAM_SHAPE_ERROR.
inline std::vector<AuthoritySuggestion> normalize_response(AuthoritySource source, const json& raw) {
    const json* items = nullptr;
    switch (source) {
        case AuthoritySource::orcid: {
            if (!raw.is_object() || !raw.contains("expanded-result"))
                throw detail::shape_error(source, "missing expanded-result");
            items = &raw["expanded-result"];
            if (items->is_null()) return {};
            break;
        }
        case AuthoritySource::ror:
            if (!raw.is_object() || !raw.contains("items")) throw detail::shape_error(source, "missing items");
            items = &raw["items"];
            break;
        case AuthoritySource::comptox:
            items = &raw;
            break;
    }
    if (!items->is_array()) throw detail::shape_error(source, "results are not an array");
    std::vector<AuthoritySuggestion> out;
    for (const auto& item : *items) {
        std::optional<AuthoritySuggestion> s;
        switch (source) {
            case AuthoritySource::orcid: s = detail::orcid_entry(item); break;
            case AuthoritySource::ror: s = detail::ror_entry(item); break;
            case AuthoritySource::comptox: s = detail::comptox_entry(item); break;
        }
        if (s) out.push_back(std::move(*s));
    }
    return out;
}

/// Map a raw single-record payload (resolve) to a suggestion with the given
/// canonical id.
inline AuthoritySuggestion normalize_record(AuthoritySource source, const std::string& canonical_id, const json& raw) {
    AuthoritySuggestion s{source, canonical_id, {}, {}};
    switch (source) {
        case AuthoritySource::orcid: {
            if (!raw.is_object()) throw detail::shape_error(source, "record is not an object");
            const json& name = raw.contains("name") && raw["name"].is_object() ? raw["name"] : raw;
            s.label = text::trim(detail::nested_value(name, "given-names") + " " +
                                 detail::nested_value(name, "family-name"));
            if (s.label.empty()) s.label = detail::nested_value(name, "credit-name");
            if (s.label.empty()) throw detail::shape_error(source, "record without a name");
            return s;
        }
        case AuthoritySource::ror: {
            auto entry = detail::ror_entry(raw);
            if (!entry) throw detail::shape_error(source, "record id is not a ROR id");
            entry->id = canonical_id;
            return *entry;
        }
        case AuthoritySource::comptox: {
            const json& rec = raw.is_array() && !raw.empty() ? raw.front() : raw;
            auto entry = detail::comptox_entry(rec);
            if (!entry) throw detail::shape_error(source, "record dtxsid is malformed");
            entry->id = canonical_id;
            return *entry;
        }
    }
    return s;
}

}  // namespace metaforge::gateway
