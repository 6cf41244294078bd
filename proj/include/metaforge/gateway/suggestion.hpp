#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "metaforge/identifiers.hpp"

namespace metaforge::gateway {

using json = nlohmann::json;

/// A normalized hit from ORCID, ROR or CompTox. `id` is always the canonical IRI.
struct AuthoritySuggestion {
    AuthoritySource source = AuthoritySource::orcid;
    std::string id;
    std::string label;
    std::map<std::string, std::string> detail;
    bool operator==(const AuthoritySuggestion&) const = default;
};

struct TermSuggestion {
    std::string iri;
    std::string label;
    std::vector<std::string> synonyms;
    std::string source_acronym;
    bool operator==(const TermSuggestion&) const = default;
};

inline json to_json(const AuthoritySuggestion& s) {
    return json{{"source", to_string(s.source)}, {"id", s.id}, {"label", s.label}, {"detail", s.detail}};
}

inline json to_json(const TermSuggestion& s) {
    return json{{"iri", s.iri}, {"label", s.label}, {"synonyms", s.synonyms}, {"sourceAcronym", s.source_acronym}};
}

template <class T>
json to_json(const std::vector<T>& items) {
    json arr = json::array();
    for (const auto& i : items) arr.push_back(to_json(i));
    return arr;
}

}  // namespace metaforge::gateway
