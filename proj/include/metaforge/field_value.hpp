#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "metaforge/identifiers.hpp"

namespace metaforge {

/// Typed literal. `datatype` is a compact XSD name such as `xsd:string`.
struct Literal {
    std::string value;
    std::string datatype = "xsd:string";
    bool operator==(const Literal&) const = default;
};

/// Controlled term picked from an ontology, branch or value set.
struct Term {
    std::string iri;
    std::string label;
    bool operator==(const Term&) const = default;
};

/// Identifier selected from an external authority registry.
struct Authority {
    AuthoritySource source = AuthoritySource::orcid;
    std::string id;
    std::string label;
    bool operator==(const Authority&) const = default;
};

struct Empty {
    bool operator==(const Empty&) const = default;
};

using FieldValue = std::variant<Empty, Literal, Term, Authority>;

inline bool is_empty(const FieldValue& v) { return std::holds_alternative<Empty>(v); }

namespace xsd {

inline constexpr std::string_view kNamespace = "http://www.w3.org/2001/XMLSchema#";

/// `http://www.w3.org/2001/XMLSchema#date` → `xsd:date`; compact forms pass through.
inline std::string compact(std::string_view datatype) {
    if (datatype.substr(0, kNamespace.size()) == kNamespace)
        return "xsd:" + std::string(datatype.substr(kNamespace.size()));
    return std::string(datatype);
}

}  // namespace xsd
}  // namespace metaforge
