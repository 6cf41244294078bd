#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "metaforge/error.hpp"
#include "metaforge/field_value.hpp"
#include "metaforge/identifiers.hpp"

namespace metaforge {

using json = nlohmann::json;

/// BCP-47 language tag → display string.
using LanguageMap = std::map<std::string, std::string>;

enum class NodeKind { field, element };

enum class FieldType {
    text,
    number,
    temporal,
    boolean,
    checkbox,
    list,
    link,
    controlled_term,
    external_authority,
    image,
    video,
};

enum class NumberKind { integer, decimal };
enum class Granularity { date, datetime, time };
enum class TermSourceType { ontology, branch, value_set };
enum class Severity { error, warning };

inline constexpr FieldType kAllFieldTypes[] = {
    FieldType::text,    FieldType::number,          FieldType::temporal,           FieldType::boolean,
    FieldType::checkbox, FieldType::list,           FieldType::link,               FieldType::controlled_term,
    FieldType::external_authority, FieldType::image, FieldType::video,
};

inline std::string_view to_string(FieldType t) {
    switch (t) {
        case FieldType::text: return "text";
        case FieldType::number: return "number";
        case FieldType::temporal: return "temporal";
        case FieldType::boolean: return "boolean";
        case FieldType::checkbox: return "checkbox";
        case FieldType::list: return "list";
        case FieldType::link: return "link";
        case FieldType::controlled_term: return "controlled_term";
        case FieldType::external_authority: return "external_authority";
        case FieldType::image: return "image";
        case FieldType::video: return "video";
    }
    return "text";
}

inline std::optional<FieldType> parse_field_type(std::string_view s) {
    for (auto t : kAllFieldTypes)
        if (to_string(t) == s) return t;
    return std::nullopt;
}

inline std::string_view to_string(NumberKind k) { return k == NumberKind::integer ? "integer" : "decimal"; }

inline std::string_view to_string(Granularity g) {
    switch (g) {
        case Granularity::date: return "date";
        case Granularity::datetime: return "datetime";
        case Granularity::time: return "time";
    }
    return "date";
}

inline std::string_view to_string(TermSourceType t) {
    switch (t) {
        case TermSourceType::ontology: return "ontology";
        case TermSourceType::branch: return "branch";
        case TermSourceType::value_set: return "value_set";
    }
    return "ontology";
}

inline std::optional<TermSourceType> parse_term_source_type(std::string_view s) {
    if (s == "ontology") return TermSourceType::ontology;
    if (s == "branch") return TermSourceType::branch;
    if (s == "value_set") return TermSourceType::value_set;
    return std::nullopt;
}

inline std::string_view to_string(Severity s) { return s == Severity::error ? "error" : "warning"; }

struct Cardinality {
    std::size_t min = 0;
    std::optional<std::size_t> max = 1;  // nullopt = unbounded

    bool unbounded() const { return !max.has_value(); }
    bool multi_valued() const { return !max || *max > 1; }
    bool allows(std::size_t count) const { return count >= min && (!max || count <= *max); }
    bool operator==(const Cardinality&) const = default;
};

struct LiteralOption {
    std::string label;
    std::optional<std::string> iri;
    bool operator==(const LiteralOption&) const = default;
};

struct TermSourceSpec {
    TermSourceType type = TermSourceType::ontology;
    std::string acronym;
    std::string root_iri;      // branch only
    std::string value_set_id;  // value_set only
    bool operator==(const TermSourceSpec&) const = default;
};

/// Union of the per-field-type constraint sets; members that do not apply to a
/// node's field type are ignored and never serialized.
struct Constraints {
    // text
    std::optional<std::size_t> min_length;
    std::optional<std::size_t> max_length;
    std::optional<std::string> regex;
    // number (bounds are exact decimal lexical forms)
    NumberKind number_kind = NumberKind::decimal;
    std::optional<std::string> min_value;
    std::optional<std::string> max_value;
    // temporal
    Granularity granularity = Granularity::date;
    // checkbox / list
    std::vector<LiteralOption> literals;
    // controlled_term
    std::vector<TermSourceSpec> sources;
    // external_authority
    std::optional<AuthoritySource> authority;

    bool operator==(const Constraints&) const = default;
};

struct TemplateNode {
    NodeKind kind = NodeKind::field;
    std::string key;
    LanguageMap label;
    LanguageMap help;
    Cardinality cardinality;
    bool hidden = false;
    // fields only
    FieldType field_type = FieldType::text;
    bool required = false;
    std::optional<FieldValue> default_value;
    Constraints constraints;
    // elements only
    std::vector<TemplateNode> children;

    bool is_field() const { return kind == NodeKind::field; }
    bool is_element() const { return kind == NodeKind::element; }
    bool operator==(const TemplateNode&) const = default;
};

struct Template {
    std::string id;
    LanguageMap name;
    LanguageMap description;
    std::string version;
    std::map<std::string, std::string> property_context;
    std::vector<TemplateNode> children;
    json extras = json::object();  // unknown top-level keys, kept verbatim

    bool operator==(const Template&) const = default;
};

struct TemplateIssue {
    Severity severity = Severity::error;
    std::string path;
    std::string code;
    std::string message;
    bool operator==(const TemplateIssue&) const = default;
};

inline bool issue_order(const TemplateIssue& a, const TemplateIssue& b) {
    return std::tie(a.path, a.code, a.severity, a.message) < std::tie(b.path, b.code, b.severity, b.message);
}

inline bool has_errors(const std::vector<TemplateIssue>& issues) {
    return std::any_of(issues.begin(), issues.end(), [](const auto& i) { return i.severity == Severity::error; });
}

/// Raised when a template document cannot be turned into a usable Template.
class TemplateError : public Error {
public:
    TemplateError(std::string code, const std::string& message, std::vector<TemplateIssue> issues = {})
        : Error(std::move(code), message), issues_(std::move(issues)) {}
    const std::vector<TemplateIssue>& issues() const noexcept { return issues_; }

private:
    std::vector<TemplateIssue> issues_;
};

/// Property IRI for a node key: the explicit propertyContext entry, else
/// `<templateId>#<key>`.
inline std::string property_iri(const Template& t, const std::string& key) {
    if (auto it = t.property_context.find(key); it != t.property_context.end()) return it->second;
    return t.id + "#" + key;
}

/// XSD datatype a Literal must carry on the given field.
inline std::string expected_datatype(const TemplateNode& field) {
    switch (field.field_type) {
        case FieldType::number:
            return field.constraints.number_kind == NumberKind::integer ? "xsd:integer" : "xsd:decimal";
        case FieldType::temporal:
            switch (field.constraints.granularity) {
                case Granularity::date: return "xsd:date";
                case Granularity::datetime: return "xsd:dateTime";
                case Granularity::time: return "xsd:time";
            }
            return "xsd:date";
        case FieldType::boolean: return "xsd:boolean";
        case FieldType::link:
        case FieldType::image:
        case FieldType::video: return "xsd:anyURI";
        default: return "xsd:string";
    }
}

inline bool is_render_only(const TemplateNode& field) {
    return field.is_field() && (field.field_type == FieldType::image || field.field_type == FieldType::video);
}

/// Look up a node by a key-only path such as `authors/name`.
/// Throws UNKNOWN_PATH for empty paths, indexed segments, or missing keys.
inline const TemplateNode& resolve_node(const Template& t, std::string_view path) {
    if (path.empty()) throw Error("UNKNOWN_PATH", "empty node path", std::string(path));
    const std::vector<TemplateNode>* level = &t.children;
    const TemplateNode* found = nullptr;
    std::string_view rest = path;
    while (true) {
        auto slash = rest.find('/');
        auto key = rest.substr(0, slash);
        auto it = std::find_if(level->begin(), level->end(), [&](const TemplateNode& n) { return n.key == key; });
        if (key.empty() || it == level->end())
            throw Error("UNKNOWN_PATH", "no node at path " + std::string(path), std::string(path));
        found = &*it;
        if (slash == std::string_view::npos) return *found;
        rest.remove_prefix(slash + 1);
        level = &found->children;
    }
}

struct FallbackDiagnostic {
    std::string requested_tag;
    std::string served_tag;  // empty when the node key was served
    std::string served_key;  // set when no language map entry was usable
    bool operator==(const FallbackDiagnostic&) const = default;
};

struct LocalizedText {
    std::string text;
    std::vector<FallbackDiagnostic> diagnostics;
};

/// Pick a display string from a language map: the first non-empty hit along
/// `chain`, then `en`, then the smallest available tag, then `fallback_key`.
/// Serving anything other than chain[0] records one diagnostic.
inline LocalizedText localize(const LanguageMap& map, const std::vector<std::string>& chain,
                              const std::string& fallback_key) {
    if (chain.empty()) throw Error("BAD_LANGUAGE", "language chain must not be empty");
    auto usable = [&](const std::string& tag) {
        auto it = map.find(tag);
        return it != map.end() && !it->second.empty() ? &it->second : nullptr;
    };
    const std::string& requested = chain.front();
    auto served = [&](const std::string& tag, const std::string& value) {
        LocalizedText out{value, {}};
        if (tag != requested) out.diagnostics.push_back({requested, tag, {}});
        return out;
    };
    for (const auto& tag : chain)
        if (auto v = usable(tag)) return served(tag, *v);
    if (auto v = usable("en")) return served("en", *v);
    for (const auto& [tag, value] : map)
        if (!value.empty()) return served(tag, value);
    return LocalizedText{fallback_key, {{requested, {}, fallback_key}}};
}

inline LocalizedText localized_label(const TemplateNode& node, const std::vector<std::string>& chain) {
    return localize(node.label, chain, node.key);
}

}  // namespace metaforge
