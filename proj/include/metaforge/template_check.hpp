#pragma once

#include <regex>
#include <set>
#include <string>
#include <vector>

#include "metaforge/lexical.hpp"
#include "metaforge/template_json.hpp"
#include "metaforge/value_check.hpp"

namespace metaforge {

namespace detail {

class TemplateChecker {
public:
    std::vector<TemplateIssue> issues;

    void add(Severity s, const std::string& path, const char* code, std::string message) {
        issues.push_back({s, path, code, std::move(message)});
    }

    void check_map(const LanguageMap& m, const std::string& path, const char* what) {
        for (const auto& [tag, value] : m)
            if (value.empty()) add(Severity::error, path, "SCHEMA_VIOLATION", std::string(what) + "." + tag + " is empty");
    }

    void check_field(const TemplateNode& n, const std::string& path) {
        const Constraints& c = n.constraints;
        if (!n.children.empty()) add(Severity::error, path, "SCHEMA_VIOLATION", "fields cannot have children");
        if (is_render_only(n) && n.required)
            add(Severity::error, path, "SCHEMA_VIOLATION", "image and video fields cannot be required");
        if (n.field_type == FieldType::checkbox && n.cardinality.multi_valued())
            add(Severity::error, path, "SCHEMA_VIOLATION", "checkbox fields are multi-select and must be single-valued");

        switch (n.field_type) {
            case FieldType::text:
                if (c.regex) {
                    try {
                        std::regex probe(*c.regex, std::regex::ECMAScript);
                    } catch (const std::regex_error& e) {
                        add(Severity::error, path, "BAD_REGEX", "regex does not compile: " + std::string(e.what()));
                    }
                }
                if (c.min_length && c.max_length && *c.min_length > *c.max_length)
                    add(Severity::error, path, "SCHEMA_VIOLATION", "minLength exceeds maxLength");
                break;
            case FieldType::number: {
                auto bound_ok = [&](const std::optional<std::string>& b) {
                    if (!b) return true;
                    return c.number_kind == NumberKind::integer ? lexical::is_integer(*b) : lexical::is_decimal(*b);
                };
                if (!bound_ok(c.min_value) || !bound_ok(c.max_value))
                    add(Severity::error, path, "SCHEMA_VIOLATION", "numeric bounds must match numberKind");
                else if (c.min_value && c.max_value && lexical::compare_decimal(*c.min_value, *c.max_value) > 0)
                    add(Severity::error, path, "SCHEMA_VIOLATION", "minValue exceeds maxValue");
                break;
            }
            case FieldType::checkbox:
            case FieldType::list: {
                if (c.literals.empty()) add(Severity::error, path, "EMPTY_LITERALS", "list needs at least one literal");
                std::set<std::string> labels;
                for (const auto& lit : c.literals) {
                    if (lit.label.empty()) add(Severity::error, path, "SCHEMA_VIOLATION", "literal label is empty");
                    else if (!labels.insert(lit.label).second)
                        add(Severity::error, path, "SCHEMA_VIOLATION", "literal label '" + lit.label + "' repeats");
                    if (lit.iri && !lexical::is_absolute_iri(*lit.iri))
                        add(Severity::error, path, "BAD_IRI", "literal IRI is not absolute: " + *lit.iri);
                }
                break;
            }
            case FieldType::controlled_term:
                if (c.sources.empty())
                    add(Severity::error, path, "EMPTY_TERM_SOURCES", "controlled term field has no term sources");
                for (const auto& s : c.sources) {
                    if (s.acronym.empty()) add(Severity::error, path, "SCHEMA_VIOLATION", "term source needs an acronym");
                    if (s.type == TermSourceType::branch) {
                        if (s.root_iri.empty())
                            add(Severity::error, path, "SCHEMA_VIOLATION", "branch source needs rootIri");
                        else if (!lexical::is_absolute_iri(s.root_iri))
                            add(Severity::error, path, "BAD_IRI", "branch rootIri is not absolute: " + s.root_iri);
                    }
                    if (s.type == TermSourceType::value_set && s.value_set_id.empty())
                        add(Severity::error, path, "SCHEMA_VIOLATION", "value_set source needs valueSetId");
                }
                break;
            case FieldType::external_authority:
                if (!c.authority) add(Severity::error, path, "SCHEMA_VIOLATION", "external authority field needs an authority");
                break;
            default:
                break;
        }

        if (n.default_value && !is_empty(*n.default_value)) {
            for (const auto& f : check_value(n, *n.default_value, true))
                add(Severity::error, path, "SCHEMA_VIOLATION", "default value invalid: " + f.message);
        }
    }

    void check_nodes(const std::vector<TemplateNode>& nodes, const std::string& parent, bool hidden_parent) {
        std::set<std::string> seen;
        for (const auto& n : nodes) {
            std::string path = parent.empty() ? n.key : parent + "/" + n.key;
            if (!lexical::is_node_key(n.key))
                add(Severity::error, path, "SCHEMA_VIOLATION", "key must match [a-z][a-z0-9_]*");
            if (!seen.insert(n.key).second)
                add(Severity::error, path, "DUPLICATE_KEY", "sibling key '" + n.key + "' is already used");
            const auto& card = n.cardinality;
            if ((card.max && *card.max == 0) || (card.max && card.min > *card.max))
                add(Severity::error, path, "BAD_CARDINALITY", "cardinality needs 0 <= min <= max and max >= 1");
            check_map(n.label, path, "label");
            check_map(n.help, path, "help");
            bool hidden = hidden_parent || n.hidden;
            if (!hidden && n.label.empty())
                add(Severity::warning, path, "SCHEMA_VIOLATION", "visible node has no label; the key will be shown");
            if (n.is_field()) {
                if (hidden && n.required)
                    add(Severity::warning, path, "SCHEMA_VIOLATION", "hidden field is required; users cannot fill it");
                check_field(n, path);
            } else {
                check_nodes(n.children, path, hidden);
            }
        }
    }
};

}  // namespace detail

/// Every invariant violation in an already-parsed template, sorted by path
/// then code. Empty iff the template is valid.
inline std::vector<TemplateIssue> validate_template(const Template& t) {
    detail::TemplateChecker checker;
    if (!lexical::is_absolute_iri(t.id)) checker.add(Severity::error, "", "BAD_IRI", "template id is not an absolute IRI");
    if (!lexical::is_semver(t.version))
        checker.add(Severity::error, "", "SCHEMA_VIOLATION", "version is not a semantic version");
    checker.check_map(t.name, "", "name");
    checker.check_map(t.description, "", "description");
    for (const auto& [key, iri] : t.property_context)
        if (!lexical::is_absolute_iri(iri))
            checker.add(Severity::error, "", "BAD_IRI", "propertyContext." + key + " is not an absolute IRI");
    checker.check_nodes(t.children, "", false);
    std::sort(checker.issues.begin(), checker.issues.end(),
              [](const TemplateIssue& a, const TemplateIssue& b) { return issue_order(a, b); });
    return std::move(checker.issues);
}

/// Structural reading problems plus semantic findings for a raw document, as
/// one sorted list. This is the pre-flight used before registry upload.
inline std::vector<TemplateIssue> check_template_document(const json& doc) {
    auto parsed = parse_template_lenient(doc);
    auto issues = std::move(parsed.issues);
    auto semantic = validate_template(parsed.tmpl);
    issues.insert(issues.end(), semantic.begin(), semantic.end());
    std::sort(issues.begin(), issues.end(),
              [](const TemplateIssue& a, const TemplateIssue& b) { return issue_order(a, b); });
    issues.erase(std::unique(issues.begin(), issues.end()), issues.end());
    return issues;
}

inline json to_json(const TemplateIssue& i) {
    return json{{"severity", to_string(i.severity)}, {"path", i.path}, {"code", i.code}, {"message", i.message}};
}

inline json to_json(const std::vector<TemplateIssue>& issues) {
    json arr = json::array();
    for (const auto& i : issues) arr.push_back(to_json(i));
    return arr;
}

}  // namespace metaforge
