#pragma once

#include <map>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "metaforge/identifiers.hpp"
#include "metaforge/lexical.hpp"
#include "metaforge/template_model.hpp"

namespace metaforge {

/// One problem with a single value against a single field definition.
struct ValueFinding {
    Severity severity = Severity::error;
    std::string code;
    std::string message;
    std::optional<std::string> expected;
    std::optional<std::string> actual;
};

/// Whether `value` is in the lexical space of the compact XSD `datatype`.
inline bool lexically_valid(const std::string& datatype, const std::string& value) {
    if (datatype == "xsd:integer") return lexical::is_integer(value);
    if (datatype == "xsd:decimal") return lexical::is_decimal(value);
    if (datatype == "xsd:boolean") return lexical::is_boolean(value);
    if (datatype == "xsd:date") return lexical::is_date(value);
    if (datatype == "xsd:dateTime") return lexical::is_datetime(value);
    if (datatype == "xsd:time") return lexical::is_time(value);
    if (datatype == "xsd:anyURI") return lexical::is_absolute_iri(value);
    return true;
}

/// Compiled anchored pattern, cached per thread. Throws std::regex_error for
/// an invalid pattern.
inline const std::regex& compiled_pattern(const std::string& pattern) {
    thread_local std::map<std::string, std::regex> cache;
    auto it = cache.find(pattern);
    if (it == cache.end()) it = cache.emplace(pattern, std::regex(pattern, std::regex::ECMAScript)).first;
    return it->second;
}

inline std::size_t utf8_length(const std::string& s) {
    std::size_t n = 0;
    for (unsigned char c : s)
        if ((c & 0xC0) != 0x80) ++n;
    return n;
}

inline bool is_term_field(const TemplateNode& field) {
    return field.field_type == FieldType::controlled_term || field.field_type == FieldType::external_authority;
}

namespace detail {

inline void check_literal(const TemplateNode& field, const Literal& lit, bool strict, std::vector<ValueFinding>& out) {
    const Constraints& c = field.constraints;
    if (is_term_field(field)) {
        out.push_back({strict ? Severity::error : Severity::warning, "TERM_SOURCE_MISMATCH",
                       "free text '" + lit.value + "' has not been resolved to a " +
                           (field.field_type == FieldType::controlled_term ? "term" : "registry identifier"),
                       field.field_type == FieldType::controlled_term ? "term" : "authority", "literal"});
        return;
    }
    auto datatype = expected_datatype(field);
    if (lit.datatype != datatype) {
        out.push_back({Severity::error, "TYPE_MISMATCH", "literal datatype does not match the field", datatype,
                       lit.datatype});
        return;
    }
    if (!lexically_valid(datatype, lit.value)) {
        out.push_back({Severity::error, "TYPE_MISMATCH", "'" + lit.value + "' is not a valid " + datatype, datatype,
                       lit.value});
        return;
    }
    switch (field.field_type) {
        case FieldType::text: {
            auto len = utf8_length(lit.value);
            if (c.min_length && len < *c.min_length)
                out.push_back({Severity::error, "RANGE_VIOLATION", "text shorter than minLength",
                               ">= " + std::to_string(*c.min_length), std::to_string(len)});
            if (c.max_length && len > *c.max_length)
                out.push_back({Severity::error, "RANGE_VIOLATION", "text longer than maxLength",
                               "<= " + std::to_string(*c.max_length), std::to_string(len)});
            if (c.regex) {
                try {
                    if (!std::regex_match(lit.value, compiled_pattern(*c.regex)))
                        out.push_back({Severity::error, "PATTERN_MISMATCH", "value does not match the field pattern",
                                       *c.regex, lit.value});
                } catch (const std::regex_error&) {
                    // Broken patterns are a template finding (BAD_REGEX), not an instance one.
                }
            }
            break;
        }
        case FieldType::number:
            if (c.min_value && lexical::is_decimal(*c.min_value) &&
                lexical::compare_decimal(lit.value, *c.min_value) < 0)
                out.push_back({Severity::error, "RANGE_VIOLATION", "number below minValue", ">= " + *c.min_value,
                               lit.value});
            if (c.max_value && lexical::is_decimal(*c.max_value) &&
                lexical::compare_decimal(lit.value, *c.max_value) > 0)
                out.push_back({Severity::error, "RANGE_VIOLATION", "number above maxValue", "<= " + *c.max_value,
                               lit.value});
            break;
        case FieldType::list:
        case FieldType::checkbox: {
            bool member = std::any_of(c.literals.begin(), c.literals.end(),
                                      [&](const LiteralOption& o) { return o.label == lit.value; });
            if (!member)
                out.push_back({Severity::error, "NOT_IN_ALLOWED_VALUES",
                               "'" + lit.value + "' is not one of the allowed values", std::nullopt, lit.value});
            break;
        }
        default:
            break;
    }
}

}  // namespace detail

/// All findings for one non-Empty value. Free text on term or authority fields
/// is an error only when `strict`; everything else is mode-independent.
inline std::vector<ValueFinding> check_value(const TemplateNode& field, const FieldValue& v, bool strict) {
    std::vector<ValueFinding> out;
    if (auto* lit = std::get_if<Literal>(&v)) {
        detail::check_literal(field, *lit, strict, out);
    } else if (auto* term = std::get_if<Term>(&v)) {
        if (field.field_type != FieldType::controlled_term) {
            out.push_back({Severity::error, "TERM_SOURCE_MISMATCH", "term values are only allowed on controlled_term fields",
                           std::string(to_string(field.field_type)), "term"});
        } else {
            if (!lexical::is_absolute_iri(term->iri))
                out.push_back({Severity::error, "INVALID_IDENTIFIER", "term IRI is not an absolute IRI", "IRI",
                               term->iri});
            if (term->label.empty())
                out.push_back({Severity::error, "TYPE_MISMATCH", "term has no label", "label", ""});
        }
    } else if (auto* auth = std::get_if<Authority>(&v)) {
        if (field.field_type != FieldType::external_authority) {
            out.push_back({Severity::error, "TERM_SOURCE_MISMATCH",
                           "authority values are only allowed on external_authority fields",
                           std::string(to_string(field.field_type)), "authority"});
        } else if (field.constraints.authority && auth->source != *field.constraints.authority) {
            out.push_back({Severity::error, "TERM_SOURCE_MISMATCH", "identifier comes from the wrong authority",
                           std::string(to_string(*field.constraints.authority)), std::string(to_string(auth->source))});
        } else {
            bool canonical = false;
            try {
                canonical = identifiers::is_canonical(auth->source, auth->id);
            } catch (const Error&) {
            }
            if (!canonical)
                out.push_back({Severity::error, "INVALID_IDENTIFIER",
                               "not a valid canonical " + std::string(to_string(auth->source)) + " identifier",
                               std::nullopt, auth->id});
            if (auth->label.empty())
                out.push_back({Severity::error, "TYPE_MISMATCH", "identifier has no label", "label", ""});
        }
    }
    return out;
}

}  // namespace metaforge
