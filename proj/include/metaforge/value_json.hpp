#pragma once

#include <optional>
#include <string>

#include "metaforge/template_model.hpp"

namespace metaforge {

inline constexpr const char* kRdfsLabelIri = "http://www.w3.org/2000/01/rdf-schema#label";

/// JSON-LD value object: `{"@value","@type"}` for literals,
/// `{"@id","rdfs:label"}` for terms and authority identifiers.
inline json value_to_jsonld(const FieldValue& v) {
    if (auto* lit = std::get_if<Literal>(&v)) return json{{"@value", lit->value}, {"@type", lit->datatype}};
    if (auto* term = std::get_if<Term>(&v)) return json{{"@id", term->iri}, {"rdfs:label", term->label}};
    if (auto* auth = std::get_if<Authority>(&v)) return json{{"@id", auth->id}, {"rdfs:label", auth->label}};
    return nullptr;
}

/// Bind one JSON value to a field. `@id` objects become Term or Authority
/// (by field type); `@value` objects and bare scalars become Literal.
/// Returns nullopt when the JSON has none of those shapes.
inline std::optional<FieldValue> value_from_jsonld(const TemplateNode& field, const json& j) {
    auto scalar_text = [](const json& s) -> std::optional<std::string> {
        if (s.is_string()) return s.get<std::string>();
        if (s.is_boolean()) return s.get<bool>() ? "true" : "false";
        if (s.is_number()) return s.dump();
        return std::nullopt;
    };
    if (j.is_object()) {
        if (auto id = j.find("@id"); id != j.end()) {
            if (!id->is_string()) return std::nullopt;
            std::string label;
            auto lab = j.find("rdfs:label");
            if (lab == j.end()) lab = j.find(kRdfsLabelIri);
            if (lab != j.end() && lab->is_string()) label = lab->get<std::string>();
            if (field.field_type == FieldType::external_authority && field.constraints.authority)
                return Authority{*field.constraints.authority, id->get<std::string>(), label};
            return Term{id->get<std::string>(), label};
        }
        if (auto val = j.find("@value"); val != j.end()) {
            auto text = scalar_text(*val);
            if (!text) return std::nullopt;
            std::string datatype = expected_datatype(field);
            if (auto ty = j.find("@type"); ty != j.end()) {
                if (!ty->is_string()) return std::nullopt;
                datatype = xsd::compact(ty->get<std::string>());
            }
            return Literal{*text, datatype};
        }
        return std::nullopt;
    }
    if (auto text = scalar_text(j)) {
        bool term_field =
            field.field_type == FieldType::controlled_term || field.field_type == FieldType::external_authority;
        return Literal{*text, term_field ? "xsd:string" : expected_datatype(field)};
    }
    return std::nullopt;
}

}  // namespace metaforge
