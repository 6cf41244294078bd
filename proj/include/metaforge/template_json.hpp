#pragma once

#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include <openssl/evp.h>

#include "metaforge/template_model.hpp"
#include "metaforge/value_json.hpp"

// Template file format: parsing, canonical serialization and fingerprinting.

namespace metaforge {

struct TemplateParseResult {
    Template tmpl;
    std::vector<TemplateIssue> issues;  // structural problems found while reading the document
};

namespace detail {

inline const std::vector<std::string> kTemplateKeys = {"id", "name", "description", "version", "propertyContext",
                                                       "children"};

class TemplateReader {
public:
    std::vector<TemplateIssue> issues;

    void fail(const std::string& path, const std::string& message) {
        issues.push_back({Severity::error, path, "SCHEMA_VIOLATION", message});
    }

    LanguageMap language_map(const json& j, const std::string& path, const char* what) {
        LanguageMap out;
        if (j.is_null()) return out;
        if (!j.is_object()) {
            fail(path, std::string(what) + " must be an object of language tag to string");
            return out;
        }
        for (const auto& [tag, value] : j.items()) {
            if (!value.is_string()) {
                fail(path, std::string(what) + "." + tag + " must be a string");
                continue;
            }
            out[tag] = value.get<std::string>();
        }
        return out;
    }

    std::optional<std::size_t> count(const json& j, const std::string& path, const char* what) {
        if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
            fail(path, std::string(what) + " must be a non-negative integer");
            return std::nullopt;
        }
        return j.get<std::size_t>();
    }

    std::optional<std::string> decimal_text(const json& j, const std::string& path, const char* what) {
        if (j.is_string()) return j.get<std::string>();
        if (j.is_number()) return j.dump();
        fail(path, std::string(what) + " must be a number or decimal string");
        return std::nullopt;
    }

    std::optional<Cardinality> cardinality(const json& node, bool required, const std::string& path) {
        auto it = node.find("cardinality");
        if (it == node.end() || it->is_null()) return Cardinality{required ? 1u : 0u, 1u};
        if (!it->is_object()) {
            fail(path, "cardinality must be an object");
            return std::nullopt;
        }
        Cardinality c{0, std::nullopt};
        if (auto mn = it->find("min"); mn != it->end()) {
            auto v = count(*mn, path, "cardinality.min");
            if (!v) return std::nullopt;
            c.min = *v;
        }
        if (auto mx = it->find("max"); mx != it->end() && !mx->is_null() && *mx != "unbounded") {
            auto v = count(*mx, path, "cardinality.max");
            if (!v) return std::nullopt;
            c.max = *v;
        }
        return c;
    }

    Constraints constraints(const json& node, FieldType type, const std::string& path) {
        Constraints c;
        auto it = node.find("constraints");
        if (it == node.end() || it->is_null()) return c;
        if (!it->is_object()) {
            fail(path, "constraints must be an object");
            return c;
        }
        const json& j = *it;
        auto str = [&](const char* key) -> std::optional<std::string> {
            auto f = j.find(key);
            if (f == j.end() || f->is_null()) return std::nullopt;
            if (!f->is_string()) {
                fail(path, std::string("constraints.") + key + " must be a string");
                return std::nullopt;
            }
            return f->get<std::string>();
        };
        switch (type) {
            case FieldType::text:
                if (auto f = j.find("minLength"); f != j.end()) c.min_length = count(*f, path, "minLength");
                if (auto f = j.find("maxLength"); f != j.end()) c.max_length = count(*f, path, "maxLength");
                c.regex = str("regex");
                break;
            case FieldType::number:
                if (auto k = str("numberKind")) {
                    if (*k == "integer") c.number_kind = NumberKind::integer;
                    else if (*k != "decimal") fail(path, "numberKind must be integer or decimal");
                }
                if (auto f = j.find("minValue"); f != j.end()) c.min_value = decimal_text(*f, path, "minValue");
                if (auto f = j.find("maxValue"); f != j.end()) c.max_value = decimal_text(*f, path, "maxValue");
                break;
            case FieldType::temporal:
                if (auto g = str("granularity")) {
                    if (*g == "date") c.granularity = Granularity::date;
                    else if (*g == "datetime") c.granularity = Granularity::datetime;
                    else if (*g == "time") c.granularity = Granularity::time;
                    else fail(path, "granularity must be date, datetime or time");
                }
                break;
            case FieldType::checkbox:
            case FieldType::list:
                if (auto f = j.find("literals"); f != j.end()) {
                    if (!f->is_array()) {
                        fail(path, "literals must be an array");
                        break;
                    }
                    for (const auto& lit : *f) {
                        if (lit.is_string()) {
                            c.literals.push_back({lit.get<std::string>(), std::nullopt});
                        } else if (lit.is_object() && lit.contains("label") && lit["label"].is_string()) {
                            LiteralOption opt{lit["label"].get<std::string>(), std::nullopt};
                            if (auto iri = lit.find("iri"); iri != lit.end() && iri->is_string())
                                opt.iri = iri->get<std::string>();
                            c.literals.push_back(std::move(opt));
                        } else {
                            fail(path, "each literal needs a string label");
                        }
                    }
                }
                break;
            case FieldType::controlled_term:
                if (auto f = j.find("sources"); f != j.end()) {
                    if (!f->is_array()) {
                        fail(path, "sources must be an array");
                        break;
                    }
                    for (const auto& src : *f) {
                        if (!src.is_object()) {
                            fail(path, "each term source must be an object");
                            continue;
                        }
                        TermSourceSpec spec;
                        auto type_name = src.value("sourceType", std::string{});
                        auto st = parse_term_source_type(type_name);
                        if (!st) {
                            fail(path, "unknown sourceType '" + type_name + "'");
                            continue;
                        }
                        spec.type = *st;
                        spec.acronym = src.value("acronym", std::string{});
                        spec.root_iri = src.value("rootIri", std::string{});
                        spec.value_set_id = src.value("valueSetId", std::string{});
                        c.sources.push_back(std::move(spec));
                    }
                }
                break;
            case FieldType::external_authority:
                if (auto a = str("authority")) {
                    c.authority = parse_authority_source(*a);
                    if (!c.authority) fail(path, "unknown authority '" + *a + "'");
                }
                break;
            default:
                break;
        }
        return c;
    }

    std::optional<TemplateNode> node(const json& j, const std::string& parent, std::size_t index) {
        std::string where = parent.empty() ? "" : parent;
        if (!j.is_object()) {
            fail(where, "child #" + std::to_string(index) + " is not an object");
            return std::nullopt;
        }
        auto key_it = j.find("key");
        if (key_it == j.end() || !key_it->is_string()) {
            fail(where, "child #" + std::to_string(index) + " has no string key");
            return std::nullopt;
        }
        TemplateNode n;
        n.key = key_it->get<std::string>();
        std::string path = parent.empty() ? n.key : parent + "/" + n.key;

        auto kind = j.value("kind", std::string{});
        if (kind == "field") n.kind = NodeKind::field;
        else if (kind == "element") n.kind = NodeKind::element;
        else {
            fail(path, "kind must be field or element");
            return std::nullopt;
        }
        n.label = language_map(j.value("label", json()), path, "label");
        n.help = language_map(j.value("help", json()), path, "help");
        if (auto h = j.find("hidden"); h != j.end()) {
            if (h->is_boolean()) n.hidden = h->get<bool>();
            else fail(path, "hidden must be a boolean");
        }

        if (n.is_field()) {
            if (auto r = j.find("required"); r != j.end()) {
                if (r->is_boolean()) n.required = r->get<bool>();
                else fail(path, "required must be a boolean");
            }
            auto ft_it = j.find("fieldType");
            auto ft = ft_it != j.end() && ft_it->is_string() ? parse_field_type(ft_it->get<std::string>())
                                                             : std::nullopt;
            if (!ft) {
                fail(path, "field needs a known fieldType");
                return std::nullopt;
            }
            n.field_type = *ft;
            n.constraints = constraints(j, n.field_type, path);
            if (j.contains("children") && !(j["children"].is_array() && j["children"].empty()))
                fail(path, "fields cannot have children");
            if (auto d = j.find("default"); d != j.end() && !d->is_null()) {
                const json& dv = d->is_array() && d->size() == 1 ? d->front() : *d;
                if (auto v = value_from_jsonld(n, dv)) n.default_value = *v;
                else fail(path, "default has an unsupported shape");
            }
        } else {
            for (const char* k : {"fieldType", "constraints", "default"})
                if (j.contains(k)) fail(path, std::string("elements cannot declare ") + k);
            if (auto c = j.find("children"); c != j.end()) {
                if (!c->is_array()) fail(path, "children must be an array");
                else n.children = nodes(*c, path);
            }
        }
        auto card = cardinality(j, n.is_field() && n.required, path);
        if (!card) return std::nullopt;
        n.cardinality = *card;
        return n;
    }

    std::vector<TemplateNode> nodes(const json& arr, const std::string& parent) {
        std::vector<TemplateNode> out;
        std::size_t index = 0;
        for (const auto& child : arr)
            if (auto n = node(child, parent, index++)) out.push_back(std::move(*n));
        return out;
    }
};

}  // namespace detail

/// Read a template document, collecting structural problems instead of
/// throwing. Nodes that cannot be interpreted at all are dropped.
inline TemplateParseResult parse_template_lenient(const json& doc) {
    detail::TemplateReader reader;
    Template t;
    if (!doc.is_object()) {
        reader.fail("", "template document must be a JSON object");
        return {std::move(t), std::move(reader.issues)};
    }
    if (auto id = doc.find("id"); id != doc.end() && id->is_string()) t.id = id->get<std::string>();
    else reader.fail("", "template needs a string id");
    t.name = reader.language_map(doc.value("name", json()), "", "name");
    t.description = reader.language_map(doc.value("description", json()), "", "description");
    if (auto v = doc.find("version"); v != doc.end() && v->is_string()) t.version = v->get<std::string>();
    else reader.fail("", "template needs a string version");
    if (auto pc = doc.find("propertyContext"); pc != doc.end() && !pc->is_null()) {
        if (!pc->is_object()) {
            reader.fail("", "propertyContext must be an object");
        } else {
            for (const auto& [key, iri] : pc->items()) {
                if (iri.is_string()) t.property_context[key] = iri.get<std::string>();
                else reader.fail("", "propertyContext." + key + " must be an IRI string");
            }
        }
    }
    if (auto c = doc.find("children"); c != doc.end() && !c->is_null()) {
        if (!c->is_array()) reader.fail("", "children must be an array");
        else t.children = reader.nodes(*c, "");
    }
    for (const auto& [key, value] : doc.items())
        if (std::find(detail::kTemplateKeys.begin(), detail::kTemplateKeys.end(), key) ==
            detail::kTemplateKeys.end())
            t.extras[key] = value;
    return {std::move(t), std::move(reader.issues)};
}

inline json parse_json_text(std::string_view text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error("MALFORMED_JSON", e.what());
    }
}

namespace detail {

inline void collect_duplicates(const std::vector<TemplateNode>& nodes, const std::string& parent,
                               std::vector<TemplateIssue>& out) {
    std::vector<std::string> seen;
    for (const auto& n : nodes) {
        std::string path = parent.empty() ? n.key : parent + "/" + n.key;
        if (std::find(seen.begin(), seen.end(), n.key) != seen.end())
            out.push_back({Severity::error, path, "DUPLICATE_KEY", "sibling key '" + n.key + "' is already used"});
        else
            seen.push_back(n.key);
        collect_duplicates(n.children, path, out);
    }
}

}  // namespace detail

/// One DUPLICATE_KEY issue per repeated sibling key (the later occurrence).
inline std::vector<TemplateIssue> duplicate_key_issues(const Template& t) {
    std::vector<TemplateIssue> out;
    detail::collect_duplicates(t.children, "", out);
    return out;
}

/// Parse a template document. Throws TemplateError (SCHEMA_VIOLATION or
/// DUPLICATE_KEY, with the issue list) when the document is structurally
/// unusable.
inline Template parse_template(const json& doc) {
    auto result = parse_template_lenient(doc);
    auto dups = duplicate_key_issues(result.tmpl);
    result.issues.insert(result.issues.end(), dups.begin(), dups.end());
    if (!result.issues.empty()) {
        std::sort(result.issues.begin(), result.issues.end(), issue_order);
        const auto& first = result.issues.front();
        bool dup_only = std::all_of(result.issues.begin(), result.issues.end(),
                                    [](const auto& i) { return i.code == "DUPLICATE_KEY"; });
        throw TemplateError(dup_only ? "DUPLICATE_KEY" : "SCHEMA_VIOLATION",
                            first.path + ": " + first.message, std::move(result.issues));
    }
    return std::move(result.tmpl);
}

inline Template parse_template_text(std::string_view text) { return parse_template(parse_json_text(text)); }

namespace detail {

inline json canonical_map(const LanguageMap& m) {
    json out = json::object();
    for (const auto& [k, v] : m) out[k] = v;
    return out;
}

inline json canonical_constraints(const TemplateNode& n) {
    const Constraints& c = n.constraints;
    json out = json::object();
    switch (n.field_type) {
        case FieldType::text:
            if (c.min_length) out["minLength"] = *c.min_length;
            if (c.max_length) out["maxLength"] = *c.max_length;
            if (c.regex) out["regex"] = *c.regex;
            break;
        case FieldType::number:
            out["numberKind"] = to_string(c.number_kind);
            if (c.min_value) out["minValue"] = *c.min_value;
            if (c.max_value) out["maxValue"] = *c.max_value;
            break;
        case FieldType::temporal: out["granularity"] = to_string(c.granularity); break;
        case FieldType::checkbox:
        case FieldType::list: {
            json lits = json::array();
            for (const auto& lit : c.literals) {
                json l{{"label", lit.label}};
                if (lit.iri) l["iri"] = *lit.iri;
                lits.push_back(std::move(l));
            }
            out["literals"] = std::move(lits);
            break;
        }
        case FieldType::controlled_term: {
            json srcs = json::array();
            for (const auto& s : c.sources) {
                json j{{"sourceType", to_string(s.type)}, {"acronym", s.acronym}};
                if (s.type == TermSourceType::branch) j["rootIri"] = s.root_iri;
                if (s.type == TermSourceType::value_set) j["valueSetId"] = s.value_set_id;
                srcs.push_back(std::move(j));
            }
            out["sources"] = std::move(srcs);
            break;
        }
        case FieldType::external_authority:
            if (c.authority) out["authority"] = to_string(*c.authority);
            break;
        default:
            break;
    }
    return out;
}

inline json canonical_node(const TemplateNode& n) {
    json j;
    j["kind"] = n.is_field() ? "field" : "element";
    j["key"] = n.key;
    j["label"] = canonical_map(n.label);
    j["help"] = canonical_map(n.help);
    j["hidden"] = n.hidden;
    json card{{"min", n.cardinality.min}};
    if (n.cardinality.max) card["max"] = *n.cardinality.max;
    j["cardinality"] = std::move(card);
    if (n.is_field()) {
        j["required"] = n.required;
        j["fieldType"] = to_string(n.field_type);
        j["constraints"] = canonical_constraints(n);
        if (n.default_value && !is_empty(*n.default_value)) j["default"] = value_to_jsonld(*n.default_value);
    } else {
        json kids = json::array();
        for (const auto& c : n.children) kids.push_back(canonical_node(c));
        j["children"] = std::move(kids);
    }
    return j;
}

}  // namespace detail

/// Canonical JSON form of a template. Object keys are sorted by the JSON
/// container; arrays keep declared order; defaults are made explicit.
inline json to_canonical_json(const Template& t) {
    json j = t.extras.is_object() ? t.extras : json::object();
    j["id"] = t.id;
    j["name"] = detail::canonical_map(t.name);
    j["description"] = detail::canonical_map(t.description);
    j["version"] = t.version;
    json pc = json::object();
    for (const auto& [k, v] : t.property_context) pc[k] = v;
    j["propertyContext"] = std::move(pc);
    json kids = json::array();
    for (const auto& c : t.children) kids.push_back(detail::canonical_node(c));
    j["children"] = std::move(kids);
    return j;
}

/// Compact UTF-8 text of the canonical form; the fingerprint is taken over these bytes.
inline std::string canonical_text(const Template& t) { return to_canonical_json(t).dump(); }

inline std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("DIGEST_FAILED", "SHA-256 digest failed");
    std::string hex;
    hex.reserve(len * 2);
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

inline std::string template_fingerprint(const Template& t) { return sha256_hex(canonical_text(t)); }

}  // namespace metaforge
