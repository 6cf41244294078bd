#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "metaforge/gateway/suggestion.hpp"
#include "metaforge/lexical.hpp"
#include "metaforge/template_model.hpp"

namespace metaforge::gateway {

struct TermRecord {
    std::string iri;
    std::string label;
    std::vector<std::string> synonyms;
    std::string source_acronym;
    std::optional<std::string> parent_iri;
};

/// In-memory vocabulary built from a JSON array of
/// {iri, label, synonyms, sourceAcronym, parentIri?}.
class TermIndex {
public:
    TermIndex() = default;

    explicit TermIndex(std::vector<TermRecord> records) {
        for (auto& r : records) add(std::move(r));
    }

    static TermIndex from_json(const json& doc) {
        if (!doc.is_array()) throw Error("MALFORMED_JSON", "vocabulary must be a JSON array");
        TermIndex idx;
        for (const auto& e : doc) {
            TermRecord r;
            r.iri = e.value("iri", "");
            r.label = e.value("label", "");
            r.source_acronym = e.value("sourceAcronym", "");
            for (const auto& s : e.value("synonyms", json::array()))
                if (s.is_string()) r.synonyms.push_back(s.get<std::string>());
            if (auto p = e.find("parentIri"); p != e.end() && p->is_string()) r.parent_iri = p->get<std::string>();
            if (!lexical::is_absolute_iri(r.iri) || r.label.empty() || r.source_acronym.empty())
                throw Error("SCHEMA_VIOLATION", "vocabulary entry needs an absolute iri, a label and a sourceAcronym");
            idx.add(std::move(r));
        }
        return idx;
    }

    static TermIndex load(const std::filesystem::path& file) {
        std::ifstream in(file);
        if (!in) throw Error("NOT_FOUND", "cannot read vocabulary " + file.string());
        json doc = json::parse(in, nullptr, false);
        if (doc.is_discarded()) throw Error("MALFORMED_JSON", "vocabulary is not valid JSON: " + file.string());
        return from_json(doc);
    }

    bool has_acronym(const std::string& acronym) const { return by_acronym_.count(acronym) > 0; }

    /// Terms that a source admits: the whole acronym for `ontology`, strict
    /// descendants of rootIri for `branch`, direct children of valueSetId for
    /// `value_set`.
    std::vector<const TermRecord*> scope(const TermSourceSpec& src) const {
        std::vector<const TermRecord*> out;
        auto it = by_acronym_.find(src.acronym);
        if (it == by_acronym_.end())
            throw Error("UNKNOWN_SOURCE_ACRONYM", "no vocabulary loaded for acronym '" + src.acronym + "'");
        for (auto i : it->second) {
            const auto& r = terms_[i];
            switch (src.type) {
                case TermSourceType::ontology: out.push_back(&r); break;
                case TermSourceType::branch:
                    if (descends_from(r, src.root_iri, src.acronym)) out.push_back(&r);
                    break;
                case TermSourceType::value_set:
                    if (r.parent_iri && *r.parent_iri == src.value_set_id) out.push_back(&r);
                    break;
            }
        }
        return out;
    }

    std::size_t size() const { return terms_.size(); }

private:
    void add(TermRecord r) {
        by_acronym_[r.source_acronym].push_back(terms_.size());
        terms_.push_back(std::move(r));
    }

    const TermRecord* find(const std::string& acronym, const std::string& iri) const {
        auto it = by_acronym_.find(acronym);
        if (it == by_acronym_.end()) return nullptr;
        for (auto i : it->second)
            if (terms_[i].iri == iri) return &terms_[i];
        return nullptr;
    }

    bool descends_from(const TermRecord& r, const std::string& root, const std::string& acronym) const {
        std::set<std::string> seen;
        const TermRecord* cur = &r;
        while (cur->parent_iri && seen.insert(cur->iri).second) {
            if (*cur->parent_iri == root) return true;
            cur = find(acronym, *cur->parent_iri);
            if (!cur) return false;
        }
        return false;
    }

    std::vector<TermRecord> terms_;
    std::map<std::string, std::vector<std::size_t>> by_acronym_;
};

namespace detail {

// 0 exact label, 1 label prefix, 2 label substring, 3 synonym; nullopt = no match.
inline std::optional<int> match_tier(const TermRecord& r, const std::string& q) {
    auto label = text::lower(r.label);
    if (label == q) return 0;
    if (text::starts_with(label, q)) return 1;
    if (text::contains(label, q)) return 2;
    for (const auto& s : r.synonyms)
        if (text::contains(text::lower(s), q)) return 3;
    return std::nullopt;
}

}  // namespace detail

/// Case-insensitive term search over the union of the given sources. Output
/// order is (tier, label, iri), which is total, so results are deterministic.
inline std::vector<TermSuggestion> search_ontology(const TermIndex& index, const std::vector<TermSourceSpec>& sources,
                                                   std::string_view query, std::size_t limit) {
    auto q = text::normalize_query(query);
    if (q.empty()) throw Error("QUERY_EMPTY", "query is empty");
    if (sources.empty()) throw Error("UNKNOWN_SOURCE_ACRONYM", "no term sources given");

    struct Hit {
        int tier;
        const TermRecord* term;
    };
    std::vector<Hit> hits;
    std::set<std::string> seen;
    for (const auto& src : sources) {
        for (const auto* r : index.scope(src)) {
            if (seen.count(r->iri)) continue;
            if (auto tier = detail::match_tier(*r, q)) {
                seen.insert(r->iri);
                hits.push_back({*tier, r});
            }
        }
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
        return std::tie(a.tier, a.term->label, a.term->iri) < std::tie(b.tier, b.term->label, b.term->iri);
    });
    std::vector<TermSuggestion> out;
    for (const auto& h : hits) {
        if (out.size() >= limit) break;
        out.push_back({h.term->iri, h.term->label, h.term->synonyms, h.term->source_acronym});
    }
    return out;
}

}  // namespace metaforge::gateway
