#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "metaforge/jsonld.hpp"
#include "metaforge/template_check.hpp"

#ifndef METAFORGE_FIXTURES_DIR
#error "METAFORGE_FIXTURES_DIR must point at the fixtures directory"
#endif

namespace testsupport {

namespace mf = metaforge;
namespace fs = std::filesystem;

inline fs::path fixtures() { return METAFORGE_FIXTURES_DIR; }

inline std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("missing fixture " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline mf::json load_json(const fs::path& p) { return mf::json::parse(slurp(p)); }

inline mf::Template load_template(const std::string& name) {
    return mf::parse_template(load_json(fixtures() / "templates" / (name + ".json")));
}

inline mf::MetadataInstance load_instance(const mf::Template& t, const std::string& name) {
    return mf::parse_instance(t, load_json(fixtures() / "instances" / (name + ".jsonld"))).instance;
}

inline const std::vector<std::string>& template_names() {
    static const std::vector<std::string> names = {"empty", "rnaseq_assay", "investigator", "psych_ds", "rich_types"};
    return names;
}

// ISO 7064 MOD 11-2 written out from the standard's definition rather than
// the iterative form the library uses: the full 16-character string is valid
// iff sum(d_i * 2^(16-i)) + c ≡ 1 (mod 11), with X standing for 10.
inline char mod11_2_oracle(const std::string& fifteen) {
    for (int c = 0; c <= 10; ++c) {
        long long sum = c;
        long long weight = 2;
        for (int i = 14; i >= 0; --i) {
            sum += (fifteen[static_cast<std::size_t>(i)] - '0') * weight;
            weight = weight * 2 % 11;
        }
        if (sum % 11 == 1) return c == 10 ? 'X' : static_cast<char>('0' + c);
    }
    return '?';
}

inline std::string random_orcid_digits(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> digit(0, 9);
    std::string s;
    for (int i = 0; i < 15; ++i) s.push_back(static_cast<char>('0' + digit(rng)));
    return s;
}

inline std::string hyphenate(const std::string& sixteen) {
    return sixteen.substr(0, 4) + "-" + sixteen.substr(4, 4) + "-" + sixteen.substr(8, 4) + "-" + sixteen.substr(12, 4);
}

/// Random values that the engine accepts for a field and that satisfy its
/// constraints (type, range, pattern, allowed literals).
class ValueGen {
public:
    explicit ValueGen(std::uint64_t seed) : rng(seed) {}

    std::mt19937_64 rng;

    int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

    std::string word() {
        static const std::vector<std::string> parts = {"alpha", "Béta", "γ-ray", "O'Neil", "quote\"d", "tab\tbed",
                                                       "x<y>", "über", "日本", "plain", "  padded "};
        std::string s = parts[static_cast<std::size_t>(pick(0, static_cast<int>(parts.size()) - 1))];
        s += "-" + std::to_string(pick(0, 9999));
        return s;
    }

    std::vector<mf::FieldValue> values_for(const mf::TemplateNode& f) {
        using mf::FieldType;
        const auto& c = f.constraints;
        switch (f.field_type) {
            case FieldType::text: {
                if (c.regex) return {mf::Literal{"RUN-" + std::to_string(pick(1, 99999)), "xsd:string"}};
                return {mf::Literal{word(), "xsd:string"}};
            }
            case FieldType::number: {
                if (c.number_kind == mf::NumberKind::integer)
                    return {mf::Literal{std::to_string(pick(0, 1000000)), "xsd:integer"}};
                return {mf::Literal{std::to_string(pick(0, 40)) + "." + std::to_string(pick(0, 9)), "xsd:decimal"}};
            }
            case FieldType::temporal: {
                char buf[40];
                if (c.granularity == mf::Granularity::date) {
                    std::snprintf(buf, sizeof buf, "20%02d-%02d-%02d", pick(0, 29), pick(1, 12), pick(1, 28));
                    return {mf::Literal{buf, "xsd:date"}};
                }
                if (c.granularity == mf::Granularity::time) {
                    std::snprintf(buf, sizeof buf, "%02d:%02d:%02d", pick(0, 23), pick(0, 59), pick(0, 59));
                    return {mf::Literal{buf, "xsd:time"}};
                }
                std::snprintf(buf, sizeof buf, "20%02d-%02d-%02dT%02d:%02d:00Z", pick(0, 29), pick(1, 12), pick(1, 28),
                              pick(0, 23), pick(0, 59));
                return {mf::Literal{buf, "xsd:dateTime"}};
            }
            case FieldType::boolean: return {mf::Literal{coin() ? "true" : "false", "xsd:boolean"}};
            case FieldType::checkbox: {
                std::vector<mf::FieldValue> out;
                for (const auto& lit : c.literals)
                    if (coin()) out.push_back(mf::Literal{lit.label, "xsd:string"});
                if (out.empty()) out.push_back(mf::Literal{c.literals.front().label, "xsd:string"});
                return out;
            }
            case FieldType::list: {
                const auto& lit = c.literals[static_cast<std::size_t>(pick(0, static_cast<int>(c.literals.size()) - 1))];
                return {mf::Literal{lit.label, "xsd:string"}};
            }
            case FieldType::link:
                return {mf::Literal{"https://data.metaforge.example/item/" + std::to_string(pick(0, 99999)), "xsd:anyURI"}};
            case FieldType::controlled_term:
                return {mf::Term{"https://vocab.metaforge.example/term/" + std::to_string(pick(0, 999)), word()}};
            case FieldType::external_authority: return {authority(*c.authority)};
            case FieldType::image:
            case FieldType::video: return {};
        }
        return {};
    }

    mf::Authority authority(mf::AuthoritySource s) {
        switch (s) {
            case mf::AuthoritySource::orcid: {
                auto base = random_orcid_digits(rng);
                return {s, "https://orcid.org/" + hyphenate(base + mod11_2_oracle(base)), word()};
            }
            case mf::AuthoritySource::ror: {
                static const std::string alpha = "0123456789abcdefghjkmnpqrstvwxyz";
                std::string id = "0";
                for (int i = 0; i < 6; ++i) id.push_back(alpha[static_cast<std::size_t>(pick(0, 31))]);
                id += std::to_string(pick(10, 99));
                return {s, "https://ror.org/" + id, word()};
            }
            case mf::AuthoritySource::comptox:
                return {s, "https://comptox.epa.gov/dashboard/chemical/details/DTXSID" + std::to_string(pick(1000000, 9999999)),
                        word()};
        }
        return {};
    }
};

/// Multi-valued node bases present in `inst`, deepest last.
inline std::vector<std::pair<const mf::TemplateNode*, std::string>> repeat_points(const mf::Template& t,
                                                                                 const mf::MetadataInstance& inst) {
    std::vector<std::pair<const mf::TemplateNode*, std::string>> out;
    mf::walk_instance(
        t, inst,
        [&](const mf::TemplateNode& n, const std::string& base, std::size_t, bool) { out.emplace_back(&n, base); },
        [](const mf::TemplateNode&, const std::string&, bool) {});
    return out;
}

/// Writable field slots in `inst`.
inline std::vector<std::pair<const mf::TemplateNode*, std::string>> field_slots(const mf::Template& t,
                                                                               const mf::MetadataInstance& inst) {
    std::vector<std::pair<const mf::TemplateNode*, std::string>> out;
    mf::walk_instance(
        t, inst, [](const mf::TemplateNode&, const std::string&, std::size_t, bool) {},
        [&](const mf::TemplateNode& n, const std::string& slot, bool) {
            if (n.is_field() && !mf::is_render_only(n)) out.emplace_back(&n, slot);
        });
    return out;
}

/// A random instance built only through engine operations: random extra
/// repetitions (within max), then each slot filled or cleared at random.
inline mf::MetadataInstance random_instance(const mf::Template& t, ValueGen& gen, double fill = 0.7) {
    auto inst = mf::new_instance(t);
    for (int round = 0; round < 3; ++round) {
        for (const auto& [node, base] : repeat_points(t, inst)) {
            if (!gen.coin(0.4)) continue;
            try {
                inst = mf::add_repetition(t, inst, base);
            } catch (const mf::Error&) {
            }
        }
    }
    for (const auto& [node, slot] : field_slots(t, inst)) {
        if (gen.coin(fill)) inst = mf::set_values(t, inst, slot, gen.values_for(*node));
        else inst = mf::set_values(t, inst, slot, {});
    }
    return inst;
}

}  // namespace testsupport
