#pragma once

#include <optional>
#include <regex>
#include <string>
#include <string_view>

#include "metaforge/error.hpp"
#include "metaforge/text.hpp"

// Persistent identifiers issued by the supported external authorities:
// syntax, canonical IRI form, and the ORCID check character.

namespace metaforge {

enum class AuthoritySource { orcid, ror, comptox };

inline std::string_view to_string(AuthoritySource s) {
    switch (s) {
        case AuthoritySource::orcid: return "orcid";
        case AuthoritySource::ror: return "ror";
        case AuthoritySource::comptox: return "comptox";
    }
    return "orcid";
}

inline std::optional<AuthoritySource> parse_authority_source(std::string_view s) {
    if (s == "orcid") return AuthoritySource::orcid;
    if (s == "ror") return AuthoritySource::ror;
    if (s == "comptox") return AuthoritySource::comptox;
    return std::nullopt;
}

namespace identifiers {

inline constexpr std::string_view kOrcidPrefix = "https://orcid.org/";
inline constexpr std::string_view kRorPrefix = "https://ror.org/";
inline constexpr std::string_view kComptoxPrefix = "https://comptox.epa.gov/dashboard/chemical/details/";

/// ISO 7064 MOD 11-2 check character over 15 base digits ('0'-'9' or 'X').
inline char orcid_check_character(std::string_view base_digits) {
    int total = 0;
    for (char c : base_digits) total = (total + (c - '0')) * 2;
    int result = (12 - total % 11) % 11;
    return result == 10 ? 'X' : static_cast<char>('0' + result);
}

/// True iff the 16th character is the MOD 11-2 check character of the first
/// 15. Hyphens are ignored. Throws MALFORMED_ID unless the remaining input is
/// `\d{15}[\dX]`.
inline bool validate_orcid_checksum(std::string_view input) {
    std::string digits;
    for (char c : input)
        if (c != '-') digits.push_back(c);
    static const std::regex shape(R"(\d{15}[\dX])");
    if (!std::regex_match(digits, shape))
        throw Error("MALFORMED_ID", "ORCID base must be 15 digits plus a check character: " + std::string(input));
    return orcid_check_character(std::string_view(digits).substr(0, 15)) == digits[15];
}

namespace detail {

inline std::string_view strip_prefixes(std::string_view s, std::initializer_list<std::string_view> prefixes) {
    for (auto p : prefixes)
        if (text::starts_with(s, p)) return s.substr(p.size());
    return s;
}

}  // namespace detail

/// Bare, hyphenated or IRI ORCID → `https://orcid.org/XXXX-XXXX-XXXX-XXXX`.
/// Throws INVALID_IDENTIFIER on bad syntax or a failed checksum.
inline std::string canonical_orcid(std::string_view input) {
    auto s = text::trim(input);
    auto bare = std::string(detail::strip_prefixes(
        s, {"https://orcid.org/", "http://orcid.org/", "https://www.orcid.org/", "orcid.org/"}));
    std::string digits;
    for (char c : bare) {
        if (c == '-') continue;
        digits.push_back(c == 'x' ? 'X' : c);
    }
    static const std::regex shape(R"(\d{15}[\dX])");
    static const std::regex grouped(R"(\d{4}-?\d{4}-?\d{4}-?\d{3}[\dXx])");
    if (!std::regex_match(bare, grouped) || !std::regex_match(digits, shape))
        throw Error("INVALID_IDENTIFIER", "not an ORCID identifier: " + s);
    if (!validate_orcid_checksum(digits))
        throw Error("INVALID_IDENTIFIER", "ORCID checksum mismatch: " + s);
    return std::string(kOrcidPrefix) + digits.substr(0, 4) + "-" + digits.substr(4, 4) + "-" +
           digits.substr(8, 4) + "-" + digits.substr(12, 4);
}

/// Bare or IRI ROR id → `https://ror.org/0xxxxxxNN`. Throws INVALID_IDENTIFIER.
inline std::string canonical_ror(std::string_view input) {
    auto s = text::lower(text::trim(input));
    auto bare = std::string(detail::strip_prefixes(s, {"https://ror.org/", "http://ror.org/", "ror.org/"}));
    static const std::regex shape(R"(0[a-hj-km-np-tv-z0-9]{6}\d{2})");
    if (!std::regex_match(bare, shape)) throw Error("INVALID_IDENTIFIER", "not a ROR identifier: " + s);
    return std::string(kRorPrefix) + bare;
}

/// Bare DTXSID or dashboard IRI → dashboard IRI. Throws INVALID_IDENTIFIER.
inline std::string canonical_comptox(std::string_view input) {
    auto s = text::trim(input);
    auto bare = std::string(detail::strip_prefixes(
        s, {kComptoxPrefix, "http://comptox.epa.gov/dashboard/chemical/details/"}));
    static const std::regex shape(R"(DTXSID\d+)");
    if (!std::regex_match(bare, shape)) throw Error("INVALID_IDENTIFIER", "not a CompTox DTXSID: " + s);
    return std::string(kComptoxPrefix) + bare;
}

inline std::string canonicalize(AuthoritySource source, std::string_view input) {
    switch (source) {
        case AuthoritySource::orcid: return canonical_orcid(input);
        case AuthoritySource::ror: return canonical_ror(input);
        case AuthoritySource::comptox: return canonical_comptox(input);
    }
    throw Error("UNKNOWN_SOURCE", "unknown authority source");
}

/// The identifier with its canonical IRI prefix removed (`0000-0002-2256-2421`,
/// `00f54p054`, `DTXSID7020182`). Expects a canonical IRI.
inline std::string bare_identifier(AuthoritySource source, std::string_view canonical_iri) {
    std::string_view prefix = source == AuthoritySource::orcid ? kOrcidPrefix
                              : source == AuthoritySource::ror ? kRorPrefix
                                                               : kComptoxPrefix;
    return std::string(detail::strip_prefixes(canonical_iri, {prefix}));
}

/// Whether `iri` is already in the source's canonical IRI shape. For ORCID the
/// check character must also verify.
inline bool is_canonical(AuthoritySource source, std::string_view iri) {
    static const std::regex orcid(R"(https://orcid\.org/\d{4}-\d{4}-\d{4}-\d{3}[\dX])");
    static const std::regex ror(R"(https://ror\.org/0[a-hj-km-np-tv-z0-9]{6}\d{2})");
    static const std::regex comptox(R"(https://comptox\.epa\.gov/dashboard/chemical/details/DTXSID\d+)");
    std::string s(iri);
    switch (source) {
        case AuthoritySource::orcid:
            return std::regex_match(s, orcid) && validate_orcid_checksum(s.substr(kOrcidPrefix.size()));
        case AuthoritySource::ror: return std::regex_match(s, ror);
        case AuthoritySource::comptox: return std::regex_match(s, comptox);
    }
    return false;
}

}  // namespace identifiers
}  // namespace metaforge
