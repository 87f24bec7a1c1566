#pragma once
// String utilities shared by the store, the matcher and the surrogate
// translator: canonical term form, singularization, normalized edit
// similarity and hashed character-trigram embeddings.

#include <unicode/normalizer2.h>
#include <unicode/locid.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ontomap/error.hpp"

namespace ontomap {

inline icu::UnicodeString to_unicode(std::string_view s) {
    return icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
}

inline std::u32string to_u32(std::string_view s) {
    icu::UnicodeString u = to_unicode(s);
    std::u32string out(static_cast<size_t>(u.countChar32()), U'\0');
    UErrorCode status = U_ZERO_ERROR;
    u.toUTF32(reinterpret_cast<UChar32*>(out.data()), static_cast<int32_t>(out.size()), status);
    return out;
}

inline std::string trim(std::string_view s) {
    auto is_space = [](unsigned char c) { return c == ' ' || (c >= '\t' && c <= '\r'); };
    size_t b = 0, e = s.size();
    while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

// NFC, whitespace runs collapsed to one space, trimmed, optionally lowercased.
inline std::string normalize_term(std::string_view text, bool lowercase = true) {
    icu::UnicodeString u = to_unicode(text);
    if (lowercase) u.toLower(icu::Locale::getRoot());
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) throw Error(Errc::InvalidArgument, "NFC normalizer unavailable");
    icu::UnicodeString normalized = nfc->normalize(u, status);
    if (U_FAILURE(status)) throw Error(Errc::InvalidArgument, "normalization failed");

    icu::UnicodeString collapsed;
    bool pending_space = false;
    for (int32_t i = 0; i < normalized.length();) {
        UChar32 c = normalized.char32At(i);
        i += U16_LENGTH(c);
        if (u_isUWhiteSpace(c)) {
            pending_space = !collapsed.isEmpty();
            continue;
        }
        if (pending_space) collapsed.append(static_cast<UChar>(u' '));
        pending_space = false;
        collapsed.append(c);
    }
    std::string out;
    collapsed.toUTF8String(out);
    return out;
}

namespace detail {

inline bool ends_with(std::string_view s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

inline bool is_vowel(char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

// Words that end in "s" but are singular (or invariant) in clinical text.
inline constexpr std::array<std::string_view, 14> kInvariantWords = {
    "species", "series", "diabetes", "herpes", "rabies", "scabies", "measles",
    "mumps",   "news",   "lens",     "iris",   "pubis", "ascites", "feces",
};

inline std::string singularize_word(std::string_view word) {
    std::string w(word);
    if (w.size() <= 3) return w;
    if (std::find(kInvariantWords.begin(), kInvariantWords.end(), word) != kInvariantWords.end()) return w;

    if (ends_with(w, "ies")) return w.substr(0, w.size() - 3) + "y";
    if (ends_with(w, "sses") || ends_with(w, "uses")) return w.substr(0, w.size() - 2);
    if (ends_with(w, "xes") || ends_with(w, "zzes") || ends_with(w, "ches") || ends_with(w, "shes"))
        return w.substr(0, w.size() - 2);
    if (!ends_with(w, "s")) return w;
    if (ends_with(w, "ss") || ends_with(w, "us") || ends_with(w, "is")) return w;
    // "-as" after a vowel (pancreas, areas of Latin origin) is left alone
    if (ends_with(w, "as") && is_vowel(w[w.size() - 3])) return w;
    return w.substr(0, w.size() - 1);
}

} // namespace detail

// Per-word English plural stripping. Rule table, applied in order to each
// space-separated word of more than three bytes:
//   invariant list            -> unchanged
//   ...ies                    -> ...y
//   ...sses, ...uses          -> drop "es"
//   ...xes ...zzes ...ches ...shes -> drop "es"
//   ...ss ...us ...is         -> unchanged
//   <vowel>as                 -> unchanged
//   ...s                      -> drop "s"
// Every branch yields a word no later branch rewrites, so the map is idempotent.
inline std::string singularize(std::string_view term) {
    std::string out;
    out.reserve(term.size());
    size_t i = 0;
    while (i < term.size()) {
        size_t j = term.find(' ', i);
        if (j == std::string_view::npos) j = term.size();
        out += detail::singularize_word(term.substr(i, j - i));
        if (j < term.size()) out += ' ';
        i = j + 1;
    }
    return out;
}

template <class Seq>
size_t levenshtein(const Seq& a, const Seq& b) {
    const Seq& s = a.size() < b.size() ? b : a;
    const Seq& t = a.size() < b.size() ? a : b;
    std::vector<size_t> row(t.size() + 1);
    for (size_t j = 0; j <= t.size(); ++j) row[j] = j;
    for (size_t i = 1; i <= s.size(); ++i) {
        size_t diag = row[0];
        row[0] = i;
        for (size_t j = 1; j <= t.size(); ++j) {
            size_t up = row[j];
            size_t sub = diag + (s[i - 1] == t[j - 1] ? 0 : 1);
            row[j] = std::min({row[j - 1] + 1, up + 1, sub});
            diag = up;
        }
    }
    return row[t.size()];
}

// 1 - lev(a,b) / max(|a|,|b|) over code points; empty vs empty is 1.
inline double edit_similarity(const std::u32string& a, const std::u32string& b) {
    size_t longest = std::max(a.size(), b.size());
    if (longest == 0) return 1.0;
    return 1.0 - static_cast<double>(levenshtein(a, b)) / static_cast<double>(longest);
}

inline double edit_similarity(std::string_view a, std::string_view b) {
    return edit_similarity(to_u32(a), to_u32(b));
}

inline uint64_t fnv1a(std::string_view bytes, uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Bucket indices of the boundary-padded character trigrams of `text`.
inline std::vector<size_t> trigram_buckets(std::string_view text, size_t dim) {
    std::u32string padded = U"\u0002" + to_u32(text) + U"\u0003";
    std::vector<size_t> buckets;
    for (size_t i = 0; i + 3 <= padded.size(); ++i) {
        std::string_view raw(reinterpret_cast<const char*>(padded.data() + i), 3 * sizeof(char32_t));
        buckets.push_back(static_cast<size_t>(fnv1a(raw) % dim));
    }
    return buckets;
}

inline std::vector<double> trigram_embedding(std::string_view text, size_t dim) {
    std::vector<double> v(dim, 0.0);
    for (size_t b : trigram_buckets(text, dim)) v[b] += 1.0;
    double norm = 0.0;
    for (double x : v) norm += x * x;
    if (norm > 0.0) {
        norm = std::sqrt(norm);
        for (double& x : v) x /= norm;
    }
    return v;
}

// Cosine of two vectors; 0 when either is the zero vector.
inline double cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw Error(Errc::InvalidArgument, "cosine: dimension mismatch");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

} // namespace ontomap
