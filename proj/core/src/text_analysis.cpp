#include "lexqa/text_analysis.hpp"

#include "lexqa/error.hpp"

#include <cmath>
#include <set>

namespace lexqa {

namespace {

struct CodePoint {
    char32_t value = 0;
    std::size_t length = 1;  // bytes consumed
    bool valid = false;
};

CodePoint decode_utf8(std::string_view s, std::size_t pos) {
    const auto b0 = static_cast<unsigned char>(s[pos]);
    if (b0 < 0x80) return {b0, 1, true};
    std::size_t len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        return {0, 1, false};
    }
    if (pos + len > s.size()) return {0, 1, false};
    for (std::size_t i = 1; i < len; ++i) {
        const auto b = static_cast<unsigned char>(s[pos + i]);
        if ((b & 0xC0) != 0x80) return {0, 1, false};
        cp = (cp << 6) | (b & 0x3F);
    }
    return {cp, len, true};
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

enum class CharClass { Word, Apostrophe, Hyphen, Separator };

CharClass classify(const CodePoint& c) {
    if (!c.valid) return CharClass::Separator;
    const char32_t cp = c.value;
    if (cp < 0x80) {
        if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9'))
            return CharClass::Word;
        if (cp == '\'') return CharClass::Apostrophe;
        if (cp == '-') return CharClass::Hyphen;
        return CharClass::Separator;
    }
    if (cp == 0x2019) return CharClass::Apostrophe;
    if (cp == 0x2010 || cp == 0x2011) return CharClass::Hyphen;
    // Latin-1 punctuation and symbols, general punctuation, arrows/math/box drawing,
    // CJK punctuation, fullwidth ASCII punctuation
    if ((cp >= 0x80 && cp <= 0xBF) || cp == 0xD7 || cp == 0xF7) return CharClass::Separator;
    if (cp >= 0x2000 && cp <= 0x2BFF) return CharClass::Separator;
    if (cp >= 0x3000 && cp <= 0x303F) return CharClass::Separator;
    if (cp >= 0xFE30 && cp <= 0xFE4F) return CharClass::Separator;
    if ((cp >= 0xFF01 && cp <= 0xFF0F) || (cp >= 0xFF1A && cp <= 0xFF20) ||
        (cp >= 0xFF3B && cp <= 0xFF40) || (cp >= 0xFF5B && cp <= 0xFF65))
        return CharClass::Separator;
    return CharClass::Word;
}

char32_t to_lower(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 32;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
    // Latin Extended-A upper/lower pairs
    if (cp == 0x130) return 'i';
    if (cp == 0x178) return 0xFF;
    const bool even_upper = (cp >= 0x100 && cp <= 0x137) || (cp >= 0x14A && cp <= 0x177);
    const bool odd_upper = (cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E);
    if ((even_upper && cp % 2 == 0) || (odd_upper && cp % 2 == 1)) return cp + 1;
    return cp;
}

}  // namespace

std::string_view to_string(StemmerKind kind) noexcept {
    return kind == StemmerKind::Snowball ? "snowball" : "none";
}

StemmerKind stemmer_from_string(std::string_view name) {
    if (name == "none") return StemmerKind::None;
    if (name == "snowball" || name == "porter2") return StemmerKind::Snowball;
    throw Error(ErrorCode::InvalidArgument, "unknown stemmer '" + std::string(name) + "'");
}

TokenStream tokenize(std::string_view text, const AnalyzerConfig& config) {
    struct Unit {
        CodePoint cp;
        CharClass cls;
        std::size_t offset;
    };
    std::vector<Unit> units;
    units.reserve(text.size());
    for (std::size_t pos = 0; pos < text.size();) {
        const auto cp = decode_utf8(text, pos);
        units.push_back({cp, classify(cp), pos});
        pos += cp.length;
    }

    // Apostrophes always join, hyphens join unless split_hyphens, and both only
    // between two word characters.
    auto joins = [&](std::size_t i) {
        if (i == 0 || i + 1 >= units.size()) return false;
        const auto cls = units[i].cls;
        const bool joiner = cls == CharClass::Apostrophe || (cls == CharClass::Hyphen && !config.split_hyphens);
        return joiner && units[i - 1].cls == CharClass::Word && units[i + 1].cls == CharClass::Word;
    };

    TokenStream out;
    std::size_t i = 0;
    while (i < units.size()) {
        if (units[i].cls != CharClass::Word) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        while (i < units.size() && (units[i].cls == CharClass::Word || joins(i))) ++i;
        const std::size_t end_byte = i < units.size() ? units[i].offset : text.size();
        std::string surface(text.substr(units[start].offset, end_byte - units[start].offset));

        std::string token;
        token.reserve(surface.size());
        for (std::size_t k = start; k < i; ++k) {
            char32_t cp = units[k].cp.value;
            if (units[k].cls == CharClass::Apostrophe) cp = '\'';
            else if (units[k].cls == CharClass::Hyphen) cp = '-';
            else if (config.lowercase) cp = to_lower(cp);
            append_utf8(token, cp);
        }
        if (config.stemmer == StemmerKind::Snowball) token = stem(token);
        out.tokens.push_back(std::move(token));
        out.surface_forms.push_back(std::move(surface));
    }
    return out;
}

double smoothed_idf(std::size_t doc_count, std::size_t df) noexcept {
    const double n = static_cast<double>(doc_count);
    const double d = static_cast<double>(df);
    return std::log(1.0 + (n - d + 0.5) / (d + 0.5));
}

IdfTable::IdfTable(std::size_t doc_count, std::map<std::string, std::size_t> df)
    : doc_count_(doc_count), df_(std::move(df)) {
    for (const auto& [token, count] : df_) {
        if (count == 0 || count > doc_count_)
            throw Error(ErrorCode::InvalidArgument,
                        "document frequency of '" + token + "' outside [1, doc_count]");
    }
}

std::size_t IdfTable::df(const std::string& token) const {
    auto it = df_.find(token);
    return it == df_.end() ? 0 : it->second;
}

double IdfTable::idf(const std::string& token) const { return smoothed_idf(doc_count_, df(token)); }

void IdfTable::add_document(const TokenStream& doc) {
    ++doc_count_;
    std::set<std::string_view> seen(doc.tokens.begin(), doc.tokens.end());
    for (auto t : seen) ++df_[std::string(t)];
}

IdfTable build_idf(const Corpus& corpus, const AnalyzerConfig& config) {
    if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "cannot build idf over an empty corpus");
    IdfTable table;
    for (const auto& a : corpus.articles()) table.add_document(tokenize(article_text(a), config));
    return table;
}

}  // namespace lexqa
