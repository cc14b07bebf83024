#include "lexqa/lexical_index.hpp"

#include "lexqa/binary_io.hpp"
#include "lexqa/error.hpp"
#include "lexqa/run_config.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <numeric>
#include <unordered_map>

namespace lexqa {

namespace {

constexpr int kIndexFormatVersion = 1;

double mean_length(const std::vector<std::uint32_t>& lens) {
    const double total = std::accumulate(lens.begin(), lens.end(), 0.0);
    return total / static_cast<double>(lens.size());
}

}  // namespace

InvertedIndex InvertedIndex::build(const Corpus& corpus, const AnalyzerConfig& analyzer,
                                   const Bm25Params& params) {
    if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "cannot index an empty corpus");
    if (params.k1 < 0.0 || params.b < 0.0 || params.b > 1.0)
        throw Error(ErrorCode::InvalidArgument, "bm25 requires k1 >= 0 and b in [0, 1]");

    InvertedIndex index;
    index.analyzer_ = analyzer;
    index.params_ = params;
    index.doc_len_.reserve(corpus.size());
    index.article_ids_.reserve(corpus.size());

    for (const auto& article : corpus.articles()) {
        const auto stream = tokenize(article_text(article), analyzer);
        std::map<std::string, std::uint32_t> counts;
        for (const auto& t : stream.tokens) ++counts[t];
        const auto ordinal = static_cast<std::uint32_t>(article.ordinal);
        for (auto& [token, tf] : counts) index.postings_[token].push_back({ordinal, tf});
        index.doc_len_.push_back(static_cast<std::uint32_t>(stream.tokens.size()));
        index.article_ids_.push_back(article.id);
    }
    index.avg_doc_len_ = mean_length(index.doc_len_);
    if (index.avg_doc_len_ <= 0.0)
        throw Error(ErrorCode::EmptyCorpus, "corpus contains no tokens");

    std::map<std::string, std::size_t> df;
    for (const auto& [token, list] : index.postings_) df.emplace(token, list.size());
    index.idf_ = IdfTable(corpus.size(), std::move(df));
    return index;
}

std::uint32_t InvertedIndex::doc_len(std::size_t ordinal) const {
    if (ordinal >= doc_len_.size())
        throw Error(ErrorCode::OrdinalOutOfRange,
                    std::to_string(ordinal) + " >= " + std::to_string(doc_len_.size()));
    return doc_len_[ordinal];
}

std::span<const Posting> InvertedIndex::postings(const std::string& token) const {
    auto it = postings_.find(token);
    if (it == postings_.end()) return {};
    return it->second;
}

std::uint32_t InvertedIndex::term_frequency(const std::string& token, std::size_t ordinal) const {
    const auto list = postings(token);
    auto it = std::lower_bound(list.begin(), list.end(), ordinal,
                               [](const Posting& p, std::size_t o) { return p.ordinal < o; });
    return (it != list.end() && it->ordinal == ordinal) ? it->tf : 0;
}

double InvertedIndex::term_weight(double idf, std::uint32_t tf, std::uint32_t doc_len) const noexcept {
    const double f = static_cast<double>(tf);
    const double norm = 1.0 - params_.b + params_.b * static_cast<double>(doc_len) / avg_doc_len_;
    return idf * f * (params_.k1 + 1.0) / (f + params_.k1 * norm);
}

double InvertedIndex::score(const TokenStream& query, std::size_t ordinal) const {
    const auto len = doc_len(ordinal);
    double total = 0.0;
    for (const auto& t : query.tokens) {
        const auto tf = term_frequency(t, ordinal);
        if (tf == 0) continue;
        total += term_weight(idf_.idf(t), tf, len);
    }
    return total;
}

std::vector<ScoredHit> InvertedIndex::search(const TokenStream& query, std::size_t k) const {
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
    std::vector<double> acc(doc_count(), 0.0);
    std::vector<char> touched(doc_count(), 0);
    for (const auto& t : query.tokens) {
        const auto list = postings(t);
        if (list.empty()) continue;
        const double idf = idf_.idf(t);
        for (const auto& p : list) {
            acc[p.ordinal] += term_weight(idf, p.tf, doc_len_[p.ordinal]);
            touched[p.ordinal] = 1;
        }
    }
    std::vector<ScoredHit> hits;
    for (std::size_t o = 0; o < acc.size(); ++o) {
        if (touched[o]) hits.push_back({o, article_ids_[o], acc[o], ScoreSource::Lexical});
    }
    const auto keep = std::min(k, hits.size());
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(keep), hits.end(),
                      ranks_before);
    hits.resize(keep);
    return hits;
}

void InvertedIndex::save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    nlohmann::ordered_json manifest;
    manifest["format"] = "lexqa-index";
    manifest["version"] = kIndexFormatVersion;
    manifest["analyzer"] = analyzer_to_json(analyzer_);
    manifest["bm25"] = {{"k1", params_.k1}, {"b", params_.b}};
    manifest["doc_count"] = doc_count();
    manifest["avg_doc_len"] = avg_doc_len_;
    manifest["article_ids"] = article_ids_;
    manifest["doc_len"] = doc_len_;

    auto terms = nlohmann::ordered_json::array();
    std::ofstream bin(dir / "postings.bin.tmp", std::ios::binary | std::ios::trunc);
    if (!bin) throw Error(ErrorCode::Io, "cannot write " + (dir / "postings.bin").string());
    std::uint64_t offset = 0;
    for (const auto& [token, list] : postings_) {
        terms.push_back({token, list.size(), offset});
        for (const auto& p : list) {
            io::write_u32_le(bin, p.ordinal);
            io::write_u32_le(bin, p.tf);
        }
        offset += list.size();
    }
    bin.close();
    std::filesystem::rename(dir / "postings.bin.tmp", dir / "postings.bin");
    manifest["postings_file"] = "postings.bin";
    manifest["postings_pairs"] = offset;
    manifest["terms"] = std::move(terms);
    io::write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
}

InvertedIndex InvertedIndex::load(const std::filesystem::path& dir) {
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(io::read_text_file(dir / "manifest.json"));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, "index manifest: " + std::string(e.what()));
    }
    InvertedIndex index;
    try {
        if (manifest.at("format") != "lexqa-index" || manifest.at("version") != kIndexFormatVersion)
            throw Error(ErrorCode::ParseError, "unsupported index manifest format");
        index.analyzer_ = analyzer_from_json(manifest.at("analyzer"));
        index.params_.k1 = manifest.at("bm25").at("k1").get<double>();
        index.params_.b = manifest.at("bm25").at("b").get<double>();
        index.article_ids_ = manifest.at("article_ids").get<std::vector<std::string>>();
        index.doc_len_ = manifest.at("doc_len").get<std::vector<std::uint32_t>>();
        if (index.doc_len_.size() != index.article_ids_.size() ||
            index.doc_len_.size() != manifest.at("doc_count").get<std::size_t>())
            throw Error(ErrorCode::ParseError, "index manifest doc counts disagree");

        std::ifstream bin(dir / manifest.at("postings_file").get<std::string>(), std::ios::binary);
        if (!bin) throw Error(ErrorCode::Io, "cannot open postings file in " + dir.string());
        std::map<std::string, std::size_t> df;
        for (const auto& entry : manifest.at("terms")) {
            const auto token = entry.at(0).get<std::string>();
            const auto count = entry.at(1).get<std::size_t>();
            std::vector<Posting> list(count);
            for (auto& p : list) {
                p.ordinal = io::read_u32_le(bin);
                p.tf = io::read_u32_le(bin);
                if (p.ordinal >= index.doc_len_.size())
                    throw Error(ErrorCode::ParseError, "posting ordinal out of range for " + token);
            }
            df.emplace(token, count);
            index.postings_.emplace(token, std::move(list));
        }
        if (bin.peek() != std::char_traits<char>::eof())
            throw Error(ErrorCode::ParseError, "postings file longer than the manifest declares");
        index.idf_ = IdfTable(index.doc_len_.size(), std::move(df));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, "index manifest: " + std::string(e.what()));
    }
    if (index.doc_len_.empty()) throw Error(ErrorCode::EmptyCorpus, "index has no documents");
    index.avg_doc_len_ = mean_length(index.doc_len_);
    return index;
}

}  // namespace lexqa
