#include "lexqa/embedding.hpp"

#include "lexqa/binary_io.hpp"
#include "lexqa/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace lexqa {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

bool normalize(std::vector<double>& v) {
    const double norm = std::sqrt(dot(v, v));
    if (!(norm > 0.0) || !std::isfinite(norm)) return false;
    for (auto& x : v) x /= norm;
    return true;
}

}  // namespace

std::optional<std::vector<double>> idf_centroid(const TokenStream& tokens, const EmbeddingModel& model,
                                                const IdfTable& idf) {
    std::vector<double> c(model.dim(), 0.0);
    double weight_sum = 0.0;
    for (const auto& t : tokens.tokens) {
        const auto row = model.find(t);
        if (!row) continue;
        const double w = idf.idf(t);
        const auto v = model.vector(*row);
        for (std::size_t i = 0; i < c.size(); ++i) c[i] += w * v[i];
        weight_sum += w;
    }
    if (!(weight_sum > 0.0)) return std::nullopt;
    for (auto& x : c) x /= weight_sum;
    if (!normalize(c)) return std::nullopt;
    return c;
}

double centroid_distance_squared(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

CentroidStore CentroidStore::build(const Corpus& corpus, const AnalyzerConfig& analyzer,
                                   const EmbeddingModel& model, const IdfTable& idf) {
    CentroidStore store;
    store.dim_ = model.dim();
    store.data_.assign(corpus.size() * store.dim_, 0.0);
    store.oov_.assign(corpus.size(), 1);
    for (const auto& a : corpus.articles()) {
        store.article_ids_.push_back(a.id);
        const auto c = idf_centroid(tokenize(article_text(a), analyzer), model, idf);
        if (!c) continue;
        std::copy(c->begin(), c->end(), store.data_.begin() + static_cast<std::ptrdiff_t>(a.ordinal * store.dim_));
        store.oov_[a.ordinal] = 0;
    }
    return store;
}

void CentroidStore::save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    const auto tmp = dir / "centroids.f32.tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
        for (double v : data_) io::write_f32_le(out, static_cast<float>(v));
        if (!out) throw Error(ErrorCode::Io, "write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, dir / "centroids.f32");
    nlohmann::ordered_json manifest{{"dim", dim_}, {"count", size()}};
    io::write_text_file(dir / "centroids.json", manifest.dump(2) + "\n");
}

CentroidStore CentroidStore::load(const std::filesystem::path& dir, std::vector<std::string> article_ids) {
    CentroidStore store;
    try {
        const auto manifest = nlohmann::json::parse(io::read_text_file(dir / "centroids.json"));
        store.dim_ = manifest.at("dim").get<std::size_t>();
        if (manifest.at("count").get<std::size_t>() != article_ids.size())
            throw Error(ErrorCode::HeaderMismatch, "centroid count does not match the corpus size");
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::ParseError, "centroid manifest: " + std::string(e.what()));
    }
    if (store.dim_ == 0) throw Error(ErrorCode::ParseError, "centroid manifest has dim 0");
    store.article_ids_ = std::move(article_ids);
    const auto path = dir / "centroids.f32";
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    store.oov_.assign(store.size(), 1);
    std::vector<double> row(store.dim_);
    for (std::size_t r = 0; r < store.size(); ++r) {
        for (auto& x : row) x = io::read_f32_le(in);
        // f32 storage loses the exact unit norm; restore it
        if (normalize(row)) store.oov_[r] = 0;
        else std::fill(row.begin(), row.end(), 0.0);
        store.data_.insert(store.data_.end(), row.begin(), row.end());
    }
    if (in.peek() != std::char_traits<char>::eof())
        throw Error(ErrorCode::HeaderMismatch, "centroid matrix larger than count x dim");
    return store;
}

bool CentroidStore::all_oov(std::size_t ordinal) const {
    if (ordinal >= size())
        throw Error(ErrorCode::OrdinalOutOfRange, std::to_string(ordinal) + " >= " + std::to_string(size()));
    return oov_[ordinal] != 0;
}

std::span<const double> CentroidStore::centroid(std::size_t ordinal) const {
    if (ordinal >= size())
        throw Error(ErrorCode::OrdinalOutOfRange, std::to_string(ordinal) + " >= " + std::to_string(size()));
    return {data_.data() + ordinal * dim_, dim_};
}

double centroid_similarity(const TokenStream& query, std::size_t ordinal, const CentroidStore& store,
                           const EmbeddingModel& model, const IdfTable& idf) {
    if (store.all_oov(ordinal)) return 0.0;
    const auto q = idf_centroid(query, model, idf);
    if (!q) return 0.0;
    return dot(*q, store.centroid(ordinal));
}

std::vector<ScoredHit> search_embedding(const TokenStream& query, const CentroidStore& store,
                                        const EmbeddingModel& model, const IdfTable& idf, std::size_t k) {
    if (k == 0) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
    if (store.dim() != model.dim())
        throw Error(ErrorCode::HeaderMismatch, "centroid store and model dimensions differ");
    const auto q = idf_centroid(query, model, idf);

    struct Entry {
        bool defined;
        ScoredHit hit;
    };
    std::vector<Entry> entries;
    entries.reserve(store.size());
    for (std::size_t o = 0; o < store.size(); ++o) {
        const bool defined = q && !store.all_oov(o);
        const double sim = defined ? dot(*q, store.centroid(o)) : 0.0;
        entries.push_back({defined, {o, store.article_ids()[o], sim, ScoreSource::Embedding}});
    }
    const auto keep = std::min(k, entries.size());
    std::partial_sort(entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(keep), entries.end(),
                      [](const Entry& a, const Entry& b) {
                          if (a.defined != b.defined) return a.defined;
                          return ranks_before(a.hit, b.hit);
                      });
    std::vector<ScoredHit> hits;
    hits.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) hits.push_back(std::move(entries[i].hit));
    return hits;
}

}  // namespace lexqa
