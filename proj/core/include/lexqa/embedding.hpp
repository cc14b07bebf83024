#pragma once

#include "lexqa/corpus.hpp"
#include "lexqa/scored_hit.hpp"
#include "lexqa/text_analysis.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace lexqa {

/// Word vectors plus the output (context-prediction) layer kept for continued training.
class EmbeddingModel {
  public:
    EmbeddingModel() = default;
    EmbeddingModel(std::size_t dim, std::vector<std::string> words, std::vector<double> input_vectors);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t vocab_size() const noexcept { return words_.size(); }
    const std::vector<std::string>& words() const noexcept { return words_; }
    std::optional<std::size_t> find(std::string_view token) const;

    std::span<const double> vector(std::size_t row) const;
    std::span<double> mutable_input(std::size_t row);
    std::span<double> mutable_output(std::size_t row);
    std::span<const double> output(std::size_t row) const;
    bool has_output_layer() const noexcept { return !output_.empty(); }

    const std::vector<double>& input_vectors() const noexcept { return input_; }
    const std::vector<double>& output_vectors() const noexcept { return output_; }

    /// Appends a word with the given input row; output row starts at zero.
    std::size_t add_word(const std::string& word, std::span<const double> input_row);
    void ensure_output_layer();

    std::size_t window = 5;
    std::uint64_t seed = 1;

    bool operator==(const EmbeddingModel& other) const {
        return dim_ == other.dim_ && words_ == other.words_ && input_ == other.input_;
    }

  private:
    std::size_t dim_ = 0;
    std::vector<std::string> words_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<double> input_;   // vocab_size x dim, row-major
    std::vector<double> output_;  // vocab_size x dim, or empty
};

/// word2vec text format: "vocab_size dim" header, then "word v1 ... v_dim" per line.
void write_vectors(const EmbeddingModel& model, std::ostream& out);
EmbeddingModel read_vectors(std::istream& in);
void save_vectors(const EmbeddingModel& model, const std::filesystem::path& path);
EmbeddingModel load_vectors(const std::filesystem::path& path);

struct CbowConfig {
    std::size_t dim = 300;
    std::size_t window = 5;
    std::size_t epochs = 700;
    double learning_rate = 0.025;
    std::size_t negative = 5;
    std::size_t min_count = 1;
    std::uint64_t seed = 1;
};

struct TrainingReport {
    std::vector<double> epoch_loss;  // mean per-example loss of each epoch
    std::size_t examples_per_epoch = 0;
    std::size_t new_words = 0;
};

struct CbowResult {
    EmbeddingModel model;
    TrainingReport report;
};

/// Trains CBOW embeddings with negative sampling. Single-threaded and bitwise
/// deterministic for a given seed.
CbowResult train_cbow(const std::vector<TokenStream>& texts, const CbowConfig& config);

/// Trains an existing model further on another corpus. New words are appended and the
/// learning-rate schedule and noise distribution restart for this stage.
TrainingReport continue_cbow(EmbeddingModel& model, const std::vector<TokenStream>& texts,
                             const CbowConfig& config);

/// One CBOW prediction: the mean of `context` input rows predicts `target` against `negatives`.
struct CbowExample {
    std::vector<std::size_t> context;
    std::size_t target = 0;
    std::vector<std::size_t> negatives;
};

struct CbowGradient {
    double loss = 0.0;
    std::map<std::size_t, std::vector<double>> input;   // d loss / d input row
    std::map<std::size_t, std::vector<double>> output;  // d loss / d output row
};

/// Negative-sampling loss: -log s(u_t . h) - sum_k log s(-u_k . h).
double cbow_loss(const EmbeddingModel& model, const CbowExample& example);
CbowGradient cbow_gradient(const EmbeddingModel& model, const CbowExample& example);
/// Plain SGD step along -cbow_gradient; returns the loss before the step.
double cbow_sgd_step(EmbeddingModel& model, const CbowExample& example, double learning_rate);

/// IDF-weighted mean of in-vocabulary token vectors, L2-normalized. nullopt when no
/// token is in the vocabulary (or the weighted mean is the zero vector).
std::optional<std::vector<double>> idf_centroid(const TokenStream& tokens, const EmbeddingModel& model,
                                                const IdfTable& idf);

/// Squared Euclidean distance between unit centroids; equals 2 - 2 * cosine.
double centroid_distance_squared(std::span<const double> a, std::span<const double> b);

/// Unit-norm IDF centroids of every article in a corpus.
class CentroidStore {
  public:
    static CentroidStore build(const Corpus& corpus, const AnalyzerConfig& analyzer,
                               const EmbeddingModel& model, const IdfTable& idf);

    /// Writes `centroids.f32` (little-endian, count x dim) and `centroids.json` {dim, count}.
    void save(const std::filesystem::path& dir) const;
    static CentroidStore load(const std::filesystem::path& dir, std::vector<std::string> article_ids);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return article_ids_.size(); }
    bool all_oov(std::size_t ordinal) const;
    std::span<const double> centroid(std::size_t ordinal) const;
    const std::vector<std::string>& article_ids() const noexcept { return article_ids_; }

  private:
    std::size_t dim_ = 0;
    std::vector<std::string> article_ids_;
    std::vector<double> data_;
    std::vector<char> oov_;
};

/// Cosine of the query and article centroids; 0 when either side is all-OOV.
double centroid_similarity(const TokenStream& query, std::size_t ordinal, const CentroidStore& store,
                           const EmbeddingModel& model, const IdfTable& idf);

/// Ranks every article by centroid similarity (desc, ordinal asc). Pairs without a
/// defined similarity (all-OOV on either side) score 0 and rank after all others.
std::vector<ScoredHit> search_embedding(const TokenStream& query, const CentroidStore& store,
                                        const EmbeddingModel& model, const IdfTable& idf, std::size_t k);

}  // namespace lexqa
