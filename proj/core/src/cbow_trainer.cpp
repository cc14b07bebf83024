#include "lexqa/embedding.hpp"

#include "lexqa/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace lexqa {

namespace {

// Maps raw engine output to [0, 1) without relying on the standard distributions,
// whose algorithms differ between library implementations.
double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// -log(sigmoid(x)), stable for large |x|
double neg_log_sigmoid(double x) { return x >= 0.0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x)); }

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void check_example(const EmbeddingModel& model, const CbowExample& ex) {
    if (!model.has_output_layer()) throw Error(ErrorCode::InvalidArgument, "model has no output layer");
    if (ex.context.empty()) throw Error(ErrorCode::InvalidArgument, "CBOW example needs context words");
    const auto n = model.vocab_size();
    auto bad = [n](std::size_t r) { return r >= n; };
    if (bad(ex.target) || std::any_of(ex.context.begin(), ex.context.end(), bad) ||
        std::any_of(ex.negatives.begin(), ex.negatives.end(), bad))
        throw Error(ErrorCode::OrdinalOutOfRange, "CBOW example row outside vocabulary");
}

std::vector<double> context_mean(const EmbeddingModel& model, const std::vector<std::size_t>& context) {
    std::vector<double> h(model.dim(), 0.0);
    for (auto c : context) {
        const auto v = model.vector(c);
        for (std::size_t i = 0; i < h.size(); ++i) h[i] += v[i];
    }
    const double inv = 1.0 / static_cast<double>(context.size());
    for (auto& x : h) x *= inv;
    return h;
}

struct Scratch {
    std::vector<double> h;
    std::vector<double> grad_h;
    std::vector<double> coeff;
};

// Shared by training and cbow_sgd_step. All coefficients are computed from the
// parameters as they were before the step.
double apply_step(EmbeddingModel& model, const CbowExample& ex, double lr, Scratch& s) {
    const auto dim = model.dim();
    s.h.assign(dim, 0.0);
    for (auto c : ex.context) {
        const auto v = model.vector(c);
        for (std::size_t i = 0; i < dim; ++i) s.h[i] += v[i];
    }
    const double inv_c = 1.0 / static_cast<double>(ex.context.size());
    for (auto& x : s.h) x *= inv_c;

    const std::size_t m = 1 + ex.negatives.size();
    s.coeff.resize(m);
    double loss = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const auto row = j == 0 ? ex.target : ex.negatives[j - 1];
        const double score = dot(model.output(row), s.h);
        if (j == 0) {
            loss += neg_log_sigmoid(score);
            s.coeff[j] = sigmoid(score) - 1.0;
        } else {
            loss += neg_log_sigmoid(-score);
            s.coeff[j] = sigmoid(score);
        }
    }

    s.grad_h.assign(dim, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        const auto u = model.output(j == 0 ? ex.target : ex.negatives[j - 1]);
        for (std::size_t i = 0; i < dim; ++i) s.grad_h[i] += s.coeff[j] * u[i];
    }
    for (std::size_t j = 0; j < m; ++j) {
        auto u = model.mutable_output(j == 0 ? ex.target : ex.negatives[j - 1]);
        const double step = lr * s.coeff[j];
        for (std::size_t i = 0; i < dim; ++i) u[i] -= step * s.h[i];
    }
    const double scale = lr * inv_c;
    for (auto c : ex.context) {
        auto v = model.mutable_input(c);
        for (std::size_t i = 0; i < dim; ++i) v[i] -= scale * s.grad_h[i];
    }
    return loss;
}

struct VocabEntry {
    std::string token;
    std::size_t count;
};

std::vector<VocabEntry> count_tokens(const std::vector<TokenStream>& texts) {
    std::map<std::string, std::size_t> counts;
    for (const auto& t : texts)
        for (const auto& tok : t.tokens) ++counts[tok];
    std::vector<VocabEntry> out;
    out.reserve(counts.size());
    for (auto& [tok, n] : counts) out.push_back({tok, n});
    std::stable_sort(out.begin(), out.end(),
                     [](const VocabEntry& a, const VocabEntry& b) { return a.count > b.count; });
    return out;
}

void check_config(const CbowConfig& config) {
    if (config.dim == 0 || config.window == 0 || config.epochs == 0 || config.min_count == 0 ||
        !(config.learning_rate > 0.0) || !std::isfinite(config.learning_rate))
        throw Error(ErrorCode::InvalidArgument, "CBOW config fields must be positive");
}

}  // namespace

double cbow_loss(const EmbeddingModel& model, const CbowExample& ex) {
    check_example(model, ex);
    const auto h = context_mean(model, ex.context);
    double loss = neg_log_sigmoid(dot(model.output(ex.target), h));
    for (auto k : ex.negatives) loss += neg_log_sigmoid(-dot(model.output(k), h));
    return loss;
}

CbowGradient cbow_gradient(const EmbeddingModel& model, const CbowExample& ex) {
    check_example(model, ex);
    const auto dim = model.dim();
    const auto h = context_mean(model, ex.context);
    CbowGradient g;
    std::vector<double> grad_h(dim, 0.0);

    auto accumulate = [&](std::size_t row, double score, double label) {
        const double coeff = sigmoid(score) - label;
        auto& out = g.output.try_emplace(row, dim, 0.0).first->second;
        const auto u = model.output(row);
        for (std::size_t i = 0; i < dim; ++i) {
            out[i] += coeff * h[i];
            grad_h[i] += coeff * u[i];
        }
    };
    const double st = dot(model.output(ex.target), h);
    g.loss = neg_log_sigmoid(st);
    accumulate(ex.target, st, 1.0);
    for (auto k : ex.negatives) {
        const double sk = dot(model.output(k), h);
        g.loss += neg_log_sigmoid(-sk);
        accumulate(k, sk, 0.0);
    }
    const double inv_c = 1.0 / static_cast<double>(ex.context.size());
    for (auto c : ex.context) {
        auto& in = g.input.try_emplace(c, dim, 0.0).first->second;
        for (std::size_t i = 0; i < dim; ++i) in[i] += grad_h[i] * inv_c;
    }
    return g;
}

double cbow_sgd_step(EmbeddingModel& model, const CbowExample& example, double learning_rate) {
    check_example(model, example);
    Scratch s;
    return apply_step(model, example, learning_rate, s);
}

TrainingReport continue_cbow(EmbeddingModel& model, const std::vector<TokenStream>& texts,
                             const CbowConfig& config) {
    check_config(config);
    if (model.dim() == 0) model = EmbeddingModel(config.dim, {}, {});
    const auto dim = model.dim();
    model.window = config.window;
    model.seed = config.seed;

    std::mt19937_64 rng(config.seed);
    TrainingReport report;

    auto entries = count_tokens(texts);
    std::erase_if(entries, [&](const VocabEntry& e) { return e.count < config.min_count; });
    if (entries.empty()) throw Error(ErrorCode::EmptyVocabulary, "no token reaches min_count");

    std::vector<double> row(dim);
    std::vector<double> noise_weight;
    for (const auto& e : entries) {
        if (!model.find(e.token)) {
            for (auto& x : row) x = (unit_uniform(rng) - 0.5) / static_cast<double>(dim);
            model.add_word(e.token, row);
            ++report.new_words;
        }
    }
    model.ensure_output_layer();
    // Cumulative unigram^0.75 table over the stage corpus; words absent from it are never drawn.
    noise_weight.assign(model.vocab_size(), 0.0);
    for (const auto& e : entries) noise_weight[*model.find(e.token)] = std::pow(static_cast<double>(e.count), 0.75);
    std::vector<double> cumulative(noise_weight.size());
    double running = 0.0;
    for (std::size_t i = 0; i < noise_weight.size(); ++i) cumulative[i] = running += noise_weight[i];
    const double noise_total = running;
    auto draw_noise = [&]() {
        const double r = unit_uniform(rng) * noise_total;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), r);
        if (it == cumulative.end()) --it;
        return static_cast<std::size_t>(it - cumulative.begin());
    };

    std::vector<std::vector<std::size_t>> sentences;
    std::size_t tokens_per_epoch = 0;
    for (const auto& t : texts) {
        std::vector<std::size_t> ids;
        for (const auto& tok : t.tokens) {
            if (auto r = model.find(tok); r && noise_weight[*r] > 0.0) ids.push_back(*r);
        }
        if (ids.size() < 2) continue;
        tokens_per_epoch += ids.size();
        sentences.push_back(std::move(ids));
    }

    const double total = static_cast<double>(tokens_per_epoch) * static_cast<double>(config.epochs);
    double processed = 0.0;
    Scratch scratch;
    CbowExample ex;
    report.epoch_loss.reserve(config.epochs);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        double loss_sum = 0.0;
        std::size_t examples = 0;
        for (const auto& sent : sentences) {
            for (std::size_t pos = 0; pos < sent.size(); ++pos, processed += 1.0) {
                const auto reduce = static_cast<std::size_t>(rng() % config.window);
                const auto w = config.window - reduce;
                const auto lo = pos >= w ? pos - w : 0;
                const auto hi = std::min(sent.size() - 1, pos + w);
                ex.context.clear();
                for (auto c = lo; c <= hi; ++c)
                    if (c != pos) ex.context.push_back(sent[c]);
                ex.target = sent[pos];
                ex.negatives.clear();
                for (std::size_t k = 0; k < config.negative; ++k) {
                    const auto n = draw_noise();
                    if (n != ex.target) ex.negatives.push_back(n);
                }
                const double lr = config.learning_rate * std::max(1.0 - processed / total, 1e-4);
                loss_sum += apply_step(model, ex, lr, scratch);
                ++examples;
            }
        }
        if (!std::isfinite(loss_sum))
            throw Error(ErrorCode::Internal, "CBOW loss diverged in epoch " + std::to_string(epoch));
        report.examples_per_epoch = examples;
        report.epoch_loss.push_back(examples ? loss_sum / static_cast<double>(examples) : 0.0);
    }
    return report;
}

CbowResult train_cbow(const std::vector<TokenStream>& texts, const CbowConfig& config) {
    check_config(config);
    CbowResult result{EmbeddingModel(config.dim, {}, {}), {}};
    result.report = continue_cbow(result.model, texts, config);
    return result;
}

}  // namespace lexqa
