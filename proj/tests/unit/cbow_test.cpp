#include "error_matchers.hpp"
#include "fixtures.hpp"

#include "lexqa/embedding.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace lexqa;

namespace {

std::vector<TokenStream> texts_of(const Corpus& corpus) {
    std::vector<TokenStream> out;
    for (const auto& a : corpus.articles()) out.push_back(tokenize(article_text(a), {}));
    return out;
}

CbowConfig small_config() {
    CbowConfig c;
    c.dim = 12;
    c.epochs = 5;
    c.window = 3;
    c.negative = 3;
    c.seed = 42;
    return c;
}

}  // namespace

TEST(Cbow, SameSeedSameVectors) {
    const auto texts = texts_of(fixtures::civil_code());
    const auto a = train_cbow(texts, small_config());
    const auto b = train_cbow(texts, small_config());
    EXPECT_EQ(a.model.words(), b.model.words());
    EXPECT_EQ(a.model.input_vectors(), b.model.input_vectors());
    EXPECT_EQ(a.model.output_vectors(), b.model.output_vectors());
    EXPECT_EQ(a.report.epoch_loss, b.report.epoch_loss);

    auto other = small_config();
    other.seed = 43;
    EXPECT_NE(train_cbow(texts, other).model.input_vectors(), a.model.input_vectors());
}

TEST(Cbow, VocabularyOrderedByCountThenToken) {
    TokenStream t;
    t.tokens = {"b", "a", "c", "b", "a", "b", "d"};
    auto config = small_config();
    config.epochs = 1;
    const auto m = train_cbow({t}, config).model;
    EXPECT_EQ(m.words(), (std::vector<std::string>{"b", "a", "c", "d"}));
    config.min_count = 2;
    EXPECT_EQ(train_cbow({t}, config).model.words(), (std::vector<std::string>{"b", "a"}));
}

TEST(Cbow, EmptyVocabularyAndBadConfig) {
    TokenStream t;
    t.tokens = {"a", "b"};
    auto config = small_config();
    config.min_count = 3;
    EXPECT_EQ(code_of([&] { train_cbow({t}, config); }), ErrorCode::EmptyVocabulary);
    EXPECT_EQ(code_of([&] { train_cbow({}, small_config()); }), ErrorCode::EmptyVocabulary);
    config = small_config();
    config.dim = 0;
    EXPECT_EQ(code_of([&] { train_cbow({t}, config); }), ErrorCode::InvalidArgument);
    config = small_config();
    config.learning_rate = -1;
    EXPECT_EQ(code_of([&] { train_cbow({t}, config); }), ErrorCode::InvalidArgument);
}

TEST(Cbow, LossDecreasesOnFixture) {
    auto config = small_config();
    config.epochs = 30;
    const auto r = train_cbow(texts_of(fixtures::civil_code()), config);
    ASSERT_EQ(r.report.epoch_loss.size(), 30u);
    EXPECT_LT(r.report.epoch_loss.back(), r.report.epoch_loss.front());
    EXPECT_GT(r.report.examples_per_epoch, 0u);
}

TEST(Cbow, ContinueAppendsNewWordsAndKeepsOldRows) {
    TokenStream first, second;
    first.tokens = {"a", "b", "a", "b", "c"};
    second.tokens = {"a", "x", "y", "x"};
    auto config = small_config();
    auto result = train_cbow({first}, config);
    const auto before = result.model.words();
    config.seed = 7;
    const auto report = continue_cbow(result.model, {second}, config);
    EXPECT_EQ(report.new_words, 2u);
    const auto& words = result.model.words();
    ASSERT_EQ(words.size(), 5u);
    EXPECT_TRUE(std::equal(before.begin(), before.end(), words.begin()));
    EXPECT_EQ(words[3], "x");
    EXPECT_EQ(words[4], "y");
    EXPECT_EQ(result.model.output_vectors().size(), 5u * config.dim);
    EXPECT_EQ(result.model.seed, 7u);
}

TEST(Cbow, ContinueOnEmptyModelEqualsTrain) {
    const auto texts = texts_of(fixtures::civil_code_prefix(4));
    EmbeddingModel m;
    continue_cbow(m, texts, small_config());
    EXPECT_TRUE(m == train_cbow(texts, small_config()).model);
}

TEST(Cbow, SingleTokenSentencesAreSkipped) {
    TokenStream lone, pair;
    lone.tokens = {"solo"};
    pair.tokens = {"a", "b"};
    const auto r = train_cbow({lone, pair}, small_config());
    EXPECT_TRUE(r.model.find("solo"));
    EXPECT_EQ(r.report.examples_per_epoch, 2u);
}

TEST(Cbow, SgdStepLowersLoss) {
    EmbeddingModel m(4, {"a", "b", "c", "d"}, {0.1, -0.2, 0.3, 0.05, -0.1, 0.2, 0.1, 0.3, 0.2, 0.1, -0.3, 0.1,
                                                0.0, 0.1, 0.2, -0.2});
    m.ensure_output_layer();
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t i = 0; i < 4; ++i) m.mutable_output(r)[i] = 0.05 * static_cast<double>(r + i) - 0.1;
    const CbowExample ex{{0, 1}, 2, {3, 3}};
    const double before = cbow_loss(m, ex);
    EXPECT_EQ(cbow_sgd_step(m, ex, 0.05), before);
    EXPECT_LT(cbow_loss(m, ex), before);
}

TEST(Cbow, GradientMatchesStepDirection) {
    // A step with rate lr must move every parameter by exactly -lr * gradient.
    EmbeddingModel m(3, {"a", "b", "c"}, {0.1, 0.2, 0.3, -0.1, 0.0, 0.4, 0.2, -0.3, 0.1});
    m.ensure_output_layer();
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t i = 0; i < 3; ++i) m.mutable_output(r)[i] = 0.1 * static_cast<double>(i) - 0.05 * r;
    const CbowExample ex{{0, 0, 1}, 2, {1}};
    const auto g = cbow_gradient(m, ex);
    auto stepped = m;
    cbow_sgd_step(stepped, ex, 0.5);
    for (const auto& [row, grad] : g.input)
        for (std::size_t i = 0; i < 3; ++i)
            EXPECT_NEAR(stepped.vector(row)[i], m.vector(row)[i] - 0.5 * grad[i], 1e-15);
    for (const auto& [row, grad] : g.output)
        for (std::size_t i = 0; i < 3; ++i)
            EXPECT_NEAR(stepped.output(row)[i], m.output(row)[i] - 0.5 * grad[i], 1e-15);
}

TEST(Cbow, ExampleValidation) {
    EmbeddingModel m(2, {"a", "b"}, {1, 0, 0, 1});
    EXPECT_EQ(code_of([&] { cbow_loss(m, {{0}, 1, {}}); }), ErrorCode::InvalidArgument);
    m.ensure_output_layer();
    EXPECT_EQ(code_of([&] { cbow_loss(m, {{}, 1, {}}); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([&] { cbow_loss(m, {{0}, 2, {}}); }), ErrorCode::OrdinalOutOfRange);
    EXPECT_NEAR(cbow_loss(m, {{0}, 1, {}}), std::log(2.0), 1e-15);
}
