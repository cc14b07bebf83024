#include "fixtures.hpp"

#include <atomic>
#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>

namespace fixtures {

std::filesystem::path data_path(const std::string& name) { return std::filesystem::path(LEXQA_TEST_DATA_DIR) / name; }

lexqa::Corpus civil_code() { return lexqa::load_corpus(data_path("civil_code.txt")); }

lexqa::Corpus civil_code_prefix(std::size_t n) {
    const auto full = civil_code();
    std::vector<lexqa::Article> articles(full.articles().begin(),
                                         full.articles().begin() + static_cast<std::ptrdiff_t>(n));
    return lexqa::Corpus(std::move(articles), "civil_code_prefix");
}

std::vector<lexqa::QueryRecord> queries() { return lexqa::load_queries(data_path("queries.jsonl")); }

std::filesystem::path temp_dir(const std::string& tag) {
    static std::atomic<int> counter{0};
    const auto dir = std::filesystem::temp_directory_path() /
                     ("lexqa_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

lexqa::TokenStream random_query(std::mt19937_64& rng, const std::vector<std::string>& vocab, std::size_t max_len) {
    lexqa::TokenStream q;
    const auto len = 1 + rng() % max_len;
    for (std::size_t i = 0; i < len; ++i) {
        if (rng() % 10 == 0) q.tokens.push_back("zzunseen" + std::to_string(rng() % 3));
        else q.tokens.push_back(vocab[rng() % vocab.size()]);
        q.surface_forms.push_back(q.tokens.back());
    }
    return q;
}

std::vector<std::string> vocabulary(const lexqa::Corpus& corpus, const lexqa::AnalyzerConfig& analyzer) {
    std::set<std::string> words;
    for (const auto& a : corpus.articles())
        for (const auto& t : lexqa::tokenize(lexqa::article_text(a), analyzer).tokens) words.insert(t);
    return {words.begin(), words.end()};
}

lexqa::EmbeddingModel small_model(const lexqa::Corpus& corpus, std::size_t dim, std::size_t epochs) {
    std::vector<lexqa::TokenStream> texts;
    for (const auto& a : corpus.articles()) texts.push_back(lexqa::tokenize(lexqa::article_text(a), {}));
    lexqa::CbowConfig config;
    config.dim = dim;
    config.epochs = epochs;
    return lexqa::train_cbow(texts, config).model;
}

}  // namespace fixtures
