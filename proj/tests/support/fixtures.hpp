#pragma once

#include "lexqa/corpus.hpp"
#include "lexqa/embedding.hpp"
#include "lexqa/text_analysis.hpp"

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace fixtures {

std::filesystem::path data_path(const std::string& name);

lexqa::Corpus civil_code();
/// First `n` articles of the civil code fixture, renumbered.
lexqa::Corpus civil_code_prefix(std::size_t n);
std::vector<lexqa::QueryRecord> queries();

/// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& tag);

std::string read_file(const std::filesystem::path& path);

/// Random bag of 1..max_len tokens drawn from `vocab`, with an occasional unseen token.
lexqa::TokenStream random_query(std::mt19937_64& rng, const std::vector<std::string>& vocab, std::size_t max_len = 8);

/// Sorted distinct tokens of a corpus under the default analyzer.
std::vector<std::string> vocabulary(const lexqa::Corpus& corpus, const lexqa::AnalyzerConfig& analyzer = {});

/// Small CBOW model trained on the corpus articles, for ranking tests.
lexqa::EmbeddingModel small_model(const lexqa::Corpus& corpus, std::size_t dim = 16, std::size_t epochs = 20);

}  // namespace fixtures
