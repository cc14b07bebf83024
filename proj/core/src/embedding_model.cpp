#include "lexqa/embedding.hpp"

#include "lexqa/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace lexqa {

EmbeddingModel::EmbeddingModel(std::size_t dim, std::vector<std::string> words,
                               std::vector<double> input_vectors)
    : dim_(dim), words_(std::move(words)), input_(std::move(input_vectors)) {
    if (dim_ == 0) throw Error(ErrorCode::InvalidArgument, "embedding dim must be positive");
    if (input_.size() != words_.size() * dim_)
        throw Error(ErrorCode::InvalidArgument, "input matrix does not match vocab_size x dim");
    for (std::size_t i = 0; i < words_.size(); ++i) {
        if (!index_.emplace(words_[i], i).second) throw Error(ErrorCode::DuplicateWord, words_[i]);
    }
    for (double v : input_) {
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite embedding value");
    }
}

std::optional<std::size_t> EmbeddingModel::find(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::span<const double> EmbeddingModel::vector(std::size_t row) const {
    return {input_.data() + row * dim_, dim_};
}

std::span<double> EmbeddingModel::mutable_input(std::size_t row) { return {input_.data() + row * dim_, dim_}; }

std::span<double> EmbeddingModel::mutable_output(std::size_t row) {
    return {output_.data() + row * dim_, dim_};
}

std::span<const double> EmbeddingModel::output(std::size_t row) const {
    return {output_.data() + row * dim_, dim_};
}

std::size_t EmbeddingModel::add_word(const std::string& word, std::span<const double> input_row) {
    if (input_row.size() != dim_) throw Error(ErrorCode::InvalidArgument, "row size does not match dim");
    if (index_.contains(word)) throw Error(ErrorCode::DuplicateWord, word);
    const auto row = words_.size();
    words_.push_back(word);
    index_.emplace(word, row);
    input_.insert(input_.end(), input_row.begin(), input_row.end());
    if (!output_.empty()) output_.resize(output_.size() + dim_, 0.0);
    return row;
}

void EmbeddingModel::ensure_output_layer() {
    if (output_.empty()) output_.assign(input_.size(), 0.0);
}

void write_vectors(const EmbeddingModel& model, std::ostream& out) {
    out << model.vocab_size() << ' ' << model.dim() << '\n';
    char buf[64];
    for (std::size_t r = 0; r < model.vocab_size(); ++r) {
        out << model.words()[r];
        for (double v : model.vector(r)) {
            auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
            out << ' ';
            out.write(buf, end - buf);
        }
        out << '\n';
    }
}

EmbeddingModel read_vectors(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::HeaderMismatch, "missing header line");
    std::size_t vocab_size = 0;
    std::size_t dim = 0;
    {
        std::istringstream header(line);
        std::string extra;
        if (!(header >> vocab_size >> dim) || (header >> extra) || dim == 0)
            throw Error(ErrorCode::HeaderMismatch, "header must be '<vocab_size> <dim>'");
    }

    std::vector<std::string> words;
    std::vector<double> values;
    words.reserve(vocab_size);
    values.reserve(vocab_size * dim);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(' ') == std::string::npos) continue;

        std::string_view rest(line);
        auto next_field = [&]() -> std::string_view {
            const auto b = rest.find_first_not_of(' ');
            if (b == std::string_view::npos) {
                rest = {};
                return {};
            }
            rest.remove_prefix(b);
            const auto e = rest.find(' ');
            auto field = rest.substr(0, e);
            rest = e == std::string_view::npos ? std::string_view{} : rest.substr(e);
            return field;
        };
        const auto word = next_field();
        for (std::size_t d = 0; d < dim; ++d) {
            const auto field = next_field();
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
            if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(v))
                throw Error(ErrorCode::MalformedLine, "line " + std::to_string(line_no));
            values.push_back(v);
        }
        if (!next_field().empty()) throw Error(ErrorCode::MalformedLine, "line " + std::to_string(line_no));
        words.emplace_back(word);
        if (words.size() > vocab_size)
            throw Error(ErrorCode::HeaderMismatch,
                        "more than the " + std::to_string(vocab_size) + " rows declared in the header");
    }
    if (words.size() != vocab_size)
        throw Error(ErrorCode::HeaderMismatch, "header declares " + std::to_string(vocab_size) +
                                                   " rows, file has " + std::to_string(words.size()));
    try {
        return EmbeddingModel(dim, std::move(words), std::move(values));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::DuplicateWord) throw;
        throw Error(ErrorCode::MalformedLine, e.what());
    }
}

void save_vectors(const EmbeddingModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
    write_vectors(model, out);
    if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

EmbeddingModel load_vectors(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
    return read_vectors(in);
}

}  // namespace lexqa
