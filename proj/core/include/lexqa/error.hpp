#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lexqa {

enum class ErrorCode {
    // input errors
    NoArticlesFound,
    DuplicateArticleId,
    ParseError,
    MissingField,
    EmptyCorpus,
    EmptyVocabulary,
    HeaderMismatch,
    MalformedLine,
    DuplicateWord,
    InvalidArgument,
    Io,
    // data-consistency errors
    MissingVote,
    MissingLabel,
    NoCandidates,
    UnknownArticle,
    EmptyRun,
    // invariant violations
    OrdinalOutOfRange,
    Internal,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Broad failure class, used by the command-line front end to pick an exit code.
enum class ErrorClass { Input, DataConsistency, Invariant };

ErrorClass classify(ErrorCode code) noexcept;

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

}  // namespace lexqa
