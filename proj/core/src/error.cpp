#include "lexqa/error.hpp"

namespace lexqa {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NoArticlesFound: return "NoArticlesFound";
        case ErrorCode::DuplicateArticleId: return "DuplicateArticleId";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::MissingField: return "MissingField";
        case ErrorCode::EmptyCorpus: return "EmptyCorpus";
        case ErrorCode::EmptyVocabulary: return "EmptyVocabulary";
        case ErrorCode::HeaderMismatch: return "HeaderMismatch";
        case ErrorCode::MalformedLine: return "MalformedLine";
        case ErrorCode::DuplicateWord: return "DuplicateWord";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Io: return "Io";
        case ErrorCode::MissingVote: return "MissingVote";
        case ErrorCode::MissingLabel: return "MissingLabel";
        case ErrorCode::NoCandidates: return "NoCandidates";
        case ErrorCode::UnknownArticle: return "UnknownArticle";
        case ErrorCode::EmptyRun: return "EmptyRun";
        case ErrorCode::OrdinalOutOfRange: return "OrdinalOutOfRange";
        case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

ErrorClass classify(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::MissingVote:
        case ErrorCode::MissingLabel:
        case ErrorCode::NoCandidates:
        case ErrorCode::UnknownArticle:
        case ErrorCode::EmptyRun:
            return ErrorClass::DataConsistency;
        case ErrorCode::OrdinalOutOfRange:
        case ErrorCode::Internal:
            return ErrorClass::Invariant;
        default:
            return ErrorClass::Input;
    }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace lexqa
