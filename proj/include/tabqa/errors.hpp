#pragma once

#include <stdexcept>
#include <string>

namespace tabqa {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DuplicateCaption : Error { using Error::Error; };
struct MalformedTable : Error { using Error::Error; };
struct SchemaError : Error { using Error::Error; };
struct NotFound : Error { using Error::Error; };
struct EmptyInput : Error { using Error::Error; };
struct NoTableFound : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct UnsupportedSql : Error { using Error::Error; };
struct TypeError : Error { using Error::Error; };
struct ModelError : Error { using Error::Error; };
struct UnknownIntent : Error { using Error::Error; };
struct SluParseError : Error { using Error::Error; };
struct SummaryError : Error { using Error::Error; };
struct RetrievalEmpty : Error { using Error::Error; };
struct GenerationError : Error { using Error::Error; };
struct AnswerParseError : Error { using Error::Error; };
struct SamplingError : Error { using Error::Error; };
struct JudgeError : Error { using Error::Error; };
struct AlignmentError : Error { using Error::Error; };
struct TransportError : Error { using Error::Error; };
struct ReplayMiss : Error { using Error::Error; };
struct Timeout : Error { using Error::Error; };
struct RecordError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace tabqa
