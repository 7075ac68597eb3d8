#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wikiner {

// Base of every domain error. `code` is the stable machine-readable name
// (also used as the HTTP error code), `details` carries offending ids etc.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message,
        std::vector<std::string> details = {})
      : std::runtime_error(message),
        code_(std::move(code)),
        details_(std::move(details)) {}

  const std::string& code() const noexcept { return code_; }
  const std::vector<std::string>& details() const noexcept { return details_; }

 private:
  std::string code_;
  std::vector<std::string> details_;
};

#define WIKINER_DEFINE_ERROR(Name)                                        \
  class Name : public Error {                                             \
   public:                                                                \
    explicit Name(const std::string& message,                             \
                  std::vector<std::string> details = {})                  \
        : Error(#Name, message, std::move(details)) {}                    \
  }

// wiki-ingest
WIKINER_DEFINE_ERROR(EmptyTitle);
WIKINER_DEFINE_ERROR(NetworkError);
WIKINER_DEFINE_ERROR(PageMissing);
// candidate-pipeline
WIKINER_DEFINE_ERROR(EmptySurface);
WIKINER_DEFINE_ERROR(TaggerError);
// corpus-store
WIKINER_DEFINE_ERROR(InconsistentCounts);
WIKINER_DEFINE_ERROR(UnlabeledRecord);
WIKINER_DEFINE_ERROR(DuplicateSurface);
WIKINER_DEFINE_ERROR(InvalidLabel);
// annotation-service
WIKINER_DEFINE_ERROR(UnknownAnnotator);
WIKINER_DEFINE_ERROR(UnknownEntity);
WIKINER_DEFINE_ERROR(NotEnoughAnnotators);
WIKINER_DEFINE_ERROR(NotDisagreed);
WIKINER_DEFINE_ERROR(Unresolved);
// ml-eval
WIKINER_DEFINE_ERROR(SpaceNotFrozen);
WIKINER_DEFINE_ERROR(DimensionMismatch);
WIKINER_DEFINE_ERROR(EmptyConfusion);
WIKINER_DEFINE_ERROR(BadK);
WIKINER_DEFINE_ERROR(FractionTooSmall);
WIKINER_DEFINE_ERROR(NotProbabilistic);
// cli
WIKINER_DEFINE_ERROR(MissingStageInput);
WIKINER_DEFINE_ERROR(ConfigError);

#undef WIKINER_DEFINE_ERROR

// Malformed input line; `line()` is 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& message)
      : Error("ParseError", "line " + std::to_string(line) + ": " + message,
              {std::to_string(line)}),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace wikiner
