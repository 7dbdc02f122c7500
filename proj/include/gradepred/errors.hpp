#pragma once

#include <stdexcept>
#include <string>

namespace gradepred {

// Base of every library error. `code()` is a stable, machine-parseable tag
// that the CLI prints as `error: <code>: <message>`.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define GRADEPRED_DEFINE_ERROR(Name, Tag)                                   \
  class Name : public Error {                                               \
   public:                                                                  \
    explicit Name(const std::string& message) : Error(Tag, message) {}     \
  };

GRADEPRED_DEFINE_ERROR(MissingScores, "MissingScores")
GRADEPRED_DEFINE_ERROR(IndexError, "IndexError")
GRADEPRED_DEFINE_ERROR(DimensionError, "DimensionError")
GRADEPRED_DEFINE_ERROR(InvalidSchedule, "InvalidSchedule")
GRADEPRED_DEFINE_ERROR(InvalidArgument, "InvalidArgument")
GRADEPRED_DEFINE_ERROR(InsufficientNeighbors, "InsufficientNeighbors")
GRADEPRED_DEFINE_ERROR(DegenerateCohort, "DegenerateCohort")
GRADEPRED_DEFINE_ERROR(AlignmentError, "AlignmentError")
GRADEPRED_DEFINE_ERROR(InsufficientHistory, "InsufficientHistory")
GRADEPRED_DEFINE_ERROR(CalibrationError, "CalibrationError")
GRADEPRED_DEFINE_ERROR(ValidityError, "ValidityError")
GRADEPRED_DEFINE_ERROR(SingularDesign, "SingularDesign")
GRADEPRED_DEFINE_ERROR(DegenerateLabels, "DegenerateLabels")
GRADEPRED_DEFINE_ERROR(EmptyEvaluation, "EmptyEvaluation")
GRADEPRED_DEFINE_ERROR(WeightSumError, "WeightSum")
GRADEPRED_DEFINE_ERROR(IoError, "IoError")

#undef GRADEPRED_DEFINE_ERROR

// CSV / config parse failure with 1-based row and column coordinates
// (0 means "not applicable").
class ParseError : public Error {
 public:
  ParseError(const std::string& file, std::size_t row, std::size_t column,
             const std::string& message)
      : Error("ParseError", format(file, row, column, message)),
        row_(row),
        column_(column) {}

  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& file, std::size_t row,
                            std::size_t column, const std::string& message) {
    std::string out = file;
    if (row > 0) out += ":" + std::to_string(row);
    if (column > 0) out += ":" + std::to_string(column);
    return out + ": " + message;
  }

  std::size_t row_;
  std::size_t column_;
};

}  // namespace gradepred
