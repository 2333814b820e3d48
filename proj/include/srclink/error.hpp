#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace srclink {

// Caller broke a documented precondition (bad k, mismatched dimensions, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Base for recoverable runtime failures.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at offset " + std::to_string(offset) + ")"), offset_(offset) {}

  // Byte offset for XML input, line number for line-oriented formats.
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class ValidationError : public Error {
 public:
  ValidationError(const std::string& what, std::vector<std::string> offending_ids)
      : Error(format(what, offending_ids)), offending_ids_(std::move(offending_ids)) {}

  const std::vector<std::string>& offending_ids() const { return offending_ids_; }

 private:
  static std::string format(const std::string& what, const std::vector<std::string>& ids) {
    std::string msg = what;
    if (!ids.empty()) {
      msg += ":";
      std::size_t shown = 0;
      for (const auto& id : ids) {
        if (shown++ == 20) {
          msg += " ... (" + std::to_string(ids.size()) + " total)";
          break;
        }
        msg += " " + id;
      }
    }
    return msg;
  }

  std::vector<std::string> offending_ids_;
};

class EmptyVocabularyError : public Error {
 public:
  EmptyVocabularyError() : Error("empty vocabulary: no term survives the shared-term and max-df rules") {}
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// CCA could not produce the requested number of stable canonical directions.
class CcaNonConvergence : public Error {
 public:
  using Error::Error;
};

}  // namespace srclink
