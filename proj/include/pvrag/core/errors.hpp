#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pvrag {

/// Base class for every error raised by the pvrag libraries.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A canonical-vocabulary string was not recognised.
class VocabularyError : public Error {
 public:
  explicit VocabularyError(std::string token, const std::string& context = {})
      : Error((context.empty() ? std::string{} : context + ": ") + "unknown vocabulary token: \"" +
              token + "\""),
        token_(std::move(token)) {}
  const std::string& token() const noexcept { return token_; }

 private:
  std::string token_;
};

/// A descriptor violated the presence/quantity/location consistency rules.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Reference/evaluation splits overlap.
class SplitViolation : public Error {
 public:
  SplitViolation(std::string message, std::vector<std::string> ids)
      : Error(std::move(message)), ids_(std::move(ids)) {}
  const std::vector<std::string>& ids() const noexcept { return ids_; }

 private:
  std::vector<std::string> ids_;
};

/// Malformed input file; carries a location (line number or byte offset) in the message.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace pvrag
