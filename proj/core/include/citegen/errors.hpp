#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace citegen {

// Error taxonomy shared by the library and the CLI. The CLI maps each class
// to a distinct exit code (see tools/).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller misuse: bad arguments, mismatched ids, empty candidate sets.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Config or data failed a validation rule (min_pairs > max_pairs, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Strict parse of a tagged answer failed; carries the byte offset.
class MalformedOutputError : public Error {
 public:
  MalformedOutputError(const std::string& what, std::size_t offset)
      : Error(what + " (byte " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Transport failure that survived all retries.
class BackendUnavailableError : public Error {
 public:
  using Error::Error;
};

// The backend replied, but the reply violates the wire contract.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// A token outside the valid candidate set was fed to the trie walker.
class ConstraintViolationError : public Error {
 public:
  using Error::Error;
};

// Unusable configuration detected at setup time (empty tree, bad mode, ...).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

// The answer segmenter's reply could not be parsed into (clause, citation)
// pairs; the owning sample is dropped with a logged reason.
class SegmentationFormatError : public Error {
 public:
  using Error::Error;
};

// Broken internal invariant; always a bug.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace citegen
