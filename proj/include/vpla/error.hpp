#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vpla {

enum class ErrorCode {
  MalformedDocument,
  DanglingEdge,
  DuplicateNodeId,
  UnknownPort,
  DuplicateEdge,
  InvalidEdge,
  InvalidComposite,
  PatternDisconnected,
  UnknownCompositeType,
  MissingLayout,
  TooFewSamples,
  InvalidArgument,
  EmptyCorpus,
  InvalidMinsup,
  SizeExceedsCutoff,
  UnknownNode,
  EmptyCloneList,
  OverlappingOccurrences,
  StaleEmbedding,
  NoReadablePaths,
  Io,
  UnknownSession,
  UnknownPlan,
  NothingToUndo,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the engine carries a machine-readable code so
/// callers (CLI exit codes, HTTP status mapping) can branch without parsing
/// the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace vpla
