#pragma once

#include <stdexcept>
#include <string>

namespace clusterauth {

enum class Errc {
  // group math
  ZeroInverse,
  OutOfRange,
  DuplicateAbscissa,
  ZeroAbscissa,
  InvalidGroup,
  NotInGroup,
  Malformed,
  // registry
  DuplicateRegistration,
  UnknownCluster,
  DuplicateInsert,
  UnprovisionedNuav,
  // join
  EmptyBatch,
  MismatchedCluster,
  StaleTimestamp,
  BatchRejected,
  ResultMismatch,
  AggregateInvalid,
  TokenMismatch,
  AckInvalid,
  // cross-cluster
  UnknownMember,
  UnknownPid,
  // key update
  AbscissaCollision,
  EmptyCluster,
  MalformedShare,
  ConfirmMismatch,
  MissingEnvelope,
  // overhead / harness / sim
  UnknownStage,
  UnknownQueryKind,
  RepeatedChallenge,
  ConfigInvalid,
  ProtocolAbort,
};

const char* to_string(Errc code);

class ProtocolError : public std::runtime_error {
 public:
  explicit ProtocolError(Errc code, const std::string& detail = {})
      : std::runtime_error(detail.empty() ? std::string(to_string(code))
                                          : std::string(to_string(code)) + ": " + detail),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace clusterauth
