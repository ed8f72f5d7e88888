#include "clusterauth/errors.hpp"

namespace clusterauth {

const char* to_string(Errc code) {
  switch (code) {
    case Errc::ZeroInverse: return "ZeroInverse";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::DuplicateAbscissa: return "DuplicateAbscissa";
    case Errc::ZeroAbscissa: return "ZeroAbscissa";
    case Errc::InvalidGroup: return "InvalidGroup";
    case Errc::NotInGroup: return "NotInGroup";
    case Errc::Malformed: return "Malformed";
    case Errc::DuplicateRegistration: return "DuplicateRegistration";
    case Errc::UnknownCluster: return "UnknownCluster";
    case Errc::DuplicateInsert: return "DuplicateInsert";
    case Errc::UnprovisionedNuav: return "UnprovisionedNuav";
    case Errc::EmptyBatch: return "EmptyBatch";
    case Errc::MismatchedCluster: return "MismatchedCluster";
    case Errc::StaleTimestamp: return "StaleTimestamp";
    case Errc::BatchRejected: return "BatchRejected";
    case Errc::ResultMismatch: return "ResultMismatch";
    case Errc::AggregateInvalid: return "AggregateInvalid";
    case Errc::TokenMismatch: return "TokenMismatch";
    case Errc::AckInvalid: return "AckInvalid";
    case Errc::UnknownMember: return "UnknownMember";
    case Errc::UnknownPid: return "UnknownPid";
    case Errc::AbscissaCollision: return "AbscissaCollision";
    case Errc::EmptyCluster: return "EmptyCluster";
    case Errc::MalformedShare: return "MalformedShare";
    case Errc::ConfirmMismatch: return "ConfirmMismatch";
    case Errc::MissingEnvelope: return "MissingEnvelope";
    case Errc::UnknownStage: return "UnknownStage";
    case Errc::UnknownQueryKind: return "UnknownQueryKind";
    case Errc::RepeatedChallenge: return "RepeatedChallenge";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    case Errc::ProtocolAbort: return "ProtocolAbort";
  }
  return "Unknown";
}

}  // namespace clusterauth
