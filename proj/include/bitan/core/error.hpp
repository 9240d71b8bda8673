#pragma once

#include <stdexcept>
#include <string>

namespace bitan {

enum class ErrorKind {
    ZeroVector,
    NoConvergence,
    RankDeficient,
    CommonComponent,
    NotSmooth,
    CountMismatch,
    TangentFailure,
    DegenerateChord,
    InconsistentPairing,
    TupleCountMismatch,
    ExcessIncidence,
    InconsistentStructure,
    PairingAmbiguous,
    DegenerateConfiguration,
    PullbackAmbiguity,
    GeneralPositionFailure,
    NotAronhold,
    InvalidArgument,
    Schema,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::ZeroVector: return "ZeroVector";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::RankDeficient: return "RankDeficient";
        case ErrorKind::CommonComponent: return "CommonComponent";
        case ErrorKind::NotSmooth: return "NotSmooth";
        case ErrorKind::CountMismatch: return "CountMismatch";
        case ErrorKind::TangentFailure: return "TangentFailure";
        case ErrorKind::DegenerateChord: return "DegenerateChord";
        case ErrorKind::InconsistentPairing: return "InconsistentPairing";
        case ErrorKind::TupleCountMismatch: return "TupleCountMismatch";
        case ErrorKind::ExcessIncidence: return "ExcessIncidence";
        case ErrorKind::InconsistentStructure: return "InconsistentStructure";
        case ErrorKind::PairingAmbiguous: return "PairingAmbiguous";
        case ErrorKind::DegenerateConfiguration: return "DegenerateConfiguration";
        case ErrorKind::PullbackAmbiguity: return "PullbackAmbiguity";
        case ErrorKind::GeneralPositionFailure: return "GeneralPositionFailure";
        case ErrorKind::NotAronhold: return "NotAronhold";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::Schema: return "Schema";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a kind; CountMismatch and
/// TupleCountMismatch also carry the offending count.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what, long count = -1)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), count_(count) {}

    ErrorKind kind() const noexcept { return kind_; }
    long count() const noexcept { return count_; }

private:
    ErrorKind kind_;
    long count_;
};

}  // namespace bitan
