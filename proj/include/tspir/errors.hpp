#pragma once

#include <stdexcept>
#include <string>

namespace tspir {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// field / linear algebra
struct ZeroInverse : Error {
    ZeroInverse() : Error("inverse of zero requested") {}
};
struct SingularMatrix : Error {
    SingularMatrix() : Error("matrix is singular") {}
};
struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& what) : Error("dimension mismatch: " + what) {}
};

// code construction
struct InvalidPoints : Error {
    InvalidPoints() : Error("evaluation points must be distinct") {}
};
struct ZeroMultiplier : Error {
    ZeroMultiplier() : Error("column multipliers must be nonzero") {}
};

// parameters and protocol
struct InvalidParams : Error {
    using Error::Error;
};
struct SelectionInvalid : Error {
    explicit SelectionInvalid(const std::string& what) : Error("selection matrix contract violated: " + what) {}
};
struct InvalidRegime : Error {
    InvalidRegime() : Error("no positive-rate regime: N must be >= M+T") {}
};

// privacy audits
struct EnumerationTooLarge : Error {
    explicit EnumerationTooLarge(const std::string& what) : Error("enumeration too large: " + what) {}
};

// wire / transport
struct ElementOutOfRange : Error {
    ElementOutOfRange() : Error("payload element not a canonical residue for the declared modulus") {}
};
struct MalformedFrame : Error {
    explicit MalformedFrame(const std::string& what) : Error("malformed frame: " + what) {}
};
struct UnknownKind : Error {
    UnknownKind() : Error("unknown message kind tag") {}
};
struct TransportFailure : Error {
    explicit TransportFailure(const std::string& what) : Error("transport failure: " + what) {}
};
struct DecodeFailure : Error {
    explicit DecodeFailure(const std::string& what) : Error("decode failure: " + what) {}
};
struct IncompleteTranscript : Error {
    explicit IncompleteTranscript(const std::string& what) : Error("incomplete transcript: " + what) {}
};

}  // namespace tspir
