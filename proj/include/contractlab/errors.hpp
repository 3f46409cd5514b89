#pragma once

#include <stdexcept>
#include <string>

namespace contractlab {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Vector/matrix sizes do not line up with the state or action space.
class DimensionMismatch : public Error {
  public:
    using Error::Error;
};

/// A belief set expected to be affinely independent is not.
class DegenerateBasis : public Error {
  public:
    using Error::Error;
};

/// An experiment support expected to be affinely independent is not.
class DegenerateSupport : public Error {
  public:
    using Error::Error;
};

/// Pivoting stalled, a linear solve failed, or a numeric post-condition broke.
class NumericalFailure : public Error {
  public:
    using Error::Error;
};

/// Fixed-point iteration exceeded its iteration cap.
class NoConvergence : public Error {
  public:
    using Error::Error;
};

/// Payment construction requires a c-monotone choice function.
class NotCMonotone : public Error {
  public:
    using Error::Error;
};

/// Forcing contracts require affinely independent supports.
class RedundantSupport : public Error {
  public:
    using Error::Error;
};

/// Results contracts require a strongly c-monotone choice function.
class NotStronglyCMonotone : public Error {
  public:
    using Error::Error;
};

/// Results contracts require |support| = |states| for every type.
class NotFullDimension : public Error {
  public:
    using Error::Error;
};

/// Results contracts require supports that are pairwise disjoint across types.
class OverlappingSupports : public Error {
  public:
    using Error::Error;
};

/// A geometric construction received inputs outside its domain
/// (e.g. a prior on the boundary of a support hull).
class InvalidGeometry : public Error {
  public:
    using Error::Error;
};

/// A guaranteed monotonicity property failed numerically.
class MonotonicityDiagnostic : public Error {
  public:
    using Error::Error;
};

/// Scenario/report files that fail schema or invariant validation.
class ScenarioError : public Error {
  public:
    using Error::Error;
};

}  // namespace contractlab
