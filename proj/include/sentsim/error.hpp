#pragma once

#include <stdexcept>
#include <string>

namespace sentsim {

// One code per contract violation the library can report. Tests match on
// the code, messages carry the detail.
enum class Err {
  // core
  ReliabilityOutOfRange,
  EmptySubject,
  NonFiniteValues,
  EmptyVector,
  // perception
  DimensionMismatch,
  ShapeMismatch,
  NonFiniteLoss,
  // simspace
  PointNotInSpace,
  DisconnectedGraph,
  EmptyReferenceSet,
  SizeMismatch,
  ZeroVariance,
  // taggers
  EmptyWindow,
  DimMismatch,
  SpaceMismatch,
  HistoryLengthMismatch,
  // reality
  NonPositivePrecision,
  UnknownVariable,
  // cps
  NegativeParams,
  EmptyCompetitors,
  UnknownBucket,
  DanglingReference,
  // audit
  UnknownChannel,
  // envs
  InvalidSpec,
  RangeOutOfBounds,
  // harness
  ConfigInvalid,
  ComponentFailure,
  BadGridKey,
  EmptyRecords,
};

const char* err_name(Err e);

class Error : public std::runtime_error {
 public:
  Error(Err code, const std::string& detail)
      : std::runtime_error(std::string(err_name(code)) +
                           (detail.empty() ? "" : ": " + detail)),
        code_(code) {}

  Err code() const { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void raise(Err code, const std::string& detail = "") {
  throw Error(code, detail);
}

inline void require(bool cond, Err code, const std::string& detail = "") {
  if (!cond) raise(code, detail);
}

// Validation errors map to CLI exit code 1, everything else to 2.
bool is_validation_error(Err e);

}  // namespace sentsim
