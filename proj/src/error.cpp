#include "sentsim/error.hpp"

namespace sentsim {

const char* err_name(Err e) {
  switch (e) {
    case Err::ReliabilityOutOfRange: return "ReliabilityOutOfRange";
    case Err::EmptySubject: return "EmptySubject";
    case Err::NonFiniteValues: return "NonFiniteValues";
    case Err::EmptyVector: return "EmptyVector";
    case Err::DimensionMismatch: return "DimensionMismatch";
    case Err::ShapeMismatch: return "ShapeMismatch";
    case Err::NonFiniteLoss: return "NonFiniteLoss";
    case Err::PointNotInSpace: return "PointNotInSpace";
    case Err::DisconnectedGraph: return "DisconnectedGraph";
    case Err::EmptyReferenceSet: return "EmptyReferenceSet";
    case Err::SizeMismatch: return "SizeMismatch";
    case Err::ZeroVariance: return "ZeroVariance";
    case Err::EmptyWindow: return "EmptyWindow";
    case Err::DimMismatch: return "DimMismatch";
    case Err::SpaceMismatch: return "SpaceMismatch";
    case Err::HistoryLengthMismatch: return "HistoryLengthMismatch";
    case Err::NonPositivePrecision: return "NonPositivePrecision";
    case Err::UnknownVariable: return "UnknownVariable";
    case Err::NegativeParams: return "NegativeParams";
    case Err::EmptyCompetitors: return "EmptyCompetitors";
    case Err::UnknownBucket: return "UnknownBucket";
    case Err::DanglingReference: return "DanglingReference";
    case Err::UnknownChannel: return "UnknownChannel";
    case Err::InvalidSpec: return "InvalidSpec";
    case Err::RangeOutOfBounds: return "RangeOutOfBounds";
    case Err::ConfigInvalid: return "ConfigInvalid";
    case Err::ComponentFailure: return "ComponentFailure";
    case Err::BadGridKey: return "BadGridKey";
    case Err::EmptyRecords: return "EmptyRecords";
  }
  return "UnknownError";
}

bool is_validation_error(Err e) {
  switch (e) {
    case Err::ConfigInvalid:
    case Err::BadGridKey:
    case Err::InvalidSpec:
    case Err::EmptyRecords:
    case Err::UnknownChannel:
      return true;
    default:
      return false;
  }
}

}  // namespace sentsim
