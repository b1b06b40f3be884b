#pragma once

#include <stdexcept>
#include <string>

namespace heatwave {

// Base class for all library errors. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define HEATWAVE_ERROR_TYPE(NAME)                                   \
  class NAME : public Error {                                       \
  public:                                                           \
    explicit NAME(const std::string& msg) : Error(msg) {}           \
  };

// grid_data
HEATWAVE_ERROR_TYPE(SchemaError)
HEATWAVE_ERROR_TYPE(DuplicateKeyError)
HEATWAVE_ERROR_TYPE(RangeError)
HEATWAVE_ERROR_TYPE(EmptySelectionError)
HEATWAVE_ERROR_TYPE(UnknownVariableError)

// design
HEATWAVE_ERROR_TYPE(WindowOutOfSpanError)
HEATWAVE_ERROR_TYPE(NoCompleteRowsError)
HEATWAVE_ERROR_TYPE(LabelImbalanceError)
HEATWAVE_ERROR_TYPE(EmptyDatasetError)

// forest
HEATWAVE_ERROR_TYPE(DegenerateDataError)
HEATWAVE_ERROR_TYPE(MissingPredictorError)
HEATWAVE_ERROR_TYPE(FingerprintMismatchError)

// diagnostics
HEATWAVE_ERROR_TYPE(UnknownPredictorError)
HEATWAVE_ERROR_TYPE(LengthMismatchError)

// ga_synth
HEATWAVE_ERROR_TYPE(TaskMismatchError)
HEATWAVE_ERROR_TYPE(PredictorSetMismatchError)

// conformal
HEATWAVE_ERROR_TYPE(SplitDegenerateError)

// sampling
HEATWAVE_ERROR_TYPE(DegeneratePriorError)

// synthgen
HEATWAVE_ERROR_TYPE(ConfigError)

// Generic precondition violations not covered by a named error above.
HEATWAVE_ERROR_TYPE(InvalidArgumentError)

#undef HEATWAVE_ERROR_TYPE

}  // namespace heatwave
