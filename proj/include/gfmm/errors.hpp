#pragma once

#include <stdexcept>
#include <string>

namespace gfmm {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingColumn : public Error { using Error::Error; };
class ArityMismatch : public Error { using Error::Error; };
class NumericParseError : public Error { using Error::Error; };
class UnknownCategory : public Error { using Error::Error; };
class SchemaError : public Error { using Error::Error; };
class TooFewSamples : public Error { using Error::Error; };
class EmptyDomain : public Error { using Error::Error; };
class MissingLabels : public Error { using Error::Error; };
class DimensionMismatch : public Error { using Error::Error; };
class NoNumericFeatures : public Error { using Error::Error; };
class NoCategoricalFeatures : public Error { using Error::Error; };
class EmptyMatrix : public Error { using Error::Error; };
class DegenerateRanks : public Error { using Error::Error; };
class UnsupportedAlpha : public Error { using Error::Error; };
class IoError : public Error { using Error::Error; };
class MissingDataset : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };
class FormatError : public Error { using Error::Error; };

}  // namespace gfmm
