#pragma once

#include <stdexcept>
#include <string>

namespace nsd {

/// Base class for every error raised by the pipeline. CLI maps these to exit code 2.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// --- EDF / annotation ingestion ---
struct TruncatedHeader : Error { using Error::Error; };
struct NonNumericField : Error {
    explicit NonNumericField(const std::string& field, const std::string& raw)
        : Error("non-numeric EDF header field '" + field + "': \"" + raw + "\""), field(field) {}
    std::string field;
};
struct InconsistentHeader : Error { using Error::Error; };
struct TruncatedDataRecord : Error { using Error::Error; };
struct ChannelLengthMismatch : Error { using Error::Error; };
struct NonBinaryAnnotation : Error {
    explicit NonBinaryAnnotation(std::size_t row)
        : Error("non-binary annotation value at row " + std::to_string(row)), row(row) {}
    std::size_t row;
};
struct DuplicateTimestamp : Error {
    explicit DuplicateTimestamp(std::size_t row)
        : Error("duplicate annotation timestamp at row " + std::to_string(row)), row(row) {}
    std::size_t row;
};

// --- preprocessing ---
struct EmptyInput : Error { using Error::Error; };
struct WindowLongerThanRecording : Error { using Error::Error; };
struct WindowOutsideAnnotations : Error { using Error::Error; };

// --- features ---
struct WindowTooShort : Error { using Error::Error; };

// --- pca ---
struct TooFewSamples : Error { using Error::Error; };
struct TargetDimExceedsFeatureDim : Error { using Error::Error; };
struct DimensionMismatch : Error { using Error::Error; };

// --- classifiers ---
struct SingleClassTrainingSet : Error { using Error::Error; };
struct BudgetInfeasible : Error { using Error::Error; };

// --- metrics ---
struct LengthMismatch : Error { using Error::Error; };
struct NonBinaryValue : Error { using Error::Error; };
struct EmptyEvaluation : Error { using Error::Error; };
struct SingleClassLabels : Error { using Error::Error; };

// --- harness / persistence ---
struct NoDataFound : Error { using Error::Error; };
struct TooFewSegments : Error { using Error::Error; };
struct BadMagic : Error { using Error::Error; };
struct VersionUnsupported : Error { using Error::Error; };
struct SectionLengthMismatch : Error { using Error::Error; };
struct MissingSection : Error { using Error::Error; };

}  // namespace nsd
