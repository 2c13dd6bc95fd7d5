#include "ztids/error.hpp"

namespace ztids {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::MissingLabelColumn: return "MissingLabelColumn";
        case ErrorCode::EmptyFile: return "EmptyFile";
        case ErrorCode::RaggedRow: return "RaggedRow";
        case ErrorCode::Io: return "Io";
        case ErrorCode::TooFewSamplesPerClass: return "TooFewSamplesPerClass";
        case ErrorCode::DegenerateColumn: return "DegenerateColumn";
        case ErrorCode::AlreadyBalanced: return "AlreadyBalanced";
        case ErrorCode::MinorityTooSmall: return "MinorityTooSmall";
        case ErrorCode::InvalidTargetCount: return "InvalidTargetCount";
        case ErrorCode::SingleClassTraining: return "SingleClassTraining";
        case ErrorCode::BadHyperparameter: return "BadHyperparameter";
        case ErrorCode::ShapeMismatch: return "ShapeMismatch";
        case ErrorCode::NotDifferentiable: return "NotDifferentiable";
        case ErrorCode::NotTreeBased: return "NotTreeBased";
        case ErrorCode::VersionMismatch: return "VersionMismatch";
        case ErrorCode::CorruptModel: return "CorruptModel";
        case ErrorCode::EmptySpace: return "EmptySpace";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::Empty: return "Empty";
    }
    return "Unknown";
}

}  // namespace ztids
