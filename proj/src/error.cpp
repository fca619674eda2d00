#include "swarmzones/error.hpp"

namespace swarmzones {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::OutOfBounds: return "OutOfBounds";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::InvalidGrid: return "InvalidGrid";
        case ErrorCode::TooManyDrones: return "TooManyDrones";
        case ErrorCode::InvalidRequest: return "InvalidRequest";
        case ErrorCode::NotAdjacent: return "NotAdjacent";
        case ErrorCode::CellOccupied: return "CellOccupied";
        case ErrorCode::RowConflict: return "RowConflict";
        case ErrorCode::LayerOverlap: return "LayerOverlap";
        case ErrorCode::MissingTransferLayer: return "MissingTransferLayer";
        case ErrorCode::TransferLayerOccupied: return "TransferLayerOccupied";
        case ErrorCode::DroneAbsent: return "DroneAbsent";
        case ErrorCode::SensorRange: return "SensorRange";
        case ErrorCode::EmptyWindow: return "EmptyWindow";
        case ErrorCode::MixedNetworks: return "MixedNetworks";
        case ErrorCode::MixedWindows: return "MixedWindows";
        case ErrorCode::MissingObservation: return "MissingObservation";
        case ErrorCode::InvalidThresholds: return "InvalidThresholds";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ValidationError: return "ValidationError";
        case ErrorCode::ParseError: return "ParseError";
    }
    return "Unknown";
}

}  // namespace swarmzones
