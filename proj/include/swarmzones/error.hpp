#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace swarmzones {

enum class ErrorCode {
    OutOfBounds,
    IndexOutOfRange,
    InvalidGrid,
    TooManyDrones,
    InvalidRequest,
    NotAdjacent,
    CellOccupied,
    RowConflict,
    LayerOverlap,
    MissingTransferLayer,
    TransferLayerOccupied,
    DroneAbsent,
    SensorRange,
    EmptyWindow,
    MixedNetworks,
    MixedWindows,
    MissingObservation,
    InvalidThresholds,
    InvalidArgument,
    ValidationError,
    ParseError,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace swarmzones
