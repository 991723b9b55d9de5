#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mars/cell.hpp"

namespace mars {

enum class ErrorCode {
    InvalidInput,
    CellNotOccupied,
    CellOccupied,
    DestinationCollision,
    NoPath,
    NoFeasibleDonor,
    NoFeasibleVmcs,
    UnboundedGrowth,
    InfeasibleAssignment,
    InfeasibleTarget,
    UnsafeStep,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a typed reason. Planning
// failures additionally name the phase and the offending entity.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

class PlanningError : public Error {
public:
    PlanningError(ErrorCode code, std::string phase, std::string entity, const std::string& message)
        : Error(code, "[" + phase + "] " + entity + ": " + message),
          phase_(std::move(phase)),
          entity_(std::move(entity)) {}

    const std::string& phase() const noexcept { return phase_; }
    const std::string& entity() const noexcept { return entity_; }

private:
    std::string phase_;
    std::string entity_;
};

// No-path result of a grid search. `frontier` lists the stationary cells that
// rejected an expansion, which is what path clearance needs to diagnose.
class NoPathError : public Error {
public:
    NoPathError(const std::string& message, std::vector<Cell> frontier)
        : Error(ErrorCode::NoPath, message), frontier_(std::move(frontier)) {}

    const std::vector<Cell>& frontier() const noexcept { return frontier_; }

private:
    std::vector<Cell> frontier_;
};

}  // namespace mars
