#include "stregion/errors.hpp"

namespace stregion {

MalformedRow::MalformedRow(std::size_t line_no, const std::string& reason)
    : Error("malformed row at line " + std::to_string(line_no) + ": " + reason), line_no_(line_no) {}

EmptyDataset::EmptyDataset() : Error("dataset has no observations") {}

DuplicateObservation::DuplicateObservation(std::string location_id, std::int64_t t)
    : Error("duplicate observation for location '" + location_id + "' at t=" + std::to_string(t)),
      location_id_(std::move(location_id)), t_(t) {}

InconsistentCoordinates::InconsistentCoordinates(std::string location_id)
    : Error("location '" + location_id + "' appears with two different coordinates"),
      location_id_(std::move(location_id)) {}

MissingSlot::MissingSlot(std::int64_t t) : Error("no time slot t=" + std::to_string(t)), t_(t) {}

DuplicatePoints::DuplicatePoints(std::string first, std::string second)
    : Error("locations '" + first + "' and '" + second + "' have identical coordinates") {}

UnknownVertex::UnknownVertex(const std::string& id) : Error("unknown vertex '" + id + "'") {}

IsolatedVertex::IsolatedVertex(const std::string& id)
    : Error("vertex '" + id + "' has no neighbors; density is undefined") {}

TooManyClusters::TooManyClusters(std::size_t c, std::size_t n)
    : Error("requested " + std::to_string(c) + " clusters but only " + std::to_string(n) +
            " vertices are available") {}

DegenerateValues::DegenerateValues(std::size_t distinct, std::size_t requested)
    : Error("only " + std::to_string(distinct) + " distinct readings for " +
            std::to_string(requested) + " reading clusters") {}

CoverageMismatch::CoverageMismatch()
    : Error("location and reading clusterings cover different location sets") {}

InsufficientHistory::InsufficientHistory(std::size_t have, std::size_t need)
    : Error("history window has " + std::to_string(have) + " values, need at least " +
            std::to_string(need)) {}

SlotError::SlotError(std::int64_t t, const std::string& what)
    : Error("slot t=" + std::to_string(t) + ": " + what), t_(t) {}

ConfigInvalid::ConfigInvalid(const std::string& what) : Error("invalid configuration: " + what) {}

} // namespace stregion
