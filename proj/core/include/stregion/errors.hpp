#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace stregion {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// data-model

class MalformedRow : public Error {
public:
    MalformedRow(std::size_t line_no, const std::string& reason);
    std::size_t line_no() const noexcept { return line_no_; }

private:
    std::size_t line_no_;
};

class EmptyDataset : public Error {
public:
    EmptyDataset();
};

class DuplicateObservation : public Error {
public:
    DuplicateObservation(std::string location_id, std::int64_t t);
    const std::string& location_id() const noexcept { return location_id_; }
    std::int64_t t() const noexcept { return t_; }

private:
    std::string location_id_;
    std::int64_t t_;
};

class InconsistentCoordinates : public Error {
public:
    explicit InconsistentCoordinates(std::string location_id);
    const std::string& location_id() const noexcept { return location_id_; }

private:
    std::string location_id_;
};

class MissingSlot : public Error {
public:
    explicit MissingSlot(std::int64_t t);
    std::int64_t t() const noexcept { return t_; }

private:
    std::int64_t t_;
};

// geometry

class DuplicatePoints : public Error {
public:
    DuplicatePoints(std::string first, std::string second);
};

class UnknownVertex : public Error {
public:
    explicit UnknownVertex(const std::string& id);
};

// partition

class IsolatedVertex : public Error {
public:
    explicit IsolatedVertex(const std::string& id);
};

class TooManyClusters : public Error {
public:
    TooManyClusters(std::size_t c, std::size_t n);
};

class DegenerateValues : public Error {
public:
    DegenerateValues(std::size_t distinct, std::size_t requested);
};

class CoverageMismatch : public Error {
public:
    CoverageMismatch();
};

// detection

class InsufficientHistory : public Error {
public:
    InsufficientHistory(std::size_t have, std::size_t need);
};

/// Wraps an error raised while processing one time slot.
class SlotError : public Error {
public:
    SlotError(std::int64_t t, const std::string& what);
    std::int64_t t() const noexcept { return t_; }

private:
    std::int64_t t_;
};

// configuration

class ConfigInvalid : public Error {
public:
    explicit ConfigInvalid(const std::string& what);
};

} // namespace stregion
