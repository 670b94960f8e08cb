#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace stregion {

using SlotIndex = std::int64_t;
/// Index into Dataset::locations(). Locations are stored sorted by id, so
/// comparing indices is the same as comparing ids.
using LocationIndex = std::uint32_t;

struct Location {
    std::string id;
    double x = 0.0; ///< longitude, or an abstract planar x
    double y = 0.0; ///< latitude, or an abstract planar y

    bool operator==(const Location&) const = default;
};

struct Observation {
    LocationIndex location = 0;
    SlotIndex t = 0;
    double value = 0.0;

    bool operator==(const Observation&) const = default;
};

/// All observations of one time slot, sorted by location.
struct TimeSlice {
    SlotIndex t = 0;
    std::vector<Observation> members;

    std::vector<double> values() const;
    std::vector<LocationIndex> locations() const;

    bool operator==(const TimeSlice&) const = default;
};

/// One CSV row before normalisation.
struct ObservationRow {
    std::string location_id;
    double lon = 0.0;
    double lat = 0.0;
    SlotIndex t = 0;
    double value = 0.0;
};

class Dataset {
public:
    Dataset() = default;

    /// Takes ownership of pre-normalised data. Throws std::invalid_argument
    /// when an invariant is broken (ids unsorted, slots out of order, ...).
    Dataset(std::vector<Location> locations, std::vector<TimeSlice> slices);

    /// Groups rows by slot. Throws DuplicateObservation,
    /// InconsistentCoordinates or EmptyDataset.
    static Dataset from_rows(std::span<const ObservationRow> rows);

    const std::vector<Location>& locations() const noexcept { return locations_; }
    const std::vector<TimeSlice>& slices() const noexcept { return slices_; }
    const Location& location(LocationIndex index) const { return locations_.at(index); }

    std::optional<LocationIndex> find_location(std::string_view id) const;

    /// Throws MissingSlot.
    const TimeSlice& slice(SlotIndex t) const;

    std::size_t observation_count() const noexcept;
    bool empty() const noexcept { return slices_.empty(); }

    bool operator==(const Dataset&) const = default;

private:
    std::vector<Location> locations_;
    std::vector<TimeSlice> slices_;
};

/// Parses `location_id,lon,lat,t,value` CSV text. Line numbers in errors are
/// 1-based and count the header.
Dataset parse_observations(std::string_view csv_text);

/// Inverse of parse_observations; rows ordered by (t, location id). Reals are
/// written in shortest round-trip form.
std::string to_csv(const Dataset& dataset);

/// Re-bins integer slots: new slot = floor(t / width). Readings of a location
/// that fall into the same bin are averaged.
Dataset rebin(const Dataset& dataset, SlotIndex width);

/// Shortest decimal representation that round-trips through strtod.
std::string format_real(double value);

} // namespace stregion
