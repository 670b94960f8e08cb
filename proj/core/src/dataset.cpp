#include "stregion/dataset.hpp"

#include "stregion/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace stregion {

std::vector<double> TimeSlice::values() const {
    std::vector<double> out;
    out.reserve(members.size());
    for (const auto& m : members) out.push_back(m.value);
    return out;
}

std::vector<LocationIndex> TimeSlice::locations() const {
    std::vector<LocationIndex> out;
    out.reserve(members.size());
    for (const auto& m : members) out.push_back(m.location);
    return out;
}

Dataset::Dataset(std::vector<Location> locations, std::vector<TimeSlice> slices)
    : locations_(std::move(locations)), slices_(std::move(slices)) {
    for (std::size_t i = 1; i < locations_.size(); ++i) {
        if (!(locations_[i - 1].id < locations_[i].id))
            throw std::invalid_argument("location ids must be unique and sorted");
    }
    for (const auto& loc : locations_) {
        if (!std::isfinite(loc.x) || !std::isfinite(loc.y))
            throw std::invalid_argument("non-finite coordinate for '" + loc.id + "'");
    }
    for (std::size_t s = 0; s < slices_.size(); ++s) {
        const auto& slice = slices_[s];
        if (s > 0 && slices_[s - 1].t >= slice.t)
            throw std::invalid_argument("slot indices must be strictly increasing");
        if (slice.members.empty()) throw std::invalid_argument("empty time slice");
        for (std::size_t i = 0; i < slice.members.size(); ++i) {
            const auto& m = slice.members[i];
            if (m.t != slice.t) throw std::invalid_argument("member slot differs from slice slot");
            if (m.location >= locations_.size()) throw std::invalid_argument("unknown location index");
            if (!std::isfinite(m.value)) throw std::invalid_argument("non-finite reading");
            if (i > 0 && slice.members[i - 1].location >= m.location)
                throw std::invalid_argument("slice members must be sorted and distinct");
        }
    }
}

Dataset Dataset::from_rows(std::span<const ObservationRow> rows) {
    if (rows.empty()) throw EmptyDataset();

    std::map<std::string, std::pair<double, double>> coords;
    for (const auto& row : rows) {
        auto [it, inserted] = coords.emplace(row.location_id, std::make_pair(row.lon, row.lat));
        if (!inserted && (it->second.first != row.lon || it->second.second != row.lat))
            throw InconsistentCoordinates(row.location_id);
    }

    std::vector<Location> locations;
    locations.reserve(coords.size());
    std::unordered_map<std::string, LocationIndex> index;
    for (const auto& [id, xy] : coords) {
        index.emplace(id, static_cast<LocationIndex>(locations.size()));
        locations.push_back({id, xy.first, xy.second});
    }

    std::map<SlotIndex, std::vector<Observation>> grouped;
    for (const auto& row : rows) {
        grouped[row.t].push_back({index.at(row.location_id), row.t, row.value});
    }

    std::vector<TimeSlice> slices;
    slices.reserve(grouped.size());
    for (auto& [t, members] : grouped) {
        std::sort(members.begin(), members.end(),
                  [](const Observation& a, const Observation& b) { return a.location < b.location; });
        for (std::size_t i = 1; i < members.size(); ++i) {
            if (members[i - 1].location == members[i].location)
                throw DuplicateObservation(locations[members[i].location].id, t);
        }
        slices.push_back({t, std::move(members)});
    }
    return Dataset(std::move(locations), std::move(slices));
}

std::optional<LocationIndex> Dataset::find_location(std::string_view id) const {
    auto it = std::lower_bound(locations_.begin(), locations_.end(), id,
                               [](const Location& loc, std::string_view key) { return loc.id < key; });
    if (it == locations_.end() || it->id != id) return std::nullopt;
    return static_cast<LocationIndex>(it - locations_.begin());
}

const TimeSlice& Dataset::slice(SlotIndex t) const {
    auto it = std::lower_bound(slices_.begin(), slices_.end(), t,
                               [](const TimeSlice& s, SlotIndex key) { return s.t < key; });
    if (it == slices_.end() || it->t != t) throw MissingSlot(t);
    return *it;
}

std::size_t Dataset::observation_count() const noexcept {
    std::size_t n = 0;
    for (const auto& s : slices_) n += s.members.size();
    return n;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        auto comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

template <typename T>
T parse_number(std::string_view text, std::size_t line_no, const char* field) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
        throw MalformedRow(line_no, std::string("cannot parse ") + field + " from '" + std::string(text) + "'");
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(value)) throw MalformedRow(line_no, std::string(field) + " is not finite");
    }
    return value;
}

} // namespace

Dataset parse_observations(std::string_view csv_text) {
    constexpr std::string_view kHeader = "location_id,lon,lat,t,value";

    std::vector<ObservationRow> rows;
    std::size_t line_no = 0;
    bool seen_header = false;
    std::size_t pos = 0;
    while (pos <= csv_text.size()) {
        auto nl = csv_text.find('\n', pos);
        auto line = csv_text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? csv_text.size() + 1 : nl + 1;
        ++line_no;

        line = trim(line);
        if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.remove_prefix(3);
        if (!seen_header) {
            if (line != kHeader)
                throw MalformedRow(line_no, "expected header '" + std::string(kHeader) + "'");
            seen_header = true;
            continue;
        }
        if (line.empty()) continue;

        auto fields = split_fields(line);
        if (fields.size() != 5)
            throw MalformedRow(line_no, "expected 5 fields, got " + std::to_string(fields.size()));
        ObservationRow row;
        row.location_id = std::string(trim(fields[0]));
        if (row.location_id.empty()) throw MalformedRow(line_no, "empty location_id");
        row.lon = parse_number<double>(fields[1], line_no, "lon");
        row.lat = parse_number<double>(fields[2], line_no, "lat");
        row.t = parse_number<SlotIndex>(fields[3], line_no, "t");
        row.value = parse_number<double>(fields[4], line_no, "value");
        rows.push_back(std::move(row));
    }
    if (!seen_header) throw MalformedRow(1, "missing header");
    return Dataset::from_rows(rows);
}

std::string format_real(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) throw std::runtime_error("cannot format real");
    return std::string(buf, ptr);
}

std::string to_csv(const Dataset& dataset) {
    std::string out = "location_id,lon,lat,t,value\n";
    std::vector<std::string> coord_text;
    coord_text.reserve(dataset.locations().size());
    for (const auto& loc : dataset.locations())
        coord_text.push_back(loc.id + "," + format_real(loc.x) + "," + format_real(loc.y) + ",");
    for (const auto& slice : dataset.slices()) {
        const auto t_text = std::to_string(slice.t);
        for (const auto& m : slice.members) {
            out += coord_text[m.location];
            out += t_text;
            out += ',';
            out += format_real(m.value);
            out += '\n';
        }
    }
    return out;
}

Dataset rebin(const Dataset& dataset, SlotIndex width) {
    if (width < 1) throw ConfigInvalid("bin width must be >= 1");
    if (width == 1) return dataset;

    auto floor_div = [width](SlotIndex t) {
        SlotIndex q = t / width;
        if ((t % width != 0) && (t < 0)) --q;
        return q;
    };

    std::map<SlotIndex, std::map<LocationIndex, std::pair<double, std::size_t>>> bins;
    for (const auto& slice : dataset.slices()) {
        auto& bin = bins[floor_div(slice.t)];
        for (const auto& m : slice.members) {
            auto& acc = bin[m.location];
            acc.first += m.value;
            acc.second += 1;
        }
    }
    std::vector<TimeSlice> slices;
    for (const auto& [t, members] : bins) {
        TimeSlice slice{t, {}};
        for (const auto& [loc, acc] : members)
            slice.members.push_back({loc, t, acc.first / static_cast<double>(acc.second)});
        slices.push_back(std::move(slice));
    }
    return Dataset(dataset.locations(), std::move(slices));
}

} // namespace stregion
