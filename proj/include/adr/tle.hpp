#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "adr/astro.hpp"

namespace adr {

/// Fields decoded from one two-line element set. Angles are stored in
/// radians; mean motion stays in rev/day as published.
struct TleRecord {
    std::string name;
    int norad_id = 0;
    int epoch_year = 0;      // full year (e.g. 2023)
    double epoch_day = 0.0;  // fractional day of year, 1.0 = Jan 1 00:00
    double inclination = 0.0;
    double raan = 0.0;
    double eccentricity = 0.0;
    double argp = 0.0;
    double mean_anomaly = 0.0;
    double mean_motion = 0.0;  // rev/day
};

struct DatasetSplit {
    std::vector<TleRecord> train;
    std::vector<TleRecord> test;
    std::vector<TleRecord> eval;
    std::uint64_t seed = 0;
};

/// Modulo-10 checksum over the first 68 columns: digits count their value,
/// '-' counts one.
int tle_checksum(const std::string& line);

/// Decode a name line plus the two 69-column element lines. Checksums are
/// verified; malformed fields raise ParseError with line and column.
TleRecord parse_tle(const std::string& name_line, const std::string& line1,
                    const std::string& line2);

/// Re-encode a record as (name, line1, line2) with recomputed checksums.
/// Drag and derivative fields that the record does not carry are zeroed.
std::array<std::string, 3> format_tle(const TleRecord& rec);

/// Parse a concatenation of 3-line entries (name + line1 + line2).
std::vector<TleRecord> parse_tle_file(std::istream& in);
std::vector<TleRecord> parse_tle_file(const std::string& path);

void write_tle_file(const std::string& path, const std::vector<TleRecord>& records);

/// TLE epoch as absolute seconds on a fixed civil timeline (no leap seconds).
double tle_epoch_seconds(const TleRecord& rec);

/// Earliest epoch across the set; mission-elapsed time is measured from it.
double reference_epoch_seconds(const std::vector<TleRecord>& records);

/// Mean elements read as osculating two-body elements. `reference_s` is the
/// scenario reference instant from reference_epoch_seconds. Sets
/// *suspect_low_perigee when the orbit dips below the Earth's surface.
KeplerianElements tle_to_elements(const TleRecord& rec, const GravParams& grav,
                                  double reference_s = 0.0,
                                  bool* suspect_low_perigee = nullptr);

/// Seeded 70/15/15 partition; train and test sizes round down, the
/// remainder goes to eval.
DatasetSplit split_dataset(const std::vector<TleRecord>& records, std::uint64_t seed);

/// Normalized element dump, one CSV row per object:
/// name,norad_id,a_km,e,i_rad,raan_rad,argp_rad,nu_rad,epoch_s
void write_elements_csv(std::ostream& out, const std::vector<TleRecord>& records,
                        const GravParams& grav);

}  // namespace adr
