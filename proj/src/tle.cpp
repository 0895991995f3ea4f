#include "adr/tle.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "adr/errors.hpp"
#include "adr/rng.hpp"

namespace adr {

namespace {

constexpr double kDegToRad = M_PI / 180.0;
constexpr double kEarthRadiusKm = 6378.0;

// Days from 1970-01-01 to Jan 1 of `year` (proleptic Gregorian).
std::int64_t days_to_year_start(int year) {
    const auto civil_days = [](int y, int m, int d) -> std::int64_t {
        y -= m <= 2;
        const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
        const unsigned yoe = static_cast<unsigned>(y - era * 400);
        const unsigned doy = (153u * (static_cast<unsigned>(m) + (m > 2 ? -3 : 9)) + 2u) / 5u +
                             static_cast<unsigned>(d) - 1u;
        const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
        return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
    };
    return civil_days(year, 1, 1);
}

// Fixed-column field accessor; col1/col2 are 1-based inclusive.
std::string field(const std::string& line, int col1, int col2) {
    return line.substr(static_cast<std::size_t>(col1 - 1),
                       static_cast<std::size_t>(col2 - col1 + 1));
}

double parse_double_field(const std::string& line, int line_no, int col1, int col2) {
    const std::string text = field(line, col1, col2);
    std::size_t pos = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &pos);
    } catch (const std::exception&) {
        throw ParseError("unparseable numeric field '" + text + "'", line_no, col1);
    }
    // allow trailing blanks only
    for (std::size_t i = pos; i < text.size(); ++i) {
        if (!std::isspace(static_cast<unsigned char>(text[i]))) {
            throw ParseError("unparseable numeric field '" + text + "'", line_no, col1);
        }
    }
    return value;
}

int parse_int_field(const std::string& line, int line_no, int col1, int col2) {
    const std::string text = field(line, col1, col2);
    try {
        return std::stoi(text);
    } catch (const std::exception&) {
        throw ParseError("unparseable integer field '" + text + "'", line_no, col1);
    }
}

void check_line(const std::string& line, int line_no, char expected_tag) {
    if (line.size() != 69) {
        throw ParseError("element line must be 69 characters, got " +
                             std::to_string(line.size()),
                         line_no, static_cast<int>(line.size()) + 1);
    }
    if (line[0] != expected_tag || line[1] != ' ') {
        throw ParseError(std::string("expected line to start with '") + expected_tag + " '",
                         line_no, 1);
    }
    const int stated = line[68] - '0';
    if (stated < 0 || stated > 9 || tle_checksum(line) != stated) {
        throw ParseError("checksum mismatch", line_no, 69);
    }
}

}  // namespace

int tle_checksum(const std::string& line) {
    int sum = 0;
    const std::size_t limit = std::min<std::size_t>(line.size(), 68);
    for (std::size_t i = 0; i < limit; ++i) {
        const char c = line[i];
        if (c >= '0' && c <= '9') sum += c - '0';
        if (c == '-') sum += 1;
    }
    return sum % 10;
}

TleRecord parse_tle(const std::string& name_line, const std::string& line1,
                    const std::string& line2) {
    check_line(line1, 1, '1');
    check_line(line2, 2, '2');

    TleRecord rec;
    // trim the 24-character name field
    const auto end = name_line.find_last_not_of(" \t\r\n");
    rec.name = end == std::string::npos ? std::string{} : name_line.substr(0, end + 1);

    rec.norad_id = parse_int_field(line1, 1, 3, 7);
    const int yy = parse_int_field(line1, 1, 19, 20);
    rec.epoch_year = yy >= 57 ? 1900 + yy : 2000 + yy;  // catalog convention
    rec.epoch_day = parse_double_field(line1, 1, 21, 32);

    const int norad2 = parse_int_field(line2, 2, 3, 7);
    if (norad2 != rec.norad_id) {
        throw ParseError("catalog number differs between lines", 2, 3);
    }
    rec.inclination = parse_double_field(line2, 2, 9, 16) * kDegToRad;
    rec.raan = parse_double_field(line2, 2, 18, 25) * kDegToRad;
    rec.eccentricity = parse_double_field(line2, 2, 27, 33) * 1e-7;  // implied "0."
    rec.argp = parse_double_field(line2, 2, 35, 42) * kDegToRad;
    rec.mean_anomaly = parse_double_field(line2, 2, 44, 51) * kDegToRad;
    rec.mean_motion = parse_double_field(line2, 2, 53, 63);

    if (!(rec.eccentricity >= 0.0 && rec.eccentricity < 1.0)) {
        throw ParseError("eccentricity out of [0,1)", 2, 27);
    }
    if (!(rec.mean_motion > 0.0)) {
        throw ParseError("mean motion must be positive", 2, 53);
    }
    return rec;
}

std::array<std::string, 3> format_tle(const TleRecord& rec) {
    const double rad_to_deg = 180.0 / M_PI;
    char l1[70], l2[70];
    std::snprintf(l1, sizeof l1, "1 %05dU 00000A   %02d%012.8f  .00000000  00000-0  00000-0 0    0",
                  rec.norad_id, rec.epoch_year % 100, rec.epoch_day);
    std::snprintf(l2, sizeof l2, "2 %05d %8.4f %8.4f %07d %8.4f %8.4f %11.8f    0",
                  rec.norad_id, rec.inclination * rad_to_deg, rec.raan * rad_to_deg,
                  static_cast<int>(std::llround(rec.eccentricity * 1e7)),
                  rec.argp * rad_to_deg, rec.mean_anomaly * rad_to_deg, rec.mean_motion);
    std::string line1(l1), line2(l2);
    line1[68] = static_cast<char>('0' + tle_checksum(line1));
    line2[68] = static_cast<char>('0' + tle_checksum(line2));
    return {rec.name, line1, line2};
}

std::vector<TleRecord> parse_tle_file(std::istream& in) {
    std::vector<TleRecord> records;
    std::string line;
    std::vector<std::string> pending;
    const auto strip_cr = [](std::string& s) {
        if (!s.empty() && s.back() == '\r') s.pop_back();
    };
    while (std::getline(in, line)) {
        strip_cr(line);
        if (pending.empty() && line.find_first_not_of(" \t") == std::string::npos) continue;
        pending.push_back(line);
        if (pending.size() == 3) {
            records.push_back(parse_tle(pending[0], pending[1], pending[2]));
            pending.clear();
        }
    }
    if (!pending.empty()) {
        throw ParseError("truncated entry at end of file",
                         static_cast<int>(pending.size()), 1);
    }
    return records;
}

std::vector<TleRecord> parse_tle_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open TLE file: " + path);
    return parse_tle_file(in);
}

void write_tle_file(const std::string& path, const std::vector<TleRecord>& records) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open for writing: " + path);
    for (const auto& rec : records) {
        const auto lines = format_tle(rec);
        out << lines[0] << '\n' << lines[1] << '\n' << lines[2] << '\n';
    }
}

double tle_epoch_seconds(const TleRecord& rec) {
    return (static_cast<double>(days_to_year_start(rec.epoch_year)) + rec.epoch_day - 1.0) *
           86400.0;
}

double reference_epoch_seconds(const std::vector<TleRecord>& records) {
    if (records.empty()) throw InsufficientDataError("no records for reference epoch");
    double ref = tle_epoch_seconds(records.front());
    for (const auto& rec : records) ref = std::min(ref, tle_epoch_seconds(rec));
    return ref;
}

KeplerianElements tle_to_elements(const TleRecord& rec, const GravParams& grav,
                                  double reference_s, bool* suspect_low_perigee) {
    const double period_s = 86400.0 / rec.mean_motion;
    const double ratio = period_s / (2.0 * M_PI);
    const double a = std::cbrt(grav.mu * ratio * ratio);

    KeplerianElements elems;
    elems.a = a;
    elems.e = rec.eccentricity;
    elems.i = rec.inclination;
    elems.raan = wrap_two_pi(rec.raan);
    elems.argp = wrap_two_pi(rec.argp);
    elems.nu = mean_to_true_anomaly(rec.mean_anomaly, rec.eccentricity);
    elems.epoch = tle_epoch_seconds(rec) - reference_s;

    if (suspect_low_perigee != nullptr) {
        *suspect_low_perigee = a * (1.0 - rec.eccentricity) < kEarthRadiusKm;
    }
    return elems;
}

DatasetSplit split_dataset(const std::vector<TleRecord>& records, std::uint64_t seed) {
    const std::size_t n = records.size();
    if (n < 3) throw InsufficientDataError("need at least 3 records to split");

    std::vector<int> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
    Rng rng(seed);
    rng.shuffle(order);

    const std::size_t n_train = n * 70 / 100;  // floor(0.70 n) exactly
    const std::size_t n_test = n * 15 / 100;   // floor(0.15 n)

    DatasetSplit split;
    split.seed = seed;
    for (std::size_t i = 0; i < n; ++i) {
        const TleRecord& rec = records[static_cast<std::size_t>(order[i])];
        if (i < n_train) {
            split.train.push_back(rec);
        } else if (i < n_train + n_test) {
            split.test.push_back(rec);
        } else {
            split.eval.push_back(rec);
        }
    }
    return split;
}

void write_elements_csv(std::ostream& out, const std::vector<TleRecord>& records,
                        const GravParams& grav) {
    const double ref = reference_epoch_seconds(records);
    out << "name,norad_id,a_km,e,i_rad,raan_rad,argp_rad,nu_rad,epoch_s\n";
    char buf[256];
    for (const auto& rec : records) {
        const KeplerianElements el = tle_to_elements(rec, grav, ref);
        std::snprintf(buf, sizeof buf, "%s,%d,%.6f,%.9f,%.9f,%.9f,%.9f,%.9f,%.3f\n",
                      rec.name.c_str(), rec.norad_id, el.a, el.e, el.i, el.raan, el.argp,
                      el.nu, el.epoch);
        out << buf;
    }
}

}  // namespace adr
