#include "loadshare/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string_view>
#include <system_error>
#include <utility>

#include "loadshare/errors.hpp"

namespace loadshare {

namespace {

// 90% central band half-width in standard deviations.
constexpr double kZ90 = 1.6448536269514722;

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError(path + ": cannot open for writing");
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(path + ": cannot open for reading");
    return in;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

bool parse_ll(std::string_view s, long long& out) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_double(std::string_view s, double& out) {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

std::string where(const std::string& path, std::size_t line_no) {
    return path + ":" + std::to_string(line_no);
}

// Reads nonempty lines (header first), stripping a trailing '\r' so CRLF
// files parse too.
class LineReader {
public:
    explicit LineReader(std::ifstream& in) : in_(in) {}

    bool next(std::string& line, std::size_t& line_no) {
        while (std::getline(in_, line)) {
            ++count_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            line_no = count_;
            return true;
        }
        return false;
    }

private:
    std::ifstream& in_;
    std::size_t count_ = 0;
};

void expect_header(LineReader& reader, const std::string& path,
                   std::string_view expected) {
    std::string line;
    std::size_t line_no = 0;
    if (!reader.next(line, line_no) || line != expected)
        throw DataError(path + ": expected header '" + std::string(expected) +
                        "'");
}

std::string members_string(Coalition t) {
    std::string out;
    for (int player : t.members()) {
        if (!out.empty()) out += '|';
        out += std::to_string(player);
    }
    return out;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

LoadMatrix ingest_profiles(const std::string& path, int customers) {
    if (customers < 1) throw DataError("ingest_profiles: customers must be at least 1");
    std::ifstream in = open_in(path);
    LineReader reader(in);
    expect_header(reader, path, "timestep,customer_id,load_kwh");

    struct Row {
        long long t;
        long long c;
        double load;
    };
    std::vector<Row> rows;
    std::string line;
    std::size_t line_no = 0;
    while (reader.next(line, line_no)) {
        const auto fields = split_fields(line);
        if (fields.size() != 3)
            throw DataError(where(path, line_no) + ": expected 3 fields, got " +
                            std::to_string(fields.size()));
        Row row{};
        if (!parse_ll(fields[0], row.t) || row.t < 0)
            throw DataError(where(path, line_no) +
                            ": timestep must be a nonnegative integer");
        if (!parse_ll(fields[1], row.c))
            throw DataError(where(path, line_no) +
                            ": customer_id must be an integer");
        if (row.c < 1 || row.c > customers)
            throw DataError(where(path, line_no) + ": customer_id " +
                            std::to_string(row.c) + " outside [1, " +
                            std::to_string(customers) + "]");
        if (!parse_double(fields[2], row.load) || !std::isfinite(row.load))
            throw DataError(where(path, line_no) +
                            ": load_kwh must be a finite number");
        if (row.load < 0.0)
            throw DataError(where(path, line_no) + ": negative load " +
                            format_double(row.load) + " for customer " +
                            std::to_string(row.c) + " at timestep " +
                            std::to_string(row.t));
        rows.push_back(row);
    }
    if (rows.empty()) throw DataError(path + ": no data rows");

    // horizon comes from the largest timestep; every (t, c) cell must then
    // appear exactly once
    long long horizon = 0;
    for (const Row& row : rows) horizon = std::max(horizon, row.t + 1);
    if (horizon > 100'000'000)
        throw DataError(path + ": timestep " + std::to_string(horizon - 1) +
                        " exceeds the supported horizon");

    auto cell_error = [&](const char* what, long long cell) {
        return DataError(path + ": " + what + " entry for (timestep " +
                         std::to_string(cell / customers) + ", customer " +
                         std::to_string(cell % customers + 1) + ")");
    };
    std::vector<long long> keys;
    keys.reserve(rows.size());
    for (const Row& row : rows)
        keys.push_back(row.t * customers + (row.c - 1));
    std::sort(keys.begin(), keys.end());
    for (std::size_t k = 0; k < keys.size(); ++k) {
        if (k > 0 && keys[k] == keys[k - 1]) throw cell_error("duplicate", keys[k]);
        // keys are distinct and sorted, so the first one above its index
        // marks the first absent cell
        if (keys[k] != static_cast<long long>(k))
            throw cell_error("missing", static_cast<long long>(k));
    }
    if (keys.size() != static_cast<std::size_t>(horizon) * customers)
        throw cell_error("missing", static_cast<long long>(keys.size()));

    LoadMatrix loads(static_cast<std::size_t>(horizon),
                     std::vector<double>(customers, 0.0));
    for (const Row& row : rows) loads[row.t][row.c - 1] = row.load;
    return loads;
}

void write_profiles_csv(const std::string& path, const LoadMatrix& profiles) {
    std::ofstream out = open_out(path);
    out << "timestep,customer_id,load_kwh\n";
    for (std::size_t t = 0; t < profiles.size(); ++t)
        for (std::size_t c = 0; c < profiles[t].size(); ++c)
            out << t << ',' << (c + 1) << ',' << format_double(profiles[t][c])
                << '\n';
    if (!out) throw DataError(path + ": write failed");
}

ValueTable read_value_table(const std::string& path) {
    std::ifstream in = open_in(path);
    LineReader reader(in);
    expect_header(reader, path, "mask,members,value");

    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> members_cols;
    std::vector<long long> masks;
    std::vector<double> values;
    std::vector<std::size_t> lines;
    while (reader.next(line, line_no)) {
        const auto fields = split_fields(line);
        if (fields.size() != 3)
            throw DataError(where(path, line_no) + ": expected 3 fields, got " +
                            std::to_string(fields.size()));
        long long mask = 0;
        double value = 0.0;
        if (!parse_ll(fields[0], mask) || mask < 0)
            throw DataError(where(path, line_no) +
                            ": mask must be a nonnegative integer");
        if (!parse_double(fields[2], value) || !std::isfinite(value))
            throw DataError(where(path, line_no) +
                            ": value must be a finite number");
        masks.push_back(mask);
        members_cols.emplace_back(fields[1]);
        values.push_back(value);
        lines.push_back(line_no);
    }
    if (masks.empty()) throw DataError(path + ": no data rows");

    // row count fixes the player count: 2^n masks for n players
    int player_count = 0;
    while ((1ull << player_count) < masks.size()) ++player_count;
    if ((1ull << player_count) != masks.size() || player_count < 1 ||
        player_count > Coalition::kMaxPlayers)
        throw DataError(path + ": row count " + std::to_string(masks.size()) +
                        " is not 2^n for a supported player count");

    ValueTable table(player_count);
    std::vector<char> seen(masks.size(), 0);
    for (std::size_t i = 0; i < masks.size(); ++i) {
        if (masks[i] >= static_cast<long long>(masks.size()))
            throw DataError(where(path, lines[i]) + ": mask " +
                            std::to_string(masks[i]) + " outside [0, " +
                            std::to_string(masks.size() - 1) + "]");
        if (seen[masks[i]])
            throw DataError(where(path, lines[i]) + ": duplicate mask " +
                            std::to_string(masks[i]));
        seen[masks[i]] = 1;
        const Coalition t(static_cast<std::uint32_t>(masks[i]));
        if (members_cols[i] != members_string(t))
            throw DataError(where(path, lines[i]) +
                            ": members column does not match mask " +
                            std::to_string(masks[i]));
        if (!t.has_retailer()) {
            if (values[i] != 0.0)
                throw DataError(where(path, lines[i]) +
                                ": coalition without the retailer must have "
                                "value 0");
        } else {
            table.set_value(t, values[i]);
        }
    }
    return table;
}

void write_value_table_csv(const std::string& path, const ValueTable& table) {
    std::ofstream out = open_out(path);
    out << "mask,members,value\n";
    for (std::uint32_t mask = 0; mask < table.size(); ++mask) {
        const Coalition t(mask);
        out << mask << ',' << members_string(t) << ','
            << format_double(table.value(t)) << '\n';
    }
    if (!out) throw DataError(path + ": write failed");
}

void write_allocations_csv(const std::string& path,
                           const std::vector<TimestepResult>& results) {
    std::ofstream out = open_out(path);
    out << "timestep,player,method,payoff\n";
    for (const TimestepResult& r : results)
        for (const auto& [method, allocation] : r.allocations)
            for (std::size_t player = 0; player < allocation.x.size(); ++player)
                out << r.timestep << ',' << player << ',' << to_string(method)
                    << ',' << format_double(allocation.x[player]) << '\n';
    if (!out) throw DataError(path + ": write failed");
}

void write_aggregate_csv(const std::string& path,
                         const AggregateReport& report) {
    std::ofstream out = open_out(path);
    out << "player,method,total_payoff,share_or_savings\n";
    for (const MethodAggregate& ma : report.per_method) {
        for (std::size_t player = 0; player < ma.total_payoff.size();
             ++player) {
            const double share_or_savings =
                player == 0 ? (ma.retailer_share_defined ? ma.retailer_share
                                                         : 0.0)
                            : ma.customer_savings[player - 1];
            out << player << ',' << to_string(ma.method) << ','
                << format_double(ma.total_payoff[player]) << ','
                << format_double(share_or_savings) << '\n';
        }
    }
    if (!out) throw DataError(path + ": write failed");
}

void write_forecast_band_csv(const std::string& path,
                             const std::vector<TimestepResult>& results) {
    std::ofstream out = open_out(path);
    out << "timestep,mean_nodata,lo90_nodata,hi90_nodata,mean_data,lo90_data,"
           "hi90_data\n";
    for (const TimestepResult& r : results) {
        const double s0 = r.forecast_nodata.stddev();
        const double s1 = r.forecast_data.stddev();
        out << r.timestep << ',' << format_double(r.forecast_nodata.mean)
            << ',' << format_double(r.forecast_nodata.mean - kZ90 * s0) << ','
            << format_double(r.forecast_nodata.mean + kZ90 * s0) << ','
            << format_double(r.forecast_data.mean) << ','
            << format_double(r.forecast_data.mean - kZ90 * s1) << ','
            << format_double(r.forecast_data.mean + kZ90 * s1) << '\n';
    }
    if (!out) throw DataError(path + ": write failed");
}

void write_method_comparison_csv(const std::string& path,
                                 const MethodComparison& comparison) {
    std::ofstream out = open_out(path);
    out << "arm,sample_index,profit\n";
    for (const ArmSummary& arm : comparison.arms)
        for (std::size_t j = 0; j < arm.samples.size(); ++j)
            out << arm.name << ',' << j << ','
                << format_double(arm.samples[j]) << '\n';
    if (!out) throw DataError(path + ": write failed");
}

}  // namespace loadshare
