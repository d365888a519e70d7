// csv_io.hpp: file formats: load-profile ingestion, value-table round trip,
// and the report CSVs. Numbers are written in shortest round-trip form, so a
// rerun with the same inputs reproduces every file byte for byte.

#pragma once

#include <string>
#include <vector>

#include "loadshare/coalition.hpp"
#include "loadshare/sim.hpp"

namespace loadshare {

// Shortest decimal that parses back to exactly v.
std::string format_double(double v);

// Reads `timestep,customer_id,load_kwh` rows into a horizon x customers
// matrix. The grid must be complete: every (timestep, customer) exactly once,
// timesteps 0-based and contiguous. Throws DataError naming the offending
// line or (timestep, customer) cell.
LoadMatrix ingest_profiles(const std::string& path, int customers);

void write_profiles_csv(const std::string& path, const LoadMatrix& profiles);

// Characteristic-function table as `mask,members,value`, one row per mask.
// Reading infers the player count from the row count and requires the
// members column to match the mask.
ValueTable read_value_table(const std::string& path);
void write_value_table_csv(const std::string& path, const ValueTable& table);

void write_allocations_csv(const std::string& path,
                           const std::vector<TimestepResult>& results);
void write_aggregate_csv(const std::string& path,
                         const AggregateReport& report);
void write_forecast_band_csv(const std::string& path,
                             const std::vector<TimestepResult>& results);
void write_method_comparison_csv(const std::string& path,
                                 const MethodComparison& comparison);

}  // namespace loadshare
