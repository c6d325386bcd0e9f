#pragma once

#include "sslearn/search.hpp"
#include "sslearn/simulator.hpp"
#include "sslearn/types.hpp"

#include <nlohmann/json_fwd.hpp>

#include <iosfwd>
#include <string>

namespace sslearn {

// CSV dialect: comma-separated, mandatory header row, '.' decimal point,
// UTF-8, no thousands separators. Doubles are written with enough digits
// to round-trip exactly.

TimeSeriesFrame read_frame_csv(std::istream& in);
TimeSeriesFrame read_frame_csv_file(const std::string& path);
void write_frame_csv(std::ostream& out, const TimeSeriesFrame& frame);
void write_frame_csv_file(const std::string& path, const TimeSeriesFrame& frame);

/// Deterministic double formatting used by every CSV/JSON writer.
std::string format_double(double v);

nlohmann::json partition_to_json(const StatePartition& part);
StatePartition partition_from_json(const nlohmann::json& j);

nlohmann::json params_to_json(const StateSpaceParams& params);
StateSpaceParams params_from_json(const nlohmann::json& j);

nlohmann::json sim_config_to_json(const SimConfig& cfg);
SimConfig sim_config_from_json(const nlohmann::json& j);

nlohmann::json validity_report_to_json(const ValidityReport& report);

/// AR(1) detrending: each column is replaced by the residuals of its own
/// first-order autoregression (with intercept), then mean-centered.
/// Output has T-1 rows. Constant columns are a DataError.
TimeSeriesFrame ar1_detrend(const TimeSeriesFrame& frame);

/// SHA-256 of a file's bytes, lowercase hex. Throws DataError on I/O failure.
std::string sha256_file(const std::string& path);

}  // namespace sslearn
