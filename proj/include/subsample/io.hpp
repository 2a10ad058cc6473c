// Signal containers (.smx, CSV, PGM directories) and mask JSON persistence.
//
// .smx layout: one JSON header line {"p":..,"m":..,"dims":[rows,cols]|null,"dtype":"f64le"}
// terminated by '\n', followed by m*p little-endian doubles, signal-major.
#ifndef SUBSAMPLE_IO_HPP
#define SUBSAMPLE_IO_HPP

#include "subsample/core.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace subsample {

enum class SignalFormat { Smx, Csv, PgmDir };

SignalFormat parse_signal_format(const std::string& name);
/// Directory -> pgm-dir, *.csv -> csv, anything else -> smx.
SignalFormat infer_signal_format(const std::string& path);

/// Raw (unnormalized) signals with optional 2D shape.
struct RawSignals {
  std::vector<Eigen::VectorXd> rows;
  std::optional<Dims2> dims;
};

RawSignals read_raw_signals(const std::string& path, SignalFormat format);
void write_smx(const std::string& path, const RawSignals& data);

struct LoadStats {
  std::size_t skipped_zero = 0;
};

/// Reads and normalizes; zero signals are skipped and counted.
TrainingSet load_signals(const std::string& path, SignalFormat format, LoadStats* stats = nullptr);
TrainingSet load_signals(const std::string& path);

nlohmann::json to_json(const IndexSet& s);
/// Throws ParseError on malformed JSON and InvariantViolation on bad contents.
IndexSet index_set_from_json(const nlohmann::json& j);

void save_index_set(const std::string& path, const IndexSet& s);
IndexSet load_index_set(const std::string& path);

}  // namespace subsample

#endif  // SUBSAMPLE_IO_HPP
