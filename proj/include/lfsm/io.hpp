#pragma once

#include "lfsm/estimation.hpp"
#include "lfsm/evaluation.hpp"
#include "lfsm/forecast.hpp"
#include "lfsm/model.hpp"

#include <json.hpp>

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace lfsm {

// CSV reader for evenly spaced series. Accepts either "time,value" rows or a
// single value column; an optional header line is detected by its first
// field not parsing as a number. Timestamps must be strictly increasing and
// evenly spaced to 1e-6 relative; violations are reported with their row
// number. dt_override supplies the spacing for single-column input (default
// 1.0) and must not be combined with a time column that disagrees.
TimeSeries ingest_csv(std::istream& in, double dt_override = 0.0);
TimeSeries ingest_csv_file(const std::string& path, double dt_override = 0.0);

// Writers. Floating-point values are printed with %.12g, which round-trips
// the digits the numerics are good for without drowning diffs in noise.
std::string format_g12(double x);
void emit_series_csv(const TimeSeries& ts, std::ostream& out);
void emit_study_csv(std::span<const StudyRow> rows, std::ostream& out);
void emit_backtest_csv(const BacktestReport& rep, std::ostream& out);
void emit_frontier_csv(std::span<const FrontierCell> cells, std::ostream& out);

nlohmann::json forecast_to_json(const ForecastResult& r);
nlohmann::json estimation_to_json(const EstimationResult& r);
nlohmann::json backtest_summary_json(const BacktestReport& rep);

// One-line JSON error record for standard error.
std::string error_record(const std::string& type, const std::string& message);

}  // namespace lfsm
