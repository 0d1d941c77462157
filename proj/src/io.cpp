#include "lfsm/io.hpp"

#include "lfsm/errors.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>

namespace lfsm {

namespace {

bool parse_double(const std::string& field, double* out) {
  const char* s = field.c_str();
  char* end = nullptr;
  const double v = std::strtod(s, &end);
  if (end == s) return false;
  while (*end == ' ' || *end == '\t' || *end == '\r') ++end;
  if (*end != '\0') return false;
  *out = v;
  return true;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') { fields.push_back(cur); cur.clear(); }
    else if (c != '\r') cur += c;
  }
  fields.push_back(cur);
  return fields;
}

[[noreturn]] void row_error(std::size_t row, const std::string& why) {
  throw InputError("csv row " + std::to_string(row) + ": " + why);
}

}  // namespace

TimeSeries ingest_csv(std::istream& in, double dt_override) {
  std::string line;
  std::size_t row = 0;
  bool saw_data = false;
  bool has_time_col = false;
  std::vector<double> times, values;

  while (std::getline(in, line)) {
    ++row;
    // Trim whitespace-only lines.
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv(line);
    if (fields.size() > 2)
      row_error(row, "expected one or two columns, got " +
                         std::to_string(fields.size()));

    double first = 0.0;
    if (!parse_double(fields[0], &first)) {
      if (!saw_data) continue;  // header line
      row_error(row, "cannot parse '" + fields[0] + "' as a number");
    }

    if (!saw_data) {
      saw_data = true;
      has_time_col = fields.size() == 2;
    } else if ((fields.size() == 2) != has_time_col) {
      row_error(row, "column count changed mid-file");
    }

    if (has_time_col) {
      double v = 0.0;
      if (!parse_double(fields[1], &v))
        row_error(row, "cannot parse '" + fields[1] + "' as a number");
      if (!std::isfinite(first) || !std::isfinite(v))
        row_error(row, "non-finite entry");
      times.push_back(first);
      values.push_back(v);
    } else {
      if (!std::isfinite(first)) row_error(row, "non-finite entry");
      values.push_back(first);
    }
  }

  if (values.size() < 2)
    throw InputError("csv: need at least two observations");

  TimeSeries ts;
  ts.values = std::move(values);
  if (has_time_col) {
    ts.t0 = times.front();
    const double dt = times[1] - times[0];
    if (!(dt > 0.0)) throw InputError("csv row 2: timestamps must increase");
    for (std::size_t i = 1; i < times.size(); ++i) {
      const double step = times[i] - times[i - 1];
      if (!(step > 0.0))
        row_error(i + 1, "timestamps must be strictly increasing");
      if (std::fabs(step - dt) > 1e-6 * std::fabs(dt))
        row_error(i + 1, "uneven spacing (" + format_g12(step) +
                             " vs " + format_g12(dt) + ")");
    }
    ts.dt = dt;
    if (dt_override > 0.0 && std::fabs(dt_override - dt) > 1e-9 * dt)
      throw InputError("csv: --dt disagrees with the file's time column");
  } else {
    ts.t0 = 0.0;
    ts.dt = dt_override > 0.0 ? dt_override : 1.0;
  }
  return ts;
}

TimeSeries ingest_csv_file(const std::string& path, double dt_override) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return ingest_csv(in, dt_override);
}

std::string format_g12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void emit_series_csv(const TimeSeries& ts, std::ostream& out) {
  out << "time,value\n";
  for (std::size_t i = 0; i < ts.size(); ++i)
    out << format_g12(ts.t0 + static_cast<double>(i) * ts.dt) << ','
        << format_g12(ts.values[i]) << '\n';
}

void emit_study_csv(std::span<const StudyRow> rows, std::ostream& out) {
  out << "alpha,hurst,d,hit_ratio,n_forecasts,exists\n";
  for (const auto& r : rows) {
    out << format_g12(r.alpha) << ',' << format_g12(r.hurst) << ',' << r.d
        << ',' << (std::isnan(r.hit) ? "nan" : format_g12(r.hit)) << ','
        << r.n_forecasts << ',' << (r.exists ? 1 : 0) << '\n';
  }
}

void emit_backtest_csv(const BacktestReport& rep, std::ostream& out) {
  out << "origin,alpha_hat,h_hat,sigma_hat,predicted_increment,"
         "forecast_sign,realized_sign,status\n";
  for (const auto& r : rep.rows) {
    out << r.origin << ',';
    if (r.status == "estimation_failed") {
      out << "nan,nan,nan,nan";
    } else {
      out << format_g12(r.alpha_hat) << ',' << format_g12(r.h_hat) << ','
          << format_g12(r.sigma_hat) << ','
          << (r.status == "ok" ? format_g12(r.predicted_increment) : "nan");
    }
    out << ',' << r.forecast_sign << ',' << r.realized_sign << ','
        << r.status << '\n';
  }
}

void emit_frontier_csv(std::span<const FrontierCell> cells,
                       std::ostream& out) {
  out << "alpha,hurst,exists,first_failure\n";
  for (const auto& c : cells) {
    std::string why = c.first_failure;
    for (auto& ch : why)
      if (ch == ',' || ch == '\n') ch = ';';
    out << format_g12(c.alpha) << ',' << format_g12(c.hurst) << ','
        << (c.exists ? 1 : 0) << ',' << why << '\n';
  }
}

nlohmann::json forecast_to_json(const ForecastResult& r) {
  return nlohmann::json{{"predicted", r.predicted},
                        {"predicted_increment", r.predicted_increment},
                        {"residual_scale", r.residual_scale},
                        {"method", r.method},
                        {"no_signal", r.no_signal},
                        {"innovations", r.innovations}};
}

nlohmann::json estimation_to_json(const EstimationResult& r) {
  auto fit = [](const RegressionFit& f) {
    return nlohmann::json{{"slope", f.slope},
                          {"intercept", f.intercept},
                          {"points_used", f.x_used.size()},
                          {"grid_dropped", f.grid_dropped}};
  };
  return nlohmann::json{{"alpha_hat", r.alpha_hat},
                        {"h_hat", r.h_hat},
                        {"sigma_hat", r.sigma_hat},
                        {"alpha_fit", fit(r.alpha_fit)},
                        {"h_fit", fit(r.h_fit)}};
}

nlohmann::json backtest_summary_json(const BacktestReport& rep) {
  nlohmann::json j{{"n_attempted", rep.n_attempted},
                   {"n_skipped", rep.n_skipped},
                   {"n_forecast_zero", rep.n_forecast_zero},
                   {"n_realized_zero", rep.n_realized_zero},
                   {"n_usable", rep.n_usable},
                   {"hits", rep.hits}};
  if (std::isnan(rep.hit)) j["hit_ratio"] = nullptr;
  else j["hit_ratio"] = rep.hit;
  return j;
}

std::string error_record(const std::string& type, const std::string& message) {
  return nlohmann::json{{"error", type}, {"message", message}}.dump();
}

}  // namespace lfsm
