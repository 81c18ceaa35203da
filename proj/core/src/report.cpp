#include "chipletsim/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cinttypes>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <map>

namespace csim {

namespace {

std::string fmt(const char* f, ...) {
  char buf[128];
  va_list args;
  va_start(args, f);
  vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

double to_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(what, "expected a number, got '" + s + "'");
  }
}

struct Frame {
  double width = 640, height = 400;
  double left = 70, right = 20, top = 30, bottom = 50;
  double plot_w() const { return width - left - right; }
  double plot_h() const { return height - top - bottom; }
  double x(double frac) const { return left + frac * plot_w(); }
  double y(double frac) const { return top + (1.0 - frac) * plot_h(); }
};

void svg_open(std::string& s, const Frame& f, const std::string& x_label,
              const std::string& y_label) {
  s += fmt("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
           "viewBox=\"0 0 %.0f %.0f\">\n",
           f.width, f.height, f.width, f.height);
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += fmt("<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>\n", f.x(0.0),
           f.y(0.0), f.x(1.0), f.y(0.0));
  s += fmt("<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"black\"/>\n", f.x(0.0),
           f.y(0.0), f.x(0.0), f.y(1.0));
  s += fmt("<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\" font-size=\"13\">%s</text>\n",
           f.x(0.5), f.height - 10.0, x_label.c_str());
  s += fmt("<text x=\"16\" y=\"%.2f\" text-anchor=\"middle\" font-size=\"13\" "
           "transform=\"rotate(-90 16 %.2f)\">%s</text>\n",
           f.y(0.5), f.y(0.5), y_label.c_str());
}

std::string axis_ticks(const Frame& f, double x_max, double y_max) {
  std::string s;
  s += fmt("<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"start\" font-size=\"11\">0</text>\n",
           f.x(0.0), f.y(0.0) + 16.0);
  s += fmt("<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"end\" font-size=\"11\">%.6g</text>\n",
           f.x(1.0), f.y(0.0) + 16.0, x_max);
  s += fmt("<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"end\" font-size=\"11\">%.6g</text>\n",
           f.x(0.0) - 4.0, f.y(1.0) + 4.0, y_max);
  return s;
}

}  // namespace

std::string format_ns(SimTime ticks) {
  return fmt("%" PRIu64 ".%03" PRIu64, ticks / 1000, ticks % 1000);
}

std::string latency_csv_text(const SystemSpec& spec, const RunReport& report) {
  std::string out = "flow_id,core_id,start_ns,end_ns,latency_ns\n";
  for (const FlowLatencyRecord& r : report.flows) {
    std::string core = "?";
    for (const FlowSpec& f : spec.workload.flows) {
      if (f.id == r.flow_id) {
        core = f.cluster + "#" + std::to_string(f.core);
        break;
      }
    }
    out += fmt("%" PRIu64 ",", r.flow_id) + core + "," + format_ns(r.start) + "," +
           format_ns(r.end) + "," + format_ns(r.end - r.start) + "\n";
  }
  return out;
}

std::string power_csv_text(const RunReport& report) {
  std::string out = "window_end_ns,component_id,instantaneous_mw,average_mw\n";
  for (const PowerSample& s : report.power) {
    out += format_ns(s.window_end) + "," + s.component_id +
           fmt(",%.6f,%.6f\n", s.instantaneous_mw, s.average_mw);
  }
  return out;
}

std::string summary_text(const SystemSpec& spec, const RunReport& report,
                         std::string_view source_label) {
  nlohmann::ordered_json j;
  j["source"] = std::string(source_label);
  j["seed"] = spec.workload.seed;
  j["config_hash"] = fmt("%016" PRIx64, spec_content_hash(spec));
  j["final_clock_ticks"] = report.final_clock;
  j["final_clock_s"] = ticks_to_seconds(report.final_clock);
  j["events_processed"] = report.stats.events_processed;
  j["groups_executed"] = report.counters.groups_executed;
  j["transactions"] = {{"issued", report.counters.transactions_issued},
                       {"completed", report.counters.transactions_completed}};
  j["messages"] = {{"injected", report.counters.messages_injected},
                   {"delivered", report.counters.messages_delivered}};
  if (report.flows.empty()) {
    j["flow_latency"] = nullptr;
  } else {
    LatencyStats stats = flow_latency_stats(report.flows);
    j["flow_latency"] = {{"count", stats.count},
                         {"mean_s", stats.mean_s},
                         {"p50_s", stats.p50_s},
                         {"max_s", stats.max_s}};
  }
  double final_avg_all = 0.0;
  for (auto it = report.power.rbegin(); it != report.power.rend(); ++it) {
    if (it->component_id == "ALL") {
      final_avg_all = it->average_mw;
      break;
    }
  }
  j["power"] = {{"final_average_mw", final_avg_all}, {"total_energy_pj", report.total_energy_pj}};
  return j.dump(2) + "\n";
}

std::vector<std::vector<std::string>> read_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) {
      std::vector<std::string> fields;
      std::size_t fpos = 0;
      for (;;) {
        std::size_t comma = line.find(',', fpos);
        if (comma == std::string_view::npos) {
          fields.emplace_back(line.substr(fpos));
          break;
        }
        fields.emplace_back(line.substr(fpos, comma - fpos));
        fpos = comma + 1;
      }
      rows.push_back(std::move(fields));
    }
    pos = eol + 1;
  }
  if (rows.empty()) throw ConfigError("csv", "no rows");
  for (const auto& r : rows) {
    if (r.size() != rows.front().size())
      throw ConfigError("csv", "rows have inconsistent field counts");
  }
  return rows;
}

namespace {

std::string power_trace_svg(const std::vector<std::vector<std::string>>& rows) {
  const std::vector<std::string> header = {"window_end_ns", "component_id", "instantaneous_mw",
                                           "average_mw"};
  if (rows.front() != header) throw ConfigError("csv", "unexpected power csv header");
  if (rows.size() < 2) throw ConfigError("csv", "no data rows");

  std::string series_id = "ALL";
  bool has_all = false;
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i][1] == "ALL") has_all = true;
  if (!has_all) series_id = rows[1][1];

  std::vector<std::array<double, 3>> pts;  // t, inst, avg
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i][1] != series_id) continue;
    pts.push_back({to_double(rows[i][0], "window_end_ns"),
                   to_double(rows[i][2], "instantaneous_mw"),
                   to_double(rows[i][3], "average_mw")});
  }
  if (pts.empty()) throw ConfigError("csv", "no data rows");

  double t_max = 0.0, p_max = 0.0;
  for (const auto& p : pts) {
    t_max = std::max(t_max, p[0]);
    p_max = std::max({p_max, p[1], p[2]});
  }
  if (t_max <= 0.0) t_max = 1.0;
  if (p_max <= 0.0) p_max = 1.0;

  Frame f;
  std::string s;
  svg_open(s, f, "time (ns)", "power (mW)");
  s += axis_ticks(f, t_max, p_max);
  const char* colors[2] = {"#1f77b4", "#d62728"};
  const char* names[2] = {"instantaneous", "average"};
  for (int series = 0; series < 2; ++series) {
    s += fmt("<polyline fill=\"none\" stroke=\"%s\" stroke-width=\"1.5\" points=\"",
             colors[series]);
    for (const auto& p : pts)
      s += fmt("%.2f,%.2f ", f.x(p[0] / t_max), f.y(p[series + 1] / p_max));
    s += "\"/>\n";
    s += fmt("<text x=\"%.2f\" y=\"%.2f\" font-size=\"12\" fill=\"%s\">%s</text>\n", f.x(0.02),
             f.y(0.96) + 12.0 * series, colors[series], names[series]);
  }
  s += "</svg>\n";
  return s;
}

std::string latency_hist_svg(const std::vector<std::vector<std::string>>& rows) {
  const std::vector<std::string> header = {"flow_id", "core_id", "start_ns", "end_ns",
                                           "latency_ns"};
  if (rows.front() != header) throw ConfigError("csv", "unexpected latency csv header");
  if (rows.size() < 2) throw ConfigError("csv", "no data rows");

  std::vector<double> lat;
  for (std::size_t i = 1; i < rows.size(); ++i) lat.push_back(to_double(rows[i][4], "latency_ns"));

  const double lo = *std::min_element(lat.begin(), lat.end());
  const double hi = *std::max_element(lat.begin(), lat.end());
  const int bins = hi > lo ? 10 : 1;
  std::vector<int> count(static_cast<std::size_t>(bins), 0);
  for (double v : lat) {
    int b = hi > lo ? static_cast<int>((v - lo) / (hi - lo) * bins) : 0;
    if (b >= bins) b = bins - 1;
    ++count[static_cast<std::size_t>(b)];
  }
  const int c_max = *std::max_element(count.begin(), count.end());

  Frame f;
  std::string s;
  svg_open(s, f, "latency (ns)", "flows");
  s += axis_ticks(f, hi, static_cast<double>(c_max));
  for (int b = 0; b < bins; ++b) {
    const double frac = static_cast<double>(count[static_cast<std::size_t>(b)]) / c_max;
    const double x0 = f.x(static_cast<double>(b) / bins);
    const double x1 = f.x(static_cast<double>(b + 1) / bins);
    s += fmt("<rect x=\"%.2f\" y=\"%.2f\" width=\"%.2f\" height=\"%.2f\" fill=\"#1f77b4\" "
             "stroke=\"white\"/>\n",
             x0, f.y(frac), x1 - x0, f.y(0.0) - f.y(frac));
  }
  s += "</svg>\n";
  return s;
}

}  // namespace

std::string emit_plot(std::string_view csv_text, std::string_view kind) {
  const auto rows = read_csv(csv_text);
  if (kind == "power-trace") return power_trace_svg(rows);
  if (kind == "latency-hist") return latency_hist_svg(rows);
  throw std::invalid_argument("unknown plot kind '" + std::string(kind) +
                              "' (valid: latency-hist|power-trace)");
}

RunArtifacts write_run_artifacts(const SystemSpec& spec, const RunReport& report,
                                 const std::filesystem::path& out_dir,
                                 std::string_view source_label) {
  std::filesystem::create_directories(out_dir);
  RunArtifacts a;
  a.latency_csv = out_dir / "latency.csv";
  a.power_csv = out_dir / "power.csv";
  a.summary = out_dir / "summary.json";
  a.latency_svg = out_dir / "latency.svg";
  a.power_svg = out_dir / "power.svg";

  const std::string lat = latency_csv_text(spec, report);
  const std::string pow = power_csv_text(report);
  write_file(a.latency_csv, lat);
  write_file(a.power_csv, pow);
  write_file(a.summary, summary_text(spec, report, source_label));
  write_file(a.power_svg, emit_plot(pow, "power-trace"));
  if (!report.flows.empty()) write_file(a.latency_svg, emit_plot(lat, "latency-hist"));
  return a;
}

}  // namespace csim
