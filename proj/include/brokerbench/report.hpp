// Report emission: CSV/JSON tables and SVG figures (metric-vs-payload
// lines, metric-vs-subscribers lines, optimality heatmaps). The SVGs are
// generated directly so reporting needs no plotting runtime; identical
// input produces byte-identical files.
#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "brokerbench/sweep.hpp"

namespace brokerbench {

namespace report_detail {

inline const std::vector<std::string>& palette() {
  static const std::vector<std::string> colors = {
      "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  return colors;
}

inline std::string format_bytes(std::uint64_t bytes) {
  if (bytes >= 1024 && bytes % 1024 == 0) {
    const std::uint64_t kb = bytes / 1024;
    if (kb >= 1024 && kb % 1024 == 0) return std::to_string(kb / 1024) + "M";
    return std::to_string(kb) + "K";
  }
  return std::to_string(bytes);
}

inline std::string metric_axis_label(const std::string& metric) {
  if (metric.rfind("latency", 0) == 0) return metric + " [us]";
  if (metric == "jitter") return "jitter [us]";
  if (metric == "throughput") return "throughput [MB/s]";
  if (metric == "cpu") return "median CPU [%]";
  if (metric == "memory") return "median USS [%]";
  return metric;
}

struct series {
  std::string label;
  std::vector<std::pair<std::size_t, double>> points;  // (category index, value)
};

// Equal-spaced category axis: the swept values are discrete sets (the
// payload axis is powers of two), so spacing by index keeps every grid
// column readable.
inline std::string line_chart(const std::string& title, const std::vector<std::string>& categories,
                              const std::string& x_label, const std::string& y_label,
                              const std::vector<series>& all_series) {
  const double width = 640, height = 420;
  const double left = 80, right = 140, top = 40, bottom = 60;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double max_v = 0;
  for (const series& s : all_series) {
    for (const auto& [idx, v] : s.points) max_v = std::max(max_v, v);
  }
  if (max_v <= 0) max_v = 1;
  max_v *= 1.05;

  auto x_of = [&](std::size_t idx) {
    if (categories.size() == 1) return left + plot_w / 2;
    return left + plot_w * static_cast<double>(idx) / static_cast<double>(categories.size() - 1);
  };
  auto y_of = [&](double v) { return top + plot_h * (1.0 - v / max_v); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + format_number(width) +
         "\" height=\"" + format_number(height) + "\" font-family=\"sans-serif\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + format_number(width / 2) + "\" y=\"20\" text-anchor=\"middle\" "
         "font-size=\"14\">" + title + "</text>\n";

  // Axes and ticks.
  svg += "<line x1=\"" + format_number(left) + "\" y1=\"" + format_number(top + plot_h) +
         "\" x2=\"" + format_number(left + plot_w) + "\" y2=\"" + format_number(top + plot_h) +
         "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + format_number(left) + "\" y1=\"" + format_number(top) + "\" x2=\"" +
         format_number(left) + "\" y2=\"" + format_number(top + plot_h) +
         "\" stroke=\"black\"/>\n";
  for (std::size_t i = 0; i < categories.size(); ++i) {
    const double x = x_of(i);
    svg += "<line x1=\"" + format_number(x) + "\" y1=\"" + format_number(top + plot_h) +
           "\" x2=\"" + format_number(x) + "\" y2=\"" + format_number(top + plot_h + 5) +
           "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + format_number(x) + "\" y=\"" + format_number(top + plot_h + 20) +
           "\" text-anchor=\"middle\" font-size=\"11\">" + categories[i] + "</text>\n";
  }
  for (int tick = 0; tick <= 5; ++tick) {
    const double v = max_v * tick / 5.0;
    const double y = y_of(v);
    svg += "<line x1=\"" + format_number(left - 5) + "\" y1=\"" + format_number(y) + "\" x2=\"" +
           format_number(left) + "\" y2=\"" + format_number(y) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + format_number(left) + "\" y1=\"" + format_number(y) + "\" x2=\"" +
           format_number(left + plot_w) + "\" y2=\"" + format_number(y) +
           "\" stroke=\"#dddddd\"/>\n";
    char label[64];
    std::snprintf(label, sizeof(label), "%.4g", v);
    svg += "<text x=\"" + format_number(left - 8) + "\" y=\"" + format_number(y + 4) +
           "\" text-anchor=\"end\" font-size=\"11\">" + label + "</text>\n";
  }
  svg += "<text x=\"" + format_number(left + plot_w / 2) + "\" y=\"" +
         format_number(height - 15) + "\" text-anchor=\"middle\" font-size=\"12\">" + x_label +
         "</text>\n";
  svg += "<text x=\"18\" y=\"" + format_number(top + plot_h / 2) +
         "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 18 " +
         format_number(top + plot_h / 2) + ")\">" + y_label + "</text>\n";

  for (std::size_t s = 0; s < all_series.size(); ++s) {
    const std::string& color = palette()[s % palette().size()];
    std::string pts;
    for (const auto& [idx, v] : all_series[s].points) {
      pts += format_number(x_of(idx)) + "," + format_number(y_of(v)) + " ";
      svg += "<circle cx=\"" + format_number(x_of(idx)) + "\" cy=\"" + format_number(y_of(v)) +
             "\" r=\"3\" fill=\"" + color + "\"/>\n";
    }
    if (!pts.empty()) {
      svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
             "\" stroke-width=\"1.5\"/>\n";
    }
    const double ly = top + 10 + 18 * static_cast<double>(s);
    svg += "<rect x=\"" + format_number(width - right + 10) + "\" y=\"" + format_number(ly - 9) +
           "\" width=\"12\" height=\"12\" fill=\"" + color + "\"/>\n";
    svg += "<text x=\"" + format_number(width - right + 28) + "\" y=\"" + format_number(ly + 2) +
           "\" font-size=\"11\">" + all_series[s].label + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

inline std::string heatmap_chart(const std::string& title, const optimality_map& map,
                                 const std::vector<optimality_cell>& cells) {
  const double cell_w = 84, cell_h = 42;
  const double left = 90, top = 50, bottom = 30;
  const std::size_t cols = map.subscriber_counts.size();
  const std::size_t rows = map.payload_sizes.size();
  const double legend_h = 26;
  const double width = left + cell_w * static_cast<double>(cols) + 30;
  const double height =
      top + cell_h * static_cast<double>(rows) + bottom + legend_h;

  auto backend_color = [&](const std::string& name) {
    for (std::size_t i = 0; i < map.backends.size(); ++i) {
      if (map.backends[i] == name) return palette()[i % palette().size()];
    }
    return std::string("#999999");
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + format_number(width) +
         "\" height=\"" + format_number(height) + "\" font-family=\"sans-serif\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + format_number(width / 2) + "\" y=\"22\" text-anchor=\"middle\" "
         "font-size=\"14\">" + title + "</text>\n";

  // Payload sizes grow upward, subscriber counts left to right.
  for (std::size_t pi = 0; pi < rows; ++pi) {
    for (std::size_t si = 0; si < cols; ++si) {
      const optimality_cell& cell = cells[pi * cols + si];
      const double x = left + cell_w * static_cast<double>(si);
      const double y = top + cell_h * static_cast<double>(rows - 1 - pi);
      svg += "<rect x=\"" + format_number(x) + "\" y=\"" + format_number(y) + "\" width=\"" +
             format_number(cell_w) + "\" height=\"" + format_number(cell_h) + "\" fill=\"" +
             backend_color(cell.winner) + "\" stroke=\"white\"" +
             (cell.tie ? " stroke-dasharray=\"3,2\" stroke=\"black\"" : "") + "/>\n";
      svg += "<text x=\"" + format_number(x + cell_w / 2) + "\" y=\"" +
             format_number(y + cell_h / 2 + 4) +
             "\" text-anchor=\"middle\" font-size=\"10\" fill=\"white\">" + cell.winner +
             (cell.tie ? "*" : "") + "</text>\n";
    }
  }
  for (std::size_t pi = 0; pi < rows; ++pi) {
    const double y = top + cell_h * static_cast<double>(rows - 1 - pi) + cell_h / 2 + 4;
    svg += "<text x=\"" + format_number(left - 8) + "\" y=\"" + format_number(y) +
           "\" text-anchor=\"end\" font-size=\"11\">" + format_bytes(map.payload_sizes[pi]) +
           "</text>\n";
  }
  for (std::size_t si = 0; si < cols; ++si) {
    const double x = left + cell_w * static_cast<double>(si) + cell_w / 2;
    svg += "<text x=\"" + format_number(x) + "\" y=\"" +
           format_number(top + cell_h * static_cast<double>(rows) + 16) +
           "\" text-anchor=\"middle\" font-size=\"11\">" +
           std::to_string(map.subscriber_counts[si]) + "</text>\n";
  }
  double lx = left;
  const double ly = height - 10;
  for (std::size_t i = 0; i < map.backends.size(); ++i) {
    svg += "<rect x=\"" + format_number(lx) + "\" y=\"" + format_number(ly - 10) +
           "\" width=\"12\" height=\"12\" fill=\"" + palette()[i % palette().size()] + "\"/>\n";
    svg += "<text x=\"" + format_number(lx + 16) + "\" y=\"" + format_number(ly) +
           "\" font-size=\"11\">" + map.backends[i] + "</text>\n";
    lx += 20 + 7.0 * static_cast<double>(map.backends[i].size()) + 14;
  }
  svg += "</svg>\n";
  return svg;
}

inline std::string optimality_csv(const optimality_map& map, const std::string& transport_name) {
  const auto it = map.per_transport.find(transport_name);
  std::string out = "payload_bytes";
  for (std::uint64_t s : map.subscriber_counts) out += ",S=" + std::to_string(s);
  out += "\n";
  for (std::size_t pi = 0; pi < map.payload_sizes.size(); ++pi) {
    out += std::to_string(map.payload_sizes[pi]);
    for (std::size_t si = 0; si < map.subscriber_counts.size(); ++si) {
      const optimality_cell& cell = it->second[pi * map.subscriber_counts.size() + si];
      out += "," + cell.winner + (cell.tie ? " (tie)" : "");
    }
    out += "\n";
  }
  return out;
}

struct row_index {
  std::map<std::string, const sweep_row*> by_key;

  explicit row_index(const sweep_result& result) {
    for (const sweep_row& r : result.rows) by_key[r.key] = &r;
  }

  std::optional<double> value(const std::string& backend, const std::string& transport_name,
                              std::uint64_t payload, std::uint64_t subs, std::uint64_t interval,
                              const std::string& metric) const {
    config_snapshot probe;
    probe.backend = backend;
    probe.transport = transport_name;
    probe.payload_bytes = payload;
    probe.subscribers = subs;
    probe.interval_us = interval;
    const auto it = by_key.find(config_key(probe));
    if (it == by_key.end() || it->second->failed || !it->second->result) return std::nullopt;
    return metric_value(*it->second->result, metric);
  }
};

}  // namespace report_detail

// Writes rows.csv, optimality tables (JSON + one CSV grid per transport
// and metric), and the figure families under figs/.
inline void emit_reports(const sweep_result& result, const std::vector<optimality_map>& maps,
                         const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  using namespace report_detail;
  fs::create_directories(dir / "figs");

  write_text_file((dir / "rows.csv").string(), sweep_detail::rows_csv(result.rows));

  nlohmann::json maps_doc = nlohmann::json::array();
  for (const optimality_map& m : maps) maps_doc.push_back(m);
  write_text_file((dir / "optimality.json").string(), maps_doc.dump(2) + "\n");
  for (const optimality_map& m : maps) {
    for (const auto& [transport_name, cells] : m.per_transport) {
      (void)cells;
      write_text_file((dir / ("optimality_" + m.metric + "_" + transport_name + ".csv")).string(),
                      optimality_csv(m, transport_name));
      write_text_file(
          (dir / "figs" / ("optimality_" + m.metric + "_" + transport_name + ".svg")).string(),
          heatmap_chart("best backend, " + m.metric + ", " + transport_name + ", T=" +
                            std::to_string(m.interval_us) + "us",
                        m, m.per_transport.at(transport_name)));
    }
  }

  // Line figures straight from the rows, one file per (metric,
  // transport, interval). Failed cells leave gaps.
  const row_index index(result);
  std::set<std::string> transports;
  std::set<std::uint64_t> payloads, subs, intervals;
  for (const sweep_row& r : result.rows) {
    transports.insert(r.config.transport);
    payloads.insert(r.config.payload_bytes);
    subs.insert(r.config.subscribers);
    intervals.insert(r.config.interval_us);
  }
  if (transports.empty()) return;
  const std::vector<std::uint64_t> payload_list(payloads.begin(), payloads.end());
  const std::vector<std::uint64_t> sub_list(subs.begin(), subs.end());
  const std::uint64_t fixed_subs = sub_list.front();
  // The subscriber-scaling figure fixes the payload at 32 KB when the
  // sweep includes it, otherwise at the middle of the payload axis.
  const std::uint64_t fixed_payload =
      payloads.count(32768) ? 32768 : payload_list[payload_list.size() / 2];

  const std::vector<std::string> line_metrics = {"latency", "throughput", "cpu", "jitter",
                                                 "memory"};
  for (const std::string& metric : line_metrics) {
    for (const std::string& t : transports) {
      for (std::uint64_t interval : intervals) {
        std::vector<series> by_payload, by_subs;
        for (const std::string& backend : result.meta.backend_order) {
          series sp{backend, {}};
          for (std::size_t i = 0; i < payload_list.size(); ++i) {
            if (auto v = index.value(backend, t, payload_list[i], fixed_subs, interval, metric)) {
              sp.points.emplace_back(i, *v);
            }
          }
          if (!sp.points.empty()) by_payload.push_back(std::move(sp));
          series ss{backend, {}};
          for (std::size_t i = 0; i < sub_list.size(); ++i) {
            if (auto v = index.value(backend, t, fixed_payload, sub_list[i], interval, metric)) {
              ss.points.emplace_back(i, *v);
            }
          }
          if (!ss.points.empty()) by_subs.push_back(std::move(ss));
        }
        const std::string suffix = metric + "_" + t + "_T" + std::to_string(interval);
        if (!by_payload.empty() && payload_list.size() > 1) {
          std::vector<std::string> cats;
          for (std::uint64_t p : payload_list) cats.push_back(format_bytes(p));
          write_text_file((dir / "figs" / ("lines_" + suffix + "_vs_payload.svg")).string(),
                          line_chart(metric + " vs payload, " + t + ", S=" +
                                         std::to_string(fixed_subs) + ", T=" +
                                         std::to_string(interval) + "us",
                                     cats, "payload size [B]", metric_axis_label(metric),
                                     by_payload));
        }
        if (!by_subs.empty() && sub_list.size() > 1) {
          std::vector<std::string> cats;
          for (std::uint64_t s : sub_list) cats.push_back(std::to_string(s));
          write_text_file((dir / "figs" / ("lines_" + suffix + "_vs_subscribers.svg")).string(),
                          line_chart(metric + " vs subscribers, " + t + ", P=" +
                                         format_bytes(fixed_payload) + ", T=" +
                                         std::to_string(interval) + "us",
                                     cats, "subscribers", metric_axis_label(metric), by_subs));
        }
      }
    }
  }
}

}  // namespace brokerbench
