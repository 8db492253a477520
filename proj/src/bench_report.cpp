#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>

#include "uflow/bench.hpp"
#include "uflow/instance_io.hpp"

namespace uflow::bench {

namespace {

constexpr Metric kMetrics[] = {Metric::kOverflowRatio, Metric::kCongestion, Metric::kWallSeconds,
                               Metric::kLpSolves};
constexpr Metric kTestedMetrics[] = {Metric::kOverflowRatio, Metric::kCongestion};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c == '\n' ? ' ' : c;
  }
  return q + '"';
}

std::string opt(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::vector<double> values_of(const std::vector<const ResultRow*>& rows, Metric m) {
  std::vector<double> v;
  v.reserve(rows.size());
  for (const ResultRow* r : rows) v.push_back(metric_value(*r, m));
  return v;
}

// Colour-blind safe palette, cycled.
const char* kColours[] = {"#0072B2", "#D55E00", "#009E73", "#CC79A7", "#E69F00", "#56B4E9", "#000000"};

}  // namespace

void write_results_csv(std::ostream& out, const ResultTable& t) {
  out << "dataset,group,group_value,instance,instance_seed,nodes,arcs,commodities,total_demand,"
         "algorithm,seed,overflow_sum,overflow_ratio,congestion,wall_seconds,lp_solves,error\n";
  for (const ResultRow& r : t.rows) {
    const Group& g = t.groups[static_cast<std::size_t>(r.group)];
    out << to_string(t.spec.dataset) << ',' << csv_field(g.label) << ',' << opt(g.value) << ','
        << r.instance << ',' << r.instance_seed << ',' << r.nodes << ',' << r.arcs << ','
        << r.commodities << ',' << format_number(r.total_demand) << ','
        << csv_field(t.spec.algorithms[static_cast<std::size_t>(r.algorithm)].label) << ',' << r.seed << ',';
    if (r.error.empty()) {
      out << format_number(r.overflow_sum) << ',' << format_number(r.overflow_ratio) << ','
          << format_number(r.congestion) << ',' << format_number(r.wall_seconds) << ',' << r.lp_solves << ",\n";
    } else {
      out << ",,,,," << csv_field(r.error) << '\n';
    }
  }
}

void write_summary_csv(std::ostream& out, const ResultTable& t) {
  out << "dataset,group,group_value,algorithm,runs,failed";
  for (Metric m : kMetrics) {
    out << ',' << to_string(m) << "_mean," << to_string(m) << "_ci_low," << to_string(m) << "_ci_high";
  }
  out << '\n';
  for (std::size_t g = 0; g < t.groups.size(); ++g) {
    for (std::size_t a = 0; a < t.spec.algorithms.size(); ++a) {
      const auto rows = cell(t, static_cast<int>(g), static_cast<int>(a));
      int failed = 0;
      for (const ResultRow& r : t.rows) {
        failed += r.group == static_cast<int>(g) && r.algorithm == static_cast<int>(a) && !r.error.empty();
      }
      out << to_string(t.spec.dataset) << ',' << csv_field(t.groups[g].label) << ',' << opt(t.groups[g].value)
          << ',' << csv_field(t.spec.algorithms[a].label) << ',' << rows.size() << ',' << failed;
      for (Metric m : kMetrics) {
        const Summary s = summarize(values_of(rows, m));
        if (s.n == 0) {
          out << ",,,";
        } else if (!s.ci_half) {
          out << ',' << format_number(s.mean) << ",,";
        } else {
          out << ',' << format_number(s.mean) << ',' << format_number(s.mean - *s.ci_half) << ','
              << format_number(s.mean + *s.ci_half);
        }
      }
      out << '\n';
    }
  }
}

void write_tests_csv(std::ostream& out, const ResultTable& t) {
  out << "metric,group_a,algorithm_a,group_b,algorithm_b,pairs,mean_diff,t,df,p_two_sided,p_a_less\n";
  const int G = static_cast<int>(t.groups.size());
  const int A = static_cast<int>(t.spec.algorithms.size());
  const bool across = t.spec.dataset == Dataset::kThetaSweep || t.spec.dataset == Dataset::kObjectiveStudy ||
                      !t.spec.instance_files.empty();
  auto emit = [&](Metric m, int ga, int aa, int gb, int ab) {
    const Paired p = paired_values(t, ga, aa, gb, ab, m);
    if (p.a.size() < 2) return;
    const TTest r = paired_t_test(p.a, p.b);
    double diff = 0.0;
    for (std::size_t i = 0; i < p.a.size(); ++i) diff += p.a[i] - p.b[i];
    diff /= static_cast<double>(p.a.size());
    out << to_string(m) << ',' << csv_field(t.groups[static_cast<std::size_t>(ga)].label) << ','
        << csv_field(t.spec.algorithms[static_cast<std::size_t>(aa)].label) << ','
        << csv_field(t.groups[static_cast<std::size_t>(gb)].label) << ','
        << csv_field(t.spec.algorithms[static_cast<std::size_t>(ab)].label) << ',' << p.a.size() << ','
        << format_number(diff) << ',' << format_number(r.t) << ',' << format_number(r.df) << ','
        << format_number(r.p_two_sided) << ',' << format_number(r.p_less) << '\n';
  };
  for (Metric m : kTestedMetrics) {
    for (int g = 0; g < G; ++g) {
      for (int a = 0; a < A; ++a) {
        for (int b = a + 1; b < A; ++b) emit(m, g, a, g, b);
      }
    }
    if (!across) continue;
    for (int a = 0; a < A; ++a) {
      for (int g = 0; g < G; ++g) {
        for (int h = g + 1; h < G; ++h) emit(m, g, a, h, a);
      }
    }
  }
}

// Groups sit at evenly spaced x positions (the sweeps mix linear, geometric
// and symbolic parameters); each algorithm is a line through its group means
// inside a translucent band mean +- CI half-width.
void write_plot_svg(std::ostream& out, const ResultTable& t, Metric metric) {
  const double width = 720, height = 440, left = 80, right = 170, top = 40, bottom = 70;
  const double pw = width - left - right, ph = height - top - bottom;
  const std::size_t G = t.groups.size();

  struct Point {
    std::size_t group;
    Summary s;
  };
  std::vector<std::vector<Point>> series(t.spec.algorithms.size());
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t a = 0; a < series.size(); ++a) {
    for (std::size_t g = 0; g < G; ++g) {
      const Summary s = summarize(values_of(cell(t, static_cast<int>(g), static_cast<int>(a)), metric));
      if (s.n == 0) continue;
      series[a].push_back({g, s});
      const double half = s.ci_half.value_or(0.0);
      lo = std::min(lo, s.mean - half);
      hi = std::max(hi, s.mean + half);
    }
  }
  if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
  lo = std::min(lo, 0.0);
  if (hi <= lo) hi = lo + 1.0;
  hi += 0.05 * (hi - lo);

  auto x_of = [&](std::size_t g) { return left + (G > 1 ? pw * static_cast<double>(g) / static_cast<double>(G - 1) : pw / 2); };
  auto y_of = [&](double v) { return top + ph * (1.0 - (v - lo) / (hi - lo)); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << fixed(left) << "\" y=\"24\" font-size=\"14\">" << xml_escape(t.spec.name) << ": "
      << to_string(metric) << "</text>\n";
  out << "<line x1=\"" << fixed(left) << "\" y1=\"" << fixed(top + ph) << "\" x2=\"" << fixed(left + pw)
      << "\" y2=\"" << fixed(top + ph) << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << fixed(left) << "\" y1=\"" << fixed(top) << "\" x2=\"" << fixed(left)
      << "\" y2=\"" << fixed(top + ph) << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = lo + (hi - lo) * i / 4.0;
    out << "<text x=\"" << fixed(left - 6) << "\" y=\"" << fixed(y_of(v) + 4) << "\" text-anchor=\"end\">"
        << tick_label(v) << "</text>\n";
  }
  for (std::size_t g = 0; g < G; ++g) {
    out << "<text x=\"" << fixed(x_of(g)) << "\" y=\"" << fixed(top + ph + 18)
        << "\" text-anchor=\"middle\" font-size=\"10\">" << xml_escape(t.groups[g].label) << "</text>\n";
  }
  for (std::size_t a = 0; a < series.size(); ++a) {
    if (series[a].empty()) continue;
    const char* colour = kColours[a % std::size(kColours)];
    std::string upper, lower, line;
    for (const Point& p : series[a]) {
      const double half = p.s.ci_half.value_or(0.0);
      upper += fixed(x_of(p.group)) + "," + fixed(y_of(p.s.mean + half)) + " ";
      line += fixed(x_of(p.group)) + "," + fixed(y_of(p.s.mean)) + " ";
    }
    for (auto it = series[a].rbegin(); it != series[a].rend(); ++it) {
      lower += fixed(x_of(it->group)) + "," + fixed(y_of(it->s.mean - it->s.ci_half.value_or(0.0))) + " ";
    }
    out << "<polygon points=\"" << upper << lower << "\" fill=\"" << colour << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    out << "<polyline points=\"" << line << "\" fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
    for (const Point& p : series[a]) {
      out << "<circle cx=\"" << fixed(x_of(p.group)) << "\" cy=\"" << fixed(y_of(p.s.mean)) << "\" r=\"3\" fill=\""
          << colour << "\"/>\n";
    }
    const double ly = top + 16.0 * static_cast<double>(a);
    out << "<rect x=\"" << fixed(left + pw + 16) << "\" y=\"" << fixed(ly) << "\" width=\"12\" height=\"12\" fill=\""
        << colour << "\"/>\n";
    out << "<text x=\"" << fixed(left + pw + 34) << "\" y=\"" << fixed(ly + 10) << "\">"
        << xml_escape(t.spec.algorithms[a].label) << "</text>\n";
  }
  out << "</svg>\n";
}

std::vector<std::filesystem::path> emit_report(const ResultTable& table, const std::filesystem::path& dir) {
  if (table.rows.empty()) throw Error("report: result table is empty");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("report: cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> files;
  auto write = [&](const std::string& suffix, auto&& body) {
    const auto path = dir / (table.spec.name + suffix);
    std::ofstream out(path);
    if (!out) throw Error("report: cannot write " + path.string());
    body(out);
    if (!out) throw Error("report: write failed for " + path.string());
    files.push_back(path);
  };
  write("_results.csv", [&](std::ostream& o) { write_results_csv(o, table); });
  write("_summary.csv", [&](std::ostream& o) { write_summary_csv(o, table); });
  write("_tests.csv", [&](std::ostream& o) { write_tests_csv(o, table); });
  for (Metric m : kMetrics) {
    write(std::string("_") + to_string(m) + ".svg", [&](std::ostream& o) { write_plot_svg(o, table, m); });
  }
  return files;
}

std::filesystem::path output_dir(const std::optional<std::filesystem::path>& requested) {
  if (requested) return *requested;
  if (const char* env = std::getenv("UFLOW_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return "results";
}

}  // namespace uflow::bench
