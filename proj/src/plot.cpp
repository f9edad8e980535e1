#include "wrcm/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <vector>

#include "wrcm/errors.hpp"
#include "wrcm/stats.hpp"

namespace wrcm {

namespace {

constexpr double kWidth = 640, kHeight = 420;
constexpr double kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Series {
  std::string name;
  std::vector<double> x, y;
};

struct Axes {
  bool log_x = false, log_y = false;
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;  // in transformed coordinates

  double tx(double x) const { return log_x ? std::log10(x) : x; }
  double ty(double y) const { return log_y ? std::log10(y) : y; }
  double px(double x) const { return kLeft + (tx(x) - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const {
    return kHeight - kBottom - (ty(y) - y0) / (y1 - y0) * (kHeight - kTop - kBottom);
  }
};

Axes fit_axes(const std::vector<Series>& series, bool log_x, bool log_y) {
  Axes a{log_x, log_y, INFINITY, -INFINITY, INFINITY, -INFINITY};
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      a.x0 = std::min(a.x0, a.tx(s.x[i]));
      a.x1 = std::max(a.x1, a.tx(s.x[i]));
      a.y0 = std::min(a.y0, a.ty(s.y[i]));
      a.y1 = std::max(a.y1, a.ty(s.y[i]));
    }
  auto pad = [](double& lo, double& hi) {
    if (hi - lo < 1e-12) {
      lo -= 0.5;
      hi += 0.5;
    } else {
      const double m = 0.05 * (hi - lo);
      lo -= m;
      hi += m;
    }
  };
  pad(a.x0, a.x1);
  pad(a.y0, a.y1);
  return a;
}

std::string frame(const Axes& a, std::string_view title, std::string_view xlabel,
                  std::string_view ylabel) {
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"420\" viewBox=\"0 0 640 420\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"420\" fill=\"white\"/>\n";
  out += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" +
         std::string(title) + "</text>\n";
  const double bottom = kHeight - kBottom, right = kWidth - kRight;
  out += "<path d=\"M" + num(kLeft) + " " + num(kTop) + " V" + num(bottom) + " H" + num(right) +
         "\" stroke=\"black\" fill=\"none\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = a.x0 + (a.x1 - a.x0) * i / 4.0;
    const double fy = a.y0 + (a.y1 - a.y0) * i / 4.0;
    const double px = kLeft + (right - kLeft) * i / 4.0;
    const double py = bottom - (bottom - kTop) * i / 4.0;
    out += "<path d=\"M" + num(px) + " " + num(bottom) + " v5\" stroke=\"black\"/>\n";
    out += "<text x=\"" + num(px) + "\" y=\"" + num(bottom + 18) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
           label(a.log_x ? std::pow(10.0, fx) : fx) + "</text>\n";
    out += "<path d=\"M" + num(kLeft) + " " + num(py) + " h-5\" stroke=\"black\"/>\n";
    out += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(py + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
           label(a.log_y ? std::pow(10.0, fy) : fy) + "</text>\n";
  }
  out += "<text x=\"" + num((kLeft + right) / 2) + "\" y=\"" + num(kHeight - 10) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
         std::string(xlabel) + "</text>\n";
  out += "<text x=\"16\" y=\"" + num((kTop + bottom) / 2) + "\" transform=\"rotate(-90 16 " +
         num((kTop + bottom) / 2) + ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
         std::string(ylabel) + "</text>\n";
  return out;
}

std::string points(const Axes& a, const Series& s, const char* colour, bool polyline) {
  std::string out;
  if (polyline && s.x.size() > 1) {
    out += "<polyline fill=\"none\" stroke=\"" + std::string(colour) + "\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i)
      out += (i ? " " : "") + num(a.px(s.x[i])) + "," + num(a.py(s.y[i]));
    out += "\"/>\n";
  }
  for (std::size_t i = 0; i < s.x.size(); ++i)
    out += "<circle cx=\"" + num(a.px(s.x[i])) + "\" cy=\"" + num(a.py(s.y[i])) +
           "\" r=\"3\" fill=\"" + colour + "\"/>\n";
  return out;
}

std::string legend(const std::vector<Series>& series) {
  std::string out;
  if (series.size() < 2 && (series.empty() || series.front().name.empty())) return out;
  for (std::size_t i = 0; i < series.size(); ++i)
    out += "<text x=\"" + num(kWidth - kRight - 4) + "\" y=\"" + num(kTop + 14 * (i + 1)) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" +
           kPalette[i % 8] + "\">" + series[i].name + "</text>\n";
  return out;
}

// Groups rows by the concatenation of `keys`, preserving first-seen order.
std::vector<Series> group(const CsvTable& t, const std::vector<std::string>& keys,
                          std::string_view xcol, std::string_view ycol, bool positive_x,
                          bool positive_y) {
  std::vector<std::size_t> key_cols;
  for (const auto& k : keys) key_cols.push_back(t.column(k));
  const auto xs = t.numeric_column(xcol);
  const auto ys = t.numeric_column(ycol);
  std::vector<Series> series;
  std::map<std::string, std::size_t> slot;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (!std::isfinite(xs[r]) || !std::isfinite(ys[r])) continue;
    if ((positive_x && !(xs[r] > 0)) || (positive_y && !(ys[r] > 0))) continue;
    std::string name;
    for (std::size_t i = 0; i < key_cols.size(); ++i)
      name += (i ? " " : "") + keys[i] + "=" + t.rows[r][key_cols[i]];
    auto [it, fresh] = slot.emplace(name, series.size());
    if (fresh) series.push_back({name, {}, {}});
    series[it->second].x.push_back(xs[r]);
    series[it->second].y.push_back(ys[r]);
  }
  if (series.empty()) throw FormatError("no usable data rows to plot");
  return series;
}

// Mean of y per distinct x, in increasing x.
Series average_by_x(const Series& s) {
  std::map<double, std::pair<double, int>> acc;
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    auto& [sum, count] = acc[s.x[i]];
    sum += s.y[i];
    ++count;
  }
  Series out{s.name, {}, {}};
  for (const auto& [x, sc] : acc) {
    out.x.push_back(x);
    out.y.push_back(sc.first / sc.second);
  }
  return out;
}

std::string render_delta_eff(const CsvTable& t) {
  auto series = group(t, {"kernel", "gamma", "delta"}, "n", "I_n", true, true);
  const Axes a = fit_axes(series, true, true);
  std::string out = frame(a, "I(n) against n", "n", "I(n)");
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    out += points(a, s, kPalette[k % 8], false);
    if (s.x.size() < 2) continue;
    const std::size_t from = s.x.size() >= 4 ? s.x.size() / 2 : 0;
    std::vector<double> lx, ly;
    for (std::size_t i = from; i < s.x.size(); ++i) {
      lx.push_back(std::log10(s.x[i]));
      ly.push_back(std::log10(s.y[i]));
    }
    const LinearFit fit = least_squares(lx, ly);
    const double xa = s.x[from], xb = s.x.back();
    const double ya = std::pow(10.0, fit.intercept + fit.slope * std::log10(xa));
    const double yb = std::pow(10.0, fit.intercept + fit.slope * std::log10(xb));
    out += "<line x1=\"" + num(a.px(xa)) + "\" y1=\"" + num(a.py(ya)) + "\" x2=\"" +
           num(a.px(xb)) + "\" y2=\"" + num(a.py(yb)) + "\" stroke=\"" + kPalette[k % 8] +
           "\" stroke-dasharray=\"4 3\"/>\n";
  }
  return out + legend(series) + "</svg>\n";
}

std::string render_simple(const CsvTable& t, std::vector<std::string> keys, std::string_view xcol,
                          std::string_view ycol, bool log_x, bool log_y, bool average,
                          std::string_view title) {
  auto series = group(t, keys, xcol, ycol, log_x, log_y);
  if (average)
    for (auto& s : series) s = average_by_x(s);
  const Axes a = fit_axes(series, log_x, log_y);
  std::string out = frame(a, title, xcol, ycol);
  for (std::size_t k = 0; k < series.size(); ++k)
    out += points(a, series[k], kPalette[k % 8], true);
  return out + legend(series) + "</svg>\n";
}

}  // namespace

std::string_view to_string(PlotKind kind) {
  switch (kind) {
    case PlotKind::delta_eff: return "delta-eff";
    case PlotKind::degree: return "degree";
    case PlotKind::sweep: return "sweep";
    case PlotKind::crossing: return "crossing";
    case PlotKind::finite_graph: return "finite-graph";
  }
  return "?";
}

PlotKind parse_plot_kind(std::string_view name) {
  for (auto k : {PlotKind::delta_eff, PlotKind::degree, PlotKind::sweep, PlotKind::crossing,
                 PlotKind::finite_graph})
    if (name == to_string(k)) return k;
  throw ParameterError("unknown plot kind '" + std::string(name) + "'");
}

std::string render_plot(const CsvTable& table, PlotKind kind) {
  if (table.rows.empty()) throw FormatError("CSV has no data rows");
  switch (kind) {
    case PlotKind::delta_eff:
      return render_delta_eff(table);
    case PlotKind::degree:
      return render_simple(table, {}, "degree", "count", true, true, false, "degree distribution");
    case PlotKind::sweep:
      return render_simple(table, {"L_or_n"}, "beta", "largest_fraction", false, false, true,
                           "largest component fraction against beta");
    case PlotKind::crossing:
      return render_simple(table, {}, "stage", "chi_freq", false, false, false,
                           "crossing frequency per stage");
    case PlotKind::finite_graph:
      return render_simple(table, {}, "n", "median_fraction", true, false, false,
                           "median largest-component fraction");
  }
  throw ParameterError("unknown plot kind");
}

void emit_plot(const std::filesystem::path& csv_path, PlotKind kind,
               const std::filesystem::path& svg_path) {
  const std::string svg = render_plot(read_csv(csv_path), kind);
  write_text(svg_path, svg);
}

}  // namespace wrcm
