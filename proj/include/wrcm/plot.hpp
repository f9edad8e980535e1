#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "wrcm/csv.hpp"

namespace wrcm {

/// delta_eff and degree plots are log-log; sweep, crossing and finite_graph
/// plots use linear axes (finite_graph has a log n axis).
enum class PlotKind { delta_eff, degree, sweep, crossing, finite_graph };

std::string_view to_string(PlotKind kind);
PlotKind parse_plot_kind(std::string_view name);

/// Renders a table to SVG. Throws FormatError when a required column is
/// missing or there are no usable data rows.
std::string render_plot(const CsvTable& table, PlotKind kind);

/// Reads csv_path and writes svg_path; nothing is written on error.
void emit_plot(const std::filesystem::path& csv_path, PlotKind kind,
               const std::filesystem::path& svg_path);

}  // namespace wrcm
