#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "bakeoff/stats.hpp"

namespace bakeoff {

/// Rows of string cells; the first row is the header.
using Table = std::vector<std::vector<std::string>>;

void write_table(const Table& t, const std::filesystem::path& path);
Table read_table(const std::filesystem::path& path);

// Each emitter writes `<stem>.csv` with the plotted values and `<stem>.svg`
// rendered from that file alone. The render_* functions are that second step.

/// Sidecar rows: kind,name,a,b with kind "rank" (a = mean rank) or
/// "clique" (name = members joined by '|', a/b = rank span). Also writes a
/// plain-text `<stem>.txt`.
void emit_cd_diagram(const std::vector<std::string>& names, const RankSummary& ranks, const CliqueSet& cliques,
                     const std::filesystem::path& stem);
std::string render_cd_svg(const Table& t);
std::string render_cd_text(const Table& t);

/// Horizontal position of a mean rank on the diagram axis.
double cd_axis_x(double rank, std::size_t k);

void emit_scatter(const std::vector<std::string>& labels, const std::vector<double>& a,
                  const std::vector<double>& b, const std::string& name_a, const std::string& name_b,
                  const std::filesystem::path& stem);
std::string render_scatter_svg(const Table& t);

/// Bin i covers [i * width, (i + 1) * width).
void emit_histogram(const std::vector<double>& diffs, double bin_width, const std::filesystem::path& stem);
std::string render_histogram_svg(const Table& t);

void emit_sharpshooter(const std::vector<std::string>& labels, const SharpshooterSummary& s,
                       const std::filesystem::path& stem);
std::string render_sharpshooter_svg(const Table& t);

/// Counts of each chosen setting, normalised to proportions.
void emit_param_frequency(const std::vector<std::string>& choices, const std::filesystem::path& stem);
std::string render_param_frequency_svg(const Table& t);

}  // namespace bakeoff
