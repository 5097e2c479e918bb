#pragma once

// CSV tables and log-log SVG plots for the experiment commands.

#include "mpdwr/driver.hpp"

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace mpdwr {

inline constexpr const char* kVersion = "1.0.0";

/// `# mpdwr <version> key=value ...`, keys in sorted order.
std::string metadata_line(const std::map<std::string, std::string>& meta);

/// Shortest round-trip decimal form of x.
std::string format_number(double x);

struct CsvTable {
  std::map<std::string, std::string> meta;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Throws std::invalid_argument if the row width differs from the header.
  void add(std::vector<std::string> row);
  void write(std::ostream& os) const;
};

/// One row per record: iter, ndofs, nelems, je, eta_total, min_vol, t_primal,
/// t_dual, t_indicator, t_refine, primal_prec, dual_prec.
CsvTable history_table(const AdaptHistory& h);

/// element_id, eta_res, eta_dwr, volume.
CsvTable indicator_table(const Mesh& m, const IndicatorField& res, const IndicatorField& dwr);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Log-log line plot of |y| against x. Points with non-positive x or zero y
/// are skipped.
void write_loglog_svg(std::ostream& os, const std::string& title, const std::string& xlabel,
                      const std::string& ylabel, const std::vector<Series>& series);

/// Replaces &, <, >, " and ' by XML entities.
std::string xml_escape(const std::string& s);

}  // namespace mpdwr
