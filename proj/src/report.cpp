#include "mpdwr/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace mpdwr {

std::string metadata_line(const std::map<std::string, std::string>& meta) {
  std::string s = std::string("# mpdwr ") + kVersion;
  for (const auto& [k, v] : meta) s += " " + k + "=" + v;
  return s;
}

std::string format_number(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

void CsvTable::add(std::vector<std::string> row) {
  if (row.size() != header.size()) throw std::invalid_argument("CsvTable: row width differs from header");
  rows.push_back(std::move(row));
}

void CsvTable::write(std::ostream& os) const {
  os << metadata_line(meta) << '\n';
  auto line = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
}

CsvTable history_table(const AdaptHistory& h) {
  CsvTable t;
  t.header = {"iter", "ndofs", "nelems", "je", "eta_total", "min_vol", "t_primal",
              "t_dual", "t_indicator", "t_refine", "primal_prec", "dual_prec"};
  for (const auto& r : h.records) {
    t.add({std::to_string(r.iter), std::to_string(r.n_dofs), std::to_string(r.n_elements), format_number(r.je),
           format_number(r.eta_total), format_number(r.min_volume), format_number(r.t_primal),
           format_number(r.t_dual), format_number(r.t_indicator), format_number(r.t_refine),
           std::string(to_string(r.primal_precision)), std::string(to_string(r.dual_precision))});
  }
  return t;
}

CsvTable indicator_table(const Mesh& m, const IndicatorField& res, const IndicatorField& dwr) {
  if (res.size() != m.n_elements() || dwr.size() != m.n_elements()) {
    throw std::invalid_argument("indicator_table: indicator sizes differ from the mesh");
  }
  CsvTable t;
  t.header = {"element_id", "eta_res", "eta_dwr", "volume"};
  for (int e = 0; e < m.n_elements(); ++e) {
    t.add({std::to_string(e), format_number(res.eta[e]), format_number(dwr.eta[e]), format_number(m.area(e))});
  }
  return t;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

void write_loglog_svg(std::ostream& os, const std::string& title, const std::string& xlabel,
                      const std::string& ylabel, const std::vector<Series>& series) {
  constexpr double W = 640, H = 480, L = 80, R = 160, T = 40, B = 60;
  double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!(s.x[i] > 0.0) || s.y[i] == 0.0 || !std::isfinite(s.y[i])) continue;
      xmin = std::min(xmin, std::log10(s.x[i]));
      xmax = std::max(xmax, std::log10(s.x[i]));
      ymin = std::min(ymin, std::log10(std::fabs(s.y[i])));
      ymax = std::max(ymax, std::log10(std::fabs(s.y[i])));
    }
  }
  if (!(xmin <= xmax)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
  xmin = std::floor(xmin), xmax = std::max(std::ceil(xmax), xmin + 1);
  ymin = std::floor(ymin), ymax = std::max(std::ceil(ymax), ymin + 1);
  const auto px = [&](double lx) { return L + (lx - xmin) / (xmax - xmin) * (W - L - R); };
  const auto py = [&](double ly) { return H - B - (ly - ymin) / (ymax - ymin) * (H - T - B); };

  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << ' ' << H << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << xml_escape(title)
     << "</text>\n";
  // Axes and decade ticks.
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int d = static_cast<int>(xmin); d <= static_cast<int>(xmax); ++d) {
    os << "<line x1=\"" << px(d) << "\" y1=\"" << H - B << "\" x2=\"" << px(d) << "\" y2=\"" << H - B + 5
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << px(d) << "\" y=\"" << H - B + 20 << "\" text-anchor=\"middle\" font-size=\"12\">1e" << d
       << "</text>\n";
  }
  for (int d = static_cast<int>(ymin); d <= static_cast<int>(ymax); ++d) {
    os << "<line x1=\"" << L - 5 << "\" y1=\"" << py(d) << "\" x2=\"" << L << "\" y2=\"" << py(d)
       << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << L - 8 << "\" y=\"" << py(d) + 4 << "\" text-anchor=\"end\" font-size=\"12\">1e" << d
       << "</text>\n";
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\" font-size=\"14\">"
     << xml_escape(xlabel) << "</text>\n";
  os << "<text x=\"20\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 20 "
     << (T + H - B) / 2 << ")\">" << xml_escape(ylabel) << "</text>\n";

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd"};
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* c = colors[k % 4];
    os << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"2\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!(s.x[i] > 0.0) || s.y[i] == 0.0 || !std::isfinite(s.y[i])) continue;
      os << (first ? "" : " ") << px(std::log10(s.x[i])) << ',' << py(std::log10(std::fabs(s.y[i])));
      first = false;
    }
    os << "\"/>\n";
    const double ly = T + 20 + 20 * static_cast<double>(k);
    os << "<line x1=\"" << W - R + 10 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 35 << "\" y2=\"" << ly
       << "\" stroke=\"" << c << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << W - R + 40 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">" << xml_escape(s.label)
       << "</text>\n";
  }
  os << "</svg>\n";
}

}  // namespace mpdwr
