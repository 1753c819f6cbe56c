#include "output.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace parasqueeze::cli {

std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_g6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

CsvFile::CsvFile(const std::filesystem::path& path, const std::string& command,
                 const std::map<std::string, std::string>& config)
    : out_(path, std::ios::binary), path_(path) {
  if (!out_) throw std::runtime_error("cannot open output file '" + path.string() + "'");
  out_ << "# parasqueeze-csv schema 1\n";
  out_ << "# artifact parasqueeze " << PARASQUEEZE_VERSION << "\n";
  out_ << "# command " << command << "\n";
  for (const auto& [key, value] : config) out_ << "# config " << key << " = " << value << "\n";
}

void CsvFile::columns(const std::vector<std::string>& names) {
  ncols_ = names.size();
  for (std::size_t i = 0; i < names.size(); ++i)
    out_ << names[i] << (i + 1 < names.size() ? "," : "\n");
}

void CsvFile::row(const std::vector<std::string>& cells) {
  if (cells.size() != ncols_)
    throw std::logic_error("CSV row width mismatch in '" + path_.string() + "'");
  for (std::size_t i = 0; i < cells.size(); ++i)
    out_ << cells[i] << (i + 1 < cells.size() ? "," : "\n");
}

void CsvFile::close() {
  out_.flush();
  if (!out_) throw std::runtime_error("write failure on '" + path_.string() + "'");
  out_.close();
}

const char* series_color(std::size_t i) {
  static constexpr std::array<const char*, 6> palette = {
      "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#7f7f7f"};
  return palette[i % palette.size()];
}

namespace {

bool finite(double v) { return std::isfinite(v); }

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace

bool write_svg_plot(const std::filesystem::path& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<PlotSeries>& series, int width, int height) {
  double xmin = 0.0, xmax = 0.0, ymin = 0.0, ymax = 0.0;
  bool any = false;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!finite(s.x[i]) || !finite(s.y[i])) continue;
      if (!any) {
        xmin = xmax = s.x[i];
        ymin = ymax = s.y[i];
        any = true;
      } else {
        xmin = std::min(xmin, s.x[i]);
        xmax = std::max(xmax, s.x[i]);
        ymin = std::min(ymin, s.y[i]);
        ymax = std::max(ymax, s.y[i]);
      }
    }
  if (!any) return false;
  if (xmax == xmin) {
    xmin -= 1.0;
    xmax += 1.0;
  }
  if (ymax == ymin) {
    ymin -= 1.0;
    ymax += 1.0;
  }
  const double ypad = 0.05 * (ymax - ymin);
  ymin -= ypad;
  ymax += ypad;

  const double ml = 76.0, mr = 18.0, mt = 40.0, mb = 52.0;
  const double pw = width - ml - mr;
  const double ph = height - mt - mb;
  auto sx = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return mt + (ymax - y) / (ymax - ymin) * ph; };

  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
  out << "<rect width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << xml_escape(title) << "</text>\n";

  // frame and ticks
  out << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"#333\"/>\n";
  const int nticks = 5;
  for (int i = 0; i < nticks; ++i) {
    const double fx = xmin + (xmax - xmin) * i / (nticks - 1);
    const double fy = ymin + (ymax - ymin) * i / (nticks - 1);
    out << "<line x1=\"" << sx(fx) << "\" y1=\"" << mt + ph << "\" x2=\"" << sx(fx) << "\" y2=\""
        << mt + ph + 5 << "\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << sx(fx) << "\" y=\"" << mt + ph + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << fmt_g6(fx)
        << "</text>\n";
    out << "<line x1=\"" << ml - 5 << "\" y1=\"" << sy(fy) << "\" x2=\"" << ml << "\" y2=\""
        << sy(fy) << "\" stroke=\"#333\"/>\n";
    out << "<text x=\"" << ml - 8 << "\" y=\"" << sy(fy) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt_g6(fy)
        << "</text>\n";
  }
  out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << xml_escape(xlabel) << "</text>\n";
  out << "<text x=\"18\" y=\"" << mt + ph / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
      << "transform=\"rotate(-90 18 " << mt + ph / 2 << ")\">" << xml_escape(ylabel)
      << "</text>\n";

  for (const auto& s : series) {
    bool open = false;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      const bool ok = finite(s.x[i]) && finite(s.y[i]);
      if (ok && !open) {
        out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
        open = true;
      }
      if (ok) out << fmt_g6(sx(s.x[i])) << "," << fmt_g6(sy(s.y[i])) << " ";
      if (!ok && open) {
        out << "\"/>\n";
        open = false;
      }
    }
    if (open) out << "\"/>\n";
  }

  // legend, top right inside the frame
  double ly = mt + 16;
  for (const auto& s : series) {
    if (s.name.empty()) continue;
    out << "<line x1=\"" << ml + pw - 150 << "\" y1=\"" << ly - 4 << "\" x2=\"" << ml + pw - 122
        << "\" y2=\"" << ly - 4 << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << ml + pw - 116 << "\" y=\"" << ly
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(s.name) << "</text>\n";
    ly += 17;
  }

  out << "</svg>\n";
  out.flush();
  return static_cast<bool>(out);
}

}  // namespace parasqueeze::cli
