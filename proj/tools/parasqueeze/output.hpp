#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

namespace parasqueeze::cli {

// 17 significant digits, round-trip safe for IEEE doubles.
std::string fmt_g17(double v);

// Short form for axis labels and log lines.
std::string fmt_g6(double v);

// Deterministic CSV writer. Layout:
//   # parasqueeze-csv schema 1
//   # artifact parasqueeze <version>
//   # command <name>
//   # config <key> = <value>        (sorted, fully resolved)
//   col1,col2,...
//   <data rows, caller-formatted cells, empty cell = per-point failure>
// Comma separator, '.' decimal, LF endings, no timestamps, so identical
// configs rewrite identical bytes.
class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, const std::string& command,
          const std::map<std::string, std::string>& config);

  void columns(const std::vector<std::string>& names);
  void row(const std::vector<std::string>& cells);
  void close();  // flushes and throws on write failure

 private:
  std::ofstream out_;
  std::filesystem::path path_;
  std::size_t ncols_ = 0;
};

// One polyline of a static plot. Non-finite samples break the line into
// segments, which is how per-point scan failures show up.
struct PlotSeries {
  std::string name;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
};

// Minimal self-contained SVG line plot (axes, ticks, legend). Best effort:
// plots never gate acceptance, so write failures only return false.
bool write_svg_plot(const std::filesystem::path& path, const std::string& title,
                    const std::string& xlabel, const std::string& ylabel,
                    const std::vector<PlotSeries>& series, int width = 800,
                    int height = 500);

// Shared palette, indexable by series number.
const char* series_color(std::size_t i);

}  // namespace parasqueeze::cli
