#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "war/data.hpp"
#include "war/mlp.hpp"

namespace war {

/// Dense classification grid over a 2-D input rectangle: argmax class and the
/// full probability row per cell. Cells are sampled at their centers.
struct BoundaryGrid {
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  int resolution = 0;
  int classes = 0;
  std::vector<int> argmax;     // resolution * resolution, row-major by y then x
  std::vector<double> probs;   // resolution * resolution * classes

  double cell_x(int ix) const { return x0 + (ix + 0.5) * (x1 - x0) / resolution; }
  double cell_y(int iy) const { return y0 + (iy + 0.5) * (y1 - y0) / resolution; }
  int at(int ix, int iy) const { return argmax[static_cast<size_t>(iy) * resolution + ix]; }
};

inline BoundaryGrid boundary_grid(const MlpModel& model, double x0, double x1, double y0,
                                  double y1, int resolution) {
  if (model.input_dim() != 2)
    throw config_error("boundary_grid: model input dimension is " +
                       std::to_string(model.input_dim()) + ", need 2");
  if (resolution < 1) throw config_error("boundary_grid: resolution must be >= 1");
  if (!(x1 > x0) || !(y1 > y0)) throw config_error("boundary_grid: empty range");

  BoundaryGrid g;
  g.x0 = x0;
  g.x1 = x1;
  g.y0 = y0;
  g.y1 = y1;
  g.resolution = resolution;
  g.classes = model.output_dim();
  g.argmax.resize(static_cast<size_t>(resolution) * resolution);
  g.probs.resize(static_cast<size_t>(resolution) * resolution * g.classes);

  std::vector<double> row(static_cast<size_t>(resolution) * 2);
  for (int iy = 0; iy < resolution; ++iy) {
    for (int ix = 0; ix < resolution; ++ix) {
      row[static_cast<size_t>(ix) * 2] = g.cell_x(ix);
      row[static_cast<size_t>(ix) * 2 + 1] = g.cell_y(iy);
    }
    auto probs = model.forward_values(row.data(), resolution);
    for (int ix = 0; ix < resolution; ++ix) {
      const double* p = probs.data() + static_cast<size_t>(ix) * g.classes;
      int arg = 0;
      for (int c = 1; c < g.classes; ++c)
        if (p[c] > p[arg]) arg = c;
      size_t cell = static_cast<size_t>(iy) * resolution + ix;
      g.argmax[cell] = arg;
      std::copy(p, p + g.classes, g.probs.begin() + static_cast<int64_t>(cell) * g.classes);
    }
  }
  return g;
}

inline void save_grid_csv(const BoundaryGrid& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write " + path);
  out.precision(10);
  out << "x,y,argmax";
  for (int c = 0; c < g.classes; ++c) out << ",p" << c;
  out << "\n";
  for (int iy = 0; iy < g.resolution; ++iy)
    for (int ix = 0; ix < g.resolution; ++ix) {
      size_t cell = static_cast<size_t>(iy) * g.resolution + ix;
      out << g.cell_x(ix) << "," << g.cell_y(iy) << "," << g.argmax[cell];
      for (int c = 0; c < g.classes; ++c)
        out << "," << g.probs[cell * static_cast<size_t>(g.classes) + c];
      out << "\n";
    }
}

inline const char* class_color(int c) {
  // first three entries match the toy palette (black, red, orange)
  static const char* palette[] = {"#2b2b2b", "#d62728", "#ff8c00", "#1f77b4", "#2ca02c",
                                  "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#17becf"};
  return palette[c % 10];
}

/// Decision regions as colored cells, optionally overlaid with dataset
/// points. Text-only output, no raster dependencies.
inline void save_grid_svg(const BoundaryGrid& g, const std::string& path,
                          const Dataset* points = nullptr) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write " + path);
  const double W = 640, H = 640;
  double sx = W / (g.x1 - g.x0), sy = H / (g.y1 - g.y0);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  double cw = W / g.resolution, ch = H / g.resolution;
  for (int iy = 0; iy < g.resolution; ++iy)
    for (int ix = 0; ix < g.resolution; ++ix) {
      // SVG y axis points down; flip so larger y is at the top
      double px = ix * cw;
      double py = H - (iy + 1) * ch;
      out << "<rect x=\"" << px << "\" y=\"" << py << "\" width=\"" << cw + 0.5
          << "\" height=\"" << ch + 0.5 << "\" fill=\"" << class_color(g.at(ix, iy))
          << "\" fill-opacity=\"0.45\"/>\n";
    }
  if (points) {
    for (int i = 0; i < points->n; ++i) {
      double px = (points->row(i)[0] - g.x0) * sx;
      double py = H - (points->row(i)[1] - g.y0) * sy;
      if (px < 0 || px > W || py < 0 || py > H) continue;
      out << "<circle cx=\"" << px << "\" cy=\"" << py << "\" r=\"3\" fill=\""
          << class_color(points->labels[static_cast<size_t>(i)])
          << "\" stroke=\"black\" stroke-width=\"0.6\"/>\n";
    }
  }
  out << "</svg>\n";
}

}  // namespace war
