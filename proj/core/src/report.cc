// Copyright 2026 The advgrasp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "advgrasp/report.h"

#include <png.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>

#include "advgrasp/dataset.h"

namespace advgrasp {

namespace fs = std::filesystem;

namespace {

std::string Format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

std::string Pad(const std::string& s, std::size_t width, bool left = false) {
  if (s.size() >= width) return s;
  const std::string fill(width - s.size(), ' ');
  return left ? s + fill : fill + s;
}

std::string RegimeHeader(const RegimeSpec& r) {
  return "regime " + r.name + ": grip " + Format("%g", r.grip_force) + " N, " +
         std::to_string(r.n_candidates) + " candidates, friction x" +
         Format("%g", r.friction_scale);
}

const ResultsTable* FindTable(const std::vector<ResultsTable>& tables,
                              const std::string& regime) {
  for (const ResultsTable& t : tables) {
    if (t.regime == regime) return &t;
  }
  return nullptr;
}

// ----- Raster -----

struct Canvas {
  int width, height;
  std::vector<std::uint8_t> rgb;

  Canvas(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, 255) {}

  void Set(int x, int y, std::array<std::uint8_t, 3> c) {
    if (x < 0 || y < 0 || x >= width || y >= height) return;
    std::uint8_t* p = &rgb[(static_cast<std::size_t>(y) * width + x) * 3];
    p[0] = c[0];
    p[1] = c[1];
    p[2] = c[2];
  }

  void Line(int x0, int y0, int x1, int y1, std::array<std::uint8_t, 3> c,
            int thickness = 1) {
    const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    for (;;) {
      for (int ox = 0; ox < thickness; ++ox) {
        for (int oy = 0; oy < thickness; ++oy) Set(x0 + ox, y0 + oy, c);
      }
      if (x0 == x1 && y0 == y1) break;
      const int e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        x0 += sx;
      }
      if (e2 <= dx) {
        err += dx;
        y0 += sy;
      }
    }
  }

  void Box(int x0, int y0, int x1, int y1, std::array<std::uint8_t, 3> c) {
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) Set(x, y, c);
    }
  }

  void Text(int x, int y, const std::string& text, std::array<std::uint8_t, 3> c);
};

// 5x7 glyphs, one byte per row, bit 4 is the leftmost column.
const std::map<char, std::array<std::uint8_t, 7>>& Glyphs() {
  static const std::map<char, std::array<std::uint8_t, 7>> glyphs = {
      {'0', {14, 17, 19, 21, 25, 17, 14}}, {'1', {4, 12, 4, 4, 4, 4, 14}},
      {'2', {14, 17, 1, 2, 4, 8, 31}},     {'3', {31, 2, 4, 2, 1, 17, 14}},
      {'4', {2, 6, 10, 18, 31, 2, 2}},     {'5', {31, 16, 30, 1, 1, 17, 14}},
      {'6', {6, 8, 16, 30, 17, 17, 14}},   {'7', {31, 1, 2, 4, 8, 8, 8}},
      {'8', {14, 17, 17, 14, 17, 17, 14}}, {'9', {14, 17, 17, 15, 1, 2, 12}},
      {'A', {14, 17, 17, 31, 17, 17, 17}}, {'B', {30, 17, 17, 30, 17, 17, 30}},
      {'C', {14, 17, 16, 16, 16, 17, 14}}, {'D', {28, 18, 17, 17, 17, 18, 28}},
      {'E', {31, 16, 16, 30, 16, 16, 31}}, {'F', {31, 16, 16, 30, 16, 16, 16}},
      {'G', {14, 17, 16, 23, 17, 17, 15}}, {'H', {17, 17, 17, 31, 17, 17, 17}},
      {'I', {14, 4, 4, 4, 4, 4, 14}},      {'J', {7, 2, 2, 2, 2, 18, 12}},
      {'K', {17, 18, 20, 24, 20, 18, 17}}, {'L', {16, 16, 16, 16, 16, 16, 31}},
      {'M', {17, 27, 21, 21, 17, 17, 17}}, {'N', {17, 17, 25, 21, 19, 17, 17}},
      {'O', {14, 17, 17, 17, 17, 17, 14}}, {'P', {30, 17, 17, 30, 16, 16, 16}},
      {'Q', {14, 17, 17, 17, 21, 18, 13}}, {'R', {30, 17, 17, 30, 20, 18, 17}},
      {'S', {15, 16, 16, 14, 1, 1, 30}},   {'T', {31, 4, 4, 4, 4, 4, 4}},
      {'U', {17, 17, 17, 17, 17, 17, 14}}, {'V', {17, 17, 17, 17, 17, 10, 4}},
      {'W', {17, 17, 17, 21, 21, 21, 10}}, {'X', {17, 17, 10, 4, 10, 17, 17}},
      {'Y', {17, 17, 17, 10, 4, 4, 4}},    {'Z', {31, 1, 2, 4, 8, 16, 31}},
      {'.', {0, 0, 0, 0, 0, 12, 12}},      {'-', {0, 0, 0, 31, 0, 0, 0}},
      {'%', {24, 25, 2, 4, 8, 19, 3}},     {':', {0, 12, 12, 0, 12, 12, 0}},
      {'/', {0, 1, 2, 4, 8, 16, 0}},       {'(', {2, 4, 8, 8, 8, 4, 2}},
      {')', {8, 4, 2, 2, 2, 4, 8}},        {'_', {0, 0, 0, 0, 0, 0, 31}},
      {'+', {0, 4, 4, 31, 4, 4, 0}},       {' ', {0, 0, 0, 0, 0, 0, 0}},
  };
  return glyphs;
}

void Canvas::Text(int x, int y, const std::string& text,
                  std::array<std::uint8_t, 3> c) {
  for (char ch : text) {
    const char up = (ch >= 'a' && ch <= 'z') ? static_cast<char>(ch - 'a' + 'A') : ch;
    auto it = Glyphs().find(up);
    if (it != Glyphs().end()) {
      for (int row = 0; row < 7; ++row) {
        for (int col = 0; col < 5; ++col) {
          if (it->second[row] & (16 >> col)) Set(x + col, y + row, c);
        }
      }
    }
    x += 6;
  }
}

void WritePng(const fs::path& path, const Canvas& canvas) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  FILE* f = std::fopen(path.string().c_str(), "wb");
  if (!f) throw std::runtime_error("cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(f);
    throw std::runtime_error("PNG encoding failed for " + path.string());
  }
  png_init_io(png, f);
  png_set_IHDR(png, info, canvas.width, canvas.height, 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < canvas.height; ++y) {
    png_write_row(png, const_cast<png_bytep>(
                           &canvas.rgb[static_cast<std::size_t>(y) * canvas.width * 3]));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(f);
}

double Mean(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double s = 0.0;
  for (double x : v) s += x;
  return s / v.size();
}

}  // namespace

int ResultsTable::ColumnSuccesses(std::size_t column) const {
  int n = 0;
  for (const auto& row : successes) n += row[column];
  return n;
}

int ResultsTable::ColumnTries() const { return static_cast<int>(rows.size()) * tries; }

double ResultsTable::Overall(std::size_t column) const {
  const int t = ColumnTries();
  return t ? static_cast<double>(ColumnSuccesses(column)) / t : 0.0;
}

std::vector<ResultsTable> BuildResultsTables(const SeedResult& seed) {
  std::vector<ResultsTable> tables;
  for (const auto& [regime, columns] : seed.eval) {
    ResultsTable t;
    t.seed = seed.seed;
    t.regime = regime;
    if (columns.empty()) continue;
    const std::vector<ObjectTally>& objects = columns.front().column.objects;
    t.tries = objects.empty() ? 0 : objects.front().tries;
    std::map<Difficulty, int> counters;
    for (const ObjectTally& o : objects) {
      t.rows.push_back(std::string(DifficultyName(o.difficulty)) + "-" +
                       std::to_string(counters[o.difficulty]++));
    }
    t.successes.assign(objects.size(), {});
    for (const LabeledColumn& c : columns) {
      if (c.column.objects.size() != objects.size()) {
        throw std::invalid_argument("columns evaluate different object sets");
      }
      t.columns.push_back(c.label);
      for (std::size_t r = 0; r < objects.size(); ++r) {
        if (c.column.objects[r].tries != t.tries) {
          throw std::invalid_argument("columns use different try counts");
        }
        t.successes[r].push_back(c.column.objects[r].successes);
      }
    }
    tables.push_back(std::move(t));
  }
  return tables;
}

std::string FormatTextTables(const ExperimentConfig& config,
                             const std::vector<SeedResult>& seeds) {
  std::string s = "Experiment " + config.name + "\n";
  s += "Grasping success on held-out objects (successes out of " +
       std::to_string(config.tries_per_object) + " tries; lifted under the regime's grip)\n";
  for (const SeedResult& seed : seeds) {
    const std::vector<ResultsTable> tables = BuildResultsTables(seed);
    for (const RegimeSpec& regime : config.eval_regimes) {
      const ResultsTable* t = FindTable(tables, regime.name);
      if (!t) continue;
      s += "\nSeed " + std::to_string(seed.seed) + ", " + RegimeHeader(regime) + "\n";
      std::size_t w = 8;
      for (const std::string& c : t->columns) w = std::max(w, c.size() + 2);
      s += Pad("object", 10, true);
      for (const std::string& c : t->columns) s += Pad(c, w);
      s += "\n";
      for (std::size_t r = 0; r < t->rows.size(); ++r) {
        s += Pad(t->rows[r], 10, true);
        for (int v : t->successes[r]) s += Pad(std::to_string(v), w);
        s += "\n";
      }
      s += Pad("total", 10, true);
      for (std::size_t c = 0; c < t->columns.size(); ++c) {
        s += Pad(std::to_string(t->ColumnSuccesses(c)) + "/" +
                     std::to_string(t->ColumnTries()),
                 w);
      }
      s += "\n" + Pad("overall", 10, true);
      for (std::size_t c = 0; c < t->columns.size(); ++c) {
        s += Pad(Format("%.1f%%", 100.0 * t->Overall(c)), w);
      }
      s += "\n";
    }
  }

  if (!seeds.empty()) {
    s += "\nMean overall success over " + std::to_string(seeds.size()) + " seed(s)\n";
    for (const RegimeSpec& regime : config.eval_regimes) {
      std::vector<std::string> labels;
      std::map<std::string, std::vector<double>> values;
      for (const SeedResult& seed : seeds) {
        auto it = seed.eval.find(regime.name);
        if (it == seed.eval.end()) continue;
        for (const LabeledColumn& c : it->second) {
          if (!values.count(c.label)) labels.push_back(c.label);
          values[c.label].push_back(c.column.overall());
        }
      }
      s += Pad(regime.name, 10, true);
      for (const std::string& l : labels) {
        s += "  " + l + " " + Format("%.1f%%", 100.0 * Mean(values[l]));
      }
      s += "\n";
    }
  }

  bool header = false;
  for (const SeedResult& seed : seeds) {
    if (!seed.probes) continue;
    if (!header) {
      s += "\nShake adversary probes (dislodge rates)\n";
      header = true;
    }
    const ProbeResults& p = *seed.probes;
    s += "seed " + std::to_string(seed.seed) + ": random " +
         Format("%.3f", p.random_dislodge_rate) + ", best action " +
         Format("%.3f", p.best_dislodge_rate) + ", trained";
    for (double r : p.trained_dislodge_rate) s += " " + Format("%.3f", r);
    s += " on " + std::to_string(p.probe_grasps) + " grasps; final adversary vs protagonist";
    for (std::size_t i = 0; i < p.robustness_successes.size(); ++i) {
      s += " " + Format("%.3f", p.robustness_rate(i)) + " (" +
           std::to_string(p.robustness_dislodged[i]) + "/" +
           std::to_string(p.robustness_successes[i]) + ")";
    }
    s += "\n";
  }

  s += "\nGrasp attempts per arm\n";
  for (const SeedResult& seed : seeds) {
    const auto attempts = [&](const char* phase) {
      long n = 0;
      auto it = seed.metrics.find(phase);
      if (it != seed.metrics.end()) {
        for (const IterationMetrics& m : it->second) n += m.attempts;
      }
      return n;
    };
    const long init = attempts("init");
    s += "seed " + std::to_string(seed.seed) + ":";
    if (seed.metrics.count("baseline")) {
      s += " baseline " + std::to_string(init + attempts("baseline"));
    }
    if (seed.metrics.count("shake")) {
      s += " shake " + std::to_string(init + attempts("shake"));
    }
    if (seed.metrics.count("snatch")) {
      s += " shake_snatch " +
           std::to_string(init + attempts("shake") + attempts("snatch"));
    }
    s += "\n";
  }
  return s;
}

std::string FormatCsvTables(const std::vector<SeedResult>& seeds) {
  std::string s;
  for (const SeedResult& seed : seeds) {
    for (const ResultsTable& t : BuildResultsTables(seed)) {
      s += "seed,regime,object";
      for (const std::string& c : t.columns) s += "," + c;
      s += "\n";
      const std::string prefix = std::to_string(t.seed) + "," + t.regime + ",";
      for (std::size_t r = 0; r < t.rows.size(); ++r) {
        s += prefix + t.rows[r];
        for (int v : t.successes[r]) s += "," + std::to_string(v);
        s += "\n";
      }
      s += prefix + "overall";
      for (std::size_t c = 0; c < t.columns.size(); ++c) {
        s += "," + std::to_string(t.ColumnSuccesses(c)) + "/" +
             std::to_string(t.ColumnTries());
      }
      s += "\n";
    }
  }
  return s;
}

void WriteLinePlot(const fs::path& path, const std::string& title,
                   const std::vector<PlotSeries>& series) {
  constexpr int kW = 640, kH = 400, kLeft = 50, kRight = 150, kTop = 30, kBottom = 40;
  static const std::array<std::array<std::uint8_t, 3>, 6> kColors = {{
      {31, 119, 180}, {214, 39, 40}, {44, 160, 44}, {148, 103, 189}, {255, 127, 14},
      {23, 190, 207}}};
  const std::array<std::uint8_t, 3> black{0, 0, 0}, grey{220, 220, 220};
  Canvas canvas(kW, kH);
  std::size_t n = 1;
  for (const PlotSeries& s : series) n = std::max(n, s.values.size());
  const int x0 = kLeft, x1 = kW - kRight, y0 = kH - kBottom, y1 = kTop;
  const auto px = [&](std::size_t i) {
    return n == 1 ? (x0 + x1) / 2
                  : x0 + static_cast<int>(std::lround(static_cast<double>(i) *
                                                      (x1 - x0) / (n - 1)));
  };
  const auto py = [&](double v) {
    return y0 - static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * (y0 - y1)));
  };
  for (int k = 0; k <= 5; ++k) {
    const double v = k / 5.0;
    canvas.Line(x0, py(v), x1, py(v), grey);
    canvas.Text(x0 - 28, py(v) - 3, Format("%.1f", v), black);
  }
  for (std::size_t i = 0; i < n; ++i) {
    canvas.Line(px(i), y0, px(i), y0 + 4, black);
    canvas.Text(px(i) - 2, y0 + 8, std::to_string(i), black);
  }
  canvas.Line(x0, y0, x1, y0, black);
  canvas.Line(x0, y0, x0, y1, black);
  canvas.Text(x0, 10, title, black);
  canvas.Text((x0 + x1) / 2 - 27, kH - 16, "ITERATION", black);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto color = kColors[k % kColors.size()];
    const std::vector<double>& v = series[k].values;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (std::isnan(v[i])) continue;
      canvas.Box(px(i) - 2, py(v[i]) - 2, px(i) + 2, py(v[i]) + 2, color);
      if (i + 1 < v.size() && !std::isnan(v[i + 1])) {
        canvas.Line(px(i), py(v[i]), px(i + 1), py(v[i + 1]), color, 2);
      }
    }
    const int ly = kTop + 14 * static_cast<int>(k);
    canvas.Box(x1 + 12, ly, x1 + 22, ly + 6, color);
    canvas.Text(x1 + 28, ly, series[k].name, black);
  }
  WritePng(path, canvas);
}

void EmitReport(const ExperimentConfig& config, const ExperimentResult& result,
                const fs::path& out) {
  WriteFileAtomic(out / "results.txt", FormatTextTables(config, result.seeds));
  WriteFileAtomic(out / "results.csv", FormatCsvTables(result.seeds));

  const std::string regime =
      config.eval_regimes.empty() ? "low" : config.eval_regimes.front().name;
  std::vector<PlotSeries> success;
  for (const char* phase : {"baseline", "shake", "snatch"}) {
    PlotSeries s{phase, {}};
    for (int i = 0;; ++i) {
      std::vector<double> v;
      const std::string label = std::string(phase) + "-" + std::to_string(i);
      for (const SeedResult& seed : result.seeds) {
        if (const EvalColumn* c = seed.Column(regime, label)) v.push_back(c->overall());
      }
      if (v.empty()) break;
      s.values.push_back(Mean(v));
    }
    if (!s.values.empty()) success.push_back(std::move(s));
  }
  WriteLinePlot(out / "success_vs_iteration.png", "HELD-OUT SUCCESS (" + regime + ")",
                success);

  std::vector<PlotSeries> dislodge;
  for (const char* phase : {"shake", "snatch"}) {
    PlotSeries s{std::string(phase) + " collect", {}};
    for (std::size_t i = 0;; ++i) {
      std::vector<double> v;
      for (const SeedResult& seed : result.seeds) {
        auto it = seed.metrics.find(phase);
        if (it != seed.metrics.end() && i < it->second.size()) {
          v.push_back(it->second[i].dislodge_rate());
        }
      }
      if (v.empty()) break;
      s.values.push_back(Mean(v));
    }
    if (!s.values.empty()) dislodge.push_back(std::move(s));
  }
  PlotSeries probe{"shake probe", {}};
  for (std::size_t i = 0;; ++i) {
    std::vector<double> v;
    for (const SeedResult& seed : result.seeds) {
      if (seed.probes && i < seed.probes->robustness_successes.size()) {
        v.push_back(seed.probes->robustness_rate(i));
      }
    }
    if (v.empty()) break;
    probe.values.push_back(Mean(v));
  }
  if (!probe.values.empty()) dislodge.push_back(std::move(probe));
  WriteLinePlot(out / "dislodge_vs_iteration.png", "ADVERSARY DISLODGE RATE", dislodge);
}

}  // namespace advgrasp
