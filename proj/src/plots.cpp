#include "bakeoff/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "bakeoff/classifier.hpp"

namespace bakeoff {

namespace {

constexpr double kWidth = 640;
constexpr double kHeight = 480;
constexpr double kMargin = 60;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

class Svg {
 public:
  Svg(double w, double h) {
    out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(w) << "\" height=\"" << num(h)
         << "\" viewBox=\"0 0 " << num(w) << ' ' << num(h) << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
         << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  }
  void line(double x1, double y1, double x2, double y2, const char* stroke = "black", double width = 1,
            const char* dash = nullptr) {
    out_ << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2) << "\" y2=\"" << num(y2)
         << "\" stroke=\"" << stroke << "\" stroke-width=\"" << num(width) << '"';
    if (dash) out_ << " stroke-dasharray=\"" << dash << '"';
    out_ << "/>\n";
  }
  void circle(double x, double y, double r, const char* fill) {
    out_ << "<circle cx=\"" << num(x) << "\" cy=\"" << num(y) << "\" r=\"" << num(r) << "\" fill=\"" << fill
         << "\"/>\n";
  }
  void rect(double x, double y, double w, double h, const char* fill) {
    out_ << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w) << "\" height=\"" << num(h)
         << "\" fill=\"" << fill << "\" stroke=\"black\"/>\n";
  }
  void text(double x, double y, const std::string& s, const char* anchor = "middle") {
    out_ << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" text-anchor=\"" << anchor << "\">" << escape(s)
         << "</text>\n";
  }
  std::string finish() {
    out_ << "</svg>\n";
    return out_.str();
  }

 private:
  std::ostringstream out_;
};

struct Frame {
  double x0, x1, y0, y1;  // data ranges
  double px(double x) const { return kMargin + (x - x0) / (x1 - x0) * (kWidth - 2 * kMargin); }
  double py(double y) const { return kHeight - kMargin - (y - y0) / (y1 - y0) * (kHeight - 2 * kMargin); }
};

void axes(Svg& svg, const Frame& f, const std::string& xlabel, const std::string& ylabel) {
  svg.line(kMargin, kHeight - kMargin, kWidth - kMargin, kHeight - kMargin);
  svg.line(kMargin, kMargin, kMargin, kHeight - kMargin);
  for (int i = 0; i <= 4; ++i) {
    const double xv = f.x0 + (f.x1 - f.x0) * i / 4.0;
    const double yv = f.y0 + (f.y1 - f.y0) * i / 4.0;
    svg.line(f.px(xv), kHeight - kMargin, f.px(xv), kHeight - kMargin + 5);
    svg.text(f.px(xv), kHeight - kMargin + 18, num(xv));
    svg.line(kMargin - 5, f.py(yv), kMargin, f.py(yv));
    svg.text(kMargin - 8, f.py(yv) + 4, num(yv), "end");
  }
  svg.text(kWidth / 2, kHeight - 15, xlabel);
  svg.text(15, kHeight / 2, ylabel, "start");
}

void save(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

std::filesystem::path with_ext(const std::filesystem::path& stem, const char* ext) {
  return std::filesystem::path(stem.string() + ext);
}

void finish_figure(const Table& t, const std::filesystem::path& stem, std::string (*render)(const Table&)) {
  if (stem.has_parent_path()) std::filesystem::create_directories(stem.parent_path());
  write_table(t, with_ext(stem, ".csv"));
  save(with_ext(stem, ".svg"), render(read_table(with_ext(stem, ".csv"))));
}

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

void write_table(const Table& t, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& row : t) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (row[i].find_first_of(",\n\"") != std::string::npos) {
        throw std::invalid_argument("table cell needs quoting: " + row[i]);
      }
      out << (i ? "," : "") << row[i];
    }
    out << '\n';
  }
}

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  Table t;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> row;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      row.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    t.push_back(std::move(row));
  }
  return t;
}

double cd_axis_x(double rank, std::size_t k) {
  const double span = k > 1 ? static_cast<double>(k - 1) : 1.0;
  return kMargin + (rank - 1.0) / span * (kWidth - 2 * kMargin);
}

void emit_cd_diagram(const std::vector<std::string>& names, const RankSummary& ranks, const CliqueSet& cliques,
                     const std::filesystem::path& stem) {
  if (names.size() != ranks.mean_ranks.size()) throw std::invalid_argument("names and ranks differ in length");
  Table t{{"kind", "name", "a", "b"}};
  for (std::size_t i : cliques.order) t.push_back({"rank", names[i], fmt6(ranks.mean_ranks[i]), ""});
  for (const auto& c : cliques.cliques) {
    std::string members;
    double lo = 1e300;
    double hi = -1e300;
    for (std::size_t i : c) {
      members += (members.empty() ? "" : "|") + names[i];
      lo = std::min(lo, ranks.mean_ranks[i]);
      hi = std::max(hi, ranks.mean_ranks[i]);
    }
    t.push_back({"clique", members, fmt6(lo), fmt6(hi)});
  }
  finish_figure(t, stem, render_cd_svg);
  save(with_ext(stem, ".txt"), render_cd_text(read_table(with_ext(stem, ".csv"))));
}

std::string render_cd_svg(const Table& t) {
  std::vector<std::pair<std::string, double>> ranks;
  std::vector<std::pair<double, double>> bars;
  for (std::size_t r = 1; r < t.size(); ++r) {
    if (t[r].at(0) == "rank") ranks.emplace_back(t[r].at(1), to_double(t[r].at(2)));
    // Singleton cliques get no bar.
    if (t[r].at(0) == "clique" && t[r].at(1).find('|') != std::string::npos) {
      bars.emplace_back(to_double(t[r].at(2)), to_double(t[r].at(3)));
    }
  }
  const std::size_t k = ranks.size();
  const double axis_y = 160;
  Svg svg(kWidth, 320);
  svg.line(cd_axis_x(1, k), axis_y, cd_axis_x(static_cast<double>(std::max<std::size_t>(k, 1)), k), axis_y);
  for (std::size_t r = 1; r <= k; ++r) {
    const double x = cd_axis_x(static_cast<double>(r), k);
    svg.line(x, axis_y - 5, x, axis_y + 5);
    svg.text(x, axis_y - 10, std::to_string(r));
  }
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    const double x = cd_axis_x(ranks[i].second, k);
    const bool above = i % 2 == 0;
    const double ty = above ? axis_y - 60 - 14.0 * static_cast<double>(i / 2) : axis_y + 60 + 14.0 * static_cast<double>(i / 2);
    svg.line(x, axis_y, x, ty + (above ? 4 : -12), "black", 1);
    svg.text(x, ty, ranks[i].first + " (" + num(ranks[i].second) + ")");
  }
  for (std::size_t b = 0; b < bars.size(); ++b) {
    const double y = axis_y + 15 + 8.0 * static_cast<double>(b);
    svg.line(cd_axis_x(bars[b].first, k) - 3, y, cd_axis_x(bars[b].second, k) + 3, y, "black", 4);
  }
  return svg.finish();
}

std::string render_cd_text(const Table& t) {
  std::ostringstream out;
  out << "mean ranks\n";
  for (std::size_t r = 1; r < t.size(); ++r) {
    if (t[r].at(0) == "rank") out << "  " << t[r].at(2) << "  " << t[r].at(1) << '\n';
  }
  out << "cliques\n";
  for (std::size_t r = 1; r < t.size(); ++r) {
    if (t[r].at(0) != "clique") continue;
    std::string m = t[r].at(1);
    std::replace(m.begin(), m.end(), '|', ' ');
    out << "  [" << t[r].at(2) << ", " << t[r].at(3) << "]  " << m << '\n';
  }
  return out.str();
}

void emit_scatter(const std::vector<std::string>& labels, const std::vector<double>& a,
                  const std::vector<double>& b, const std::string& name_a, const std::string& name_b,
                  const std::filesystem::path& stem) {
  if (a.empty() || a.size() != b.size() || labels.size() != a.size()) {
    throw std::invalid_argument("scatter needs equal-length, non-empty inputs");
  }
  Table t{{"label", name_a, name_b}};
  for (std::size_t i = 0; i < a.size(); ++i) t.push_back({labels[i], fmt6(a[i]), fmt6(b[i])});
  finish_figure(t, stem, render_scatter_svg);
}

std::string render_scatter_svg(const Table& t) {
  double lo = 1.0;
  double hi = 0.0;
  for (std::size_t r = 1; r < t.size(); ++r) {
    for (int c = 1; c <= 2; ++c) {
      lo = std::min(lo, to_double(t[r].at(c)));
      hi = std::max(hi, to_double(t[r].at(c)));
    }
  }
  lo = std::max(0.0, std::floor(lo * 10) / 10);
  hi = std::min(1.0, std::ceil(hi * 10) / 10);
  if (!(hi > lo)) hi = lo + 0.1;
  const Frame f{lo, hi, lo, hi};
  Svg svg(kWidth, kHeight);
  axes(svg, f, t[0].at(1), t[0].at(2));
  svg.line(f.px(lo), f.py(lo), f.px(hi), f.py(hi), "gray", 1, "4 3");
  for (std::size_t r = 1; r < t.size(); ++r) {
    svg.circle(f.px(to_double(t[r].at(1))), f.py(to_double(t[r].at(2))), 3.5, "steelblue");
  }
  return svg.finish();
}

void emit_histogram(const std::vector<double>& diffs, double bin_width, const std::filesystem::path& stem) {
  if (diffs.empty()) throw std::invalid_argument("histogram of no values");
  if (!(bin_width > 0)) throw std::invalid_argument("bin width must be positive");
  std::map<long, std::size_t> bins;
  for (double d : diffs) ++bins[static_cast<long>(std::floor(d / bin_width))];
  Table t{{"bin_low", "bin_high", "count"}};
  for (const auto& [i, c] : bins) {
    t.push_back({fmt6(static_cast<double>(i) * bin_width), fmt6(static_cast<double>(i + 1) * bin_width),
                 std::to_string(c)});
  }
  finish_figure(t, stem, render_histogram_svg);
}

std::string render_histogram_svg(const Table& t) {
  double lo = 1e300;
  double hi = -1e300;
  double top = 1;
  for (std::size_t r = 1; r < t.size(); ++r) {
    lo = std::min(lo, to_double(t[r].at(0)));
    hi = std::max(hi, to_double(t[r].at(1)));
    top = std::max(top, to_double(t[r].at(2)));
  }
  const Frame f{lo, hi, 0, top};
  Svg svg(kWidth, kHeight);
  axes(svg, f, "difference", "count");
  for (std::size_t r = 1; r < t.size(); ++r) {
    const double x0 = f.px(to_double(t[r].at(0)));
    const double x1 = f.px(to_double(t[r].at(1)));
    const double y = f.py(to_double(t[r].at(2)));
    svg.rect(x0, y, x1 - x0, f.py(0) - y, "lightsteelblue");
  }
  if (lo < 0 && hi > 0) svg.line(f.px(0), f.py(0), f.px(0), f.py(top), "gray", 1, "4 3");
  return svg.finish();
}

void emit_sharpshooter(const std::vector<std::string>& labels, const SharpshooterSummary& s,
                       const std::filesystem::path& stem) {
  if (s.points.empty() || labels.size() != s.points.size()) {
    throw std::invalid_argument("sharpshooter needs one label per point");
  }
  Table t{{"label", "train_ratio", "test_ratio", "quadrant"}};
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    t.push_back({labels[i], fmt6(s.points[i].train_ratio), fmt6(s.points[i].test_ratio),
                 quadrant_name(s.points[i].quadrant)});
  }
  finish_figure(t, stem, render_sharpshooter_svg);
}

std::string render_sharpshooter_svg(const Table& t) {
  double lo = 1.0;
  double hi = 1.0;
  for (std::size_t r = 1; r < t.size(); ++r) {
    for (int c = 1; c <= 2; ++c) {
      lo = std::min(lo, to_double(t[r].at(c)));
      hi = std::max(hi, to_double(t[r].at(c)));
    }
  }
  const double pad = std::max(0.01, 0.1 * (hi - lo));
  const Frame f{lo - pad, hi + pad, lo - pad, hi + pad};
  Svg svg(kWidth, kHeight);
  axes(svg, f, "train CV accuracy ratio", "test accuracy ratio");
  svg.line(f.px(1), f.py(f.y0), f.px(1), f.py(f.y1), "gray");
  svg.line(f.px(f.x0), f.py(1), f.px(f.x1), f.py(1), "gray");
  svg.text(f.px(f.x1) - 10, f.py(f.y1) + 14, "TP", "end");
  svg.text(f.px(f.x0) + 10, f.py(f.y0) - 6, "TN", "start");
  svg.text(f.px(f.x1) - 10, f.py(f.y0) - 6, "FP", "end");
  svg.text(f.px(f.x0) + 10, f.py(f.y1) + 14, "FN", "start");
  for (std::size_t r = 1; r < t.size(); ++r) {
    const std::string& q = t[r].at(3);
    svg.circle(f.px(to_double(t[r].at(1))), f.py(to_double(t[r].at(2))), 3.5,
               q == "TP" || q == "TN" ? "seagreen" : "firebrick");
  }
  return svg.finish();
}

void emit_param_frequency(const std::vector<std::string>& choices, const std::filesystem::path& stem) {
  if (choices.empty()) throw std::invalid_argument("parameter frequency of no choices");
  std::map<std::string, std::size_t> counts;
  for (const auto& c : choices) ++counts[c];
  std::vector<std::pair<std::string, std::size_t>> rows(counts.begin(), counts.end());
  const bool numeric = std::all_of(rows.begin(), rows.end(), [](const auto& r) {
    char* end = nullptr;
    std::strtod(r.first.c_str(), &end);
    return !r.first.empty() && *end == '\0';
  });
  if (numeric) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return std::stod(a.first) < std::stod(b.first); });
  }
  Table t{{"setting", "count", "proportion"}};
  for (const auto& [k, c] : rows) {
    t.push_back({k, std::to_string(c),
                 format_double(static_cast<double>(c) / static_cast<double>(choices.size()))});
  }
  finish_figure(t, stem, render_param_frequency_svg);
}

std::string render_param_frequency_svg(const Table& t) {
  const std::size_t n = t.size() > 1 ? t.size() - 1 : 1;
  double top = 0;
  for (std::size_t r = 1; r < t.size(); ++r) top = std::max(top, to_double(t[r].at(2)));
  const Frame f{0, static_cast<double>(n), 0, std::max(top, 0.1)};
  Svg svg(kWidth, kHeight);
  axes(svg, f, "setting", "proportion");
  const double slot = (kWidth - 2 * kMargin) / static_cast<double>(n);
  for (std::size_t r = 1; r < t.size(); ++r) {
    const double x = kMargin + slot * static_cast<double>(r - 1);
    const double y = f.py(to_double(t[r].at(2)));
    svg.rect(x + 0.1 * slot, y, 0.8 * slot, f.py(0) - y, "lightsteelblue");
    svg.text(x + 0.5 * slot, f.py(0) + 32 + 12.0 * static_cast<double>((r - 1) % 2), t[r].at(0));
  }
  return svg.finish();
}

}  // namespace bakeoff
