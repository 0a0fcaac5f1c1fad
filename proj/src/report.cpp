#include "gphsmm/report.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <sstream>

namespace gphsmm {

namespace {

std::string fmt(double v, int digits = 4) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

double mean(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace

Histogram nld_histogram(std::span<const double> values, std::size_t bins) {
  Histogram h;
  h.counts.assign(std::max<std::size_t>(bins, 1), 0);
  for (double v : values) {
    const double x = std::clamp(v, 0.0, 1.0);
    auto b = static_cast<std::size_t>(x * static_cast<double>(h.counts.size()));
    h.counts[std::min(b, h.counts.size() - 1)]++;
  }
  return h;
}

std::string nld_table(std::span<const MethodResult> results) {
  std::ostringstream os;
  os << "method\ttrials\tbest_run\telement_nld\tunit_nld\tdistinct_units\tmean_element_nld\tmean_unit_nld\n";
  for (const auto& r : results) {
    os << r.method << '\t' << r.element_nld.size() << '\t' << r.best << '\t';
    os << (r.best < r.element_nld.size() ? fmt(r.element_nld[r.best]) : "") << '\t';
    os << (r.best < r.unit_nld.size() ? fmt(r.unit_nld[r.best]) : "") << '\t';
    if (r.best < r.distinct_units.size()) os << r.distinct_units[r.best];
    os << '\t' << fmt(mean(r.element_nld)) << '\t';
    if (!r.unit_nld.empty()) os << fmt(mean(r.unit_nld));
    os << '\n';
  }
  return os.str();
}

std::string histogram_tsv(std::span<const MethodResult> results, std::size_t bins) {
  std::ostringstream os;
  os << "method\tlevel\tbin_lo\tbin_hi\tcount\n";
  for (const auto& r : results) {
    for (int level = 0; level < 2; ++level) {
      const auto& values = level == 0 ? r.element_nld : r.unit_nld;
      if (values.empty()) continue;
      const auto h = nld_histogram(values, bins);
      for (std::size_t b = 0; b < h.counts.size(); ++b)
        os << r.method << '\t' << (level == 0 ? "element" : "unit") << '\t'
           << fmt(h.lo + h.bin_width() * static_cast<double>(b), 2) << '\t'
           << fmt(h.lo + h.bin_width() * static_cast<double>(b + 1), 2) << '\t' << h.counts[b]
           << '\n';
    }
  }
  return os.str();
}

std::string histogram_svg(std::span<const MethodResult> results, std::size_t bins) {
  struct Panel {
    std::string title;
    Histogram h;
  };
  std::vector<Panel> panels;
  for (const auto& r : results) {
    panels.push_back({r.method + " element NLD", nld_histogram(r.element_nld, bins)});
    if (!r.unit_nld.empty()) panels.push_back({r.method + " unit NLD", nld_histogram(r.unit_nld, bins)});
  }
  const int pw = 260, ph = 180, pad = 30;
  const int cols = std::max<int>(1, std::min<int>(4, static_cast<int>(panels.size())));
  const int rows = std::max<int>(1, (static_cast<int>(panels.size()) + cols - 1) / cols);
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << cols * (pw + pad) + pad
     << "\" height=\"" << rows * (ph + 2 * pad) + pad << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) {
    const auto& p = panels[i];
    const int x0 = pad + static_cast<int>(i % cols) * (pw + pad);
    const int y0 = pad + static_cast<int>(i / cols) * (ph + 2 * pad);
    const std::size_t peak = std::max<std::size_t>(1, *std::max_element(p.h.counts.begin(), p.h.counts.end()));
    const double bw = static_cast<double>(pw) / static_cast<double>(p.h.counts.size());
    os << "<text x=\"" << x0 << "\" y=\"" << y0 - 8 << "\">" << escape(p.title) << "</text>\n";
    os << "<line x1=\"" << x0 << "\" y1=\"" << y0 + ph << "\" x2=\"" << x0 + pw << "\" y2=\"" << y0 + ph
       << "\" stroke=\"black\"/>\n";
    for (std::size_t b = 0; b < p.h.counts.size(); ++b) {
      const double hgt = static_cast<double>(ph) * static_cast<double>(p.h.counts[b]) / static_cast<double>(peak);
      os << "<rect x=\"" << fmt(x0 + bw * static_cast<double>(b), 1) << "\" y=\"" << fmt(y0 + ph - hgt, 1)
         << "\" width=\"" << fmt(bw - 1, 1) << "\" height=\"" << fmt(hgt, 1)
         << "\" fill=\"#4e79a7\"/>\n";
    }
    os << "<text x=\"" << x0 << "\" y=\"" << y0 + ph + 14 << "\">0</text>\n";
    os << "<text x=\"" << x0 + pw - 8 << "\" y=\"" << y0 + ph + 14 << "\">1</text>\n";
    os << "<text x=\"" << x0 + pw - 40 << "\" y=\"" << y0 + 10 << "\">max " << peak << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string class_color(int class_id) {
  static const char* palette[] = {"#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948",
                                  "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac", "#1f77b4", "#17becf"};
  constexpr int n = sizeof palette / sizeof palette[0];
  return palette[((class_id % n) + n) % n];
}

std::string timeline_tsv(std::span<const ElementSegmentation> elements,
                         std::span<const UnitSegmentation> units) {
  std::ostringstream os;
  os << "sequence_id\tlayer\tstart\tend\tclass\tcolor\n";
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const auto& e = elements[i];
    for (const auto& s : e.segments)
      os << e.series_id << "\telement\t" << s.start << '\t' << s.end << '\t' << s.class_id << '\t'
         << class_color(s.class_id) << '\n';
    if (i < units.size())
      for (const auto& u : units[i].segments) {
        if (u.end > e.segments.size() || u.start >= u.end) continue;
        os << e.series_id << "\tunit\t" << e.segments[u.start].start << '\t'
           << e.segments[u.end - 1].end << '\t' << u.class_id << '\t' << class_color(u.class_id)
           << '\n';
      }
  }
  return os.str();
}

std::string timeline_svg(std::span<const ElementSegmentation> elements,
                         std::span<const UnitSegmentation> units, std::size_t max_sequences) {
  const std::size_t n = std::min(elements.size(), max_sequences);
  std::size_t longest = 1;
  for (std::size_t i = 0; i < n; ++i)
    if (!elements[i].segments.empty()) longest = std::max(longest, elements[i].segments.back().end);
  const int label_w = 90, width = 900, band = 12, row = 2 * band + 8;
  const double scale = static_cast<double>(width) / static_cast<double>(longest);
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << label_w + width + 20 << "\" height=\""
     << static_cast<int>(n) * row + 20 << "\" font-family=\"sans-serif\" font-size=\"10\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = elements[i];
    const int y = 10 + static_cast<int>(i) * row;
    os << "<text x=\"2\" y=\"" << y + band << "\">" << escape(e.series_id) << "</text>\n";
    for (const auto& s : e.segments)
      os << "<rect x=\"" << fmt(label_w + scale * static_cast<double>(s.start), 1) << "\" y=\"" << y
         << "\" width=\"" << fmt(scale * static_cast<double>(s.length()), 1) << "\" height=\"" << band
         << "\" fill=\"" << class_color(s.class_id) << "\"/>\n";
    if (i < units.size())
      for (const auto& u : units[i].segments) {
        if (u.end > e.segments.size() || u.start >= u.end) continue;
        const auto a = e.segments[u.start].start, b = e.segments[u.end - 1].end;
        os << "<rect x=\"" << fmt(label_w + scale * static_cast<double>(a), 1) << "\" y=\"" << y + band + 2
           << "\" width=\"" << fmt(scale * static_cast<double>(b - a), 1) << "\" height=\"" << band
           << "\" fill=\"" << class_color(u.class_id) << "\" stroke=\"white\"/>\n";
      }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace gphsmm
