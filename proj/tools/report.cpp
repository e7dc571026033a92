#include "report.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace signglm::cli {

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  const std::size_t n = v.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) return 0.0;
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += rx[i];
    my += ry[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  return sxx > 0.0 && syy > 0.0 ? sxy / std::sqrt(sxx * syy) : 0.0;
}

namespace {

struct Panel {
  std::string model;
  std::size_t p, s;
  std::vector<const CellAggregate*> cells;  // sorted by rho
};

std::vector<Panel> group_panels(const std::vector<CellAggregate>& aggregates) {
  std::map<std::tuple<std::string, std::size_t, std::size_t>, Panel> panels;
  for (const auto& a : aggregates) {
    auto& panel = panels[{a.model, a.p, a.s}];
    panel.model = a.model;
    panel.p = a.p;
    panel.s = a.s;
    panel.cells.push_back(&a);
  }
  std::vector<Panel> out;
  for (auto& [key, panel] : panels) {
    std::sort(panel.cells.begin(), panel.cells.end(),
              [](const CellAggregate* a, const CellAggregate* b) { return a->rho < b->rho; });
    out.push_back(std::move(panel));
  }
  return out;
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << std::fixed << v;
  return os.str();
}

}  // namespace

std::string render_text_table(const std::vector<CellAggregate>& aggregates) {
  std::ostringstream os;
  os << "model     p     s   rho    mean_log_ratio        se   n_ok   excluded\n";
  for (const auto& a : aggregates) {
    char line[160];
    std::snprintf(line, sizeof line, "%-8s %5zu %4zu  %4.2f  %16.6f  %8.6f  %5zu  %9zu\n",
                  a.model.c_str(), a.p, a.s, a.rho, a.mean_log_ratio, a.se, a.n_ok, a.n_excluded);
    os << line;
  }
  return os.str();
}

std::string render_svg(const std::vector<CellAggregate>& aggregates) {
  const auto panels = group_panels(aggregates);
  const int pw = 320, ph = 240, margin = 46, cols = std::max(1, std::min<int>(3, static_cast<int>(panels.size())));
  const int rows = static_cast<int>((panels.size() + static_cast<std::size_t>(cols) - 1) /
                                    static_cast<std::size_t>(cols));
  const int width = cols * pw + 20, height = rows * ph + 20;

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"monospace\" font-size=\"10\">\n";

  for (std::size_t idx = 0; idx < panels.size(); ++idx) {
    const Panel& panel = panels[idx];
    const int px = static_cast<int>(idx % static_cast<std::size_t>(cols)) * pw + 10;
    const int py = static_cast<int>(idx / static_cast<std::size_t>(cols)) * ph + 10;
    const int x0 = px + margin, y0 = py + 24, x1 = px + pw - 14, y1 = py + ph - 36;

    double lo = 0.0, hi = 0.0;
    std::vector<double> rhos, means;
    for (const auto* c : panel.cells) {
      rhos.push_back(c->rho);
      means.push_back(c->mean_log_ratio);
      lo = std::min(lo, c->mean_log_ratio - 1.5 * c->se);
      hi = std::max(hi, c->mean_log_ratio + 1.5 * c->se);
    }
    if (hi - lo < 1e-9) {
      hi += 0.5;
      lo -= 0.5;
    }
    const double pad = 0.08 * (hi - lo);
    lo -= pad;
    hi += pad;
    const double rho_min = rhos.front(), rho_max = rhos.back();
    const auto sx = [&](double rho) {
      return rho_max > rho_min
                 ? x0 + (rho - rho_min) / (rho_max - rho_min) * (x1 - x0)
                 : 0.5 * (x0 + x1);
    };
    const auto sy = [&](double v) { return y1 - (v - lo) / (hi - lo) * (y1 - y0); };

    os << "<rect x=\"" << px + 2 << "\" y=\"" << py + 2 << "\" width=\"" << pw - 4
       << "\" height=\"" << ph - 4 << "\" fill=\"white\" stroke=\"#888\"/>\n";
    os << "<text x=\"" << px + 8 << "\" y=\"" << py + 14 << "\">" << panel.model
       << "  p=" << panel.p << " s=" << panel.s << "</text>\n";

    // axes
    os << "<line x1=\"" << x0 << "\" y1=\"" << y1 << "\" x2=\"" << x1 << "\" y2=\"" << y1
       << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << y1
       << "\" stroke=\"black\"/>\n";
    // zero line
    if (lo < 0.0 && hi > 0.0)
      os << "<line x1=\"" << x0 << "\" y1=\"" << sy(0.0) << "\" x2=\"" << x1 << "\" y2=\""
         << sy(0.0) << "\" stroke=\"#aaa\" stroke-dasharray=\"4 3\"/>\n";

    // x ticks at every rho
    for (double rho : rhos) {
      os << "<line x1=\"" << sx(rho) << "\" y1=\"" << y1 << "\" x2=\"" << sx(rho) << "\" y2=\""
         << y1 + 4 << "\" stroke=\"black\"/>\n";
      os << "<text x=\"" << sx(rho) - 8 << "\" y=\"" << y1 + 15 << "\">" << fmt(rho, 1)
         << "</text>\n";
    }
    os << "<text x=\"" << (x0 + x1) / 2 - 8 << "\" y=\"" << y1 + 28 << "\">rho</text>\n";
    // y ticks: lo, 0, hi
    for (double v : {lo + pad, 0.0, hi - pad}) {
      if (v < lo || v > hi) continue;
      os << "<line x1=\"" << x0 - 4 << "\" y1=\"" << sy(v) << "\" x2=\"" << x0 << "\" y2=\""
         << sy(v) << "\" stroke=\"black\"/>\n";
      os << "<text x=\"" << px + 4 << "\" y=\"" << sy(v) + 3 << "\">" << fmt(v, 2) << "</text>\n";
    }

    // error bars and markers
    for (const auto* c : panel.cells) {
      const double x = sx(c->rho);
      os << "<line x1=\"" << x << "\" y1=\"" << sy(c->mean_log_ratio - c->se) << "\" x2=\"" << x
         << "\" y2=\"" << sy(c->mean_log_ratio + c->se) << "\" stroke=\"#d33\"/>\n";
      os << "<circle cx=\"" << x << "\" cy=\"" << sy(c->mean_log_ratio)
         << "\" r=\"2.4\" fill=\"#d33\"/>\n";
    }
    // polyline through means
    os << "<polyline fill=\"none\" stroke=\"#d33\" points=\"";
    for (const auto* c : panel.cells) os << sx(c->rho) << ',' << sy(c->mean_log_ratio) << ' ';
    os << "\"/>\n";

    const double rs = spearman(rhos, means);
    os << "<text x=\"" << px + 8 << "\" y=\"" << py + ph - 8 << "\">spearman(rho, mean) = "
       << fmt(rs, 3) << (rs < 0.0 ? " (decreasing trend)" : "") << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace signglm::cli
