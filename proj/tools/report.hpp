#pragma once

#include <string>
#include <vector>

#include "signglm/simulate.hpp"

namespace signglm::cli {

// Plain-text aggregate table, one row per (model, p, s, rho).
std::string render_text_table(const std::vector<CellAggregate>& aggregates);

// Static SVG: one panel per (model, p, s), mean log ratio vs rho with +-1 se
// error bars, a dashed zero line, and a Spearman trend annotation.
std::string render_svg(const std::vector<CellAggregate>& aggregates);

// Spearman rank correlation (average ranks for ties).
double spearman(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace signglm::cli
