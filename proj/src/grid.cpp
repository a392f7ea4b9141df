#include "cbf/grid.hpp"

#include <algorithm>

#include "cbf/errors.hpp"

namespace cbf {

std::shared_ptr<const Grid> Grid::create(std::vector<int64_t> sizes,
                                         std::vector<double> periods) {
  if (sizes.size() < 4)
    throw ConfigError("grid dimension must be at least 4");
  if (periods.size() != sizes.size())
    throw ConfigError("periods/sizes length mismatch");
  auto g = std::shared_ptr<Grid>(new Grid());
  g->dim_ = static_cast<int>(sizes.size());
  g->sizes_ = std::move(sizes);
  g->periods_ = std::move(periods);
  g->h_.resize(g->dim_);
  g->strides_.resize(g->dim_);
  int64_t np = 1;
  for (int a = 0; a < g->dim_; ++a) {
    if (g->sizes_[a] < 1) throw ConfigError("axis size must be >= 1");
    if (!(g->periods_[a] > 0.0)) throw ConfigError("axis period must be > 0");
    g->h_[a] = g->periods_[a] / static_cast<double>(g->sizes_[a]);
  }
  for (int a = g->dim_ - 1; a >= 0; --a) {
    g->strides_[a] = np;
    np *= g->sizes_[a];
  }
  g->npoints_ = np;
  double lprod = 1.0;
  for (double L : g->periods_) lprod *= L;
  g->vol_factor_ = lprod / static_cast<double>(np);
  return g;
}

double Grid::min_spacing() const {
  // Axes of size 1 carry no variation and do not constrain time steps.
  double m = 0.0;
  bool found = false;
  for (int a = 0; a < dim_; ++a) {
    if (sizes_[a] == 1) continue;
    if (!found || h_[a] < m) m = h_[a];
    found = true;
  }
  return found ? m : h_[0];
}

}  // namespace cbf
