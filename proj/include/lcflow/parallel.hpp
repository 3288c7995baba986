#pragma once

// OpenMP loop helpers. Pointwise kernels are bitwise independent of the
// thread count; reductions accumulate one partial per z-slab and combine the
// partials serially in slab order, so they are too.

#include <algorithm>
#include <vector>

#include <omp.h>

namespace lcflow::par {

template <class F>
void for_each_cell(int nx, int ny, int nz, F&& f) {
#pragma omp parallel for collapse(2) schedule(static)
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) f(i, j, k);
}

template <class F>
double slab_sum(int nx, int ny, int nz, F&& f) {
  std::vector<double> partial(static_cast<std::size_t>(std::max(nz, 0)), 0.0);
#pragma omp parallel for schedule(static)
  for (int k = 0; k < nz; ++k) {
    double s = 0.0;
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) s += f(i, j, k);
    partial[static_cast<std::size_t>(k)] = s;
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

template <class F>
double slab_max(int nx, int ny, int nz, F&& f) {
  std::vector<double> partial(static_cast<std::size_t>(std::max(nz, 0)), 0.0);
#pragma omp parallel for schedule(static)
  for (int k = 0; k < nz; ++k) {
    double m = 0.0;
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) m = std::max(m, f(i, j, k));
    partial[static_cast<std::size_t>(k)] = m;
  }
  double total = 0.0;
  for (double p : partial) total = std::max(total, p);
  return total;
}

}  // namespace lcflow::par
