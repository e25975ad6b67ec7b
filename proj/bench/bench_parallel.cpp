#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include "g2toda/assembly.hpp"
#include "g2toda/kernels.hpp"
#include "g2toda/reduced.hpp"

using namespace g2toda;

namespace {

double seconds(const std::function<void()>& f, int reps) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void row(const char* name, const std::function<void(Exec)>& f, int reps) {
  const double s = seconds([&] { f(Exec::Serial); }, reps);
  const double p = seconds([&] { f(Exec::Parallel); }, reps);
  std::printf("%-18s %10.4f %10.4f %8.2fx\n", name, s, p, s / p);
}

}  // namespace

int main(int argc, char** argv) {
  const int reps = argc > 1 ? std::atoi(argv[1]) : 3;
  std::printf("threads %d, best of %d\n", omp_get_max_threads(), reps);
  std::printf("%-18s %10s %10s %9s\n", "kernel", "serial[s]", "omp[s]", "speedup");

  row("gram_delta", [](Exec e) { gram_delta(TodaParams{1, 2, 0.3, 2.5}, e); }, reps);
  row("T_entries N=3", [](Exec e) { T_entries(3, e); }, reps);

  const TodaParams p = TodaParams::symmetric(1);
  const PolarGrid g = default_polar_grid(p, 0, 1e3, 801);
  Field2D rhs = Field2D::zeros(g);
  for (int k = 0; k < g.radial.size(); ++k)
    for (int j = 0; j < g.n_theta; ++j) {
      const double r = g.radial.r(k), th = g.theta(j);
      rhs.c[0](k, j) = r * r * std::exp(-r) * (1 + std::cos(2 * th));
      rhs.c[1](k, j) = r * std::exp(-r) * std::sin(3 * th);
    }
  row("solve_linearized", [&](Exec e) { solve_linearized(p, g, rhs, e); }, reps);
  return 0;
}
