// Benchmark: classic row-cyclic Jacobi (serial reference) vs. the
// round-robin ordering whose disjoint rotation batches run under OpenMP.
// Prints one row per matrix size with timings, speedup, and the largest
// eigenvalue disagreement between the two paths (values only, ascending).
//
// Usage: bench_eigen [--large] [n1 n2 ...]
//   --large appends n = 1024 to the default sizes 128, 256, 512.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "aglercert/numerics.hpp"
#include "aglercert/rng.hpp"

using namespace agler;

namespace {

HermitianMatrix random_hermitian(int n, Rng& rng) {
  HermitianMatrix m(n);
  for (int j = 0; j < n; ++j) {
    for (int k = j; k < n; ++k) {
      if (k == j) {
        m.set(j, j, cplx(rng.uniform(-1.0, 1.0), 0.0));
      } else {
        m.set(j, k, rng.disk(1.0));
      }
    }
  }
  return m;
}

template <typename F>
double time_seconds(F&& f) {
  auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> sizes = {128, 256, 512};
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--large") == 0) {
      sizes.push_back(1024);
    } else {
      int n = std::atoi(argv[i]);
      if (n < 2) {
        std::fprintf(stderr, "usage: %s [--large] [n1 n2 ...]\n", argv[0]);
        return 2;
      }
      sizes = {n};
      for (int j = i + 1; j < argc; ++j) sizes.push_back(std::atoi(argv[j]));
      break;
    }
  }

  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  std::printf("Jacobi eigensolver benchmark (values only, %d OpenMP thread%s)\n", threads,
              threads == 1 ? "" : "s");
  std::printf("%6s  %12s  %12s  %8s  %12s\n", "n", "serial (s)", "parallel (s)", "speedup",
              "max |dv|");

  Rng rng(1234);
  for (int n : sizes) {
    HermitianMatrix m = random_hermitian(n, rng);
    EigenOptions opts;
    opts.want_vectors = false;

    EigenResult serial;
    double t_serial = time_seconds([&] { serial = hermitian_eigen_serial(m, opts); });

    opts.parallel = true;
    EigenResult parallel;
    double t_parallel = time_seconds([&] { parallel = hermitian_eigen(m, opts); });

    double dv = 0.0;
    for (int k = 0; k < n; ++k) {
      dv = std::max(dv, std::abs(serial.values[static_cast<std::size_t>(k)] -
                                 parallel.values[static_cast<std::size_t>(k)]));
    }
    std::printf("%6d  %12.3f  %12.3f  %8.2f  %12.3g\n", n, t_serial, t_parallel,
                t_serial / t_parallel, dv);
    std::fflush(stdout);
  }
  return 0;
}
