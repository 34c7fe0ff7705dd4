#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rlab/ext_plane.hpp"

namespace rlab {

/// Execution policy for the data-parallel kernels. Every parallel kernel has
/// a serial reference twin; the two must produce bit-identical results, which
/// the test suite asserts and the bench target times.
enum class Exec { Serial, OpenMP };

/// Number of OpenMP threads the process will use (0 = runtime default).
void set_thread_count(int n);
int thread_count();

namespace kernels {

/// Serial reference: out[i] = fn(i), in index order.
template <class T, class F>
void map_indexed_serial(std::size_t n, std::vector<T>& out, F&& fn) {
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
}

/// OpenMP twin of map_indexed_serial. Each element is a pure function of its
/// index, so scheduling cannot change the result. fn must not throw; callers
/// encode failures in T.
template <class T, class F>
void map_indexed_omp(std::size_t n, std::vector<T>& out, F&& fn) {
    out.resize(n);
    const std::ptrdiff_t sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t i = 0; i < sn; ++i)
        out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
}

template <class T, class F>
void map_indexed(Exec exec, std::size_t n, std::vector<T>& out, F&& fn) {
    if (exec == Exec::OpenMP)
        map_indexed_omp(n, out, fn);
    else
        map_indexed_serial(n, out, fn);
}

/// Compensated (Kahan) accumulator; used for every deterministic reduction.
template <class T>
class KahanSum {
  public:
    void add(T x) {
        const T y = x - comp_;
        const T t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
    }
    T get() const { return sum_; }

  private:
    T sum_{};
    T comp_{};
};

template <class T>
T kahan_total(const std::vector<T>& xs) {
    KahanSum<T> acc;
    for (const T& x : xs) acc.add(x);
    return acc.get();
}

}  // namespace kernels
}  // namespace rlab
