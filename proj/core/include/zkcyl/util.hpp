#pragma once

#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

namespace zkcyl {

// Pairwise (cascade) summation.  All norm and quadrature accumulations in the
// library go through this so that results are deterministic for a fixed input
// order and the rounding error stays O(log n) rather than O(n).
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 32) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

// Accumulator that buffers terms and reduces them pairwise on demand.
class PairwiseAcc {
  public:
    void reserve(std::size_t n) { terms_.reserve(n); }
    void add(double x) { terms_.push_back(x); }
    double total() const { return pairwise_sum(terms_); }

  private:
    std::vector<double> terms_;
};

// splitmix64, used to decorrelate user-facing seeds before feeding mt19937_64.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Uniform double in [0,1) from raw engine output; bit-exact on every platform,
// unlike std::uniform_real_distribution.
template <class Engine>
double uniform01(Engine& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

// Shortest round-trip representation of a double; used by every CSV writer so
// that identical runs produce byte-identical files.
inline std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace zkcyl
