#ifndef UBL_COMMON_HPP
#define UBL_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace ubl {

struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Numerical failure that still carries partial information (residuals,
// partial sums). CLI maps it to exit code 3.
struct DiagnosticError : std::runtime_error {
    double residual;
    explicit DiagnosticError(const std::string& what, double res = std::numeric_limits<double>::quiet_NaN())
        : std::runtime_error(what), residual(res) {}
};

enum class EstimateMethod { MC, Quadrature };

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
    EstimateMethod method = EstimateMethod::MC;
};

inline Estimate quad_estimate(double value, double tol, std::size_t evals = 0) {
    return Estimate{value, tol, evals, EstimateMethod::Quadrature};
}

inline double log_sum_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

inline double log_sum_exp(const std::vector<double>& v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    if (m == -std::numeric_limits<double>::infinity()) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

// Pairwise summation; fixed order so results are reproducible bit for bit.
inline double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

inline double pairwise_sum(const std::vector<double>& v) { return pairwise_sum(v.data(), v.size()); }

// Deterministic seed derivation for concurrent chains (seed ^ mixed index).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    double uniform() { return unif_(gen_); }
    double uniform(double a, double b) { return a + (b - a) * unif_(gen_); }
    double normal() { return norm_(gen_); }
    std::uint64_t next_u64() { return gen_(); }

  private:
    std::mt19937_64 gen_;
    std::uniform_real_distribution<double> unif_{0.0, 1.0};
    std::normal_distribution<double> norm_{0.0, 1.0};
};

// Block jackknife over per-sample columns. `combine` maps column block-sums
// (plus total count) to the statistic; the jackknife leaves one block out at
// a time. Columns must have equal length.
struct BlockSums {
    std::vector<std::vector<double>> sums;  // sums[col][block]
    std::size_t n = 0;
    std::size_t block = 100;
    std::size_t n_blocks() const { return sums.empty() ? 0 : sums[0].size(); }
};

inline BlockSums block_sums(const std::vector<const std::vector<double>*>& cols, std::size_t block = 100) {
    BlockSums bs;
    bs.block = block;
    if (cols.empty()) return bs;
    bs.n = cols[0]->size();
    std::size_t nb = (bs.n + block - 1) / block;
    bs.sums.assign(cols.size(), std::vector<double>(nb, 0.0));
    for (std::size_t c = 0; c < cols.size(); ++c) {
        const auto& v = *cols[c];
        if (v.size() != bs.n) throw InputError("block_sums: column length mismatch");
        for (std::size_t b = 0; b < nb; ++b) {
            std::size_t lo = b * block, hi = std::min(bs.n, lo + block);
            bs.sums[c][b] = pairwise_sum(v.data() + lo, hi - lo);
        }
    }
    return bs;
}

// combine(totals, count) -> statistic. Returns value + jackknife s.e.
inline Estimate jackknife(const BlockSums& bs,
                          const std::function<double(const std::vector<double>&, double)>& combine) {
    std::size_t nb = bs.n_blocks();
    std::size_t nc = bs.sums.size();
    std::vector<double> totals(nc, 0.0);
    for (std::size_t c = 0; c < nc; ++c) totals[c] = pairwise_sum(bs.sums[c]);
    double full = combine(totals, static_cast<double>(bs.n));
    if (nb < 2) return Estimate{full, 0.0, bs.n, EstimateMethod::MC};
    std::vector<double> loo(nb);
    std::vector<double> t(nc);
    for (std::size_t b = 0; b < nb; ++b) {
        std::size_t lo = b * bs.block;
        double nbm = static_cast<double>(std::min(bs.n, lo + bs.block) - lo);
        for (std::size_t c = 0; c < nc; ++c) t[c] = totals[c] - bs.sums[c][b];
        loo[b] = combine(t, static_cast<double>(bs.n) - nbm);
    }
    double mean = pairwise_sum(loo) / static_cast<double>(nb);
    double ss = 0.0;
    for (double x : loo) ss += (x - mean) * (x - mean);
    double se = std::sqrt(ss * (static_cast<double>(nb) - 1.0) / static_cast<double>(nb));
    return Estimate{full, se, bs.n, EstimateMethod::MC};
}

inline bool all_finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

// Bounded internal parallelism for the per-function maps. Each task is
// independent and deterministic, and results are joined in index order, so
// outputs are bitwise identical for any thread count.
int parallel_threads();
void set_parallel_threads(int n);
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace ubl

#endif
