#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "contractlab/geometry.hpp"

namespace contractlab {

/// Deterministic RNG helpers. std::mt19937_64 has a portable sequence, and
/// deriving uniforms directly from its output keeps generated instances
/// identical across standard libraries (std distributions are not portable).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    int uniform_int(int n) {  // in [0, n)
        return static_cast<int>(engine_() % static_cast<std::uint64_t>(n));
    }
    std::uint64_t next() { return engine_(); }

    /// Uniform draw from the simplex interior (Dirichlet(1)), with an
    /// optional floor keeping every coordinate at least min_weight.
    Belief belief(Index dim, double min_weight = 0.0) {
        Vector w(dim);
        for (Index i = 0; i < dim; ++i) {
            double u = uniform01();
            if (u < 1e-300) u = 1e-300;
            w(i) = -std::log(u);
        }
        w /= w.sum();
        if (min_weight > 0.0) {
            w = (1.0 - min_weight * static_cast<double>(dim)) * w;
            w.array() += min_weight;
        }
        return Belief(w);
    }

  private:
    std::mt19937_64 engine_;
};

}  // namespace contractlab
