#pragma once

#include <random>

#include "qfsi/qtensor.hpp"

namespace qfsi::test {

inline std::mt19937_64 make_rng(uint64_t seed = 20240901ull) {
    return std::mt19937_64(seed);
}

inline double uream(std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline QTensor random_qtensor(std::mt19937_64& rng, double scale = 1.0) {
    return QTensor(scale * uream(rng), scale * uream(rng), scale * uream(rng),
                   scale * uream(rng), scale * uream(rng));
}

inline Mat3 random_matrix(std::mt19937_64& rng, double scale = 1.0) {
    Mat3 m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = scale * uream(rng);
    return m;
}

inline Mat3 random_traceless(std::mt19937_64& rng, double scale = 1.0) {
    Mat3 m = random_matrix(rng, scale);
    m -= (m.trace() / 3.0) * Mat3::Identity();
    return m;
}

} // namespace qfsi::test
