#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace omsteg {

/// Dense 8x8 double matrix; the whole pipeline is fixed to 8-point blocks.
using Mat8 = std::array<std::array<double, 8>, 8>;

inline constexpr std::size_t kBlockSize = 8;

inline Mat8 mat8_zero() {
    Mat8 m{};
    return m;
}

inline Mat8 mat8_identity() {
    Mat8 m{};
    for (std::size_t i = 0; i < 8; ++i) m[i][i] = 1.0;
    return m;
}

inline Mat8 transpose(const Mat8& a) {
    Mat8 t;
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j) t[j][i] = a[i][j];
    return t;
}

inline Mat8 matmul(const Mat8& a, const Mat8& b) {
    Mat8 c{};
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t k = 0; k < 8; ++k) {
            const double aik = a[i][k];
            for (std::size_t j = 0; j < 8; ++j) c[i][j] += aik * b[k][j];
        }
    return c;
}

/// a * b^T without materializing the transpose.
inline Mat8 matmul_abt(const Mat8& a, const Mat8& b) {
    Mat8 c{};
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < 8; ++k) s += a[i][k] * b[j][k];
            c[i][j] = s;
        }
    return c;
}

inline double max_abs_diff(const Mat8& a, const Mat8& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t j = 0; j < 8; ++j) m = std::max(m, std::abs(a[i][j] - b[i][j]));
    return m;
}

}  // namespace omsteg
