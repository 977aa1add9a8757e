#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "omsteg/basis.hpp"
#include "omsteg/mat8.hpp"

namespace omsteg {

using QuantBlock = std::array<std::array<long, 8>, 8>;
using ZigzagVector = std::array<long, 64>;  // v[0] is the DC entry (1-indexed v_1 in the docs)

struct QuantTable {
    Mat8 entries{};
    double mu = 0.0;
};

/// Forward separable moment transform: coeff[m][n] = sum_{i,j} Kx[m][i] Ky[n][j] B[i][j],
/// i.e. A * B * C^T with A, C the kernel matrices (rows = orders).
inline Mat8 forward_moments(const Mat8& block, const KernelMatrix& kx, const KernelMatrix& ky) {
    return matmul_abt(matmul(kx.entries, block), ky.entries);
}

/// Inverse transform: B = A^T * coeff * C. Exact inverse of forward_moments for
/// orthonormal kernels.
inline Mat8 inverse_moments(const Mat8& coeffs, const KernelMatrix& kx, const KernelMatrix& ky) {
    return matmul(matmul(transpose(kx.entries), coeffs), ky.entries);
}

/// Base quantification matrix; scaled by chi(mu) = (100-mu)/50.
inline constexpr std::array<std::array<int, 8>, 8> kQuantBase = {{
    {16, 11, 10, 16, 24, 40, 51, 61},
    {12, 12, 14, 19, 26, 58, 60, 55},
    {14, 13, 16, 24, 40, 57, 69, 56},
    {14, 17, 22, 29, 51, 87, 80, 62},
    {18, 22, 37, 56, 68, 109, 103, 77},
    {24, 35, 55, 64, 81, 104, 113, 92},
    {49, 64, 78, 87, 103, 121, 120, 101},
    {72, 92, 95, 98, 112, 100, 103, 99},
}};

inline QuantTable quant_table(double mu) {
    if (!(mu > 50.0 && mu < 100.0))
        throw std::invalid_argument("quant_table: mu must be in (50, 100)");
    QuantTable qt;
    qt.mu = mu;
    const double chi = (100.0 - mu) / 50.0;
    for (int u = 0; u < 8; ++u)
        for (int v = 0; v < 8; ++v) qt.entries[u][v] = chi * kQuantBase[u][v];
    return qt;
}

/// round(coeff / Q), with halves away from zero; embed and extract must agree bit-exactly.
inline QuantBlock quantize(const Mat8& coeffs, const QuantTable& qt) {
    QuantBlock out{};
    for (int u = 0; u < 8; ++u)
        for (int v = 0; v < 8; ++v) out[u][v] = std::llround(coeffs[u][v] / qt.entries[u][v]);
    return out;
}

inline Mat8 dequantize(const QuantBlock& qb, const QuantTable& qt) {
    Mat8 out;
    for (int u = 0; u < 8; ++u)
        for (int v = 0; v < 8; ++v) out[u][v] = double(qb[u][v]) * qt.entries[u][v];
    return out;
}

/// JPEG zigzag scan order: kZigzagFlat[k] is the row-major flat index (row*8+col)
/// of the k-th scanned coefficient.
inline constexpr std::array<int, 64> kZigzagFlat = {
    0,  1,  8,  16, 9,  2,  3,  10, 17, 24, 32, 25, 18, 11, 4,  5,
    12, 19, 26, 33, 40, 48, 41, 34, 27, 20, 13, 6,  7,  14, 21, 28,
    35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51,
    58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63,
};

inline ZigzagVector zigzag(const QuantBlock& qb) {
    ZigzagVector v{};
    for (int k = 0; k < 64; ++k) v[k] = qb[kZigzagFlat[k] / 8][kZigzagFlat[k] % 8];
    return v;
}

inline QuantBlock inverse_zigzag(const ZigzagVector& v) {
    QuantBlock qb{};
    for (int k = 0; k < 64; ++k) qb[kZigzagFlat[k] / 8][kZigzagFlat[k] % 8] = v[k];
    return qb;
}

namespace detail {

// Hilbert d -> (x right, y down) on a 2^k grid; curve runs (0,0) .. (n-1,0).
inline void hilbert_d2xy(int n, int d, int& x, int& y) {
    x = y = 0;
    int t = d;
    for (int s = 1; s < n; s *= 2) {
        const int rx = 1 & (t / 2);
        const int ry = 1 & (t ^ rx);
        if (ry == 0) {
            if (rx == 1) {
                x = s - 1 - x;
                y = s - 1 - y;
            }
            std::swap(x, y);
        }
        x += s * rx;
        y += s * ry;
        t /= 4;
    }
}

}  // namespace detail

/// Order-3 Hilbert traversal of the 8x8 sub-block grid. Cells are numbered
/// row-major 1..64; the curve starts at (row 0, col 0) and ends at (row 0, col 7).
/// Frozen convention shared by embed and extract.
inline std::array<int, 64> hilbert_order() {
    std::array<int, 64> h{};
    for (int d = 0; d < 64; ++d) {
        int x, y;
        detail::hilbert_d2xy(8, d, x, y);
        h[d] = y * 8 + x + 1;  // row = y, col = x
    }
    return h;
}

}  // namespace omsteg
