#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "omsteg/imageio.hpp"

namespace omsteg {

/// Pooled 256-bin intensity distribution over all channels; sums to 1.
struct Histogram256 {
    std::array<double, 256> p{};
};

inline Histogram256 intensity_histogram(const ImageBuffer& img) {
    Histogram256 h;
    std::array<std::size_t, 256> counts{};
    for (auto s : img.samples) ++counts[s];
    const double total = static_cast<double>(img.samples.size());
    for (int i = 0; i < 256; ++i) h.p[i] = counts[i] / total;
    return h;
}

namespace detail {

inline void require_same_shape(const ImageBuffer& c, const ImageBuffer& s) {
    if (!c.same_shape(s))
        throw std::invalid_argument("metrics: cover and stego shapes differ");
}

}  // namespace detail

/// Mean squared sample difference over all m*n*rho samples.
inline double mse(const ImageBuffer& c, const ImageBuffer& s) {
    detail::require_same_shape(c, s);
    double acc = 0.0;
    for (std::size_t i = 0; i < c.samples.size(); ++i) {
        const double d = double(c.samples[i]) - double(s.samples[i]);
        acc += d * d;
    }
    return acc / double(c.samples.size());
}

/// PSNR in dB with the data-dependent peak Xi = max(max(C), max(S));
/// +inf when MSE is 0. `peak` overrides Xi (e.g. a fixed 255).
inline double psnr(const ImageBuffer& c, const ImageBuffer& s,
                   std::optional<int> peak = std::nullopt) {
    detail::require_same_shape(c, s);
    const double m = mse(c, s);
    if (m == 0.0) return std::numeric_limits<double>::infinity();
    int xi = 0;
    if (peak) {
        xi = *peak;
    } else {
        for (auto v : c.samples) xi = std::max(xi, int(v));
        for (auto v : s.samples) xi = std::max(xi, int(v));
    }
    return 10.0 * std::log10(double(xi) * double(xi) / m);
}

/// Global universal image quality index:
/// 4*cov*meanC*meanS / ((varC+varS)*(meanC^2+meanS^2)), sample variances with
/// (m n rho - 1) normalization. NaN ("undefined") when the denominator is 0.
inline double uiqi(const ImageBuffer& c, const ImageBuffer& s) {
    detail::require_same_shape(c, s);
    const std::size_t n = c.samples.size();
    double mc = 0.0, ms = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mc += c.samples[i];
        ms += s.samples[i];
    }
    mc /= double(n);
    ms /= double(n);
    double vc = 0.0, vs = 0.0, cov = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dc = c.samples[i] - mc, ds = s.samples[i] - ms;
        vc += dc * dc;
        vs += ds * ds;
        cov += dc * ds;
    }
    vc /= double(n - 1);
    vs /= double(n - 1);
    cov /= double(n - 1);
    const double denom = (vc + vs) * (mc * mc + ms * ms);
    if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return 4.0 * cov * mc * ms / denom;
}

/// IF = 1 - sum (C-S)^2 / sum C^2.
inline double image_fidelity(const ImageBuffer& c, const ImageBuffer& s) {
    detail::require_same_shape(c, s);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < c.samples.size(); ++i) {
        const double d = double(c.samples[i]) - double(s.samples[i]);
        num += d * d;
        den += double(c.samples[i]) * double(c.samples[i]);
    }
    if (den == 0.0) throw std::invalid_argument("image_fidelity: cover is identically zero");
    return 1.0 - num / den;
}

/// Relative entropy between pooled intensity histograms, absolute-value
/// variant with natural log: sum over bins with P_C > 0 of
/// P_C * |ln(P_C / max(P_S, 1e-12))|. Zero stego bins are floored so the
/// value stays finite; RE(C, C) = 0 exactly.
inline double relative_entropy(const ImageBuffer& c, const ImageBuffer& s) {
    detail::require_same_shape(c, s);
    const auto pc = intensity_histogram(c), ps = intensity_histogram(s);
    double re = 0.0;
    for (int i = 0; i < 256; ++i) {
        if (pc.p[i] <= 0.0) continue;
        re += pc.p[i] * std::abs(std::log(pc.p[i] / std::max(ps.p[i], 1e-12)));
    }
    return re;
}

struct MetricsReport {
    double mse = 0.0;
    double psnr_db = 0.0;
    double uiqi = 0.0;
    double image_fidelity = 0.0;
    double relative_entropy = 0.0;
    int xi = 0;
};

inline MetricsReport compute_metrics(const ImageBuffer& c, const ImageBuffer& s,
                                     std::optional<int> peak = std::nullopt) {
    MetricsReport r;
    r.mse = mse(c, s);
    r.psnr_db = psnr(c, s, peak);
    r.uiqi = uiqi(c, s);
    r.image_fidelity = image_fidelity(c, s);
    r.relative_entropy = relative_entropy(c, s);
    if (peak) {
        r.xi = *peak;
    } else {
        int xi = 0;
        for (auto v : c.samples) xi = std::max(xi, int(v));
        for (auto v : s.samples) xi = std::max(xi, int(v));
        r.xi = xi;
    }
    return r;
}

}  // namespace omsteg
