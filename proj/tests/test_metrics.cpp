#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "omsteg/metrics.hpp"
#include "testutil.hpp"

using namespace omsteg;

namespace {

// Naive-loop oracles, written from the formulas independently of the library.
struct Naive {
    double mse, psnr, uiqi, iff, re;
};

Naive naive_metrics(const ImageBuffer& C, const ImageBuffer& S) {
    const std::size_t n = C.samples.size();
    double se = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = double(C.samples[i]) - double(S.samples[i]);
        se += d * d;
    }
    const double mse = se / double(n);
    int xi = 0;
    for (auto v : C.samples) xi = std::max(xi, int(v));
    for (auto v : S.samples) xi = std::max(xi, int(v));
    const double psnr = mse == 0.0 ? std::numeric_limits<double>::infinity()
                                   : 10.0 * std::log10(double(xi) * xi / mse);
    double mc = 0, ms = 0;
    for (std::size_t i = 0; i < n; ++i) mc += C.samples[i], ms += S.samples[i];
    mc /= n, ms /= n;
    double vc = 0, vs = 0, cov = 0;
    for (std::size_t i = 0; i < n; ++i) {
        vc += (C.samples[i] - mc) * (C.samples[i] - mc);
        vs += (S.samples[i] - ms) * (S.samples[i] - ms);
        cov += (C.samples[i] - mc) * (S.samples[i] - ms);
    }
    vc /= (n - 1), vs /= (n - 1), cov /= (n - 1);
    const double uiqi = 4 * cov * mc * ms / ((vc + vs) * (mc * mc + ms * ms));
    double c2 = 0;
    for (auto v : C.samples) c2 += double(v) * v;
    const double iff = 1.0 - se / c2;
    double hc[256] = {0}, hs[256] = {0};
    for (auto v : C.samples) hc[v] += 1.0 / n;
    for (auto v : S.samples) hs[v] += 1.0 / n;
    double re = 0;
    for (int i = 0; i < 256; ++i)
        if (hc[i] > 0) re += hc[i] * std::abs(std::log(hc[i] / std::max(hs[i], 1e-12)));
    return {mse, psnr, uiqi, iff, re};
}

}  // namespace

TEST_CASE("metric identities on identical images") {
    const auto img = testutil::synthetic_cover(128, 128, 3, 99);
    CHECK(mse(img, img) == 0.0);
    CHECK(std::isinf(psnr(img, img)));
    CHECK(uiqi(img, img) == 1.0);
    CHECK(image_fidelity(img, img) == 1.0);
    CHECK(relative_entropy(img, img) == 0.0);
}

TEST_CASE("hand-computed values") {
    auto c = ImageBuffer::make(1, 1, 1);
    auto s = ImageBuffer::make(1, 1, 1);
    c.samples[0] = 0;
    s.samples[0] = 10;
    CHECK(mse(c, s) == Catch::Approx(100.0));

    // Xi = 255, MSE = 255^2  ->  0 dB
    auto c2 = ImageBuffer::make(1, 1, 1);
    auto s2 = ImageBuffer::make(1, 1, 1);
    c2.samples[0] = 255;
    s2.samples[0] = 0;
    CHECK(psnr(c2, s2) == Catch::Approx(0.0).margin(1e-12));

    // Xi = 255, MSE = 1  ->  10 log10(65025) ~ 48.13 dB
    auto c3 = ImageBuffer::make(2, 1, 1);
    auto s3 = c3;
    c3.samples = {255, 100};
    s3.samples = {255, 100};
    s3.samples[1] = 101;
    CHECK(mse(c3, s3) == Catch::Approx(0.5));
    CHECK(psnr(c3, s3, 255) == Catch::Approx(10.0 * std::log10(65025.0 / 0.5)).epsilon(1e-12));

    // S = 0  ->  IF = 0
    auto z = s2;
    z.samples[0] = 0;
    CHECK(image_fidelity(c2, z) == Catch::Approx(0.0));

    // two-bin relative entropy: P_C = (1,0,...), P_S = (.5,.5,0,...)
    auto hc = ImageBuffer::make(2, 1, 1);
    auto hs = ImageBuffer::make(2, 1, 1);
    hc.samples = {0, 0};
    hs.samples = {0, 1};
    CHECK(relative_entropy(hc, hs) == Catch::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("anticorrelated image has negative uiqi") {
    const auto c = testutil::synthetic_cover(64, 64, 1, 4);
    auto s = c;
    int xi = 0;
    for (auto v : c.samples) xi = std::max(xi, int(v));
    for (std::size_t i = 0; i < s.samples.size(); ++i)
        s.samples[i] = static_cast<std::uint8_t>(xi - c.samples[i]);
    CHECK(uiqi(c, s) < 0.0);
}

TEST_CASE("uiqi undefined for constant pairs") {
    auto c = ImageBuffer::make(4, 4, 1);
    auto s = ImageBuffer::make(4, 4, 1);
    for (auto& v : c.samples) v = 0;
    for (auto& v : s.samples) v = 0;
    CHECK(std::isnan(uiqi(c, s)));
}

TEST_CASE("shape mismatch is rejected") {
    const auto a = ImageBuffer::make(8, 8, 1);
    const auto b = ImageBuffer::make(8, 16, 1);
    CHECK_THROWS_AS(mse(a, b), std::invalid_argument);
    CHECK_THROWS_AS(uiqi(a, b), std::invalid_argument);
    CHECK_THROWS_AS(relative_entropy(a, b), std::invalid_argument);
}

TEST_CASE("histogram sums to one") {
    const auto img = testutil::random_image(64, 32, 3, 5);
    const auto h = intensity_histogram(img);
    double sum = 0.0;
    for (double p : h.p) {
        CHECK(p >= 0.0);
        sum += p;
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
}

TEST_CASE("all metrics match the naive-loop oracles on random pairs") {
    testutil::Rng rng(77);
    for (int t = 0; t < 50; ++t) {
        const int w = 32 + int(rng() % 4) * 16, h = 32 + int(rng() % 3) * 16;
        const int ch = (rng() & 1) ? 3 : 1;
        const auto c = testutil::random_image(w, h, ch, rng());
        auto s = c;
        for (auto& v : s.samples)
            if ((rng() & 7) == 0) v = static_cast<std::uint8_t>(rng() % 256);
        const auto n = naive_metrics(c, s);
        CHECK(mse(c, s) == Catch::Approx(n.mse).margin(1e-9));
        if (std::isfinite(n.psnr)) CHECK(psnr(c, s) == Catch::Approx(n.psnr).margin(1e-9));
        CHECK(uiqi(c, s) == Catch::Approx(n.uiqi).margin(1e-9));
        CHECK(image_fidelity(c, s) == Catch::Approx(n.iff).margin(1e-9));
        CHECK(relative_entropy(c, s) == Catch::Approx(n.re).margin(1e-9));
    }
}

TEST_CASE("psnr decreases as mse grows") {
    const auto c = testutil::synthetic_cover(64, 64, 1, 12);
    auto s1 = c, s2 = c;
    for (std::size_t i = 0; i < s1.samples.size(); i += 16) s1.samples[i] ^= 1;
    for (std::size_t i = 0; i < s2.samples.size(); i += 4) s2.samples[i] ^= 3;
    CHECK(mse(c, s1) < mse(c, s2));
    CHECK(psnr(c, s1, 255) > psnr(c, s2, 255));
}

TEST_CASE("compute_metrics bundles the fields") {
    const auto c = testutil::synthetic_cover(64, 64, 3, 13);
    auto s = c;
    s.samples[100] ^= 1;
    const auto r = compute_metrics(c, s);
    CHECK(r.mse == mse(c, s));
    CHECK(r.psnr_db == psnr(c, s));
    CHECK(r.uiqi == uiqi(c, s));
    CHECK(r.image_fidelity == image_fidelity(c, s));
    CHECK(r.relative_entropy == relative_entropy(c, s));
    int xi = 0;
    for (auto v : c.samples) xi = std::max(xi, int(v));
    for (auto v : s.samples) xi = std::max(xi, int(v));
    CHECK(r.xi == xi);
}
