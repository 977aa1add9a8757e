#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace omsteg {

/// Beta chaotic map parameters. p = b1 + c1*a and q = b2 + c2*a; r scales the
/// map amplitude, a is the bifurcation parameter. Defaults give a well-mixed
/// orbit on [0, 1] (the map stays chaotic across r in [0.95, 1]).
///
/// Orbits are plain double arithmetic; extraction reproduces embedding only
/// under strict IEEE-754 double evaluation (no extended-precision contraction).
struct BetaParams {
    double x0 = 0.7;
    double a = 2.0;
    double b1 = 0.3, c1 = 0.1;
    double b2 = 0.4, c2 = 0.2;
    double phi1 = 0.0, phi2 = 1.0;
    double r = 0.98;

    double p() const { return b1 + c1 * a; }
    double q() const { return b2 + c2 * a; }
    double phi_c() const { return (p() * phi2 + q() * phi1) / (p() + q()); }

    void validate() const {
        if (!(phi1 < phi2)) throw std::invalid_argument("beta params: phi1 < phi2 required");
        if (p() + q() == 0.0) throw std::invalid_argument("beta params: p + q must be nonzero");
        if (!(x0 >= phi1 && x0 <= phi2))
            throw std::invalid_argument("beta params: x0 must lie in [phi1, phi2]");
    }
};

/// Beta bump: ((x-phi1)/(phic-phi1))^p * ((phi2-x)/(phi2-phic))^q on [phi1, phi2],
/// exactly 0 outside.
inline double beta_fn(double x, double p, double q, double phi1, double phi2) {
    if (!(x >= phi1 && x <= phi2)) return 0.0;
    const double phic = (p * phi2 + q * phi1) / (p + q);
    return std::pow((x - phi1) / (phic - phi1), p) * std::pow((phi2 - x) / (phi2 - phic), q);
}

/// Iterate x <- r*beta(x) n times, emitting floor(mod(1e14*x, n)) in {0..n-1}
/// after each step. A non-finite iterate is treated like an escaped one: it
/// emits 0 and the 0-branch takes over on the next step.
inline std::vector<int> beta_orbit(const BetaParams& bp, int n) {
    if (n < 1) throw std::invalid_argument("beta_orbit: n must be >= 1");
    bp.validate();
    const double p = bp.p(), q = bp.q();
    std::vector<int> out;
    out.reserve(n);
    double x = bp.x0;
    for (int i = 0; i < n; ++i) {
        x = bp.r * beta_fn(x, p, q, bp.phi1, bp.phi2);
        double m = std::fmod(1e14 * x, double(n));
        if (m < 0) m += n;
        out.push_back(std::isfinite(m) ? static_cast<int>(std::floor(m)) : 0);
    }
    return out;
}

/// Chaotic visiting order: a permutation of L. Each emitted integer indexes the
/// current ordered L; tau keeps first occurrences. A single-element tau falls
/// back to L unchanged; otherwise the remainder is ordered recursively from the
/// same seed. Recursion strictly shrinks L, so depth <= card(L).
inline std::vector<int> chaotic_positions(const std::vector<int>& L, const BetaParams& bp) {
    if (L.empty()) throw std::invalid_argument("chaotic_positions: empty list");
    const auto emissions = beta_orbit(bp, static_cast<int>(L.size()));
    std::vector<int> tau;
    std::vector<char> taken(L.size(), 0);
    for (int v : emissions) {
        if (!taken[v]) {
            taken[v] = 1;
            tau.push_back(L[v]);
        }
    }
    if (tau.size() == 1) return L;
    if (tau.size() == L.size()) return tau;
    std::vector<int> rest;
    rest.reserve(L.size() - tau.size());
    for (std::size_t i = 0; i < L.size(); ++i)
        if (!taken[i]) rest.push_back(L[i]);
    auto tail = chaotic_positions(rest, bp);
    tau.insert(tau.end(), tail.begin(), tail.end());
    return tau;
}

}  // namespace omsteg
