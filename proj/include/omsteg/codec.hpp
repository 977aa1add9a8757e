#pragma once

#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "omsteg/chaos.hpp"
#include "omsteg/imageio.hpp"
#include "omsteg/keyschedule.hpp"
#include "omsteg/transform.hpp"

namespace omsteg {

struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Secret bit-stream; bits[i] in {0,1}.
struct SecretMessage {
    std::vector<std::uint8_t> bits;

    long length() const { return static_cast<long>(bits.size()); }
};

enum class Framing { header32, raw };

struct StegoConfig {
    BasisId basis_x = BasisId::DCT;   // lambda
    BasisId basis_y = BasisId::DCT;   // xi
    BasisParams basis_params{};
    double mu = 75.0;
    PrivateKey key{};
    BetaParams beta{};
    Framing framing = Framing::header32;
    bool process_all_blocks = false;  // true = quantize/dequantize every block, carrying or not
    int refine_max_iters = 16;
};

struct UnstableBlock {
    int channel = 0;
    int macroblock = 0;  // chaotic index rho_k
    int subblock = 0;    // Hilbert index h_j
    long first_bit = 0;  // 0-based offset of this block's first message bit
    int bit_count = 0;
};

struct EmbedReport {
    long bits_embedded = 0;
    long blocks_touched = 0;
    long capacity_bits = 0;
    std::vector<long> refinement_iterations;  // [i] = blocks verified after i re-embeds
    std::vector<UnstableBlock> unstable_blocks;
};

/// 8 bits per 8x8 sub-block over every channel.
inline long capacity(const ImageBuffer& img) {
    if (img.width % 64 != 0 || img.height % 64 != 0)
        throw std::invalid_argument("capacity: image dimensions must be multiples of 64");
    if (img.channels != 1 && img.channels != 3)
        throw std::invalid_argument("capacity: channels must be 1 or 3");
    return long(img.width / 8) * long(img.height / 8) * 8L * img.channels;
}

inline long lsb_replace(long x, int bit) { return (x & ~1L) | (bit & 1); }

inline int lsb_read(long x) { return static_cast<int>(x & 1L); }

namespace detail {

inline Mat8 read_block(const ImageBuffer& img, int c, const TilingIndex::Rect& r) {
    Mat8 b;
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) b[y][x] = img.at(c, r.row0 + y, r.col0 + x);
    return b;
}

// round half away from zero, clamp to [0, 255]
inline void write_block(ImageBuffer& img, int c, const TilingIndex::Rect& r, const Mat8& b) {
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
            long v = std::llround(b[y][x]);
            v = std::max(0L, std::min(255L, v));
            img.at(c, r.row0 + y, r.col0 + x) = static_cast<std::uint8_t>(v);
        }
}

inline std::array<long, 8> low_ac(const ZigzagVector& nu) {
    std::array<long, 8> seg;
    for (int i = 0; i < 8; ++i) seg[i] = nu[1 + i];  // v_2 .. v_9; v_1 (DC) untouched
    return seg;
}

inline void set_low_ac(ZigzagVector& nu, const std::array<long, 8>& seg) {
    for (int i = 0; i < 8; ++i) nu[1 + i] = seg[i];
}

// Sign-preserving LSB write into the permuted low-AC coefficients.
inline void embed_bits(ZigzagVector& nu, const Mask8& mask, const std::uint8_t* bits, int n) {
    auto a = permute(low_ac(nu), mask);
    for (int q = 0; q < n; ++q)
        a[q] = (a[q] < 0) ? -lsb_replace(-a[q], bits[q]) : lsb_replace(a[q], bits[q]);
    set_low_ac(nu, unpermute(a, mask));
}

inline void read_bits(const ZigzagVector& nu, const Mask8& mask, std::uint8_t* out, int n) {
    const auto a = permute(low_ac(nu), mask);
    for (int q = 0; q < n; ++q) out[q] = static_cast<std::uint8_t>(lsb_read(std::labs(a[q])));
}

struct Pipeline {
    KernelMatrix kx, ky;
    QuantTable qt;
    KeyExpansion P;
    std::vector<int> rho;
    std::array<int, 64> hilbert;

    Pipeline(const ImageBuffer& img, const StegoConfig& cfg)
        : kx(build_kernel(cfg.basis_x, cfg.basis_params)),
          ky(build_kernel(cfg.basis_y, cfg.basis_params)),
          qt(quant_table(cfg.mu)),
          P(expand_key(cfg.key)),
          hilbert(hilbert_order()) {
        const TilingIndex t = tile(img);
        std::vector<int> L(t.macroblocks());
        std::iota(L.begin(), L.end(), 1);
        rho = chaotic_positions(L, cfg.beta);
    }
};

}  // namespace detail

/// Embed the (already framed) bit sequence into the cover. The traversal is
/// channel-planar (channel 0 first), macroblocks in chaotic order, the 64
/// sub-blocks of each macroblock in Hilbert order; the mask counter sigma and
/// the bit counter ell run globally across channels and blocks.
///
/// After write-back each carrying block is re-extracted and, on mismatch,
/// re-embedded into its re-quantized coefficients, up to refine_max_iters
/// rounds; blocks that never verify are reported in unstable_blocks.
///
/// With process_all_blocks=false, blocks after message exhaustion are left
/// bit-identical to the cover; with true, they pass through the full
/// quantize/dequantize pipeline without bit changes.
inline std::pair<ImageBuffer, EmbedReport> embed(const ImageBuffer& cover,
                                                 const SecretMessage& msg,
                                                 const StegoConfig& cfg) {
    const long cap = capacity(cover);
    if (msg.length() > cap)
        throw CapacityError("capacity exceeded: need " + std::to_string(msg.length()) +
                            " bits, have " + std::to_string(cap));
    if (cfg.refine_max_iters < 0 || cfg.refine_max_iters > 64)
        throw std::invalid_argument("refine_max_iters must be in [0, 64]");
    cfg.beta.validate();

    const detail::Pipeline pl(cover, cfg);
    const TilingIndex t = tile(cover);

    ImageBuffer stego = cover;
    EmbedReport rep;
    rep.capacity_bits = cap;
    rep.refinement_iterations.assign(cfg.refine_max_iters + 1, 0);

    const long L = msg.length();
    long sigma = 0, ell = 0;
    bool done = false;

    for (int c = 0; c < cover.channels && !done; ++c) {
        for (std::size_t kk = 0; kk < pl.rho.size() && !done; ++kk) {
            const int mb = pl.rho[kk];
            for (int j = 1; j <= 64; ++j) {
                if (ell >= L && !cfg.process_all_blocks) {
                    done = true;
                    break;
                }
                sigma = sigma % 2560 + 1;
                const Mask8 mask = mask_at(pl.P, sigma);
                const int nbits = static_cast<int>(std::min<long>(8, L - ell));
                const auto rect = t.subblock_rect(mb, pl.hilbert[j - 1]);

                Mat8 block = detail::read_block(stego, c, rect);
                QuantBlock th = quantize(forward_moments(block, pl.kx, pl.ky), pl.qt);
                ZigzagVector nu = zigzag(th);
                if (nbits > 0) detail::embed_bits(nu, mask, &msg.bits[ell], nbits);
                detail::write_block(
                    stego, c, rect,
                    inverse_moments(dequantize(inverse_zigzag(nu), pl.qt), pl.kx, pl.ky));

                if (nbits > 0) {
                    int used = -1;
                    for (int it = 0; it <= cfg.refine_max_iters; ++it) {
                        Mat8 written = detail::read_block(stego, c, rect);
                        ZigzagVector nu2 =
                            zigzag(quantize(forward_moments(written, pl.kx, pl.ky), pl.qt));
                        std::uint8_t got[8];
                        detail::read_bits(nu2, mask, got, nbits);
                        bool ok = true;
                        for (int q = 0; q < nbits; ++q) ok &= (got[q] == msg.bits[ell + q]);
                        if (ok) {
                            used = it;
                            break;
                        }
                        if (it == cfg.refine_max_iters) break;
                        detail::embed_bits(nu2, mask, &msg.bits[ell], nbits);
                        detail::write_block(
                            stego, c, rect,
                            inverse_moments(dequantize(inverse_zigzag(nu2), pl.qt), pl.kx, pl.ky));
                    }
                    if (used >= 0)
                        ++rep.refinement_iterations[used];
                    else
                        rep.unstable_blocks.push_back(
                            {c, mb, pl.hilbert[j - 1], ell, nbits});
                    ell += nbits;
                    ++rep.blocks_touched;
                }
            }
        }
    }
    rep.bits_embedded = ell;
    return {std::move(stego), rep};
}

/// Extract the framed bit sequence. With Framing::raw the total bit count must
/// be supplied; with Framing::header32 the first 32 recovered bits carry a
/// big-endian payload length and the returned sequence includes them.
/// cfg must match the embedding configuration exactly; a wrong key or wrong
/// parameters yield garbage bits, not a detectable failure.
inline SecretMessage extract(const ImageBuffer& stego, const StegoConfig& cfg,
                             std::optional<long> raw_bit_length = std::nullopt) {
    const long cap = capacity(stego);
    cfg.beta.validate();

    long needed = 0;
    bool parsed = true;
    if (cfg.framing == Framing::raw) {
        if (!raw_bit_length)
            throw std::invalid_argument("extract: raw framing requires the bit length");
        needed = *raw_bit_length;
        if (needed < 0 || needed > cap)
            throw std::invalid_argument("extract: requested length exceeds capacity");
    } else {
        needed = 32;
        parsed = false;
        if (cap < 32) throw CapacityError("extract: image too small for a header");
    }

    const detail::Pipeline pl(stego, cfg);
    const TilingIndex t = tile(stego);

    SecretMessage out;
    out.bits.reserve(static_cast<std::size_t>(needed));
    long sigma = 0;
    bool done = false;

    for (int c = 0; c < stego.channels && !done; ++c) {
        for (std::size_t kk = 0; kk < pl.rho.size() && !done; ++kk) {
            const int mb = pl.rho[kk];
            for (int j = 1; j <= 64; ++j) {
                if (out.length() >= needed) {
                    done = true;
                    break;
                }
                sigma = sigma % 2560 + 1;
                const Mask8 mask = mask_at(pl.P, sigma);
                const auto rect = t.subblock_rect(mb, pl.hilbert[j - 1]);

                const Mat8 block = detail::read_block(stego, c, rect);
                const ZigzagVector nu =
                    zigzag(quantize(forward_moments(block, pl.kx, pl.ky), pl.qt));
                std::uint8_t got[8];
                const int nbits = static_cast<int>(std::min<long>(8, needed - out.length()));
                detail::read_bits(nu, mask, got, nbits);
                for (int q = 0; q < nbits; ++q) out.bits.push_back(got[q]);

                if (!parsed && out.length() >= 32) {
                    long payload = 0;
                    for (int i = 0; i < 32; ++i) payload = (payload << 1) | out.bits[i];
                    if (32 + payload > cap)
                        throw CapacityError(
                            "header length exceeds capacity (corrupt stego or wrong "
                            "key/parameters)");
                    needed = 32 + payload;
                    parsed = true;
                }
            }
        }
    }
    if (out.length() < needed)
        throw CapacityError("extract: ran out of blocks before the requested length");
    return out;
}

/// header32: prepend a 32-bit big-endian payload bit count; raw: identity.
inline SecretMessage frame_message(const std::vector<std::uint8_t>& payload, Framing framing) {
    SecretMessage m;
    const long nbits = static_cast<long>(payload.size()) * 8;
    if (framing == Framing::header32) {
        for (int i = 31; i >= 0; --i)
            m.bits.push_back(static_cast<std::uint8_t>((nbits >> i) & 1));
    }
    for (auto byte : payload)
        for (int i = 7; i >= 0; --i) m.bits.push_back(static_cast<std::uint8_t>((byte >> i) & 1));
    return m;
}

inline std::vector<std::uint8_t> unframe(const SecretMessage& msg, Framing framing) {
    std::size_t start = 0, nbits = msg.bits.size();
    if (framing == Framing::header32) {
        if (msg.bits.size() < 32)
            throw std::invalid_argument("unframe: message shorter than the header");
        long payload = 0;
        for (int i = 0; i < 32; ++i) payload = (payload << 1) | msg.bits[i];
        if (static_cast<std::size_t>(payload) + 32 > msg.bits.size())
            throw std::invalid_argument("unframe: header announces more bits than provided");
        start = 32;
        nbits = static_cast<std::size_t>(payload);
    }
    if (nbits % 8 != 0)
        throw std::invalid_argument("unframe: payload bit count is not a whole number of bytes");
    std::vector<std::uint8_t> bytes(nbits / 8, 0);
    for (std::size_t i = 0; i < nbits; ++i)
        bytes[i / 8] = static_cast<std::uint8_t>((bytes[i / 8] << 1) | msg.bits[start + i]);
    return bytes;
}

}  // namespace omsteg
