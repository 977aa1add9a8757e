#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <png.h>

namespace omsteg {

struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// 8-bit raster image, channel-planar: samples[c*W*H + y*W + x].
/// channels is 1 (gray) or 3 (RGB). The codec additionally requires both
/// dimensions to be multiples of 64; load/save themselves do not.
struct ImageBuffer {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> samples;

    static ImageBuffer make(int w, int h, int ch) {
        if (w <= 0 || h <= 0 || (ch != 1 && ch != 3))
            throw std::invalid_argument("ImageBuffer: bad dimensions or channel count");
        ImageBuffer b;
        b.width = w;
        b.height = h;
        b.channels = ch;
        b.samples.assign(static_cast<std::size_t>(w) * h * ch, 0);
        return b;
    }

    std::uint8_t& at(int c, int y, int x) {
        return samples[(static_cast<std::size_t>(c) * height + y) * width + x];
    }
    std::uint8_t at(int c, int y, int x) const {
        return samples[(static_cast<std::size_t>(c) * height + y) * width + x];
    }

    bool same_shape(const ImageBuffer& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }
};

namespace detail {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

inline bool ends_with_ci(const std::string& s, const char* suffix) {
    const std::size_t n = std::strlen(suffix);
    if (s.size() < n) return false;
    for (std::size_t i = 0; i < n; ++i)
        if (std::tolower(static_cast<unsigned char>(s[s.size() - n + i])) != suffix[i]) return false;
    return true;
}

// ---- PNG (libpng) ----

inline ImageBuffer load_png(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw FormatError("cannot open " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw FormatError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw FormatError("libpng init failed");
    }

    // Pixel storage lives on the heap behind a pointer established before the
    // setjmp frame; only volatile scalars are written inside it.
    struct ReadState {
        std::vector<std::uint8_t> interleaved;
        std::vector<png_bytep> rows;
    };
    const auto state = std::make_unique<ReadState>();
    volatile int width = 0, height = 0, channels = 0;
    volatile bool reject16 = false, reject_alpha = false;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw FormatError("corrupt or unsupported PNG: " + path);
    }

    png_init_io(png, fp.get());
    png_read_info(png, info);

    const int bit_depth = png_get_bit_depth(png, info);
    const int color = png_get_color_type(png, info);
    if (bit_depth == 16) reject16 = true;
    if ((color & PNG_COLOR_MASK_ALPHA) || png_get_valid(png, info, PNG_INFO_tRNS))
        reject_alpha = true;
    if (!reject16 && !reject_alpha) {
        if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
        if (color == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
        png_set_interlace_handling(png);
        png_read_update_info(png, info);

        const int w = static_cast<int>(png_get_image_width(png, info));
        const int h = static_cast<int>(png_get_image_height(png, info));
        const int ch = png_get_channels(png, info);
        width = w;
        height = h;
        channels = ch;
        if (ch == 1 || ch == 3) {
            state->interleaved.resize(static_cast<std::size_t>(w) * h * ch);
            state->rows.resize(h);
            for (int y = 0; y < h; ++y)
                state->rows[y] = state->interleaved.data() + static_cast<std::size_t>(y) * w * ch;
            png_read_image(png, state->rows.data());
            png_read_end(png, nullptr);
        }
    }
    png_destroy_read_struct(&png, &info, nullptr);

    if (reject16) throw FormatError(path + ": 16-bit PNG not supported (8-bit only)");
    if (reject_alpha) throw FormatError(path + ": alpha channel not supported");
    const int w = width, h = height, ch = channels;
    if (ch != 1 && ch != 3) throw FormatError(path + ": unsupported channel count");

    ImageBuffer img = ImageBuffer::make(w, h, ch);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < ch; ++c)
                img.at(c, y, x) =
                    state->interleaved[(static_cast<std::size_t>(y) * w + x) * ch + c];
    return img;
}

inline void save_png(const ImageBuffer& img, const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw FormatError("cannot write " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw FormatError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw FormatError("libpng init failed");
    }

    std::vector<std::uint8_t> interleaved(static_cast<std::size_t>(img.width) * img.height *
                                          img.channels);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < img.channels; ++c)
                interleaved[(static_cast<std::size_t>(y) * img.width + x) * img.channels + c] =
                    img.at(c, y, x);
    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y)
        rows[y] = interleaved.data() + static_cast<std::size_t>(y) * img.width * img.channels;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw FormatError("PNG write failed: " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, img.width, img.height, 8,
                 img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

// ---- BMP (uncompressed 24-bit color / 8-bit gray-palette) ----

inline void put_u16(std::vector<std::uint8_t>& b, std::uint16_t v) {
    b.push_back(v & 0xFF);
    b.push_back(v >> 8);
}
inline void put_u32(std::vector<std::uint8_t>& b, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back((v >> (8 * i)) & 0xFF);
}
inline std::uint16_t get_u16(const std::uint8_t* p) { return p[0] | (p[1] << 8); }
inline std::uint32_t get_u32(const std::uint8_t* p) {
    return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
           (std::uint32_t(p[3]) << 24);
}

inline void save_bmp(const ImageBuffer& img, const std::string& path) {
    const int ch = img.channels;
    const int row_raw = img.width * (ch == 3 ? 3 : 1);
    const int row_padded = (row_raw + 3) & ~3;
    const std::uint32_t palette_size = (ch == 1) ? 256 * 4 : 0;
    const std::uint32_t offset = 14 + 40 + palette_size;
    const std::uint32_t data_size = static_cast<std::uint32_t>(row_padded) * img.height;

    std::vector<std::uint8_t> out;
    out.reserve(offset + data_size);
    out.push_back('B');
    out.push_back('M');
    put_u32(out, offset + data_size);
    put_u32(out, 0);
    put_u32(out, offset);
    put_u32(out, 40);  // BITMAPINFOHEADER
    put_u32(out, static_cast<std::uint32_t>(img.width));
    put_u32(out, static_cast<std::uint32_t>(img.height));
    put_u16(out, 1);
    put_u16(out, ch == 3 ? 24 : 8);
    put_u32(out, 0);  // BI_RGB
    put_u32(out, data_size);
    put_u32(out, 2835);
    put_u32(out, 2835);
    put_u32(out, ch == 1 ? 256 : 0);
    put_u32(out, 0);
    if (ch == 1)
        for (int i = 0; i < 256; ++i) {
            out.push_back(static_cast<std::uint8_t>(i));
            out.push_back(static_cast<std::uint8_t>(i));
            out.push_back(static_cast<std::uint8_t>(i));
            out.push_back(0);
        }
    for (int y = img.height - 1; y >= 0; --y) {  // bottom-up
        for (int x = 0; x < img.width; ++x) {
            if (ch == 3) {
                out.push_back(img.at(2, y, x));  // B
                out.push_back(img.at(1, y, x));  // G
                out.push_back(img.at(0, y, x));  // R
            } else {
                out.push_back(img.at(0, y, x));
            }
        }
        for (int p = row_raw; p < row_padded; ++p) out.push_back(0);
    }

    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw FormatError("cannot write " + path);
    if (std::fwrite(out.data(), 1, out.size(), fp.get()) != out.size())
        throw FormatError("short write: " + path);
}

inline ImageBuffer load_bmp(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw FormatError("cannot open " + path);
    std::vector<std::uint8_t> buf;
    std::uint8_t chunk[16384];
    std::size_t n;
    while ((n = std::fread(chunk, 1, sizeof chunk, fp.get())) > 0) buf.insert(buf.end(), chunk, chunk + n);

    if (buf.size() < 54 || buf[0] != 'B' || buf[1] != 'M') throw FormatError(path + ": not a BMP file");
    const std::uint32_t offset = get_u32(&buf[10]);
    const std::uint32_t hdr = get_u32(&buf[14]);
    if (hdr < 40) throw FormatError(path + ": unsupported BMP header");
    const std::int32_t w = static_cast<std::int32_t>(get_u32(&buf[18]));
    const std::int32_t h_raw = static_cast<std::int32_t>(get_u32(&buf[22]));
    const std::uint16_t bpp = get_u16(&buf[28]);
    const std::uint32_t compression = get_u32(&buf[30]);
    if (compression != 0) throw FormatError(path + ": compressed BMP not supported");
    if (bpp != 8 && bpp != 24) throw FormatError(path + ": only 8-bit and 24-bit BMP supported");
    const bool top_down = h_raw < 0;
    const std::int32_t h = top_down ? -h_raw : h_raw;
    if (w <= 0 || h <= 0) throw FormatError(path + ": bad BMP dimensions");

    // palette (8-bit only)
    std::array<std::array<std::uint8_t, 3>, 256> pal{};
    bool gray_palette = true;
    if (bpp == 8) {
        std::uint32_t ncolors = get_u32(&buf[46]);
        if (ncolors == 0) ncolors = 256;
        const std::size_t pal_off = 14 + hdr;
        if (pal_off + 4 * ncolors > buf.size()) throw FormatError(path + ": truncated BMP palette");
        for (std::uint32_t i = 0; i < ncolors; ++i) {
            pal[i] = {buf[pal_off + 4 * i + 2], buf[pal_off + 4 * i + 1], buf[pal_off + 4 * i]};
            if (!(pal[i][0] == pal[i][1] && pal[i][1] == pal[i][2] && pal[i][0] == i))
                gray_palette = false;
        }
    }

    const int ch = (bpp == 24) ? 3 : (gray_palette ? 1 : 3);
    const int row_padded = ((w * (bpp / 8)) + 3) & ~3;
    if (offset + static_cast<std::size_t>(row_padded) * h > buf.size())
        throw FormatError(path + ": truncated BMP pixel data");

    ImageBuffer img = ImageBuffer::make(w, h, ch);
    for (std::int32_t yy = 0; yy < h; ++yy) {
        const std::int32_t y = top_down ? yy : (h - 1 - yy);
        const std::uint8_t* row = &buf[offset + static_cast<std::size_t>(yy) * row_padded];
        for (std::int32_t x = 0; x < w; ++x) {
            if (bpp == 24) {
                img.at(0, y, x) = row[3 * x + 2];
                img.at(1, y, x) = row[3 * x + 1];
                img.at(2, y, x) = row[3 * x];
            } else if (ch == 1) {
                img.at(0, y, x) = row[x];
            } else {
                img.at(0, y, x) = pal[row[x]][0];
                img.at(1, y, x) = pal[row[x]][1];
                img.at(2, y, x) = pal[row[x]][2];
            }
        }
    }
    return img;
}

}  // namespace detail

/// Load an 8-bit PNG or BMP with 1 or 3 channels. Alpha and 16-bit inputs are
/// rejected; dimensions are not constrained here (the codec enforces its own).
inline ImageBuffer load_image(const std::string& path) {
    if (detail::ends_with_ci(path, ".png")) return detail::load_png(path);
    if (detail::ends_with_ci(path, ".bmp")) return detail::load_bmp(path);
    if (detail::ends_with_ci(path, ".jpg") || detail::ends_with_ci(path, ".jpeg"))
        throw FormatError(path + ": JPEG is lossy; use PNG or BMP");
    throw FormatError(path + ": unsupported format (PNG or BMP only)");
}

/// Lossless write; load(save(x)) is bit-exact. Format chosen by extension.
inline void save_image(const ImageBuffer& img, const std::string& path) {
    if (img.channels != 1 && img.channels != 3)
        throw std::invalid_argument("save_image: channels must be 1 or 3");
    if (detail::ends_with_ci(path, ".png")) return detail::save_png(img, path);
    if (detail::ends_with_ci(path, ".bmp")) return detail::save_bmp(img, path);
    if (detail::ends_with_ci(path, ".jpg") || detail::ends_with_ci(path, ".jpeg"))
        throw FormatError(path + ": JPEG is lossy; use PNG or BMP");
    throw FormatError(path + ": unsupported format (PNG or BMP only)");
}

/// Macroblock/sub-block tiling of a 64-multiple image plane. Macroblocks are
/// 64x64, indexed row-major 1..macroblocks(); sub-blocks are the 8x8 cells of
/// a macroblock, indexed row-major 1..64 (the Hilbert scan permutes *these*
/// indices at the codec).
struct TilingIndex {
    int mb_rows = 0;
    int mb_cols = 0;

    struct Rect {
        int row0, col0, rows, cols;
    };

    int macroblocks() const { return mb_rows * mb_cols; }

    Rect macroblock_rect(int k) const {
        if (k < 1 || k > macroblocks()) throw std::out_of_range("macroblock index");
        const int r = (k - 1) / mb_cols, c = (k - 1) % mb_cols;
        return {r * 64, c * 64, 64, 64};
    }

    Rect subblock_rect(int k, int j) const {
        if (j < 1 || j > 64) throw std::out_of_range("sub-block index");
        const Rect mb = macroblock_rect(k);
        const int r = (j - 1) / 8, c = (j - 1) % 8;
        return {mb.row0 + r * 8, mb.col0 + c * 8, 8, 8};
    }
};

inline TilingIndex tile(const ImageBuffer& img) {
    if (img.width % 64 != 0 || img.height % 64 != 0)
        throw std::invalid_argument("tile: image dimensions must be multiples of 64");
    TilingIndex t;
    t.mb_rows = img.height / 64;
    t.mb_cols = img.width / 64;
    return t;
}

}  // namespace omsteg
