// omsteg — hide and recover bit-streams in lossless images through orthogonal
// moment transforms. See README.md for the full command reference.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "omsteg/omsteg.hpp"

namespace fs = std::filesystem;
using namespace omsteg;

namespace {

// ---- shared option plumbing ----

struct CommonOpts {
    std::string basis_x = "DCT";
    std::string basis_y = "DCT";
    std::string basis_params;  // "name=value,..."
    double mu = 75.0;
    std::string key_hex;
    std::string beta_tuple;   // "x0,a,b1,c1,b2,c2,phi1,phi2,r"
    std::string beta_config;  // key = value file
    std::string framing = "header32";
    bool process_all = false;
    int refine_iters = 16;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

BetaParams parse_beta(const CommonOpts& o) {
    BetaParams bp;
    if (!o.beta_config.empty()) {
        std::ifstream f(o.beta_config);
        if (!f) throw std::invalid_argument("cannot open beta config: " + o.beta_config);
        std::string line;
        while (std::getline(f, line)) {
            line = trim(line);
            if (line.empty() || line[0] == '#') continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw std::invalid_argument("beta config: expected key = value, got: " + line);
            const std::string k = trim(line.substr(0, eq));
            const double v = std::stod(trim(line.substr(eq + 1)));
            if (k == "x0") bp.x0 = v;
            else if (k == "a") bp.a = v;
            else if (k == "b1") bp.b1 = v;
            else if (k == "c1") bp.c1 = v;
            else if (k == "b2") bp.b2 = v;
            else if (k == "c2") bp.c2 = v;
            else if (k == "phi1") bp.phi1 = v;
            else if (k == "phi2") bp.phi2 = v;
            else if (k == "r") bp.r = v;
            else throw std::invalid_argument("beta config: unknown key " + k);
        }
    }
    if (!o.beta_tuple.empty()) {
        const auto parts = split(o.beta_tuple, ',');
        if (parts.size() != 9)
            throw std::invalid_argument("--beta expects 9 comma-separated values "
                                        "(x0,a,b1,c1,b2,c2,phi1,phi2,r)");
        bp.x0 = std::stod(parts[0]);
        bp.a = std::stod(parts[1]);
        bp.b1 = std::stod(parts[2]);
        bp.c1 = std::stod(parts[3]);
        bp.b2 = std::stod(parts[4]);
        bp.c2 = std::stod(parts[5]);
        bp.phi1 = std::stod(parts[6]);
        bp.phi2 = std::stod(parts[7]);
        bp.r = std::stod(parts[8]);
    }
    bp.validate();
    return bp;
}

BasisParams parse_basis_params(const std::string& overrides) {
    BasisParams P;
    if (overrides.empty()) return P;
    for (const auto& item : split(overrides, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--basis-params expects name=value items");
        const std::string k = trim(item.substr(0, eq));
        const double v = std::stod(trim(item.substr(eq + 1)));
        if (k == "p") P.p = v;
        else if (k == "alpha") P.alpha = v;
        else if (k == "beta") P.beta = v;
        else if (k == "a_charlier") P.a_charlier = v;
        else if (k == "beta_meixner") P.beta_meixner = v;
        else if (k == "gamma_meixner") P.gamma_meixner = v;
        else if (k == "q") P.q = v;
        else if (k == "p_qk") P.p_qk = v;
        else if (k == "alpha_qh") P.alpha_qh = v;
        else if (k == "beta_qh") P.beta_qh = v;
        else if (k == "a_qc") P.a_qc = v;
        else if (k == "b_qm") P.b_qm = v;
        else if (k == "c_qm") P.c_qm = v;
        else throw std::invalid_argument("--basis-params: unknown name " + k);
    }
    return P;
}

StegoConfig build_config(const CommonOpts& o) {
    StegoConfig cfg;
    cfg.basis_x = basis_from_name(o.basis_x);
    cfg.basis_y = basis_from_name(o.basis_y);
    cfg.basis_params = parse_basis_params(o.basis_params);
    cfg.mu = o.mu;
    if (o.key_hex.empty()) throw std::invalid_argument("--key is required");
    cfg.key = PrivateKey::from_hex(o.key_hex);
    cfg.beta = parse_beta(o);
    if (o.framing == "header32") cfg.framing = Framing::header32;
    else if (o.framing == "raw") cfg.framing = Framing::raw;
    else throw std::invalid_argument("--framing must be header32 or raw");
    cfg.process_all_blocks = o.process_all;
    cfg.refine_max_iters = o.refine_iters;
    return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& o, bool with_framing = true) {
    cmd->add_option("--basis-x", o.basis_x, "row-kernel family (name or short alias)")
        ->capture_default_str();
    cmd->add_option("--basis-y", o.basis_y, "column-kernel family")->capture_default_str();
    cmd->add_option("--basis-params", o.basis_params,
                    "family parameter overrides, name=value[,name=value...]");
    cmd->add_option("--mu", o.mu, "quality factor, 50 < mu < 100")
        ->capture_default_str()
        ->check(CLI::Range(50.0, 100.0).description("FLOAT in (50..100)"));
    cmd->add_option("--key", o.key_hex, "128-bit private key, 32 hex chars");
    cmd->add_option("--beta", o.beta_tuple, "beta map parameters x0,a,b1,c1,b2,c2,phi1,phi2,r");
    cmd->add_option("--beta-config", o.beta_config, "beta parameters as a key = value file");
    if (with_framing)
        cmd->add_option("--framing", o.framing, "header32 | raw")->capture_default_str();
}

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open " + path);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot write " + path);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

std::string fmt_double(double v) {
    if (std::isinf(v)) return "inf";
    if (std::isnan(v)) return "undefined";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

void print_report(const EmbedReport& rep, long payload_bits, std::ostream& out) {
    out << "capacity_bits: " << rep.capacity_bits << "\n";
    out << "bits_embedded: " << rep.bits_embedded << "\n";
    out << "payload_bits: " << payload_bits << "\n";
    out << "blocks_touched: " << rep.blocks_touched << "\n";
    out << "refinement_iterations:";
    for (std::size_t i = 0; i < rep.refinement_iterations.size(); ++i)
        if (rep.refinement_iterations[i] > 0)
            out << " " << i << ":" << rep.refinement_iterations[i];
    out << "\n";
    out << "unstable_blocks: " << rep.unstable_blocks.size() << "\n";
    for (const auto& u : rep.unstable_blocks)
        out << "  unstable: channel=" << u.channel << " macroblock=" << u.macroblock
            << " subblock=" << u.subblock << " first_bit=" << u.first_bit
            << " bits=" << u.bit_count << "\n";
}

// ---- bench helpers ----

struct BenchRow {
    std::string image, pair;
    double mu;
    long payload_bits;
    double psnr, uiqi, iff, re, ber;
    double runtime_ms;
};

std::pair<BasisId, BasisId> parse_pair(const std::string& name) {
    if (const auto colon = name.find(':'); colon != std::string::npos)
        return {basis_from_name(name.substr(0, colon)), basis_from_name(name.substr(colon + 1))};
    // greedy tokenization of concatenated short names (e.g. "qCDCT" = qC, DCT)
    std::vector<BasisId> toks;
    std::size_t i = 0;
    while (i < name.size()) {
        if (name.compare(i, 3, "DCT") == 0) {
            toks.push_back(BasisId::DCT);
            i += 3;
        } else if (name[i] == 'q' && i + 1 < name.size()) {
            toks.push_back(basis_from_name(name.substr(i, 2)));
            i += 2;
        } else {
            toks.push_back(basis_from_name(name.substr(i, 1)));
            i += 1;
        }
    }
    if (toks.size() == 1) return {toks[0], toks[0]};
    if (toks.size() == 2) return {toks[0], toks[1]};
    throw std::invalid_argument("cannot parse basis pair: " + name);
}

double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double quartile(std::vector<double> v, double frac) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const double pos = frac * double(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double t = pos - double(lo);
    return lo + 1 < v.size() ? v[lo] * (1 - t) + v[lo + 1] * t : v[lo];
}

int cmd_embed(const CommonOpts& eo, const std::string& e_cover, const std::string& e_msg,
              const std::string& e_out, const std::string& e_report_csv,
              double e_unstable_threshold) {
    const auto cfg = build_config(eo);
    const auto cover = load_image(e_cover);
    if (cover.width % 64 || cover.height % 64)
        std::cerr << "warning: " << e_cover << " dimensions are not multiples of 64; "
                  << "the codec will reject this image\n";
    const auto payload = read_file(e_msg);
    const auto msg = frame_message(payload, cfg.framing);
    const auto t0 = std::chrono::steady_clock::now();
    const auto [stego, rep] = embed(cover, msg, cfg);
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    save_image(stego, e_out);
    std::cout << "cover: " << e_cover << "\n"
              << "stego: " << e_out << "\n"
              << "basis_pair: " << basis_short_name(cfg.basis_x) << "-"
              << basis_short_name(cfg.basis_y) << "\n"
              << "mu: " << eo.mu << "\n"
              << "framing: " << eo.framing << "\n";
    print_report(rep, static_cast<long>(payload.size()) * 8, std::cout);
    std::cout << "runtime_ms: " << fmt_double(ms) << "\n";
    if (!e_report_csv.empty()) {
        std::ofstream csv(e_report_csv);
        csv << "cover,stego,basis_pair,mu,framing,capacity_bits,bits_embedded,"
               "payload_bits,blocks_touched,unstable_blocks,runtime_ms\n";
        csv << e_cover << ',' << e_out << ',' << basis_short_name(cfg.basis_x)
            << basis_short_name(cfg.basis_y) << ',' << eo.mu << ',' << eo.framing << ','
            << rep.capacity_bits << ',' << rep.bits_embedded << ',' << payload.size() * 8 << ','
            << rep.blocks_touched << ',' << rep.unstable_blocks.size() << ',' << fmt_double(ms)
            << "\n";
    }
    const double frac =
        rep.blocks_touched ? double(rep.unstable_blocks.size()) / double(rep.blocks_touched) : 0.0;
    if (frac > e_unstable_threshold) {
        std::cerr << "error: unstable-block fraction " << frac << " exceeds threshold "
                  << e_unstable_threshold << "\n";
        return 2;
    }
    return 0;
}

int cmd_bench(const CommonOpts& bo, const std::string& b_dataset, const std::string& b_out,
              const std::string& b_pairs, std::uint64_t b_seed) {
    auto cfg_base = build_config(bo);
    cfg_base.framing = Framing::raw;
    const std::vector<std::string> pair_names = split(b_pairs, ',');
    std::vector<fs::path> images;
    for (const auto& entry : fs::directory_iterator(b_dataset)) {
        auto ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), ::tolower);
        if (ext == ".png" || ext == ".bmp") images.push_back(entry.path());
    }
    std::sort(images.begin(), images.end());
    if (images.empty()) throw FormatError("no PNG/BMP images in " + b_dataset);

    std::ofstream csv(b_out);
    if (!csv) throw FormatError("cannot write " + b_out);
    csv << "image,basis_pair,mu,payload_bits,psnr,uiqi,if,re,ber,runtime_ms\n";

    std::vector<BenchRow> rows;
    for (const auto& path : images) {
        ImageBuffer cover;
        long cap = 0;
        try {
            cover = load_image(path.string());
            cap = capacity(cover);
        } catch (const std::exception& e) {
            std::cerr << "warning: skipping " << path << ": " << e.what() << "\n";
            continue;
        }
        for (std::size_t pi = 0; pi < pair_names.size(); ++pi) {
            auto cfg = cfg_base;
            std::tie(cfg.basis_x, cfg.basis_y) = parse_pair(trim(pair_names[pi]));
            SecretMessage msg;
            std::mt19937_64 rng(b_seed ^
                                (std::hash<std::string>{}(path.filename().string()) +
                                 0x9e3779b97f4a7c15ULL * (pi + 1)));
            msg.bits.resize(cap);
            for (auto& b : msg.bits) b = static_cast<std::uint8_t>(rng() & 1);

            const auto t0 = std::chrono::steady_clock::now();
            const auto [stego, rep] = embed(cover, msg, cfg);
            const auto got = extract(stego, cfg, cap);
            const double ms = std::chrono::duration<double, std::milli>(
                                  std::chrono::steady_clock::now() - t0)
                                  .count();
            long errs = 0;
            for (long i = 0; i < cap; ++i) errs += (got.bits[i] != msg.bits[i]);
            const auto m = compute_metrics(cover, stego);
            rows.push_back({path.filename().string(), trim(pair_names[pi]), bo.mu, cap, m.psnr_db,
                            m.uiqi, m.image_fidelity, m.relative_entropy, double(errs) / cap, ms});
            const auto& row = rows.back();
            csv << row.image << ',' << row.pair << ',' << row.mu << ',' << row.payload_bits << ','
                << fmt_double(row.psnr) << ',' << fmt_double(row.uiqi) << ','
                << fmt_double(row.iff) << ',' << fmt_double(row.re) << ',' << fmt_double(row.ber)
                << ',' << fmt_double(row.runtime_ms) << "\n";
        }
    }
    if (rows.empty()) {
        std::cerr << "error: every image failed to process\n";
        return 2;
    }

    std::cout << "pair,n,psnr_q1,psnr_median,psnr_q3,re_median,ber_median\n";
    double dct_median = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::pair<std::string, double>> medians;
    for (const auto& name : pair_names) {
        std::vector<double> ps, res, bers;
        for (const auto& r : rows)
            if (r.pair == trim(name)) {
                ps.push_back(r.psnr);
                res.push_back(r.re);
                bers.push_back(r.ber);
            }
        if (ps.empty()) continue;
        const double med = median(ps);
        medians.emplace_back(trim(name), med);
        if (trim(name) == "DCT") dct_median = med;
        std::cout << trim(name) << ',' << ps.size() << ',' << fmt_double(quartile(ps, 0.25)) << ','
                  << fmt_double(med) << ',' << fmt_double(quartile(ps, 0.75)) << ','
                  << fmt_double(median(res)) << ',' << fmt_double(median(bers)) << "\n";
    }
    if (!std::isnan(dct_median)) {
        bool any = false;
        std::string best;
        double bestv = -1e300;
        for (const auto& [pair, med] : medians)
            if (pair != "DCT") {
                if (med >= dct_median) any = true;
                if (med > bestv) {
                    bestv = med;
                    best = pair;
                }
            }
        std::cout << "moment_pair_matches_dct_median_psnr: " << (any ? "yes" : "no") << " (best "
                  << best << " " << fmt_double(bestv) << " vs DCT " << fmt_double(dct_median)
                  << ")\n";
    }
    return 0;
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"omsteg: steganography through discrete orthogonal moment transforms"};
    app.require_subcommand(1);

    auto* c_embed = app.add_subcommand("embed", "hide a message file inside a cover image");
    CommonOpts eo;
    std::string e_cover, e_msg, e_out, e_report_csv;
    double e_unstable_threshold = 0.01;
    c_embed->add_option("--cover", e_cover, "cover image (PNG or BMP)")->required();
    c_embed->add_option("--message", e_msg, "payload file (raw bytes)")->required();
    c_embed->add_option("--out", e_out, "stego image output path")->required();
    add_common(c_embed, eo);
    c_embed->add_flag("--process-all-blocks", eo.process_all,
                      "quantize/dequantize every block, not just carrying ones");
    c_embed->add_option("--refine-iters", eo.refine_iters,
                        "max verification re-embedding rounds per block")
        ->capture_default_str()
        ->check(CLI::Range(0, 64));
    c_embed->add_option("--report-csv", e_report_csv, "also write the report as CSV");
    c_embed->add_option("--unstable-threshold", e_unstable_threshold,
                        "max tolerated unstable-block fraction before a nonzero exit")
        ->capture_default_str();

    auto* c_extract = app.add_subcommand("extract", "recover the message from a stego image");
    CommonOpts xo;
    std::string x_stego, x_out;
    long x_length = -1;
    c_extract->add_option("--stego", x_stego, "stego image")->required();
    c_extract->add_option("--out", x_out, "recovered payload output path")->required();
    add_common(c_extract, xo);
    c_extract->add_option("--length", x_length, "payload length in bits (raw framing only)");
    c_extract->add_flag("--process-all-blocks", xo.process_all,
                        "match an embedding that used --process-all-blocks");

    auto* c_analyze = app.add_subcommand("analyze", "imperceptibility/security metrics");
    std::string a_cover, a_stego;
    int a_peak = -1;
    c_analyze->add_option("--cover", a_cover)->required();
    c_analyze->add_option("--stego", a_stego)->required();
    c_analyze->add_option("--peak", a_peak, "fixed PSNR peak (default: data-dependent max)");

    auto* c_bench = app.add_subcommand("bench", "dataset benchmark across basis pairs");
    CommonOpts bo;
    std::string b_dataset, b_out, b_pairs = "T,MT,MDCT,qCT,qCDCT,qMT,qMDCT,DCT";
    std::uint64_t b_seed = 1;
    c_bench->add_option("--dataset", b_dataset, "directory of PNG/BMP covers")->required();
    c_bench->add_option("--out", b_out, "CSV output path")->required();
    c_bench->add_option("--pairs", b_pairs, "comma-separated basis pairs")->capture_default_str();
    add_common(c_bench, bo, /*with_framing=*/false);
    c_bench->add_option("--seed", b_seed, "seed for the random payloads")->capture_default_str();

    auto* c_keygen = app.add_subcommand("keygen", "emit a fresh random 128-bit key (hex)");
    auto* c_expand = app.add_subcommand("expand-key", "print the 2560-bit key expansion as hex");
    std::string k_key;
    c_expand->add_option("--key", k_key, "128-bit key, 32 hex chars")->required();

    auto* c_chaos = app.add_subcommand("chaos-dump", "print the macroblock visiting order");
    CommonOpts co;
    int n_blocks = 64;
    c_chaos->add_option("--blocks", n_blocks, "number of macroblocks")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    c_chaos->add_option("--beta", co.beta_tuple, "beta map parameters (9-tuple)");
    c_chaos->add_option("--beta-config", co.beta_config, "beta parameters file");

    auto* c_basis = app.add_subcommand("basis-dump", "print a kernel matrix as CSV");
    std::string d_basis = "DCT", d_params;
    c_basis->add_option("--basis", d_basis, "family name or short alias")->capture_default_str();
    c_basis->add_option("--basis-params", d_params, "family parameter overrides");

    auto* c_scan = app.add_subcommand("scan-dump", "print the zigzag and Hilbert scan tables");
    std::string s_table = "both";
    c_scan->add_option("--table", s_table, "zigzag | hilbert | both")->capture_default_str();

    auto* c_capacity = app.add_subcommand("capacity", "print the embedding capacity in bits");
    std::string cap_cover;
    c_capacity->add_option("cover", cap_cover, "cover image")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;  // usage errors exit 1; --help exits 0
    }

    try {
        if (*c_embed)
            return cmd_embed(eo, e_cover, e_msg, e_out, e_report_csv, e_unstable_threshold);

        if (*c_extract) {
            const auto cfg = build_config(xo);
            const auto stego = load_image(x_stego);
            SecretMessage msg;
            if (cfg.framing == Framing::raw) {
                if (x_length < 0)
                    throw std::invalid_argument("raw framing requires --length (bits)");
                if (x_length % 8 != 0)
                    throw std::invalid_argument(
                        "--length must be a multiple of 8 to write whole bytes");
                msg = extract(stego, cfg, x_length);
            } else {
                msg = extract(stego, cfg);
            }
            write_file(x_out, unframe(msg, cfg.framing));
            std::cerr << "note: the recovered payload carries no integrity check; a wrong key, "
                         "wrong parameters, or wrong mu silently yields garbage\n";
            return 0;
        }

        if (*c_analyze) {
            const auto cover = load_image(a_cover);
            const auto stego = load_image(a_stego);
            const auto r = compute_metrics(
                cover, stego, a_peak >= 0 ? std::optional<int>(a_peak) : std::nullopt);
            std::cout << "mse: " << fmt_double(r.mse) << "\n"
                      << "psnr_db: " << fmt_double(r.psnr_db) << "\n"
                      << "uiqi: " << fmt_double(r.uiqi) << "\n"
                      << "if: " << fmt_double(r.image_fidelity) << "\n"
                      << "re: " << fmt_double(r.relative_entropy) << "\n"
                      << "xi: " << r.xi << "\n";
            return 0;
        }

        if (*c_bench) return cmd_bench(bo, b_dataset, b_out, b_pairs, b_seed);

        if (*c_keygen) {
            std::random_device rd;
            PrivateKey k;
            for (auto& b : k.bytes) b = static_cast<std::uint8_t>(rd());
            std::cout << k.to_hex() << "\n";
            return 0;
        }

        if (*c_expand) {
            std::cout << expand_key(PrivateKey::from_hex(k_key)).to_hex() << "\n";
            return 0;
        }

        if (*c_chaos) {
            const auto bp = parse_beta(co);
            std::vector<int> L(n_blocks);
            std::iota(L.begin(), L.end(), 1);
            for (int v : chaotic_positions(L, bp)) std::cout << v << "\n";
            return 0;
        }

        if (*c_basis) {
            const auto K = build_kernel(basis_from_name(d_basis), parse_basis_params(d_params));
            for (int n = 0; n < 8; ++n)
                for (int x = 0; x < 8; ++x) {
                    char buf[40];
                    std::snprintf(buf, sizeof buf, "%.17g", K.entries[n][x]);
                    std::cout << buf << (x == 7 ? "\n" : ",");
                }
            return 0;
        }

        if (*c_scan) {
            if (s_table != "zigzag" && s_table != "hilbert" && s_table != "both")
                throw std::invalid_argument("--table must be zigzag, hilbert or both");
            auto print_table = [](const char* name, const auto& t) {
                std::cout << name << ": ";
                for (std::size_t i = 0; i < t.size(); ++i)
                    std::cout << t[i] << (i + 1 < t.size() ? "," : "\n");
            };
            if (s_table == "zigzag" || s_table == "both") {
                std::array<int, 64> z;  // 1-based row-major index of each scanned cell
                for (int i = 0; i < 64; ++i) z[i] = kZigzagFlat[i] + 1;
                print_table("zigzag", z);
            }
            if (s_table == "hilbert" || s_table == "both") print_table("hilbert", hilbert_order());
            return 0;
        }

        if (*c_capacity) {
            std::cout << capacity(load_image(cap_cover)) << "\n";
            return 0;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const CapacityError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 3;  // a subcommand fell through the dispatch: internal invariant breach
}

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    } catch (...) {
        std::cerr << "internal error\n";
        return 3;
    }
}
