#include "simval/image_io.hpp"

#include <bit>
#include <cmath>
#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "simval/error.hpp"
#include "simval/math.hpp"

namespace simval {

GrayImage to_gray(const RadianceImage &rgb) {
    GrayImage out(rgb.width(), rgb.height(), 1);
    for (int y = 0; y < rgb.height(); ++y)
        for (int x = 0; x < rgb.width(); ++x)
            out.at(x, y) = luminance({rgb.at(x, y, 0), rgb.at(x, y, 1), rgb.at(x, y, 2)});
    return out;
}

RadianceImage to_normalized(const LdrImage &ldr) {
    const auto &p = ldr.pixels;
    RadianceImage out(p.width(), p.height(), p.channels());
    const double scale = 1.0 / ldr.max_value();
    for (std::size_t i = 0; i < p.data().size(); ++i)
        out.data()[i] = p.data()[i] * scale;
    return out;
}

GrayImage to_gray(const LdrImage &ldr) {
    return to_gray(to_normalized(ldr));
}

namespace {

template <typename T>
T to_little(T v) {
    if constexpr (std::endian::native == std::endian::big) {
        unsigned char b[sizeof(T)];
        std::memcpy(b, &v, sizeof(T));
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i)
            std::swap(b[i], b[sizeof(T) - 1 - i]);
        std::memcpy(&v, b, sizeof(T));
    }
    return v;
}

template <typename T>
void put(std::ostream &os, T v) {
    v = to_little(v);
    os.write(reinterpret_cast<const char *>(&v), sizeof(T));
}

template <typename T>
T get(std::istream &is) {
    T v{};
    is.read(reinterpret_cast<char *>(&v), sizeof(T));
    return to_little(v);
}

std::uint32_t swap32(std::uint32_t v) {
    return (v >> 24) | ((v >> 8) & 0xff00u) | ((v << 8) & 0xff0000u) | (v << 24);
}

std::ofstream open_out(const std::filesystem::path &path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw FormatError("cannot open '" + path.string() + "' for writing");
    return os;
}

std::ifstream open_in(const std::filesystem::path &path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open '" + path.string() + "'");
    return is;
}

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream &is) {
    std::string tok;
    int c;
    while ((c = is.get()) != EOF) {
        if (c == '#') {
            while ((c = is.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (std::isspace(c)) {
            if (!tok.empty()) break;
            continue;
        }
        tok.push_back(static_cast<char>(c));
    }
    return tok;
}

int parse_int(const std::string &tok, const std::filesystem::path &path) {
    try {
        std::size_t used = 0;
        const int v = std::stoi(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception &) {
        throw FormatError("malformed header field '" + tok + "' in " + path.string());
    }
}

}  // namespace

void write_pfm(const std::filesystem::path &path, const Image<double> &img) {
    if (img.channels() != 1 && img.channels() != 3)
        throw FormatError("PFM supports 1 or 3 channels, got " + std::to_string(img.channels()));
    auto os = open_out(path);
    os << (img.channels() == 3 ? "PF" : "Pf") << '\n'
       << img.width() << ' ' << img.height() << '\n'
       << "-1.0\n";
    for (int y = img.height() - 1; y >= 0; --y)
        for (int x = 0; x < img.width(); ++x)
            for (int c = 0; c < img.channels(); ++c)
                put(os, static_cast<float>(img.at(x, y, c)));
    if (!os) throw FormatError("write failed: " + path.string());
}

Image<double> read_pfm(const std::filesystem::path &path) {
    auto is = open_in(path);
    const std::string magic = header_token(is);
    int channels = 0;
    if (magic == "PF")
        channels = 3;
    else if (magic == "Pf")
        channels = 1;
    else
        throw FormatError("not a PFM file: " + path.string());
    const int w = parse_int(header_token(is), path);
    const int h = parse_int(header_token(is), path);
    const std::string scale_tok = header_token(is);
    double scale = 0.0;
    try {
        scale = std::stod(scale_tok);
    } catch (const std::exception &) {
        throw FormatError("malformed PFM scale in " + path.string());
    }
    if (w <= 0 || h <= 0) throw FormatError("bad PFM dimensions in " + path.string());
    const bool little = scale < 0.0;
    Image<double> img(w, h, channels);
    for (int y = h - 1; y >= 0; --y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < channels; ++c) {
                std::uint32_t bits = get<std::uint32_t>(is);
                if (!little) bits = swap32(bits);
                float f;
                std::memcpy(&f, &bits, sizeof f);
                img.at(x, y, c) = f;
            }
    if (!is) throw FormatError("truncated PFM: " + path.string());
    return img;
}

void write_ppm(const std::filesystem::path &path, const LdrImage &img) {
    const auto &p = img.pixels;
    if (p.channels() != 3) throw FormatError("PPM requires 3 channels");
    auto os = open_out(path);
    os << "P6\n" << p.width() << ' ' << p.height() << '\n' << img.max_value() << '\n';
    const bool wide = img.max_value() > 255;
    for (std::uint16_t v : p.data()) {
        if (wide) os.put(static_cast<char>(v >> 8));
        os.put(static_cast<char>(v & 0xff));
    }
    if (!os) throw FormatError("write failed: " + path.string());
}

LdrImage read_ppm(const std::filesystem::path &path) {
    auto is = open_in(path);
    if (header_token(is) != "P6") throw FormatError("not a binary PPM (P6): " + path.string());
    const int w = parse_int(header_token(is), path);
    const int h = parse_int(header_token(is), path);
    const int maxval = parse_int(header_token(is), path);
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535)
        throw FormatError("bad PPM header in " + path.string());
    int bits = 1;
    while ((1 << bits) - 1 < maxval) ++bits;
    if ((1 << bits) - 1 != maxval)
        throw FormatError("PPM maxval must be 2^bits - 1: " + path.string());
    LdrImage img{Image<std::uint16_t>(w, h, 3), bits};
    const bool wide = maxval > 255;
    for (auto &v : img.pixels.data()) {
        int hi = is.get();
        if (wide) {
            const int lo = is.get();
            v = static_cast<std::uint16_t>((hi << 8) | lo);
        } else {
            v = static_cast<std::uint16_t>(hi);
        }
    }
    if (!is) throw FormatError("truncated PPM: " + path.string());
    return img;
}

void write_flo(const std::filesystem::path &path, const FlowField &flow) {
    if (flow.channels() != 2) throw FormatError(".flo requires 2 channels");
    auto os = open_out(path);
    put(os, kFloMagic);
    put(os, static_cast<std::int32_t>(flow.width()));
    put(os, static_cast<std::int32_t>(flow.height()));
    for (double v : flow.data())
        put(os, static_cast<float>(v));
    if (!os) throw FormatError("write failed: " + path.string());
}

FlowField read_flo(const std::filesystem::path &path) {
    auto is = open_in(path);
    if (get<float>(is) != kFloMagic) throw FormatError("bad .flo magic in " + path.string());
    const auto w = get<std::int32_t>(is);
    const auto h = get<std::int32_t>(is);
    if (!is || w <= 0 || h <= 0) throw FormatError("bad .flo dimensions in " + path.string());
    FlowField flow(w, h, 2);
    for (auto &v : flow.data())
        v = get<float>(is);
    if (!is) throw FormatError("truncated .flo: " + path.string());
    return flow;
}

}  // namespace simval
