#include "adcnn/image.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>

#include "adcnn/error.hpp"

namespace adcnn {

namespace {

[[noreturn]] void fail(const std::string& path, std::size_t offset, const std::string& why) {
    throw FormatError(path + ": " + why + " (byte offset " + std::to_string(offset) + ")");
}

// Skips PGM whitespace and '#' comments; returns offset of the next token.
std::size_t skip_space(const std::string& buf, std::size_t pos) {
    while (pos < buf.size()) {
        const char c = buf[pos];
        if (c == '#') {
            while (pos < buf.size() && buf[pos] != '\n') ++pos;
        } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            ++pos;
        } else {
            break;
        }
    }
    return pos;
}

unsigned long parse_uint(const std::string& buf, std::size_t& pos,
                         const std::string& path, const char* what) {
    pos = skip_space(buf, pos);
    if (pos >= buf.size() || buf[pos] < '0' || buf[pos] > '9')
        fail(path, pos, std::string("expected ") + what);
    unsigned long v = 0;
    while (pos < buf.size() && buf[pos] >= '0' && buf[pos] <= '9') {
        v = v * 10 + static_cast<unsigned long>(buf[pos] - '0');
        if (v > 1000000000UL) fail(path, pos, std::string(what) + " is implausibly large");
        ++pos;
    }
    return v;
}

} // namespace

GrayImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path + ": cannot open for reading");
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (buf.size() < 2 || buf[0] != 'P' || buf[1] != '5')
        fail(path, 0, "bad magic, expected P5");

    std::size_t pos = 2;
    const unsigned long width = parse_uint(buf, pos, path, "width");
    const unsigned long height = parse_uint(buf, pos, path, "height");
    const unsigned long maxval = parse_uint(buf, pos, path, "maxval");
    if (width == 0 || height == 0) fail(path, pos, "zero image extent");
    if (maxval != 255 && maxval != 65535)
        fail(path, pos, "maxval must be 255 or 65535, got " + std::to_string(maxval));

    // Exactly one whitespace byte separates the header from the payload.
    if (pos >= buf.size() || (buf[pos] != '\n' && buf[pos] != ' ' && buf[pos] != '\t' &&
                              buf[pos] != '\r'))
        fail(path, pos, "missing whitespace before pixel data");
    ++pos;

    const std::size_t npix = static_cast<std::size_t>(width) * height;
    const std::size_t bytes_per = maxval == 255 ? 1 : 2;
    if (buf.size() - pos < npix * bytes_per)
        fail(path, buf.size(), "truncated pixel payload, need " +
                                   std::to_string(npix * bytes_per) + " bytes, have " +
                                   std::to_string(buf.size() - pos));

    GrayImage img(width, height);
    const double scale = 1.0 / static_cast<double>(maxval);
    const unsigned char* p = reinterpret_cast<const unsigned char*>(buf.data()) + pos;
    if (bytes_per == 1) {
        for (std::size_t i = 0; i < npix; ++i) img.pixels[i] = p[i] * scale;
    } else {
        for (std::size_t i = 0; i < npix; ++i) {
            const unsigned v = (static_cast<unsigned>(p[2 * i]) << 8) | p[2 * i + 1];
            img.pixels[i] = v * scale;
        }
    }
    return img;
}

void write_pgm(const GrayImage& image, const std::string& path, unsigned maxval) {
    if (maxval != 255 && maxval != 65535)
        throw ConfigError("write_pgm maxval must be 255 or 65535");
    if (image.width == 0 || image.height == 0)
        throw ShapeError("write_pgm: empty image");

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError(path + ": cannot open for writing");

    out << "P5\n" << image.width << " " << image.height << "\n" << maxval << "\n";
    std::vector<unsigned char> payload;
    payload.reserve(image.size() * (maxval == 255 ? 1 : 2));
    for (double v : image.pixels) {
        const double clamped = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
        const unsigned q = static_cast<unsigned>(std::lround(clamped * maxval));
        if (maxval == 255) {
            payload.push_back(static_cast<unsigned char>(q));
        } else {
            payload.push_back(static_cast<unsigned char>(q >> 8));
            payload.push_back(static_cast<unsigned char>(q & 0xff));
        }
    }
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size()));
    if (!out) throw FormatError(path + ": write failed");
}

Tensor to_tensor(const GrayImage& image) {
    return Tensor({1, image.height, image.width}, image.pixels);
}

GrayImage from_tensor(const Tensor& t) {
    if (t.rank() == 3 && t.dim(0) == 1) {
        GrayImage img(t.dim(2), t.dim(1));
        img.pixels = t.data;
        return img;
    }
    if (t.rank() == 2) {
        GrayImage img(t.dim(1), t.dim(0));
        img.pixels = t.data;
        return img;
    }
    throw ShapeError("from_tensor expects [1,H,W] or [H,W]");
}

GrayImage downscale_mean(const GrayImage& image, std::size_t factor) {
    if (factor == 0) throw ConfigError("downscale factor must be positive");
    if (factor == 1) return image;
    if (image.width % factor != 0 || image.height % factor != 0)
        throw ShapeError("downscale factor must divide both extents");

    GrayImage out(image.width / factor, image.height / factor);
    const double inv = 1.0 / static_cast<double>(factor * factor);
    for (std::size_t r = 0; r < out.height; ++r) {
        for (std::size_t c = 0; c < out.width; ++c) {
            double acc = 0.0;
            for (std::size_t dr = 0; dr < factor; ++dr) {
                const double* row = &image.pixels[(r * factor + dr) * image.width + c * factor];
                for (std::size_t dc = 0; dc < factor; ++dc) acc += row[dc];
            }
            out.at(r, c) = acc * inv;
        }
    }
    return out;
}

} // namespace adcnn
