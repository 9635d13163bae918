#include "edgereg/io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

namespace edgereg {

namespace {

std::string io_msg(const std::string& path, const std::string& what, std::streamoff offset) {
    return path + ": " + what + " (byte offset " + std::to_string(offset) + ")";
}

// Skips whitespace and '#' comments, then reads one unsigned decimal token.
long read_pnm_uint(std::istream& in, const std::string& path, const char* field) {
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    if (c == EOF) throw data_error(io_msg(path, std::string("missing ") + field, in.tellg()));
    if (!std::isdigit(c))
        throw data_error(io_msg(path, std::string("malformed ") + field, static_cast<std::streamoff>(in.tellg()) - 1));
    long value = 0;
    while (c != EOF && std::isdigit(c)) {
        value = value * 10 + (c - '0');
        if (value > std::numeric_limits<int>::max())
            throw data_error(io_msg(path, std::string("oversized ") + field, in.tellg()));
        c = in.get();
    }
    if (c != EOF) in.unget();
    return value;
}

} // namespace

Image2D load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error(path + ": cannot open file");

    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (in.gcount() != 2) throw data_error(io_msg(path, "truncated magic", 0));
    if (magic[0] != 'P' || (magic[1] != '2' && magic[1] != '5'))
        throw data_error(io_msg(path, std::string("unsupported magic \"") + magic[0] + magic[1] + "\"", 0));
    const bool binary = magic[1] == '5';

    const long width = read_pnm_uint(in, path, "width");
    const long height = read_pnm_uint(in, path, "height");
    const long maxval = read_pnm_uint(in, path, "maxval");
    if (width < 1 || height < 1)
        throw data_error(io_msg(path, "invalid dimensions", in.tellg()));
    if (maxval != 255 && maxval != 65535)
        throw data_error(io_msg(path, "unsupported maxval " + std::to_string(maxval), in.tellg()));

    Image2D img(static_cast<int>(width), static_cast<int>(height));
    const double maxv = static_cast<double>(maxval);

    if (binary) {
        int sep = in.get(); // single whitespace byte before the payload
        if (sep == EOF || !std::isspace(sep))
            throw data_error(io_msg(path, "missing payload separator", in.tellg()));
        const size_t bpp = maxval > 255 ? 2 : 1;
        std::vector<unsigned char> payload(img.size() * bpp);
        in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
        if (static_cast<size_t>(in.gcount()) != payload.size())
            throw data_error(io_msg(path, "truncated payload", in.tellg()));
        for (size_t i = 0; i < img.size(); ++i) {
            const unsigned v = bpp == 1
                ? payload[i]
                : (static_cast<unsigned>(payload[2 * i]) << 8) | payload[2 * i + 1];
            img.data[i] = v / maxv;
        }
    } else {
        for (size_t i = 0; i < img.size(); ++i) {
            const long v = read_pnm_uint(in, path, "sample");
            if (v > maxval)
                throw data_error(io_msg(path, "sample exceeds maxval", in.tellg()));
            img.data[i] = v / maxv;
        }
    }
    return img;
}

void save_pgm(const Image2D& img, const std::string& path, int maxval) {
    if (maxval != 255 && maxval != 65535)
        throw data_error(path + ": unsupported maxval " + std::to_string(maxval));
    for (double v : img.data)
        if (!(v >= 0.0 && v <= 1.0))
            throw data_error(path + ": intensity out of range [0,1]");

    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error(path + ": cannot open file for writing");
    out << "P5\n" << img.width << " " << img.height << "\n" << maxval << "\n";
    if (maxval == 255) {
        std::vector<unsigned char> payload(img.size());
        for (size_t i = 0; i < img.size(); ++i)
            payload[i] = static_cast<unsigned char>(std::lround(img.data[i] * 255.0));
        out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
    } else {
        std::vector<unsigned char> payload(img.size() * 2);
        for (size_t i = 0; i < img.size(); ++i) {
            const unsigned v = static_cast<unsigned>(std::lround(img.data[i] * 65535.0));
            payload[2 * i] = static_cast<unsigned char>(v >> 8);
            payload[2 * i + 1] = static_cast<unsigned char>(v & 0xff);
        }
        out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
    }
    if (!out) throw data_error(path + ": write failed");
}

LabelMap2D load_label_pgm(const std::string& path) {
    const Image2D img = load_pgm(path);
    LabelMap2D labels(img.width, img.height);
    // load_pgm divided by maxval; undo the scaling that lands on an integer grid.
    for (size_t i = 0; i < img.size(); ++i) {
        const double v255 = img.data[i] * 255.0;
        const bool on_8bit_grid = std::abs(v255 - std::round(v255)) < 1e-9;
        labels.labels[i] = static_cast<int32_t>(std::lround(on_8bit_grid ? v255 : img.data[i] * 65535.0));
    }
    return labels;
}

void save_label_pgm(const LabelMap2D& labels, const std::string& path) {
    int32_t maxl = 0;
    for (int32_t l : labels.labels) {
        if (l < 0) throw data_error(path + ": negative label");
        maxl = std::max(maxl, l);
    }
    const int maxval = maxl > 255 ? 65535 : 255;
    if (maxl > 65535) throw data_error(path + ": label exceeds 65535");
    Image2D img(labels.width, labels.height);
    for (size_t i = 0; i < labels.size(); ++i)
        img.data[i] = static_cast<double>(labels.labels[i]) / maxval;
    save_pgm(img, path, maxval);
}

namespace {

void put_u32_le(std::ostream& out, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t get_u32_le(std::istream& in, const std::string& path, const char* field) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (in.gcount() != 4)
        throw data_error(io_msg(path, std::string("truncated ") + field, in.tellg()));
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

} // namespace

VectorField2D read_field(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error(path + ": cannot open file");
    char magic[4] = {0, 0, 0, 0};
    in.read(magic, 4);
    if (in.gcount() != 4 || std::memcmp(magic, "EDR1", 4) != 0)
        throw data_error(io_msg(path, "bad magic (expected \"EDR1\")", 0));
    const uint32_t width = get_u32_le(in, path, "width");
    const uint32_t height = get_u32_le(in, path, "height");
    const uint32_t channels = get_u32_le(in, path, "channels");
    if (width < 1 || height < 1 || width > (1u << 20) || height > (1u << 20))
        throw data_error(io_msg(path, "invalid dimensions", in.tellg()));
    if (channels != 2)
        throw data_error(io_msg(path, "unsupported channel count " + std::to_string(channels), in.tellg()));

    VectorField2D field(static_cast<int>(width), static_cast<int>(height));
    std::vector<unsigned char> payload(field.comp.size() * 4);
    in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
    if (static_cast<size_t>(in.gcount()) != payload.size())
        throw data_error(io_msg(path, "truncated field", in.tellg()));
    for (size_t i = 0; i < field.comp.size(); ++i) {
        uint32_t bits = static_cast<uint32_t>(payload[4 * i]) |
                        (static_cast<uint32_t>(payload[4 * i + 1]) << 8) |
                        (static_cast<uint32_t>(payload[4 * i + 2]) << 16) |
                        (static_cast<uint32_t>(payload[4 * i + 3]) << 24);
        float f;
        std::memcpy(&f, &bits, 4);
        if (!std::isfinite(f))
            throw data_error(io_msg(path, "non-finite component", in.tellg()));
        field.comp[i] = f;
    }
    return field;
}

void write_field(const VectorField2D& field, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error(path + ": cannot open file for writing");
    out.write("EDR1", 4);
    put_u32_le(out, static_cast<uint32_t>(field.width));
    put_u32_le(out, static_cast<uint32_t>(field.height));
    put_u32_le(out, 2);
    std::vector<unsigned char> payload(field.comp.size() * 4);
    for (size_t i = 0; i < field.comp.size(); ++i) {
        const float f = static_cast<float>(field.comp[i]);
        uint32_t bits;
        std::memcpy(&bits, &f, 4);
        payload[4 * i] = static_cast<unsigned char>(bits & 0xff);
        payload[4 * i + 1] = static_cast<unsigned char>((bits >> 8) & 0xff);
        payload[4 * i + 2] = static_cast<unsigned char>((bits >> 16) & 0xff);
        payload[4 * i + 3] = static_cast<unsigned char>((bits >> 24) & 0xff);
    }
    out.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
    if (!out) throw data_error(path + ": write failed");
}

} // namespace edgereg
