#include "pollisim/image_io.hpp"

#include <cmath>
#include <fstream>

#include "pollisim/errors.hpp"

namespace pollisim {

namespace {

// Reads one whitespace-delimited token, skipping `#` comment lines.
std::string next_token(std::istream& in) {
    std::string tok;
    while (in >> tok) {
        if (tok[0] == '#') {
            std::string rest;
            std::getline(in, rest);
            continue;
        }
        return tok;
    }
    throw DomainError("netpbm: truncated header");
}

}  // namespace

void write_ppm(const Image& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DomainError("write_ppm: cannot open " + path);
    out << "P6\n" << img.width() << " " << img.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data().data()),
              static_cast<std::streamsize>(img.data().size()));
    if (!out) throw DomainError("write_ppm: short write to " + path);
}

Image read_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("read_ppm: cannot open " + path);
    if (next_token(in) != "P6") throw DomainError("read_ppm: not a P6 pixmap: " + path);
    const int w = std::stoi(next_token(in));
    const int h = std::stoi(next_token(in));
    const int maxval = std::stoi(next_token(in));
    if (w <= 0 || h <= 0 || maxval != 255) throw DomainError("read_ppm: unsupported header in " + path);
    in.get();  // single whitespace after maxval
    Image img(w, h);
    in.read(reinterpret_cast<char*>(img.data().data()),
            static_cast<std::streamsize>(img.data().size()));
    if (!in) throw DomainError("read_ppm: truncated pixel data in " + path);
    return img;
}

void write_pgm16(const DepthMap& depth, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DomainError("write_pgm16: cannot open " + path);
    out << "P5\n" << depth.width() << " " << depth.height() << "\n65535\n";
    for (float v : depth.data()) {
        std::uint16_t mm = 0;
        if (DepthMap::is_return(v)) {
            const long r = std::lround(static_cast<double>(v));
            mm = static_cast<std::uint16_t>(std::min(r, 65535L));
            if (mm == 0) mm = 1;  // keep sub-half-mm returns distinct from the sentinel
        }
        const char bytes[2] = {static_cast<char>(mm >> 8), static_cast<char>(mm & 0xff)};
        out.write(bytes, 2);
    }
    if (!out) throw DomainError("write_pgm16: short write to " + path);
}

DepthMap read_pgm16(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("read_pgm16: cannot open " + path);
    if (next_token(in) != "P5") throw DomainError("read_pgm16: not a P5 graymap: " + path);
    const int w = std::stoi(next_token(in));
    const int h = std::stoi(next_token(in));
    const int maxval = std::stoi(next_token(in));
    if (w <= 0 || h <= 0 || maxval != 65535) throw DomainError("read_pgm16: unsupported header in " + path);
    in.get();
    DepthMap depth(w, h);
    for (float& v : depth.data()) {
        unsigned char bytes[2];
        in.read(reinterpret_cast<char*>(bytes), 2);
        const std::uint16_t mm = static_cast<std::uint16_t>((bytes[0] << 8) | bytes[1]);
        v = mm == 0 ? DepthMap::kNoReturn : static_cast<float>(mm);
    }
    if (!in) throw DomainError("read_pgm16: truncated sample data in " + path);
    return depth;
}

}  // namespace pollisim
