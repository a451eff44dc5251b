#include "hep2/data/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

namespace hep2::data {

namespace {

std::string lower_ext(const std::string& path) {
    const auto dot = path.rfind('.');
    if (dot == std::string::npos) return "";
    std::string ext = path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

GrayImage load_png(const std::string& path, bool scale_to_unit) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw DataError("cannot open image: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw DataError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw DataError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw DataError("failed to decode PNG: " + path);
    }

    png_init_io(png, fp.get());
    png_read_info(png, info);

    const png_byte color = png_get_color_type(png, info);
    const png_byte depth = png_get_bit_depth(png, info);

    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    if (color == PNG_COLOR_TYPE_RGB || color == PNG_COLOR_TYPE_RGB_ALPHA ||
        color == PNG_COLOR_TYPE_PALETTE)
        png_set_rgb_to_gray_fixed(png, 1, -1, -1);  // luminance weights
    if (depth == 16) png_set_swap(png);  // native-endian 16-bit samples
    png_read_update_info(png, info);

    const int h = static_cast<int>(png_get_image_height(png, info));
    const int w = static_cast<int>(png_get_image_width(png, info));
    const png_byte out_depth = png_get_bit_depth(png, info);
    const float maxval = out_depth == 16 ? 65535.f : 255.f;

    GrayImage img(h, w);
    std::vector<png_byte> row(png_get_rowbytes(png, info));
    for (int y = 0; y < h; ++y) {
        png_read_row(png, row.data(), nullptr);
        for (int x = 0; x < w; ++x) {
            float v;
            if (out_depth == 16) {
                const std::uint16_t* r16 = reinterpret_cast<const std::uint16_t*>(row.data());
                v = static_cast<float>(r16[x]);
            } else {
                v = static_cast<float>(row[static_cast<std::size_t>(x)]);
            }
            img.at(y, x) = scale_to_unit ? v / maxval : v;
        }
    }
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void save_png(const std::string& path, const GrayImage& img) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw DataError("cannot write image: " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw DataError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw DataError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw DataError("failed to encode PNG: " + path);
    }

    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
                 static_cast<png_uint_32>(img.height), 8, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<png_byte> row(static_cast<std::size_t>(img.width));
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const float v = std::clamp(img.at(y, x), 0.f, 1.f);
            row[static_cast<std::size_t>(x)] =
                static_cast<png_byte>(std::lround(v * 255.f));
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

GrayImage load_pgm(const std::string& path, bool scale_to_unit) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open image: " + path);

    auto next_token = [&f, &path]() {
        std::string tok;
        while (f >> tok) {
            if (tok[0] == '#') {
                std::string rest;
                std::getline(f, rest);
                continue;
            }
            return tok;
        }
        throw DataError("truncated PGM header: " + path);
    };

    const std::string magic = next_token();
    if (magic != "P5" && magic != "P2") throw DataError("not a PGM file: " + path);
    const int w = std::stoi(next_token());
    const int h = std::stoi(next_token());
    const int maxval = std::stoi(next_token());
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535)
        throw DataError("bad PGM header: " + path);

    GrayImage img(h, w);
    const float scale = scale_to_unit ? 1.f / static_cast<float>(maxval) : 1.f;
    if (magic == "P2") {
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                int v;
                if (!(f >> v)) throw DataError("truncated PGM data: " + path);
                img.at(y, x) = static_cast<float>(v) * scale;
            }
    } else {
        f.get();  // single whitespace after maxval
        const int bytes = maxval > 255 ? 2 : 1;
        std::vector<unsigned char> buf(static_cast<std::size_t>(w) * h * bytes);
        f.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
        if (!f) throw DataError("truncated PGM data: " + path);
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const std::size_t i = (static_cast<std::size_t>(y) * w + x) * bytes;
                const int v = bytes == 2 ? (buf[i] << 8) | buf[i + 1] : buf[i];
                img.at(y, x) = static_cast<float>(v) * scale;
            }
    }
    return img;
}

void save_pgm(const std::string& path, const GrayImage& img) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write image: " + path);
    f << "P5\n" << img.width << " " << img.height << "\n255\n";
    std::vector<unsigned char> buf(img.pixels.size());
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
        const float v = std::clamp(img.pixels[i], 0.f, 1.f);
        buf[i] = static_cast<unsigned char>(std::lround(v * 255.f));
    }
    f.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!f) throw DataError("write failed: " + path);
}

}  // namespace

GrayImage load_image(const std::string& path, bool scale_to_unit) {
    const std::string ext = lower_ext(path);
    if (ext == "png") return load_png(path, scale_to_unit);
    if (ext == "pgm") return load_pgm(path, scale_to_unit);
    throw DataError("unsupported image format '." + ext + "': " + path);
}

void save_image(const std::string& path, const GrayImage& img) {
    const std::string ext = lower_ext(path);
    if (ext == "png")
        save_png(path, img);
    else if (ext == "pgm")
        save_pgm(path, img);
    else
        throw DataError("unsupported image format '." + ext + "': " + path);
}

GrayImage resize_bilinear(const GrayImage& img, int side) {
    if (!img.square())
        throw DataError("resize requires a square image, got " + std::to_string(img.height) +
                        "x" + std::to_string(img.width));
    if (side <= 0) throw DataError("resize side must be positive");

    GrayImage out(side, side);
    const float scale = static_cast<float>(img.height) / static_cast<float>(side);
    const int last = img.height - 1;
    for (int oy = 0; oy < side; ++oy) {
        const float sy = std::clamp((oy + 0.5f) * scale - 0.5f, 0.f, static_cast<float>(last));
        const int y0 = static_cast<int>(sy);
        const int y1 = std::min(y0 + 1, last);
        const float fy = sy - static_cast<float>(y0);
        for (int ox = 0; ox < side; ++ox) {
            const float sx =
                std::clamp((ox + 0.5f) * scale - 0.5f, 0.f, static_cast<float>(last));
            const int x0 = static_cast<int>(sx);
            const int x1 = std::min(x0 + 1, last);
            const float fx = sx - static_cast<float>(x0);
            const float top = img.at(y0, x0) * (1.f - fx) + img.at(y0, x1) * fx;
            const float bot = img.at(y1, x0) * (1.f - fx) + img.at(y1, x1) * fx;
            out.at(oy, ox) = top * (1.f - fy) + bot * fy;
        }
    }
    return out;
}

GrayImage rotate_quarter(const GrayImage& img, int quarter_turns) {
    if (!img.square()) throw DataError("rotate requires a square image");
    const int n = img.height;
    const int q = ((quarter_turns % 4) + 4) % 4;
    GrayImage out(n, n);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            // one counterclockwise quarter turn maps (y, x) <- (x, n-1-y)
            float v;
            switch (q) {
                case 0: v = img.at(y, x); break;
                case 1: v = img.at(x, n - 1 - y); break;
                case 2: v = img.at(n - 1 - y, n - 1 - x); break;
                default: v = img.at(n - 1 - x, y); break;
            }
            out.at(y, x) = v;
        }
    return out;
}

GrayImage mirror_lr(const GrayImage& img) {
    GrayImage out(img.height, img.width);
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) out.at(y, x) = img.at(y, img.width - 1 - x);
    return out;
}

CellRecord rotate(const CellRecord& cell, int quarter_turns) {
    CellRecord out = cell;
    out.pixels = rotate_quarter(cell.pixels, quarter_turns);
    out.provenance.quarter_turns = (cell.provenance.quarter_turns + quarter_turns) % 4;
    return out;
}

CellRecord mirror(const CellRecord& cell) {
    CellRecord out = cell;
    out.pixels = mirror_lr(cell.pixels);
    out.provenance.mirrored = !cell.provenance.mirrored;
    return out;
}

CellRecord resize_bilinear(const CellRecord& cell, int side) {
    CellRecord out = cell;
    out.pixels = resize_bilinear(cell.pixels, side);
    return out;
}

}  // namespace hep2::data
