#include "urban/raster_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace urban {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

struct SidecarMeta {
    std::optional<int> width, height;
    std::optional<double> resolution_m;
};

std::optional<std::string> find_sidecar(const std::string& path) {
    fs::path p(path);
    fs::path stem_json = p;
    stem_json.replace_extension(".json");
    if (fs::exists(stem_json)) return stem_json.string();
    fs::path appended = p;
    appended += ".json";
    if (fs::exists(appended)) return appended.string();
    return std::nullopt;
}

SidecarMeta read_sidecar(const std::string& sidecar_path) {
    std::ifstream in(sidecar_path);
    if (!in) throw InputError("cannot open sidecar " + sidecar_path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw InputError("corrupt sidecar " + sidecar_path + ": " + e.what());
    }
    SidecarMeta m;
    if (j.contains("width")) m.width = j.at("width").get<int>();
    if (j.contains("height")) m.height = j.at("height").get<int>();
    if (j.contains("resolution_m")) m.resolution_m = j.at("resolution_m").get<double>();
    return m;
}

void write_sidecar(const Grid& g, const std::string& raster_path) {
    fs::path p(raster_path);
    p.replace_extension(".json");
    json j;
    j["width"] = g.width;
    j["height"] = g.height;
    j["resolution_m"] = g.resolution_m;
    write_text_file(p.string(), j.dump(2) + "\n");
}

Grid load_png(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw InputError("missing file: " + path);

    png_byte header[8];
    if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8) != 0)
        throw InputError("corrupt PNG header: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw InputError("libpng init failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw InputError("libpng init failed");
    }
    std::vector<std::vector<png_byte>> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw InputError("corrupt PNG data: " + path);
    }
    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const int width = static_cast<int>(png_get_image_width(png, info));
    const int height = static_cast<int>(png_get_image_height(png, info));
    int bit_depth = png_get_bit_depth(png, info);
    int color_type = png_get_color_type(png, info);

    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    bit_depth = png_get_bit_depth(png, info);
    color_type = png_get_color_type(png, info);
    const int channels = png_get_channels(png, info);
    const std::size_t rowbytes = png_get_rowbytes(png, info);

    rows.assign(static_cast<std::size_t>(height), std::vector<png_byte>(rowbytes));
    std::vector<png_bytep> row_ptrs(static_cast<std::size_t>(height));
    for (int y = 0; y < height; ++y) row_ptrs[static_cast<std::size_t>(y)] = rows[static_cast<std::size_t>(y)].data();
    png_read_image(png, row_ptrs.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    Grid g(width, height, 1.0);
    const double scale = (bit_depth == 16) ? 1.0 / 65535.0 : 1.0 / 255.0;
    const int bytes_per_sample = (bit_depth == 16) ? 2 : 1;
    for (int y = 0; y < height; ++y) {
        const png_byte* row = rows[static_cast<std::size_t>(y)].data();
        for (int x = 0; x < width; ++x) {
            const png_byte* px = row + static_cast<std::size_t>(x) * static_cast<std::size_t>(channels) * static_cast<std::size_t>(bytes_per_sample);
            auto sample = [&](int c) -> double {
                const png_byte* s = px + c * bytes_per_sample;
                if (bytes_per_sample == 2)
                    return static_cast<double>((static_cast<unsigned>(s[0]) << 8) | s[1]);
                return static_cast<double>(s[0]);
            };
            double v;
            if (channels >= 3)
                v = 0.299 * sample(0) + 0.587 * sample(1) + 0.114 * sample(2);
            else
                v = sample(0);
            g.at(x, y) = v * scale;
        }
    }
    return g;
}

Grid load_f32(const std::string& path, bool* resolution_known) {
    auto sidecar = find_sidecar(path);
    if (!sidecar) throw InputError("raw-float input requires a JSON sidecar: " + path);
    SidecarMeta meta = read_sidecar(*sidecar);
    if (!meta.width || !meta.height)
        throw InputError("sidecar missing width/height: " + *sidecar);
    if (resolution_known) *resolution_known = meta.resolution_m.has_value();

    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("missing file: " + path);
    in.seekg(0, std::ios::end);
    const auto nbytes = static_cast<std::size_t>(in.tellg());
    in.seekg(0);

    const auto expected = static_cast<std::size_t>(*meta.width) *
                          static_cast<std::size_t>(*meta.height) * sizeof(float);
    if (nbytes != expected) {
        std::ostringstream os;
        os << "sidecar dimension mismatch: " << path << " holds " << nbytes / sizeof(float)
           << " float32 values, sidecar says " << *meta.width << "x" << *meta.height;
        throw InputError(os.str());
    }

    std::vector<float> buf(static_cast<std::size_t>(*meta.width) * static_cast<std::size_t>(*meta.height));
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(nbytes));
    if (!in) throw InputError("short read: " + path);

    Grid g(*meta.width, *meta.height, meta.resolution_m.value_or(1.0));
    for (std::size_t i = 0; i < buf.size(); ++i) {
        if (!std::isfinite(buf[i])) {
            std::ostringstream os;
            os << path << ": non-finite value at index " << i;
            throw InputError(os.str());
        }
        g.values[i] = static_cast<double>(buf[i]);
    }
    return g;
}

void write_png_gray(const Grid& g, const std::string& path, int bit_depth) {
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw InputError("cannot write " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw InputError("PNG write failed: " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(g.width), static_cast<png_uint_32>(g.height),
                 bit_depth, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    const int maxval = (bit_depth == 16) ? 65535 : 255;
    const std::size_t bps = (bit_depth == 16) ? 2 : 1;
    std::vector<png_byte> row(static_cast<std::size_t>(g.width) * bps);
    for (int y = 0; y < g.height; ++y) {
        for (int x = 0; x < g.width; ++x) {
            double v = g.at(x, y);
            if (v < 0) v = 0;
            if (v > 1) v = 1;
            const auto q = static_cast<unsigned>(std::lround(v * maxval));
            if (bit_depth == 16) {
                row[static_cast<std::size_t>(x) * 2] = static_cast<png_byte>(q >> 8);
                row[static_cast<std::size_t>(x) * 2 + 1] = static_cast<png_byte>(q & 0xff);
            } else {
                row[static_cast<std::size_t>(x)] = static_cast<png_byte>(q);
            }
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace

Grid load_grid(const std::string& path, GridKind kind,
               std::optional<double> resolution_override) {
    Grid g;
    bool resolution_known = false;
    if (kind == GridKind::raw_float) {
        g = load_f32(path, &resolution_known);
    } else {
        g = load_png(path);
        if (auto sidecar = find_sidecar(path)) {
            SidecarMeta meta = read_sidecar(*sidecar);
            if ((meta.width && *meta.width != g.width) ||
                (meta.height && *meta.height != g.height)) {
                throw InputError("sidecar dimension mismatch: " + *sidecar);
            }
            if (meta.resolution_m) {
                g.resolution_m = *meta.resolution_m;
                resolution_known = true;
            }
        }
    }
    if (resolution_override) {
        g.resolution_m = *resolution_override;
        resolution_known = true;
    }
    if (!resolution_known)
        throw InputError("resolution unknown for " + path +
                         ": provide a sidecar resolution_m or a CLI override");
    if (g.resolution_m <= 0) throw InputError("resolution must be > 0: " + path);
    require_finite(g, path);
    return g;
}

void save_grid_f32(const Grid& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    std::vector<float> buf(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) buf[i] = static_cast<float>(g.values[i]);
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(buf.size() * sizeof(float)));
    if (!out) throw InputError("short write: " + path);
    out.close();
    write_sidecar(g, path);
}

void save_png8(const Grid& g, const std::string& path) { write_png_gray(g, path, 8); }
void save_png16(const Grid& g, const std::string& path) { write_png_gray(g, path, 16); }

void save_indexed_png(const std::vector<std::uint8_t>& indices, int width, int height,
                      const std::string& path) {
    if (indices.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
        throw InputError("index buffer does not match dimensions");
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw InputError("cannot write " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw InputError("PNG write failed: " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
                 PNG_COLOR_TYPE_PALETTE, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    // 0=bg, 1=water (blue), 2=terrain (tan), 3=urban (gray), 4=center (red)
    png_color palette[5] = {{0, 0, 0}, {52, 116, 235}, {189, 178, 140}, {128, 128, 128}, {220, 40, 40}};
    png_set_PLTE(png, info, palette, 5);
    png_write_info(png, info);
    std::vector<png_byte> row(static_cast<std::size_t>(width));
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x)
            row[static_cast<std::size_t>(x)] =
                indices[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) + static_cast<std::size_t>(x)];
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << content;
    if (!out) throw InputError("short write: " + path);
}

}  // namespace urban
