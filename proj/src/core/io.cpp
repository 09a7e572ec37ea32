#include "io.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "error.hpp"
#include "volume.hpp"

namespace odtqc {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

void ByteWriter::u32(std::uint32_t v) {
    char b[4];
    std::memcpy(b, &v, 4);
    buf_.append(b, 4);
}

void ByteWriter::f64(double v) {
    char b[8];
    std::memcpy(b, &v, 8);
    buf_.append(b, 8);
}

std::string_view ByteReader::bytes(std::size_t n) {
    if (remaining() < n) fail_io(context_ + ": truncated data");
    auto out = data_.substr(pos_, n);
    pos_ += n;
    return out;
}

std::uint8_t ByteReader::u8() { return static_cast<std::uint8_t>(bytes(1)[0]); }

std::uint32_t ByteReader::u32() {
    std::uint32_t v;
    std::memcpy(&v, bytes(4).data(), 4);
    return v;
}

double ByteReader::f64() {
    double v;
    std::memcpy(&v, bytes(8).data(), 8);
    return v;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_io("cannot open " + path.string() + " for reading");
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) fail_io("error reading " + path.string());
    return data;
}

void write_file(const std::filesystem::path& path, std::string_view data) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) fail_io("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail_io("cannot open " + path.string() + " for writing");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.close();
    if (!out) fail_io("error writing " + path.string());
}

std::uint32_t crc32_of(std::string_view data) {
    uLong crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size()));
    return static_cast<std::uint32_t>(crc);
}

namespace {

void expect_magic(ByteReader& r, std::string_view magic, const std::string& context) {
    if (r.bytes(4) != magic) fail_io(context + ": bad magic, expected " + std::string(magic));
}

void expect_consumed(const ByteReader& r, const std::string& context) {
    if (r.remaining() != 0) fail_io(context + ": trailing bytes after payload");
}

}  // namespace

std::string encode_field(const ComplexField2D& field) {
    field.validate();
    ByteWriter w;
    w.bytes("OFC1");
    w.u32(static_cast<std::uint32_t>(field.width));
    w.u32(static_cast<std::uint32_t>(field.height));
    w.f64(field.pixel_pitch);
    for (const auto& v : field.values) {
        w.f64(v.real());
        w.f64(v.imag());
    }
    return std::move(w.data());
}

ComplexField2D decode_field(std::string_view data, const std::string& context) {
    ByteReader r(data, context);
    expect_magic(r, "OFC1", context);
    const auto w = r.u32();
    const auto h = r.u32();
    const double pitch = r.f64();
    if (w == 0 || h == 0 || w > (1u << 15) || h > (1u << 15)) fail_io(context + ": implausible dimensions");
    if (r.remaining() != std::size_t{w} * h * 16) fail_io(context + ": payload size does not match dimensions");
    std::vector<cplx> values(std::size_t{w} * h);
    for (auto& v : values) {
        const double re = r.f64();
        const double im = r.f64();
        v = {re, im};
    }
    expect_consumed(r, context);
    try {
        return ComplexField2D(static_cast<int>(w), static_cast<int>(h), pitch, std::move(values));
    } catch (const Error& e) {
        fail_io(context + ": " + e.what());
    }
}

void save_field(const std::filesystem::path& path, const ComplexField2D& field) {
    write_file(path, encode_field(field));
}

ComplexField2D load_field(const std::filesystem::path& path) { return decode_field(read_file(path), path.string()); }

std::string encode_phase(const PhaseImage& image) {
    image.validate();
    ByteWriter w;
    w.bytes("OPH1");
    w.u32(static_cast<std::uint32_t>(image.width));
    w.u32(static_cast<std::uint32_t>(image.height));
    for (double v : image.values) w.f64(v);
    return std::move(w.data());
}

PhaseImage decode_phase(std::string_view data, const std::string& context) {
    ByteReader r(data, context);
    expect_magic(r, "OPH1", context);
    const auto w = r.u32();
    const auto h = r.u32();
    if (w == 0 || h == 0 || w > (1u << 15) || h > (1u << 15)) fail_io(context + ": implausible dimensions");
    if (r.remaining() != std::size_t{w} * h * 8) fail_io(context + ": payload size does not match dimensions");
    std::vector<double> values(std::size_t{w} * h);
    for (auto& v : values) v = r.f64();
    try {
        return PhaseImage(static_cast<int>(w), static_cast<int>(h), std::move(values));
    } catch (const Error& e) {
        fail_io(context + ": " + e.what());
    }
}

void save_phase(const std::filesystem::path& path, const PhaseImage& image) { write_file(path, encode_phase(image)); }

PhaseImage load_phase(const std::filesystem::path& path) { return decode_phase(read_file(path), path.string()); }

std::string encode_volume(const RIVolume& volume) {
    volume.validate();
    ByteWriter w;
    w.bytes("RIV1");
    w.u32(static_cast<std::uint32_t>(volume.nx));
    w.u32(static_cast<std::uint32_t>(volume.ny));
    w.u32(static_cast<std::uint32_t>(volume.nz));
    w.f64(volume.voxel_pitch);
    w.f64(volume.n_medium);
    for (double v : volume.values) w.f64(v);
    return std::move(w.data());
}

RIVolume decode_volume(std::string_view data, const std::string& context) {
    ByteReader r(data, context);
    expect_magic(r, "RIV1", context);
    RIVolume v;
    v.nx = static_cast<int>(r.u32());
    v.ny = static_cast<int>(r.u32());
    v.nz = static_cast<int>(r.u32());
    v.voxel_pitch = r.f64();
    v.n_medium = r.f64();
    if (v.nx <= 0 || v.ny <= 0 || v.nz <= 0 || v.nx > 4096 || v.ny > 4096 || v.nz > 4096)
        fail_io(context + ": implausible dimensions");
    const std::size_t n = static_cast<std::size_t>(v.nx) * v.ny * v.nz;
    if (r.remaining() != n * 8) fail_io(context + ": payload size does not match dimensions");
    v.values.resize(n);
    for (auto& x : v.values) x = r.f64();
    try {
        v.validate();
    } catch (const Error& e) {
        fail_io(context + ": " + e.what());
    }
    return v;
}

void save_volume(const std::filesystem::path& path, const RIVolume& volume) {
    write_file(path, encode_volume(volume));
}

RIVolume load_volume(const std::filesystem::path& path) { return decode_volume(read_file(path), path.string()); }

namespace {

void png_chunk(ByteWriter& w, std::string_view type, std::string_view payload) {
    auto be32 = [&](std::uint32_t v) {
        w.u8(static_cast<std::uint8_t>(v >> 24));
        w.u8(static_cast<std::uint8_t>(v >> 16));
        w.u8(static_cast<std::uint8_t>(v >> 8));
        w.u8(static_cast<std::uint8_t>(v));
    };
    be32(static_cast<std::uint32_t>(payload.size()));
    std::string typed(type);
    typed.append(payload);
    w.bytes(typed);
    be32(crc32_of(typed));
}

}  // namespace

std::string encode_png_gray(const RealImage& image, double lo, double hi) {
    image.validate();
    std::string raw;
    raw.reserve(static_cast<std::size_t>(image.height) * (image.width + 1));
    const double span = hi > lo ? hi - lo : 1.0;
    for (int y = 0; y < image.height; ++y) {
        raw.push_back('\0');  // filter: none
        for (int x = 0; x < image.width; ++x) {
            double t = (image.at(x, y) - lo) / span;
            t = std::clamp(t, 0.0, 1.0);
            raw.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(t * 255.0))));
        }
    }
    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::string packed(bound, '\0');
    if (compress2(reinterpret_cast<Bytef*>(packed.data()), &bound, reinterpret_cast<const Bytef*>(raw.data()),
                  static_cast<uLong>(raw.size()), 6) != Z_OK)
        fail_internal("PNG deflate failed");
    packed.resize(bound);

    ByteWriter ihdr;
    auto be32 = [&](std::uint32_t v) {
        ihdr.u8(static_cast<std::uint8_t>(v >> 24));
        ihdr.u8(static_cast<std::uint8_t>(v >> 16));
        ihdr.u8(static_cast<std::uint8_t>(v >> 8));
        ihdr.u8(static_cast<std::uint8_t>(v));
    };
    be32(static_cast<std::uint32_t>(image.width));
    be32(static_cast<std::uint32_t>(image.height));
    ihdr.u8(8);  // bit depth
    ihdr.u8(0);  // grayscale
    ihdr.u8(0);
    ihdr.u8(0);
    ihdr.u8(0);

    ByteWriter w;
    w.bytes("\x89PNG\r\n\x1a\n");
    png_chunk(w, "IHDR", ihdr.data());
    png_chunk(w, "IDAT", packed);
    png_chunk(w, "IEND", "");
    return std::move(w.data());
}

void save_png_gray(const std::filesystem::path& path, const RealImage& image, double lo, double hi) {
    write_file(path, encode_png_gray(image, lo, hi));
}

}  // namespace odtqc
