#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "field.hpp"

namespace odtqc {

struct RIVolume;

// Little-endian byte buffer writer/reader used by every binary format here.
class ByteWriter {
public:
    void bytes(std::string_view s) { buf_.insert(buf_.end(), s.begin(), s.end()); }
    void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
    void u32(std::uint32_t v);
    void f64(double v);
    const std::string& data() const { return buf_; }
    std::string& data() { return buf_; }

private:
    std::string buf_;
};

class ByteReader {
public:
    ByteReader(std::string_view data, std::string context) : data_(data), context_(std::move(context)) {}
    std::string_view bytes(std::size_t n);
    std::uint8_t u8();
    std::uint32_t u32();
    double f64();
    std::size_t remaining() const { return data_.size() - pos_; }
    std::size_t position() const { return pos_; }

private:
    std::string_view data_;
    std::size_t pos_ = 0;
    std::string context_;
};

std::string read_file(const std::filesystem::path& path);
// Writes atomically enough for our purposes: whole buffer, then close; failures carry the path.
void write_file(const std::filesystem::path& path, std::string_view data);

std::uint32_t crc32_of(std::string_view data);

// OFC1: magic, u32 width, u32 height, f64 pitch, interleaved (re, im) f64.
std::string encode_field(const ComplexField2D& field);
ComplexField2D decode_field(std::string_view data, const std::string& context = "field");
void save_field(const std::filesystem::path& path, const ComplexField2D& field);
ComplexField2D load_field(const std::filesystem::path& path);

// OPH1: magic, u32 width, u32 height, f64 per pixel.
std::string encode_phase(const PhaseImage& image);
PhaseImage decode_phase(std::string_view data, const std::string& context = "phase image");
void save_phase(const std::filesystem::path& path, const PhaseImage& image);
PhaseImage load_phase(const std::filesystem::path& path);

// RIV1: magic, u32 nx, ny, nz, f64 voxel pitch, f64 n_medium, f64 voxels z-major.
std::string encode_volume(const RIVolume& volume);
RIVolume decode_volume(std::string_view data, const std::string& context = "volume");
void save_volume(const std::filesystem::path& path, const RIVolume& volume);
RIVolume load_volume(const std::filesystem::path& path);

// 8-bit grayscale PNG. Values are mapped linearly from [lo, hi] to [0, 255].
std::string encode_png_gray(const RealImage& image, double lo, double hi);
void save_png_gray(const std::filesystem::path& path, const RealImage& image, double lo, double hi);

}  // namespace odtqc
