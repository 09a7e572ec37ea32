#include "recon.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "error.hpp"
#include "parallel.hpp"
#include "retrieval.hpp"

namespace odtqc {

SpectrumAccumulator::SpectrumAccumulator(int nx_, int ny_, int nz_, double pitch_)
    : nx(nx_), ny(ny_), nz(nz_), pitch(pitch_) {
    require(nx > 0 && ny > 0 && nz > 0, "accumulator dimensions must be positive");
    require(pitch > 0.0, "accumulator pitch must be positive");
    const std::size_t n = static_cast<std::size_t>(nx) * ny * nz;
    sum.assign(n, cplx{});
    hits.assign(n, 0);
}

std::size_t SpectrumAccumulator::filled() const {
    return static_cast<std::size_t>(std::count_if(hits.begin(), hits.end(), [](std::uint32_t h) { return h > 0; }));
}

ComplexField2D rytov_transform(const ComplexField2D& field, std::size_t* clamped) {
    field.validate();
    std::size_t n_clamped = 0;
    RealImage amplitude = amplitude_of(field);
    for (double& a : amplitude.values) {
        if (a < 1e-6) {
            a = 1e-6;
            ++n_clamped;
        }
    }
    const PhaseImage phase = unwrap_phase(wrapped_phase_of(field), amplitude);
    ComplexField2D out(field.width, field.height, field.pixel_pitch);
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] = {std::log(amplitude.values[i]), phase.values[i]};
    if (clamped) *clamped = n_clamped;
    return out;
}

namespace {

struct Deposit {
    std::size_t voxel;
    cplx value;
};

struct AngleDeposits {
    std::vector<Deposit> deposits;
    std::size_t skipped = 0;
};

AngleDeposits deposits_for(const ComplexField2D& u_rytov, const WaveVector& k_in, int nx, int ny, int nz,
                           double pitch, const OpticsConfig& config) {
    if (u_rytov.width != nx || u_rytov.height != ny)
        fail_invalid("field grid does not match the accumulator's transverse dimensions");
    if (std::abs(u_rytov.pixel_pitch - pitch) > 1e-12) fail_invalid("field pixel pitch differs from the voxel pitch");
    const EwaldCap cap = ewald_cap(k_in, config, nx, ny, nz, pitch);
    const Spectrum2D spec = fft2_forward(u_rytov);
    AngleDeposits out;
    out.skipped = cap.skipped;
    out.deposits.reserve(cap.samples.size());
    for (const auto& s : cap.samples) {
        const double c = rytov_coupling(s.kz_scattered, pitch, nz);
        out.deposits.push_back({s.voxel_index, spec.values[s.field_index] / cplx(0.0, c * s.focus_sign)});
    }
    return out;
}

void apply(const AngleDeposits& d, SpectrumAccumulator& acc) {
    for (const auto& dep : d.deposits) {
        acc.sum[dep.voxel] += dep.value;
        ++acc.hits[dep.voxel];
    }
    acc.skipped += d.skipped;
}

}  // namespace

void map_to_ewald(const ComplexField2D& u_rytov, const WaveVector& k_in, SpectrumAccumulator& acc,
                  const OpticsConfig& config) {
    apply(deposits_for(u_rytov, k_in, acc.nx, acc.ny, acc.nz, acc.pitch, config), acc);
}

ComplexVolume averaged_spectrum(const SpectrumAccumulator& acc) {
    ComplexVolume out(acc.nx, acc.ny, acc.nz);
    for (std::size_t i = 0; i < acc.sum.size(); ++i)
        if (acc.hits[i] > 0) out.values[i] = acc.sum[i] / static_cast<double>(acc.hits[i]);
    return out;
}

RIVolume finalize_tomogram(const SpectrumAccumulator& acc, const OpticsConfig& config) {
    ComplexVolume spec = averaged_spectrum(acc);
    fft::centered_3d(spec.values, acc.nx, acc.ny, acc.nz, fft::Direction::inverse);
    RIVolume vol(acc.nx, acc.ny, acc.nz, acc.pitch, config.n_medium);
    const double k02 = config.k0() * config.k0();
    const double nm2 = config.n_medium * config.n_medium;
    for (std::size_t i = 0; i < vol.size(); ++i)
        vol.values[i] = std::sqrt(std::max(nm2 + spec.values[i].real() / k02, 1.0));
    return vol;
}

RIVolume reconstruct_tomogram(const std::vector<ComplexField2D>& fields, const std::vector<WaveVector>& k_in,
                              const OpticsConfig& config, int depth_voxels, int threads,
                              SpectrumAccumulator* accumulator_out) {
    config.validate();
    require(!fields.empty(), "reconstruction needs at least one field");
    require(fields.size() == k_in.size(), "one illumination vector per field is required");
    const int nx = fields.front().width, ny = fields.front().height;
    const double pitch = fields.front().pixel_pitch;
    for (const auto& f : fields)
        require(f.width == nx && f.height == ny && std::abs(f.pixel_pitch - pitch) < 1e-12,
                "all fields must share one grid");

    std::vector<std::size_t> order(fields.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto ka = std::tie(k_in[a].kx, k_in[a].ky, k_in[a].kz);
        const auto kb = std::tie(k_in[b].kx, k_in[b].ky, k_in[b].kz);
        if (ka != kb) return ka < kb;
        return std::lexicographical_compare(
            fields[a].values.begin(), fields[a].values.end(), fields[b].values.begin(), fields[b].values.end(),
            [](const cplx& x, const cplx& y) { return std::pair(x.real(), x.imag()) < std::pair(y.real(), y.imag()); });
    });

    std::vector<AngleDeposits> per_angle(fields.size());
    parallel_for(fields.size(), threads, [&](std::size_t i) {
        per_angle[i] = deposits_for(rytov_transform(fields[i]), k_in[i], nx, ny, depth_voxels, pitch, config);
    });
    SpectrumAccumulator acc(nx, ny, depth_voxels, pitch);
    for (std::size_t i : order) apply(per_angle[i], acc);
    RIVolume vol = finalize_tomogram(acc, config);
    if (accumulator_out) *accumulator_out = std::move(acc);
    return vol;
}

VoxelBox default_background_box(const RIVolume& volume) {
    return {0, std::max(volume.nx / 4, 1), 0, std::max(volume.ny / 4, 1), 0, volume.nz};
}

double background_sd(const RIVolume& volume, const VoxelBox& b) {
    require(b.x0 >= 0 && b.y0 >= 0 && b.z0 >= 0 && b.x1 <= volume.nx && b.y1 <= volume.ny && b.z1 <= volume.nz,
            "background box lies outside the volume");
    require(b.x1 > b.x0 && b.y1 > b.y0 && b.z1 > b.z0, "background box is degenerate");
    const std::size_t n = static_cast<std::size_t>(b.x1 - b.x0) * (b.y1 - b.y0) * (b.z1 - b.z0);
    require(n >= 2, "background box must hold at least two voxels");
    // Shifted by the first voxel so a constant box gives exactly 0.
    const double shift = volume.at(b.x0, b.y0, b.z0);
    double mean = 0.0;
    for (int z = b.z0; z < b.z1; ++z)
        for (int y = b.y0; y < b.y1; ++y)
            for (int x = b.x0; x < b.x1; ++x) mean += volume.at(x, y, z) - shift;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (int z = b.z0; z < b.z1; ++z)
        for (int y = b.y0; y < b.y1; ++y)
            for (int x = b.x0; x < b.x1; ++x) {
                const double d = volume.at(x, y, z) - shift - mean;
                var += d * d;
            }
    return std::sqrt(var / static_cast<double>(n));
}

}  // namespace odtqc
