#include "qmuse/spectrum.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace qmuse::voice {

namespace {

// FFTW's planner is not thread-safe.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

/// Mean power spectrum of Hann frames of `frame_len` samples, hopping by
/// `hop`, across samples[begin, begin + span).
std::vector<double> averaged_power(const std::vector<double>& samples, std::size_t begin,
                                   std::size_t span, std::size_t frame_len, std::size_t hop,
                                   std::size_t fft_size)
{
    std::unique_ptr<double, FftwFree> in(fftw_alloc_real(fft_size));
    std::unique_ptr<fftw_complex, FftwFree> out(fftw_alloc_complex(fft_size / 2 + 1));
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_r2c_1d(static_cast<int>(fft_size), in.get(), out.get(), FFTW_ESTIMATE);
    }

    std::vector<double> hann(frame_len);
    for (std::size_t i = 0; i < frame_len; ++i) {
        hann[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                       static_cast<double>(frame_len - 1));
    }

    std::vector<double> power(fft_size / 2 + 1, 0.0);
    std::size_t frames = 0;
    for (std::size_t start = begin; start + frame_len <= begin + span; start += hop) {
        std::fill(in.get(), in.get() + fft_size, 0.0);
        for (std::size_t i = 0; i < frame_len; ++i) in.get()[i] = samples[start + i] * hann[i];
        fftw_execute(plan);
        for (std::size_t k = 0; k < power.size(); ++k) {
            power[k] += out.get()[k][0] * out.get()[k][0] + out.get()[k][1] * out.get()[k][1];
        }
        ++frames;
    }
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    for (double& p : power) p /= static_cast<double>(frames);
    return power;
}

} // namespace

std::vector<SpectralPeak> spectral_peaks(const AudioBuffer& buffer, double at_time, double window,
                                         const SpectrumOptions& options)
{
    const double sr = buffer.sample_rate;
    if (!(window > 0.0) || at_time < 0.0 || at_time + window > buffer.duration() + 1e-12) {
        throw std::invalid_argument("analysis window lies outside the buffer");
    }
    if (options.frame < 0.0 || options.frame > window) {
        throw std::invalid_argument("analysis frame must be between 0 and the window length");
    }
    if (!(options.max_bin_hz > 0.0)) throw std::invalid_argument("max_bin_hz must be positive");

    const auto begin = static_cast<std::size_t>(std::llround(at_time * sr));
    const auto span = std::min(static_cast<std::size_t>(std::llround(window * sr)),
                               buffer.samples.size() - begin);
    const std::size_t frame_len =
        options.frame > 0.0 ? static_cast<std::size_t>(std::llround(options.frame * sr)) : span;
    if (frame_len < 4) throw std::invalid_argument("analysis frame is shorter than 4 samples");
    const std::size_t hop = std::max<std::size_t>(1, frame_len / 4);

    std::size_t fft_size = 1;
    while (fft_size < frame_len || sr / static_cast<double>(fft_size) > options.max_bin_hz) {
        fft_size <<= 1;
    }

    const auto power = averaged_power(buffer.samples, begin, span, frame_len, hop, fft_size);
    std::vector<double> db(power.size());
    std::transform(power.begin(), power.end(), db.begin(),
                   [](double p) { return 10.0 * std::log10(std::max(p, 1e-300)); });

    const double bin_hz = sr / static_cast<double>(fft_size);
    std::vector<SpectralPeak> peaks;
    for (std::size_t k = 1; k + 1 < db.size(); ++k) {
        if (!(db[k] > db[k - 1] && db[k] >= db[k + 1])) continue;
        const double a = db[k - 1], b = db[k], c = db[k + 1];
        const double denom = a - 2.0 * b + c;
        const double offset = denom < 0.0 ? 0.5 * (a - c) / denom : 0.0;
        peaks.push_back({(static_cast<double>(k) + offset) * bin_hz, b - 0.25 * (a - c) * offset});
    }
    std::sort(peaks.begin(), peaks.end(),
              [](const SpectralPeak& x, const SpectralPeak& y) { return x.magnitude_db > y.magnitude_db; });
    if (!peaks.empty()) {
        const double floor = peaks.front().magnitude_db - options.floor_db;
        std::erase_if(peaks, [floor](const SpectralPeak& p) { return p.magnitude_db < floor; });
    }
    return peaks;
}

} // namespace qmuse::voice
