#pragma once

#include <vector>

#include "qmuse/voice.hpp"

namespace qmuse::voice {

struct SpectralPeak {
    double frequency = 0.0; // Hz
    double magnitude_db = 0.0;
};

struct SpectrumOptions {
    /// Analysis frame in seconds. 0 analyses the whole window as one Hann
    /// frame. A frame shorter than the pitch period, averaged across the
    /// window with 75% overlap, smooths out harmonics and exposes formants.
    double frame = 0.0;
    /// Upper bound on FFT bin spacing; frames are zero-padded to reach it.
    double max_bin_hz = 20.0;
    /// Local maxima more than this far below the strongest one are dropped.
    double floor_db = 80.0;
};

/// Local maxima of the windowed magnitude spectrum over
/// [at_time, at_time + window], strongest first. Peak positions are refined by
/// parabolic interpolation on the dB spectrum.
std::vector<SpectralPeak> spectral_peaks(const AudioBuffer& buffer, double at_time, double window,
                                         const SpectrumOptions& options = {});

} // namespace qmuse::voice
