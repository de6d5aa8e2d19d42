#pragma once

#include <span>

namespace bjj {

struct FrequencyFit {
    double omega = 0.0;      // angular frequency, internal units
    double amplitude = 0.0;  // A in A sin(omega t + theta) + C
    double phase = 0.0;      // theta
    double offset = 0.0;     // C
    double residual = 0.0;   // rms of the fit residual
};

/// Least-squares fit of A sin(omega t + theta) + C to uniformly sampled data.
///
/// omega starts at the zero-padded periodogram peak of z - mean(z) and is
/// refined by a bracketed 1D minimization of the residual with (A, theta, C)
/// solved linearly at each trial. Requires >= 4 periods at >= 32 samples per
/// period (FitError otherwise). NoOscillationError for a flat signal or one
/// without a spectral peak above the noise floor.
FrequencyFit extract_frequency(std::span<const double> t, std::span<const double> z);

}  // namespace bjj
