#pragma once

#include <cstddef>
#include <vector>

namespace nsd::dsp {

/// One second-order section, direct form II transposed.
/// y[n] = b0*x[n] + z1;  z1 = b1*x[n] - a1*y[n] + z2;  z2 = b2*x[n] - a2*y[n]
struct Biquad {
    double b0, b1, b2;
    double a1, a2;  // a0 normalized to 1
};

using Sos = std::vector<Biquad>;

/// Butterworth low-pass as cascaded biquads (bilinear transform of the analog
/// prototype, gain-normalized to unity at DC). `order` must be even.
Sos butter_lowpass(int order, double cutoff_hz, double fs);

/// Butterworth high-pass, unity gain at Nyquist. `order` must be even.
Sos butter_highpass(int order, double cutoff_hz, double fs);

/// Single forward pass through the cascade with steady-state initial
/// conditions scaled to the first sample (suppresses the startup transient).
std::vector<double> sosfilt(const Sos& sos, const std::vector<double>& x);

/// Zero-phase filtering: odd-reflection padding, forward pass, reversed pass,
/// padding stripped. Pad length defaults to 3*(2*sections+1), clamped to n-1.
std::vector<double> filtfilt(const Sos& sos, const std::vector<double>& x);

}  // namespace nsd::dsp
