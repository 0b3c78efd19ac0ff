#include "nsd/dsp.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace nsd::dsp {

namespace {

using cd = std::complex<double>;

Sos design(int order, double cutoff_hz, double fs, bool highpass) {
    if (order < 2 || order % 2 != 0)
        throw std::invalid_argument("filter order must be even and >= 2");
    if (!(cutoff_hz > 0.0) || !(cutoff_hz < fs / 2.0))
        throw std::invalid_argument("cutoff must lie in (0, fs/2)");

    // analog Butterworth prototype poles on the left unit half-circle
    const double warped = 2.0 * fs * std::tan(std::numbers::pi * cutoff_hz / fs);
    Sos sos;
    sos.reserve(order / 2);
    for (int k = 0; k < order / 2; ++k) {
        const double theta = std::numbers::pi * (2.0 * k + order + 1.0) / (2.0 * order);
        cd p = std::polar(1.0, theta);
        cd ap = highpass ? warped / p : warped * p;
        // bilinear transform; the conjugate pole pairs give real coefficients
        cd zp = (2.0 * fs + ap) / (2.0 * fs - ap);
        const double a1 = -2.0 * zp.real();
        const double a2 = std::norm(zp);
        // zeros at z=-1 (lowpass) or z=+1 (highpass)
        const double zzero = highpass ? 1.0 : -1.0;
        double b0 = 1.0, b1 = -2.0 * zzero, b2 = 1.0;
        // unity gain at DC (lowpass) or Nyquist (highpass)
        const double zref = highpass ? -1.0 : 1.0;
        const double num = b0 + b1 / zref + b2 / (zref * zref);
        const double den = 1.0 + a1 / zref + a2 / (zref * zref);
        const double g = den / num;
        sos.push_back({b0 * g, b1 * g, b2 * g, a1, a2});
    }
    return sos;
}

// steady-state (DC) filter state for unit input, scaled by x0 at run time
struct BiquadState {
    double z1 = 0.0, z2 = 0.0;
};

BiquadState steady_state(const Biquad& q) {
    const double h1 = (q.b0 + q.b1 + q.b2) / (1.0 + q.a1 + q.a2);
    BiquadState st;
    st.z2 = q.b2 - q.a2 * h1;
    st.z1 = q.b1 - q.a1 * h1 + st.z2;
    return st;
}

void run_section(const Biquad& q, std::vector<double>& x) {
    BiquadState st = steady_state(q);
    const double x0 = x.empty() ? 0.0 : x.front();
    double z1 = st.z1 * x0;
    double z2 = st.z2 * x0;
    for (double& v : x) {
        const double in = v;
        const double out = q.b0 * in + z1;
        z1 = q.b1 * in - q.a1 * out + z2;
        z2 = q.b2 * in - q.a2 * out;
        v = out;
    }
}

}  // namespace

Sos butter_lowpass(int order, double cutoff_hz, double fs) {
    return design(order, cutoff_hz, fs, false);
}

Sos butter_highpass(int order, double cutoff_hz, double fs) {
    return design(order, cutoff_hz, fs, true);
}

std::vector<double> sosfilt(const Sos& sos, const std::vector<double>& x) {
    std::vector<double> y = x;
    for (const Biquad& q : sos) run_section(q, y);
    return y;
}

std::vector<double> filtfilt(const Sos& sos, const std::vector<double>& x) {
    const std::size_t n = x.size();
    if (n == 0) return {};
    if (n == 1) return x;

    std::size_t pad = 3 * (2 * sos.size() + 1);
    if (pad > n - 1) pad = n - 1;

    // odd reflection about both endpoints keeps trends continuous
    std::vector<double> ext;
    ext.reserve(n + 2 * pad);
    for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x.front() - x[i]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x.back() - x[n - 1 - i]);

    ext = sosfilt(sos, ext);
    std::reverse(ext.begin(), ext.end());
    ext = sosfilt(sos, ext);
    std::reverse(ext.begin(), ext.end());

    return std::vector<double>(ext.begin() + static_cast<std::ptrdiff_t>(pad),
                               ext.begin() + static_cast<std::ptrdiff_t>(pad + n));
}

}  // namespace nsd::dsp
