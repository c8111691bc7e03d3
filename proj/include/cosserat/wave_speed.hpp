#pragma once

#include <string>
#include <vector>

#include "cosserat/forward_solver.hpp"

namespace cosserat {

// Which control component a peak is tracked in.
enum class PeakField { couple, force_x, force_y };

// Quantity whose spatial arg-max is tracked. `rate` uses |du/dt|, which
// removes a slowly varying global profile that would otherwise pin the
// arg-max in place.
enum class PeakSignal { magnitude, rate };

std::string to_string(PeakField f);
std::string to_string(PeakSignal s);
PeakField peak_field_from_string(const std::string& s);
PeakSignal peak_signal_from_string(const std::string& s);

// Samples u(t_k, s_i) of one scalar field, row-major in time.
struct SpaceTimeSeries {
    std::vector<double> t;
    std::vector<double> s;
    std::vector<double> values;  // t.size() * s.size()

    double at(std::size_t k, std::size_t i) const { return values[k * s.size() + i]; }
};

// Extracts one component at every `stride`-th step. The clamped base entry
// (node 0 or element 0) is left out. Element values sit at segment midpoints.
SpaceTimeSeries sample_control(const ControlField& control, double ds, PeakField field, int stride = 1);

struct LineFit {
    double slope = 0;
    double intercept = 0;
    double r2 = 0;  // 0 when the data has no spread
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct WaveFit {
    double speed = 0;     // |slope| [m/s]
    int direction = 0;    // +1 base to tip, -1 tip to base, 0 stationary
    double r2 = 0;
    bool reliable = false;
    std::size_t samples = 0;
};

inline constexpr double kMinWaveR2 = 0.5;

struct WaveWindow {
    double t_begin = 0.45;
    double t_end = 0.5;
    // Spatial sub-range [s_begin, s_end]; defaults to the whole rod.
    double s_begin = -1e300;
    double s_end = 1e300;
};

// Tracks the arg-max location of |u| (or |du/dt|) per sample in the window,
// refined with a three-point parabola, and fits location against time.
// Throws std::invalid_argument for an empty or inverted window.
WaveFit estimate_wave_speed(const SpaceTimeSeries& series, const WaveWindow& window, PeakSignal signal);

}  // namespace cosserat
