#include "cosserat/wave_speed.hpp"

#include <cmath>
#include <stdexcept>

namespace cosserat {

std::string to_string(PeakField f) {
    switch (f) {
        case PeakField::couple: return "C";
        case PeakField::force_x: return "Fx";
        case PeakField::force_y: return "Fy";
    }
    return "?";
}

std::string to_string(PeakSignal s) { return s == PeakSignal::rate ? "rate" : "magnitude"; }

PeakField peak_field_from_string(const std::string& s) {
    if (s == "C") return PeakField::couple;
    if (s == "Fx") return PeakField::force_x;
    if (s == "Fy") return PeakField::force_y;
    throw std::invalid_argument("unknown peak field '" + s + "' (expected C, Fx or Fy)");
}

PeakSignal peak_signal_from_string(const std::string& s) {
    if (s == "rate") return PeakSignal::rate;
    if (s == "magnitude") return PeakSignal::magnitude;
    throw std::invalid_argument("unknown peak signal '" + s + "' (expected rate or magnitude)");
}

SpaceTimeSeries sample_control(const ControlField& control, double ds, PeakField field, int stride) {
    if (stride < 1) throw std::invalid_argument("sample_control: stride must be positive");
    SpaceTimeSeries out;
    const bool couple = field == PeakField::couple;
    const int count = couple ? control.N : control.N + 1;
    for (int i = 1; i < count; ++i) out.s.push_back(couple ? (i + 0.5) * ds : i * ds);
    for (int k = 0; k < control.steps; k += stride) {
        out.t.push_back(k * control.dt);
        if (couple) {
            auto c = control.couple_at(k);
            out.values.insert(out.values.end(), c.begin() + 1, c.end());
        } else {
            auto f = control.force_at(k);
            const int comp = field == PeakField::force_x ? 0 : 1;
            for (int i = 1; i < count; ++i) out.values.push_back(f[static_cast<std::size_t>(i)][comp]);
        }
    }
    return out;
}

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need two or more points");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    if (sxx == 0) throw std::invalid_argument("fit_line: abscissae are all equal");
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 0.0;
    return f;
}

namespace {

double refined_peak(const std::vector<double>& sig, const std::vector<double>& s, std::size_t lo, std::size_t hi) {
    std::size_t best = lo;
    for (std::size_t i = lo; i < hi; ++i)
        if (sig[i] > sig[best]) best = i;
    if (best == lo || best + 1 == hi) return s[best];
    const double a = sig[best - 1], b = sig[best], c = sig[best + 1];
    const double den = a - 2 * b + c;
    if (den >= 0) return s[best];
    // Uniform spacing assumed within the sampled range.
    const double h = s[best + 1] - s[best];
    return s[best] + 0.5 * (a - c) / den * h;
}

}  // namespace

WaveFit estimate_wave_speed(const SpaceTimeSeries& series, const WaveWindow& window, PeakSignal signal) {
    if (!(window.t_end > window.t_begin)) throw std::invalid_argument("wave window: t_end must exceed t_begin");
    const std::size_t M = series.s.size();
    if (M == 0 || series.values.size() != series.t.size() * M)
        throw std::invalid_argument("wave series is empty or malformed");

    std::size_t lo = M, hi = 0;
    for (std::size_t i = 0; i < M; ++i)
        if (series.s[i] >= window.s_begin && series.s[i] <= window.s_end) {
            lo = std::min(lo, i);
            hi = i + 1;
        }
    if (lo >= hi) throw std::invalid_argument("wave window: spatial range holds no samples");

    std::vector<std::size_t> rows;
    for (std::size_t k = 0; k < series.t.size(); ++k)
        if (series.t[k] >= window.t_begin && series.t[k] <= window.t_end) rows.push_back(k);
    if (rows.size() < 3) throw std::invalid_argument("wave window holds fewer than 3 time samples");

    const std::size_t K = series.t.size();
    std::vector<double> sig(M), times, where;
    for (std::size_t k : rows) {
        for (std::size_t i = lo; i < hi; ++i) {
            if (signal == PeakSignal::magnitude) {
                sig[i] = std::abs(series.at(k, i));
            } else {
                const std::size_t a = k == 0 ? 0 : k - 1, b = k + 1 == K ? k : k + 1;
                sig[i] = std::abs((series.at(b, i) - series.at(a, i)) / (series.t[b] - series.t[a]));
            }
        }
        times.push_back(series.t[k]);
        where.push_back(refined_peak(sig, series.s, lo, hi));
    }

    const LineFit f = fit_line(times, where);
    WaveFit w;
    w.speed = std::abs(f.slope);
    w.r2 = f.r2;
    w.samples = rows.size();
    w.reliable = f.r2 >= kMinWaveR2;
    w.direction = f.slope > 0 ? 1 : (f.slope < 0 ? -1 : 0);
    return w;
}

}  // namespace cosserat
