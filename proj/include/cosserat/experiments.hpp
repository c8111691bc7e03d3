#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "cosserat/optimal_control.hpp"
#include "cosserat/wave_speed.hpp"

namespace cosserat {

enum class TaskCase { reach, fetch, shoot, custom };
enum class Profile { paper, desk };

std::string to_string(TaskCase c);
TaskCase task_case_from_string(const std::string& s);
Profile profile_from_string(const std::string& s);

// kappa(s) += M exp(-(s - s0)^2 / (2 sigma^2))
struct CurvatureBump {
    double M = 0;      // [1/m]
    double s0 = 0;     // [m]
    double sigma = 0;  // [m]
};

struct ExperimentConfig {
    TaskCase task = TaskCase::reach;
    RodParameters rod;
    CostWeights weights;
    double dt = 2e-5;
    int iterations = 20;
    double epsilon = 1e-8;
    Vec2 target{0.09, 0.09};
    std::vector<CurvatureBump> bumps;
    std::string output_dir = "runs";
    int snapshots = 6;        // rod snapshots per iteration
    int control_stride = 10;  // time stride of control_final.csv
    std::vector<double> sweep_E, sweep_rho, sweep_chi1;
    WaveWindow wave_window;
    PeakField peak_field = PeakField::couple;
    PeakSignal peak_signal = PeakSignal::rate;

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
};

void apply_profile(ExperimentConfig& config, Profile profile);

// Preset for a case at the desk profile.
ExperimentConfig preset(TaskCase task);

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& source, int line, const std::string& msg)
        : std::runtime_error(source + ":" + std::to_string(line) + ": " + msg), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

// `key = value` lines, `#` comments. `case` and `profile` are applied first,
// then `L0`, then the remaining keys in file order. Numbers may carry a unit:
// lengths m, cm, mm or L0; moduli Pa, kPa, MPa; times s, ms.
ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig parse_config_file(const std::filesystem::path& path);

// Every field in SI at full precision; parse_config inverts it exactly.
std::string serialize_config(const ExperimentConfig& config);

// Straight rod, or the rod whose curvature is the sum of the bumps, built by
// integrating theta_s = kappa and r_s = (cos theta, sin theta) from the base.
// Momenta are zero.
RodState initial_bent_state(const ExperimentConfig& config, const RodProperties& props);

struct CaseResult {
    SolveResult solve;
    RodProperties props;
    std::filesystem::path directory;
};

// Solves the case and writes config.cfg, log.csv, snapshots.csv, theta.csv
// and control_final.csv into `directory`. On a blow-up the log written so far
// is flushed before SolveAborted propagates.
CaseResult run_case(const ExperimentConfig& config, const std::filesystem::path& directory);

struct WaveSpeedRow {
    double E = 0;
    double rho = 0;
    WaveFit fit;
    double coeff = 0;  // c / sqrt(E / rho)
    std::string error;
};

struct Chi1Row {
    double chi1 = 0;
    WaveFit whole;
    WaveFit base_half;
    WaveFit tip_half;
    bool bimodal = false;  // base half moves tipward while tip half moves baseward
    std::string error;
};

// Couples the sweep lists into (E, rho) pairs; a single-entry list is
// broadcast against the other.
std::vector<std::pair<double, double>> material_pairs(const ExperimentConfig& config);

WaveFit wave_fit_for(const ExperimentConfig& config, const ControlField& control, double ds,
                     const WaveWindow& window);
Chi1Row classify_chi1(const ExperimentConfig& config, const ControlField& control, double ds);

// Independent solves, one subdirectory per row. workers > 1 runs rows under
// an OpenMP parallel loop; workers == 1 is the serial path. Row failures are
// recorded in the row rather than thrown.
std::vector<WaveSpeedRow> wave_speed_sweep(const ExperimentConfig& config, const std::filesystem::path& out,
                                           int workers);
std::vector<Chi1Row> chi1_sweep(const ExperimentConfig& config, const std::filesystem::path& out, int workers);

void write_wave_speed_csv(const std::vector<WaveSpeedRow>& rows, const std::filesystem::path& file);
void write_chi1_csv(const std::vector<Chi1Row>& rows, const std::filesystem::path& file);

// Reads control_final.csv back into a series of one component.
SpaceTimeSeries read_control_series(const std::filesystem::path& file, PeakField field, double ds);

}  // namespace cosserat
