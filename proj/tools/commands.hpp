#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "holeburn/integrator.hpp"
#include "run_config.hpp"

namespace holeburn::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitUnexpected = 1,
    kExitInput = 2,
    kExitConvergence = 3,
    kExitFit = 4,
};

// Spectrum at the resolution the refinement loop accepted for this power and
// time grid. simulate and gen decay both evaluate signals from it.
struct ResolvedSpectrum {
    DecaySpectrum spectrum;
    SignalResult signal;
};

ResolvedSpectrum resolve_spectrum(const RunConfig& cfg, double power, std::span<const double> t_grid);

// 0, dt, 2 dt, ... up to and including t_end.
std::vector<double> time_grid(double t_end, double dt);

// Whole command line; argv[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace holeburn::cli
