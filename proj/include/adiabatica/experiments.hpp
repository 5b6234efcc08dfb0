#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "adiabatica/config.hpp"

namespace adiabatica {

/// One output file: its name inside the output directory and its full text.
struct OutputFile {
  std::string name;
  std::string content;
};

/// "# adiabatica <version> | <canonical config>"
std::string header_line(const ScenarioConfig& config);

/// Runs the experiment named in the config and returns its CSV files, each starting with
/// header_line. Sweeps over detunings run in parallel; the files are assembled in
/// declaration order, so the result is byte-identical for any thread count.
std::vector<OutputFile> run_experiment(const ScenarioConfig& config);

/// Writes the files into `dir`, creating it if needed.
void write_outputs(const std::vector<OutputFile>& files, const std::filesystem::path& dir);

/// Linear interpolation of (abscissa, values) at `x`, taken on the first segment that brackets x.
/// NaN when no segment does.
double resample_first_crossing(const std::vector<double>& abscissa, const std::vector<double>& values,
                               double x);

}  // namespace adiabatica
