#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "chipletsim/system.hpp"

namespace csim {

struct RunArtifacts {
  std::filesystem::path latency_csv;
  std::filesystem::path power_csv;
  std::filesystem::path summary;
  std::filesystem::path latency_svg;
  std::filesystem::path power_svg;
};

// Deterministic text builders: (config bytes, seed) fully determine every
// output byte. Tick-valued columns print as ns with exactly 3 decimals,
// which is lossless.
std::string latency_csv_text(const SystemSpec& spec, const RunReport& report);
std::string power_csv_text(const RunReport& report);
std::string summary_text(const SystemSpec& spec, const RunReport& report,
                         std::string_view source_label);

// Self-contained SVG from CSV text. kind is "latency-hist" or "power-trace".
// Malformed or empty CSV input raises ConfigError.
std::string emit_plot(std::string_view csv_text, std::string_view kind);

// Strict reader for the CSVs this tool writes: header row plus data rows of
// equal arity, no quoting. Raises ConfigError on structural problems.
std::vector<std::vector<std::string>> read_csv(std::string_view text);

RunArtifacts write_run_artifacts(const SystemSpec& spec, const RunReport& report,
                                 const std::filesystem::path& out_dir,
                                 std::string_view source_label);

std::string format_ns(SimTime ticks);  // "123.456" (exact, 3 decimals)

}  // namespace csim
