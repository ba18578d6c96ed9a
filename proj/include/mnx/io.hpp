#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mnx {

inline constexpr const char* kArtifactVersion = "mnx 0.1.0";

// Shortest round-trip decimal representation; locale-free and stable, so
// repeated runs emit byte-identical files.
std::string format_double(double v);

// RFC-4180 field quoting.
std::string csv_field(const std::string& s);

// Write-to-temp then atomic rename; no partially written outputs on failure.
void atomic_write(const std::filesystem::path& path, const std::string& content);

std::uint64_t fnv1a64(const std::string& data);

struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

// Minimal polyline line chart.
std::string render_svg_lines(const std::string& title, const std::vector<SvgSeries>& series,
                             int width = 720, int height = 480);

} // namespace mnx
