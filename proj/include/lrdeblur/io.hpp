#pragma once

#include "lrdeblur/types.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace lrd {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path);

/// Writes to a sibling temp file and renames it over path, so readers never see partial output.
void write_file_atomic(const std::string& path, const std::string& bytes);

/// PGM (P2/P5, 8/16-bit) or PNG (8/16-bit, gray/RGB with or without alpha), detected from content.
/// Colour is reduced to 0.299 R + 0.587 G + 0.114 B. Intensities are divided by maxval.
Image load_image(const std::string& path);
Image decode_image(const std::string& bytes);
Image decode_pgm(const std::string& bytes);
Image decode_png(const std::string& bytes);

/// Clamped to [0,1] and rounded to bit_depth (8 or 16). Format from extension: .pgm or .png.
void save_image(const std::string& path, const Image& img, int bit_depth = 8);
std::string encode_pgm(const Image& img, int bit_depth = 8);
std::string encode_png(const Image& img, int bit_depth = 8);

/// Text kernel: "L K" then L rows of K values.
Kernel parse_kernel(const std::string& text, bool normalize = false);
std::string format_kernel(const Kernel& k);
Kernel load_kernel(const std::string& path, bool normalize = false);
void save_kernel(const std::string& path, const Kernel& k);

/// Kernel scaled so its maximum maps to white.
void save_kernel_png(const std::string& path, const Kernel& k);

/// "# key=value" metadata (name, seed, params, optional command), header row, numeric rows.
std::string format_report(const ExperimentReport& r, const std::string& command = {});
ExperimentReport parse_report(const std::string& text, std::string* command = nullptr);
void save_report(const std::string& path, const ExperimentReport& r, const std::string& command = {});

}  // namespace lrd
