#pragma once
// PGM (P5 binary / P2 ASCII, 8- or 16-bit) and raw float64 matrix files.
// Writers go through a temporary file and rename, so readers never see a
// partial file.

#include "proxsplit/imaging.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>

namespace proxsplit {

class IoError : public Error {
 public:
  using Error::Error;
};

ImageGrid read_pgm(const std::filesystem::path& path);

/// Rounds and clamps to [0, maxval]. maxval = 255 writes 8-bit samples,
/// anything up to 65535 writes 16-bit big-endian samples.
void write_pgm(const std::filesystem::path& path, const ImageGrid& img, int maxval = 255,
               bool ascii = false);

/// Layout: 8-byte magic "PSF64\0\0\1", uint64 width, uint64 height, then
/// width * height little-endian doubles, row-major.
ImageGrid read_raw_f64(const std::filesystem::path& path);
void write_raw_f64(const std::filesystem::path& path, const ImageGrid& img);

/// Writes `contents` atomically (temporary sibling + rename).
void write_text_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace proxsplit
