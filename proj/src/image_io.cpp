#include "proxsplit/image_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace proxsplit {

namespace fs = std::filesystem;

namespace {

constexpr char kMagic[8] = {'P', 'S', 'F', '6', '4', '\0', '\0', '\1'};

std::string read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const fs::path& path, const std::string& bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("short write to '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

// PGM header tokenizer: whitespace separated, '#' comments to end of line.
struct Header {
  const std::string& s;
  std::size_t pos = 0;

  std::string token() {
    for (;;) {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
      if (pos < s.size() && s[pos] == '#') {
        while (pos < s.size() && s[pos] != '\n') ++pos;
        continue;
      }
      break;
    }
    const std::size_t start = pos;
    while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    return s.substr(start, pos - start);
  }
  long number(const char* what, const fs::path& path) {
    const std::string t = token();
    try {
      std::size_t used = 0;
      const long v = std::stol(t, &used);
      if (used == t.size() && v >= 0) return v;
    } catch (const std::exception&) {
    }
    throw IoError("'" + path.string() + "': bad PGM " + what + " '" + t + "'");
  }
};

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64(const std::string& s, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(s[at + i]);
  return v;
}

}  // namespace

ImageGrid read_pgm(const fs::path& path) {
  const std::string data = read_all(path);
  Header h{data};
  const std::string magic = h.token();
  if (magic != "P5" && magic != "P2") throw IoError("'" + path.string() + "' is not a P5/P2 PGM file");
  const long w = h.number("width", path);
  const long ht = h.number("height", path);
  const long maxval = h.number("maxval", path);
  if (w < 1 || ht < 1 || maxval < 1 || maxval > 65535)
    throw IoError("'" + path.string() + "': bad PGM dimensions or maxval");
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(ht);
  Vec px(static_cast<Eigen::Index>(n));
  if (magic == "P2") {
    for (std::size_t i = 0; i < n; ++i) {
      const long v = h.number("sample", path);
      if (v > maxval) throw IoError("'" + path.string() + "': sample exceeds maxval");
      px[static_cast<Eigen::Index>(i)] = double(v);
    }
  } else {
    std::size_t at = h.pos + 1;  // single whitespace after maxval
    const std::size_t bytes = maxval > 255 ? 2 : 1;
    if (data.size() < at + n * bytes) throw IoError("'" + path.string() + "': truncated PGM data");
    for (std::size_t i = 0; i < n; ++i, at += bytes) {
      unsigned v = static_cast<unsigned char>(data[at]);
      if (bytes == 2) v = (v << 8) | static_cast<unsigned char>(data[at + 1]);
      px[static_cast<Eigen::Index>(i)] = double(v);
    }
  }
  return ImageGrid(w, ht, std::move(px));
}

void write_pgm(const fs::path& path, const ImageGrid& img, int maxval, bool ascii) {
  require(maxval >= 1 && maxval <= 65535, "write_pgm: maxval must be in [1, 65535]");
  std::ostringstream out;
  out << (ascii ? "P2" : "P5") << '\n' << img.width << ' ' << img.height << '\n' << maxval << '\n';
  std::string body = out.str();
  for (Eigen::Index i = 0; i < img.size(); ++i) {
    const double v = std::clamp(std::round(img.samples[i]), 0.0, double(maxval));
    const unsigned q = static_cast<unsigned>(v);
    if (ascii) {
      body += std::to_string(q);
      body += (i + 1) % img.width == 0 ? '\n' : ' ';
    } else if (maxval > 255) {
      body.push_back(static_cast<char>(q >> 8));
      body.push_back(static_cast<char>(q & 0xff));
    } else {
      body.push_back(static_cast<char>(q));
    }
  }
  write_atomic(path, body);
}

ImageGrid read_raw_f64(const fs::path& path) {
  const std::string data = read_all(path);
  if (data.size() < 24 || std::memcmp(data.data(), kMagic, 8) != 0)
    throw IoError("'" + path.string() + "' is not a raw float64 image file");
  const std::uint64_t w = get_u64(data, 8), h = get_u64(data, 16);
  if (w == 0 || h == 0 || w > (1u << 20) || h > (1u << 20) || data.size() != 24 + 8 * w * h)
    throw IoError("'" + path.string() + "': size does not match its header");
  Vec px(static_cast<Eigen::Index>(w * h));
  for (std::uint64_t i = 0; i < w * h; ++i) {
    const std::uint64_t bits = get_u64(data, 24 + 8 * i);
    px[static_cast<Eigen::Index>(i)] = std::bit_cast<double>(bits);
  }
  return ImageGrid(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(h), std::move(px));
}

void write_raw_f64(const fs::path& path, const ImageGrid& img) {
  std::string out(kMagic, 8);
  put_u64(out, static_cast<std::uint64_t>(img.width));
  put_u64(out, static_cast<std::uint64_t>(img.height));
  for (Eigen::Index i = 0; i < img.size(); ++i) put_u64(out, std::bit_cast<std::uint64_t>(img.samples[i]));
  write_atomic(path, out);
}

void write_text_atomic(const fs::path& path, const std::string& contents) {
  write_atomic(path, contents);
}

}  // namespace proxsplit
