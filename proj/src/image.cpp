#include "jsnlm/image.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>

#include "jsnlm/error.hpp"

namespace jsnlm {

Image::Image(int width, int height, double fill) : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw ParameterError("image dimensions must be positive");
  }
  data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

Image::Image(int width, int height, std::vector<double> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width < 1 || height < 1) {
    throw ParameterError("image dimensions must be positive");
  }
  if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    throw ParameterError("image data length does not match width*height");
  }
  if (!std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); })) {
    throw ParameterError("image data contains non-finite values");
  }
}

int reflect_index(int i, int n) {
  if (i >= 0 && i < n) {
    return i;
  }
  if (n == 1) {
    return 0;
  }
  const int period = 2 * (n - 1);
  int m = i % period;
  if (m < 0) {
    m += period;
  }
  return m < n ? m : period - m;
}

double Image::get_reflected(int row, int col) const {
  return (*this)(reflect_index(row, height_), reflect_index(col, width_));
}

void require_same_shape(const Image& a, const Image& b, const char* what) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument(std::string(what) + ": image shape mismatch (" +
                                std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                                " vs " + std::to_string(b.width()) + "x" +
                                std::to_string(b.height()) + ")");
  }
}

namespace {

class PgmReader {
 public:
  explicit PgmReader(std::string bytes) : bytes_(std::move(bytes)) {}

  // Reads the next whitespace-delimited header token, skipping '#' comments.
  std::string token(const char* field) {
    skip_space_and_comments();
    std::string out;
    while (pos_ < bytes_.size() && !std::isspace(static_cast<unsigned char>(bytes_[pos_])) &&
           bytes_[pos_] != '#') {
      out.push_back(bytes_[pos_++]);
    }
    if (out.empty()) {
      throw FormatError(std::string("PGM: missing ") + field);
    }
    return out;
  }

  int integer(const char* field) {
    const std::string tok = token(field);
    std::size_t used = 0;
    long value = 0;
    try {
      value = std::stol(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size() || value < 0 || value > 1'000'000'000) {
      throw FormatError(std::string("PGM: invalid ") + field + " '" + tok + "'");
    }
    return static_cast<int>(value);
  }

  // A single whitespace byte separates maxval from binary pixel data.
  void consume_single_space() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      throw FormatError("PGM: expected whitespace after maxval");
    }
    ++pos_;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }
  unsigned char byte() { return static_cast<unsigned char>(bytes_[pos_++]); }
  bool at_end() {
    skip_space_and_comments();
    return pos_ >= bytes_.size();
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') {
          ++pos_;
        }
      } else {
        break;
      }
    }
  }

  std::string bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Image load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "' for reading");
  }
  std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (in.bad()) {
    throw IoError("read failure on '" + path.string() + "'");
  }

  PgmReader reader(std::move(bytes));
  const std::string magic = reader.token("magic number");
  if (magic != "P5" && magic != "P2") {
    throw FormatError("PGM: unsupported magic number '" + magic + "'");
  }
  const int width = reader.integer("width");
  const int height = reader.integer("height");
  const int maxval = reader.integer("maxval");
  if (width < 1) {
    throw FormatError("PGM: width must be positive");
  }
  if (height < 1) {
    throw FormatError("PGM: height must be positive");
  }
  if (maxval < 1 || maxval > 255) {
    throw FormatError("PGM: maxval " + std::to_string(maxval) + " outside [1,255]");
  }

  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<double> data(count);
  if (magic == "P5") {
    reader.consume_single_space();
    if (reader.remaining() < count) {
      throw FormatError("PGM: unexpected end of pixel data");
    }
    for (double& v : data) {
      v = reader.byte();
    }
  } else {
    for (double& v : data) {
      if (reader.at_end()) {
        throw FormatError("PGM: unexpected end of pixel data");
      }
      const int value = reader.integer("pixel value");
      if (value > maxval) {
        throw FormatError("PGM: pixel value " + std::to_string(value) + " exceeds maxval");
      }
      v = value;
    }
  }
  return Image(width, height, std::move(data));
}

void save_pgm(const Image& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  std::string payload(img.size(), '\0');
  for (std::size_t i = 0; i < img.size(); ++i) {
    payload[i] = static_cast<char>(static_cast<unsigned char>(std::round(std::clamp(img[i], 0.0, 255.0))));
  }
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) {
    throw IoError("write failure on '" + path.string() + "'");
  }
}

std::uint64_t content_hash(const Image& img) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t word) {
    for (int b = 0; b < 8; ++b) {
      h ^= (word >> (8 * b)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  };
  mix(static_cast<std::uint64_t>(img.width()));
  mix(static_cast<std::uint64_t>(img.height()));
  for (double v : img.pixels()) {
    mix(std::bit_cast<std::uint64_t>(v));
  }
  return h;
}

}  // namespace jsnlm
