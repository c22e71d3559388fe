#include "specklepuf/pgm.hpp"

#include <cctype>
#include <fstream>
#include <string>
#include <system_error>

#include "specklepuf/error.hpp"

namespace specklepuf {

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  unsigned long number(const char* field) {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_]))
      throw FormatError(std::string("pgm: expected ") + field);
    unsigned long v = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (v > 1'000'000'000UL) throw FormatError(std::string("pgm: ") + field + " too large");
    }
    return v;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.empty()) throw ParameterError("pgm: empty input");
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5')
    throw FormatError("pgm: missing P5 magic");
  HeaderReader in(bytes);
  in.advance(2);
  const auto width = in.number("width");
  const auto height = in.number("height");
  const auto maxval = in.number("maxval");
  if (width == 0 || height == 0) throw FormatError("pgm: zero-sized image");
  if (maxval == 0 || maxval > 65535) throw FormatError("pgm: maxval out of range");
  // Exactly one whitespace byte separates the header from the raster.
  if (in.pos() >= bytes.size() || !std::isspace(bytes[in.pos()]))
    throw FormatError("pgm: malformed header");
  in.advance(1);

  const std::size_t bytes_per = maxval > 255 ? 2 : 1;
  const std::size_t need = width * height * bytes_per;
  if (bytes.size() - in.pos() < need) throw FormatError("pgm: truncated raster");

  GrayImage img{Grid<std::uint16_t>(Dims{height, width}), static_cast<std::uint16_t>(maxval)};
  const std::uint8_t* p = bytes.data() + in.pos();
  for (std::size_t i = 0; i < width * height; ++i) {
    std::uint16_t v = bytes_per == 2 ? static_cast<std::uint16_t>((p[2 * i] << 8) | p[2 * i + 1]) : p[i];
    if (v > maxval) throw FormatError("pgm: sample exceeds maxval");
    img.pixels.storage()[i] = v;
  }
  return img;
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& image) {
  if (image.pixels.empty()) throw ParameterError("pgm: empty image");
  if (image.maxval == 0) throw ParameterError("pgm: maxval must be positive");
  const std::string header = "P5\n" + std::to_string(image.pixels.cols()) + " " +
                             std::to_string(image.pixels.rows()) + "\n" +
                             std::to_string(image.maxval) + "\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  const bool wide = image.maxval > 255;
  out.reserve(out.size() + image.pixels.size() * (wide ? 2 : 1));
  for (std::uint16_t v : image.pixels.values()) {
    if (v > image.maxval) throw ParameterError("pgm: sample exceeds maxval");
    if (wide) out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xff));
  }
  return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  if (f.bad()) throw IoError("read failed: " + path.string());
  return bytes;
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot create " + tmp.string());
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    f.flush();
    if (!f) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw IoError("write failed: " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("rename failed: " + path.string());
  }
}

GrayImage read_pgm(const std::filesystem::path& path) { return decode_pgm(read_file(path)); }

void write_pgm(const std::filesystem::path& path, const GrayImage& image) {
  write_file_atomic(path, encode_pgm(image));
}

GrayImage to_image(const SpecklePattern& pattern) {
  return GrayImage{pattern.counts, static_cast<std::uint16_t>((1u << pattern.bits) - 1u)};
}

SpecklePattern from_image(const GrayImage& image) {
  int bits = 8;
  if (image.maxval > 255) bits = image.maxval > 4095 ? 16 : 12;
  return SpecklePattern{image.pixels.dims(), bits, image.pixels, "", "", ""};
}

}  // namespace specklepuf
