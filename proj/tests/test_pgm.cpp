#include "doctest.h"

#include <string>

#include "specklepuf/binary_key.hpp"
#include "specklepuf/error.hpp"
#include "specklepuf/pgm.hpp"
#include "support.hpp"

using namespace specklepuf;
using specklepuf::testing::TempDir;

TEST_CASE("pgm: 8-bit round trip with comments") {
  const std::string text = "P5\n# made by hand\n3 2\n# another\n255\n";
  std::vector<std::uint8_t> bytes(text.begin(), text.end());
  for (std::uint8_t v : {0, 1, 2, 250, 254, 255}) bytes.push_back(v);
  const auto img = decode_pgm(bytes);
  CHECK(img.maxval == 255);
  CHECK(img.pixels.dims() == Dims{2, 3});
  CHECK(img.pixels(1, 0) == 250);
  const auto again = decode_pgm(encode_pgm(img));
  CHECK(again.pixels == img.pixels);
}

TEST_CASE("pgm: 16-bit samples are big-endian") {
  GrayImage img{Grid<std::uint16_t>({1, 2}, std::vector<std::uint16_t>{0x0102, 0x0fff}), 4095};
  const auto bytes = encode_pgm(img);
  CHECK(bytes[bytes.size() - 4] == 0x01);
  CHECK(bytes[bytes.size() - 3] == 0x02);
  CHECK(decode_pgm(bytes).pixels == img.pixels);
}

TEST_CASE("pgm: malformed input") {
  CHECK_THROWS_AS((void)decode_pgm({}), ParameterError);
  const std::string p2 = "P2\n1 1\n255\n0\n";
  CHECK_THROWS_AS((void)decode_pgm(std::vector<std::uint8_t>(p2.begin(), p2.end())), FormatError);
  const std::string shortdata = "P5\n4 4\n255\n\x01\x02";
  CHECK_THROWS_AS((void)decode_pgm(std::vector<std::uint8_t>(shortdata.begin(), shortdata.end())), FormatError);
}

TEST_CASE("pgm: file round trip") {
  TempDir dir("pgm");
  GrayImage img{Grid<std::uint16_t>({4, 5}, 17), 255};
  img.pixels(2, 3) = 200;
  write_pgm(dir / "a.pgm", img);
  CHECK(read_pgm(dir / "a.pgm").pixels == img.pixels);
  CHECK_THROWS_AS((void)read_pgm(dir / "missing.pgm"), IoError);
}

TEST_CASE("binary key: MSB-first packing") {
  BinaryKey k({1, 12});
  k.set(0, true);
  k.set(9, true);
  const auto bytes = k.to_bytes();
  REQUIRE(bytes.size() == 2);
  CHECK(bytes[0] == 0x80);
  CHECK(bytes[1] == 0x40);
  CHECK(BinaryKey::from_bytes({1, 12}, bytes) == k);
  CHECK_THROWS((void)BinaryKey::from_bytes({1, 12}, std::vector<std::uint8_t>{0x80, 0x41}));
}

TEST_CASE("binary key: pack and unpack random keys of odd sizes") {
  for (std::size_t cols : {1u, 7u, 63u, 64u, 65u, 130u}) {
    const auto k = specklepuf::testing::random_key({3, cols}, cols);
    CHECK(BinaryKey::from_bytes(k.dims(), k.to_bytes()) == k);
    CHECK(decode_key(encode_key(k)) == k);
    CHECK((~k).popcount() == k.length() - k.popcount());
  }
}

TEST_CASE("binary key: file format") {
  TempDir dir("key");
  const auto k = specklepuf::testing::random_key({10, 13}, 4);
  write_key(dir / "k.bpk", k);
  CHECK(read_key(dir / "k.bpk") == k);
  const auto bytes = read_file(dir / "k.bpk");
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "BPUF");
  auto bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS((void)decode_key(bad), FormatError);
  bad = bytes;
  bad.pop_back();
  CHECK_THROWS_AS((void)decode_key(bad), FormatError);
}
