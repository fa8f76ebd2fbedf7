#include "nirfuse/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

namespace nirfuse {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void fail(const std::string& what, const std::string& path) {
  throw Error(what + ": " + path);
}

ImagePlanar from_bytes(int w, int h, int channels, const std::vector<unsigned char>& interleaved) {
  ImagePlanar img(w, h, channels);
  const std::size_t n = img.plane_size();
  for (int c = 0; c < channels; ++c) {
    double* plane = img.plane(c);
    for (std::size_t i = 0; i < n; ++i) {
      plane[i] = interleaved[i * channels + c] / 255.0;
    }
  }
  return img;
}

std::vector<unsigned char> to_bytes(const ImagePlanar& img) {
  const std::size_t n = img.plane_size();
  const int channels = img.channels();
  std::vector<unsigned char> out(n * channels);
  for (int c = 0; c < channels; ++c) {
    const double* plane = img.plane(c);
    for (std::size_t i = 0; i < n; ++i) {
      const double v = std::clamp(plane[i], 0.0, 1.0);
      out[i * channels + c] = static_cast<unsigned char>(std::lround(v * 255.0));
    }
  }
  return out;
}

// ---------------------------------------------------------------- PNG

ImagePlanar load_png(std::FILE* fp, const std::string& path) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) fail("png reader allocation failed", path);
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    fail("png reader allocation failed", path);
  }
  std::vector<unsigned char> pixels;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail("corrupt PNG", path);
  }
  png_init_io(png, fp);
  png_read_info(png, info);

  const png_byte bit_depth = png_get_bit_depth(png, info);
  const png_byte color_type = png_get_color_type(png, info);
  if (bit_depth == 16) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail("unsupported format (16-bit PNG)", path);
  }
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  const int w = static_cast<int>(png_get_image_width(png, info));
  const int h = static_cast<int>(png_get_image_height(png, info));
  const int channels = png_get_channels(png, info);
  if (channels != 1 && channels != 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail("unsupported PNG channel layout", path);
  }
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  pixels.assign(rowbytes * static_cast<std::size_t>(h), 0);
  rows.resize(static_cast<std::size_t>(h));
  for (int y = 0; y < h; ++y) rows[y] = pixels.data() + rowbytes * static_cast<std::size_t>(y);
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  // rowbytes may exceed w*channels only for sub-byte layouts, which were
  // expanded above; repack defensively anyway.
  std::vector<unsigned char> packed(static_cast<std::size_t>(w) * h * channels);
  for (int y = 0; y < h; ++y) {
    std::memcpy(packed.data() + static_cast<std::size_t>(y) * w * channels,
                pixels.data() + static_cast<std::size_t>(y) * rowbytes,
                static_cast<std::size_t>(w) * channels);
  }
  return from_bytes(w, h, channels, packed);
}

void save_png(const ImagePlanar& img, const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) fail("unwritable path", path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) fail("png writer allocation failed", path);
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    fail("png writer allocation failed", path);
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail("png write failed", path);
  }
  png_init_io(png, fp.get());
  const int color_type = img.channels() == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB;
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()),
               static_cast<png_uint_32>(img.height()), 8, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::vector<unsigned char> bytes = to_bytes(img);
  const std::size_t stride = static_cast<std::size_t>(img.width()) * img.channels();
  std::vector<png_bytep> rows(static_cast<std::size_t>(img.height()));
  for (int y = 0; y < img.height(); ++y) rows[y] = bytes.data() + stride * static_cast<std::size_t>(y);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

// ---------------------------------------------------------------- PNM

// Reads one whitespace-delimited token, skipping '#' comments.
bool next_pnm_token(std::FILE* fp, std::string& token) {
  token.clear();
  int ch = std::fgetc(fp);
  while (ch != EOF) {
    if (ch == '#') {
      while (ch != EOF && ch != '\n') ch = std::fgetc(fp);
    } else if (std::isspace(ch)) {
      ch = std::fgetc(fp);
    } else {
      break;
    }
  }
  while (ch != EOF && !std::isspace(ch)) {
    token.push_back(static_cast<char>(ch));
    ch = std::fgetc(fp);
  }
  return !token.empty();
}

ImagePlanar load_pnm(std::FILE* fp, const std::string& path) {
  std::string tok;
  if (!next_pnm_token(fp, tok) || (tok != "P5" && tok != "P6")) {
    fail("corrupt PNM header", path);
  }
  const int channels = (tok == "P5") ? 1 : 3;
  long w = 0, h = 0, maxval = 0;
  auto read_long = [&](long& out) {
    if (!next_pnm_token(fp, tok)) fail("corrupt PNM header", path);
    char* end = nullptr;
    out = std::strtol(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0') fail("corrupt PNM header", path);
  };
  read_long(w);
  read_long(h);
  read_long(maxval);
  if (w < 1 || h < 1) fail("corrupt PNM header", path);
  if (maxval != 255) fail("unsupported format (PNM maxval must be 255)", path);

  const std::size_t count = static_cast<std::size_t>(w) * h * channels;
  std::vector<unsigned char> bytes(count);
  if (std::fread(bytes.data(), 1, count, fp) != count) fail("truncated PNM data", path);
  return from_bytes(static_cast<int>(w), static_cast<int>(h), channels, bytes);
}

void save_pnm(const ImagePlanar& img, const std::string& path, bool ppm) {
  if (ppm && img.channels() != 3) fail("PPM requires a 3-channel image", path);
  if (!ppm && img.channels() != 1) fail("PGM requires a single-channel image", path);
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) fail("unwritable path", path);
  std::string header = std::string(ppm ? "P6" : "P5") + "\n" + std::to_string(img.width()) +
                       " " + std::to_string(img.height()) + "\n255\n";
  std::vector<unsigned char> bytes = to_bytes(img);
  if (std::fwrite(header.data(), 1, header.size(), fp.get()) != header.size() ||
      std::fwrite(bytes.data(), 1, bytes.size(), fp.get()) != bytes.size()) {
    fail("write failed", path);
  }
  if (std::fflush(fp.get()) != 0) fail("write failed", path);
}

std::string lower_extension(const std::string& path) {
  const std::size_t dot = path.find_last_of('.');
  if (dot == std::string::npos) return "";
  std::string ext = path.substr(dot + 1);
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

}  // namespace

ImagePlanar load_image(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) fail("unreadable file", path);
  unsigned char magic[8] = {0};
  const std::size_t got = std::fread(magic, 1, sizeof(magic), fp.get());
  std::rewind(fp.get());
  static const unsigned char png_sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (got >= 8 && std::memcmp(magic, png_sig, 8) == 0) {
    return load_png(fp.get(), path);
  }
  if (got >= 2 && magic[0] == 'P' && (magic[1] == '5' || magic[1] == '6')) {
    return load_pnm(fp.get(), path);
  }
  fail("unsupported format", path);
}

void save_image(const ImagePlanar& img, const std::string& path) {
  const std::string ext = lower_extension(path);
  if (ext == "png") {
    save_png(img, path);
  } else if (ext == "pgm") {
    save_pnm(img, path, /*ppm=*/false);
  } else if (ext == "ppm") {
    save_pnm(img, path, /*ppm=*/true);
  } else {
    fail("unsupported output format (use .png, .pgm or .ppm)", path);
  }
}

}  // namespace nirfuse
