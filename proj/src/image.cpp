#include "image.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

namespace awf {

Image::Image(int height, int width, double fill) : h(height), w(width) {
  require(height >= 1 && width >= 1, ErrorKind::invalid_argument,
          "Image: bad size ", height, "x", width);
  pix.assign(static_cast<std::size_t>(height) * width, fill);
}

namespace {

bool ends_with_ci(const std::string& s, const std::string& suffix) {
  if (s.size() < suffix.size()) return false;
  for (std::size_t i = 0; i < suffix.size(); ++i) {
    const char a = static_cast<char>(std::tolower(
        static_cast<unsigned char>(s[s.size() - suffix.size() + i])));
    if (a != suffix[i]) return false;
  }
  return true;
}

// ---- PGM ---------------------------------------------------------------

// next header token, skipping whitespace and # comment lines
std::string pgm_token(std::istream& in, const std::string& path) {
  for (;;) {
    const int c = in.peek();
    if (c == EOF)
      fail(ErrorKind::format, path, ": truncated PGM header");
    if (std::isspace(c)) {
      in.get();
      continue;
    }
    if (c == '#') {
      std::string line;
      std::getline(in, line);
      continue;
    }
    break;
  }
  std::string tok;
  while (in.peek() != EOF && !std::isspace(in.peek()))
    tok.push_back(static_cast<char>(in.get()));
  return tok;
}

int pgm_int(std::istream& in, const std::string& path, const char* what) {
  const std::string tok = pgm_token(in, path);
  int value = 0;
  for (char c : tok) {
    require(std::isdigit(static_cast<unsigned char>(c)), ErrorKind::format,
            path, ": bad ", what, " '", tok, "' in PGM header");
    value = value * 10 + (c - '0');
    require(value <= 1 << 30, ErrorKind::format, path, ": ", what,
            " out of range in PGM header");
  }
  require(!tok.empty(), ErrorKind::format, path, ": missing ", what,
          " in PGM header");
  return value;
}

Image load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::io, path, ": cannot open file");
  char magic[2] = {0, 0};
  in.read(magic, 2);
  require(in.gcount() == 2 && magic[0] == 'P' &&
              (magic[1] == '2' || magic[1] == '5'),
          ErrorKind::format, path, ": not a PGM file");
  const bool binary = magic[1] == '5';
  const int w = pgm_int(in, path, "width");
  const int h = pgm_int(in, path, "height");
  const int maxval = pgm_int(in, path, "maxval");
  require(w >= 1 && h >= 1, ErrorKind::format, path,
          ": bad PGM size ", w, "x", h);
  require(maxval >= 1 && maxval <= 65535, ErrorKind::format, path,
          ": bad PGM maxval ", maxval);

  Image img(h, w);
  const double scale = 1.0 / maxval;
  if (binary) {
    in.get();  // single whitespace byte after maxval
    const int bytes = maxval < 256 ? 1 : 2;
    std::vector<unsigned char> raw(static_cast<std::size_t>(h) * w * bytes);
    in.read(reinterpret_cast<char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
    require(in.gcount() == static_cast<std::streamsize>(raw.size()),
            ErrorKind::format, path, ": truncated PGM pixel data");
    for (std::size_t i = 0; i < img.pix.size(); ++i) {
      const int v = bytes == 1 ? raw[i] : (raw[2 * i] << 8 | raw[2 * i + 1]);
      require(v <= maxval, ErrorKind::format, path,
              ": PGM sample exceeds maxval");
      img.pix[i] = v * scale;
    }
  } else {
    for (std::size_t i = 0; i < img.pix.size(); ++i) {
      const int v = pgm_int(in, path, "sample");
      require(v <= maxval, ErrorKind::format, path,
              ": PGM sample exceeds maxval");
      img.pix[i] = v * scale;
    }
  }
  return img;
}

void save_pgm(const Image& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorKind::io, path, ": cannot create file");
  out << "P5\n" << img.w << " " << img.h << "\n255\n";
  std::vector<unsigned char> raw(img.pix.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double v = std::clamp(img.pix[i], 0.0, 1.0);
    raw[i] = static_cast<unsigned char>(std::lround(v * 255.0));
  }
  out.write(reinterpret_cast<const char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
  require(out.good(), ErrorKind::io, path, ": write failed");
}

// ---- PNG ---------------------------------------------------------------

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};

Image load_png(const std::string& path) {
  std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "rb"));
  require(fp != nullptr, ErrorKind::io, path, ": cannot open file");

  unsigned char sig[8];
  require(std::fread(sig, 1, 8, fp.get()) == 8 && !png_sig_cmp(sig, 0, 8),
          ErrorKind::format, path, ": not a PNG file");

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  require(png != nullptr, ErrorKind::io, path, ": libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    fail(ErrorKind::io, path, ": libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorKind::format, path, ": corrupt PNG data");
  }

  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  // normalize everything to 8 bit gray or rgb rows
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_packing(png);
  const png_byte color = png_get_color_type(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  png_read_update_info(png, info);

  const int w = static_cast<int>(png_get_image_width(png, info));
  const int h = static_cast<int>(png_get_image_height(png, info));
  const int channels = png_get_channels(png, info);
  if (w < 1 || h < 1 || (channels != 1 && channels != 3)) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorKind::format, path, ": unsupported PNG layout (", channels,
         " channels)");
  }

  std::vector<unsigned char> raw(static_cast<std::size_t>(h) * w * channels);
  std::vector<png_bytep> rows(static_cast<std::size_t>(h));
  for (int y = 0; y < h; ++y)
    rows[static_cast<std::size_t>(y)] =
        raw.data() + static_cast<std::size_t>(y) * w * channels;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  Image img(h, w);
  if (channels == 1) {
    for (std::size_t i = 0; i < img.pix.size(); ++i) img.pix[i] = raw[i] / 255.0;
  } else {
    for (std::size_t i = 0; i < img.pix.size(); ++i) {
      const double r = raw[3 * i], g = raw[3 * i + 1], b = raw[3 * i + 2];
      img.pix[i] = (0.299 * r + 0.587 * g + 0.114 * b) / 255.0;
    }
  }
  return img;
}

void save_png(const Image& img, const std::string& path) {
  std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "wb"));
  require(fp != nullptr, ErrorKind::io, path, ": cannot create file");

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  require(png != nullptr, ErrorKind::io, path, ": libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    fail(ErrorKind::io, path, ": libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorKind::io, path, ": PNG write failed");
  }

  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.w),
               static_cast<png_uint_32>(img.h), 8, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::vector<unsigned char> raw(img.pix.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double v = std::clamp(img.pix[i], 0.0, 1.0);
    raw[i] = static_cast<unsigned char>(std::lround(v * 255.0));
  }
  for (int y = 0; y < img.h; ++y)
    png_write_row(png, raw.data() + static_cast<std::size_t>(y) * img.w);
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

Image load_image(const std::string& path) {
  if (ends_with_ci(path, ".pgm")) return load_pgm(path);
  if (ends_with_ci(path, ".png")) return load_png(path);
  fail(ErrorKind::invalid_argument, path,
       ": unsupported image extension (use .pgm or .png)");
}

void save_image(const Image& img, const std::string& path) {
  require(img.h >= 1 && img.w >= 1 &&
              img.pix.size() == static_cast<std::size_t>(img.h) * img.w,
          ErrorKind::invalid_argument, path, ": image is empty or inconsistent");
  if (ends_with_ci(path, ".pgm")) return save_pgm(img, path);
  if (ends_with_ci(path, ".png")) return save_png(img, path);
  fail(ErrorKind::invalid_argument, path,
       ": unsupported image extension (use .pgm or .png)");
}

Image resize_bilinear(const Image& img, int oh, int ow) {
  require(img.h >= 1 && img.w >= 1, ErrorKind::invalid_argument,
          "resize_bilinear: empty source image");
  require(oh >= 1 && ow >= 1, ErrorKind::invalid_argument,
          "resize_bilinear: bad target size ", oh, "x", ow);
  Image out(oh, ow);
  const double sy = oh > 1 ? double(img.h - 1) / (oh - 1) : 0.0;
  const double sx = ow > 1 ? double(img.w - 1) / (ow - 1) : 0.0;
  for (int y = 0; y < oh; ++y) {
    const double fy = y * sy;
    const int y0 = std::min(static_cast<int>(fy), img.h - 1);
    const int y1 = std::min(y0 + 1, img.h - 1);
    const double wy = fy - y0;
    for (int x = 0; x < ow; ++x) {
      const double fx = x * sx;
      const int x0 = std::min(static_cast<int>(fx), img.w - 1);
      const int x1 = std::min(x0 + 1, img.w - 1);
      const double wx = fx - x0;
      const double top = (1.0 - wx) * img.at(y0, x0) + wx * img.at(y0, x1);
      const double bot = (1.0 - wx) * img.at(y1, x0) + wx * img.at(y1, x1);
      out.at(y, x) = (1.0 - wy) * top + wy * bot;
    }
  }
  return out;
}

}  // namespace awf
