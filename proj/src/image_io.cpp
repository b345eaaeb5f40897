#include "hcd/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

namespace hcd {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

Image planar_from_samples(const std::vector<double>& samples,
                          Eigen::Index channels, Eigen::Index h,
                          Eigen::Index w) {
  Tensor t(Shape4{1, channels, h, w});
  for (Eigen::Index y = 0; y < h; ++y)
    for (Eigen::Index x = 0; x < w; ++x)
      for (Eigen::Index c = 0; c < channels; ++c)
        t(0, c, y, x) = samples[(y * w + x) * channels + c];
  return Image(channels == 1 ? ColorSpace::gray : ColorSpace::rgb,
               std::move(t));
}

Image load_png(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.string().c_str(), "rb"));
  if (!fp) throw_data("file not found: " + path.string());

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw_data("png: out of memory");
  }

  std::vector<png_byte> data;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw_data("truncated or corrupt PNG: " + path.string());
  }

  png_init_io(png, fp.get());
  png_read_info(png, info);

  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  const int depth = png_get_bit_depth(png, info);
  const int color = png_get_color_type(png, info);

  if ((depth != 8 && depth != 16) ||
      (color != PNG_COLOR_TYPE_GRAY && color != PNG_COLOR_TYPE_RGB)) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw_data("unsupported PNG format (need 8/16-bit gray or RGB): " +
               path.string());
  }

  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  const size_t rowbytes = png_get_rowbytes(png, info);
  data.resize(rowbytes * h);
  rows.resize(h);
  for (png_uint_32 y = 0; y < h; ++y) rows[y] = data.data() + y * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  const Eigen::Index channels = color == PNG_COLOR_TYPE_GRAY ? 1 : 3;
  std::vector<double> samples(static_cast<size_t>(w) * h * channels);
  if (depth == 8) {
    for (size_t i = 0; i < samples.size(); ++i) samples[i] = data[i] / 255.0;
  } else {
    // 16-bit PNG samples are big-endian.
    for (size_t i = 0; i < samples.size(); ++i) {
      const unsigned v = (static_cast<unsigned>(data[2 * i]) << 8) |
                         static_cast<unsigned>(data[2 * i + 1]);
      samples[i] = v / 65535.0;
    }
  }
  return planar_from_samples(samples, channels, h, w);
}

void save_png(const Image& img, const std::filesystem::path& path,
              int bit_depth) {
  FilePtr fp(std::fopen(path.string().c_str(), "wb"));
  if (!fp) throw_data("cannot open for writing: " + path.string());

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw_data("png: out of memory");
  }

  const Eigen::Index w = img.width(), h = img.height(), ch = img.channels();
  const double maxval = bit_depth == 8 ? 255.0 : 65535.0;
  const size_t rowbytes =
      static_cast<size_t>(w) * ch * (bit_depth == 8 ? 1 : 2);
  std::vector<png_byte> data(rowbytes * h);
  for (Eigen::Index y = 0; y < h; ++y)
    for (Eigen::Index x = 0; x < w; ++x)
      for (Eigen::Index c = 0; c < ch; ++c) {
        const auto q = static_cast<unsigned>(
            std::lround(img(c, y, x) * maxval));
        const size_t i = (y * w + x) * ch + c;
        if (bit_depth == 8) {
          data[i] = static_cast<png_byte>(q);
        } else {
          data[2 * i] = static_cast<png_byte>(q >> 8);
          data[2 * i + 1] = static_cast<png_byte>(q & 0xFF);
        }
      }

  std::vector<png_bytep> rows(h);
  for (Eigen::Index y = 0; y < h; ++y) rows[y] = data.data() + y * rowbytes;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw_data("png write failed: " + path.string());
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(w),
               static_cast<png_uint_32>(h), bit_depth,
               ch == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

int pnm_token(std::istream& in) {
  // Whitespace-delimited unsigned decimal; '#' comments run to newline.
  int ch = in.get();
  while (ch != EOF &&
         (std::isspace(ch) || ch == '#')) {
    if (ch == '#')
      while (ch != EOF && ch != '\n') ch = in.get();
    ch = in.get();
  }
  int value = -1;
  while (ch != EOF && std::isdigit(ch)) {
    if (value < 0) value = 0;
    value = value * 10 + (ch - '0');
    if (value > 1 << 30) throw_data("pnm: absurd header value");
    ch = in.get();
  }
  if (value < 0) throw_data("pnm: malformed header");
  return value;
}

Image load_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_data("file not found: " + path.string());
  char m0 = 0, m1 = 0;
  in.get(m0).get(m1);
  if (m0 != 'P' || (m1 != '5' && m1 != '6'))
    throw_data("unsupported PNM magic in " + path.string());
  const Eigen::Index channels = m1 == '6' ? 3 : 1;
  const int w = pnm_token(in);
  const int h = pnm_token(in);
  const int maxval = pnm_token(in);
  if (w < 1 || h < 1) throw_data("pnm: empty image");
  if (maxval != 255 && maxval != 65535)
    throw_data("pnm: unsupported maxval " + std::to_string(maxval));
  // pnm_token consumed exactly one whitespace byte after maxval.
  const size_t n = static_cast<size_t>(w) * h * channels;
  const size_t bytes = n * (maxval == 255 ? 1 : 2);
  std::vector<unsigned char> raw(bytes);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(bytes));
  if (static_cast<size_t>(in.gcount()) != bytes)
    throw_data("pnm: truncated raster in " + path.string());
  std::vector<double> samples(n);
  if (maxval == 255) {
    for (size_t i = 0; i < n; ++i) samples[i] = raw[i] / 255.0;
  } else {
    for (size_t i = 0; i < n; ++i) {
      const unsigned v = (static_cast<unsigned>(raw[2 * i]) << 8) |
                         static_cast<unsigned>(raw[2 * i + 1]);
      samples[i] = v / 65535.0;
    }
  }
  return planar_from_samples(samples, channels, h, w);
}

void save_pnm(const Image& img, const std::filesystem::path& path,
              bool color) {
  if (color && img.channels() != 3)
    throw_data("cannot write a non-RGB image as PPM");
  if (!color && img.channels() != 1)
    throw_data("cannot write a non-gray image as PGM");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_data("cannot open for writing: " + path.string());
  out << (color ? "P6" : "P5") << "\n"
      << img.width() << " " << img.height() << "\n255\n";
  std::vector<unsigned char> raw(
      static_cast<size_t>(img.width()) * img.height() * img.channels());
  size_t i = 0;
  for (Eigen::Index y = 0; y < img.height(); ++y)
    for (Eigen::Index x = 0; x < img.width(); ++x)
      for (Eigen::Index c = 0; c < img.channels(); ++c)
        raw[i++] =
            static_cast<unsigned char>(std::lround(img(c, y, x) * 255.0));
  out.write(reinterpret_cast<const char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
  if (!out) throw_data("write failed: " + path.string());
}

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return ext;
}

}  // namespace

Image load_image(const std::filesystem::path& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw_data("file not found: " + path.string());
  unsigned char magic[2] = {0, 0};
  probe.read(reinterpret_cast<char*>(magic), 2);
  probe.close();
  if (magic[0] == 0x89 && magic[1] == 'P') return load_png(path);
  if (magic[0] == 'P' && (magic[1] == '5' || magic[1] == '6'))
    return load_pnm(path);
  throw_data("unsupported image format: " + path.string());
}

void save_image(const Image& img, const std::filesystem::path& path,
                int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16)
    throw_usage("save_image: bit depth must be 8 or 16");
  const std::string ext = lower_extension(path);
  if (ext == ".png") {
    save_png(img, path, bit_depth);
  } else if (ext == ".ppm") {
    save_pnm(img, path, /*color=*/true);
  } else if (ext == ".pgm") {
    save_pnm(img, path, /*color=*/false);
  } else {
    throw_usage("unsupported output extension '" + ext + "' (png/ppm/pgm)");
  }
}

}  // namespace hcd
