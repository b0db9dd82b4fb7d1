#include "torsoseg/nifti.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <memory>

#include <zlib.h>

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace torsoseg {

namespace {

constexpr short kIntentLabel = 1002;

#pragma pack(push, 1)
struct Nifti1Header {
  std::int32_t sizeof_hdr;
  char data_type[10];
  char db_name[18];
  std::int32_t extents;
  std::int16_t session_error;
  char regular;
  char dim_info;
  std::int16_t dim[8];
  float intent_p1;
  float intent_p2;
  float intent_p3;
  std::int16_t intent_code;
  std::int16_t datatype;
  std::int16_t bitpix;
  std::int16_t slice_start;
  float pixdim[8];
  float vox_offset;
  float scl_slope;
  float scl_inter;
  std::int16_t slice_end;
  char slice_code;
  char xyzt_units;
  float cal_max;
  float cal_min;
  float slice_duration;
  float toffset;
  std::int32_t glmax;
  std::int32_t glmin;
  char descrip[80];
  char aux_file[24];
  std::int16_t qform_code;
  std::int16_t sform_code;
  float quatern_b;
  float quatern_c;
  float quatern_d;
  float qoffset_x;
  float qoffset_y;
  float qoffset_z;
  float srow_x[4];
  float srow_y[4];
  float srow_z[4];
  char intent_name[16];
  char magic[4];
};
#pragma pack(pop)
static_assert(sizeof(Nifti1Header) == 348);
static_assert(std::endian::native == std::endian::little, "little-endian host required");

template <typename T>
T byteswap(T v) {
  auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(v);
  std::reverse(bytes.begin(), bytes.end());
  return std::bit_cast<T>(bytes);
}

template <typename T, std::size_t N>
void swap_array(T (&a)[N]) {
  for (auto& x : a) x = byteswap(x);
}

void swap_header(Nifti1Header& h) {
  h.sizeof_hdr = byteswap(h.sizeof_hdr);
  h.extents = byteswap(h.extents);
  h.session_error = byteswap(h.session_error);
  swap_array(h.dim);
  h.intent_p1 = byteswap(h.intent_p1);
  h.intent_p2 = byteswap(h.intent_p2);
  h.intent_p3 = byteswap(h.intent_p3);
  h.intent_code = byteswap(h.intent_code);
  h.datatype = byteswap(h.datatype);
  h.bitpix = byteswap(h.bitpix);
  h.slice_start = byteswap(h.slice_start);
  swap_array(h.pixdim);
  h.vox_offset = byteswap(h.vox_offset);
  h.scl_slope = byteswap(h.scl_slope);
  h.scl_inter = byteswap(h.scl_inter);
  h.slice_end = byteswap(h.slice_end);
  h.cal_max = byteswap(h.cal_max);
  h.cal_min = byteswap(h.cal_min);
  h.slice_duration = byteswap(h.slice_duration);
  h.toffset = byteswap(h.toffset);
  h.glmax = byteswap(h.glmax);
  h.glmin = byteswap(h.glmin);
  h.qform_code = byteswap(h.qform_code);
  h.sform_code = byteswap(h.sform_code);
  h.quatern_b = byteswap(h.quatern_b);
  h.quatern_c = byteswap(h.quatern_c);
  h.quatern_d = byteswap(h.quatern_d);
  h.qoffset_x = byteswap(h.qoffset_x);
  h.qoffset_y = byteswap(h.qoffset_y);
  h.qoffset_z = byteswap(h.qoffset_z);
  swap_array(h.srow_x);
  swap_array(h.srow_y);
  swap_array(h.srow_z);
}

struct GzCloser {
  void operator()(gzFile f) const {
    if (f) gzclose(f);
  }
};
using GzHandle = std::unique_ptr<std::remove_pointer_t<gzFile>, GzCloser>;

bool has_gz_suffix(const std::filesystem::path& p) {
  const auto s = p.string();
  return s.size() >= 3 && s.compare(s.size() - 3, 3, ".gz") == 0;
}

void read_exact(gzFile f, void* dst, std::size_t n, const std::filesystem::path& path) {
  auto* out = static_cast<unsigned char*>(dst);
  while (n > 0) {
    const unsigned chunk = static_cast<unsigned>(std::min<std::size_t>(n, 1u << 30));
    const int got = gzread(f, out, chunk);
    if (got <= 0) throw IoError("truncated NIfTI file: " + path.string());
    out += got;
    n -= static_cast<std::size_t>(got);
  }
}

void write_exact(gzFile f, const void* src, std::size_t n, const std::filesystem::path& path) {
  const auto* in = static_cast<const unsigned char*>(src);
  while (n > 0) {
    const unsigned chunk = static_cast<unsigned>(std::min<std::size_t>(n, 1u << 30));
    const int put = gzwrite(f, in, chunk);
    if (put <= 0) throw IoError("failed writing " + path.string());
    in += put;
    n -= static_cast<std::size_t>(put);
  }
}

int bytes_per_voxel(short datatype) {
  switch (static_cast<NiftiType>(datatype)) {
    case NiftiType::uint8:
    case NiftiType::int8:
      return 1;
    case NiftiType::int16:
    case NiftiType::uint16:
      return 2;
    case NiftiType::int32:
    case NiftiType::uint32:
    case NiftiType::float32:
      return 4;
    case NiftiType::float64:
    case NiftiType::int64:
    case NiftiType::uint64:
      return 8;
  }
  return 0;
}

bool is_integer_type(NiftiType t) { return t != NiftiType::float32 && t != NiftiType::float64; }

// Decodes raw bytes of one datatype into doubles-compatible callbacks.
template <typename Fn>
void for_each_value(const std::vector<unsigned char>& raw, NiftiType type, bool swap, Fn&& fn) {
  auto visit = [&](auto tag) {
    using T = decltype(tag);
    const std::size_t n = raw.size() / sizeof(T);
    for (std::size_t i = 0; i < n; ++i) {
      T v;
      std::memcpy(&v, raw.data() + i * sizeof(T), sizeof(T));
      if (swap) v = byteswap(v);
      fn(i, v);
    }
  };
  switch (type) {
    case NiftiType::uint8: visit(std::uint8_t{}); break;
    case NiftiType::int8: visit(std::int8_t{}); break;
    case NiftiType::int16: visit(std::int16_t{}); break;
    case NiftiType::uint16: visit(std::uint16_t{}); break;
    case NiftiType::int32: visit(std::int32_t{}); break;
    case NiftiType::uint32: visit(std::uint32_t{}); break;
    case NiftiType::int64: visit(std::int64_t{}); break;
    case NiftiType::uint64: visit(std::uint64_t{}); break;
    case NiftiType::float32: visit(float{}); break;
    case NiftiType::float64: visit(double{}); break;
  }
}

Affine affine_from_qform(const Nifti1Header& h) {
  const double b = h.quatern_b, c = h.quatern_c, d = h.quatern_d;
  const double a = std::sqrt(std::max(0.0, 1.0 - (b * b + c * c + d * d)));
  const Eigen::Quaterniond q(a, b, c, d);
  Eigen::Matrix3d r = q.normalized().toRotationMatrix();
  const double qfac = h.pixdim[0] < 0 ? -1.0 : 1.0;
  r.col(2) *= qfac;
  Affine out = Affine::Identity();
  for (int j = 0; j < 3; ++j) {
    const double s = h.pixdim[j + 1] > 0 ? h.pixdim[j + 1] : 1.0;
    out.block<3, 1>(0, j) = r.col(j) * s;
  }
  out(0, 3) = h.qoffset_x;
  out(1, 3) = h.qoffset_y;
  out(2, 3) = h.qoffset_z;
  return out;
}

struct ParsedHeader {
  Nifti1Header header;
  bool swapped = false;
  Shape3 shape{};
  Affine affine;
  std::vector<std::string> warnings;
};

ParsedHeader parse_header(gzFile f, const std::filesystem::path& path) {
  ParsedHeader p;
  read_exact(f, &p.header, sizeof(Nifti1Header), path);
  Nifti1Header& h = p.header;
  if (h.sizeof_hdr != 348) {
    if (byteswap(h.sizeof_hdr) != 348) throw ValidationError("malformed NIfTI header: " + path.string());
    swap_header(h);
    p.swapped = true;
  }
  if (std::memcmp(h.magic, "n+1\0", 4) != 0 && std::memcmp(h.magic, "ni1\0", 4) != 0)
    throw ValidationError("not a NIfTI-1 file (bad magic): " + path.string());
  if (std::memcmp(h.magic, "ni1\0", 4) == 0)
    throw ValidationError("two-file NIfTI (.hdr/.img) is not supported: " + path.string());

  const int ndim = h.dim[0];
  if (ndim < 1 || ndim > 7) throw ValidationError("malformed NIfTI header: dim[0] out of range");
  for (int i = ndim + 1; i <= 7; ++i) h.dim[i] = 1;
  for (int i = 1; i <= ndim; ++i)
    if (h.dim[i] <= 0) throw ValidationError("malformed NIfTI header: non-positive dimension");
  int effective = ndim;
  while (effective > 3 && h.dim[effective] == 1) --effective;
  if (effective > 3)
    throw ValidationError("volume dimension " + std::to_string(effective) + " is not 3");
  p.shape = {h.dim[1], h.dim[2], h.dim[3]};

  if (bytes_per_voxel(h.datatype) == 0)
    throw ValidationError("unsupported NIfTI datatype " + std::to_string(h.datatype));
  if (h.bitpix != 8 * bytes_per_voxel(h.datatype))
    p.warnings.push_back("bitpix disagrees with datatype; using datatype");

  if (h.sform_code > 0) {
    p.affine = Affine::Identity();
    for (int j = 0; j < 4; ++j) {
      p.affine(0, j) = h.srow_x[j];
      p.affine(1, j) = h.srow_y[j];
      p.affine(2, j) = h.srow_z[j];
    }
  } else if (h.qform_code > 0) {
    p.affine = affine_from_qform(h);
  } else {
    p.affine = Affine::Identity();
    for (int j = 0; j < 3; ++j) p.affine(j, j) = h.pixdim[j + 1] > 0 ? h.pixdim[j + 1] : 1.0;
    p.warnings.push_back("no qform/sform; using pixdim as axis-aligned spacing");
  }
  for (int j = 0; j < 3; ++j) {
    const double from_affine = p.affine.block<3, 1>(0, j).norm();
    const double from_header = h.pixdim[j + 1];
    if (from_header > 0 && std::abs(from_affine - from_header) > 1e-4 * from_header)
      p.warnings.push_back("pixdim[" + std::to_string(j + 1) + "]=" + std::to_string(from_header) +
                           " disagrees with affine spacing " + std::to_string(from_affine) +
                           "; using the affine");
  }
  return p;
}

struct RawVolume {
  ParsedHeader header;
  std::vector<unsigned char> bytes;
  NiftiType type;
};

RawVolume read_raw(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("no such file: " + path.string());
  GzHandle f(gzopen(path.c_str(), "rb"));
  if (!f) throw IoError("cannot open " + path.string());
  gzbuffer(f.get(), 1 << 18);
  RawVolume raw{parse_header(f.get(), path), {}, NiftiType::uint8};
  const auto& h = raw.header.header;
  raw.type = static_cast<NiftiType>(h.datatype);
  const auto offset = static_cast<std::int64_t>(h.vox_offset);
  if (offset < 348) throw ValidationError("malformed NIfTI header: vox_offset < 348");
  std::vector<unsigned char> skip(static_cast<std::size_t>(offset - 348));
  if (!skip.empty()) read_exact(f.get(), skip.data(), skip.size(), path);
  const auto& s = raw.header.shape;
  const std::size_t n = static_cast<std::size_t>(s[0] * s[1] * s[2]);
  raw.bytes.resize(n * static_cast<std::size_t>(bytes_per_voxel(h.datatype)));
  read_exact(f.get(), raw.bytes.data(), raw.bytes.size(), path);
  return raw;
}

bool has_scaling(const Nifti1Header& h) {
  return h.scl_slope != 0 && std::isfinite(h.scl_slope) && (h.scl_slope != 1 || h.scl_inter != 0);
}

GridSpec grid_of(const RawVolume& raw) { return GridSpec(raw.header.shape, raw.header.affine); }

Image decode_image(const RawVolume& raw) {
  const auto& h = raw.header.header;
  Image out(grid_of(raw));
  auto dst = out.data();
  const bool scale = has_scaling(h);
  const double slope = h.scl_slope, inter = h.scl_inter;
  for_each_value(raw.bytes, raw.type, raw.header.swapped, [&](std::size_t i, auto v) {
    const double d = static_cast<double>(v);
    dst[i] = static_cast<float>(scale ? d * slope + inter : d);
  });
  return out;
}

LabelMap decode_labels(const RawVolume& raw, const std::filesystem::path& path) {
  const auto& h = raw.header.header;
  if (has_scaling(h)) throw ValidationError("labelmap has intensity scaling: " + path.string());
  LabelMap out(grid_of(raw));
  auto dst = out.data();
  bool bad = false;
  for_each_value(raw.bytes, raw.type, raw.header.swapped, [&](std::size_t i, auto v) {
    const double d = static_cast<double>(v);
    if (!(d >= 0) || d != std::floor(d) || d > std::numeric_limits<std::int32_t>::max()) {
      bad = true;
      return;
    }
    dst[i] = static_cast<std::int32_t>(d);
  });
  if (bad) throw ValidationError("labelmap values must be non-negative integers: " + path.string());
  return out;
}

bool all_nonnegative(const RawVolume& raw) {
  bool ok = true;
  for_each_value(raw.bytes, raw.type, raw.header.swapped, [&](std::size_t, auto v) {
    if constexpr (std::is_signed_v<decltype(v)>)
      if (v < 0) ok = false;
  });
  return ok;
}

// qform quaternion for the rotation part of an affine (handles reflections via qfac).
void set_qform(Nifti1Header& h, const Affine& a) {
  Eigen::Matrix3d r = a.block<3, 3>(0, 0);
  Vec3 s;
  for (int j = 0; j < 3; ++j) {
    s[j] = r.col(j).norm();
    r.col(j) /= s[j];
  }
  double qfac = 1.0;
  if (r.determinant() < 0) {
    qfac = -1.0;
    r.col(2) = -r.col(2);
  }
  // Project onto the nearest rotation to absorb shear/rounding.
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  r = svd.matrixU() * svd.matrixV().transpose();
  Eigen::Quaterniond q(r);
  if (q.w() < 0) q.coeffs() = -q.coeffs();
  h.quatern_b = static_cast<float>(q.x());
  h.quatern_c = static_cast<float>(q.y());
  h.quatern_d = static_cast<float>(q.z());
  h.qoffset_x = static_cast<float>(a(0, 3));
  h.qoffset_y = static_cast<float>(a(1, 3));
  h.qoffset_z = static_cast<float>(a(2, 3));
  h.pixdim[0] = static_cast<float>(qfac);
  for (int j = 0; j < 3; ++j) h.pixdim[j + 1] = static_cast<float>(s[j]);
}

Nifti1Header make_header(const GridSpec& grid, NiftiType type, short intent) {
  Nifti1Header h{};
  h.sizeof_hdr = 348;
  h.regular = 'r';
  h.dim[0] = 3;
  for (int i = 0; i < 3; ++i) {
    if (grid.shape()[i] > std::numeric_limits<std::int16_t>::max())
      throw ValidationError("shape exceeds the NIfTI-1 dimension limit of 32767");
    h.dim[i + 1] = static_cast<std::int16_t>(grid.shape()[i]);
  }
  for (int i = 4; i < 8; ++i) h.dim[i] = 1;
  h.intent_code = intent;
  h.datatype = static_cast<std::int16_t>(type);
  h.bitpix = static_cast<std::int16_t>(8 * bytes_per_voxel(h.datatype));
  for (int i = 4; i < 8; ++i) h.pixdim[i] = 1.0f;
  h.vox_offset = 352.0f;
  h.scl_slope = 1.0f;
  h.xyzt_units = 2 | 8;  // mm, seconds
  std::strncpy(h.descrip, "torsoseg " TORSOSEG_VERSION, sizeof(h.descrip) - 1);
  const Affine& a = grid.affine();
  set_qform(h, a);
  h.qform_code = 1;
  h.sform_code = 1;
  for (int j = 0; j < 4; ++j) {
    h.srow_x[j] = static_cast<float>(a(0, j));
    h.srow_y[j] = static_cast<float>(a(1, j));
    h.srow_z[j] = static_cast<float>(a(2, j));
  }
  std::memcpy(h.magic, "n+1\0", 4);
  return h;
}

template <typename Stored, typename T>
std::vector<unsigned char> encode(std::span<const T> values) {
  std::vector<unsigned char> out(values.size() * sizeof(Stored));
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto v = static_cast<Stored>(values[i]);
    std::memcpy(out.data() + i * sizeof(Stored), &v, sizeof(Stored));
  }
  return out;
}

void write_file(const std::filesystem::path& path, const Nifti1Header& h,
                std::span<const unsigned char> payload) {
  const auto parent = path.parent_path();
  if (!parent.empty() && !std::filesystem::is_directory(parent))
    throw IoError("output directory does not exist: " + parent.string());
  GzHandle f(gzopen(path.c_str(), has_gz_suffix(path) ? "wb6" : "wbT"));
  if (!f) throw IoError("cannot open for writing: " + path.string());
  gzbuffer(f.get(), 1 << 18);
  write_exact(f.get(), &h, sizeof(h), path);
  const char extension[4] = {0, 0, 0, 0};
  write_exact(f.get(), extension, sizeof(extension), path);
  write_exact(f.get(), payload.data(), payload.size(), path);
  GzCloser{}(f.release());
}

template <typename T>
void write_labels_impl(const Volume<T>& v, const std::filesystem::path& path) {
  std::int64_t lo = 0, hi = 0;
  for (const T x : v.data()) {
    lo = std::min<std::int64_t>(lo, x);
    hi = std::max<std::int64_t>(hi, x);
  }
  if (lo < 0) throw ValidationError("labelmap contains negative values");
  if (hi <= 255) {
    write_file(path, make_header(v.grid(), NiftiType::uint8, kIntentLabel),
               encode<std::uint8_t>(v.data()));
  } else if (hi <= 32767) {
    write_file(path, make_header(v.grid(), NiftiType::int16, kIntentLabel),
               encode<std::int16_t>(v.data()));
  } else {
    write_file(path, make_header(v.grid(), NiftiType::int32, kIntentLabel),
               encode<std::int32_t>(v.data()));
  }
}

}  // namespace

LoadedVolume read_volume(const std::filesystem::path& path) {
  const RawVolume raw = read_raw(path);
  const auto& h = raw.header.header;
  LoadedVolume out{Image{}, raw.type, raw.header.warnings};
  const bool label_like = h.intent_code == kIntentLabel ||
                          (is_integer_type(raw.type) && !has_scaling(h) && all_nonnegative(raw));
  if (label_like)
    out.volume = decode_labels(raw, path);
  else
    out.volume = decode_image(raw);
  return out;
}

Image read_image(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  const RawVolume raw = read_raw(path);
  if (warnings) warnings->insert(warnings->end(), raw.header.warnings.begin(), raw.header.warnings.end());
  return decode_image(raw);
}

LabelMap read_labels(const std::filesystem::path& path, std::vector<std::string>* warnings) {
  const RawVolume raw = read_raw(path);
  if (warnings) warnings->insert(warnings->end(), raw.header.warnings.begin(), raw.header.warnings.end());
  return decode_labels(raw, path);
}

Mask read_mask(const std::filesystem::path& path, std::int32_t label) {
  return binarize(read_labels(path), label);
}

void write_volume(const Image& v, const std::filesystem::path& path) {
  write_file(path, make_header(v.grid(), NiftiType::float32, 0), encode<float>(v.data()));
}

void write_volume(const LabelMap& v, const std::filesystem::path& path) { write_labels_impl(v, path); }

void write_volume(const Mask& v, const std::filesystem::path& path) { write_labels_impl(v, path); }

void write_volume(const AnyVolume& v, const std::filesystem::path& path) {
  std::visit([&](const auto& vol) { write_volume(vol, path); }, v);
}

}  // namespace torsoseg
