#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "pcb/error.hpp"
#include "pcb/pointcloud.hpp"

namespace pcb {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_number(std::string_view token, double& out) {
  token = trim(token);
  if (token.empty()) return false;
  if (token.front() == '+') token.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, const char* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(data, static_cast<std::streamsize>(size));
  if (!out) throw Error("write failed for " + path.string());
}

template <typename T>
void put_le(std::vector<std::uint8_t>& buf, T value) {
  for (std::size_t b = 0; b < sizeof(T); ++b) buf.push_back(static_cast<std::uint8_t>(value >> (8 * b)));
}

template <typename T>
T get_le(const std::uint8_t* p) {
  T v = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) v |= static_cast<T>(p[b]) << (8 * b);
  return v;
}

constexpr std::array<std::uint8_t, 4> kMagic{'P', 'C', 'B', '1'};

}  // namespace

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), ptr);
}

PointCloud parse_csv(const std::string& text) {
  std::vector<double> coords;
  std::size_t dim = 0;
  std::size_t line_no = 0;
  bool seen_content = false;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string::npos) end = text.size();
    const std::string_view line = trim(std::string_view(text).substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split_fields(line);
    double first = 0.0;
    if (!seen_content && !parse_number(fields.front(), first)) {
      seen_content = true;  // header line
      continue;
    }
    seen_content = true;
    if (dim == 0) dim = fields.size();
    if (fields.size() != dim) {
      throw ParseError("expected " + std::to_string(dim) + " fields, found " + std::to_string(fields.size()),
                       line_no);
    }
    for (std::size_t k = 0; k < fields.size(); ++k) {
      double v = 0.0;
      if (!parse_number(fields[k], v)) {
        throw ParseError("non-numeric field " + std::to_string(k + 1) + " '" + std::string(trim(fields[k])) + "'",
                         line_no);
      }
      if (!std::isfinite(v)) throw ParseError("non-finite value in field " + std::to_string(k + 1), line_no);
      coords.push_back(v);
    }
  }
  if (coords.empty()) throw ParseError("no points in input", line_no);
  return PointCloud(dim, std::move(coords));
}

PointCloud load_csv(const std::filesystem::path& path) { return parse_csv(read_file(path)); }

std::string format_csv(const PointCloud& cloud) {
  std::string out;
  out.reserve(cloud.size() * cloud.dim() * 20);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto row = cloud[i];
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out.push_back(',');
      out += format_double(row[k]);
    }
    out.push_back('\n');
  }
  return out;
}

void save_csv(const PointCloud& cloud, const std::filesystem::path& path, const std::string& comment) {
  std::string text;
  if (!comment.empty()) text = "# " + comment + "\n";
  text += format_csv(cloud);
  write_file(path, text.data(), text.size());
}

std::vector<std::uint8_t> encode_binary(const PointCloud& cloud) {
  std::vector<std::uint8_t> buf(kMagic.begin(), kMagic.end());
  buf.reserve(16 + cloud.coords().size() * 8);
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(cloud.dim()));
  put_le<std::uint64_t>(buf, static_cast<std::uint64_t>(cloud.size()));
  for (double v : cloud.coords()) put_le<std::uint64_t>(buf, std::bit_cast<std::uint64_t>(v));
  return buf;
}

PointCloud parse_binary(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 16) throw ParseError("truncated header", 0);
  if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) throw ParseError("bad magic", 0);
  const auto dim = get_le<std::uint32_t>(bytes.data() + 4);
  const auto n = get_le<std::uint64_t>(bytes.data() + 8);
  if (dim == 0 || n == 0) throw ParseError("empty point cloud", 0);
  const std::uint64_t count = n * dim;
  if (count / dim != n || bytes.size() - 16 < count * 8 || (count * 8) / 8 != count) {
    throw ParseError("truncated payload", 0);
  }
  if (bytes.size() - 16 != count * 8) throw ParseError("trailing bytes after payload", 0);
  std::vector<double> coords(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    coords[k] = std::bit_cast<double>(get_le<std::uint64_t>(bytes.data() + 16 + 8 * k));
  }
  return PointCloud(dim, std::move(coords));
}

PointCloud load_binary(const std::filesystem::path& path) {
  const std::string data = read_file(path);
  return parse_binary({reinterpret_cast<const std::uint8_t*>(data.data()), data.size()});
}

void save_binary(const PointCloud& cloud, const std::filesystem::path& path) {
  const auto buf = encode_binary(cloud);
  write_file(path, reinterpret_cast<const char*>(buf.data()), buf.size());
}

PointCloud load_points(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".pcb" || ext == ".bin") return load_binary(path);
  return load_csv(path);
}

}  // namespace pcb
