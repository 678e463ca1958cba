#include "refocus/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "refocus/error.hpp"

namespace refocus {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void fail(const fs::path& path, std::size_t line, const std::string& what) {
  throw ParseError(path.string() + ":" + std::to_string(line) + ": " + what);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && first != last;
}

void append_float(std::string& out, float v) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  out.append(buf.data(), ptr);
}

void write_file(const fs::path& path, std::string_view bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(path.string() + ": cannot open for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(path.string() + ": write failed");
}

template <typename U>
void put_le(std::string& out, U value) {
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xFFu));
  }
}

template <typename U>
U get_le(const unsigned char* p) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(p[i]) << (8 * i);
  return v;
}

}  // namespace

PointCloud load_xyz(const fs::path& path) {
  const std::string text = read_file(path);
  const auto lines = split_lines(text);
  std::vector<Point> pts;
  pts.reserve(lines.size());
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    std::string_view line = lines[ln];
    if (line.empty()) {
      if (ln + 1 == lines.size()) break;
      fail(path, ln + 1, "empty line");
    }
    std::array<float, 3> v{};
    std::size_t field = 0;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t sp = line.find(' ', pos);
      if (sp == std::string_view::npos) sp = line.size();
      if (field >= 3) fail(path, ln + 1, "expected three coordinates");
      if (!parse_number(line.substr(pos, sp - pos), v[field])) {
        fail(path, ln + 1, "malformed coordinate '" + std::string(line.substr(pos, sp - pos)) + "'");
      }
      ++field;
      pos = sp + 1;
    }
    if (field != 3) fail(path, ln + 1, "expected three coordinates");
    pts.push_back({v[0], v[1], v[2]});
  }
  if (pts.empty()) fail(path, 1, "no points");
  try {
    return PointCloud(std::move(pts));
  } catch (const InvalidInput& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_xyz(const fs::path& path, const PointCloud& cloud) {
  std::string out;
  out.reserve(cloud.size() * 36);
  for (const auto& p : cloud) {
    append_float(out, p.x);
    out.push_back(' ');
    append_float(out, p.y);
    out.push_back(' ');
    append_float(out, p.z);
    out.push_back('\n');
  }
  write_file(path, out);
}

PointCloud load_binary(const fs::path& path) {
  const std::string bytes = read_file(path);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  if (bytes.size() < 9 || std::memcmp(p, "RFPC", 4) != 0) fail(path, 0, "missing RFPC magic");
  if (p[4] != 1) fail(path, 0, "unsupported RFPC version " + std::to_string(p[4]));
  const auto n = get_le<std::uint32_t>(p + 5);
  if (bytes.size() != 9 + std::size_t{12} * n) fail(path, 0, "truncated RFPC payload");
  std::vector<Point> pts(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const unsigned char* q = p + 9 + std::size_t{12} * i;
    pts[i] = {std::bit_cast<float>(get_le<std::uint32_t>(q)),
              std::bit_cast<float>(get_le<std::uint32_t>(q + 4)),
              std::bit_cast<float>(get_le<std::uint32_t>(q + 8))};
  }
  try {
    return PointCloud(std::move(pts));
  } catch (const InvalidInput& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_binary(const fs::path& path, const PointCloud& cloud) {
  std::string out = "RFPC";
  out.push_back(1);
  put_le(out, static_cast<std::uint32_t>(cloud.size()));
  for (const auto& pt : cloud) {
    put_le(out, std::bit_cast<std::uint32_t>(pt.x));
    put_le(out, std::bit_cast<std::uint32_t>(pt.y));
    put_le(out, std::bit_cast<std::uint32_t>(pt.z));
  }
  write_file(path, out);
}

Dataset load_dataset(const fs::path& dir, Split split) {
  const fs::path manifest = dir / "manifest.csv";
  const std::string manifest_text = read_file(manifest);
  const auto lines = split_lines(manifest_text);
  if (lines.empty() || lines[0] != "file,label") fail(manifest, 1, "expected header 'file,label'");

  Dataset ds;
  ds.split = split;
  const fs::path classes = dir / "classes.txt";
  const bool has_classes = fs::exists(classes);
  if (has_classes) {
    const std::string class_text = read_file(classes);
    for (auto name : split_lines(class_text)) {
      if (!name.empty()) ds.class_names.emplace_back(name);
    }
  }

  std::size_t max_label = 0;
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    std::string_view line = lines[ln];
    if (line.empty()) {
      if (ln + 1 == lines.size()) break;
      fail(manifest, ln + 1, "empty row");
    }
    const auto comma = line.find(',');
    if (comma == std::string_view::npos || comma == 0) fail(manifest, ln + 1, "missing label");
    std::size_t label = 0;
    if (!parse_number(line.substr(comma + 1), label)) {
      fail(manifest, ln + 1, "malformed label '" + std::string(line.substr(comma + 1)) + "'");
    }
    if (has_classes && label >= ds.class_names.size()) {
      fail(manifest, ln + 1, "label " + std::to_string(label) + " out of range");
    }
    const std::string file(line.substr(0, comma));
    ds.samples.push_back({load_xyz(dir / file), label, file});
    max_label = std::max(max_label, label);
  }
  if (!has_classes) {
    for (std::size_t c = 0; c <= max_label && !ds.samples.empty(); ++c) {
      ds.class_names.push_back("class_" + std::to_string(c));
    }
  }
  ds.validate();
  return ds;
}

void save_dataset(const fs::path& dir, const Dataset& dataset) {
  fs::create_directories(dir);
  std::string manifest = "file,label\n";
  for (const auto& s : dataset.samples) {
    if (s.id.empty() || s.id.find_first_of(",/\n") != std::string::npos) {
      throw InvalidArgument("sample id '" + s.id + "' is not a valid file name");
    }
    save_xyz(dir / s.id, s.cloud);
    manifest += s.id + "," + std::to_string(s.label) + "\n";
  }
  write_file(dir / "manifest.csv", manifest);
  std::string classes;
  for (const auto& c : dataset.class_names) classes += c + "\n";
  write_file(dir / "classes.txt", classes);
}

void save_flags(const fs::path& dir, const Dataset& dataset,
                const std::vector<std::vector<bool>>& flags) {
  if (flags.size() != dataset.size()) throw InvalidArgument("one flag vector per sample required");
  std::string out = "file,point_index\n";
  for (std::size_t i = 0; i < flags.size(); ++i) {
    for (std::size_t j = 0; j < flags[i].size(); ++j) {
      if (flags[i][j]) out += dataset.samples[i].id + "," + std::to_string(j) + "\n";
    }
  }
  write_file(dir / "flags.csv", out);
}

std::vector<std::vector<bool>> load_flags(const fs::path& dir, const Dataset& dataset) {
  const fs::path path = dir / "flags.csv";
  const std::string text = read_file(path);
  const auto lines = split_lines(text);
  if (lines.empty() || lines[0] != "file,point_index") {
    fail(path, 1, "expected header 'file,point_index'");
  }
  std::map<std::string, std::size_t, std::less<>> by_id;
  std::vector<std::vector<bool>> flags(dataset.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    by_id.emplace(dataset.samples[i].id, i);
    flags[i].assign(dataset.samples[i].cloud.size(), false);
  }
  for (std::size_t ln = 1; ln < lines.size(); ++ln) {
    std::string_view line = lines[ln];
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string_view::npos) fail(path, ln + 1, "missing point index");
    auto it = by_id.find(line.substr(0, comma));
    if (it == by_id.end()) fail(path, ln + 1, "unknown file '" + std::string(line.substr(0, comma)) + "'");
    std::size_t idx = 0;
    if (!parse_number(line.substr(comma + 1), idx) || idx >= flags[it->second].size()) {
      fail(path, ln + 1, "bad point index");
    }
    flags[it->second][idx] = true;
  }
  return flags;
}

}  // namespace refocus
