#include "evstereo/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "evstereo/disparity.hpp"

namespace evstereo {

namespace {

std::ifstream open_in(const std::filesystem::path& path, bool binary = false) {
  std::ifstream is(path, binary ? std::ios::binary : std::ios::in);
  if (!is) throw Error("cannot open " + path.string());
  return is;
}

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw Error("cannot write " + path.string());
  return os;
}

bool skip_line(const std::string& line) {
  const auto pos = line.find_first_not_of(" \t\r");
  return pos == std::string::npos || line[pos] == '#';
}

// Shortest representation that parses back to the same double.
std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::vector<double> parse_numbers(const std::string& line, std::size_t line_no) {
  std::vector<double> out;
  const char* p = line.data();
  const char* end = p + line.size();
  while (p < end) {
    while (p < end && (*p == ' ' || *p == '\t' || *p == ',' || *p == '\r')) ++p;
    if (p == end) break;
    double v = 0.0;
    if (*p == '+') ++p;
    const auto res = std::from_chars(p, end, v);
    if (res.ec != std::errc()) {
      throw Error("line " + std::to_string(line_no) + ": cannot parse number");
    }
    out.push_back(v);
    p = res.ptr;
  }
  return out;
}

template <typename T>
void put_le(std::ostream& os, T value) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(value);
    std::reverse(bytes.begin(), bytes.end());
    os.write(bytes.data(), bytes.size());
  } else {
    os.write(reinterpret_cast<const char*>(&value), sizeof(T));
  }
}

template <typename T>
T get_le(std::istream& is) {
  std::array<char, sizeof(T)> bytes;
  if (!is.read(bytes.data(), bytes.size())) throw Error("dump: truncated data");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  return std::bit_cast<T>(bytes);
}

// Reads the next whitespace-delimited PGM header token, collecting comments.
std::string pgm_token(std::istream& is, std::vector<std::string>& comments) {
  std::string token;
  char c = 0;
  while (is.get(c)) {
    if (c == '#') {
      std::string comment;
      std::getline(is, comment);
      comments.push_back(comment);
      if (!token.empty()) break;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(c);
  }
  return token;
}

}  // namespace

EventBatch read_events(std::istream& is) {
  EventBatch events;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    const auto v = parse_numbers(line, line_no);
    if (v.size() != 4) {
      throw Error("events line " + std::to_string(line_no) + ": expected `t x y p`");
    }
    Event e;
    e.t = v[0];
    e.x = static_cast<int>(v[1]);
    e.y = static_cast<int>(v[2]);
    if (e.x != v[1] || e.y != v[2]) {
      throw Error("events line " + std::to_string(line_no) + ": pixel coordinates must be integers");
    }
    if (v[3] == 0.0 || v[3] == -1.0) {
      e.p = -1;
    } else if (v[3] == 1.0) {
      e.p = 1;
    } else {
      throw Error("events line " + std::to_string(line_no) + ": polarity must be -1, 0 or 1");
    }
    events.push_back(e);
  }
  return events;
}

EventBatch read_events(const std::filesystem::path& path) {
  auto is = open_in(path);
  return read_events(is);
}

void write_events(std::ostream& os, std::span<const Event> events) {
  os << "# t x y p\n";
  for (const Event& e : events) {
    os << format_double(e.t) << ' ' << e.x << ' ' << e.y << ' ' << e.p << '\n';
  }
}

void write_events(const std::filesystem::path& path, std::span<const Event> events) {
  auto os = open_out(path);
  write_events(os, events);
}

CameraRig read_calibration(std::istream& is) {
  std::map<std::string, double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    for (char& c : line) {
      if (c == ':' || c == '=') c = ' ';
    }
    std::istringstream ls(line);
    std::string key;
    std::string value;
    if (!(ls >> key >> value)) {
      throw Error("calibration line " + std::to_string(line_no) + ": expected `key value`");
    }
    values[key] = parse_numbers(value, line_no).at(0);
  }
  auto need = [&](const char* key) {
    const auto it = values.find(key);
    if (it == values.end()) throw Error(std::string("calibration: missing key '") + key + "'");
    return it->second;
  };
  CameraRig rig;
  rig.f = need("f");
  rig.cx = need("cx");
  rig.cy = need("cy");
  rig.baseline = need("baseline");
  rig.width = static_cast<int>(need("width"));
  rig.height = static_cast<int>(need("height"));
  rig.validate();
  return rig;
}

CameraRig read_calibration(const std::filesystem::path& path) {
  auto is = open_in(path);
  return read_calibration(is);
}

void write_calibration(std::ostream& os, const CameraRig& rig) {
  os << "f " << format_double(rig.f) << '\n'
     << "cx " << format_double(rig.cx) << '\n'
     << "cy " << format_double(rig.cy) << '\n'
     << "baseline " << format_double(rig.baseline) << '\n'
     << "width " << rig.width << '\n'
     << "height " << rig.height << '\n';
}

void write_calibration(const std::filesystem::path& path, const CameraRig& rig) {
  auto os = open_out(path);
  write_calibration(os, rig);
}

std::vector<VelocitySample> read_velocity(std::istream& is) {
  std::vector<VelocitySample> samples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    const auto v = parse_numbers(line, line_no);
    if (v.size() != 7) {
      throw Error("velocity line " + std::to_string(line_no) + ": expected `t vx vy vz wx wy wz`");
    }
    VelocitySample s;
    s.t = v[0];
    s.vel.linear = Eigen::Vector3d(v[1], v[2], v[3]);
    s.vel.angular = Eigen::Vector3d(v[4], v[5], v[6]);
    if (!s.vel.is_finite()) {
      throw Error("velocity line " + std::to_string(line_no) + ": non-finite value");
    }
    samples.push_back(s);
  }
  return samples;
}

std::vector<VelocitySample> read_velocity(const std::filesystem::path& path) {
  auto is = open_in(path);
  return read_velocity(is);
}

void write_velocity(std::ostream& os, std::span<const VelocitySample> samples) {
  os << "# t vx vy vz wx wy wz\n";
  for (const VelocitySample& s : samples) {
    os << format_double(s.t);
    for (int i = 0; i < 3; ++i) os << ' ' << format_double(s.vel.linear[i]);
    for (int i = 0; i < 3; ++i) os << ' ' << format_double(s.vel.angular[i]);
    os << '\n';
  }
}

void write_velocity(const std::filesystem::path& path, std::span<const VelocitySample> samples) {
  auto os = open_out(path);
  write_velocity(os, samples);
}

void write_pgm16(std::ostream& os, const Image<std::uint16_t>& image, const std::string& comment) {
  os << "P5\n";
  if (!comment.empty()) os << "# " << comment << '\n';
  os << image.width() << ' ' << image.height() << "\n65535\n";
  for (std::uint16_t v : image.data()) {
    const char bytes[2] = {static_cast<char>(v >> 8), static_cast<char>(v & 0xff)};
    os.write(bytes, 2);
  }
}

Image<std::uint16_t> read_pgm16(std::istream& is, double* scale) {
  std::vector<std::string> comments;
  if (pgm_token(is, comments) != "P5") throw Error("pgm: expected binary P5 header");
  const int width = std::stoi(pgm_token(is, comments));
  const int height = std::stoi(pgm_token(is, comments));
  const int maxval = std::stoi(pgm_token(is, comments));
  if (maxval != 65535 || width <= 0 || height <= 0) {
    throw Error("pgm: only 16-bit images with maxval 65535 are supported");
  }
  if (scale) {
    *scale = 1.0;
    for (const std::string& c : comments) {
      std::istringstream cs(c);
      std::string key;
      double value = 0.0;
      if (cs >> key >> value && key == "disparity_scale" && value > 0.0) *scale = value;
    }
  }
  Image<std::uint16_t> image(width, height);
  for (std::uint16_t& v : image.data()) {
    unsigned char bytes[2];
    if (!is.read(reinterpret_cast<char*>(bytes), 2)) throw Error("pgm: truncated data");
    v = static_cast<std::uint16_t>((bytes[0] << 8) | bytes[1]);
  }
  return image;
}

void write_disparity_pgm(const std::filesystem::path& path, const DisparityMap& map, bool sparse) {
  Image<std::uint16_t> image(map.width(), map.height(), kInvalidDisparity);
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      const bool keep = sparse ? map.reported(x, y) : map.valid(x, y) != 0;
      if (keep) image(x, y) = static_cast<std::uint16_t>(map.d_hat(x, y));
    }
  }
  auto os = open_out(path, true);
  write_pgm16(os, image);
}

void write_ground_truth_pgm(const std::filesystem::path& path, const Image<double>& disparity) {
  constexpr double kScale = 256.0;
  Image<std::uint16_t> image(disparity.width(), disparity.height(), kInvalidDisparity);
  for (int y = 0; y < disparity.height(); ++y) {
    for (int x = 0; x < disparity.width(); ++x) {
      const double d = disparity(x, y);
      if (std::isfinite(d) && d >= 0.0) {
        image(x, y) = static_cast<std::uint16_t>(std::min(std::lround(d * kScale), 65534L));
      }
    }
  }
  auto os = open_out(path, true);
  write_pgm16(os, image, "disparity_scale 256");
}

Image<double> read_ground_truth_pgm(const std::filesystem::path& path) {
  auto is = open_in(path, true);
  double scale = 1.0;
  const auto raw = read_pgm16(is, &scale);
  Image<double> out(raw.width(), raw.height(), std::nan(""));
  for (int y = 0; y < raw.height(); ++y) {
    for (int x = 0; x < raw.width(); ++x) {
      if (raw(x, y) != kInvalidDisparity) out(x, y) = raw(x, y) / scale;
    }
  }
  return out;
}

void write_sparse_csv(std::ostream& os, const DisparityMap& map, const CostVolume& costs) {
  os << "x,y,d,cost_ratio\n";
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      if (!map.reported(x, y)) continue;
      os << x << ',' << y << ',' << map.d_hat(x, y) << ','
         << format_double(match_ratio(map, costs, x, y)) << '\n';
    }
  }
}

void write_volume_dump(std::ostream& os, const EventDisparityVolume& volume) {
  const auto& v = volume.values;
  os << v.width() << ' ' << v.height() << ' ' << v.num_disparities() << ' ' << v.d_min() << ' '
     << format_double(volume.t_ref) << '\n';
  os.write(reinterpret_cast<const char*>(v.data().data()),
           static_cast<std::streamsize>(v.data().size()));
}

EventDisparityVolume read_volume_dump(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw Error("volume dump: missing header");
  std::istringstream hs(header);
  int width = 0, height = 0, num = 0, d_min = 0;
  std::string t_ref;
  if (!(hs >> width >> height >> num >> d_min >> t_ref) || width <= 0 || height <= 0 || num <= 0) {
    throw Error("volume dump: malformed header");
  }
  EventDisparityVolume volume;
  volume.t_ref = parse_numbers(t_ref, 1).at(0);
  volume.values = Volume<std::int8_t>(width, height, d_min, d_min + num - 1);
  auto data = volume.values.data();
  if (!is.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()))) {
    throw Error("volume dump: truncated data");
  }
  return volume;
}

void write_cost_dump(std::ostream& os, const Volume<float>& cost) {
  os << cost.width() << ' ' << cost.height() << ' ' << cost.num_disparities() << ' '
     << cost.d_min() << '\n';
  for (float v : cost.data()) put_le(os, v);
}

Volume<float> read_cost_dump(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw Error("cost dump: missing header");
  std::istringstream hs(header);
  int width = 0, height = 0, num = 0, d_min = 0;
  if (!(hs >> width >> height >> num >> d_min) || width <= 0 || height <= 0 || num <= 0) {
    throw Error("cost dump: malformed header");
  }
  Volume<float> cost(width, height, d_min, d_min + num - 1);
  for (float& v : cost.data()) v = get_le<float>(is);
  return cost;
}

}  // namespace evstereo
