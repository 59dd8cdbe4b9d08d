#include "ftreg/tensor_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ftreg {

namespace {

constexpr const char* kMagic = "FTRT1";
constexpr const char* kLayout = "mode0-fastest";

void byteswap_doubles(std::vector<double>& values) {
  for (double& v : values) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    bits = __builtin_bswap64(bits);
    std::memcpy(&v, &bits, sizeof(bits));
  }
}

// Payload bytes are little-endian on disk regardless of host order.
void to_little_endian(std::vector<double>& values) {
  if constexpr (std::endian::native == std::endian::big) byteswap_doubles(values);
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> parse_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        current += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else if (c == '\r') {
      // tolerated; RFC-4180 line endings are handled by the caller
    } else {
      current += c;
    }
  }
  fields.push_back(std::move(current));
  return fields;
}

}  // namespace

void atomic_write(const std::filesystem::path& path,
                  const std::function<void(std::ostream&)>& writer) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    writer(out);
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error("write failed for " + path.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

void write_tensor_file(const std::filesystem::path& path, const DenseTensor& tensor) {
  nlohmann::json header;
  header["magic"] = kMagic;
  header["dims"] = tensor.dims();
  header["dtype"] = "f64";
  header["layout"] = kLayout;
  atomic_write(path, [&](std::ostream& out) {
    out << header.dump() << '\n';
    std::vector<double> payload = tensor.values();
    to_little_endian(payload);
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size() * sizeof(double)));
  });
}

DenseTensor read_tensor_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open tensor file " + path.string());
  std::string header_line;
  if (!std::getline(in, header_line)) {
    throw std::runtime_error("tensor file " + path.string() + " has no header");
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_line);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("tensor file " + path.string() + ": bad header: " + e.what());
  }
  if (!header.contains("magic") || header["magic"] != kMagic) {
    throw std::runtime_error("tensor file " + path.string() + ": missing FTRT1 magic");
  }
  if (!header.contains("layout") || header["layout"] != kLayout) {
    throw std::runtime_error("tensor file " + path.string() + ": unsupported layout");
  }
  if (!header.contains("dtype") || header["dtype"] != "f64") {
    throw std::runtime_error("tensor file " + path.string() + ": unsupported dtype");
  }
  if (!header.contains("dims") || !header["dims"].is_array()) {
    throw std::runtime_error("tensor file " + path.string() + ": missing dims");
  }
  std::vector<std::size_t> dims = header["dims"].get<std::vector<std::size_t>>();
  std::size_t total = 1;
  for (std::size_t q : dims) total *= q;

  std::vector<double> payload(total);
  in.read(reinterpret_cast<char*>(payload.data()),
          static_cast<std::streamsize>(total * sizeof(double)));
  if (static_cast<std::size_t>(in.gcount()) != total * sizeof(double)) {
    throw std::runtime_error("tensor file " + path.string() + ": truncated payload");
  }
  char extra;
  if (in.read(&extra, 1)) {
    throw std::runtime_error("tensor file " + path.string() + ": trailing bytes");
  }
  to_little_endian(payload);
  return DenseTensor(std::move(dims), std::move(payload));
}

std::string format_double(double v) {
  std::ostringstream ss;
  ss.precision(17);
  ss << v;
  return ss.str();
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  if (header.empty()) throw std::invalid_argument("csv header row is mandatory");
  atomic_write(path, [&](std::ostream& out) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (i) out << ',';
      out << csv_escape(header[i]);
    }
    out << "\r\n";
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out << ',';
        out << csv_escape(row[i]);
      }
      out << "\r\n";
    }
  });
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path,
                                               std::vector<std::string>* header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open csv file " + path.string());
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error("csv file " + path.string() + " is empty (header required)");
  }
  if (header) *header = parse_csv_line(line);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    rows.push_back(parse_csv_line(line));
  }
  return rows;
}

void write_vector_csv(const std::filesystem::path& path, const std::string& name,
                      const Eigen::VectorXd& v) {
  std::vector<std::vector<std::string>> rows;
  rows.reserve(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    rows.push_back({std::to_string(i + 1), format_double(v(i))});
  }
  write_csv(path, {"index", name}, rows);
}

Eigen::VectorXd read_vector_csv(const std::filesystem::path& path) {
  const auto rows = read_csv(path);
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() < 2) {
      throw std::runtime_error("vector csv " + path.string() + ": need (index, value)");
    }
    out(static_cast<Eigen::Index>(i)) = std::stod(rows[i][1]);
  }
  return out;
}

void write_grid_csv(const std::filesystem::path& path, const Grid& grid) {
  std::vector<std::vector<std::string>> rows;
  rows.push_back({"0", format_double(grid.t_lo())});
  for (std::size_t j = 0; j < grid.size(); ++j) {
    rows.push_back({std::to_string(j + 1), format_double(grid.point(j))});
  }
  rows.push_back({std::to_string(grid.size() + 1), format_double(grid.t_hi())});
  write_csv(path, {"index", "t"}, rows);
}

Grid read_grid_csv(const std::filesystem::path& path) {
  const auto rows = read_csv(path);
  if (rows.size() < 3) {
    throw std::runtime_error("grid csv " + path.string() +
                             ": need endpoints plus at least one point");
  }
  std::vector<double> t;
  t.reserve(rows.size());
  for (const auto& row : rows) {
    if (row.size() < 2) throw std::runtime_error("grid csv: need (index, t) rows");
    t.push_back(std::stod(row[1]));
  }
  std::vector<double> points(t.begin() + 1, t.end() - 1);
  return Grid(std::move(points), t.front(), t.back());
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path,
                                std::vector<std::string>* header) {
  std::vector<std::string> head;
  const auto rows = read_csv(path, &head);
  if (header) *header = head;
  if (rows.empty()) throw std::runtime_error("matrix csv " + path.string() + " has no rows");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(head.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != head.size()) {
      throw std::runtime_error("matrix csv " + path.string() + ": ragged row");
    }
    for (std::size_t j = 0; j < head.size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          std::stod(rows[i][j]);
    }
  }
  return out;
}

}  // namespace ftreg
