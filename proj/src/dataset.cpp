#include "lift3d/dataset.hpp"

#include <string>

#include "lift3d/error.hpp"
#include "lift3d/text_io.hpp"

namespace lift3d {

namespace {

constexpr const char* kDatasetMagic = "lift3d-dataset";
constexpr const char* kLandmarksMagic = "lift3d-landmarks2d";
constexpr long kVersion = 1;

void check_header(text::LineReader& in, const char* magic) {
  auto f = in.next("header");
  if (f.size() != 2 || f[0] != magic) in.error(std::string("expected '") + magic + " <version>'");
  if (in.parse_int(f[1]) != kVersion) {
    fail(ErrorCode::kFormatVersionMismatch,
         in.source() + ": version " + std::string(f[1]) + ", expected " +
             std::to_string(kVersion));
  }
}

void append_row(std::string& out, const char* tag, const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  out += tag;
  out += ' ';
  const Eigen::RowVectorXd copy = row;
  text::append_doubles(out, copy.data(), static_cast<std::size_t>(copy.size()));
  out += '\n';
}

}  // namespace

std::vector<Shape3D> DatasetFile::shapes() const {
  std::vector<Shape3D> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s.shape);
  return out;
}

std::string serialize_dataset(const DatasetFile& dataset) {
  std::string out = std::string(kDatasetMagic) + " " + std::to_string(kVersion) + "\n";
  out += "n " + std::to_string(dataset.n) + "\n";
  out += "unit " + (dataset.unit.empty() ? std::string("unitless") : dataset.unit) + "\n";
  out += "samples " + std::to_string(dataset.samples.size()) + "\n";
  for (const auto& s : dataset.samples) {
    out += "sample " + s.id + "\n";
    append_row(out, "x", s.shape.coords().row(0));
    append_row(out, "y", s.shape.coords().row(1));
    append_row(out, "z", s.shape.coords().row(2));
  }
  out += "end\n";
  return out;
}

DatasetFile parse_dataset(const std::string& text_in, const std::string& source) {
  text::LineReader in(text_in, source);
  check_header(in, kDatasetMagic);
  DatasetFile ds;
  auto f = in.next("n");
  in.expect(f, "n", 2);
  ds.n = in.parse_int(f[1]);
  if (ds.n < 3) in.error("n must be >= 3");
  f = in.next("unit");
  in.expect(f, "unit");
  ds.unit.clear();
  for (std::size_t k = 1; k < f.size(); ++k) {
    if (k > 1) ds.unit += ' ';
    ds.unit += f[k];
  }
  f = in.next("samples");
  in.expect(f, "samples", 2);
  const long count = in.parse_int(f[1]);
  if (count < 0) in.error("negative sample count");

  for (long i = 0; i < count; ++i) {
    f = in.next("sample");
    in.expect(f, "sample", 2);
    std::string id(f[1]);
    Eigen::Matrix3Xd coords;
    const char* tags[3] = {"x", "y", "z"};
    for (int r = 0; r < 3; ++r) {
      f = in.next(tags[r]);
      in.expect(f, tags[r]);
      const auto values = static_cast<Eigen::Index>(f.size()) - 1;
      if (values != ds.n) {
        fail(ErrorCode::kInvariantViolation,
             source + ":" + std::to_string(in.line_number()) + ": sample '" + id + "' has " +
                 std::to_string(values) + " landmarks, expected " + std::to_string(ds.n));
      }
      if (r == 0) coords.resize(3, ds.n);
      for (Eigen::Index j = 0; j < ds.n; ++j) coords(r, j) = in.parse_double(f[j + 1]);
    }
    Shape3D shape;
    try {
      shape = Shape3D(std::move(coords));
    } catch (const Error& e) {
      fail(ErrorCode::kInvariantViolation, source + ": sample '" + id + "': " + e.what());
    }
    ds.samples.push_back({std::move(id), std::move(shape)});
  }
  f = in.next("end");
  in.expect(f, "end", 1);
  return ds;
}

void save_dataset(const DatasetFile& dataset, const std::string& path) {
  text::write_file(path, serialize_dataset(dataset));
}

DatasetFile load_dataset(const std::string& path) {
  return parse_dataset(text::read_file(path), path);
}

std::string serialize_landmarks2d(const Landmarks2D& landmarks) {
  std::string out = std::string(kLandmarksMagic) + " " + std::to_string(kVersion) + "\n";
  out += "n " + std::to_string(landmarks.size()) + "\n";
  for (Eigen::Index j = 0; j < landmarks.size(); ++j) {
    if (!landmarks.observed()[j]) {
      out += "p missing\n";
      continue;
    }
    out += "p " + text::format_double(landmarks.coords()(0, j)) + " " +
           text::format_double(landmarks.coords()(1, j)) + "\n";
  }
  out += "end\n";
  return out;
}

Landmarks2D parse_landmarks2d(const std::string& text_in, const std::string& source) {
  text::LineReader in(text_in, source);
  check_header(in, kLandmarksMagic);
  auto f = in.next("n");
  in.expect(f, "n", 2);
  const long n = in.parse_int(f[1]);
  if (n < 3) in.error("n must be >= 3");
  Eigen::Matrix2Xd coords = Eigen::Matrix2Xd::Zero(2, n);
  std::vector<bool> observed(n, true);
  for (long j = 0; j < n; ++j) {
    f = in.next("p");
    in.expect(f, "p");
    if (f.size() == 2 && f[1] == "missing") {
      observed[j] = false;
      continue;
    }
    if (f.size() != 3) in.error("landmark line must be 'p <u> <v>' or 'p missing'");
    coords(0, j) = in.parse_double(f[1]);
    coords(1, j) = in.parse_double(f[2]);
  }
  f = in.next("end");
  in.expect(f, "end", 1);
  try {
    return Landmarks2D(std::move(coords), std::move(observed));
  } catch (const Error& e) {
    fail(ErrorCode::kInvariantViolation, source + ": " + e.what());
  }
}

void save_landmarks2d(const Landmarks2D& landmarks, const std::string& path) {
  text::write_file(path, serialize_landmarks2d(landmarks));
}

Landmarks2D load_landmarks2d(const std::string& path) {
  return parse_landmarks2d(text::read_file(path), path);
}

std::string mesh_obj(const Shape3D& shape, const std::vector<std::vector<int>>& faces) {
  std::string out = "# lift3d reconstruction, defined up to scale\n";
  for (Eigen::Index j = 0; j < shape.size(); ++j) {
    out += "v " + text::format_double(shape.coords()(0, j)) + " " +
           text::format_double(shape.coords()(1, j)) + " " +
           text::format_double(shape.coords()(2, j)) + "\n";
  }
  if (faces.empty()) {
    out += "p";
    for (Eigen::Index j = 0; j < shape.size(); ++j) out += " " + std::to_string(j + 1);
    out += "\n";
  }
  for (const auto& face : faces) {
    out += "f";
    for (int idx : face) {
      if (idx < 0 || idx >= shape.size()) {
        fail(ErrorCode::kInvalidSpec, "mesh face index out of range");
      }
      out += " " + std::to_string(idx + 1);
    }
    out += "\n";
  }
  return out;
}

std::vector<std::vector<int>> grid_faces(int rows, int cols) {
  std::vector<std::vector<int>> faces;
  for (int r = 0; r + 1 < rows; ++r) {
    for (int c = 0; c + 1 < cols; ++c) {
      const int a = r * cols + c;
      faces.push_back({a, a + 1, a + cols + 1, a + cols});
    }
  }
  return faces;
}

}  // namespace lift3d
