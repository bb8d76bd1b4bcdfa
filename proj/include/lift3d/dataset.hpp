#pragma once

#include <string>
#include <vector>

#include "lift3d/geometry.hpp"

namespace lift3d {

struct DatasetSample {
  std::string id;
  Shape3D shape;
};

// Line-oriented text file of 3D landmark sets sharing one landmark count.
struct DatasetFile {
  Eigen::Index n = 0;
  std::string unit = "mm";
  std::vector<DatasetSample> samples;

  std::vector<Shape3D> shapes() const;
};

std::string serialize_dataset(const DatasetFile& dataset);
// Throws kParseError (with line numbers) on malformed text and
// kInvariantViolation naming the sample that breaks an invariant.
DatasetFile parse_dataset(const std::string& text, const std::string& source = "dataset");
void save_dataset(const DatasetFile& dataset, const std::string& path);
DatasetFile load_dataset(const std::string& path);

// One image's 2D landmarks; a landmark line may read "missing".
std::string serialize_landmarks2d(const Landmarks2D& landmarks);
Landmarks2D parse_landmarks2d(const std::string& text,
                              const std::string& source = "landmarks");
void save_landmarks2d(const Landmarks2D& landmarks, const std::string& path);
Landmarks2D load_landmarks2d(const std::string& path);

// Wavefront OBJ with one vertex per landmark. Faces are given as 0-based
// landmark indices; an empty list writes points only.
std::string mesh_obj(const Shape3D& shape, const std::vector<std::vector<int>>& faces);

// Quads over a row-major rows x cols landmark grid.
std::vector<std::vector<int>> grid_faces(int rows, int cols);

}  // namespace lift3d
