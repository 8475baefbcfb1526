#pragma once

// Field files: a short text header followed by the active entries of the field as
// little-endian IEEE doubles, in flat-layout order.
//
//   XHODGE1
//   kind face
//   n 32
//   L 4
//   obstacle ball(0,0,0;1)
//   scalar f64
//   endian little
//   payload 97344
//   end
//   <payload bytes>
//
// The kind "classification" stores all n^3 cells (1 fluid, 0 obstacle).

#include <string>
#include <variant>

#include "xhodge/fields.hpp"

namespace xhodge {

struct FieldFileHeader {
  std::string kind;  ///< cell | face | edge | node | classification
  int n = 0;
  double L = 0.0;
  std::string obstacle;
  std::size_t payload = 0;  ///< number of doubles

  DomainSpec domain() const;
};

const char* entity_name(Entity e);

template <Entity E>
void write_field(const std::string& path, const Field<E>& f);
void write_classification(const std::string& path, const GridTopology& topo);

FieldFileHeader read_header(const std::string& path);

/// Reads a field of the expected kind. When `topo` is null a topology is built from the
/// header; otherwise the header must describe the same grid.
template <Entity E>
Field<E> read_field(const std::string& path, TopologyPtr topo = nullptr);

/// legacy VTK STRUCTURED_POINTS, one point per cell center (n^3 points), obstacle cells zero.
void export_vtk(const FaceField& f, const std::string& path, const std::string& name = "field");
void export_vtk(const ScalarField& f, const std::string& path, const std::string& name = "field");

struct VtkSummary {
  int nx = 0, ny = 0, nz = 0;
  Vec3 origin{}, spacing{};
  std::size_t points = 0;
  double max_magnitude = 0.0;
};
VtkSummary read_vtk_summary(const std::string& path);

}  // namespace xhodge
