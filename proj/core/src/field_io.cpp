#include "xhodge/field_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "xhodge/operators.hpp"
#include "xhodge/report.hpp"

namespace xhodge {
namespace {

static_assert(std::endian::native == std::endian::little, "field files assume a little-endian host");

constexpr const char* kMagic = "XHODGE1";

void write_header(std::ostream& os, const FieldFileHeader& h) {
  os << kMagic << '\n'
     << "kind " << h.kind << '\n'
     << "n " << h.n << '\n'
     << "L " << format_number(h.L) << '\n'
     << "obstacle " << h.obstacle << '\n'
     << "scalar f64\n"
     << "endian little\n"
     << "payload " << h.payload << '\n'
     << "end\n";
}

[[noreturn]] void bad(const std::string& path, const std::string& field, const std::string& what) {
  throw ConfigError(path + ": malformed header field '" + field + "': " + what);
}

double parse_number(const std::string& path, const char* field, const std::string& text, bool integer) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = integer ? double(std::stoll(text, &used)) : std::stod(text, &used);
  } catch (const std::logic_error&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) bad(path, field, std::string("'") + text + "' is not " + (integer ? "an integer" : "a number"));
  return v;
}

FieldFileHeader parse_header(std::istream& is, const std::string& path) {
  std::string line;
  if (!std::getline(is, line) || line != kMagic) bad(path, "magic", "expected " + std::string(kMagic));
  FieldFileHeader h;
  auto next = [&](const char* key) {
    if (!std::getline(is, line)) bad(path, key, "missing");
    const std::string prefix = std::string(key) + " ";
    if (line.rfind(prefix, 0) != 0) bad(path, key, "expected '" + prefix + "...', got '" + line + "'");
    return line.substr(prefix.size());
  };
  h.kind = next("kind");
  if (h.kind != "cell" && h.kind != "face" && h.kind != "edge" && h.kind != "node" && h.kind != "classification")
    bad(path, "kind", "unknown kind '" + h.kind + "'");
  h.n = int(parse_number(path, "n", next("n"), true));
  h.L = parse_number(path, "L", next("L"), false);
  h.obstacle = next("obstacle");
  if (next("scalar") != "f64") bad(path, "scalar", "only f64 is supported");
  if (next("endian") != "little") bad(path, "endian", "only little is supported");
  const double payload = parse_number(path, "payload", next("payload"), true);
  if (payload < 0) bad(path, "payload", "negative");
  h.payload = std::size_t(payload);
  if (!std::getline(is, line) || line != "end") bad(path, "end", "missing terminator");
  return h;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path + " for writing");
  return f;
}

template <Entity E>
FieldFileHeader header_for(const Field<E>& f) {
  FieldFileHeader h;
  h.kind = entity_name(E);
  h.n = f.topo().n();
  h.L = f.topo().L();
  h.obstacle = to_descriptor(f.topo().spec().obstacle);
  h.payload = f.topo().active_count(E);
  return h;
}

}  // namespace

DomainSpec FieldFileHeader::domain() const { return {L, n, parse_obstacle(obstacle)}; }

const char* entity_name(Entity e) {
  switch (e) {
    case Entity::Cell:
      return "cell";
    case Entity::Face:
      return "face";
    case Entity::Edge:
      return "edge";
    case Entity::Node:
      return "node";
  }
  return "?";
}

template <Entity E>
void write_field(const std::string& path, const Field<E>& f) {
  std::ofstream os = open_out(path);
  write_header(os, header_for(f));
  const auto kinds = f.topo().kinds(E);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (kinds[i] == EntityKind::Inactive) continue;
    const double v = f[i];
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
  }
  if (!os) throw IoError("write failed for " + path);
}

void write_classification(const std::string& path, const GridTopology& topo) {
  std::ofstream os = open_out(path);
  FieldFileHeader h;
  h.kind = "classification";
  h.n = topo.n();
  h.L = topo.L();
  h.obstacle = to_descriptor(topo.spec().obstacle);
  h.payload = topo.size(Entity::Cell);
  write_header(os, h);
  for (std::size_t c = 0; c < h.payload; ++c) {
    const double v = topo.fluid(c) ? 1.0 : 0.0;
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
  }
  if (!os) throw IoError("write failed for " + path);
}

FieldFileHeader read_header(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  return parse_header(is, path);
}

template <Entity E>
Field<E> read_field(const std::string& path, TopologyPtr topo) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  const FieldFileHeader h = parse_header(is, path);
  if (h.kind != entity_name(E)) bad(path, "kind", "expected " + std::string(entity_name(E)) + ", got " + h.kind);
  TopologyPtr file_topo = build_domain(h.domain());
  if (!topo) {
    topo = file_topo;
  } else if (!same_grid(*topo, *file_topo)) {
    bad(path, "obstacle/n/L", "file grid differs from the requested grid");
  }
  if (h.payload != topo->active_count(E))
    bad(path, "payload", "length " + std::to_string(h.payload) + " does not match " +
                             std::to_string(topo->active_count(E)) + " active entities");
  Field<E> f(topo);
  const auto kinds = topo->kinds(E);
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (kinds[i] == EntityKind::Inactive) continue;
    double v;
    if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw IoError(path + ": payload truncated");
    f[i] = v;
  }
  if (is.peek() != std::char_traits<char>::eof()) throw IoError(path + ": trailing bytes after payload");
  return f;
}

template void write_field(const std::string&, const Field<Entity::Cell>&);
template void write_field(const std::string&, const Field<Entity::Face>&);
template void write_field(const std::string&, const Field<Entity::Edge>&);
template void write_field(const std::string&, const Field<Entity::Node>&);
template Field<Entity::Cell> read_field(const std::string&, TopologyPtr);
template Field<Entity::Face> read_field(const std::string&, TopologyPtr);
template Field<Entity::Edge> read_field(const std::string&, TopologyPtr);
template Field<Entity::Node> read_field(const std::string&, TopologyPtr);

namespace {

void vtk_header(std::ostream& os, const GridTopology& t, const std::string& title) {
  const int n = t.n();
  const double o = -t.L() + 0.5 * t.h();
  os << "# vtk DataFile Version 3.0\n"
     << title << "\n"
     << "ASCII\n"
     << "DATASET STRUCTURED_POINTS\n"
     << "DIMENSIONS " << n << ' ' << n << ' ' << n << '\n'
     << "ORIGIN " << format_number(o) << ' ' << format_number(o) << ' ' << format_number(o) << '\n'
     << "SPACING " << format_number(t.h()) << ' ' << format_number(t.h()) << ' ' << format_number(t.h()) << '\n'
     << "POINT_DATA " << std::size_t(n) * n * n << '\n';
}

}  // namespace

void export_vtk(const FaceField& f, const std::string& path, const std::string& name) {
  std::ofstream os = open_out(path);
  const GridTopology& t = f.topo();
  vtk_header(os, t, "xhodge face field " + name);
  os << "VECTORS " << name << " double\n";
  for (std::size_t c = 0; c < t.size(Entity::Cell); ++c) {
    const Vec3 v = t.fluid(c) ? cell_average(f, c) : Vec3{0.0, 0.0, 0.0};
    os << format_number(v[0]) << ' ' << format_number(v[1]) << ' ' << format_number(v[2]) << '\n';
  }
  if (!os) throw IoError("write failed for " + path);
}

void export_vtk(const ScalarField& f, const std::string& path, const std::string& name) {
  std::ofstream os = open_out(path);
  const GridTopology& t = f.topo();
  vtk_header(os, t, "xhodge cell field " + name);
  os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
  for (std::size_t c = 0; c < t.size(Entity::Cell); ++c) os << format_number(f[c]) << '\n';
  if (!os) throw IoError("write failed for " + path);
}

VtkSummary read_vtk_summary(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path);
  VtkSummary s;
  std::string line;
  int components = 0;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "DIMENSIONS") {
      ls >> s.nx >> s.ny >> s.nz;
    } else if (key == "ORIGIN") {
      ls >> s.origin[0] >> s.origin[1] >> s.origin[2];
    } else if (key == "SPACING") {
      ls >> s.spacing[0] >> s.spacing[1] >> s.spacing[2];
    } else if (key == "VECTORS") {
      components = 3;
      break;
    } else if (key == "LOOKUP_TABLE") {
      components = 1;
      break;
    }
  }
  if (components == 0) throw IoError(path + ": no data section");
  std::vector<double> v(static_cast<std::size_t>(components));
  while (true) {
    for (int i = 0; i < components; ++i)
      if (!(is >> v[std::size_t(i)])) goto done;
    double m2 = 0.0;
    for (double x : v) m2 += x * x;
    s.max_magnitude = std::max(s.max_magnitude, std::sqrt(m2));
    ++s.points;
  }
done:
  return s;
}

}  // namespace xhodge
