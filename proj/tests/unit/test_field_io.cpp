#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <cstring>
#include <random>
#include <unistd.h>

#include "oracles.hpp"
#include "xhodge/field_io.hpp"
#include "xhodge/operators.hpp"

using namespace xhodge;
using namespace xhodge::testing;
namespace fs = std::filesystem;

namespace {

class FieldIo : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("xhodge_io_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
    topo_ = build_domain({3.0, 12, Ball{{0.25, 0, 0}, 1.0}});
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const std::string& p) {
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
  }
  static void spit(const std::string& p, const std::string& bytes) {
    std::ofstream os(p, std::ios::binary);
    os << bytes;
  }

  template <Entity E>
  void round_trip(const std::string& name) {
    std::mt19937_64 rng(9);
    const Field<E> f = random_field<E>(topo_, rng);
    write_field(path(name), f);
    const Field<E> g = read_field<E>(path(name));
    EXPECT_TRUE(same_grid(g.topo(), *topo_));
    EXPECT_EQ(f.raw(), g.raw());
    write_field(path(name + ".2"), g);
    EXPECT_EQ(slurp(path(name)), slurp(path(name + ".2")));
  }

  fs::path dir_;
  TopologyPtr topo_;
};

}  // namespace

TEST_F(FieldIo, RoundTripIsBitExact) {
  round_trip<Entity::Cell>("c.field");
  round_trip<Entity::Face>("f.field");
  round_trip<Entity::Edge>("e.field");
  round_trip<Entity::Node>("n.field");
}

TEST_F(FieldIo, HeaderDescribesTheGrid) {
  write_field(path("u.field"), FaceField(topo_));
  const FieldFileHeader h = read_header(path("u.field"));
  EXPECT_EQ(h.kind, "face");
  EXPECT_EQ(h.n, 12);
  EXPECT_EQ(h.L, 3.0);
  EXPECT_EQ(h.payload, topo_->active_count(Entity::Face));
  EXPECT_EQ(parse_obstacle(h.obstacle).kind.index(), topo_->spec().obstacle.kind.index());
  // header plus active entries only
  const std::string bytes = slurp(path("u.field"));
  const auto end = bytes.find("end\n");
  ASSERT_NE(end, std::string::npos);
  EXPECT_EQ(bytes.size() - end - 4, 8 * h.payload);
}

TEST_F(FieldIo, ReadIntoSuppliedTopology) {
  write_field(path("u.field"), sample_uniform(topo_, 1));
  const FaceField g = read_field<Entity::Face>(path("u.field"), topo_);
  EXPECT_EQ(g.topo_ptr(), topo_);
  EXPECT_THROW(read_field<Entity::Face>(path("u.field"), build_domain({3.0, 14, Ball{{0.25, 0, 0}, 1.0}})),
               ConfigError);
  EXPECT_THROW(read_field<Entity::Cell>(path("u.field")), ConfigError);
}

TEST_F(FieldIo, MalformedHeadersNameTheField) {
  write_field(path("u.field"), FaceField(topo_));
  const std::string good = slurp(path("u.field"));
  auto expect_error = [&](std::string bytes, const std::string& needle) {
    spit(path("bad.field"), bytes);
    try {
      read_field<Entity::Face>(path("bad.field"));
      ADD_FAILURE() << "no error for " << needle;
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  auto replace = [&](const std::string& from, const std::string& to) {
    std::string s = good;
    s.replace(s.find(from), from.size(), to);
    return s;
  };
  expect_error(replace("n 12\n", "n x\n"), "'n'");
  expect_error(replace("n 12\n", "n 12.5\n"), "'n'");
  expect_error(replace("XHODGE1", "XHODGE2"), "'magic'");
  expect_error(replace("kind face", "kind tensor"), "'kind'");
  expect_error(replace("scalar f64", "scalar f32"), "'scalar'");
  expect_error(replace("endian little", "endian big"), "'endian'");
  expect_error(replace("payload ", "payload 1"), "'payload'");
  expect_error(replace("L 3\n", "L three\n"), "'L'");
}

TEST_F(FieldIo, PayloadLengthIsChecked) {
  write_field(path("u.field"), sample_uniform(topo_, 0));
  const std::string good = slurp(path("u.field"));
  spit(path("short.field"), good.substr(0, good.size() - 8));
  EXPECT_THROW(read_field<Entity::Face>(path("short.field")), IoError);
  spit(path("long.field"), good + "x");
  EXPECT_THROW(read_field<Entity::Face>(path("long.field")), IoError);
  EXPECT_THROW(read_field<Entity::Face>(path("missing.field")), IoError);
}

TEST_F(FieldIo, ClassificationFile) {
  write_classification(path("class.field"), *topo_);
  const FieldFileHeader h = read_header(path("class.field"));
  EXPECT_EQ(h.kind, "classification");
  ASSERT_EQ(h.payload, 12u * 12u * 12u);
  const std::string bytes = slurp(path("class.field"));
  const char* data = bytes.data() + bytes.find("end\n") + 4;
  for (std::size_t c = 0; c < h.payload; ++c) {
    double v;
    std::memcpy(&v, data + 8 * c, 8);
    ASSERT_EQ(v, topo_->fluid(c) ? 1.0 : 0.0);
  }
}

TEST_F(FieldIo, VtkExport) {
  const FaceField u = sample_faces(topo_, [](const Vec3& x) { return Vec3{x[1], -x[0], 0.5}; });
  export_vtk(u, path("u.vtk"), "u");
  const VtkSummary s = read_vtk_summary(path("u.vtk"));
  const double h = topo_->h();
  EXPECT_EQ(s.nx, 12);
  EXPECT_EQ(s.ny, 12);
  EXPECT_EQ(s.nz, 12);
  EXPECT_EQ(s.points, 1728u);
  for (int k = 0; k < 3; ++k) {
    EXPECT_NEAR(s.origin[k], -3.0 + h / 2, 1e-12);
    EXPECT_NEAR(s.spacing[k], h, 1e-12);
  }
  double m = 0.0;
  for (std::size_t c = 0; c < topo_->size(Entity::Cell); ++c)
    if (topo_->fluid(c)) m = std::max(m, vnorm(cell_average(u, c)));
  EXPECT_NEAR(s.max_magnitude, m, 1e-9 * m);

  ScalarField q(topo_);
  for (std::size_t c = 0; c < q.size(); ++c)
    if (topo_->fluid(c)) q[c] = -2.0;
  export_vtk(q, path("q.vtk"), "q");
  const VtkSummary sq = read_vtk_summary(path("q.vtk"));
  EXPECT_EQ(sq.points, 1728u);
  EXPECT_NEAR(sq.max_magnitude, 2.0, 1e-12);
}
