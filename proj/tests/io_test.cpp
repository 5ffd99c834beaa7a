#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "hullpeel/io.hpp"

using namespace hullpeel;
using nlohmann::json;

namespace {

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(FormatDouble, RoundTrips) {
  RngStream rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::ldexp(rng.uniform() - 0.5, static_cast<int>(rng.uniform() * 200) - 100);
    EXPECT_EQ(std::strtod(io::format_double(v).c_str(), nullptr), v);
  }
  EXPECT_EQ(io::format_double(0.5), "0.5");
}

TEST(PointsCsv, HeaderAndRows) {
  PointSeq seq(ProcessConfig::make(1.0, SpectralMeasure::uniform(), 7));
  seq.extend(25);
  std::ostringstream os;
  io::write_points_csv(os, seq.points());
  const auto ls = lines(os.str());
  ASSERT_EQ(ls.size(), 26u);
  EXPECT_EQ(ls[0], "j,gamma,norm,angle,x,y");
  EXPECT_EQ(ls[1].substr(0, 2), "1,");
  EXPECT_EQ(ls[25].substr(0, 3), "25,");
  const auto meta = io::points_metadata(seq.config(), seq.size());
  EXPECT_EQ(meta["n_points"], 25);
  EXPECT_EQ(meta["rng_name"], std::string(RngStream::algorithm_name));
}

TEST(LayersCsv, EmptyKappaForNonInteriorOrigin) {
  const std::vector<Point> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const auto layers = peel_finite(sq);
  std::ostringstream os;
  io::write_layers_csv(os, layers);
  const auto ls = lines(os.str());
  ASSERT_EQ(ls.size(), 2u);
  EXPECT_EQ(ls[0], "k,n_vertices,perimeter,area,rho,kappa,n_points_consumed");
  EXPECT_EQ(ls[1], "1,4,4,1,1.4142135623730951,,4");
}

TEST(MeasureJson, RoundTripProperty) {
  RngStream rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t l = 3 + static_cast<std::size_t>(rng.uniform() * 6);
    std::vector<Atom> atoms;
    double total = 0;
    for (std::size_t i = 0; i < l; ++i) {
      atoms.push_back({2 * std::numbers::pi * (static_cast<double>(i) + 0.5 * rng.uniform()) / static_cast<double>(l),
                       0.1 + rng.uniform()});
      total += atoms.back().weight;
    }
    for (auto& a : atoms) a.weight /= total;
    const auto m = SpectralMeasure::atomic(atoms);
    const json j = json::parse(io::measure_to_json(m).dump());
    const auto back = io::measure_from_json(j);
    ASSERT_EQ(back.size(), m.size());
    for (std::size_t i = 0; i < l; ++i) {
      EXPECT_EQ(back.directions()[i].angle, m.directions()[i].angle);
      EXPECT_EQ(back.weights()[i], m.weights()[i]);
    }
  }
  EXPECT_FALSE(io::measure_from_json(json{{"uniform", true}}).is_atomic());
  EXPECT_FALSE(io::measure_from_json(json("uniform")).is_atomic());
}

TEST(MeasureJson, Rejections) {
  EXPECT_THROW(io::measure_from_json(json::array()), Error);
  EXPECT_THROW(io::measure_from_json(json{{"uniform", false}}), Error);
  EXPECT_THROW(io::measure_from_json(json{{"atoms", {{{"angle", 0.0}}}}}), Error);
  EXPECT_THROW(io::measure_from_json(json::parse(R"({"atoms":[{"angle":0,"weight":0.5},{"angle":1,"weight":0.2}]})")),
               Error);
  EXPECT_THROW(io::load_measure("/nonexistent/measure.json"), Error);
}

TEST(PolygonJson, RoundTripAndValidation) {
  const auto p = regular_polygon(7, 2.0, 0.3);
  const auto back = io::polygon_from_json(json::parse(io::polygon_to_json(p).dump()));
  EXPECT_EQ(back.vertices().size(), 7u);
  EXPECT_EQ(hausdorff(p, back), 0.0);
  EXPECT_THROW(io::polygon_from_json(json::parse("[[0,0],[1,0],[1,1],[0.5,0.2]]")), Error);
  EXPECT_THROW(io::polygon_from_json(json::parse("[[0,0],[1]]")), Error);
}

TEST(Svg, ContainsPolygonsAndCircle) {
  std::vector<io::SvgLayer> layers{{regular_polygon(5), "k=1"}, {regular_polygon(6, 0.5), "k=2"}};
  std::ostringstream os;
  io::write_svg(os, layers, io::SvgOptions{true});
  const std::string s = os.str();
  EXPECT_EQ(s.rfind("<svg", 0), 0u);
  EXPECT_NE(s.find("<circle"), std::string::npos);
  EXPECT_NE(s.find("<title>k=2</title>"), std::string::npos);
  std::size_t count = 0;
  for (std::size_t pos = 0; (pos = s.find("<polygon", pos)) != std::string::npos; ++pos) ++count;
  EXPECT_EQ(count, 2u);
  EXPECT_NE(s.find("</svg>"), std::string::npos);
}
