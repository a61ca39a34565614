#include <doctest.h>

#include <cstdio>
#include <random>
#include <sstream>

#include "gpt2d/gpt2d.hpp"

using namespace gpt2d;

TEST_CASE("conformal map JSON round trip is exact") {
  std::mt19937_64 rng(61);
  const ConformalMap m = random_map(rng, 6);
  const ConformalMap back = conformal_map_from_json(to_json(m));
  CHECK(back.gamma == m.gamma);
  CHECK(back.a0 == m.a0);
  REQUIRE(back.coeffs.size() == m.coeffs.size());
  for (size_t k = 0; k < m.coeffs.size(); ++k) CHECK(back.coeffs[k] == m.coeffs[k]);

  CHECK_THROWS_AS(conformal_map_from_json(Json::parse(R"({"gamma": -1, "a0": [0,0], "coeffs": []})")),
                  ConfigError);
}

TEST_CASE("shape spec JSON parsing") {
  const ShapeSpec s = shape_spec_from_json(Json::parse(R"({"shape": "kite", "nodes": 512})"));
  CHECK(s.shape == Shape::kite);
  CHECK(s.nodes == 512);

  const ShapeSpec d = shape_spec_from_json(
      Json::parse(R"({"shape": "disk", "nodes": 128, "center": [1.0, -0.5], "radius": 2.0})"));
  CHECK(d.radius == 2.0);
  CHECK(d.center == Complex{1.0, -0.5});

  CHECK_THROWS_AS(shape_spec_from_json(Json::parse(R"({"shape": "pentagon"})")), ConfigError);
  CHECK_THROWS_AS(shape_spec_from_json(Json::parse(R"({"shape": "kite", "nodes": 4})")),
                  ConfigError);

  const ShapeSpec round = shape_spec_from_json(to_json(d));
  CHECK(round.radius == d.radius);
}

TEST_CASE("measurement file round trips through JSON and CSV") {
  std::mt19937_64 rng(67);
  const ConformalMap m = random_map(rng, 3);
  const GptSet g = gpt_analytic(m, Material::from_lambda(1.2), 4);

  const GptSet gj = gpt_from_json(to_json(g));
  CHECK(gj.ord == g.ord);
  CHECK((gj.N1 - g.N1).cwiseAbs().maxCoeff() == 0.0);
  CHECK((gj.N2 - g.N2).cwiseAbs().maxCoeff() == 0.0);
  CHECK(gj.provenance == GptProvenance::measured_file);

  std::ostringstream csv;
  write_gpt_csv(csv, g);
  std::istringstream back(csv.str());
  const GptSet gc = gpt_from_csv(back);
  CHECK(gc.ord == g.ord);
  CHECK((gc.N1 - g.N1).cwiseAbs().maxCoeff() == 0.0);  // %.17g round trips doubles
  CHECK((gc.N2 - g.N2).cwiseAbs().maxCoeff() == 0.0);

  std::istringstream corrupt("m;n;re;im;matrix\n1,1,0,0,N1\n");
  CHECK_THROWS_AS(gpt_from_csv(corrupt), ConfigError);
  std::istringstream badtag("m,n,re,im,matrix\n1,1,0,0,N3\n");
  CHECK_THROWS_AS(gpt_from_csv(badtag), ConfigError);
}

TEST_CASE("measurement files are sniffed by content") {
  std::mt19937_64 rng(71);
  const GptSet g = gpt_analytic(random_map(rng, 2), Material::from_lambda(-0.8), 3);

  const std::string dir = "/tmp/gpt2d_io_test";
  std::remove((dir + ".json").c_str());
  write_text_file(dir + ".json", to_json(g).dump(2));
  std::ostringstream csv;
  write_gpt_csv(csv, g);
  write_text_file(dir + ".csv", csv.str());

  const GptSet a = read_measurement_file(dir + ".json");
  const GptSet b = read_measurement_file(dir + ".csv");
  CHECK((a.N1 - b.N1).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.N2 - b.N2).cwiseAbs().maxCoeff() == 0.0);

  write_text_file(dir + ".json", "{ this is not json");
  CHECK_THROWS_AS(read_measurement_file(dir + ".json"), ConfigError);
  CHECK_THROWS_AS(read_measurement_file("/nonexistent/path.json"), ConfigError);
}

TEST_CASE("curve CSV has the documented columns") {
  ShapeSpec sp;
  sp.shape = Shape::kite;
  sp.nodes = 16;
  std::ostringstream os;
  write_curve_csv(os, make_curve(sp));
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  CHECK(header == "t,x,y,nx,ny,weight");
  int rows = 0;
  for (std::string line; std::getline(is, line);)
    if (!line.empty()) ++rows;
  CHECK(rows == 16);
}

TEST_CASE("reconstruction result JSON carries the diagnostics") {
  std::mt19937_64 rng(73);
  const ConformalMap m = random_map(rng, 3);
  const double lam = 1.4;
  const ReconstructionResult r = reconstruct(gpt_analytic(m, Material::from_lambda(lam), 6));
  const Json j = to_json(r);
  CHECK(j.at("lambda_rec").get<double>() == doctest::Approx(lam).epsilon(1e-8));
  CHECK(j.at("flags").at("converged").get<bool>());
  CHECK(j.at("iterations").get<int>() == static_cast<int>(r.residual_trace.size()));
  CHECK(j.at("map").at("gamma").get<double>() == r.map_rec.gamma);
  CHECK(j.at("residual_trace").size() == r.residual_trace.size());
}

TEST_CASE("SVG writer emits well-formed polygons with the configured points") {
  ShapeSpec sp;
  sp.shape = Shape::starfish;
  sp.nodes = 64;
  const BoundaryCurve c = make_curve(sp);

  SvgPolyline truth;
  for (int j = 0; j < c.size(); ++j) truth.points.push_back(c.nodes(j));
  SvgPolyline recon = truth;
  recon.stroke = "#cc0000";
  recon.dashed = true;

  std::ostringstream os;
  write_svg(os, {truth, recon});
  const std::string svg = os.str();
  CHECK(svg.rfind("<?xml", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  size_t count = 0, pos = 0;
  while ((pos = svg.find("<polygon", pos)) != std::string::npos) {
    ++count;
    pos += 8;
  }
  CHECK(count == 2);
  // each polygon lists exactly nodes-many coordinate pairs
  const size_t first = svg.find("points=\"");
  const size_t end = svg.find('"', first + 8);
  const std::string pts = svg.substr(first + 8, end - first - 8);
  CHECK(std::count(pts.begin(), pts.end(), ',') == 64);
  CHECK(std::count(pts.begin(), pts.end(), ' ') == 63);
}

TEST_CASE("gpt JSON refuses mismatched dimensions") {
  Json j;
  j["ord"] = 3;
  j["N1"] = Json::array();
  j["N2"] = Json::array();
  for (int k = 0; k < 4; ++k) j["N1"].push_back(Json::array({0.0, 0.0}));
  for (int k = 0; k < 9; ++k) j["N2"].push_back(Json::array({0.0, 0.0}));
  CHECK_THROWS_AS(gpt_from_json(j), ConfigError);
}
