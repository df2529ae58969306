#include <sstream>

#include <gtest/gtest.h>

#include "demi/errors.hpp"
#include "demi/io.hpp"

using namespace demi;

TEST(Io, FormatRealRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 3.63865252412692, 1e300}) EXPECT_EQ(std::stod(format_real(x)), x);
}

TEST(Io, KernelRoundTrip) {
  EllipticityBounds b(0.5, 2.0);
  std::vector<double> v1{0.5, 1.0, 2.0, 1.5}, v2{1.0, 1.0, 1.0, 1.0};
  std::vector<KernelClass> classes{
      KernelClass::star(FractionalOrder(0.3), 1, b),
      KernelClass::full(FractionalOrder(0.7), 2, b, 8),
      KernelClass::finite(FractionalOrder(0.5), 2, b, {make_angular_density(v1, b, 2), make_angular_density(v2, b, 2)})};
  for (const auto& c : classes) {
    Json j = to_json(c);
    auto back = kernel_class_from_json(Json::parse(j.dump()));
    EXPECT_EQ(to_json(back), j);
    EXPECT_EQ(back.variant(), c.variant());
    EXPECT_EQ(back.sectors(), c.sectors());
    EXPECT_EQ(back.family(), c.family());
  }
  try {
    kernel_class_from_json(Json::parse(R"({"s":0.5,"dim":1,"lambda":1,"Lambda":2,"variant":"other"})"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ConfigParseError);
  }
}

TEST(Io, DomainRoundTrip) {
  for (const auto& d : {DomainSpec::interval(-1.0, 2.0), DomainSpec(UnionOfIntervals{{{-3.0, -1.0}, {0.5, 2.0}}}),
                        DomainSpec::ball({0.25, -0.5}, 0.75)}) {
    Json j = to_json(d);
    EXPECT_EQ(to_json(domain_from_json(Json::parse(j.dump()))), j);
  }
}

TEST(Io, GridFunctionCsvRoundTripIsExact) {
  for (auto g : {build_grid(DomainSpec::interval(-1.0, 1.0), 65), build_grid(DomainSpec::ball({0.0, 0.0}, 1.0), 17)}) {
    auto u = GridFunction::sample(g, [](const Point& x) { return std::exp(x[0]) / 3.0 + x[1] * 1e-7; });
    std::stringstream ss;
    write_csv(ss, u);
    auto back = read_csv(ss, g);
    EXPECT_EQ(back.box_values(), u.box_values());
    EXPECT_EQ(to_json(u).size(), static_cast<std::size_t>(g->interior_size()));
  }
}

TEST(Io, Triplets) {
  auto g = build_grid(DomainSpec::interval(-1.0, 1.0), 17);
  auto cls = KernelClass::star(FractionalOrder(0.5), 1, EllipticityBounds(1.0, 2.0));
  auto a = assemble_linear(cls.constant_density(1.0), cls, g);
  std::stringstream ss;
  write_triplets(ss, a);
  int lines = 0, r, c;
  double v;
  Eigen::MatrixXd back = Eigen::MatrixXd::Zero(a.interior.rows(), a.interior.cols());
  while (ss >> r >> c >> v) {
    back(r, c) = v;
    ++lines;
  }
  EXPECT_EQ(lines, static_cast<int>((a.interior.array() != 0.0).count()));
  EXPECT_EQ(back, a.interior);
}

TEST(Io, Reports) {
  ProbeReport r;
  r.name = "demo";
  r.seed = 9;
  TrialRecord t;
  t.values = {{"mu", 1.5}, {"max_u", -0.25}};
  r.add(t);
  t.violation = true;
  t.values = {{"mu", 2.0}, {"extra", 3.0}};
  r.add(t);
  EXPECT_EQ(r.trials, 2);
  EXPECT_EQ(r.violations, 1);
  Json j = to_json(r);
  EXPECT_EQ(j["name"], "demo");
  EXPECT_EQ(j["violations"], 1);
  std::stringstream ss;
  write_csv(ss, r);
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header.rfind("index,violation", 0), 0u);
  EXPECT_NE(header.find("extra"), std::string::npos);
  EXPECT_EQ(to_string(SolveStatus::NotInResolventSet), "NotInResolventSet");
  EXPECT_EQ(to_string(BranchStatus::FoldDetected), "FoldDetected");
}
