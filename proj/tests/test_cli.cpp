//
// xpct - Copyright 2026 The xpct Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include <fstream>
#include <iterator>
#include <sstream>

#include "test_util.hpp"
#include "xpct/cli.hpp"
#include "xpct/dataset.hpp"
#include "xpct/pipeline.hpp"

using namespace xpct;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run xpct_run(std::vector<std::string> args) {
  args.insert(args.begin(), "xpct");
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Every array file of a dataset directory, concatenated in name order.
std::string array_bytes(const fs::path &dir) {
  const Dataset ds = load_dataset(dir);
  std::string all;
  for (const auto &[name, info] : ds.manifest().arrays)
    all += name + ':' + slurp(dir / info.file);
  return all;
}

const std::vector<std::string> kSmall{"--views", "12", "--seed", "3"};

std::vector<std::string> with(std::vector<std::string> a,
                              const std::vector<std::string> &b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

} // namespace

TEST_CASE("usage errors exit 1") {
  Run r = xpct_run({});
  CHECK(r.code == 1);
  CHECK(r.err.find("Usage") != std::string::npos);

  r = xpct_run({"simulate", "--out", "x", "--bogus"});
  CHECK(r.code == 1);
  CHECK(r.err.find("bogus") != std::string::npos);

  r = xpct_run({"retrieve", "--in", "a"});
  CHECK(r.code == 1);

  r = xpct_run({"simulate", "--detector", "48by64", "--out", "x"});
  CHECK(r.code == 1);

  r = xpct_run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("simulate") != std::string::npos);
}

TEST_CASE("retrieve needs normalized frames") {
  testing::TempDir tmp("cli_stage");
  REQUIRE(xpct_run(with({"simulate", "--out", (tmp / "d1").string()}, kSmall)).code == 0);
  REQUIRE(xpct_run({"retrieve", "--method", "lpr", "--in", (tmp / "d1").string(),
                    "--out", (tmp / "d2").string()}).code == 0);
  const Run r = xpct_run({"retrieve", "--in", (tmp / "d2").string(), "--out",
                          (tmp / "d3").string()});
  CHECK(r.code == 1);
  CHECK(r.err.find("normalized") != std::string::npos);

  const Run missing = xpct_run({"retrieve", "--in", (tmp / "nothing").string(),
                                "--out", (tmp / "d4").string()});
  CHECK(missing.code == 1);
  const Run bad_method = xpct_run({"retrieve", "--method", "bronnikov", "--in",
                                   (tmp / "d1").string(), "--out",
                                   (tmp / "d5").string()});
  CHECK(bad_method.code == 1);
  const Run no_phase = xpct_run({"reconstruct", "--in", (tmp / "d1").string(),
                                 "--out", (tmp / "d6").string()});
  CHECK(no_phase.code == 1);
  CHECK(no_phase.err.find("phase") != std::string::npos);
}

TEST_CASE("simulate writes a complete dataset") {
  testing::TempDir tmp("cli_sim");
  const fs::path d1 = tmp / "d1";
  const Run r = xpct_run(with({"simulate", "--out", d1.string()}, kSmall));
  REQUIRE(r.code == 0);
  const Dataset ds = load_dataset(d1);
  CHECK(ds.geometry().angles.size() == 12);
  CHECK(ds.geometry().n_u == 48);
  CHECK(ds.geometry().n_v == 64);
  CHECK(ds.manifest().has_stage(stage::kNormalized));
  CHECK(ds.manifest().provenance["seed"] == 3);
  for (const char *name : {"y_0000", "y_0011", "raw_0005", "bright_0005",
                           "dark_0005", "truth_phase_0003", "truth_delta"})
    CHECK(ds.has_array(name));
  const RealImage y = ds.read_image("y_0000");
  double mean = 0.0;
  for (std::size_t c = 0; c < 64; ++c)
    mean += y(0, c);
  CHECK(std::abs(mean / 64.0 - 1.0) < 0.02);
}

TEST_CASE("outputs do not depend on the worker count") {
  testing::TempDir tmp("cli_workers");
  const std::string d1 = (tmp / "d1").string();
  REQUIRE(xpct_run(with({"simulate", "--workers", "1", "--out", d1}, kSmall)).code == 0);
  REQUIRE(xpct_run(with({"simulate", "--workers", "3", "--out", (tmp / "d1b").string()},
                        kSmall)).code == 0);
  CHECK(array_bytes(d1) == array_bytes(tmp / "d1b"));

  for (const char *method : {"lpr", "nlpr"}) {
    CAPTURE(method);
    const std::string a = (tmp / (std::string(method) + "_1")).string();
    const std::string b = (tmp / (std::string(method) + "_4")).string();
    REQUIRE(xpct_run({"retrieve", "--method", method, "--workers", "1", "--in", d1,
                      "--out", a}).code == 0);
    REQUIRE(xpct_run({"retrieve", "--method", method, "--workers", "4", "--in", d1,
                      "--out", b}).code == 0);
    CHECK(array_bytes(a) == array_bytes(b));
    REQUIRE(xpct_run({"reconstruct", "--workers", "1", "--in", a, "--out", a + "_r"}).code == 0);
    REQUIRE(xpct_run({"reconstruct", "--workers", "2", "--in", b, "--out", b + "_r"}).code == 0);
    CHECK(array_bytes(a + "_r") == array_bytes(b + "_r"));
    REQUIRE(xpct_run({"evaluate", "--truth", d1, "--recon", a + "_r", "--report",
                      a + ".json"}).code == 0);
    REQUIRE(xpct_run({"evaluate", "--truth", d1, "--recon", b + "_r", "--report",
                      b + ".json"}).code == 0);
    CHECK(slurp(a + ".json") == slurp(b + ".json"));
  }
}

TEST_CASE("lpr-sharp is lpr at 5 mm") {
  testing::TempDir tmp("cli_sharp");
  const std::string d1 = (tmp / "d1").string();
  REQUIRE(xpct_run(with({"simulate", "--out", d1}, kSmall)).code == 0);
  REQUIRE(xpct_run({"retrieve", "--method", "lpr-sharp", "--in", d1, "--out",
                    (tmp / "sharp").string()}).code == 0);
  REQUIRE(xpct_run({"retrieve", "--method", "lpr", "--distance-override", "5mm",
                    "--in", d1, "--out", (tmp / "lpr5").string()}).code == 0);
  REQUIRE(xpct_run({"retrieve", "--method", "lpr-sharp", "--distance-override",
                    "5", "--in", d1, "--out", (tmp / "sharp_m").string()}).code == 0);
  const Dataset a = load_dataset(tmp / "sharp");
  const Dataset b = load_dataset(tmp / "lpr5");
  const Dataset c = load_dataset(tmp / "sharp_m");
  for (std::size_t v = 0; v < 12; ++v) {
    CHECK(a.read(view_array_name("x", v)).values == b.read(view_array_name("x", v)).values);
    CHECK(a.read(view_array_name("phase", v)).values
          == c.read(view_array_name("phase", v)).values);
  }
  CHECK(a.manifest().extra["retrieval"]["distance_used"] == doctest::Approx(0.005));
  CHECK(a.geometry().distance == doctest::Approx(0.1));
}

TEST_CASE("nlpr with no iterations equals lpr") {
  testing::TempDir tmp("cli_budget");
  const std::string d1 = (tmp / "d1").string();
  REQUIRE(xpct_run(with({"simulate", "--out", d1}, kSmall)).code == 0);
  REQUIRE(xpct_run({"retrieve", "--method", "nlpr", "--max-iter", "0", "--in", d1,
                    "--out", (tmp / "n0").string()}).code == 0);
  REQUIRE(xpct_run({"retrieve", "--method", "lpr", "--in", d1, "--out",
                    (tmp / "l").string()}).code == 0);
  const Dataset a = load_dataset(tmp / "n0");
  const Dataset b = load_dataset(tmp / "l");
  for (std::size_t v = 0; v < 12; ++v)
    CHECK(a.read(view_array_name("x", v)).values == b.read(view_array_name("x", v)).values);
}

TEST_CASE("retrieval metadata and traces") {
  testing::TempDir tmp("cli_meta");
  const std::string d1 = (tmp / "d1").string();
  REQUIRE(xpct_run(with({"simulate", "--out", d1}, kSmall)).code == 0);
  const fs::path d2 = tmp / "d2";
  REQUIRE(xpct_run({"retrieve", "--in", d1, "--out", d2.string()}).code == 0);
  const Dataset ds = load_dataset(d2);
  const auto &cfg = ds.manifest().extra["retrieval"];
  CHECK(cfg["method"] == "nlpr");
  CHECK(cfg["alpha"] == 1.0);
  CHECK(cfg["gamma"] == 350.0);
  CHECK(cfg["xtol_rel"] == 1e-6);
  CHECK(ds.manifest().has_stage(stage::kPhase));
  const std::string trace = slurp(d2 / "trace_0000.csv");
  CHECK(trace.rfind("iteration,objective\n0,", 0) == 0);

  std::istringstream lines(trace);
  std::string line;
  std::getline(lines, line);
  double prev = std::numeric_limits<double>::infinity();
  while (std::getline(lines, line)) {
    const double f = std::stod(line.substr(line.find(',') + 1));
    CHECK(f <= prev);
    prev = f;
  }

  REQUIRE(xpct_run({"retrieve", "--no-traces", "--in", d1, "--out",
                    (tmp / "d3").string()}).code == 0);
  CHECK(!fs::exists(tmp / "d3" / "trace_0000.csv"));
}

TEST_CASE("noiseless pipeline through the command line") {
  testing::TempDir tmp("cli_full");
  const std::string d1 = (tmp / "d1").string(), d2 = (tmp / "d2").string(),
                    d3 = (tmp / "d3").string(), report = (tmp / "r.json").string();
  REQUIRE(xpct_run({"simulate", "--phantom", "single", "--no-noise", "--out", d1}).code == 0);
  REQUIRE(xpct_run({"retrieve", "--method", "nlpr", "--in", d1, "--out", d2}).code == 0);
  REQUIRE(xpct_run({"reconstruct", "--in", d2, "--out", d3}).code == 0);
  const Run ev = xpct_run({"evaluate", "--truth", d1, "--recon", d3, "--report", report});
  REQUIRE(ev.code == 0);
  const auto j = nlohmann::json::parse(slurp(report));
  REQUIRE(j["methods"].size() == 1);
  CHECK(j["methods"][0]["name"] == "nlpr");
  CHECK(j["methods"][0]["rmse_delta"].get<double>() < 5e-8);
  CHECK(j["methods"][0]["rmse_phase"].is_number());
  CHECK(j["truth_areas_m2"].size() == 3);

  // evaluation without truth keeps areas and drops the RMSE fields
  const std::string rois = (tmp / "rois.json").string();
  std::ofstream(rois) << load_dataset(d1).manifest().extra["rois"].dump();
  const std::string blind = (tmp / "blind.json").string();
  REQUIRE(xpct_run({"evaluate", "--recon", d3, "--rois", rois, "--report", blind}).code == 0);
  const auto jb = nlohmann::json::parse(slurp(blind));
  CHECK(jb["methods"][0]["rmse_delta"].is_null());
  CHECK(jb["truth_areas_m2"].is_null());
  CHECK(jb["methods"][0]["areas_m2"] == j["methods"][0]["areas_m2"]);
}

TEST_CASE("phantom specification file") {
  testing::TempDir tmp("cli_spec");
  PhantomSpec spec = single_material_phantom();
  spec.spheres.resize(1);
  const std::string file = (tmp / "phantom.json").string();
  std::ofstream(file) << to_json(spec).dump();
  REQUIRE(xpct_run({"simulate", "--phantom", file, "--views", "4", "--out",
                    (tmp / "d").string()}).code == 0);
  const Dataset ds = load_dataset(tmp / "d");
  CHECK(phantom_from_json(ds.manifest().provenance["phantom"]).spheres.size() == 1);

  std::ofstream(tmp / "broken.json") << "{\"spheres\": 3}";
  CHECK(xpct_run({"simulate", "--phantom", (tmp / "broken.json").string(), "--out",
                  (tmp / "e").string()}).code == 1);
}
