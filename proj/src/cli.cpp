//
// xpct - Copyright 2026 The xpct Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "xpct/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>
#include <regex>

#include <CLI11.hpp>

#include "xpct/errors.hpp"
#include "xpct/lbfgs.hpp"
#include "xpct/parallel.hpp"
#include "xpct/pipeline.hpp"

namespace xpct {
namespace {
  std::pair<std::size_t, std::size_t> parse_detector(const std::string &s) {
    static const std::regex re("([0-9]+)[xX]([0-9]+)");
    std::smatch m;
    if (!std::regex_match(s, m, re))
      throw InvalidArgument("--detector expects ROWSxCOLS, got '" + s + "'");
    return {std::stoul(m[1]), std::stoul(m[2])};
  }

  // "5", "5mm" or "5 mm" -> meters.
  double parse_millimeters(const std::string &s) {
    static const std::regex re(R"(\s*([-+0-9.eE]+)\s*(mm)?\s*)");
    std::smatch m;
    if (!std::regex_match(s, m, re))
      throw InvalidArgument("expected a distance in mm, got '" + s + "'");
    return std::stod(m[1]) * units::kMillimeter;
  }

  PhantomSpec load_phantom(const std::string &name) {
    if (name == "single")
      return single_material_phantom();
    if (name == "multi")
      return multi_material_phantom();
    std::ifstream in(name);
    if (!in)
      throw InvalidArgument("--phantom: '" + name
                            + "' is neither single, multi nor a readable file");
    try {
      return phantom_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception &e) {
      throw InvalidArgument("--phantom " + name + ": " + e.what());
    }
  }

  struct SimulateArgs {
    std::string phantom = "single";
    std::size_t views = 64;
    double energy_kev = 20.0;
    double distance_mm = 100.0;
    double pixel_um = 0.645;
    std::string detector = "48x64";
    double flux = 1e4;
    std::uint64_t seed = 1;
    bool no_noise = false;
    double pad_factor = 1.5;
    std::size_t workers = default_workers();
    std::string out;
  };

  struct RetrieveArgs {
    std::string method = "nlpr";
    RetrievalConfig config;
    std::size_t workers = default_workers();
    std::string distance_override;
    bool no_traces = false;
    std::string in;
    std::string out;
  };

  struct ReconstructArgs {
    std::string in;
    std::string out;
    bool apodize = false;
    std::size_t workers = default_workers();
  };

  struct EvaluateArgs {
    std::string truth;
    std::vector<std::string> recon;
    std::string rois;
    std::string report;
  };

  void run_simulate(const SimulateArgs &a, std::ostream &out) {
    const auto [rows, cols] = parse_detector(a.detector);
    AcquisitionGeometry g;
    g.wavelength = wavelength_from_energy(a.energy_kev);
    g.distance = a.distance_mm * units::kMillimeter;
    g.pixel_pitch = a.pixel_um * units::kMicrometer;
    g.n_u = rows;
    g.n_v = cols;
    g.angles = equally_spaced_angles(a.views);
    SimulationOptions opt;
    opt.flux = a.flux;
    opt.seed = a.seed;
    opt.noise = !a.no_noise;
    opt.pad_factor = a.pad_factor;
    opt.workers = a.workers;
    simulate_dataset(load_phantom(a.phantom), g, opt, std::filesystem::path(a.out));
    out << "simulated " << a.views << " views -> " << a.out << '\n';
  }

  void run_retrieve(const RetrieveArgs &a, std::ostream &out) {
    RetrievalRequest req;
    req.method = parse_method(a.method);
    req.config = a.config;
    req.workers = a.workers;
    req.write_traces = !a.no_traces;
    if (!a.distance_override.empty())
      req.distance_override = parse_millimeters(a.distance_override);
    const RetrievalSummary s = run_retrieval(a.in, a.out, req);
    out << "retrieved " << s.final_objective.size() << " views ("
        << to_string(req.method) << ") -> " << a.out << '\n';
  }
} // namespace

int cli_main(const std::vector<std::string> &args, std::ostream &out,
             std::ostream &err) {
  CLI::App app{"Single-distance X-ray phase-contrast tomography: simulate, "
               "retrieve, reconstruct, evaluate",
               "xpct"};
  app.require_subcommand(1, 1);

  SimulateArgs sim;
  auto *cmd_sim = app.add_subcommand("simulate", "Simulate a sphere-phantom dataset");
  cmd_sim->add_option("--phantom", sim.phantom, "single | multi | phantom JSON file")
      ->capture_default_str();
  cmd_sim->add_option("--views", sim.views, "Views over 180 degrees")
      ->capture_default_str()->check(CLI::PositiveNumber);
  cmd_sim->add_option("--energy-kev", sim.energy_kev, "Photon energy [keV]")
      ->capture_default_str();
  cmd_sim->add_option("--distance-mm", sim.distance_mm,
                      "Object-to-detector distance [mm]")->capture_default_str();
  cmd_sim->add_option("--pixel-um", sim.pixel_um, "Detector pixel pitch [um]")
      ->capture_default_str();
  cmd_sim->add_option("--detector", sim.detector, "Detector ROWSxCOLS")
      ->capture_default_str();
  cmd_sim->add_option("--flux", sim.flux, "Incident counts per pixel")
      ->capture_default_str();
  cmd_sim->add_option("--seed", sim.seed, "Noise seed")->capture_default_str();
  cmd_sim->add_flag("--no-noise", sim.no_noise, "Disable Poisson noise");
  cmd_sim->add_option("--pad-factor", sim.pad_factor, "Edge padding factor")
      ->capture_default_str();
  cmd_sim->add_option("--workers", sim.workers, "Worker threads")
      ->check(CLI::PositiveNumber);
  cmd_sim->add_option("--out", sim.out, "Output dataset directory")->required();

  RetrieveArgs ret;
  auto *cmd_ret = app.add_subcommand("retrieve", "Per-view phase retrieval");
  cmd_ret->add_option("--method", ret.method, "lpr | lpr-sharp | nlpr")
      ->capture_default_str();
  cmd_ret->add_option("--gamma", ret.config.gamma, "delta/beta ratio")
      ->capture_default_str();
  cmd_ret->add_option("--alpha", ret.config.alpha, "Absorption exponent")
      ->capture_default_str();
  cmd_ret->add_option("--xtol", ret.config.xtol_rel,
                      "Relative step tolerance on x")->capture_default_str();
  cmd_ret->add_option("--max-iter", ret.config.max_iterations,
                      "L-BFGS iteration cap")->capture_default_str();
  cmd_ret->add_option("--lbfgs-memory", ret.config.lbfgs_memory,
                      "L-BFGS history length")->capture_default_str();
  cmd_ret->add_option("--lower-bound", ret.config.lower_bound,
                      "Lower bound on x")->capture_default_str();
  cmd_ret->add_flag("--upper-bound-one", ret.config.upper_bound_one,
                    "Also enforce x <= 1");
  cmd_ret->add_option("--pad-factor", ret.config.pad_factor,
                      "Edge padding factor")->capture_default_str();
  cmd_ret->add_option("--workers", ret.workers, "Worker threads")
      ->check(CLI::PositiveNumber);
  cmd_ret->add_option("--distance-override", ret.distance_override,
                      "Distance assumed by the retrieval, e.g. 5mm");
  cmd_ret->add_flag("--no-traces", ret.no_traces, "Skip per-view trace CSVs");
  cmd_ret->add_option("--in", ret.in, "Normalized dataset")->required();
  cmd_ret->add_option("--out", ret.out, "Output dataset directory")->required();

  ReconstructArgs rec;
  auto *cmd_rec = app.add_subcommand("reconstruct", "FBP of retrieved phases");
  cmd_rec->add_option("--in", rec.in, "Phase dataset")->required();
  cmd_rec->add_option("--out", rec.out, "Output dataset directory")->required();
  cmd_rec->add_flag("--apodize", rec.apodize, "Hamming-apodized ramp filter");
  cmd_rec->add_option("--workers", rec.workers, "Worker threads")
      ->check(CLI::PositiveNumber);

  EvaluateArgs ev;
  auto *cmd_ev = app.add_subcommand("evaluate", "Accuracy report");
  cmd_ev->add_option("--truth", ev.truth, "Simulated dataset with truth volumes");
  cmd_ev->add_option("--recon", ev.recon, "Reconstructed dataset(s)")
      ->required()->expected(1, -1);
  cmd_ev->add_option("--rois", ev.rois, "Circle ROI JSON");
  cmd_ev->add_option("--report", ev.report, "Report JSON path");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty())
    reversed.pop_back();
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  try {
    if (cmd_sim->parsed()) {
      run_simulate(sim, out);
    } else if (cmd_ret->parsed()) {
      run_retrieve(ret, out);
    } else if (cmd_rec->parsed()) {
      run_reconstruct(rec.in, rec.out, rec.apodize, rec.workers);
      out << "reconstructed -> " << rec.out << '\n';
    } else if (cmd_ev->parsed()) {
      std::vector<std::filesystem::path> recons(ev.recon.begin(), ev.recon.end());
      auto opt_path = [](const std::string &s) {
        return s.empty() ? std::nullopt
                         : std::optional<std::filesystem::path>(s);
      };
      const auto report = run_evaluate(opt_path(ev.truth), recons,
                                       opt_path(ev.rois), opt_path(ev.report));
      for (const auto &m : report.methods) {
        out << m.name;
        if (m.rmse_delta)
          out << "  rmse_delta=" << *m.rmse_delta;
        if (m.rmse_phase)
          out << "  rmse_phase=" << *m.rmse_phase;
        out << '\n';
      }
    }
  } catch (const InvalidArgument &e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const InvalidData &e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DegenerateInput &e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DatasetError &e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

int cli_main(int argc, char **argv) {
  return cli_main(std::vector<std::string>(argv, argv + argc), std::cout,
                  std::cerr);
}

} // namespace xpct
