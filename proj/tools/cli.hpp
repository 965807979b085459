#pragma once

// Command-line front end shared by the `dfd` executable and the tests.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dfd/dfd.hpp"

namespace dfd::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

enum ExitCode : int { exit_ok = 0, exit_validation = 1, exit_io = 2, exit_partial = 3 };

/// Subcommand name plus every flag value after defaults were applied and
/// paths made absolute. Printed to stderr before each run.
struct RunConfig {
  std::string subcommand;
  json flags = json::object();
};

inline std::string resolve(const std::string& p) {
  if (p.empty() || p == "-") return p;
  return fs::absolute(p).lexically_normal().string();
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error(Errc::io_failure, "cannot write " + path);
  f << text;
  if (!f) throw Error(Errc::io_failure, "short write to " + path);
}

/// Numbers separated by commas, whitespace or newlines. Lines starting with
/// '#' are comments; a non-numeric first line is taken as a header.
inline std::vector<double> parse_numbers(const std::string& text, const std::string& source) {
  std::vector<double> values;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    std::vector<double> row;
    bool numeric = true;
    std::string token;
    std::istringstream ls(line);
    while (std::getline(ls, token, ',')) {
      std::istringstream ws(token);
      std::string word;
      while (ws >> word) {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), v);
        if (ec != std::errc() || ptr != word.data() + word.size()) {
          numeric = false;
          break;
        }
        row.push_back(v);
      }
      if (!numeric) break;
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw Error(Errc::bad_format, source + ": non-numeric value in '" + line + "'");
    }
    first = false;
    values.insert(values.end(), row.begin(), row.end());
  }
  return values;
}

inline std::string read_file(const std::string& path) {
  detail::require_exists(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_failure, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Valid depth samples of a PNG or raw map, or the numbers of a CSV file.
inline std::vector<double> read_values(const std::string& path, double depth_scale) {
  const std::string bytes = read_file(path);
  const bool raw = bytes.size() >= 4 && bytes.compare(0, 4, "DFD1") == 0;
  const bool png = bytes.size() >= 8 && bytes.compare(1, 3, "PNG") == 0;
  if (raw || png) {
    const DepthMap d = read_depth_any(path, depth_scale, std::numeric_limits<double>::max());
    std::vector<double> v;
    for (std::size_t i = 0; i < d.pixels(); ++i)
      if (d.valid()[i]) v.push_back(d.data()[i]);
    return v;
  }
  return parse_numbers(bytes, path);
}

inline json to_json(const MetricsReport& r) {
  return json{{"abs_rel", r.abs_rel}, {"sq_rel", r.sq_rel},   {"rmse", r.rmse},
              {"log_rmse", r.log_rmse}, {"delta1", r.delta1}, {"delta2", r.delta2},
              {"delta3", r.delta3},   {"n_pixels", r.n_pixels}};
}

inline json to_json(const LossReport& r) {
  json j{{"l_spafid", r.l_spafid}, {"l_freq", r.l_freq}};
  if (r.l_adv) j["l_adv"] = *r.l_adv;
  j["l_total"] = r.l_total;
  j["w_freq"] = r.w_freq;
  j["w_adv"] = r.w_adv;
  return j;
}

inline json to_json(const DatasetSummary& s) {
  json samples = json::array();
  for (const auto& st : s.samples) {
    json j{{"id", st.id}};
    switch (st.state) {
      case SampleStatus::State::ok: j["status"] = "ok"; break;
      case SampleStatus::State::failed: j["status"] = "failed"; break;
      case SampleStatus::State::skipped: j["status"] = "skipped"; break;
    }
    if (!st.error.empty()) j["error"] = st.error;
    samples.push_back(std::move(j));
  }
  return json{{"total", s.samples.size()},
              {"ok", s.ok},
              {"failed", s.failed},
              {"skipped", s.skipped},
              {"samples", std::move(samples)}};
}

inline std::string profile_csv(const std::vector<ProfileBin>& bins) {
  std::string csv = "bin_center,mean_ldcv,mean_ldv,count\n";
  for (const auto& b : bins) {
    csv += format_double(b.center) + ",";
    csv += (b.mean_ldcv ? format_double(*b.mean_ldcv) : "nan") + ",";
    csv += (b.mean_ldv ? format_double(*b.mean_ldv) : "nan") + ",";
    csv += std::to_string(b.count) + "\n";
  }
  return csv;
}

inline std::string kde_csv(const KdeResult& k) {
  std::string csv = "# bandwidth=" + format_double(k.bandwidth) + "\ngrid,density\n";
  for (std::size_t i = 0; i < k.grid.size(); ++i)
    csv += format_double(k.grid[i]) + "," + format_double(k.density[i]) + "\n";
  return csv;
}

struct CameraFlags {
  double focal = 0.009;
  double fnumber = 2.0;
  double focus = 0.7;
  double pixel_pitch = 7.5e-6;

  void add(CLI::App* app) {
    app->add_option("--focal", focal, "Focal length [m]")->capture_default_str();
    app->add_option("--fnumber", fnumber, "F-number [dimensionless]")->capture_default_str();
    app->add_option("--focus", focus, "In-focus plane distance [m]")->capture_default_str();
    app->add_option("--pixel-pitch", pixel_pitch, "Sensor pixel pitch [m]")->capture_default_str();
  }
  CameraParams params() const { return {focal, fnumber, focus, pixel_pitch}; }
  void echo(json& j) const {
    j["focal"] = focal;
    j["fnumber"] = fnumber;
    j["focus"] = focus;
    j["pixel_pitch"] = pixel_pitch;
    j["aperture"] = focal / fnumber;
  }
};

/// Parses `args` (without the program name), runs the selected subcommand,
/// and returns the process exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Depth-from-defocus toolkit: blur synthesis, dark-channel cues, losses, metrics"};
  app.name("dfd");
  app.require_subcommand(1);

  unsigned jobs = Jobs::from_environment().count;
  auto add_jobs = [&](CLI::App* sub) {
    sub->add_option("--jobs", jobs, "Worker threads [count] (default: $DFD_JOBS or all cores)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  };

  std::function<int()> action;
  auto echo = [&](RunConfig c) {
    c.flags["jobs"] = jobs;
    err << "config: " << json{{"subcommand", c.subcommand}, {"flags", c.flags}}.dump() << "\n";
  };

  // synth
  struct {
    std::string rgb, depth, out, out_radius;
    CameraFlags cam;
    double truncation = default_truncation;
    double depth_scale = 1000.0;
    double max_depth = default_max_depth;
    int bits = 8;
  } synth;
  auto* synth_cmd = app.add_subcommand("synth", "Render depth-dependent defocus blur from RGB-D");
  synth_cmd->add_option("--rgb", synth.rgb, "All-in-focus RGB PNG (8/16-bit)")->required();
  synth_cmd->add_option("--depth", synth.depth, "Depth: 16-bit PNG or DFD1 raw map [m]")->required();
  synth.cam.add(synth_cmd);
  synth_cmd->add_option("--truncation", synth.truncation, "Kernel half-width [multiples of r]")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth_cmd->add_option("--depth-scale", synth.depth_scale, "PNG depth units per meter")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth_cmd->add_option("--max-depth", synth.max_depth, "Largest accepted depth [m]")
      ->capture_default_str();
  synth_cmd->add_option("--bits", synth.bits, "Output PNG bit depth [8|16]")
      ->check(CLI::IsMember({8, 16}))
      ->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "Defocused RGB PNG output")->required();
  synth_cmd->add_option("--out-radius", synth.out_radius, "Optional blur radius map [px], DFD1 raw");
  add_jobs(synth_cmd);
  synth_cmd->callback([&] {
    action = [&] {
      json f;
      f["rgb"] = resolve(synth.rgb);
      f["depth"] = resolve(synth.depth);
      synth.cam.echo(f);
      f["truncation"] = synth.truncation;
      f["depth_scale"] = synth.depth_scale;
      f["max_depth"] = synth.max_depth;
      f["bits"] = synth.bits;
      f["out"] = resolve(synth.out);
      f["out_radius"] = resolve(synth.out_radius);
      echo({"synth", f});
      const CameraParams cam = synth.cam.params();
      const RgbImage img = read_rgb(synth.rgb);
      const DepthMap depth = read_depth_any(synth.depth, synth.depth_scale, synth.max_depth);
      detail::require(img.width() == depth.width() && img.height() == depth.height(),
                      Errc::dimension_mismatch, "rgb and depth extents differ");
      const ScalarMap radii = blur_radius(depth, cam);
      const RgbImage blurred = synthesize_from_radii(img, radii, synth.truncation, Jobs{jobs});
      write_rgb(blurred, synth.out, synth.bits);
      if (!synth.out_radius.empty()) write_map(radii, synth.out_radius, MapFormat::raw_f32);
      return int{exit_ok};
    };
  });

  // darkchannel
  struct {
    std::string in, out, format = "raw";
    int window = default_dark_window;
    double scale = 65535.0;
  } dark;
  auto* dark_cmd = app.add_subcommand("darkchannel", "Dark channel of an RGB image");
  dark_cmd->add_option("--in", dark.in, "RGB PNG input")->required();
  dark_cmd->add_option("--window", dark.window, "Square window side [px], odd")
      ->capture_default_str();
  dark_cmd->add_option("--out", dark.out, "Dark channel output map")->required();
  dark_cmd->add_option("--format", dark.format, "Output format [raw|png16]")
      ->check(CLI::IsMember({"raw", "png16"}))
      ->capture_default_str();
  dark_cmd->add_option("--scale", dark.scale, "png16 units per unit intensity")
      ->capture_default_str();
  add_jobs(dark_cmd);
  dark_cmd->callback([&] {
    action = [&] {
      json f{{"in", resolve(dark.in)}, {"window", dark.window}, {"out", resolve(dark.out)},
             {"format", dark.format}, {"scale", dark.scale}};
      echo({"darkchannel", f});
      detail::require(dark.window >= 1 && dark.window % 2 == 1, Errc::invalid_argument,
                      "--window must be an odd positive integer, got " +
                          std::to_string(dark.window));
      const ScalarMap d = dark_channel(read_rgb(dark.in), dark.window, Jobs{jobs});
      write_map(d, dark.out, dark.format == "raw" ? MapFormat::raw_f32 : MapFormat::png16,
                dark.scale);
      return int{exit_ok};
    };
  });

  // cues
  struct {
    std::string in, dark, out;
  } cues;
  auto* cues_cmd = app.add_subcommand("cues", "Two-channel local variation map (LDCV, LDV)");
  cues_cmd->add_option("--in", cues.in, "Defocused RGB PNG")->required();
  cues_cmd->add_option("--dark", cues.dark, "Dark channel of --in, DFD1 raw")->required();
  cues_cmd->add_option("--out", cues.out, "Cue map output, DFD1 raw with 2 stacked planes")
      ->required();
  add_jobs(cues_cmd);
  cues_cmd->callback([&] {
    action = [&] {
      echo({"cues",
            json{{"in", resolve(cues.in)}, {"dark", resolve(cues.dark)}, {"out", resolve(cues.out)}}});
      const LddcvMap c = lddcv(read_raw(cues.dark), read_rgb(cues.in), Jobs{jobs});
      write_cues(c, cues.out);
      return int{exit_ok};
    };
  });

  // mask
  struct {
    std::string in, out;
    double threshold = default_mask_threshold;
  } mask;
  auto* mask_cmd = app.add_subcommand("mask", "Binary validity mask from a cue map");
  mask_cmd->add_option("--in", mask.in, "Cue map, DFD1 raw with 2 stacked planes")->required();
  mask_cmd->add_option("--threshold", mask.threshold, "Cue threshold [intensity], in [0,1)")
      ->capture_default_str();
  mask_cmd->add_option("--out", mask.out, "Mask PNG output (0 / 255)")->required();
  add_jobs(mask_cmd);
  mask_cmd->callback([&] {
    action = [&] {
      echo({"mask", json{{"in", resolve(mask.in)},
                         {"threshold", mask.threshold},
                         {"out", resolve(mask.out)}}});
      write_mask(validity_mask(read_cues(mask.in), mask.threshold), mask.out);
      return int{exit_ok};
    };
  });

  // profile
  struct {
    std::string cues, radii, out;
    int bins = 20;
  } profile;
  auto* profile_cmd = app.add_subcommand("profile", "Mean cues per normalized blur-level bin");
  profile_cmd->add_option("--cues", profile.cues, "Cue map, DFD1 raw")->required();
  profile_cmd->add_option("--radii", profile.radii, "Blur radius map [px], DFD1 raw")->required();
  profile_cmd->add_option("--bins", profile.bins, "Number of bins [count], >= 2")
      ->capture_default_str();
  profile_cmd->add_option("--out", profile.out, "CSV output (default stdout)");
  add_jobs(profile_cmd);
  profile_cmd->callback([&] {
    action = [&] {
      echo({"profile", json{{"cues", resolve(profile.cues)},
                            {"radii", resolve(profile.radii)},
                            {"bins", profile.bins},
                            {"out", resolve(profile.out)}}});
      const auto table =
          blur_cue_profile(read_cues(profile.cues), read_raw(profile.radii), profile.bins);
      write_text(profile.out, profile_csv(table), out);
      return int{exit_ok};
    };
  });

  // metrics
  struct {
    std::vector<std::string> pred, gt;
    std::string out;
    double cap = default_max_depth;
    double depth_scale = 1000.0;
  } metrics;
  auto* metrics_cmd = app.add_subcommand("metrics", "Depth error metrics (per-image mean over pairs)");
  metrics_cmd->add_option("--pred", metrics.pred, "Predicted depth (PNG or raw) [m]; repeatable")
      ->required();
  metrics_cmd->add_option("--gt", metrics.gt, "Ground-truth depth (PNG or raw) [m]; repeatable")
      ->required();
  metrics_cmd->add_option("--cap", metrics.cap, "Evaluate ground truth up to this depth [m]")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  metrics_cmd->add_option("--depth-scale", metrics.depth_scale, "PNG depth units per meter")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  metrics_cmd->add_option("--out", metrics.out, "JSON output (default stdout)");
  add_jobs(metrics_cmd);
  metrics_cmd->callback([&] {
    action = [&] {
      json preds = json::array(), gts = json::array();
      for (const auto& p : metrics.pred) preds.push_back(resolve(p));
      for (const auto& g : metrics.gt) gts.push_back(resolve(g));
      echo({"metrics", json{{"pred", preds},
                            {"gt", gts},
                            {"cap", metrics.cap},
                            {"depth_scale", metrics.depth_scale},
                            {"out", resolve(metrics.out)}}});
      detail::require(metrics.pred.size() == metrics.gt.size(), Errc::invalid_argument,
                      "--pred and --gt must be given the same number of times");
      const double limit = std::numeric_limits<double>::max();
      std::vector<MetricsReport> reports;
      for (std::size_t i = 0; i < metrics.pred.size(); ++i)
        reports.push_back(evaluate(read_depth_any(metrics.pred[i], metrics.depth_scale, limit),
                                   read_depth_any(metrics.gt[i], metrics.depth_scale, limit),
                                   metrics.cap));
      json j = to_json(average(reports));
      if (reports.size() > 1) {
        j["n_images"] = reports.size();
        json per = json::array();
        for (const auto& r : reports) per.push_back(to_json(r));
        j["per_image"] = std::move(per);
      }
      write_text(metrics.out, j.dump(2) + "\n", out);
      return int{exit_ok};
    };
  });

  // loss
  struct {
    std::string pred, gt, scores, out;
    double depth_scale = 1000.0;
  } loss;
  auto* loss_cmd = app.add_subcommand("loss", "Spatial, frequency and adversarial loss terms");
  loss_cmd->add_option("--pred", loss.pred, "Predicted depth (PNG or raw) [m]")->required();
  loss_cmd->add_option("--gt", loss.gt, "Ground-truth depth (PNG or raw) [m]")->required();
  loss_cmd->add_option("--scores", loss.scores, "Discriminator scores, CSV");
  loss_cmd->add_option("--depth-scale", loss.depth_scale, "PNG depth units per meter")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  loss_cmd->add_option("--out", loss.out, "JSON output (default stdout)");
  add_jobs(loss_cmd);
  loss_cmd->callback([&] {
    action = [&] {
      echo({"loss", json{{"pred", resolve(loss.pred)},
                         {"gt", resolve(loss.gt)},
                         {"scores", resolve(loss.scores)},
                         {"depth_scale", loss.depth_scale},
                         {"out", resolve(loss.out)}}});
      const double limit = std::numeric_limits<double>::max();
      const DepthMap pred = read_depth_any(loss.pred, loss.depth_scale, limit);
      const DepthMap gt = read_depth_any(loss.gt, loss.depth_scale, limit);
      std::optional<double> adv;
      if (!loss.scores.empty()) {
        const auto scores = parse_numbers(read_file(loss.scores), loss.scores);
        adv = adversarial_loss_g(scores);
      }
      const LossReport r =
          total_loss(spatial_fidelity(pred, gt), frequency_loss(pred, gt, Jobs{jobs}), adv);
      write_text(loss.out, to_json(r).dump(2) + "\n", out);
      return int{exit_ok};
    };
  });

  // kde
  struct {
    std::string values, out;
    int points = default_kde_points;
    double bandwidth = 0.0;
    double depth_scale = 1000.0;
  } kde;
  auto* kde_cmd = app.add_subcommand("kde", "Gaussian kernel density estimate");
  kde_cmd->add_option("--values", kde.values, "CSV of numbers, or a depth map (PNG/raw)")
      ->required();
  kde_cmd->add_option("--points", kde.points, "Grid size [count]")->capture_default_str();
  kde_cmd->add_option("--bandwidth", kde.bandwidth,
                      "Kernel bandwidth [input units]; 0 selects Silverman's rule")
      ->capture_default_str();
  kde_cmd->add_option("--depth-scale", kde.depth_scale, "PNG depth units per meter")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  kde_cmd->add_option("--out", kde.out, "CSV output (default stdout)");
  add_jobs(kde_cmd);
  kde_cmd->callback([&] {
    action = [&] {
      echo({"kde", json{{"values", resolve(kde.values)},
                        {"points", kde.points},
                        {"bandwidth", kde.bandwidth},
                        {"depth_scale", kde.depth_scale},
                        {"out", resolve(kde.out)}}});
      detail::require(kde.bandwidth >= 0.0, Errc::invalid_argument, "--bandwidth must be >= 0");
      const auto values = read_values(kde.values, kde.depth_scale);
      const double h = kde.bandwidth > 0.0 ? kde.bandwidth : silverman_bandwidth(values);
      const auto grid = default_kde_grid(values, h, kde.points);
      write_text(kde.out, kde_csv(gaussian_kde(values, grid, h, Jobs{jobs})), out);
      return int{exit_ok};
    };
  });

  // dataset synth | dataset cues
  auto* dataset_cmd = app.add_subcommand("dataset", "Whole-dataset processing");
  dataset_cmd->require_subcommand(1);
  struct {
    std::string root, split, out, images, summary;
    CameraFlags cam;
    DatasetOptions opt;
  } ds;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", ds.out, "Output directory")->required();
    sub->add_option("--window", ds.opt.window, "Dark channel window [px], odd")
        ->capture_default_str();
    sub->add_option("--threshold", ds.opt.threshold, "Mask threshold [intensity]")
        ->capture_default_str();
    sub->add_option("--summary", ds.summary, "Summary JSON path (default stdout)");
    sub->add_flag("--fail-fast", ds.opt.fail_fast, "Abort on the first failing sample");
    add_jobs(sub);
  };
  auto finish = [&](const DatasetSummary& s) {
    write_text(ds.summary, to_json(s).dump(2) + "\n", out);
    return s.complete() ? int{exit_ok} : int{exit_partial};
  };
  auto* ds_synth = dataset_cmd->add_subcommand("synth", "Synthesize defocus and cues for a split");
  ds_synth->add_option("--root", ds.root, "Dataset root holding rgb/ and depth/")->required();
  ds_synth->add_option("--split", ds.split, "Split list, one id per line")->required();
  ds.cam.add(ds_synth);
  ds_synth->add_option("--depth-scale", ds.opt.depth_scale, "PNG depth units per meter")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ds_synth->add_option("--max-depth", ds.opt.max_depth, "Largest accepted depth [m]")
      ->capture_default_str();
  ds_synth->add_option("--truncation", ds.opt.truncation, "Kernel half-width [multiples of r]")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ds_synth->add_option("--bits", ds.opt.png_bits, "Defocused PNG bit depth [8|16]")
      ->check(CLI::IsMember({8, 16}))
      ->capture_default_str();
  add_common(ds_synth);
  ds_synth->callback([&] {
    action = [&] {
      json f{{"root", resolve(ds.root)}, {"split", resolve(ds.split)}};
      ds.cam.echo(f);
      f["depth_scale"] = ds.opt.depth_scale;
      f["max_depth"] = ds.opt.max_depth;
      f["truncation"] = ds.opt.truncation;
      f["bits"] = ds.opt.png_bits;
      f["window"] = ds.opt.window;
      f["threshold"] = ds.opt.threshold;
      f["fail_fast"] = ds.opt.fail_fast;
      f["out"] = resolve(ds.out);
      f["summary"] = resolve(ds.summary);
      echo({"dataset synth", f});
      const CameraParams cam = ds.cam.params();
      detail::require(ds.opt.window >= 1 && ds.opt.window % 2 == 1, Errc::invalid_argument,
                      "--window must be an odd positive integer");
      detail::require(ds.opt.threshold >= 0.0 && ds.opt.threshold < 1.0, Errc::invalid_argument,
                      "--threshold must lie in [0,1)");
      ds.opt.jobs = Jobs{jobs};
      return finish(synthesize_dataset(ds.root, load_split(ds.split), cam, ds.out, ds.opt));
    };
  });
  auto* ds_cues = dataset_cmd->add_subcommand("cues", "Cue extraction for real defocused images");
  ds_cues->add_option("--images", ds.images, "Directory of defocused RGB PNGs")->required();
  add_common(ds_cues);
  ds_cues->callback([&] {
    action = [&] {
      echo({"dataset cues", json{{"images", resolve(ds.images)},
                                 {"window", ds.opt.window},
                                 {"threshold", ds.opt.threshold},
                                 {"fail_fast", ds.opt.fail_fast},
                                 {"out", resolve(ds.out)},
                                 {"summary", resolve(ds.summary)}}});
      detail::require(ds.opt.window >= 1 && ds.opt.window % 2 == 1, Errc::invalid_argument,
                      "--window must be an odd positive integer");
      ds.opt.jobs = Jobs{jobs};
      return finish(extract_dataset_cues(ds.images, ds.out, ds.opt));
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    CLI::App* target = &app;
    while (!target->get_subcommands().empty()) target = target->get_subcommands().front();
    out << target->help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    CLI::App* target = &app;
    while (!target->get_subcommands().empty()) target = target->get_subcommands().front();
    err << "error: " << e.what() << "\n" << target->help();
    return exit_validation;
  }

  if (!action) {
    err << app.help();
    return exit_validation;
  }
  try {
    return action();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return is_io_error(e.code()) ? exit_io : exit_validation;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return exit_io;
  }
}

}  // namespace dfd::cli
