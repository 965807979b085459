#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "cues.hpp"
#include "dark_channel.hpp"
#include "error.hpp"
#include "io.hpp"
#include "parallel.hpp"
#include "raster.hpp"
#include "synth.hpp"

namespace dfd {

/// Ordered, duplicate-free list of sample ids (one train or test split).
class SplitList {
public:
  explicit SplitList(std::vector<std::string> ids) : ids_(std::move(ids)) {
    detail::require(!ids_.empty(), Errc::empty_input, "split list has no ids");
    std::unordered_set<std::string> seen;
    for (const auto& id : ids_)
      detail::require(seen.insert(id).second, Errc::duplicate_id, "'" + id + "' appears twice");
  }

  const std::vector<std::string>& ids() const noexcept { return ids_; }
  std::size_t size() const noexcept { return ids_.size(); }

private:
  std::vector<std::string> ids_;
};

/// One id per line; surrounding whitespace and blank lines are ignored.
inline SplitList load_split(const std::filesystem::path& path) {
  detail::require_exists(path);
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_failure, "cannot open " + path.string());
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r\n");
    ids.push_back(line.substr(b, e - b + 1));
  }
  if (ids.empty()) throw Error(Errc::empty_input, path.string() + " lists no ids");
  return SplitList(std::move(ids));
}

struct SamplePair {
  std::string id;
  RgbImage rgb;
  DepthMap depth;
};

inline std::filesystem::path rgb_path(const std::filesystem::path& root, const std::string& id) {
  return root / "rgb" / (id + ".png");
}
inline std::filesystem::path depth_path(const std::filesystem::path& root, const std::string& id) {
  return root / "depth" / (id + ".png");
}

/// Loads `<root>/rgb/<id>.png` and `<root>/depth/<id>.png`.
inline SamplePair load_pair(const std::filesystem::path& root, const std::string& id,
                            double depth_scale = 1000.0, double max_depth = default_max_depth) {
  SamplePair p{id, read_rgb(rgb_path(root, id)),
               read_depth(depth_path(root, id), depth_scale, max_depth)};
  detail::require(p.rgb.width() == p.depth.width() && p.rgb.height() == p.depth.height(),
                  Errc::dimension_mismatch,
                  id + ": rgb is " + std::to_string(p.rgb.width()) + "x" +
                      std::to_string(p.rgb.height()) + ", depth is " +
                      std::to_string(p.depth.width()) + "x" + std::to_string(p.depth.height()));
  return p;
}

/// Dark channel, cue map and mask of one defocused image.
struct CueSet {
  ScalarMap dark;
  LddcvMap cues;
  ValidityMask mask;
};

inline CueSet extract_cues(const RgbImage& defocused, int window = default_dark_window,
                           double threshold = default_mask_threshold, Jobs jobs = {}) {
  ScalarMap dark = dark_channel(defocused, window, jobs);
  LddcvMap cues = lddcv(dark, defocused, jobs);
  ValidityMask mask = validity_mask(cues, threshold);
  return {std::move(dark), std::move(cues), std::move(mask)};
}

struct DatasetOptions {
  double truncation = default_truncation;
  int window = default_dark_window;
  double threshold = default_mask_threshold;
  double depth_scale = 1000.0;
  double max_depth = default_max_depth;
  int png_bits = 8;
  Jobs jobs{1};
  bool fail_fast = false;
};

struct SampleStatus {
  std::string id;
  enum class State { ok, failed, skipped } state = State::skipped;
  std::string error;
  std::optional<Errc> code;
};

struct DatasetSummary {
  std::vector<SampleStatus> samples;  // split order
  std::size_t ok = 0;
  std::size_t failed = 0;
  std::size_t skipped = 0;

  bool complete() const noexcept { return ok == samples.size(); }
};

/// Output files written for each id, relative to the output directory.
inline std::vector<std::filesystem::path> synth_outputs(const std::filesystem::path& out,
                                                        const std::string& id) {
  return {out / (id + ".png"), out / (id + ".radius.raw"), out / (id + ".dark.raw"),
          out / (id + ".lddcv.raw"), out / (id + ".mask.png")};
}

namespace detail {

inline void write_cue_set(const CueSet& cs, const std::filesystem::path& out, const std::string& id) {
  write_map(cs.dark, out / (id + ".dark.raw"), MapFormat::raw_f32);
  write_cues(cs.cues, out / (id + ".lddcv.raw"));
  write_mask(cs.mask, out / (id + ".mask.png"));
}

// Runs `work(index)` over a split on a bounded pool, collecting per-sample
// status. Samples are claimed in split order from a shared counter.
template <typename Work>
DatasetSummary run_samples(const std::vector<std::string>& ids, const DatasetOptions& opt,
                           Work&& work) {
  DatasetSummary summary;
  summary.samples.resize(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) summary.samples[i].id = ids[i];

  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  auto worker = [&] {
    for (;;) {
      if (opt.fail_fast && stop.load()) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= ids.size()) return;
      auto& st = summary.samples[i];
      try {
        work(ids[i]);
        st.state = SampleStatus::State::ok;
      } catch (const Error& e) {
        st.state = SampleStatus::State::failed;
        st.error = e.what();
        st.code = e.code();
        stop = true;
      } catch (const std::exception& e) {
        st.state = SampleStatus::State::failed;
        st.error = e.what();
        st.code = Errc::io_failure;
        stop = true;
      }
    }
  };
  const unsigned n = std::clamp<unsigned>(opt.jobs.count, 1u,
                                          static_cast<unsigned>(std::max<std::size_t>(ids.size(), 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (const auto& s : summary.samples) {
    switch (s.state) {
      case SampleStatus::State::ok: ++summary.ok; break;
      case SampleStatus::State::failed: ++summary.failed; break;
      case SampleStatus::State::skipped: ++summary.skipped; break;
    }
  }
  if (opt.fail_fast) {
    for (const auto& s : summary.samples)
      if (s.state == SampleStatus::State::failed) throw Error(*s.code, s.error);
  }
  return summary;
}

}  // namespace detail

/// For every id: load the pair, render the defocused image, and write the
/// defocused PNG, radius map, dark channel, cue map and mask to `out`.
/// A failing sample is recorded and the rest continue, unless
/// `opt.fail_fast`, in which case the first failure (in split order) is
/// rethrown once in-flight samples finish.
inline DatasetSummary synthesize_dataset(const std::filesystem::path& root, const SplitList& split,
                                         const CameraParams& cam, const std::filesystem::path& out,
                                         const DatasetOptions& opt = {}) {
  std::filesystem::create_directories(out);
  return detail::run_samples(split.ids(), opt, [&](const std::string& id) {
    const SamplePair pair = load_pair(root, id, opt.depth_scale, opt.max_depth);
    const ScalarMap radii = blur_radius(pair.depth, cam);
    const RgbImage defocused = synthesize_from_radii(pair.rgb, radii, opt.truncation);
    const CueSet cs = extract_cues(defocused, opt.window, opt.threshold);
    std::filesystem::create_directories((out / id).parent_path());
    write_rgb(defocused, out / (id + ".png"), opt.png_bits);
    write_map(radii, out / (id + ".radius.raw"), MapFormat::raw_f32);
    detail::write_cue_set(cs, out, id);
  });
}

/// Real defocused captures without depth: only the cue outputs are written
/// (dark channel, cue map, mask). Ids are the PNG file stems under `images`.
inline DatasetSummary extract_dataset_cues(const std::filesystem::path& images,
                                           const std::filesystem::path& out,
                                           const DatasetOptions& opt = {}) {
  detail::require(std::filesystem::is_directory(images), Errc::missing_file, images.string());
  std::vector<std::string> ids;
  for (const auto& entry : std::filesystem::directory_iterator(images))
    if (entry.is_regular_file() && entry.path().extension() == ".png")
      ids.push_back(entry.path().stem().string());
  std::sort(ids.begin(), ids.end());
  detail::require(!ids.empty(), Errc::empty_input, images.string() + " holds no PNG files");
  std::filesystem::create_directories(out);
  return detail::run_samples(ids, opt, [&](const std::string& id) {
    const RgbImage img = read_rgb(images / (id + ".png"));
    detail::write_cue_set(extract_cues(img, opt.window, opt.threshold), out, id);
  });
}

}  // namespace dfd
