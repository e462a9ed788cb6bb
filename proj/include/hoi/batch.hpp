#pragma once

// Batch driver behind the `hoi` command line tool.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "hoi/errors.hpp"
#include "hoi/interactions.hpp"
#include "hoi/io.hpp"
#include "hoi/kernel_entropy.hpp"
#include "hoi/recording.hpp"

namespace hoi {

inline constexpr const char* kToolVersion = "0.1.0";

enum class View { Pearson, MutualInformation, OInformation };

inline const char* view_name(View v) {
  switch (v) {
    case View::Pearson: return "pearson";
    case View::MutualInformation: return "mi";
    case View::OInformation: return "oinfo";
  }
  return "?";
}

inline View parse_view(const std::string& s) {
  if (s == "pearson") return View::Pearson;
  if (s == "mi") return View::MutualInformation;
  if (s == "oinfo") return View::OInformation;
  throw ConfigError("unknown view '" + s + "' (expected pearson, mi or oinfo)");
}

inline Orientation parse_orientation(const std::string& s) {
  if (s == "rows-are-channels") return Orientation::RowsAreChannels;
  if (s == "rows-are-timepoints") return Orientation::RowsAreTimepoints;
  throw ConfigError("unknown orientation '" + s + "'");
}

struct RunConfig {
  KernelParams params;
  unsigned threads = 0;  // 0: HOI_THREADS or all cores
  Orientation orientation = Orientation::RowsAreChannels;
  std::filesystem::path output_dir = ".";
  std::set<View> views{View::MutualInformation, View::OInformation};
  std::optional<std::filesystem::path> input;
  std::optional<std::filesystem::path> manifest;

  void validate() const {
    params.validate();
    if (views.empty()) throw ConfigError("at least one view must be requested");
    if (input.has_value() == manifest.has_value()) {
      throw ConfigError("exactly one of --input or --manifest is required");
    }
  }
};

namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kRecordingFailed = 1;
inline constexpr int kConfigError = 2;
}  // namespace exit_code

/// Everything computed for one recording, held until all views succeed so a
/// failure never leaves partial output behind.
struct RecordingViews {
  std::optional<PairwiseView> pearson;
  std::optional<PairwiseView> mi;
  std::optional<OInfoTensor> oinfo;
  std::uint64_t eigendecompositions = 0;
};

inline RecordingViews compute_views(const Recording& raw, const RunConfig& config) {
  const Recording rec = standardize(raw);
  RecordingViews out;
  const std::uint64_t eig_before = eigendecomposition_count();
  if (config.views.count(View::OInformation) && rec.channels() < 3) {
    throw TooFewChannels("oinfo view needs at least 3 channels, recording has " +
                         std::to_string(rec.channels()));
  }
  if (config.views.count(View::Pearson)) out.pearson = pearson_view(rec);
  if (config.views.count(View::MutualInformation) || config.views.count(View::OInformation)) {
    const EntropyCache cache = build_cache(rec, config.params, config.threads);
    if (config.views.count(View::MutualInformation)) out.mi = pairwise_view(cache);
    if (config.views.count(View::OInformation)) out.oinfo = oinfo_tensor(cache, config.threads);
  }
  out.eigendecompositions = eigendecomposition_count() - eig_before;
  return out;
}

inline std::filesystem::path view_path(const std::filesystem::path& dir, const std::string& id,
                                       View v, const char* ext) {
  return dir / (id + "_" + view_name(v) + ext);
}

inline void write_views(const RecordingViews& views, const Recording& rec,
                        const RunConfig& config, std::optional<int> label) {
  io::Sidecar meta{rec.subject_id,      "",        config.params.sigma, config.params.alpha,
                   rec.channels(),      rec.timepoints(), kToolVersion, label};
  const auto& dir = config.output_dir;
  auto emit_matrix = [&](View v, const PairwiseView& m) {
    io::write_matrix_csv(view_path(dir, rec.subject_id, v, ".csv"), m.values);
    meta.view = view_name(v);
    io::write_sidecar(view_path(dir, rec.subject_id, v, ".json"), meta);
  };
  if (views.pearson) emit_matrix(View::Pearson, *views.pearson);
  if (views.mi) emit_matrix(View::MutualInformation, *views.mi);
  if (views.oinfo) {
    io::write_tensor(view_path(dir, rec.subject_id, View::OInformation, ".hoi"), *views.oinfo);
    meta.view = view_name(View::OInformation);
    io::write_sidecar(view_path(dir, rec.subject_id, View::OInformation, ".json"), meta);
  }
}

/// Computes and writes the configured views for a single CSV or every
/// manifest entry. Returns 0 on success, 1 if any recording failed (the rest
/// are still processed) and 2 on configuration errors. Progress and errors go
/// to `log`.
inline int run_views(const RunConfig& config, std::ostream& log) {
  struct Job {
    std::filesystem::path path;
    std::string subject_id;
    std::optional<int> label;
  };
  std::vector<Job> jobs;
  try {
    config.validate();
    std::filesystem::create_directories(config.output_dir);
    if (config.input) {
      jobs.push_back({*config.input, config.input->stem().string(), std::nullopt});
    } else {
      for (const auto& e : load_manifest(*config.manifest).entries) {
        jobs.push_back({e.path, e.subject_id, e.label});
      }
    }
  } catch (const std::exception& e) {
    log << "config error: " << e.what() << '\n';
    return exit_code::kConfigError;
  }

  int status = exit_code::kOk;
  for (const auto& job : jobs) {
    try {
      const auto start = std::chrono::steady_clock::now();
      Recording rec = load_csv(job.path, config.orientation);
      rec.subject_id = job.subject_id;
      const RecordingViews views = compute_views(rec, config);
      write_views(views, rec, config, job.label);
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      log << "subject " << job.subject_id << ": C=" << rec.channels()
          << " T=" << rec.timepoints() << " eigendecompositions=" << views.eigendecompositions
          << " elapsed=" << elapsed.count() << "s\n";
    } catch (const std::exception& e) {
      log << "error: subject " << job.subject_id << ": " << e.what() << '\n';
      status = exit_code::kRecordingFailed;
    }
  }
  return status;
}

struct InspectRequest {
  std::filesystem::path tensor_path;
  std::size_t i = 0, j = 0, k = 0;
  bool recompute = false;
  std::optional<std::filesystem::path> input;
  Orientation orientation = Orientation::RowsAreChannels;
  KernelParams params;
};

/// Prints one stored tensor cell and, on request, its TC/DTC breakdown
/// recomputed from the source recording.
inline int run_inspect(const InspectRequest& req, std::ostream& out, std::ostream& log) {
  if (req.recompute && !req.input) {
    log << "config error: --recompute needs --input\n";
    return exit_code::kConfigError;
  }
  try {
    req.params.validate();
    const OInfoTensor tensor = io::read_tensor(req.tensor_path);
    const std::size_t c = tensor.size();
    if (req.i >= c || req.j >= c || req.k >= c) {
      throw IndexError("index out of range for C=" + std::to_string(c));
    }
    const bool degenerate = req.i == req.j || req.i == req.k || req.j == req.k;
    out << "cell (" << req.i << "," << req.j << "," << req.k << ") C=" << c
        << " o=" << io::format_double(tensor(req.i, req.j, req.k));
    if (degenerate) out << " (degenerate cell: repeated index, sentinel 0)";
    out << '\n';
    if (!req.recompute || degenerate) return exit_code::kOk;

    const Recording full = standardize(load_csv(*req.input, req.orientation));
    if (full.channels() != c) {
      throw ShapeError("recording has " + std::to_string(full.channels()) +
                       " channels but tensor has " + std::to_string(c));
    }
    // Singles and pairs depend only on their own channels, so a 3-channel
    // cache reproduces the full-recording values exactly.
    std::array<std::size_t, 3> idx{req.i, req.j, req.k};
    std::sort(idx.begin(), idx.end());
    Recording sub;
    sub.data.resize(3, full.data.cols());
    for (int r = 0; r < 3; ++r) sub.data.row(r) = full.data.row(static_cast<Eigen::Index>(idx[r]));
    const EntropyCache cache = build_cache(sub, req.params, 1);
    const TcDtcBreakdown b = triplet_o_information(cache, 0, 1, 2);
    out << "recomputed tc=" << io::format_double(b.tc) << " dtc=" << io::format_double(b.dtc)
        << " o=" << io::format_double(b.o) << " H_ijk=" << io::format_double(b.triple_joint)
        << '\n';
    return exit_code::kOk;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return exit_code::kRecordingFailed;
  }
}

}  // namespace hoi
