// motion-insight: validate, analyze, synth and serve.
//
// Exit codes: 0 ok, 1 validation failure, 2 usage, 3 I/O.

#include <pthread.h>
#include <signal.h>

#include <atomic>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "motion_insight/analysis.hpp"
#include "motion_insight/api.hpp"
#include "motion_insight/config.hpp"
#include "motion_insight/error.hpp"
#include "motion_insight/ingest.hpp"
#include "motion_insight/report.hpp"
#include "motion_insight/server.hpp"
#include "motion_insight/synthgen.hpp"

namespace mi = motion_insight;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

int exit_code_for(mi::ErrorCode code) {
  switch (code) {
    case mi::ErrorCode::Io:
    case mi::ErrorCode::Bind: return kExitIo;
    case mi::ErrorCode::Config:
    case mi::ErrorCode::Spec:
    case mi::ErrorCode::UnknownFilter:
    case mi::ErrorCode::BadQuery: return kExitUsage;
    default: return kExitInvalid;
  }
}

void report_error(const mi::Error& e) {
  std::cerr << "error: " << mi::to_string(e.code()) << ": " << e.what() << "\n";
  for (const auto& d : e.details()) std::cerr << "  - " << d << "\n";
}

// Threshold flags shared by analyze and serve. Unset flags leave the config
// value alone.
struct Overrides {
  std::string config_path;
  std::optional<double> delta_feet, min_freeze, min_duration, high_trunk, trunk_percentile,
      arm_ratio, weight_deviation, sanity_bound;
  std::optional<int> max_gap_frames, fallback_frames;
  std::optional<std::size_t> max_points;
  std::optional<std::string> simplify_scope;
  bool forward_flip = false;
  bool weight_literal = false;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--config", config_path,
                   std::string("Threshold config JSON (default: $") + mi::kConfigEnvVar + ")");
    cmd.add_option("--delta-feet", delta_feet, "Freeze: feet-under-pelvis band, m");
    cmd.add_option("--min-freeze", min_freeze, "Freeze: minimum duration, s");
    cmd.add_option("--max-gap-frames", max_gap_frames, "Freeze: invalid frames bridged");
    cmd.add_option("--min-duration", min_duration, "Filter min_duration default, s");
    cmd.add_option("--high-trunk", high_trunk, "Filter high_trunk default, degrees");
    cmd.add_option("--trunk-percentile", trunk_percentile, "Percentile used by high_trunk");
    cmd.add_option("--arm-ratio", arm_ratio, "Filter imbalanced_arm default ratio");
    cmd.add_option("--weight-deviation", weight_deviation, "Filter imbalanced_weight default");
    cmd.add_option("--sanity-bound", sanity_bound, "Suspect-frame displacement bound, m");
    cmd.add_option("--fallback-frames", fallback_frames, "Frames a degenerate pelvis frame may borrow axes");
    cmd.add_option("--max-points", max_points, "Heatmap points per series");
    cmd.add_option("--simplify-scope", simplify_scope, "selection or global")
        ->check(CLI::IsMember({"selection", "global"}));
    cmd.add_flag("--forward-flip", forward_flip, "Negate the forward axis");
    cmd.add_flag("--weight-literal", weight_literal, "Same-side numerator in the weight ratio");
  }

  mi::Config resolve() const {
    mi::Config c;
    if (!config_path.empty()) {
      c = mi::load_config(config_path);
    } else if (auto env = mi::config_path_from_env()) {
      c = mi::load_config(*env);
    }
    if (delta_feet) c.freeze.delta_feet_m = *delta_feet;
    if (min_freeze) c.freeze.min_freeze_s = *min_freeze;
    if (max_gap_frames) c.freeze.max_gap_frames = *max_gap_frames;
    if (min_duration) c.filters.min_duration_s = *min_duration;
    if (high_trunk) c.filters.high_trunk_deg = *high_trunk;
    if (trunk_percentile) c.filters.trunk_percentile = *trunk_percentile;
    if (arm_ratio) c.filters.arm_ratio = *arm_ratio;
    if (weight_deviation) c.filters.weight_deviation = *weight_deviation;
    if (sanity_bound) c.kinematics.sanity_bound_m = *sanity_bound;
    if (fallback_frames) c.kinematics.fallback_frames = *fallback_frames;
    if (max_points) c.max_points = *max_points;
    if (simplify_scope) c.simplify_scope = *mi::simplify_scope_from_string(*simplify_scope);
    if (forward_flip) c.kinematics.forward_flip = true;
    if (weight_literal) c.kinematics.weight_literal = true;
    mi::validate(c);
    return c;
  }
};

// ---------------------------------------------------------------------------

struct ValidateArgs {
  std::string manifest, capture, labels;
  bool lenient = false;
};

int run_validate(const ValidateArgs& args) {
  const auto mode = args.lenient ? mi::ParseMode::Lenient : mi::ParseMode::Strict;
  std::vector<std::string> problems;
  bool io_failure = false;
  auto note = [&](const std::string& where, const mi::Error& e) {
    if (e.code() == mi::ErrorCode::Io) io_failure = true;
    problems.push_back(where + std::string(mi::to_string(e.code())) + ": " + e.what());
    for (const auto& d : e.details()) problems.push_back("    " + d);
  };
  auto check_pair = [&](const std::filesystem::path& capture_path,
                        const std::filesystem::path& labels_path, const std::string& where,
                        std::optional<mi::Segment>& out) {
    mi::Capture capture;
    try {
      capture = mi::parse_capture(mi::read_text_file(capture_path));
    } catch (const mi::Error& e) {
      note(where + capture_path.string() + ": ", e);
      return;
    }
    mi::LabelFile labels;
    if (!labels_path.empty()) {
      try {
        labels = mi::parse_labels(mi::read_text_file(labels_path), capture.frame_count(), mode);
      } catch (const mi::Error& e) {
        note(where + labels_path.string() + ": ", e);
        return;
      }
      for (const auto& w : labels.warnings) std::cerr << "warning: " << w << "\n";
    }
    std::cout << where << capture_path.string() << ": " << capture.frame_count() << " frames, "
              << capture.joint_count() << " joints, " << capture.invalid_frame_count()
              << " invalid frames, " << labels.labels.size() << " labels\n";
    mi::Segment seg;
    seg.capture = std::move(capture);
    seg.labels = std::move(labels.labels);
    out = std::move(seg);
  };

  if (!args.manifest.empty()) {
    mi::SegmentManifest manifest;
    try {
      manifest = mi::parse_manifest(mi::read_text_file(args.manifest));
    } catch (const mi::Error& e) {
      report_error(e);
      return exit_code_for(e.code());
    }
    const auto base = std::filesystem::path(args.manifest).parent_path();
    std::vector<mi::Segment> segments;
    for (std::size_t i = 0; i < manifest.segments.size(); ++i) {
      const auto& ref = manifest.segments[i];
      auto resolve = [&](const std::string& p) {
        const std::filesystem::path path(p);
        return path.is_absolute() ? path : base / path;
      };
      std::optional<mi::Segment> seg;
      check_pair(resolve(ref.capture_path), resolve(ref.labels_path),
                 "segment " + std::to_string(i) + " ", seg);
      if (seg) {
        seg->ref = ref;
        segments.push_back(std::move(*seg));
      }
    }
    if (problems.empty()) {
      try {
        mi::Dataset ds(manifest.dataset_id, std::move(segments));
        std::cout << "dataset " << ds.id() << ": " << ds.segment_count() << " segments, "
                  << ds.total_frames() << " frames, " << ds.total_duration_s() << " s captured\n";
      } catch (const mi::Error& e) {
        note("", e);
      }
    }
  } else {
    std::optional<mi::Segment> seg;
    check_pair(args.capture, args.labels, "", seg);
  }

  if (problems.empty()) {
    std::cout << "ok\n";
    return kExitOk;
  }
  for (const auto& p : problems) std::cerr << "error: " << p << "\n";
  return io_failure ? kExitIo : kExitInvalid;
}

// ---------------------------------------------------------------------------

struct AnalyzeArgs {
  std::string manifest, out, csv, action;
  std::vector<std::string> filters;
  bool lenient = false;
  Overrides overrides;
};

int run_analyze(const AnalyzeArgs& args) {
  const mi::Config config = args.overrides.resolve();
  mi::Analysis analysis(
      mi::load_dataset(args.manifest, args.lenient ? mi::ParseMode::Lenient : mi::ParseMode::Strict),
      config);

  mi::ReportOptions options;
  if (!args.action.empty() || !args.filters.empty()) {
    options.with_selection = true;
    if (!args.action.empty()) options.action = mi::action_from_string(args.action);
    for (const auto& f : args.filters) {
      options.filters.push_back(mi::parse_filter(f, config.filters, config.freeze));
    }
  }
  const std::string text = mi::build_report(analysis, options).dump(2) + "\n";
  if (args.out.empty() || args.out == "-") {
    std::cout << text;
  } else {
    mi::write_text_file(args.out, text);
  }
  if (!args.csv.empty()) mi::write_text_file(args.csv, mi::series_csv(analysis));
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string scenario, out_dir;
  mi::synth::ScenarioSpec spec;
};

int run_synth(SynthArgs args) {
  args.spec.scenario = *mi::synth::scenario_from_string(args.scenario);
  const auto data = mi::synth::generate(args.spec);
  const auto manifest = mi::synth::write_files(data, args.out_dir);
  std::cout << manifest.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ServeArgs {
  std::string manifest, host = "127.0.0.1";
  int port = 8080;
  int threads = 4;
  bool strict = false;
  Overrides overrides;
};

int run_serve(const ServeArgs& args) {
  // Signals are taken by a dedicated thread; block them everywhere else
  // before the server spawns its workers.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  const mi::Config config = args.overrides.resolve();
  mi::Analysis analysis(
      mi::load_dataset(args.manifest, args.strict ? mi::ParseMode::Strict : mi::ParseMode::Lenient),
      config);
  const mi::Api api(analysis);
  mi::Server server(api, args.threads);
  const int port = server.bind(args.host, args.port);
  std::cout << "listening on http://" << args.host << ":" << port << mi::Api::kPrefix << std::endl;

  std::atomic<bool> done{false};
  std::thread watcher([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    if (!done) std::cerr << "shutting down\n";
    server.stop();
  });
  server.listen();
  done = true;
  pthread_kill(watcher.native_handle(), SIGTERM);
  watcher.join();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Motion analytics for long motion-capture recordings", "motion-insight"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "motion-insight 1.0.0");

  ValidateArgs validate;
  auto* v = app.add_subcommand("validate", "Strictly parse a capture (and labels) or a manifest");
  auto* v_manifest = v->add_option("--manifest", validate.manifest, "Segment manifest");
  auto* v_capture = v->add_option("--capture", validate.capture, "Capture file");
  v->add_option("--labels", validate.labels, "Label file for --capture")->needs(v_capture);
  v->add_flag("--lenient", validate.lenient, "Drop unknown actions with a warning");
  v_manifest->excludes(v_capture);
  v->callback([&] {
    if (validate.manifest.empty() && validate.capture.empty()) {
      throw CLI::ValidationError("validate", "one of --manifest or --capture is required");
    }
  });

  AnalyzeArgs analyze;
  auto* a = app.add_subcommand("analyze", "Write the analysis report for a dataset");
  a->add_option("manifest", analyze.manifest, "Segment manifest")->required();
  a->add_option("-o,--out", analyze.out, "Report path (default: stdout)");
  a->add_option("--csv", analyze.csv, "Also write per-frame body variables as CSV");
  a->add_option("--action", analyze.action, "Action for the selection section")
      ->check(CLI::IsMember(std::vector<std::string>{"sit_to_stand", "sitting", "stand_to_sit",
                                                     "reaching", "walking", "standing",
                                                     "taking_medicine"}));
  a->add_option("--filter", analyze.filters, "Filter 'kind' or 'kind=value'; repeatable");
  a->add_flag("--lenient", analyze.lenient, "Drop unknown actions instead of failing");
  analyze.overrides.add_to(*a);

  SynthArgs synth;
  std::vector<std::string> scenarios;
  for (auto s : {mi::synth::Scenario::CleanWalk, mi::synth::Scenario::FreezeWalk,
                 mi::synth::Scenario::FallStand, mi::synth::Scenario::ImbalancedArmWalk,
                 mi::synth::Scenario::WeightBiasWalk, mi::synth::Scenario::SlowSitToStand,
                 mi::synth::Scenario::CompositeDay}) {
    scenarios.emplace_back(mi::synth::to_string(s));
  }
  auto* s = app.add_subcommand("synth", "Generate a synthetic dataset with ground truth");
  s->add_option("scenario", synth.scenario, "Scenario name")->required()->check(CLI::IsMember(scenarios));
  s->add_option("-o,--out", synth.out_dir, "Output directory")->required();
  s->add_option("--seed", synth.spec.seed, "Random seed");
  s->add_option("--duration", synth.spec.duration_s, "Duration, s");
  s->add_option("--fps", synth.spec.fps, "Frames per second");
  s->add_option("--freeze-count", synth.spec.freeze_count, "freeze_walk: number of freezes");
  s->add_option("--freeze-duration", synth.spec.freeze_duration_s, "freeze_walk: freeze length, s");
  s->add_option("--arm-ratio", synth.spec.arm_ratio, "imbalanced_arm_walk: left/right swing ratio");
  s->add_option("--weight-bias", synth.spec.weight_bias, "weight_bias_walk: pelvis offset, m (+ left)");
  s->add_option("--sit-to-stand", synth.spec.sit_to_stand_s, "slow_sit_to_stand: transfer length, s");
  s->add_option("--joints", synth.spec.joint_count, "Skeleton size")->check(CLI::IsMember({8, 22}));

  ServeArgs serve;
  auto* sv = app.add_subcommand("serve", "Serve the query API over a dataset");
  sv->add_option("manifest", serve.manifest, "Segment manifest")->required();
  sv->add_option("--host", serve.host, "Bind address");
  sv->add_option("-p,--port", serve.port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));
  sv->add_option("--threads", serve.threads, "Worker threads")->check(CLI::Range(1, 256));
  sv->add_flag("--strict", serve.strict, "Reject unknown actions instead of dropping them");
  serve.overrides.add_to(*sv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (v->parsed()) return run_validate(validate);
    if (a->parsed()) return run_analyze(analyze);
    if (s->parsed()) return run_synth(synth);
    if (sv->parsed()) return run_serve(serve);
  } catch (const mi::Error& e) {
    report_error(e);
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}
