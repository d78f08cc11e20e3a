#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <iterator>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "motion_insight/analysis.hpp"
#include "motion_insight/api.hpp"
#include "motion_insight/config.hpp"
#include "motion_insight/error.hpp"
#include "motion_insight/events.hpp"
#include "motion_insight/ingest.hpp"
#include "motion_insight/kinematics.hpp"
#include "motion_insight/report.hpp"
#include "motion_insight/synthgen.hpp"

namespace py = pybind11;
namespace mi = motion_insight;
using namespace pybind11::literals;

namespace {

PyObject* g_error_type = nullptr;

template <typename Range>
py::array_t<double> to_array(const Range& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(std::size(v)));
  std::copy(std::begin(v), std::end(v), out.mutable_data());
  return out;
}

std::vector<std::uint8_t> flags_from(std::size_t n, const std::optional<std::vector<bool>>& valid) {
  if (valid && valid->size() != n) throw py::value_error("'valid' must match the length of the values");
  std::vector<std::uint8_t> flags(n, mi::frame_flags::kValid);
  if (valid) {
    for (std::size_t i = 0; i < n; ++i) flags[i] = (*valid)[i] ? mi::frame_flags::kValid : 0;
  }
  return flags;
}

class PyAnalysis {
 public:
  PyAnalysis(const std::string& manifest, const std::optional<std::string>& config, bool lenient)
      : analysis_(mi::load_dataset(manifest, lenient ? mi::ParseMode::Lenient : mi::ParseMode::Strict),
                  config ? mi::load_config(*config) : mi::Config{}),
        api_(analysis_) {}

  std::pair<int, std::string> query(const std::string& path,
                                    const std::vector<std::pair<std::string, std::string>>& params) const {
    mi::QueryParams q(params.begin(), params.end());
    auto r = api_.handle(path, q);
    return {r.status, std::move(r.body)};
  }

  std::string report(const std::optional<std::string>& action, const std::vector<std::string>& filters) const {
    mi::ReportOptions options;
    if (action || !filters.empty()) {
      options.with_selection = true;
      if (action) {
        options.action = mi::action_from_string(*action);
        if (!options.action) throw mi::Error(mi::ErrorCode::BadQuery, "unknown action '" + *action + "'");
      }
      options.filters = mi::resolve_filters(filters, analysis_.config());
    }
    return mi::build_report(analysis_, options).dump(2);
  }

  std::string csv() const { return mi::series_csv(analysis_); }

  py::dict series(std::size_t segment) const {
    if (segment >= analysis_.series().size()) throw py::index_error("segment out of range");
    const auto& s = analysis_.series()[segment];
    py::dict out;
    for (mi::Variable v : mi::kAllVariables) {
      const auto values = s.values(v);
      out[py::str(std::string(mi::to_string(v)))] = to_array(values);
    }
    std::vector<bool> valid(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) valid[i] = s.valid(i);
    out["valid"] = py::array_t<bool>(py::cast(valid));
    out["fps"] = s.fps;
    return out;
  }

  const mi::Analysis& analysis() const { return analysis_; }

 private:
  mi::Analysis analysis_;
  mi::Api api_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Motion analytics core: kinematics, events, aggregation, synthesis and the query API.";

  g_error_type = PyErr_NewException("motion_insight._core.MotionInsightError", PyExc_RuntimeError, nullptr);
  m.add_object("MotionInsightError", py::handle(g_error_type));
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const mi::Error& e) {
      py::object err = py::reinterpret_borrow<py::object>(g_error_type)(e.what());
      err.attr("code") = std::string(mi::to_string(e.code()));
      err.attr("details") = e.details();
      PyErr_SetObject(g_error_type, err.ptr());
    }
  });

  m.def(
      "synthesize",
      [](const std::string& scenario, const std::string& out_dir, std::uint64_t seed, double duration_s, double fps,
         int freeze_count, double freeze_duration_s, double arm_ratio, double weight_bias, double sit_to_stand_s,
         int joints) {
        mi::synth::ScenarioSpec spec;
        const auto parsed = mi::synth::scenario_from_string(scenario);
        if (!parsed) throw mi::Error(mi::ErrorCode::Spec, "unknown scenario '" + scenario + "'");
        spec.scenario = *parsed;
        spec.seed = seed;
        spec.duration_s = duration_s;
        spec.fps = fps;
        spec.freeze_count = freeze_count;
        spec.freeze_duration_s = freeze_duration_s;
        spec.arm_ratio = arm_ratio;
        spec.weight_bias = weight_bias;
        spec.sit_to_stand_s = sit_to_stand_s;
        spec.joint_count = joints;
        py::gil_scoped_release release;
        return mi::synth::write_files(mi::synth::generate(spec), out_dir).string();
      },
      "scenario"_a, "out_dir"_a, "seed"_a = 1, "duration_s"_a = 60.0, "fps"_a = 30.0, "freeze_count"_a = 1,
      "freeze_duration_s"_a = 1.5, "arm_ratio"_a = 3.0, "weight_bias"_a = 0.05, "sit_to_stand_s"_a = 12.0,
      "joints"_a = 22, "Write a synthetic dataset and its truth file; returns the manifest path.");

  m.def(
      "compute_series",
      [](const std::string& capture_path, bool forward_flip, bool weight_literal) {
        mi::KinematicsOptions options;
        options.forward_flip = forward_flip;
        options.weight_literal = weight_literal;
        mi::BodyVariableSeries s;
        {
          py::gil_scoped_release release;
          s = mi::compute_series(mi::parse_capture(mi::read_text_file(capture_path)), options);
        }
        py::dict out;
        out["trunk"] = to_array(s.trunk_deg);
        out["arm_l"] = to_array(s.arm_use_l);
        out["arm_r"] = to_array(s.arm_use_r);
        out["foot_l"] = to_array(s.foot_pos_l);
        out["foot_r"] = to_array(s.foot_pos_r);
        out["weight_l"] = to_array(s.weight_l);
        out["weight_r"] = to_array(s.weight_r);
        std::vector<bool> valid(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) valid[i] = s.valid(i);
        out["valid"] = py::array_t<bool>(py::cast(valid));
        out["fps"] = s.fps;
        return out;
      },
      "capture_path"_a, "forward_flip"_a = false, "weight_literal"_a = false,
      "Body variables for every frame of a capture file.");

  m.def(
      "simplify",
      [](const std::vector<double>& values, double mean, double stddev, std::int64_t first_frame,
         const std::optional<std::vector<bool>>& valid) {
        const auto flags = flags_from(values.size(), valid);
        const mi::SeriesSlice slice{mi::Variable::Trunk, first_frame, values, flags};
        const auto binned = mi::simplify(slice, {mean, stddev, values.size()});
        std::vector<std::tuple<std::int64_t, std::int64_t, double, bool>> out;
        for (const auto& b : binned.bins) out.emplace_back(b.start_frame, b.end_frame, b.mean, b.is_outlier);
        return out;
      },
      "values"_a, "mean"_a, "stddev"_a, "first_frame"_a = 0, "valid"_a = py::none(),
      "Sigma bins as (start_frame, end_frame, mean, is_outlier) tuples.");

  m.def(
      "detect_freezes",
      [](const std::vector<double>& foot_l, const std::vector<double>& foot_r, double fps,
         const std::optional<std::vector<bool>>& valid, double delta_feet_m, double min_freeze_s,
         int max_gap_frames) {
        if (foot_l.size() != foot_r.size()) throw py::value_error("foot_l and foot_r differ in length");
        mi::BodyVariableSeries s;
        s.fps = fps;
        s.flags = flags_from(foot_l.size(), valid);
        s.foot_pos_l = foot_l;
        s.foot_pos_r = foot_r;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        for (auto* v : {&s.trunk_deg, &s.arm_use_l, &s.arm_use_r, &s.weight_l, &s.weight_r}) v->assign(foot_l.size(), nan);
        s.axes_source.assign(foot_l.size(), 0);
        mi::FreezeParams p;
        p.delta_feet_m = delta_feet_m;
        p.min_freeze_s = min_freeze_s;
        p.max_gap_frames = max_gap_frames;
        const mi::Event walk{mi::Action::Walking, 0, 0, static_cast<std::int64_t>(foot_l.size()), fps};
        std::vector<std::tuple<std::int64_t, std::int64_t, double>> out;
        for (const auto& f : mi::detect_freezes_in(s, walk, p)) out.emplace_back(f.start_frame, f.end_frame, f.duration_s);
        return out;
      },
      "foot_l"_a, "foot_r"_a, "fps"_a = 30.0, "valid"_a = py::none(), "delta_feet_m"_a = 0.15,
      "min_freeze_s"_a = 1.0, "max_gap_frames"_a = 5,
      "Freeze intervals of one walking stretch as (start_frame, end_frame, duration_s) tuples.");

  py::class_<PyAnalysis>(m, "Analysis")
      .def(py::init<const std::string&, const std::optional<std::string>&, bool>(), "manifest"_a,
           "config"_a = py::none(), "lenient"_a = false, py::call_guard<py::gil_scoped_release>())
      .def("query", &PyAnalysis::query, "path"_a, "params"_a = std::vector<std::pair<std::string, std::string>>{},
           py::call_guard<py::gil_scoped_release>(), "Run an API request; returns (status, JSON body).")
      .def("report", &PyAnalysis::report, "action"_a = py::none(), "filters"_a = std::vector<std::string>{},
           py::call_guard<py::gil_scoped_release>(), "The analyze report as JSON text.")
      .def("csv", &PyAnalysis::csv, py::call_guard<py::gil_scoped_release>())
      .def("series", &PyAnalysis::series, "segment"_a = 0)
      .def_property_readonly("dataset_id", [](const PyAnalysis& a) { return a.analysis().dataset().id(); })
      .def_property_readonly("segment_count", [](const PyAnalysis& a) { return a.analysis().dataset().segment_count(); })
      .def_property_readonly("total_frames", [](const PyAnalysis& a) { return a.analysis().dataset().total_frames(); })
      .def_property_readonly("event_count", [](const PyAnalysis& a) { return a.analysis().events().size(); });
}
