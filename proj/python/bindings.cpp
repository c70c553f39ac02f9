#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "localmot/analysis.hpp"
#include "localmot/decompose.hpp"
#include "localmot/error.hpp"
#include "localmot/evaluate.hpp"
#include "localmot/ingest.hpp"
#include "localmot/local.hpp"
#include "localmot/metrics.hpp"
#include "localmot/synth.hpp"

namespace py = pybind11;
using namespace localmot;

namespace {

using Row = std::tuple<Frame, TrackId, double, double, double, double>;

std::vector<RawEntry> entries_of(const std::vector<Row>& rows) {
  std::vector<RawEntry> out;
  for (const auto& [frame, id, left, top, width, height] : rows) {
    RawEntry e;
    e.frame = frame;
    e.id = id;
    e.box = Box::make(left, top, width, height);
    out.push_back(e);
  }
  return out;
}

std::vector<Row> rows_of(const TrackSet& set) {
  std::vector<Row> out;
  for (const RawEntry& e : to_entries(set)) {
    out.emplace_back(e.frame, e.id, e.box.left, e.box.top, e.box.width, e.box.height);
  }
  return out;
}

EvalOptions options_of(const std::string& horizons, double iou_threshold, bool decompose, int jobs) {
  EvalOptions o;
  o.horizons = parse_horizons(horizons);
  o.ingest.iou_threshold = iou_threshold;
  o.decompose = decompose;
  o.jobs = jobs;
  return o;
}

py::dict metric_dict(const MetricAccumulator& a) {
  py::dict d;
  d["value"] = a.value();
  d["numerator"] = a.numerator;
  d["denominator"] = a.denominator;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.attr("__version__") = LOCALMOT_VERSION;

  py::register_exception<ContractError>(m, "ContractError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);

  py::class_<Box>(m, "Box")
      .def(py::init(&Box::make), py::arg("left"), py::arg("top"), py::arg("width"), py::arg("height"))
      .def_readonly("left", &Box::left)
      .def_readonly("top", &Box::top)
      .def_readonly("width", &Box::width)
      .def_readonly("height", &Box::height)
      .def("__repr__", [](const Box& b) {
        std::ostringstream s;
        s << "Box(" << b.left << ", " << b.top << ", " << b.width << ", " << b.height << ")";
        return s.str();
      });

  m.def("iou", &iou, py::arg("a"), py::arg("b"));

  py::class_<Sequence>(m, "Sequence")
      .def_readonly("name", &Sequence::name)
      .def_readonly("num_frames", &Sequence::num_frames)
      .def_readonly("fps", &Sequence::fps)
      .def_property_readonly("num_gt_tracks", [](const Sequence& s) { return s.gt.size(); })
      .def_property_readonly("num_pred_tracks", [](const Sequence& s) { return s.pred.size(); })
      .def("gt_rows", [](const Sequence& s) { return rows_of(s.gt); })
      .def("pred_rows", [](const Sequence& s) { return rows_of(s.pred); })
      .def("swapped", &Sequence::swapped);

  m.def(
      "make_sequence",
      [](std::string name, const std::vector<Row>& gt, const std::vector<Row>& pred,
         std::optional<Frame> num_frames, double fps) {
        IngestConfig cfg;
        cfg.num_frames_override = num_frames;
        const auto g = entries_of(gt), p = entries_of(pred);
        return build_sequence(std::move(name), g, p, cfg, fps);
      },
      py::arg("name"), py::arg("gt"), py::arg("pred"), py::arg("num_frames") = std::nullopt,
      py::arg("fps") = 0.0, "Sequence from (frame, id, left, top, width, height) rows.");

  m.def(
      "parse_mot",
      [](const std::string& text) {
        std::vector<py::tuple> out;
        for (const RawEntry& e : parse_mot(std::string_view(text))) {
          out.push_back(py::make_tuple(e.frame, e.id, e.box.left, e.box.top, e.box.width,
                                       e.box.height, e.conf, e.class_id, e.visibility));
        }
        return out;
      },
      py::arg("text"));

  m.def(
      "strict_metrics",
      [](const Sequence& seq, double iou_threshold) {
        const StrictMetrics s = evaluate_strict(OverlapSeries::build(seq, iou_threshold));
        py::dict d;
        d["det_f1"] = s.detection.value();
        d["idf1"] = s.identity.idf1;
        d["idr"] = s.identity.idr;
        d["idp"] = s.identity.idp;
        d["ata"] = s.track.ata;
        d["atr"] = s.track.atr;
        d["atp"] = s.track.atp;
        d["mota"] = s.mota.mota;
        d["id_switches"] = s.mota.id_switches;
        return d;
      },
      py::arg("sequence"), py::arg("iou_threshold") = 0.5);

  m.def(
      "local_metrics",
      [](const Sequence& seq, std::optional<Frame> radius, double iou_threshold) {
        const LocalAccumulators l = evaluate_local(OverlapSeries::build(seq, iou_threshold), radius);
        py::dict d;
        d["lidf1"] = metric_dict(l.lidf1);
        d["alta"] = metric_dict(l.alta);
        return d;
      },
      py::arg("sequence"), py::arg("radius"), py::arg("iou_threshold") = 0.5,
      "Windowed metrics at a radius in frames; None is the strict horizon.");

  m.def(
      "decompose",
      [](const Sequence& seq, std::optional<Frame> radius, double iou_threshold) {
        const OverlapSeries s = OverlapSeries::build(seq, iou_threshold);
        const FrameCorrespondence c = FrameCorrespondence::build(s);
        const DecompositionReport r = decompose_at_horizon(c, radius);
        const OverallDecomposition o = r.overall();
        py::dict d;
        d["approx_ata"] = r.approx_ata.value();
        d["no_error"] = o.no_error;
        for (const auto& [key, masses] : {std::pair{"raw", o.raw}, std::pair{"normalised", o.normalised}}) {
          py::dict e;
          e["det_fn"] = masses.det_fn;
          e["det_fp"] = masses.det_fp;
          e["split"] = masses.split;
          e["merge"] = masses.merge;
          d[key] = e;
        }
        return d;
      },
      py::arg("sequence"), py::arg("radius"), py::arg("iou_threshold") = 0.5);

  m.def(
      "evaluate_json",
      [](const std::map<std::string, std::vector<Sequence>>& trackers, const std::string& horizons,
         double iou_threshold, bool decompose, int jobs) {
        std::vector<TrackerSequences> inputs;
        for (const auto& [name, seqs] : trackers) inputs.push_back({name, seqs, {}});
        const EvalOptions o = options_of(horizons, iou_threshold, decompose, jobs);
        py::gil_scoped_release release;
        return report_json(evaluate(std::move(inputs), o));
      },
      py::arg("trackers"), py::arg("horizons"), py::arg("iou_threshold") = 0.5,
      py::arg("decompose") = false, py::arg("jobs") = 1,
      "JSON report for {tracker: [Sequence, ...]}.");

  m.def(
      "evaluate_files_json",
      [](const std::filesystem::path& gt, const std::map<std::string, std::filesystem::path>& preds,
         const std::string& horizons, double iou_threshold, std::optional<double> fps,
         bool decompose, int jobs) {
        EvalOptions o = options_of(horizons, iou_threshold, decompose, jobs);
        o.ingest.fps_override = fps;
        py::gil_scoped_release release;
        const auto truth = load_ground_truth(gt);
        std::vector<TrackerSource> sources;
        for (const auto& [name, path] : preds) sources.push_back({name, load_predictions(path)});
        return report_json(run(truth, sources, o));
      },
      py::arg("gt"), py::arg("preds"), py::arg("horizons"), py::arg("iou_threshold") = 0.5,
      py::arg("fps") = std::nullopt, py::arg("decompose") = false, py::arg("jobs") = 1);

  m.def("mean_over_horizons",
        [](const std::vector<double>& v) { return mean_over_horizons(v); }, py::arg("values"));
  m.def("association_fraction", &association_fraction, py::arg("ata"), py::arg("det_f1"));
  m.def(
      "kendall_tau_b",
      [](const std::vector<double>& a, const std::vector<double>& b) { return kendall_tau_b(a, b); },
      py::arg("a"), py::arg("b"));

  m.def(
      "compare_json",
      [](const TrackerScores& scores, const std::string& sort_key) {
        return compare_json(rank_table(scores, sort_key, lower_is_better_metrics()),
                            kendall_matrix(scores));
      },
      py::arg("scores"), py::arg("sort_key") = "mean_alta");
  m.def("tracker_scores_from_report",
        [](const std::string& text) { return tracker_scores_from_report(text); }, py::arg("report"));

  m.def(
      "fixture_catalog",
      [](std::uint64_t seed) {
        std::vector<py::tuple> out;
        for (const Fixture& f : fixture_catalog(seed)) {
          out.push_back(py::make_tuple(f.name, f.sequence, f.expected));
        }
        return out;
      },
      py::arg("seed") = 0, "(name, Sequence, expected metric values) per fixture.");
  m.def(
      "write_catalog",
      [](const std::filesystem::path& root, std::uint64_t seed) {
        for (const Fixture& f : fixture_catalog(seed)) write_fixture(root, f);
      },
      py::arg("root"), py::arg("seed") = 0);
}
