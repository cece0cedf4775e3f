#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>
#include <utility>
#include <vector>

#include "absement/dba.hpp"
#include "absement/dtw.hpp"
#include "absement/error.hpp"
#include "absement/feature_io.hpp"
#include "absement/frontend.hpp"
#include "absement/manifest.hpp"
#include "absement/recognizer.hpp"
#include "absement/synth.hpp"
#include "absement/wav.hpp"

namespace py = pybind11;
using namespace absement;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

FeatureMatrix matrix_from_array(const Array& a, std::string provenance) {
  if (a.ndim() != 2) throw InvalidArgumentError("expected a 2-D array (frames x coeffs)");
  const auto frames = static_cast<std::size_t>(a.shape(0));
  const auto coeffs = static_cast<std::size_t>(a.shape(1));
  std::vector<double> values(a.data(), a.data() + frames * coeffs);
  return FeatureMatrix(frames, coeffs, std::move(values), std::move(provenance));
}

Array matrix_to_array(const FeatureMatrix& m) {
  Array out({m.frames(), m.coeffs()});
  std::copy(m.values().begin(), m.values().end(), out.mutable_data());
  return out;
}

Array vector_to_array(const std::vector<double>& v) {
  return Array(static_cast<py::ssize_t>(v.size()), v.data());
}

Reference parse_reference(const std::string& s) {
  if (s == "query") return Reference::kQuery;
  if (s == "template") return Reference::kTemplate;
  throw InvalidArgumentError("reference must be 'query' or 'template'");
}

std::vector<LabeledFeatures> labeled(const std::vector<std::pair<std::string, FeatureMatrix>>& items) {
  std::vector<LabeledFeatures> out;
  out.reserve(items.size());
  for (const auto& [label, m] : items) out.push_back({label, m});
  return out;
}

}  // namespace

PYBIND11_MODULE(_absement, m) {
  m.doc() = "Acoustic absement: MFCC features, DTW absement, barycenter averaging and "
            "template-based word recognition";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  auto input = py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<FileNotFoundError>(m, "FileNotFoundError", input.ptr());
  py::register_exception<MalformedFileError>(m, "MalformedFileError", input.ptr());
  py::register_exception<UnsupportedFormatError>(m, "UnsupportedFormatError", input.ptr());
  py::register_exception<InvalidArgumentError>(m, "InvalidArgumentError", input.ptr());
  py::register_exception<ProcessingError>(m, "ProcessingError", base.ptr());

  py::class_<FeatureMatrix>(m, "FeatureMatrix")
      .def(py::init(&matrix_from_array), py::arg("values"), py::arg("provenance") = "")
      .def_property_readonly("frames", &FeatureMatrix::frames)
      .def_property_readonly("coeffs", &FeatureMatrix::coeffs)
      .def_property("provenance", &FeatureMatrix::provenance, &FeatureMatrix::set_provenance)
      .def("to_numpy", &matrix_to_array)
      .def("__eq__", [](const FeatureMatrix& a, const FeatureMatrix& b) { return a == b; })
      .def("__repr__", [](const FeatureMatrix& f) {
        return "<FeatureMatrix " + std::to_string(f.frames()) + "x" +
               std::to_string(f.coeffs()) + " '" + f.provenance() + "'>";
      });

  py::class_<Waveform>(m, "Waveform")
      .def(py::init([](const Array& samples, int sample_rate) {
             if (samples.ndim() != 1) throw InvalidArgumentError("samples must be 1-D");
             return Waveform{{samples.data(), samples.data() + samples.size()}, sample_rate};
           }),
           py::arg("samples"), py::arg("sample_rate"))
      .def_property_readonly("samples", [](const Waveform& w) { return vector_to_array(w.samples); })
      .def_readonly("sample_rate", &Waveform::sample_rate);

  py::class_<FrontendConfig>(m, "FrontendConfig")
      .def(py::init<>())
      .def_readwrite("window_ms", &FrontendConfig::window_ms)
      .def_readwrite("hop_ms", &FrontendConfig::hop_ms)
      .def_readwrite("n_coeffs", &FrontendConfig::n_coeffs)
      .def_readwrite("n_mel_filters", &FrontendConfig::n_mel_filters)
      .def_readwrite("pre_emphasis", &FrontendConfig::pre_emphasis)
      .def_readwrite("mel_low_hz", &FrontendConfig::mel_low_hz)
      .def_readwrite("mel_high_hz", &FrontendConfig::mel_high_hz)
      .def_readwrite("log_floor", &FrontendConfig::log_floor);

  m.def("load_wav", &load_wav, py::arg("path"));
  m.def("write_wav", py::overload_cast<const std::filesystem::path&, const Waveform&>(&write_wav),
        py::arg("path"), py::arg("wave"));
  m.def("frame_count", &frame_count, py::arg("n_samples"), py::arg("sample_rate"),
        py::arg("cfg") = FrontendConfig{});
  m.def("log_energy",
        [](const Array& frame, double log_floor) {
          return log_energy({frame.data(), static_cast<std::size_t>(frame.size())}, log_floor);
        },
        py::arg("frame"), py::arg("log_floor") = 1e-10);
  m.def("mfcc", &mfcc, py::arg("wave"), py::arg("cfg") = FrontendConfig{},
        py::call_guard<py::gil_scoped_release>());

  py::class_<AbsementResult>(m, "AbsementResult")
      .def_readonly("cost", &AbsementResult::cost)
      .def_readonly("scaled_cost", &AbsementResult::scaled_cost)
      .def_readonly("query_len", &AbsementResult::query_len)
      .def_readonly("template_len", &AbsementResult::template_len)
      .def_property_readonly("path", [](const AbsementResult& r) {
        std::vector<std::pair<std::size_t, std::size_t>> steps;
        steps.reserve(r.path.size());
        for (const auto& s : r.path) steps.emplace_back(s.i, s.j);
        return steps;
      });

  m.def("euclidean_distance", [](const Array& x, const Array& y) {
    return euclidean_distance({x.data(), static_cast<std::size_t>(x.size())},
                              {y.data(), static_cast<std::size_t>(y.size())});
  });
  m.def("dtw_absement", [](const FeatureMatrix& q, const FeatureMatrix& t) { return dtw_absement(q, t); },
        py::arg("query"), py::arg("template"), py::call_guard<py::gil_scoped_release>());
  m.def("dtw_cost", [](const FeatureMatrix& q, const FeatureMatrix& t) { return dtw_cost(q, t); },
        py::arg("query"), py::arg("template"), py::call_guard<py::gil_scoped_release>());
  m.def("scaled_absement", &scaled_absement, py::arg("cost"), py::arg("template_len"));
  m.def("distance_profile",
        [](const FeatureMatrix& q, const FeatureMatrix& t, const std::string& reference) {
          return vector_to_array(distance_profile(q, t, parse_reference(reference)).per_frame);
        },
        py::arg("query"), py::arg("template"), py::arg("reference") = "query");

  py::class_<DbaOutcome>(m, "DbaOutcome")
      .def_readonly("average", &DbaOutcome::average)
      .def_readonly("objective_trace", &DbaOutcome::objective_trace)
      .def_readonly("iterations_run", &DbaOutcome::iterations_run)
      .def_readonly("init_index", &DbaOutcome::init_index);

  m.def("dba_average",
        [](const std::vector<FeatureMatrix>& inputs, std::size_t max_iterations,
           double rel_tolerance, std::optional<std::size_t> init_index,
           std::optional<std::uint64_t> seed) {
          DbaConfig cfg;
          cfg.max_iterations = max_iterations;
          cfg.rel_tolerance = rel_tolerance;
          if (seed) {
            cfg.init_choice = RandomInit{*seed};
          } else {
            cfg.init_choice = init_index.value_or(0);
          }
          py::gil_scoped_release release;
          return dba_average(inputs, cfg);
        },
        py::arg("inputs"), py::arg("max_iterations") = 10, py::arg("rel_tolerance") = 1e-6,
        py::arg("init_index") = py::none(), py::arg("seed") = py::none());

  py::class_<Lexicon>(m, "Lexicon")
      .def_property_readonly("size", &Lexicon::size)
      .def_property_readonly("coeffs", &Lexicon::coeffs)
      .def("__len__", &Lexicon::size)
      .def("__contains__", &Lexicon::contains)
      .def_property_readonly("words", [](const Lexicon& l) {
        std::vector<std::string> w;
        for (const auto& e : l.entries()) w.push_back(e.label);
        return w;
      });
  m.def("build_lexicon",
        [](const std::vector<std::pair<std::string, FeatureMatrix>>& items) {
          return build_lexicon(labeled(items));
        },
        py::arg("templates"));

  py::class_<Candidate>(m, "Candidate")
      .def_readonly("word", &Candidate::word)
      .def_readonly("scaled_absement", &Candidate::scaled_absement)
      .def_readonly("cost", &Candidate::cost)
      .def_readonly("template_len", &Candidate::template_len);

  py::class_<RecognitionResult>(m, "RecognitionResult")
      .def_readonly("query_label", &RecognitionResult::query_label)
      .def_readonly("ranked", &RecognitionResult::ranked)
      .def_readonly("k", &RecognitionResult::k)
      .def_property_readonly("top_k", [](const RecognitionResult& r) {
        const auto top = r.top_k();
        return std::vector<Candidate>(top.begin(), top.end());
      });

  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("n_queries", &EvalReport::n_queries)
      .def_readonly("k", &EvalReport::k)
      .def_readonly("top1_accuracy", &EvalReport::top1_accuracy)
      .def_readonly("topk_accuracy", &EvalReport::topk_accuracy)
      .def_readonly("per_query", &EvalReport::per_query);

  m.def("recognize", &recognize, py::arg("query"), py::arg("lexicon"), py::arg("k") = 10,
        py::arg("threads") = 0, py::call_guard<py::gil_scoped_release>());
  m.def("evaluate",
        [](const std::vector<std::pair<std::string, FeatureMatrix>>& queries, const Lexicon& lex,
           std::size_t k, std::size_t threads) {
          const auto q = labeled(queries);
          py::gil_scoped_release release;
          return evaluate(q, lex, k, threads);
        },
        py::arg("queries"), py::arg("lexicon"), py::arg("k") = 10, py::arg("threads") = 0);

  m.def("read_features", &read_features, py::arg("path"));
  m.def("write_features",
        [](const std::filesystem::path& p, const FeatureMatrix& f, const std::vector<std::string>& c) {
          write_features(p, f, c);
        },
        py::arg("path"), py::arg("features"), py::arg("comments") = std::vector<std::string>{});

  m.def("read_manifest", [](const std::filesystem::path& p) {
    std::vector<std::tuple<std::string, std::string, std::filesystem::path>> rows;
    for (const auto& r : read_manifest(p).rows) rows.emplace_back(r.word, r.speaker, r.path);
    return rows;
  });

  m.def("synth_corpus",
        [](const std::filesystem::path& out_dir, std::size_t n_words, std::size_t n_speakers,
           std::uint64_t seed, double noise_level) {
          SynthConfig cfg;
          cfg.n_words = n_words;
          cfg.n_speakers = n_speakers;
          cfg.seed = seed;
          cfg.noise_level = noise_level;
          return synth_corpus(cfg, out_dir).rows.size();
        },
        py::arg("out_dir"), py::arg("n_words") = 20, py::arg("n_speakers") = 3,
        py::arg("seed") = 0, py::arg("noise_level") = SynthConfig{}.noise_level);
}
