#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mtdiag/corpus.hpp"
#include "mtdiag/error.hpp"
#include "mtdiag/metrics.hpp"
#include "mtdiag/noise.hpp"
#include "mtdiag/reasoning.hpp"
#include "mtdiag/stats.hpp"
#include "mtdiag/tar.hpp"
#include "mtdiag/tokenize.hpp"
#include "mtdiag/typology.hpp"
#include "mtdiag/version.hpp"

namespace py = pybind11;
using namespace mtdiag;

namespace {

py::dict correlation_dict(const CorrelationResult& c) {
  py::dict d;
  d["r"] = c.r;
  d["rho"] = c.rho;
  d["tau"] = c.tau;
  d["p_r"] = c.p_r;
  d["p_rho"] = c.p_rho;
  d["p_tau"] = c.p_tau;
  d["n"] = c.n;
  d["significant_r"] = c.significant_r;
  d["significant_rho"] = c.significant_rho;
  d["significant_tau"] = c.significant_tau;
  return d;
}

}  // namespace

PYBIND11_MODULE(_mtdiag, m) {
  m.doc() = "machine-translation diagnostics: token activation rate, output noise, "
            "rank correlations and leave-one-out sweeps";
  m.attr("__version__") = MTDIAG_VERSION;

  py::register_exception<Error>(m, "MtdiagError");

  // tokenization
  py::class_<VocabModel>(m, "VocabModel")
      .def_readonly("model_name", &VocabModel::model_name)
      .def_readonly("vocab_size", &VocabModel::vocab_size)
      .def_readonly("byte_level", &VocabModel::byte_level);
  m.def("load_vocab", &load_vocab, py::arg("vocab_path"), py::arg("merges_path") = std::nullopt,
        py::arg("byte_level") = true, py::arg("model_name") = "");
  m.def(
      "encode",
      [](const VocabModel& model, const std::string& text) { return encode(model, text).ids; },
      py::arg("model"), py::arg("text"));
  m.def(
      "decode",
      [](const VocabModel& model, const std::vector<int64_t>& ids) { return decode(model, ids); },
      py::arg("model"), py::arg("ids"));
  m.def(
      "unique_ids",
      [](const std::vector<std::vector<int64_t>>& sequences) {
        std::vector<IdSequence> seqs;
        for (size_t i = 0; i < sequences.size(); ++i) {
          seqs.push_back({std::to_string(i), sequences[i]});
        }
        auto ids = unique_ids(seqs);
        return std::vector<int64_t>(ids.begin(), ids.end());
      },
      py::arg("sequences"));

  // token activation rate
  m.def("tar", &token_activation_rate, py::arg("unique_count"), py::arg("vocab_size"));
  m.def(
      "tar_percent",
      [](int64_t unique_count, int64_t vocab_size, int decimals) {
        TarRecord rec{"", "", unique_count, vocab_size};
        return rec.percent(decimals);
      },
      py::arg("unique_count"), py::arg("vocab_size"), py::arg("decimals") = 2);
  m.def(
      "tar_for_texts",
      [](const VocabModel& model, const std::vector<std::string>& texts,
         const std::string& language) {
        TarRecord rec = tar_for_language(model, texts, language);
        py::dict d;
        d["language"] = rec.language;
        d["model"] = rec.model_name;
        d["unique_count"] = rec.unique_count;
        d["vocab_size"] = rec.vocab_size;
        d["tar"] = rec.ratio();
        return d;
      },
      py::arg("model"), py::arg("texts"), py::arg("language"));

  // corpus sampling and prompts
  m.def(
      "sample",
      [](const std::vector<std::string>& items, size_t n, uint64_t seed) {
        Corpus c;
        c.pair = {"xx", "yy"};
        for (size_t i = 0; i < items.size(); ++i) {
          c.instances.push_back({std::to_string(i), items[i], {}, {}, {}});
        }
        Corpus s = sample(c, n, seed);
        std::vector<std::string> out;
        for (const auto& inst : s.instances) out.push_back(inst.src_text);
        return out;
      },
      py::arg("items"), py::arg("n"), py::arg("seed"));
  m.def(
      "render_prompt",
      [](const std::string& tpl, const std::string& src, const std::string& tgt,
         const std::string& src_text) {
        return render_prompt(parse_prompt_template(tpl), LanguagePair::make(src, tgt), src_text,
                             {});
      },
      py::arg("template"), py::arg("src"), py::arg("tgt"), py::arg("src_text"));

  // metrics
  m.def(
      "bleu",
      [](const std::vector<std::string>& hyps, const std::vector<std::string>& refs,
         const std::string& smoothing) {
        BleuConfig cfg;
        if (smoothing == "exp") cfg.smoothing = BleuConfig::Smoothing::exp;
        return bleu(hyps, refs, cfg);
      },
      py::arg("hypotheses"), py::arg("references"), py::arg("smoothing") = "none");
  m.def(
      "chrf",
      [](const std::vector<std::string>& hyps, const std::vector<std::string>& refs) {
        return chrf(hyps, refs);
      },
      py::arg("hypotheses"), py::arg("references"));

  // noise detection
  m.def(
      "detect_explanatory",
      [](const std::string& text, const std::vector<std::string>& patterns) {
        return detect_explanatory(text, NoisePatternSet::from_strings(patterns));
      },
      py::arg("text"), py::arg("patterns"));
  m.def(
      "wrong_language",
      [](const std::string& lang, double confidence, const std::string& expected,
         double threshold) {
        return wrong_language({lang, confidence}, expected, threshold);
      },
      py::arg("lang"), py::arg("confidence"), py::arg("expected"), py::arg("threshold") = 0.60);

  // reasoning segments
  m.def(
      "split_reasoning",
      [](const std::string& raw, const std::string& open, const std::string& close) {
        ReasoningSplit s = split_reasoning(raw, open, close);
        return py::make_tuple(s.reasoning_text, s.answer_text, s.unterminated);
      },
      py::arg("raw"), py::arg("open") = kDefaultReasoningOpen,
      py::arg("close") = kDefaultReasoningClose);

  // typology
  m.def(
      "mean_distance",
      [](const std::vector<double>& facets) {
        if (facets.size() != 6) throw Error("mean_distance expects 6 facet values");
        FacetValues f;
        std::copy(facets.begin(), facets.end(), f.begin());
        return mean_distance(f);
      },
      py::arg("facets"));

  // statistics
  m.def(
      "pearson",
      [](const std::vector<double>& x, const std::vector<double>& y) {
        auto [r, p] = pearson(x, y);
        return py::make_tuple(r, p);
      },
      py::arg("x"), py::arg("y"));
  m.def(
      "spearman",
      [](const std::vector<double>& x, const std::vector<double>& y) {
        auto [rho, p] = spearman(x, y);
        return py::make_tuple(rho, p);
      },
      py::arg("x"), py::arg("y"));
  m.def(
      "kendall",
      [](const std::vector<double>& x, const std::vector<double>& y) {
        auto [tau, p] = kendall(x, y);
        return py::make_tuple(tau, p);
      },
      py::arg("x"), py::arg("y"));
  m.def(
      "leave_one_out",
      [](const std::vector<std::string>& labels, const std::vector<double>& x,
         const std::vector<double>& y, double alpha) {
        PairedSample sample{labels, x, y};
        LooResult result = leave_one_out(sample, alpha);
        py::list rows;
        for (const auto& [label, c] : result.rows) {
          py::dict d = correlation_dict(c);
          d["left_out"] = label;
          rows.append(d);
        }
        return rows;
      },
      py::arg("labels"), py::arg("x"), py::arg("y"), py::arg("alpha") = kDefaultAlpha);
  m.def(
      "ols_fit",
      [](const std::vector<double>& x, const std::vector<double>& y) {
        OlsFit fit = ols_fit(x, y);
        return py::make_tuple(fit.slope, fit.intercept, fit.r_squared);
      },
      py::arg("x"), py::arg("y"));
}
