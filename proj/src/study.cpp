#include "setsens/study.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "setsens/errors.hpp"
#include "setsens/hsic.hpp"

namespace setsens {

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

InputSample sample_inputs(const ModelInstance& model, std::size_t n, Rng& rng) {
  const std::size_t p = model.marginals.size();
  InputSample s;
  s.raw.dim = p;
  s.raw.coords.reserve(n * p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < p; ++j) s.raw.coords.push_back(model.marginals[j].quantile(rng.uniform()));
  s.uniform = quantile_transform(s.raw, model.marginals);
  return s;
}

std::vector<GramMatrix> input_grams(const PointSet& uniform, InputKernelFamily family,
                                    std::optional<double> lengthscale,
                                    std::size_t quadrature_nodes,
                                    std::vector<double>* used_lengthscales) {
  std::vector<GramMatrix> grams;
  grams.reserve(uniform.dim);
  if (used_lengthscales) used_lengthscales->clear();
  for (std::size_t j = 0; j < uniform.dim; ++j) {
    const auto col = column(uniform, j);
    InputKernelSpec spec{family, 1.0, quadrature_nodes};
    if (family != InputKernelFamily::sobolev1) {
      spec.lengthscale = lengthscale ? *lengthscale : sample_sd(col);
      if (!(spec.lengthscale > 0.0))
        throw std::runtime_error("input " + std::to_string(j) + " has zero spread; lengthscale undefined");
    }
    if (used_lengthscales)
      used_lengthscales->push_back(family == InputKernelFamily::sobolev1 ? 0.0 : spec.lengthscale);
    grams.push_back(anovaize_gram(spec, col));
  }
  return grams;
}

OutputGram output_gram(const ModelInstance& model, const PointSet& inputs, const PointSet& points,
                       BandwidthMode mode, double fixed_sigma2, int threads) {
  OutputGram out;
  const double volume = model.domain.volume();
  for (std::size_t c = 0; c < model.components.size(); ++c) {
    const auto bits = membership_matrix(model.components[c], inputs, points, volume, threads);
    double sigma2 = fixed_sigma2;
    if (mode == BandwidthMode::heuristic) {
      const auto bw = bandwidth_heuristic(bits);
      if (bw.degenerate)
        throw DegenerateOutputError("degenerate bandwidth: all sets of component " + std::to_string(c) +
                                    " coincide on the inner sample");
      sigma2 = bw.sigma2;
    }
    out.sigma2.push_back(sigma2);
    auto g = set_kernel_gram(bits, {sigma2, volume});
    if (c == 0) {
      out.gram = std::move(g);
    } else {
      const GramMatrix* both[] = {&out.gram, &g};
      out.gram = product_gram(both, g.size());
    }
  }
  return out;
}

ReplicateResult run_replicate(const StudyConfig& config, std::size_t replicate) {
  ReplicateResult r;
  r.index = replicate;
  const std::uint64_t seed = derive_seed(config.master_seed, {tag(StreamTag::replicate), replicate});
  const auto model = make_model(config.model, config.oscillator);

  Rng input_rng(derive_seed(seed, {tag(StreamTag::inputs)}));
  Rng point_rng(derive_seed(seed, {tag(StreamTag::inner_points)}));
  const auto sample = sample_inputs(model, config.n, input_rng);
  const auto points = sample_domain(model.domain, config.m, point_rng);

  try {
    const auto out = output_gram(model, sample.raw, points, config.bandwidth, config.sigma2);
    r.sigma2 = out.sigma2;
    r.model_evaluations = model.model_evaluations();
    const auto grams = input_grams(sample.uniform, config.input_kernel, config.lengthscale,
                                   config.quadrature_nodes, &r.lengthscales);
    const auto table = indices(grams, out.gram);
    for (std::size_t j = 0; j < grams.size(); ++j)
      r.p_values.push_back(permutation_pvalue(
          grams[j], out.gram, config.permutations,
          derive_seed(seed, {tag(StreamTag::permutations), j})));
    const auto screening = screen_and_rank(table, r.p_values, config.alpha);
    r.hsic_total = table.denominator;
    r.first_order = table.first_order;
    r.total_order = table.total_order;
    r.labels = screening.labels;
    r.ranking = screening.ranking;
    r.ok = true;
  } catch (const DegenerateOutputError& e) {
    r.diagnostic = e.what();
    r.model_evaluations = model.model_evaluations();
  } catch (const NonInformativeOutputError& e) {
    r.diagnostic = e.what();
    r.model_evaluations = model.model_evaluations();
  }
  return r;
}

Quartiles quartiles(std::vector<double> values) {
  Quartiles q;
  if (values.empty()) {
    const double nan = std::nan("");
    return {nan, nan, nan, nan, nan};
  }
  std::sort(values.begin(), values.end());
  auto at = [&](double prob) {
    const double h = prob * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  q.min = values.front();
  q.q1 = at(0.25);
  q.median = at(0.5);
  q.q3 = at(0.75);
  q.max = values.back();
  return q;
}

namespace {

void aggregate(StudyReport& report) {
  const std::size_t p = report.input_names.size();
  report.aggregates.assign(p, {});
  report.failed_replicates = 0;
  for (const auto& r : report.replicates)
    if (!r.ok) ++report.failed_replicates;
  const std::size_t good = report.replicates.size() - report.failed_replicates;
  for (std::size_t j = 0; j < p; ++j) {
    auto& a = report.aggregates[j];
    a.name = report.input_names[j];
    std::vector<double> first, total;
    std::size_t accepted = 0;
    for (const auto& r : report.replicates) {
      if (!r.ok) continue;
      first.push_back(r.first_order[j]);
      total.push_back(r.total_order[j]);
      if (r.p_values[j] > report.config.alpha) ++accepted;
    }
    a.acceptance_rate = good ? static_cast<double>(accepted) / static_cast<double>(good) : std::nan("");
    a.first_order = quartiles(first);
    a.total_order = quartiles(total);
  }
}

}  // namespace

std::vector<std::size_t> StudyReport::median_ranking() const {
  std::vector<std::size_t> order(aggregates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
    return aggregates[a].first_order.median > aggregates[b].first_order.median;
  });
  return order;
}

StudyReport run_study(const StudyConfig& config) {
  config.validate();
  StudyReport report;
  report.config = config;
  report.config_text = config.to_ini();
  report.config_hash = config.hash();
  report.software_version = SETSENS_VERSION;
  {
    const auto model = make_model(config.model, config.oscillator);
    report.input_names = model.input_names;
    report.product_output = model.product_output;
  }
  report.replicates.resize(config.replicates);
  std::vector<std::exception_ptr> errors(config.replicates);

#pragma omp parallel for schedule(dynamic, 1) num_threads(config.threads) if (config.threads > 1)
  for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(config.replicates); ++r) {
    const auto idx = static_cast<std::size_t>(r);
    try {
      report.replicates[idx] = run_replicate(config, idx);
    } catch (...) {
      errors[idx] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  aggregate(report);
  return report;
}

std::string results_csv(const StudyReport& report) {
  std::ostringstream os;
  os << "replicate,input,first_order,total_order,p_value,label\n";
  for (const auto& r : report.replicates)
    for (std::size_t j = 0; j < report.input_names.size(); ++j) {
      os << r.index << ',' << report.input_names[j] << ',';
      if (r.ok)
        os << format_real(r.first_order[j]) << ',' << format_real(r.total_order[j]) << ','
           << format_real(r.p_values[j]) << ',' << to_string(r.labels[j]) << '\n';
      else
        os << "nan,nan,nan,failed\n";
    }
  return os.str();
}

namespace {

using nlohmann::json;

json quartiles_json(const Quartiles& q) {
  return {{"min", q.min}, {"q1", q.q1}, {"median", q.median}, {"q3", q.q3}, {"max", q.max}};
}

double real_from(const json& j) { return j.is_null() ? std::nan("") : j.get<double>(); }

Quartiles quartiles_from(const json& j) {
  return {real_from(j.at("min")), real_from(j.at("q1")), real_from(j.at("median")),
          real_from(j.at("q3")), real_from(j.at("max"))};
}

Label label_from(const std::string& s) {
  if (s == "influential") return Label::influential;
  if (s == "negligible") return Label::negligible;
  throw std::runtime_error("unknown label '" + s + "'");
}

}  // namespace

std::string report_json(const StudyReport& report) {
  json j;
  j["software_version"] = report.software_version;
  j["config_hash"] = report.config_hash;
  j["master_seed"] = report.config.master_seed;
  j["config"] = report.config_text;
  j["model"] = report.config.model;
  j["inputs"] = report.input_names;
  j["product_output"] = report.product_output;
  if (report.product_output)
    j["notes"] = json::array({"product of set kernels; the combined kernel may not be characteristic"});
  j["failed_replicates"] = report.failed_replicates;
  json reps = json::array();
  for (const auto& r : report.replicates) {
    json x;
    x["index"] = r.index;
    x["ok"] = r.ok;
    x["diagnostic"] = r.diagnostic;
    x["sigma2"] = r.sigma2;
    x["lengthscales"] = r.lengthscales;
    x["hsic_total"] = r.hsic_total;
    x["first_order"] = r.first_order;
    x["total_order"] = r.total_order;
    x["p_values"] = r.p_values;
    json labels = json::array();
    for (auto l : r.labels) labels.push_back(std::string(to_string(l)));
    x["labels"] = labels;
    x["ranking"] = r.ranking;
    x["model_evaluations"] = r.model_evaluations;
    reps.push_back(std::move(x));
  }
  j["replicates"] = std::move(reps);
  json aggs = json::array();
  for (const auto& a : report.aggregates)
    aggs.push_back({{"name", a.name},
                    {"acceptance_rate", a.acceptance_rate},
                    {"first_order", quartiles_json(a.first_order)},
                    {"total_order", quartiles_json(a.total_order)}});
  j["aggregates"] = std::move(aggs);
  return j.dump(2);
}

StudyReport parse_report_json(const std::string& text) {
  const json j = json::parse(text);
  StudyReport report;
  report.software_version = j.at("software_version").get<std::string>();
  report.config_hash = j.at("config_hash").get<std::string>();
  report.config_text = j.at("config").get<std::string>();
  report.config = parse_config(report.config_text);
  report.input_names = j.at("inputs").get<std::vector<std::string>>();
  report.product_output = j.at("product_output").get<bool>();
  report.failed_replicates = j.at("failed_replicates").get<std::size_t>();
  for (const auto& x : j.at("replicates")) {
    ReplicateResult r;
    r.index = x.at("index").get<std::size_t>();
    r.ok = x.at("ok").get<bool>();
    r.diagnostic = x.at("diagnostic").get<std::string>();
    r.sigma2 = x.at("sigma2").get<std::vector<double>>();
    r.lengthscales = x.at("lengthscales").get<std::vector<double>>();
    r.hsic_total = x.at("hsic_total").get<double>();
    r.first_order = x.at("first_order").get<std::vector<double>>();
    r.total_order = x.at("total_order").get<std::vector<double>>();
    r.p_values = x.at("p_values").get<std::vector<double>>();
    for (const auto& l : x.at("labels")) r.labels.push_back(label_from(l.get<std::string>()));
    r.ranking = x.at("ranking").get<std::vector<std::size_t>>();
    r.model_evaluations = x.at("model_evaluations").get<std::uint64_t>();
    report.replicates.push_back(std::move(r));
  }
  for (const auto& a : j.at("aggregates"))
    report.aggregates.push_back({a.at("name").get<std::string>(), real_from(a.at("acceptance_rate")),
                                 quartiles_from(a.at("first_order")),
                                 quartiles_from(a.at("total_order"))});
  return report;
}

void write_outputs(const StudyReport& report, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
  auto write = [](const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << content;
    if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
  };
  write(fs::path(dir) / "sa_results.csv", results_csv(report));
  write(fs::path(dir) / "sa_report.json", report_json(report));
}

std::string summary_table(const StudyReport& report) {
  std::ostringstream os;
  const std::size_t good = report.replicates.size() - report.failed_replicates;
  os << "model " << report.config.model << ", kernel " << to_string(report.config.input_kernel)
     << ", n=" << report.config.n << ", m=" << report.config.m << ", replicates " << good << "/"
     << report.replicates.size() << " ok, alpha=" << report.config.alpha << ", B="
     << report.config.permutations << "\n";
  if (report.product_output) os << "note: product of set kernels (may not be characteristic)\n";
  os << std::left << std::setw(8) << "input" << std::right << std::setw(12) << "accept(%)"
     << std::setw(12) << "S_i med" << std::setw(12) << "S_i IQR" << std::setw(12) << "S_Ti med"
     << std::setw(6) << "rank" << "  label\n";
  const auto ranking = report.median_ranking();
  for (std::size_t j = 0; j < report.aggregates.size(); ++j) {
    const auto& a = report.aggregates[j];
    const auto rank = std::find(ranking.begin(), ranking.end(), j) - ranking.begin() + 1;
    os << std::left << std::setw(8) << a.name << std::right << std::fixed << std::setprecision(1)
       << std::setw(12) << 100.0 * a.acceptance_rate << std::setprecision(4) << std::setw(12)
       << a.first_order.median << std::setw(12) << a.first_order.q3 - a.first_order.q1
       << std::setw(12) << a.total_order.median << std::setw(6) << rank << "  "
       << (a.acceptance_rate > 0.5 ? "negligible" : "influential") << "\n";
    os.unsetf(std::ios::fixed);
  }
  for (const auto& r : report.replicates)
    if (!r.ok) os << "replicate " << r.index << " failed: " << r.diagnostic << "\n";
  return os.str();
}

}  // namespace setsens
