// dirstat command-line driver.
//
//   dirstat ingest      --in RAW --normalize unit|pearson|none --out DATA
//   dirstat sample      --preset bigsim|text | --model M.json | --family F --p P --k K --kappa X
//                       --n N --seed S --out PREFIX
//   dirstat fit         --data DATA --family F --k K [--assign --kappa-method --init --tol
//                       --max-iters --threads --seed] --out PREFIX
//   dirstat cluster     --data DATA --method spkmeans|diametrical --k K [...] --out PREFIX
//   dirstat eval        --truth LABELS --pred LABELS [--truth-model M --model M] [--json]
//   dirstat bench-kappa --family F --p LIST --r GRID [--timing] [--out CSV]
//
// Exit status: 0 success, 2 usage error, 3 data error, 4 numerical failure,
// 1 for anything unexpected.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dirstat/dirstat.hpp"
#include "text_corpus.hpp"

using json = nlohmann::ordered_json;
using namespace dirstat;

namespace {

constexpr int kFormatVersion = 1;

enum ExitCode { kOk = 0, kUsage = 2, kData = 3, kNumerical = 4 };

// ---- small helpers ---------------------------------------------------------

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw data_error("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw data_error("cannot open '" + path + "' for writing");
  return out;
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in = open_in(path);
  return read_dataset(in, path);
}

std::vector<int> load_labels(const std::string& path) {
  std::ifstream in = open_in(path);
  return read_labels(in, path);
}

// Every output file carries the format version and the full configuration.
std::vector<std::string> provenance(const json& config) {
  return {"dirstat format " + std::to_string(kFormatVersion), "config " + config.dump()};
}

void save_dataset(const std::string& path, const Dataset& data, const json& config) {
  std::ofstream out = open_out(path);
  write_dataset(out, data, provenance(config));
}

void save_labels(const std::string& path, const std::vector<int>& labels, const json& config) {
  std::ofstream out = open_out(path);
  write_labels(out, labels, provenance(config));
}

void save_json(const std::string& path, const json& doc) {
  std::ofstream out = open_out(path);
  out << doc.dump(2) << '\n';
}

const char* family_name(Family f) { return f == Family::vmf ? "vmf" : "watson"; }

Family parse_family(const std::string& s) {
  if (s == "vmf") return Family::vmf;
  if (s == "watson") return Family::watson;
  throw domain_error("unknown family '" + s + "'");
}

json model_to_json(const MixtureModel& m, const json& config) {
  json doc;
  doc["version"] = kFormatVersion;
  doc["family"] = family_name(m.family);
  doc["p"] = m.dim();
  doc["K"] = m.size();
  json weights = json::array();
  json comps = json::array();
  for (const Component& c : m.components) {
    weights.push_back(c.weight);
    const Vector& mu = c.mu.coords();
    comps.push_back({{"mu", std::vector<double>(mu.data(), mu.data() + mu.size())}, {"kappa", c.kappa}});
  }
  doc["weights"] = weights;
  doc["components"] = comps;
  doc["config"] = config;
  return doc;
}

MixtureModel load_model(const std::string& path) {
  std::ifstream in = open_in(path);
  json doc;
  try {
    doc = json::parse(in);
    MixtureModel m{parse_family(doc.at("family").get<std::string>()), {}};
    const auto weights = doc.at("weights").get<std::vector<double>>();
    const json& comps = doc.at("components");
    if (weights.size() != comps.size() || weights.empty()) throw data_error(path + ": weights and components differ in count");
    const int p = doc.at("p").get<int>();
    for (std::size_t j = 0; j < comps.size(); ++j) {
      const auto mu = comps[j].at("mu").get<std::vector<double>>();
      if (static_cast<int>(mu.size()) != p) throw data_error(path + ": component mean has wrong dimension");
      Vector v = Eigen::Map<const Vector>(mu.data(), p);
      if (std::abs(v.norm() - 1.0) > 1e-9) throw data_error(path + ": component mean is not unit length");
      m.components.push_back({weights[j], UnitVector::normalized(v), comps[j].at("kappa").get<double>()});
    }
    validate(m);
    return m;
  } catch (const json::exception& e) {
    throw data_error(path + ": " + e.what());
  } catch (const domain_error& e) {
    throw data_error(path + ": " + e.what());
  }
}

// "a:b:step" or "v1,v2,...".
std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> out;
  const auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw domain_error("bad number '" + s + "' in grid '" + spec + "'");
    return v;
  };
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    for (std::string part; std::getline(ss, part, ':');) parts.push_back(part);
    if (parts.size() != 3) throw domain_error("grid '" + spec + "' must be start:stop:step");
    const double start = number(parts[0]), stop = number(parts[1]), step = number(parts[2]);
    if (!(step > 0.0) || stop < start) throw domain_error("grid '" + spec + "' is empty");
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (long i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
  } else {
    std::stringstream ss(spec);
    for (std::string part; std::getline(ss, part, ',');) out.push_back(number(part));
  }
  if (out.empty()) throw domain_error("grid '" + spec + "' is empty");
  return out;
}

// ---- commands --------------------------------------------------------------

struct IngestArgs {
  std::string in, out, normalize = "unit";
};

int cmd_ingest(const IngestArgs& a) {
  Dataset data = load_dataset(a.in);
  const Normalization mode = a.normalize == "unit"      ? Normalization::unit
                             : a.normalize == "pearson" ? Normalization::pearson
                                                        : Normalization::none;
  normalize(data, mode);
  const json config = {{"command", "ingest"}, {"in", a.in}, {"normalize", a.normalize}};
  save_dataset(a.out, data, config);
  std::cout << "rows: " << data.rows() << "\ncolumns: " << data.cols() << '\n';
  return kOk;
}

struct SampleArgs {
  std::string preset, model, family = "vmf", out;
  int p = 0, k = 0;
  double kappa = 0.0;
  long n = 0;
  std::uint64_t seed = 0;
};

int cmd_sample(const SampleArgs& a) {
  const auto start = Clock::now();
  json config = {{"command", "sample"}, {"seed", a.seed}};
  LabeledSample s;
  std::optional<MixtureModel> truth;
  if (a.preset == "bigsim") {
    if ((a.p && a.p != bigsim::kDim) || (a.k && a.k != 4)) throw domain_error("preset bigsim fixes p=1000 and k=4");
    truth = bigsim::model(a.seed);
    const Eigen::Index n = a.n ? a.n : bigsim::kPoints;
    s = sample_mixture(*truth, n, a.seed);
    config["preset"] = "bigsim";
    config["n"] = n;
  } else if (a.preset == "text") {
    dirstat_tools::CorpusSpec spec;
    if (a.p) spec.vocabulary = a.p;
    if (a.k) spec.topics = a.k;
    if (a.n) spec.documents = a.n;
    dirstat_tools::Corpus c = dirstat_tools::generate_corpus(spec, a.seed);
    s = {std::move(c.data), std::move(c.labels)};
    config["preset"] = "text";
    config["vocabulary"] = spec.vocabulary;
    config["topics"] = spec.topics;
    config["n"] = spec.documents;
  } else if (!a.preset.empty()) {
    throw domain_error("unknown preset '" + a.preset + "'");
  } else {
    if (!a.model.empty()) {
      truth = load_model(a.model);
      config["model"] = a.model;
    } else {
      if (a.p < 2 || a.k < 1) throw domain_error("sample needs --preset, --model, or --family/--p/--k/--kappa");
      const Family f = parse_family(a.family);
      if (f == Family::vmf && a.kappa < 0.0) throw domain_error("vMF kappa must be >= 0");
      Engine rng = stream(a.seed, stream_id::kMeans);
      MixtureModel m{f, {}};
      for (int j = 0; j < a.k; ++j) m.components.push_back({1.0 / a.k, UnitVector(random_unit_vector(a.p, rng)), a.kappa});
      truth = m;
      config["family"] = a.family;
      config["p"] = a.p;
      config["k"] = a.k;
      config["kappa"] = a.kappa;
    }
    const Eigen::Index n = a.n ? a.n : 1000;
    s = sample_mixture(*truth, n, a.seed);
    config["n"] = n;
  }
  save_dataset(a.out + ".data.txt", s.data, config);
  save_labels(a.out + ".labels.txt", s.labels, config);
  if (truth) save_json(a.out + ".model.json", model_to_json(*truth, config));
  std::cout << "rows: " << s.data.rows() << "\ncolumns: " << s.data.cols() << "\nwall_time_s: " << seconds_since(start)
            << '\n';
  return kOk;
}

struct FitArgs {
  std::string data, family = "vmf", assign = "soft", kappa_method = "newton2", init, out;
  int k = 0, max_iters = 200, threads = 0;
  double tol = 1e-6;
  std::uint64_t seed = 0;
};

int cmd_fit(const FitArgs& a) {
  const Family family = parse_family(a.family);
  EmConfig cfg;
  cfg.assignment = a.assign == "hard" ? AssignMode::hard : AssignMode::soft;
  cfg.kappa_method = a.kappa_method == "banerjee" ? KappaMethod::banerjee
                     : a.kappa_method == "exact"  ? KappaMethod::exact
                                                  : KappaMethod::newton2;
  cfg.max_iters = a.max_iters;
  cfg.rel_tol = a.tol;
  cfg.seed = a.seed;
  cfg.threads = a.threads;
  std::string init = a.init.empty() ? (family == Family::vmf ? "spkmeans" : "diametrical") : a.init;
  cfg.init = init == "random" ? InitStrategy::random : init == "diametrical" ? InitStrategy::diametrical : InitStrategy::spkmeans;

  const json config = {{"command", "fit"},           {"data", a.data},     {"family", a.family},
                       {"k", a.k},                   {"assign", a.assign}, {"kappa_method", a.kappa_method},
                       {"init", init},               {"tol", a.tol},       {"max_iters", a.max_iters},
                       {"threads", a.threads},       {"seed", a.seed}};
  const Dataset data = load_dataset(a.data);
  const auto start = Clock::now();
  const FitReport r = fit_em(family, data, a.k, cfg);
  // Final hard assignment of every point to its most probable component.
  const Labels labels = assign_labels(r.final_model, data, a.threads);
  const double wall = seconds_since(start);

  save_json(a.out + ".model.json", model_to_json(r.final_model, config));
  save_labels(a.out + ".labels.txt", labels, config);
  json report = {{"version", kFormatVersion},
                 {"config", config},
                 {"iterations", r.iterations},
                 {"converged", r.converged},
                 {"log_likelihood", r.log_likelihood_trace.back()},
                 {"log_likelihood_trace", r.log_likelihood_trace}};
  save_json(a.out + ".report.json", report);
  std::cout << "iterations: " << r.iterations << "\nconverged: " << (r.converged ? "yes" : "no")
            << "\nlog_likelihood: " << r.log_likelihood_trace.back() << "\nwall_time_s: " << wall << '\n';
  return kOk;
}

struct ClusterArgs {
  std::string data, method, family = "vmf", out;
  int k = 0, max_iters = 100, threads = 0, restarts = 1;
  double tol = 0.0;
  std::uint64_t seed = 0;
};

int cmd_cluster(const ClusterArgs& a) {
  const std::string method =
      a.method.empty() ? (parse_family(a.family) == Family::vmf ? "spkmeans" : "diametrical") : a.method;
  PartitionOptions opts;
  opts.seed = a.seed;
  opts.max_iters = a.max_iters;
  opts.tol = a.tol;
  opts.threads = a.threads;
  opts.restarts = a.restarts;
  const json config = {{"command", "cluster"}, {"data", a.data},         {"method", method},
                       {"k", a.k},             {"max_iters", a.max_iters}, {"tol", a.tol},
                       {"restarts", a.restarts}, {"threads", a.threads}, {"seed", a.seed}};
  const Dataset data = load_dataset(a.data);
  const auto start = Clock::now();
  const Partition part = method == "spkmeans" ? spkmeans(data, a.k, opts) : diametrical_kmeans(data, a.k, opts);
  const double wall = seconds_since(start);

  save_labels(a.out + ".labels.txt", part.labels, config);
  json centroids = json::array();
  for (const UnitVector& c : part.centroids) {
    centroids.push_back(std::vector<double>(c.coords().data(), c.coords().data() + c.dim()));
  }
  json report = {{"version", kFormatVersion},    {"config", config},
                 {"iterations", part.iterations}, {"converged", part.converged},
                 {"objective", part.objective},   {"objective_trace", part.objective_trace},
                 {"centroids", centroids}};
  save_json(a.out + ".report.json", report);
  std::cout << "iterations: " << part.iterations << "\nconverged: " << (part.converged ? "yes" : "no")
            << "\nobjective: " << part.objective << "\nwall_time_s: " << wall << '\n';
  return kOk;
}

struct EvalArgs {
  std::string truth, pred, truth_model, model;
  bool as_json = false;
};

int cmd_eval(const EvalArgs& a) {
  const std::vector<int> y1 = load_labels(a.truth);
  const std::vector<int> y2 = load_labels(a.pred);
  const Contingency t = contingency(y1, y2);
  const double score = nmi(y1, y2);
  json doc = {{"n", t.n},
              {"nmi", score},
              {"mutual_information", mutual_information(t)},
              {"entropy_truth", entropy(y1)},
              {"entropy_pred", entropy(y2)},
              {"contingency", t.counts}};
  if (!a.truth_model.empty() || !a.model.empty()) {
    if (a.truth_model.empty() || a.model.empty()) throw domain_error("--truth-model and --model go together");
    const RecoveryMetrics m = recovery_metrics(load_model(a.truth_model), load_model(a.model));
    doc["recovery"] = {{"match", m.match},
                       {"min_cosine", m.min_cosine},
                       {"max_kappa_rel_error", m.max_kappa_rel_error},
                       {"max_weight_rel_error", m.max_weight_rel_error}};
  }
  if (a.as_json) {
    std::cout << doc.dump(2) << '\n';
    return kOk;
  }
  std::printf("nmi: %.12f\nn: %lld\ncontingency (rows: truth, columns: predicted):\n", score, t.n);
  for (const auto& row : t.counts) {
    for (std::size_t j = 0; j < row.size(); ++j) std::printf(j ? " %6lld" : "%6lld", row[j]);
    std::printf("\n");
  }
  if (doc.contains("recovery")) {
    const json& r = doc["recovery"];
    std::printf("min_cosine: %.6f\nmax_kappa_rel_error: %.6f\nmax_weight_rel_error: %.6f\n",
                r["min_cosine"].get<double>(), r["max_kappa_rel_error"].get<double>(),
                r["max_weight_rel_error"].get<double>());
  }
  return kOk;
}

struct BenchArgs {
  std::string family = "vmf", p = "10,100,1000", c, r = "0.05:0.95:0.05", out;
  double a = 0.5;
  bool timing = false;
};

// Mean wall time of one call, in microseconds.
template <class F>
double time_us(F&& f) {
  constexpr int reps = 200;
  volatile double sink = 0.0;
  const auto start = Clock::now();
  for (int i = 0; i < reps; ++i) sink = sink + f();
  return seconds_since(start) * 1e6 / reps;
}

std::string csv_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int cmd_bench_kappa(const BenchArgs& b) {
  const std::vector<double> rs = parse_grid(b.r);
  for (double r : rs) {
    if (!(r > 0.0 && r < 1.0)) throw domain_error("grid value r=" + csv_number(r) + " outside (0,1)");
  }
  std::ostringstream csv;
  const json config = {{"command", "bench-kappa"}, {"family", b.family}, {"p", b.p},   {"c", b.c},
                       {"a", b.a},                 {"r", b.r},           {"timing", b.timing}};
  for (const std::string& line : provenance(config)) csv << "# " << line << '\n';
  const auto emit = [&](const std::vector<double>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) csv << (i ? "," : "") << csv_number(row[i]);
    csv << '\n';
  };

  if (parse_family(b.family) == Family::vmf) {
    csv << "p,r,kappa_banerjee,kappa_newton2,kappa_exact,residual_banerjee,residual_newton2,residual_exact";
    csv << (b.timing ? ",us_banerjee,us_newton2,us_exact\n" : "\n");
    for (double pv : parse_grid(b.p)) {
      const int p = static_cast<int>(pv);
      if (p != pv || p < 2) throw domain_error("dimension p must be an integer >= 2");
      for (double r : rs) {
        const double kb = kappa_banerjee(r, p);
        const double kn = kappa_newton(r, p, 2);
        const double ke = ap_inverse(r, p, 1e-13);
        const auto res = [&](double k) { return std::abs(specfun::bessel_ratio(p, k) - r); };
        std::vector<double> row{pv, r, kb, kn, ke, res(kb), res(kn), res(ke)};
        if (b.timing) {
          row.push_back(time_us([&] { return kappa_banerjee(r, p); }));
          row.push_back(time_us([&] { return kappa_newton(r, p, 2); }));
          row.push_back(time_us([&] { return ap_inverse(r, p, 1e-13); }));
        }
        emit(row);
      }
    }
  } else {
    std::vector<double> cs;
    if (!b.c.empty()) {
      cs = parse_grid(b.c);
    } else {
      for (double pv : parse_grid(b.p)) cs.push_back(0.5 * pv);
    }
    csv << "a,c,r,lower,mid,upper,bbg,kappa,residual_lower,residual_mid,residual_upper,residual_bbg,residual_kappa";
    csv << (b.timing ? ",us_bounds,us_bbg,us_kappa\n" : "\n");
    for (double c : cs) {
      if (!(c > b.a && b.a > 0.0)) throw domain_error("need c > a > 0");
      for (double r : rs) {
        const BoundTriple t = watson_bounds(b.a, c, r);
        const double bbg = kappa_bbg(b.a, c, r);
        const double k = g_inverse(b.a, c, r, 1e-12);
        // At kappa = 0 the residual is exactly |a/c - r|, so report it without rounding.
        const auto res = [&](double x) { return x == 0.0 ? std::abs(b.a / c - r) : std::abs(specfun::g_ratio(b.a, c, x) - r); };
        std::vector<double> row{b.a, c, r, t.lower, t.mid, t.upper, bbg, k,
                                res(t.lower), res(t.mid), res(t.upper), res(bbg), res(k)};
        if (b.timing) {
          row.push_back(time_us([&] { return watson_bounds(b.a, c, r).mid; }));
          row.push_back(time_us([&] { return kappa_bbg(b.a, c, r); }));
          row.push_back(time_us([&] { return g_inverse(b.a, c, r, 1e-12); }));
        }
        emit(row);
      }
    }
  }
  if (b.out.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out = open_out(b.out);
    out << csv.str();
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Directional statistics: von Mises-Fisher and Watson mixtures, spherical clustering"};
  app.require_subcommand(1);
  const std::vector<std::string> families{"vmf", "watson"};

  IngestArgs ingest;
  auto* c_ingest = app.add_subcommand("ingest", "Normalize raw vectors into a dataset of unit rows");
  c_ingest->add_option("--in", ingest.in, "Raw data file")->required();
  c_ingest->add_option("--normalize", ingest.normalize, "unit, pearson or none")
      ->check(CLI::IsMember({"unit", "pearson", "none"}));
  c_ingest->add_option("--out", ingest.out, "Output dataset file")->required();

  SampleArgs sample;
  auto* c_sample = app.add_subcommand("sample", "Draw a labeled sample from a mixture model or preset");
  c_sample->add_option("--preset", sample.preset, "bigsim or text")->check(CLI::IsMember({"bigsim", "text"}));
  c_sample->add_option("--model", sample.model, "Model JSON to sample from");
  c_sample->add_option("--family", sample.family, "vmf or watson")->check(CLI::IsMember(families));
  c_sample->add_option("--p", sample.p, "Dimension (vocabulary size for the text preset)");
  c_sample->add_option("--k", sample.k, "Number of components (topics for the text preset)");
  c_sample->add_option("--kappa", sample.kappa, "Shared concentration for a random model");
  c_sample->add_option("--n", sample.n, "Number of points");
  c_sample->add_option("--seed", sample.seed, "Random seed");
  c_sample->add_option("--out", sample.out, "Output prefix")->required();

  FitArgs fit;
  auto* c_fit = app.add_subcommand("fit", "Fit a vMF or Watson mixture by EM");
  c_fit->add_option("--data", fit.data, "Dataset file")->required();
  c_fit->add_option("--family", fit.family, "vmf or watson")->check(CLI::IsMember(families));
  c_fit->add_option("--k", fit.k, "Number of components")->required();
  c_fit->add_option("--assign", fit.assign, "soft or hard")->check(CLI::IsMember({"soft", "hard"}));
  c_fit->add_option("--kappa-method", fit.kappa_method, "banerjee, newton2 or exact")
      ->check(CLI::IsMember({"banerjee", "newton2", "exact"}));
  c_fit->add_option("--init", fit.init, "spkmeans, diametrical or random")
      ->check(CLI::IsMember({"spkmeans", "diametrical", "random"}));
  c_fit->add_option("--tol", fit.tol, "Relative log-likelihood tolerance");
  c_fit->add_option("--max-iters", fit.max_iters, "Iteration cap");
  c_fit->add_option("--threads", fit.threads, "Worker threads (0 = all cores)");
  c_fit->add_option("--seed", fit.seed, "Random seed");
  c_fit->add_option("--out", fit.out, "Output prefix")->required();

  ClusterArgs cluster;
  auto* c_cluster = app.add_subcommand("cluster", "Spherical or diametrical k-means");
  c_cluster->add_option("--data", cluster.data, "Dataset file")->required();
  c_cluster->add_option("--method", cluster.method, "spkmeans or diametrical")
      ->check(CLI::IsMember({"spkmeans", "diametrical"}));
  c_cluster->add_option("--family", cluster.family, "vmf (spkmeans) or watson (diametrical)")
      ->check(CLI::IsMember(families));
  c_cluster->add_option("--k", cluster.k, "Number of clusters")->required();
  c_cluster->add_option("--tol", cluster.tol, "Relative objective tolerance (0 = run to a fixpoint)");
  c_cluster->add_option("--max-iters", cluster.max_iters, "Iteration cap");
  c_cluster->add_option("--restarts", cluster.restarts, "Independent seedings; the best objective wins");
  c_cluster->add_option("--threads", cluster.threads, "Worker threads (0 = all cores)");
  c_cluster->add_option("--seed", cluster.seed, "Random seed");
  c_cluster->add_option("--out", cluster.out, "Output prefix")->required();

  EvalArgs eval;
  auto* c_eval = app.add_subcommand("eval", "Compare two labelings by normalized mutual information");
  c_eval->add_option("--truth", eval.truth, "Reference labels")->required();
  c_eval->add_option("--pred", eval.pred, "Predicted labels")->required();
  c_eval->add_option("--truth-model", eval.truth_model, "Generating model JSON");
  c_eval->add_option("--model", eval.model, "Fitted model JSON");
  c_eval->add_flag("--json", eval.as_json, "Machine-readable output");

  BenchArgs bench;
  auto* c_bench = app.add_subcommand("bench-kappa", "Tabulate concentration estimators over a grid");
  c_bench->add_option("--family", bench.family, "vmf or watson")->check(CLI::IsMember(families));
  c_bench->add_option("--p", bench.p, "Dimensions, list or start:stop:step (Watson: a=1/2, c=p/2)");
  c_bench->add_option("--c", bench.c, "Watson c values (overrides --p)");
  c_bench->add_option("--a", bench.a, "Watson a");
  c_bench->add_option("--r", bench.r, "Mean resultant / r values in (0,1), list or start:stop:step");
  c_bench->add_flag("--timing", bench.timing, "Add per-call timing columns (makes output run-dependent)");
  c_bench->add_option("--out", bench.out, "CSV file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*c_ingest) return cmd_ingest(ingest);
    if (*c_sample) return cmd_sample(sample);
    if (*c_fit) return cmd_fit(fit);
    if (*c_cluster) return cmd_cluster(cluster);
    if (*c_eval) return cmd_eval(eval);
    if (*c_bench) return cmd_bench_kappa(bench);
  } catch (const data_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kData;
  } catch (const domain_error& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const numerical_error& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kUsage;
}
