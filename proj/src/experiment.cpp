#include "sslda/sim_lab.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

namespace sslda {

namespace {

enum Stream : std::uint64_t { kTrain1 = 1, kTrain2 = 2, kTest1 = 3, kTest2 = 4, kFolds = 5 };

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

Index count_field(const nlohmann::json& doc, const char* key, Index fallback) {
  if (!doc.contains(key)) return fallback;
  const auto& v = doc[key];
  if (!v.is_number_integer()) throw InputError(std::string("spec field '") + key + "': expected an integer");
  return static_cast<Index>(v.get<long long>());
}

MethodSummary summarize(Flavor method, const std::vector<double>& errors_pct, int failed) {
  MethodSummary s;
  s.method = method;
  s.succeeded = static_cast<int>(errors_pct.size());
  s.failed = failed;
  s.sd_pct = std::numeric_limits<double>::quiet_NaN();
  if (errors_pct.empty()) {
    s.mean_error_pct = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  double sum = 0.0;
  for (double e : errors_pct) sum += e;
  s.mean_error_pct = sum / static_cast<double>(errors_pct.size());
  if (errors_pct.size() >= 2) {
    double ss = 0.0;
    for (double e : errors_pct) ss += (e - s.mean_error_pct) * (e - s.mean_error_pct);
    s.sd_pct = std::sqrt(ss / static_cast<double>(errors_pct.size() - 1));
    s.sd_defined = true;
  }
  return s;
}

}  // namespace

Vector ExperimentSpec::mu1() const { return Vector::Zero(p); }

Vector ExperimentSpec::mu2() const {
  Vector mu = Vector::Zero(p);
  mu.head(std::min(s0, p)).setOnes();
  return mu;
}

void validate(const ExperimentSpec& spec) {
  const auto fail = [](const std::string& field, const std::string& why) {
    throw InputError("spec field '" + field + "': " + why);
  };
  if (spec.p < 1) fail("p", "must be positive");
  if (spec.s0 < 1) fail("s0", "must be positive");
  if (spec.s0 > spec.p) fail("s0", "must not exceed p (" + std::to_string(spec.p) + ")");
  if (spec.reps < 1) fail("reps", "must be positive");
  if (spec.folds < 2) fail("folds", "must be at least 2");
  if (spec.grid_size < 2) fail("grid_size", "must be at least 2");
  if (spec.n1 < std::max<Index>(2, spec.folds)) fail("n1", "must be at least max(2, folds)");
  if (spec.n2 < std::max<Index>(2, spec.folds)) fail("n2", "must be at least max(2, folds)");
  if (spec.n_test_per_class < 1) fail("n_test_per_class", "must be positive");
  if (spec.methods.empty()) fail("methods", "must list at least one method");
  if (spec.threads < 1) fail("threads", "must be positive");
  if (!(spec.law.kappa > 0.0 && spec.law.kappa <= 1.0)) fail("kappa", "must lie in (0, 1]");
  if (spec.cov.dimension() != spec.p) fail("cov", "dimension differs from p");
}

ExperimentSpec parse_experiment_spec(const nlohmann::json& doc) {
  if (!doc.is_object()) throw InputError("spec: top level must be a JSON object");
  static const std::set<std::string> known{"law", "distribution", "cov", "model", "p", "n1", "n2",
                                           "n_test_per_class", "s0", "reps", "base_seed", "methods",
                                           "folds", "grid_size", "threads", "kappa"};
  for (const auto& item : doc.items()) {
    if (!known.count(item.key())) throw InputError("spec: unknown field '" + item.key() + "'");
  }

  ExperimentSpec spec;
  const char* law_key = doc.contains("law") ? "law" : "distribution";
  if (!doc.contains(law_key) || !doc[law_key].is_string()) throw InputError("spec field 'law': expected a string");
  spec.law.kind = parse_law(doc[law_key].get<std::string>());
  if (doc.contains("kappa")) {
    if (!doc["kappa"].is_number()) throw InputError("spec field 'kappa': expected a number");
    spec.law.kappa = doc["kappa"].get<double>();
  }

  spec.p = count_field(doc, "p", spec.p);
  spec.n1 = count_field(doc, "n1", spec.n1);
  spec.n2 = count_field(doc, "n2", spec.n2);
  spec.n_test_per_class = count_field(doc, "n_test_per_class", spec.n_test_per_class);
  spec.s0 = count_field(doc, "s0", spec.s0);
  spec.reps = static_cast<int>(count_field(doc, "reps", spec.reps));
  spec.folds = static_cast<int>(count_field(doc, "folds", spec.folds));
  spec.grid_size = static_cast<int>(count_field(doc, "grid_size", spec.grid_size));
  spec.threads = static_cast<int>(count_field(doc, "threads", spec.threads));
  if (doc.contains("base_seed")) {
    if (!doc["base_seed"].is_number_unsigned()) {
      throw InputError("spec field 'base_seed': expected a non-negative integer");
    }
    spec.base_seed = doc["base_seed"].get<std::uint64_t>();
  }
  if (doc.contains("methods")) {
    if (!doc["methods"].is_array()) throw InputError("spec field 'methods': expected an array of strings");
    spec.methods.clear();
    for (const auto& m : doc["methods"]) {
      if (!m.is_string()) throw InputError("spec field 'methods': expected an array of strings");
      spec.methods.push_back(parse_flavor(m.get<std::string>()));
    }
  }
  if (spec.p < 1) throw InputError("spec field 'p': must be positive");

  const char* cov_key = doc.contains("cov") ? "cov" : "model";
  if (!doc.contains(cov_key)) throw InputError("spec field 'cov': missing");
  const auto& cov = doc[cov_key];
  if (cov.is_string()) {
    const CovKind kind = parse_cov_kind(cov.get<std::string>());
    if (kind == CovKind::explicit_matrix) throw InputError("spec field 'cov': explicit kind needs a matrix");
    spec.cov = build_sigma(kind, spec.p);
  } else if (cov.is_object() && cov.contains("kind") && cov["kind"].is_string()) {
    const CovKind kind = parse_cov_kind(cov["kind"].get<std::string>());
    if (kind != CovKind::explicit_matrix) {
      spec.cov = build_sigma(kind, spec.p);
    } else {
      if (!cov.contains("matrix") || !cov["matrix"].is_array()) {
        throw InputError("spec field 'cov.matrix': expected an array of rows");
      }
      const auto& rows = cov["matrix"];
      const auto p = static_cast<std::size_t>(spec.p);
      if (rows.size() != p) throw InputError("spec field 'cov.matrix': expected p rows");
      Matrix m(spec.p, spec.p);
      for (std::size_t i = 0; i < p; ++i) {
        if (!rows[i].is_array() || rows[i].size() != p) throw InputError("spec field 'cov.matrix': expected p columns");
        for (std::size_t j = 0; j < p; ++j) {
          if (!rows[i][j].is_number()) throw InputError("spec field 'cov.matrix': non-numeric entry");
          m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j].get<double>();
        }
      }
      spec.cov = explicit_sigma(m);
    }
  } else {
    throw InputError("spec field 'cov': expected a model name or {\"kind\": ..., \"matrix\": ...}");
  }

  validate(spec);
  return spec;
}

ExperimentSpec parse_experiment_spec_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("spec: ") + e.what());
  }
  return parse_experiment_spec(doc);
}

nlohmann::json experiment_spec_to_json(const ExperimentSpec& spec) {
  nlohmann::json doc{{"law", std::string(to_string(spec.law.kind))},
                     {"kappa", spec.law.kappa},
                     {"p", spec.p},
                     {"n1", spec.n1},
                     {"n2", spec.n2},
                     {"n_test_per_class", spec.n_test_per_class},
                     {"s0", spec.s0},
                     {"reps", spec.reps},
                     {"base_seed", spec.base_seed},
                     {"folds", spec.folds},
                     {"grid_size", spec.grid_size}};
  if (spec.cov.kind == CovKind::explicit_matrix) {
    nlohmann::json rows = nlohmann::json::array();
    for (Index i = 0; i < spec.cov.matrix.rows(); ++i) {
      rows.push_back(std::vector<double>(spec.cov.matrix.row(i).begin(), spec.cov.matrix.row(i).end()));
    }
    doc["cov"] = {{"kind", "explicit"}, {"matrix", rows}};
  } else {
    doc["cov"] = std::string(to_string(spec.cov.kind));
  }
  nlohmann::json methods = nlohmann::json::array();
  for (Flavor f : spec.methods) methods.push_back(std::string(to_string(f)));
  doc["methods"] = methods;
  return doc;
}

ReplicationResult run_replication(const ExperimentSpec& spec, int replication) {
  ReplicationResult rep;
  rep.replication = replication;
  rep.seed = spec.base_seed + static_cast<std::uint64_t>(replication);

  const Vector mu1 = spec.mu1();
  const Vector mu2 = spec.mu2();
  Rng train1_rng = make_rng(rep.seed, {kTrain1});
  Rng train2_rng = make_rng(rep.seed, {kTrain2});
  Rng test1_rng = make_rng(rep.seed, {kTest1});
  Rng test2_rng = make_rng(rep.seed, {kTest2});
  const Sample train1 = sample_elliptical(spec.law, spec.n1, mu1, spec.cov.matrix, train1_rng);
  const Sample train2 = sample_elliptical(spec.law, spec.n2, mu2, spec.cov.matrix, train2_rng);
  const Sample test1 = sample_elliptical(spec.law, spec.n_test_per_class, mu1, spec.cov.matrix, test1_rng);
  const Sample test2 = sample_elliptical(spec.law, spec.n_test_per_class, mu2, spec.cov.matrix, test2_rng);
  const std::uint64_t fold_seed = make_rng(rep.seed, {kFolds})();

  for (Flavor method : spec.methods) {
    MethodOutcome out;
    out.method = method;
    try {
      const TunedFit tuned = fit_cv(train1, train2, method, spec.folds, fold_seed, spec.grid_size);
      const auto pred1 = predict_rows(tuned.model, test1);
      const auto pred2 = predict_rows(tuned.model, test2);
      const auto wrong = std::count(pred1.begin(), pred1.end(), 2) + std::count(pred2.begin(), pred2.end(), 1);
      out.error_rate = static_cast<double>(wrong) / static_cast<double>(2 * spec.n_test_per_class);
      out.lambda = tuned.model.lambda;
      out.ok = true;
    } catch (const std::exception& e) {
      out.ok = false;
      out.failure = e.what();
    }
    rep.outcomes.push_back(std::move(out));
  }
  return rep;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  validate(spec);
  ExperimentResult result;
  result.spec = spec;
  result.replications.resize(static_cast<std::size_t>(spec.reps));

  const int workers = std::min(spec.threads, spec.reps);
  if (workers <= 1) {
    for (int r = 0; r < spec.reps; ++r) result.replications[static_cast<std::size_t>(r)] = run_replication(spec, r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int r = next++; r < spec.reps; r = next++) {
          result.replications[static_cast<std::size_t>(r)] = run_replication(spec, r);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  for (std::size_t m = 0; m < spec.methods.size(); ++m) {
    std::vector<double> errors;
    int failed = 0;
    for (const auto& rep : result.replications) {
      const auto& o = rep.outcomes[m];
      if (o.ok) {
        errors.push_back(100.0 * o.error_rate);
      } else {
        ++failed;
      }
    }
    result.summary.push_back(summarize(spec.methods[m], errors, failed));
  }
  return result;
}

double ExperimentResult::worst_failure_fraction() const {
  double worst = 0.0;
  for (const auto& s : summary) {
    const int total = s.succeeded + s.failed;
    if (total > 0) worst = std::max(worst, static_cast<double>(s.failed) / total);
  }
  return worst;
}

std::vector<SweepRow> sparsity_sweep(const ExperimentSpec& base, const std::vector<Index>& s0_values) {
  if (s0_values.empty()) throw InputError("sparsity sweep: empty s0 list");
  for (Index s0 : s0_values) {
    if (s0 < 1 || s0 > base.p) {
      throw InputError("sparsity sweep: s0=" + std::to_string(s0) + " outside [1, p=" + std::to_string(base.p) + "]");
    }
  }
  std::vector<SweepRow> rows;
  for (Index s0 : s0_values) {
    ExperimentSpec spec = base;
    spec.s0 = s0;
    const ExperimentResult res = run_experiment(spec);
    const double oracle =
        100.0 * fisher_oracle_error(spec.mu1(), spec.mu2(), spec.cov.matrix, spec.law, 20000, spec.base_seed);
    for (const auto& s : res.summary) rows.push_back(SweepRow{s0, s, oracle});
  }
  return rows;
}

std::string results_csv(const ExperimentResult& result) {
  std::ostringstream out;
  out << "distribution,model,p,method,mean_error_pct,sd_pct,reps\n";
  const auto& spec = result.spec;
  for (const auto& s : result.summary) {
    out << to_string(spec.law.kind) << ',' << to_string(spec.cov.kind) << ',' << spec.p << ',' << to_string(s.method)
        << ',' << (s.succeeded > 0 ? fixed2(s.mean_error_pct) : "") << ',' << (s.sd_defined ? fixed2(s.sd_pct) : "")
        << ',' << spec.reps << '\n';
  }
  return out.str();
}

std::string sweep_csv(const ExperimentSpec& base, const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "s0,distribution,model,p,method,mean_error_pct,sd_pct,reps,oracle_error_pct\n";
  for (const auto& r : rows) {
    const auto& s = r.summary;
    out << r.s0 << ',' << to_string(base.law.kind) << ',' << to_string(base.cov.kind) << ',' << base.p << ','
        << to_string(s.method) << ',' << (s.succeeded > 0 ? fixed2(s.mean_error_pct) : "") << ','
        << (s.sd_defined ? fixed2(s.sd_pct) : "") << ',' << base.reps << ',' << fixed2(r.oracle_error_pct) << '\n';
  }
  return out.str();
}

nlohmann::json results_json(const ExperimentResult& result) {
  nlohmann::json doc;
  doc["spec"] = experiment_spec_to_json(result.spec);
  nlohmann::json summary = nlohmann::json::array();
  for (const auto& s : result.summary) {
    nlohmann::json row{{"method", std::string(to_string(s.method))},
                       {"succeeded", s.succeeded},
                       {"failed", s.failed}};
    row["mean_error_pct"] = s.succeeded > 0 ? nlohmann::json(s.mean_error_pct) : nlohmann::json();
    row["sd_pct"] = s.sd_defined ? nlohmann::json(s.sd_pct) : nlohmann::json();
    summary.push_back(row);
  }
  doc["summary"] = summary;
  nlohmann::json reps = nlohmann::json::array();
  for (const auto& rep : result.replications) {
    nlohmann::json outcomes = nlohmann::json::array();
    for (const auto& o : rep.outcomes) {
      nlohmann::json entry{{"method", std::string(to_string(o.method))}, {"ok", o.ok}};
      if (o.ok) {
        entry["error_rate"] = o.error_rate;
        entry["lambda"] = o.lambda;
      } else {
        entry["failure"] = o.failure;
      }
      outcomes.push_back(entry);
    }
    reps.push_back({{"replication", rep.replication}, {"seed", rep.seed}, {"outcomes", outcomes}});
  }
  doc["replications"] = reps;
  return doc;
}

}  // namespace sslda
