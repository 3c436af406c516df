// Command-line front end.
//
// Exit codes: 0 success, 2 input or validation error, 3 numerical failure.

#include "sslda/classifier.hpp"
#include "sslda/dataset.hpp"
#include "sslda/model_io.hpp"
#include "sslda/sim_lab.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

double round4(double v) { return std::isfinite(v) ? std::round(v * 1e4) / 1e4 : v; }

json ratio_json(double v, bool defined) { return defined ? json(round4(v)) : json(); }

json metrics_json(const sslda::MetricsReport& m) {
  return json{{"tp", m.tp},
              {"tn", m.tn},
              {"fp", m.fp},
              {"fn", m.fn},
              {"specificity", ratio_json(m.specificity, m.defined.specificity)},
              {"sensitivity", ratio_json(m.sensitivity, m.defined.sensitivity)},
              {"precision", ratio_json(m.precision, m.defined.precision)},
              {"accuracy", ratio_json(m.accuracy, m.defined.accuracy)},
              {"misclassification_rate", ratio_json(m.misclassification_rate, m.defined.accuracy)}};
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw sslda::InputError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw sslda::InputError("cannot write " + path.string());
  out << body;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw sslda::InputError("cannot create output directory " + dir.string());
}

std::vector<sslda::Index> parse_s0_list(const std::string& text) {
  std::vector<sslda::Index> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      values.push_back(static_cast<sslda::Index>(v));
    } catch (const std::exception&) {
      throw sslda::InputError("--s0: not an integer: '" + item + "'");
    }
  }
  if (values.empty()) throw sslda::InputError("--s0: empty list");
  return values;
}

struct Report {
  json doc;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  explicit Report(const std::string& command) {
    doc["command"] = command;
    doc["version"] = SSLDA_VERSION;
  }
  void print() {
    doc["wall_time_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << doc.dump(2) << std::endl;
  }
};

struct CsvFlags {
  bool no_header = false;
  bool label_last = false;
  sslda::CsvOptions options() const { return {!no_header, label_last}; }
};

void add_csv_flags(CLI::App* cmd, CsvFlags& flags) {
  cmd->add_flag("--no-header", flags.no_header, "CSV has no header row");
  cmd->add_flag("--label-last", flags.label_last, "The last CSV column holds the class label");
}

sslda::LabeledDataset load_two_class(const fs::path& path, const CsvFlags& flags) {
  if (flags.no_header && !flags.label_last) {
    throw sslda::InputError("headerless training data needs --label-last to locate the labels");
  }
  auto data = sslda::read_labeled_csv(path, flags.options());
  if (!data.has_labels()) throw sslda::InputError(path.string() + ": no 'label' column");
  return data;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatial-sign sparse linear discriminant analysis"};
  app.require_subcommand(1);

  std::string echo;
  for (int i = 0; i < argc; ++i) echo += (i ? " " : "") + std::string(argv[i]);

  // version
  auto* version = app.add_subcommand("version", "Print the tool version");

  // simulate
  std::string spec_path;
  std::string out_dir = ".";
  int threads = 0;
  auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo experiment from a JSON spec");
  simulate->add_option("--spec", spec_path, "Experiment spec (JSON)")->required();
  simulate->add_option("--out", out_dir, "Output directory for results.csv and results.json");
  simulate->add_option("--threads", threads, "Worker threads for replications (overrides the spec)");

  // sweep
  std::string s0_text;
  auto* sweep = app.add_subcommand("sweep", "Error versus number of informative features s0");
  sweep->add_option("--spec", spec_path, "Base experiment spec (JSON)")->required();
  sweep->add_option("--s0", s0_text, "Comma-separated s0 values")->required();
  sweep->add_option("--out", out_dir, "Output directory for sweep.csv");
  sweep->add_option("--threads", threads, "Worker threads for replications (overrides the spec)");

  // fit
  std::string train_path, model_path, flavor_text = "sslda";
  double lambda = -1.0;
  bool use_cv = false;
  int folds = 10;
  int grid_size = 20;
  std::uint64_t seed = 1;
  CsvFlags csv;
  auto* fit = app.add_subcommand("fit", "Fit a discriminant model on a labeled CSV");
  fit->add_option("train", train_path, "Training CSV")->required();
  fit->add_option("model", model_path, "Output model JSON")->required();
  fit->add_option("--flavor", flavor_text, "sslda | lda-clime | ls-lda");
  auto* lambda_opt = fit->add_option("--lambda", lambda, "Fixed tuning parameter");
  auto* cv_flag = fit->add_flag("--cv", use_cv, "Choose lambda by K-fold cross-validation");
  lambda_opt->excludes(cv_flag);
  fit->add_option("--folds", folds, "Cross-validation folds");
  fit->add_option("--grid", grid_size, "Lambda grid size for --cv");
  fit->add_option("--seed", seed, "Seed for the fold assignment");
  add_csv_flags(fit, csv);

  // predict
  std::string test_path, predictions_path;
  auto* predict = app.add_subcommand("predict", "Classify the rows of a CSV with a saved model");
  predict->add_option("model", model_path, "Model JSON")->required();
  predict->add_option("test", test_path, "CSV to classify")->required();
  predict->add_option("output", predictions_path, "Predictions CSV")->required();
  add_csv_flags(predict, csv);

  // split-eval
  std::string data_path;
  int reps = 100;
  double train_fraction = 0.5;
  auto* split = app.add_subcommand("split-eval", "Repeated stratified train/test split evaluation");
  split->add_option("data", data_path, "Labeled CSV")->required();
  split->add_option("--flavor", flavor_text, "sslda | lda-clime | ls-lda");
  split->add_option("--reps", reps, "Number of random splits");
  split->add_option("--train-fraction", train_fraction, "Share of each class used for training");
  split->add_option("--folds", folds, "Cross-validation folds");
  split->add_option("--grid", grid_size, "Lambda grid size");
  split->add_option("--seed", seed, "Seed for splits and folds");
  split->add_option("--out", out_dir, "Output directory for split_metrics.csv and summary.json");
  add_csv_flags(split, csv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*version) {
      std::cout << "sslda " << SSLDA_VERSION << std::endl;
      return 0;
    }

    Report report(echo);

    if (*simulate || *sweep) {
      sslda::ExperimentSpec spec = sslda::parse_experiment_spec_text(read_file(spec_path));
      if (threads > 0) spec.threads = threads;
      report.doc["spec"] = sslda::experiment_spec_to_json(spec);
      report.doc["seed"] = spec.base_seed;
      ensure_dir(out_dir);

      if (*simulate) {
        const sslda::ExperimentResult result = sslda::run_experiment(spec);
        write_file(fs::path(out_dir) / "results.csv", sslda::results_csv(result));
        json doc = sslda::results_json(result);
        doc["command"] = echo;
        doc["version"] = SSLDA_VERSION;
        write_file(fs::path(out_dir) / "results.json", doc.dump(2) + "\n");
        report.doc["summary"] = doc["summary"];
        report.print();
        return result.worst_failure_fraction() > 0.10 ? kExitNumerical : 0;
      }

      const auto s0_values = parse_s0_list(s0_text);
      const auto rows = sslda::sparsity_sweep(spec, s0_values);
      write_file(fs::path(out_dir) / "sweep.csv", sslda::sweep_csv(spec, rows));
      double worst = 0.0;
      json table = json::array();
      for (const auto& r : rows) {
        const int total = r.summary.succeeded + r.summary.failed;
        if (total > 0) worst = std::max(worst, static_cast<double>(r.summary.failed) / total);
        table.push_back({{"s0", r.s0},
                         {"method", std::string(sslda::to_string(r.summary.method))},
                         {"mean_error_pct", r.summary.mean_error_pct},
                         {"failed", r.summary.failed}});
      }
      report.doc["sweep"] = table;
      report.print();
      return worst > 0.10 ? kExitNumerical : 0;
    }

    if (*fit) {
      const auto data = load_two_class(train_path, csv);
      const sslda::Matrix class1 = sslda::class_rows(data, 1);
      const sslda::Matrix class2 = sslda::class_rows(data, 2);
      if (class1.rows() < 2 || class2.rows() < 2) {
        throw sslda::InputError("training data needs at least 2 rows of each class (found " +
                                std::to_string(class1.rows()) + " and " + std::to_string(class2.rows()) + ")");
      }
      const sslda::Flavor flavor = sslda::parse_flavor(flavor_text);
      sslda::DiscriminantModel model;
      if (use_cv) {
        const auto tuned = sslda::fit_cv(class1, class2, flavor, folds, seed, grid_size);
        model = tuned.model;
        report.doc["cv_correct"] = tuned.cv.correct;
        report.doc["cv_grid"] = tuned.cv.grid;
        report.doc["seed"] = seed;
      } else {
        if (!(lambda >= 0.0)) throw sslda::InputError("give --lambda <non-negative value> or --cv");
        model = sslda::fit(class1, class2, lambda, flavor);
      }
      sslda::save_model(model, model_path);
      report.doc["flavor"] = std::string(sslda::to_string(flavor));
      report.doc["lambda"] = model.lambda;
      report.doc["support_size"] = model.support_size();
      report.doc["p"] = model.dimension();
      report.doc["model"] = model_path;
      report.print();
      return 0;
    }

    if (*predict) {
      const sslda::DiscriminantModel model = sslda::load_model(model_path);
      const auto data = sslda::read_labeled_csv(test_path, csv.options());
      if (data.cols() != model.dimension()) {
        throw sslda::InputError(test_path + ": " + std::to_string(data.cols()) + " feature columns, model has p=" +
                                std::to_string(model.dimension()));
      }
      const auto predicted = sslda::predict_rows(model, data.features);
      std::ostringstream body;
      body << "row,predicted,score\n";
      for (sslda::Index i = 0; i < data.rows(); ++i) {
        const double score = sslda::decision_score(model, data.features.row(i).transpose());
        body << (i + 1) << ',' << predicted[static_cast<std::size_t>(i)] << ',' << format("%.10e", score) << '\n';
      }
      write_file(predictions_path, body.str());
      report.doc["rows"] = data.rows();
      report.doc["predictions"] = predictions_path;
      if (data.has_labels()) report.doc["metrics"] = metrics_json(sslda::evaluate(predicted, data.labels));
      report.print();
      return 0;
    }

    if (*split) {
      const auto data = load_two_class(data_path, csv);
      sslda::SplitProtocol protocol;
      protocol.flavor = sslda::parse_flavor(flavor_text);
      protocol.repetitions = reps;
      protocol.train_fraction = train_fraction;
      protocol.folds = folds;
      protocol.grid_size = grid_size;
      protocol.seed = seed;
      const auto eval =
          sslda::repeated_split_evaluation(sslda::class_rows(data, 1), sslda::class_rows(data, 2), protocol);
      ensure_dir(out_dir);
      std::ostringstream body;
      body << "split,tp,tn,fp,fn,specificity,sensitivity,precision,accuracy,lambda\n";
      for (std::size_t r = 0; r < eval.per_split.size(); ++r) {
        const auto& m = eval.per_split[r];
        body << (r + 1) << ',' << m.tp << ',' << m.tn << ',' << m.fp << ',' << m.fn << ','
             << format("%.4f", m.specificity) << ',' << format("%.4f", m.sensitivity) << ','
             << format("%.4f", m.precision) << ',' << format("%.4f", m.accuracy) << ','
             << format("%.10e", eval.chosen_lambda[r]) << '\n';
      }
      write_file(fs::path(out_dir) / "split_metrics.csv", body.str());
      const auto summary = [](const sslda::SplitEvaluation::Summary& s) {
        return json{{"mean", round4(s.mean)}, {"sd", std::isfinite(s.sd) ? json(round4(s.sd)) : json()}};
      };
      report.doc["flavor"] = std::string(sslda::to_string(protocol.flavor));
      report.doc["seed"] = seed;
      report.doc["splits"] = reps;
      report.doc["specificity"] = summary(eval.specificity);
      report.doc["sensitivity"] = summary(eval.sensitivity);
      report.doc["precision"] = summary(eval.precision);
      report.doc["accuracy"] = summary(eval.accuracy);
      write_file(fs::path(out_dir) / "summary.json", report.doc.dump(2) + "\n");
      report.print();
      return 0;
    }
  } catch (const sslda::InputError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitInput;
  } catch (const sslda::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << std::endl;
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << std::endl;
    return kExitNumerical;
  }
  return 0;
}
