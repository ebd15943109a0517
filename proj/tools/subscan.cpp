// subscan: empirical p-values, subset scanning, and detection-power
// evaluation over activation matrices.

#include "subscan/evaluation.hpp"
#include "subscan/matrix_io.hpp"
#include "subscan/pvalues.hpp"
#include "subscan/report.hpp"
#include "subscan/scan.hpp"
#include "subscan/synthetic.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace subscan;

namespace {

struct ScanFlags {
  ScanConfig config;
  std::string format = "json";

  void attach(CLI::App* cmd) {
    cmd->add_option("--alpha-max", config.alpha_max, "Largest significance level searched")
        ->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--restarts", config.restarts, "Random restarts of the alternating ascent")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-iterations", config.max_iterations, "Ascent iterations per restart")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--tolerance", config.tolerance, "Convergence tolerance on the score")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--format", format, "Result format")->check(CLI::IsMember({"json", "text"}));
  }
};

void run_pvalues(const std::string& background_path, const std::string& test_path, const std::string& out) {
  const auto background = load_activation_matrix(background_path);
  const auto test = load_activation_matrix(test_path);
  const auto pvalues = compute_pvalues(background, test);
  save_matrix(pvalues, out);
  std::cerr << "Z=" << pvalues.z() << " M=" << pvalues.rows() << " J=" << pvalues.cols()
            << " uniformity_ks=" << format_real(uniformity_diagnostic(pvalues)) << "\n";
}

PValueMatrix scan_input(const std::string& pvalues_path, const std::string& background_path,
                        const std::string& test_path) {
  if (!pvalues_path.empty()) return load_pvalue_matrix(pvalues_path);
  if (background_path.empty() || test_path.empty())
    throw std::invalid_argument("scan needs --pvalues or both --background and --test");
  return compute_pvalues(load_activation_matrix(background_path), load_activation_matrix(test_path));
}

void run_scan(const PValueMatrix& pvalues, const ScanFlags& flags, bool individual, const std::string& out) {
  const auto format = parse_output_format(flags.format);
  if (individual) {
    const auto results = scan_individual(pvalues, flags.config);
    write_file_atomically(out, format_scan_results(results, format));
    double best = 0.0;
    for (const auto& r : results) best = std::max(best, r.score);
    std::cerr << "individual results=" << results.size() << " max_score=" << format_real(best) << "\n";
    return;
  }
  const auto result = scan_group(pvalues, flags.config);
  write_file_atomically(out, format_scan_result(result, format));
  std::cerr << "score=" << format_real(result.score) << " alpha*=" << format_real(result.alpha_star)
            << " |X_S|=" << result.subset.samples.size() << " |O_S|=" << result.subset.nodes.size() << "\n";
}

void run_eval(const std::string& pool_path, const std::string& labels_path, const std::string& background_path,
              EvalConfig config, const std::string& format_name, const std::string& pca_source,
              const std::string& out_dir) {
  const auto format = parse_output_format(format_name);
  LabeledPool pool(load_activation_matrix(pool_path), load_labels(labels_path));
  const auto background = load_activation_matrix(background_path);
  const auto report = detection_power(pool, background, config);

  const auto positives = report.all_positive_results();
  std::vector<Index> nodes;
  if (pca_source == "best") {
    const ScanResult* best = &positives.front();
    for (const auto& r : positives)
      if (preferred(r, *best)) best = &r;
    nodes = best->subset.nodes;
  } else {
    nodes = anomalous_node_union(positives);
  }
  const auto projection = pca_project(pool.activations(), nodes, std::min<Index>(2, static_cast<Index>(nodes.size())));

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  write_file_atomically(dir / (format == OutputFormat::json ? "report.json" : "report.txt"),
                        format_eval_report(report, format));
  write_file_atomically(dir / "cardinality.csv", format_cardinality_table(report));
  write_file_atomically(dir / "pca.csv", format_pca_table(pool, projection));

  for (const auto& g : report.groups)
    std::cerr << "proportion=" << format_real(g.proportion) << " auc=" << format_real(g.auc) << "\n";
  std::cerr << "individual auc=" << format_real(report.individual_auc) << "\n";
}

void run_synth(const SynthSpec& spec, const std::string& out_dir) {
  const auto data = synth_generate(spec);
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  save_matrix(data.background, dir / "background.csv");
  save_matrix(data.test, dir / "test.csv");
  write_file_atomically(dir / "truth.json", format_truth(data.truth));
  write_file_atomically(dir / "labels.csv", format_labels(data.pool));
  std::cerr << "planted " << data.truth.samples.size() << " samples x " << data.truth.nodes.size() << " nodes\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subset scanning over neural activation matrices"};
  app.require_subcommand(1);

  auto* pvalues_cmd = app.add_subcommand("pvalues", "Empirical p-values of test activations against a background");
  std::string pv_background, pv_test, pv_out;
  pvalues_cmd->add_option("--background", pv_background, "Background activation matrix")->required();
  pvalues_cmd->add_option("--test", pv_test, "Test activation matrix")->required();
  pvalues_cmd->add_option("--out", pv_out, "Output p-value matrix")->required();

  auto* scan_cmd = app.add_subcommand("scan", "Most anomalous subset of samples x nodes");
  std::string scan_pvalues, scan_background, scan_test, scan_out;
  bool scan_individual_mode = false;
  ScanFlags scan_flags;
  scan_cmd->add_option("--pvalues", scan_pvalues, "P-value matrix");
  scan_cmd->add_option("--background", scan_background, "Background activation matrix");
  scan_cmd->add_option("--test", scan_test, "Test activation matrix");
  scan_cmd->add_option("--out", scan_out, "Output result file")->required();
  scan_cmd->add_option("--seed", scan_flags.config.seed, "Random seed");
  scan_cmd->add_flag("--individual", scan_individual_mode, "Scan each sample on its own");
  scan_flags.attach(scan_cmd);

  auto* eval_cmd = app.add_subcommand("eval", "Detection power, subset cardinalities and PCA coordinates");
  std::string ev_pool, ev_labels, ev_background, ev_out, ev_target = "creative", ev_pca = "union";
  EvalConfig ev_config;
  ScanFlags ev_scan;
  std::uint64_t ev_seed = 0;
  eval_cmd->add_option("--pool", ev_pool, "Labelled test activation matrix")->required();
  eval_cmd->add_option("--labels", ev_labels, "Labels file")->required();
  eval_cmd->add_option("--background", ev_background, "Background activation matrix")->required();
  eval_cmd->add_option("--out-dir", ev_out, "Output directory")->required();
  eval_cmd->add_option("--group-size", ev_config.group_size, "Samples per group")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--proportions", ev_config.proportions, "Anomalous proportions per group")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0));
  eval_cmd->add_option("--trials", ev_config.trials_per_proportion, "Groups per proportion")
      ->check(CLI::PositiveNumber);
  eval_cmd->add_option("--seed", ev_seed, "Random seed for grouping and scanning");
  eval_cmd->add_option("--target-label", ev_target, "Label of anomalous samples")
      ->check(CLI::IsMember({"creative", "non_creative"}));
  eval_cmd->add_option("--pca-source", ev_pca, "Node set for PCA: union of anomalous subsets or the best one")
      ->check(CLI::IsMember({"union", "best"}));
  ev_scan.attach(eval_cmd);

  auto* synth_cmd = app.add_subcommand("synth", "Generate a planted-anomaly benchmark");
  SynthSpec spec;
  std::string synth_out;
  synth_cmd->add_option("--z", spec.z, "Background rows")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--m", spec.m, "Test rows")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--j", spec.j, "Nodes")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--sample-fraction", spec.anomalous_sample_fraction, "Fraction of planted test rows")
      ->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("--node-fraction", spec.anomalous_node_fraction, "Fraction of planted nodes")
      ->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("--shift", spec.shift, "Mean shift of planted cells");
  synth_cmd->add_option("--seed", spec.seed, "Random seed");
  synth_cmd->add_flag("--rectified", spec.rectified, "Apply max(0, x) to every activation");
  synth_cmd->add_option("--out-dir", synth_out, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*pvalues_cmd) {
      run_pvalues(pv_background, pv_test, pv_out);
    } else if (*scan_cmd) {
      run_scan(scan_input(scan_pvalues, scan_background, scan_test), scan_flags, scan_individual_mode, scan_out);
    } else if (*eval_cmd) {
      ev_config.seed = ev_seed;
      ev_config.scan = ev_scan.config;
      ev_config.scan.seed = ev_seed;
      ev_config.target_label = parse_label(ev_target);
      run_eval(ev_pool, ev_labels, ev_background, ev_config, ev_scan.format, ev_pca, ev_out);
    } else if (*synth_cmd) {
      run_synth(spec, synth_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
