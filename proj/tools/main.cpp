// Command-line front end: measure inspection, loss evaluation, the
// Bayes-optimal oracle, parameter sweeps, and pairwise comparisons.
//
// Exit codes: 0 success, 1 usage or parse error, 2 domain validation
// failure. Human-readable output goes to stdout, machine CSV to files.

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include <CLI11.hpp>

#include "cmlc/cmlc.hpp"
#include "cmlc/plot_json.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;

int default_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

std::string format_fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string labels_to_string(const cmlc::LabelVector& y) {
  std::string out;
  for (int i = 0; i < y.label_count(); ++i) {
    if (i) out += ' ';
    out += std::to_string(y[i]);
  }
  return out;
}

// "1,2;3,4" -> masks {1,2} and {3,4}
std::vector<cmlc::Mask> parse_subsets(const std::string& text, int label_count) {
  std::vector<cmlc::Mask> subsets;
  for (const auto& part : cmlc::detail::split(text, ';')) {
    cmlc::Mask mask = 0;
    for (const auto& field : cmlc::detail::split(part, ',')) {
      const std::string t = cmlc::detail::trim(field);
      const int label = std::stoi(t);
      if (label < 1 || label > label_count)
        throw std::invalid_argument("label " + t + " outside 1.." +
                                    std::to_string(label_count));
      mask |= cmlc::Mask{1} << (label - 1);
    }
    if (mask == 0) throw std::invalid_argument("empty subset in covering");
    subsets.push_back(mask);
  }
  return subsets;
}

std::vector<double> parse_weights(const std::string& text) {
  std::vector<double> weights;
  if (text.empty()) return weights;
  for (const auto& field : cmlc::detail::split(text, ';'))
    weights.push_back(std::stod(cmlc::detail::trim(field)));
  return weights;
}

struct SweepOptions {
  std::string family = "binom";
  std::string k_range;      // "a..b", default 1..K
  std::string alpha_grid;   // point count or comma list, default 50
  std::string dataset;      // overrides the per-file default
  int threads = default_threads();
};

cmlc::SweepSpec build_sweep_spec(const SweepOptions& opt, int label_count) {
  if (opt.family == "binom") {
    int lo = 1, hi = label_count;
    if (!opt.k_range.empty()) {
      const auto pos = opt.k_range.find("..");
      if (pos == std::string::npos)
        throw std::invalid_argument("--k-range expects a..b");
      lo = std::stoi(opt.k_range.substr(0, pos));
      hi = std::stoi(opt.k_range.substr(pos + 2));
    }
    return cmlc::SweepSpec::binomial_range(lo, hi);
  }
  if (opt.family == "poly") {
    if (opt.alpha_grid.empty()) return cmlc::SweepSpec::polynomial_log_grid();
    if (opt.alpha_grid.find(',') == std::string::npos &&
        opt.alpha_grid.find('.') == std::string::npos)
      return cmlc::SweepSpec::polynomial_log_grid(std::stoi(opt.alpha_grid));
    std::vector<double> alphas;
    for (const auto& field : cmlc::detail::split(opt.alpha_grid, ','))
      alphas.push_back(std::stod(cmlc::detail::trim(field)));
    return cmlc::SweepSpec::polynomial_grid(std::move(alphas));
  }
  throw std::invalid_argument("--family must be binom or poly");
}

std::vector<cmlc::PredictionSet> load_sets(const std::vector<std::string>& paths,
                                           const std::string& dataset) {
  std::vector<cmlc::PredictionSet> sets;
  sets.reserve(paths.size());
  for (const auto& path : paths)
    sets.push_back(cmlc::load_predictions(path, "", dataset));
  return sets;
}

void print_sweep_table(const cmlc::SweepResult& result) {
  std::vector<std::string> methods;
  for (const auto& row : result.rows)
    if (std::find(methods.begin(), methods.end(), row.method) == methods.end())
      methods.push_back(row.method);
  std::printf("dataset: %s  family: %s\n", result.dataset.c_str(),
              cmlc::SweepSpec::family_name(result.family).c_str());
  std::printf("%-12s", "parameter");
  for (const auto& m : methods) std::printf("  %-12s", m.c_str());
  std::printf("\n");
  double current = -1.0;
  std::vector<double> losses;
  auto flush = [&]() {
    if (losses.empty()) return;
    std::printf("%-12s", cmlc::format_significant(current, 6).c_str());
    for (double l : losses) std::printf("  %-12s", format_fixed(l).c_str());
    std::printf("\n");
    losses.clear();
  };
  for (const auto& row : result.rows) {
    if (row.parameter != current) {
      flush();
      current = row.parameter;
    }
    losses.push_back(row.mean_loss);
  }
  flush();
}

int cmd_measure(const std::string& action, const std::string& file,
                const std::string& out_path, double tol) {
  using cmlc::Capacity;
  using cmlc::CountingProfile;
  using cmlc::MoebiusRepresentation;

  if (action == "validate") {
    const auto measure = cmlc::read_measure_file(file);
    if (std::holds_alternative<CountingProfile>(measure)) {
      // Profile construction already enforced the boundary and
      // monotonicity conditions, which imply a valid capacity.
      std::printf("valid\n");
      return kExitOk;
    }
    cmlc::ValidationReport report;
    if (const auto* cap = std::get_if<Capacity>(&measure)) {
      report = cmlc::validate_capacity(*cap, tol);
    } else {
      const auto& moeb = std::get<MoebiusRepresentation>(measure);
      if (moeb.label_count() > cmlc::kMaxDenseLabels) {
        std::fprintf(stderr,
                     "cannot validate a sparse measure beyond K=%d\n",
                     cmlc::kMaxDenseLabels);
        return kExitUsage;
      }
      report = cmlc::capacity_of(moeb, tol).report;
    }
    std::printf("%s", report.to_string().c_str());
    if (report.ok()) std::printf("\n");
    return report.ok() ? kExitOk : kExitValidation;
  }

  const auto measure = cmlc::read_measure_file(file);
  auto emit = [&](const auto& m) {
    if (out_path.empty())
      cmlc::write_measure_file(std::cout, m);
    else
      cmlc::write_measure_file(out_path, m);
  };

  if (action == "moebius") {
    Capacity cap = std::visit(
        [](const auto& m) -> Capacity {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, Capacity>) return m;
          else if constexpr (std::is_same_v<T, CountingProfile>)
            return cmlc::expand_counting(m);
          else
            return cmlc::capacity_of(m).capacity;
        },
        measure);
    emit(cmlc::moebius_of(cap));
    return kExitOk;
  }
  if (action == "expand") {
    if (const auto* profile = std::get_if<CountingProfile>(&measure)) {
      emit(cmlc::expand_counting(*profile));
      return kExitOk;
    }
    if (const auto* cap = std::get_if<Capacity>(&measure)) {
      emit(*cap);
      return kExitOk;
    }
    const auto with_report =
        cmlc::capacity_of(std::get<MoebiusRepresentation>(measure), tol);
    if (!with_report.report.ok()) {
      std::fprintf(stderr, "induced capacity is not a valid measure:\n%s",
                   with_report.report.to_string().c_str());
      return kExitValidation;
    }
    emit(with_report.capacity);
    return kExitOk;
  }
  std::fprintf(stderr, "unknown measure action '%s'\n", action.c_str());
  return kExitUsage;
}

int run(int argc, char** argv) {
  CLI::App app{"Dependence-aware multi-label losses via non-additive "
               "measures and the Choquet integral"};
  app.require_subcommand(1);

  // measure validate|moebius|expand <file> / from-covering
  auto* measure = app.add_subcommand("measure", "inspect or convert measure files");
  measure->require_subcommand(1);
  std::string measure_file, measure_out;
  double measure_tol = cmlc::kDefaultValidationTol;
  for (const char* name : {"validate", "moebius", "expand"}) {
    auto* sub = measure->add_subcommand(
        name, std::string(name) + " a measure file");
    sub->add_option("file", measure_file, "measure file")->required();
    sub->add_option("--out", measure_out, "write result to this file");
    sub->add_option("--tol", measure_tol, "validation tolerance");
  }
  auto* covering = measure->add_subcommand(
      "from-covering", "Moebius measure from a family of label subsets");
  int covering_labels = 0;
  std::string covering_subsets, covering_weights;
  covering->add_option("-K,--labels", covering_labels, "label count")->required();
  covering->add_option("--subsets", covering_subsets,
                       "semicolon-separated subsets, e.g. '1,2;3,4'")->required();
  covering->add_option("--weights", covering_weights,
                       "semicolon-separated positive weights");
  covering->add_option("--out", measure_out, "write result to this file");

  // loss <pred.csv> --loss SPEC
  auto* loss_cmd = app.add_subcommand("loss", "per-instance and mean loss of a prediction file");
  std::string loss_pred, loss_spec_text;
  loss_cmd->add_option("predictions", loss_pred, "prediction CSV")->required();
  loss_cmd->add_option("--loss", loss_spec_text,
                       "hamming|subset01|fmeasure|poly:A|binom:K|"
                       "counting:@F|measure:@F")->required();

  // bayes <dist> --loss SPEC
  auto* bayes_cmd = app.add_subcommand("bayes", "Bayes-optimal prediction for a distribution file");
  std::string bayes_file, bayes_spec_text;
  bool bayes_lenient = false;
  bool bayes_strict = false;
  int bayes_threads = default_threads();
  bayes_cmd->add_option("distribution", bayes_file, "distribution file")->required();
  bayes_cmd->add_option("--loss", bayes_spec_text, "loss specification")->required();
  auto* lenient_flag = bayes_cmd->add_flag(
      "--lenient", bayes_lenient,
      "renormalize probabilities instead of rejecting");
  bayes_cmd->add_flag("--strict", bayes_strict,
                      "reject probabilities that do not sum to 1 (default)")
      ->excludes(lenient_flag);
  bayes_cmd->add_option("--threads", bayes_threads, "worker threads");

  // sweep / pairwise
  SweepOptions sweep_opt;
  std::vector<std::string> sweep_files;
  std::string sweep_out, sweep_json;
  auto add_sweep_flags = [&](CLI::App* cmd) {
    cmd->add_option("--family", sweep_opt.family, "binom or poly")
        ->check(CLI::IsMember({"binom", "poly"}));
    cmd->add_option("--k-range", sweep_opt.k_range, "binomial range a..b");
    cmd->add_option("--alpha-grid", sweep_opt.alpha_grid,
                    "grid size or comma-separated alpha list");
    cmd->add_option("--dataset", sweep_opt.dataset, "dataset name override");
    cmd->add_option("--threads", sweep_opt.threads, "worker threads");
  };
  auto* sweep_cmd = app.add_subcommand("sweep", "mean loss across a parameter sweep");
  sweep_cmd->add_option("predictions", sweep_files, "prediction CSVs, one per method")
      ->required()->expected(-1);
  sweep_cmd->add_option("--out", sweep_out, "results CSV")->required();
  sweep_cmd->add_option("--json", sweep_json, "plot-data JSON");
  add_sweep_flags(sweep_cmd);

  auto* pair_cmd = app.add_subcommand("pairwise", "two-method trace, crossings, curvature");
  std::vector<std::string> pair_files;
  std::string pair_out;
  double crossing_tol = cmlc::kDefaultCrossingTol;
  pair_cmd->add_option("predictions", pair_files, "exactly two prediction CSVs")
      ->required()->expected(2);
  pair_cmd->add_option("--out", pair_out, "pairwise trace CSV")->required();
  pair_cmd->add_option("--tol", crossing_tol, "diagonal dead band");
  add_sweep_flags(pair_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
  }

  if (measure->parsed()) {
    for (const char* name : {"validate", "moebius", "expand"})
      if (measure->get_subcommand(name)->parsed())
        return cmd_measure(name, measure_file, measure_out, measure_tol);
    const auto moeb = cmlc::covering_measure(
        covering_labels, parse_subsets(covering_subsets, covering_labels),
        parse_weights(covering_weights));
    if (measure_out.empty())
      cmlc::write_measure_file(std::cout, moeb);
    else
      cmlc::write_measure_file(measure_out, moeb);
    return kExitOk;
  }

  if (loss_cmd->parsed()) {
    const auto spec = cmlc::parse_loss_spec(loss_spec_text);
    const auto ps = cmlc::load_predictions(loss_pred);
    if (ps.size() == 0)
      throw std::invalid_argument(loss_pred + " has no instances");
    const cmlc::PreparedLoss prepared(spec, ps.label_count);
    cmlc::KahanSum acc;
    for (int n = 0; n < ps.size(); ++n) {
      const double l = prepared.value(ps.truth[static_cast<std::size_t>(n)],
                                      ps.scores[static_cast<std::size_t>(n)]);
      std::printf("instance %d: %s\n", n + 1, format_fixed(l).c_str());
      acc.add(l);
    }
    std::printf("mean: %s\n", format_fixed(acc.result() / ps.size()).c_str());
    return kExitOk;
  }

  if (bayes_cmd->parsed()) {
    const auto spec = cmlc::parse_loss_spec(bayes_spec_text);
    const auto dist = cmlc::read_distribution_file(
        bayes_file, bayes_lenient ? cmlc::LabelDistribution::Mode::Lenient
                                  : cmlc::LabelDistribution::Mode::Strict);
    if (dist.renormalized())
      std::fprintf(stderr, "note: probabilities summed to %s; renormalized\n",
                   cmlc::format_significant(dist.input_total(), 17).c_str());
    const auto result = cmlc::bayes_optimal(dist, spec, bayes_threads);
    std::printf("prediction: %s\n", labels_to_string(result.prediction).c_str());
    std::printf("expected-loss: %s\n", format_fixed(result.expected_loss).c_str());
    return kExitOk;
  }

  if (sweep_cmd->parsed()) {
    const auto sets = load_sets(sweep_files, sweep_opt.dataset);
    const auto spec = build_sweep_spec(sweep_opt, sets.front().label_count);
    const auto result = cmlc::run_sweep(sets, spec, sweep_opt.threads);
    cmlc::write_sweep_csv(sweep_out, result);
    if (!sweep_json.empty()) cmlc::write_plot_json(sweep_json, result);
    print_sweep_table(result);
    return kExitOk;
  }

  if (pair_cmd->parsed()) {
    const auto sets = load_sets(pair_files, sweep_opt.dataset);
    const auto spec = build_sweep_spec(sweep_opt, sets.front().label_count);
    const auto result = cmlc::run_sweep(sets, spec, sweep_opt.threads);
    const auto trace =
        cmlc::pairwise_trace(result, sets[0].method, sets[1].method);
    cmlc::write_pairwise_csv(pair_out, trace);
    std::printf("trace: %s vs %s on %s (%zu points)\n", trace.method_a.c_str(),
                trace.method_b.c_str(), trace.dataset.c_str(),
                trace.points.size());
    const auto crossings = cmlc::diagonal_crossings(trace, crossing_tol);
    std::printf("crossings: %zu\n", crossings.size());
    for (const auto& c : crossings)
      std::printf("  [%s, %s]\n", cmlc::format_significant(c.lo, 6).c_str(),
                  cmlc::format_significant(c.hi, 6).c_str());
    const double curvature = cmlc::curvature_summary(trace);
    std::printf("curvature: %s (positive: concave toward %s; negative: "
                "convex toward %s)\n",
                cmlc::format_significant(curvature, 6).c_str(),
                trace.method_b.c_str(), trace.method_a.c_str());
    return kExitOk;
  }

  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const cmlc::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const cmlc::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
}
