#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "gfmm/errors.hpp"
#include "gfmm/experiment.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::string out;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool need_config) {
  auto* opt = cmd->add_option("--config", f.config, "Experiment config file (key = value lines)");
  if (need_config) opt->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", f.seed, "Override the cross-validation seed");
  cmd->add_option("--jobs", f.jobs, "Worker threads (0 = hardware concurrency)");
  cmd->add_option("--out", f.out, "Output directory");
}

gfmm::ExperimentConfig resolve(const CommonFlags& f) {
  auto cfg = gfmm::ExperimentConfig::load(f.config);
  if (f.seed) cfg.seed = *f.seed;
  if (f.jobs) cfg.jobs = *f.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : *f.jobs;
  if (!f.out.empty()) cfg.out_dir = f.out;
  return cfg;
}

int cmd_run(const CommonFlags& f) {
  const auto cfg = resolve(f);
  const auto report = gfmm::run_experiment(cfg);
  gfmm::write_report(report, cfg.out_dir);
  std::size_t skipped = 0;
  for (const auto& c : report.cells) skipped += c.skipped;
  fmt::print("{} cells ({} skipped) written to {}\n", report.cells.size(), skipped, cfg.out_dir);
  return 0;
}

int cmd_reproduce(const CommonFlags& f, double band) {
  const auto cfg = resolve(f);
  const auto reference = gfmm::load_reference(cfg.reference);
  const auto report = gfmm::run_experiment(cfg);
  gfmm::write_report(report, cfg.out_dir);
  const auto rows = gfmm::compare_with_reference(report, reference);
  gfmm::write_comparison(rows, (fs::path(cfg.out_dir) / "comparison.csv").string());

  std::size_t cba_rows = 0, cba_within = 0;
  for (const auto& r : rows) {
    if (r.reference.measure != "cba") continue;
    ++cba_rows;
    cba_within += r.abs_delta <= band;
  }
  std::string claims_text;
  for (const auto& c : gfmm::evaluate_claims(report))
    claims_text += fmt::format("{} {}: {}\n", !c.evaluated ? "SKIP" : c.pass ? "PASS" : "FAIL", c.name, c.detail);
  std::ofstream(fs::path(cfg.out_dir) / "claims.txt") << claims_text;

  fmt::print("compared {} published values; CBA within {:.2f}: {} of {}\n", rows.size(), band, cba_within, cba_rows);
  fmt::print("{}", claims_text);
  return 0;
}

int cmd_synth(const std::string& variant, std::uint64_t seed, double theta, const std::string& out,
              const std::string& algorithms, const std::string& encoders, bool grouped) {
  gfmm::SyntheticLayout layout;
  layout.shuffle = !grouped;
  const auto v = variant == "1" ? gfmm::SyntheticVariant::One
                 : variant == "2" ? gfmm::SyntheticVariant::Two
                                  : throw gfmm::ConfigError("variant must be 1 or 2");
  if (!out.empty()) {
    fs::create_directories(out);
    auto [train, test] = gfmm::generate_synthetic(v, seed, layout);
    for (const auto& [name, d] : {std::pair{"train", &train}, std::pair{"test", &test}}) {
      std::ofstream csv(fs::path(out) / fmt::format("synthetic{}_{}.csv", variant, name));
      csv << "x1,x2,x3,class\n";
      const auto& domain = d->schema.domain(0);
      for (const auto& s : d->samples)
        csv << fmt::format("{},{},{},{}\n", s.lower[0], s.lower[1], domain[static_cast<std::size_t>(s.categorical[0])],
                           *s.label);
    }
  }
  std::vector<gfmm::Algorithm> algs;
  for (const auto& a : CLI::detail::split(algorithms, ',')) algs.push_back(gfmm::parse_algorithm(a));
  std::vector<gfmm::EncoderKind> encs;
  if (encoders == "all") {
    encs = gfmm::all_encoder_kinds();
  } else {
    for (const auto& e : CLI::detail::split(encoders, ',')) encs.push_back(gfmm::parse_encoder_kind(e));
  }
  fmt::print("algorithm,encoder,cba,boxes,secondary,secondary_correct\n");
  for (const auto& r : gfmm::run_synthetic(v, seed, theta, algs, encs, layout))
    fmt::print("{},{},{:.5f},{},{},{}\n", r.algorithm, r.encoder, r.cba, r.secondary.boxes, r.secondary.secondary,
               r.secondary.secondary_correct);
  return 0;
}

int cmd_encode_inspect(const std::string& data_dir, const std::string& dataset, const std::string& encoder,
                       const std::string& feature) {
  const auto data = gfmm::load_named_dataset(data_dir, dataset);
  const auto names = data.schema.categorical_names();
  std::size_t index = names.size();
  for (std::size_t j = 0; j < names.size(); ++j)
    if (names[j] == feature) index = j;
  if (index == names.size()) {
    if (feature.empty() || feature.find_first_not_of("0123456789") != std::string::npos)
      throw gfmm::MissingColumn("no categorical feature '" + feature + "' in " + dataset);
    index = std::stoul(feature);
  }
  fmt::print("{}", gfmm::encode_inspect(data, gfmm::parse_encoder_kind(encoder), index));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperbox classifiers for mixed numeric and categorical data"};
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace, debug, info, warn, error");

  CommonFlags run_flags, repro_flags;
  auto* run = app.add_subcommand("run", "Run an experiment grid with repeated cross-validation");
  add_common(run, run_flags, true);

  auto* repro = app.add_subcommand("reproduce", "Run a grid and compare it with the published results table");
  add_common(repro, repro_flags, true);
  double band = 0.05;
  repro->add_option("--band", band, "Tolerance used for the CBA summary line");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset and report secondary-criterion counts");
  std::string variant = "1", synth_out, synth_algs = "iol,onln,agglo2", synth_encs = "all";
  std::uint64_t synth_seed = 0;
  double synth_theta = 0.7;
  synth->add_option("--variant", variant, "1 (two categories) or 2 (ten categories)");
  synth->add_option("--seed", synth_seed, "Generator seed");
  synth->add_option("--theta", synth_theta, "Maximum hyperbox size");
  synth->add_option("--algorithms", synth_algs, "Comma-separated learners");
  synth->add_option("--encoders", synth_encs, "Comma-separated encoders or 'all'");
  synth->add_option("--out", synth_out, "Directory for the generated CSV files");
  bool grouped = false;
  synth->add_flag("--grouped", grouped, "Keep rows grouped by class instead of shuffling");

  auto* inspect = app.add_subcommand("encode-inspect", "Print the encoding of one categorical feature");
  std::string data_dir = "data", dataset, encoder = "target", feature;
  inspect->add_option("--data-dir", data_dir, "Directory with <name>.csv and <name>.schema");
  inspect->add_option("--dataset", dataset, "Dataset name")->required();
  inspect->add_option("--encoder", encoder, "Encoder name");
  inspect->add_option("--feature", feature, "Categorical feature name or index")->required();

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (*run) return cmd_run(run_flags);
    if (*repro) return cmd_reproduce(repro_flags, band);
    if (*synth) return cmd_synth(variant, synth_seed, synth_theta, synth_out, synth_algs, synth_encs, grouped);
    if (*inspect) return cmd_encode_inspect(data_dir, dataset, encoder, feature);
  } catch (const gfmm::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
