// Copyright 2026 The GPK Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gpk/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "gpk/dataset.hpp"
#include "gpk/error.hpp"
#include "gpk/evaluation.hpp"
#include "gpk/gaze.hpp"
#include "gpk/leakage.hpp"
#include "gpk/re_protocol.hpp"
#include "json.hpp"

namespace gpk::cli {
namespace {

// Unreadable or unwritable files are data errors (exit 3).
class FileError : public DataError {
 public:
  using DataError::DataError;
};

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FileError("cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  if (f.bad()) throw FileError("error reading " + path);
  return s.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw FileError("cannot write " + tmp.string());
    f << content;
    f.flush();
    if (!f) throw FileError("error writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw FileError("cannot rename onto " + path.string());
  }
}

struct Common {
  std::uint64_t seed = 0;
  CLI::Option* seed_option = nullptr;
  std::string output;
  std::string format = "csv";
};

void add_common(CLI::App* sub, Common& c, bool with_format = true) {
  c.seed_option = sub->add_option("--seed", c.seed, "Base seed (drawn and printed when omitted)");
  sub->add_option("-o,--output", c.output, "Output file (default: standard output)");
  if (with_format) {
    sub->add_option("--format", c.format, "Report format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
  }
}

std::uint64_t effective_seed(const Common& c, std::ostream& err) {
  std::uint64_t seed = c.seed;
  if (c.seed_option->count() == 0) {
    std::random_device rd;
    seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
  err << "seed: " << seed << "\n";
  return seed;
}

void emit(const Common& c, const std::string& content, std::ostream& out) {
  if (c.output.empty()) {
    out << content;
  } else {
    write_atomic(c.output, content);
  }
}

struct MechanismOptions {
  std::string mechanism = "fpa";
  Eigen::Index chunk = 0;
  CLI::Option* chunk_option = nullptr;
  Eigen::Index k = 0;
  CLI::Option* k_option = nullptr;
  int k_trials = 100;
  bool exclude_zero_min = false;
};

void add_mechanism(CLI::App* sub, MechanismOptions& m, bool required) {
  auto* opt = sub->add_option("--mechanism", m.mechanism, "lpa | fpa | cfpa | dcfpa")
                  ->transform(CLI::IsMember({"lpa", "fpa", "cfpa", "dcfpa"}, CLI::ignore_case));
  if (required) opt->capture_default_str();
  m.chunk_option = sub->add_option("--chunk", m.chunk, "Chunk size (cfpa, dcfpa)")
                       ->check(CLI::Range(Eigen::Index{2}, Eigen::Index{1} << 40));
  m.k_option = sub->add_option("--k", m.k, "Fixed coefficient count (default: optimal k)")
                   ->check(CLI::PositiveNumber);
  sub->add_option("--k-trials", m.k_trials, "Trials per candidate k in the optimal-k search")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sub->add_flag("--exclude-zero-min", m.exclude_zero_min,
                "Skip features whose minimum is zero for every participant");
}

eval::MechanismConfig mechanism_config(const MechanismOptions& m) {
  eval::MechanismConfig c;
  c.mechanism = dp::parse_mechanism(m.mechanism);
  if (m.chunk_option->count() > 0) c.chunk_size = m.chunk;
  if (m.k_option->count() > 0) c.fixed_k = m.k;
  c.k_search_trials = m.k_trials;
  c.exclude_zero_minimum = m.exclude_zero_min;
  if (dp::uses_chunks(c.mechanism) && !c.chunk_size) {
    throw InvalidArgument(m.mechanism + " requires --chunk");
  }
  return c;
}

io::Dataset load_dataset(const std::string& path) { return io::parse_feature_csv(read_file(path)); }

std::string json_or_null(const std::optional<double>& v) {
  return v ? io::format_double(*v) : std::string();
}

std::vector<gaze::Collider> parse_colliders(const std::string& text) {
  // object_id,cx,cy,cz,ex,ey,ez with a header row.
  std::vector<gaze::Collider> out;
  std::istringstream in(text);
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (row == 1 || line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() != 7) throw ParseError("expected 7 collider columns", row);
    gaze::Collider c;
    c.object_id = cells[0];
    double v[6];
    for (int i = 0; i < 6; ++i) {
      const auto& s = cells[static_cast<std::size_t>(i) + 1];
      const auto r = std::from_chars(s.data(), s.data() + s.size(), v[i]);
      if (r.ec != std::errc() || r.ptr != s.data() + s.size() || !std::isfinite(v[i])) {
        throw ParseError("bad collider number '" + s + "'", row);
      }
    }
    c.center = {v[0], v[1], v[2]};
    c.half_extents = {v[3], v[4], v[5]};
    out.push_back(std::move(c));
  }
  return out;
}

// --- subcommands ------------------------------------------------------------

struct GenerateOptions {
  io::Ar1Config ar1;
};

int cmd_generate(const GenerateOptions& g, const Common& c, std::ostream& out,
                 std::ostream& err) {
  auto cfg = g.ar1;
  cfg.seed = effective_seed(c, err);
  emit(c, io::write_feature_csv(io::gen_ar1_dataset(cfg)), out);
  return kOk;
}

struct PrivatizeOptions {
  std::string input;
  double epsilon = 0.48;
  MechanismOptions mech;
};

int cmd_privatize(const PrivatizeOptions& p, const Common& c, std::ostream& out,
                  std::ostream& err) {
  const auto config = mechanism_config(p.mech);
  const auto data = load_dataset(p.input);
  const auto seed = effective_seed(c, err);
  emit(c, io::write_feature_csv(eval::privatize_dataset(data, config, p.epsilon, seed)), out);
  return kOk;
}

struct UtilityOptions {
  std::string input;
  std::vector<double> epsilons{0.48, 2.4, 4.8, 24, 48};
  int trials = 100;
  MechanismOptions mech;
};

int cmd_utility(const UtilityOptions& u, const Common& c, std::ostream& out,
                std::ostream& err) {
  const auto config = mechanism_config(u.mech);
  const auto data = load_dataset(u.input);
  const auto seed = effective_seed(c, err);
  std::vector<eval::UtilityReport> reports;
  for (double eps : u.epsilons) {
    auto r = eval::evaluate_mechanism(data, config, eps, u.trials, seed);
    reports.insert(reports.end(), r.begin(), r.end());
  }
  emit(c, c.format == "json" ? eval::to_json(reports) : eval::to_csv(reports), out);
  return kOk;
}

struct OptimalKOptions {
  std::string input;
  std::vector<double> epsilons{0.48, 2.4, 4.8, 24, 48};
  MechanismOptions mech;
};

int cmd_optimal_k(const OptimalKOptions& o, const Common& c, std::ostream& out,
                  std::ostream& err) {
  auto config = mechanism_config(o.mech);
  if (config.mechanism == dp::Mechanism::lpa) {
    throw InvalidArgument("optimal-k applies to fpa, cfpa and dcfpa");
  }
  config.fixed_k.reset();
  const auto data = load_dataset(o.input);
  const auto seed = effective_seed(c, err);
  std::string csv = "feature,recording_type,epsilon,chunk_index,k\n";
  nlohmann::json j = nlohmann::json::array();
  for (const auto& [feature, rt] : data.groups()) {
    const auto group = data.group(feature, rt);
    const auto table = eval::sensitivities_for(group, config);
    for (double eps : o.epsilons) {
      const auto ks = eval::choose_k(group, table, config, eps, seed);
      for (std::size_t i = 0; i < ks.size(); ++i) {
        csv += feature + "," + rt + "," + io::format_double(eps) + "," + std::to_string(i) +
               "," + std::to_string(ks[i]) + "\n";
        j.push_back({{"feature", feature}, {"recording_type", rt}, {"epsilon", eps},
                     {"chunk_index", i}, {"k", ks[i]}});
      }
    }
  }
  emit(c, c.format == "json" ? j.dump(2) + "\n" : csv, out);
  return kOk;
}

struct CorrelateOptions {
  std::string input;
  std::string feature;
  Eigen::Index ref = 5;
  Eigen::Index max_lag = 10;
  bool difference = false;
};

int cmd_correlate(const CorrelateOptions& o, const Common& c, std::ostream& out,
                  std::ostream& err) {
  const auto data = load_dataset(o.input);
  effective_seed(c, err);
  std::string csv = "feature,recording_type,lag,correlation,participants\n";
  nlohmann::json j = nlohmann::json::array();
  for (const auto& [feature, rt] : data.groups()) {
    if (!o.feature.empty() && feature != o.feature) continue;
    for (const auto& lc :
         eval::correlation_profile(data, feature, rt, o.ref, o.max_lag, o.difference)) {
      csv += feature + "," + rt + "," + std::to_string(lc.lag) + "," + json_or_null(lc.value) +
             "," + std::to_string(lc.participants) + "\n";
      nlohmann::json row{{"feature", feature}, {"recording_type", rt}, {"lag", lc.lag},
                         {"participants", lc.participants}, {"excluded", lc.excluded}};
      row["correlation"] = lc.value ? nlohmann::json(*lc.value) : nlohmann::json(nullptr);
      j.push_back(row);
    }
  }
  emit(c, c.format == "json" ? j.dump(2) + "\n" : csv, out);
  return kOk;
}

struct LeakOptions {
  std::string input;
  std::string task = "person-id";
  Eigen::Index window = 10;
  int k = 11;
  bool no_majority = false;
  CLI::Option* mechanism_option = nullptr;
  double epsilon = 0.48;
  MechanismOptions mech;
};

int cmd_leak(const LeakOptions& o, const Common& c, std::ostream& out, std::ostream& err) {
  const bool privatize = o.mechanism_option->count() > 0;
  eval::MechanismConfig config;
  if (privatize) config = mechanism_config(o.mech);
  auto data = load_dataset(o.input);
  const auto seed = effective_seed(c, err);
  if (privatize) data = eval::privatize_dataset(data, config, o.epsilon, seed);
  leak::AccuracyReport report;
  if (o.task == "person-id") {
    report = leak::person_id_eval(data, o.window, o.k, !o.no_majority, seed);
  } else {
    const auto set = leak::build_window_set(
        data, o.window, [](const std::string&, const std::string& rt) { return rt; });
    report = leak::loocv_person(set, o.k, seed);
  }
  for (const auto& w : report.warnings) err << "warning: " << w << "\n";
  emit(c, c.format == "json" ? leak::to_json(report) : leak::to_csv(report), out);
  return kOk;
}

struct ReDemoOptions {
  Eigen::Index samples = 2000;
  Eigen::Index features = 36;
  double train_fraction = 0.8;
  std::string kernel = "rbf";
  double sigma = 4.0;
  double ridge = 1e-3;
  double noise = 0.0;
  std::string out_dir;
};

int cmd_re_demo(const ReDemoOptions& o, const Common& c, std::ostream& out,
                std::ostream& err) {
  if (o.samples < 4) throw InvalidArgument("re-demo needs at least 4 samples");
  if (!(o.train_fraction > 0.0 && o.train_fraction < 1.0)) {
    throw InvalidArgument("--train-fraction must lie in (0, 1)");
  }
  const auto seed = effective_seed(c, err);
  const auto set = io::gen_regression_set(o.samples, o.features, o.noise,
                                          derive_seed(seed, {std::string_view("data")}));
  const Eigen::Index na = o.samples / 2;
  const Eigen::Index nb = o.samples - na;
  auto party = [&](Eigen::Index begin, Eigen::Index n) {
    re::PartyData d;
    d.features = set.features.middleCols(begin, n);
    d.targets = set.targets.middleCols(begin, n);
    d.n_train = std::clamp<Eigen::Index>(
        static_cast<Eigen::Index>(std::llround(o.train_fraction * static_cast<double>(n))), 1,
        n - 1);
    return d;
  };
  Rng shuffle_a(derive_seed(seed, {std::string_view("shuffle"), std::string_view("alice")}));
  Rng shuffle_b(derive_seed(seed, {std::string_view("shuffle"), std::string_view("bob")}));
  const auto alice = re::shuffle_party(party(0, na), shuffle_a);
  const auto bob = re::shuffle_party(party(na, nb), shuffle_b);

  re::ProtocolConfig config;
  config.kernel = o.kernel == "linear" ? re::KernelConfig::linear()
                                       : re::KernelConfig::rbf_sigma(o.sigma);
  config.ridge = o.ridge;
  const auto priv = re::run_protocol(alice, bob, config, seed);
  const auto plain = re::run_plaintext(alice, bob, config);

  Eigen::MatrixXd pred(2, priv.predictions_a.cols() + priv.predictions_b.cols());
  pred << priv.predictions_a, priv.predictions_b;
  Eigen::MatrixXd truth(2, pred.cols());
  truth << alice.targets.rightCols(na - alice.n_train), bob.targets.rightCols(nb - bob.n_train);
  const bool identical = priv.predictions_a == plain.predictions_a &&
                         priv.predictions_b == plain.predictions_b;
  const double deviation = (priv.kernel.entries - plain.kernel.entries).cwiseAbs().maxCoeff();

  if (!o.out_dir.empty()) {
    std::filesystem::create_directories(o.out_dir);
    write_atomic(std::filesystem::path(o.out_dir) / "transcript.jsonl",
                 priv.transcript.to_json_lines());
    std::string csv = "party,index,pitch,yaw,true_pitch,true_yaw\n";
    for (Eigen::Index j = 0; j < pred.cols(); ++j) {
      const bool is_a = j < priv.predictions_a.cols();
      csv += std::string(is_a ? "alice," : "bob,") +
             std::to_string(is_a ? j : j - priv.predictions_a.cols()) + "," +
             io::format_double(pred(0, j)) + "," + io::format_double(pred(1, j)) + "," +
             io::format_double(truth(0, j)) + "," + io::format_double(truth(1, j)) + "\n";
    }
    write_atomic(std::filesystem::path(o.out_dir) / "predictions.csv", csv);
  }
  std::ostringstream s;
  s << "samples: " << o.samples << " (alice " << na << ", bob " << nb << ")\n"
    << "transcript messages: " << priv.transcript.entries.size() << "\n"
    << "transcript payload bytes: " << priv.transcript.total_payload_bytes() << "\n"
    << "dot-product payload bytes: " << priv.transcript.dot_product_payload_bytes()
    << " (expected " << re::dot_product_cost_bytes(o.features, na, nb) << ")\n"
    << "mean angular error (rad): " << re::mean_angular_error(pred, truth) << "\n"
    << "predictions identical to plaintext: " << (identical ? "yes" : "no") << "\n"
    << "max kernel deviation: " << deviation << "\n";
  out << s.str();
  return kOk;
}

struct PipelineOptions {
  std::string input;
  std::string colliders;
  std::string attention_output;
  double window = 30.0;
  double step = 0.5;
};

int cmd_pipeline(const PipelineOptions& o, const Common& c, std::ostream& out,
                 std::ostream& err) {
  const auto recordings = io::parse_sample_csv(read_file(o.input));
  std::vector<gaze::Collider> colliders;
  if (!o.colliders.empty()) colliders = parse_colliders(read_file(o.colliders));
  effective_seed(c, err);
  io::Dataset data;
  std::string attention = "participant,recording,object_id,total_dwell,visit_count\n";
  for (const auto& rec : recordings) {
    gaze::PipelineConfig cfg;
    cfg.windows.window = o.window;
    cfg.windows.step = o.step;
    cfg.windows.participant = rec.participant;
    cfg.windows.recording_type = rec.recording;
    const auto result = gaze::process_recording(rec.samples, colliders, cfg);
    for (const auto& w : result.features.warnings) {
      err << "warning: " << rec.participant << "/" << rec.recording << ": " << w << "\n";
    }
    for (const auto& s : result.features.signals) data.insert(s);
    for (const auto& a : result.attention) {
      attention += rec.participant + "," + rec.recording + "," + a.object_id + "," +
                   io::format_double(a.total_dwell) + "," + std::to_string(a.visit_count) + "\n";
    }
  }
  emit(c, io::write_feature_csv(data), out);
  if (!o.attention_output.empty()) write_atomic(o.attention_output, attention);
  return kOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Differential privacy and private kernel toolkit for gaze feature signals", "gpk"};
  app.require_subcommand(1);

  Common c_generate, c_privatize, c_utility, c_optimal, c_correlate, c_leak, c_redemo,
      c_pipeline;

  GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "Write a synthetic AR(1) feature dataset");
  add_common(generate, c_generate, false);
  generate->add_option("--participants", gen.ar1.participants)->check(CLI::PositiveNumber)->capture_default_str();
  generate->add_option("--features", gen.ar1.features)->check(CLI::PositiveNumber)->capture_default_str();
  generate->add_option("--length", gen.ar1.length)->check(CLI::Range(Eigen::Index{2}, Eigen::Index{1} << 40))->capture_default_str();
  generate->add_option("--rho", gen.ar1.rho)->capture_default_str();
  generate->add_option("--offset-scale", gen.ar1.participant_offset_scale)->capture_default_str();
  generate->add_option("--base-level", gen.ar1.base_level)->capture_default_str();
  generate->add_option("--step", gen.ar1.step_seconds)->check(CLI::PositiveNumber)->capture_default_str();
  generate->add_option("--recording-type", gen.ar1.recording_type)->capture_default_str();

  PrivatizeOptions priv;
  auto* privatize = app.add_subcommand("privatize", "Release a privatized copy of a dataset");
  add_common(privatize, c_privatize, false);
  privatize->add_option("-i,--input", priv.input, "Feature CSV")->required();
  privatize->add_option("--epsilon", priv.epsilon)->check(CLI::PositiveNumber)->capture_default_str();
  add_mechanism(privatize, priv.mech, true);

  UtilityOptions util;
  auto* utility = app.add_subcommand("utility", "NMSE and utility per feature and epsilon");
  add_common(utility, c_utility);
  utility->add_option("-i,--input", util.input, "Feature CSV")->required();
  utility->add_option("--epsilon", util.epsilons)->check(CLI::PositiveNumber)->capture_default_str();
  utility->add_option("--trials", util.trials)->check(CLI::PositiveNumber)->capture_default_str();
  add_mechanism(utility, util.mech, true);

  OptimalKOptions optk;
  auto* optimal = app.add_subcommand("optimal-k", "Optimal coefficient count per chunk");
  add_common(optimal, c_optimal);
  optimal->add_option("-i,--input", optk.input, "Feature CSV")->required();
  optimal->add_option("--epsilon", optk.epsilons)->check(CLI::PositiveNumber)->capture_default_str();
  add_mechanism(optimal, optk.mech, true);

  CorrelateOptions corr;
  auto* correlate = app.add_subcommand("correlate", "Cross-participant lag correlation profiles");
  add_common(correlate, c_correlate);
  correlate->add_option("-i,--input", corr.input, "Feature CSV")->required();
  correlate->add_option("--feature", corr.feature, "Restrict to one feature");
  correlate->add_option("--ref", corr.ref, "Reference time index")->check(CLI::NonNegativeNumber)->capture_default_str();
  correlate->add_option("--max-lag", corr.max_lag)->check(CLI::NonNegativeNumber)->capture_default_str();
  correlate->add_flag("--difference", corr.difference, "Correlate difference signals");

  LeakOptions leak_opt;
  auto* leak = app.add_subcommand("leak-eval", "k-NN identity and label leakage");
  add_common(leak, c_leak);
  leak->add_option("-i,--input", leak_opt.input, "Feature CSV")->required();
  leak->add_option("--task", leak_opt.task, "person-id | loocv (label = recording type)")
      ->check(CLI::IsMember({"person-id", "loocv"}))
      ->capture_default_str();
  leak->add_option("--window", leak_opt.window)->check(CLI::PositiveNumber)->capture_default_str();
  leak->add_option("--neighbors", leak_opt.k)->check(CLI::PositiveNumber)->capture_default_str();
  leak->add_flag("--no-majority", leak_opt.no_majority, "Score window predictions individually");
  leak->add_option("--epsilon", leak_opt.epsilon)->check(CLI::PositiveNumber)->capture_default_str();
  add_mechanism(leak, leak_opt.mech, false);
  leak_opt.mechanism_option = leak->get_option("--mechanism");

  ReDemoOptions demo;
  auto* redemo = app.add_subcommand("re-demo", "Three-party private kernel regression demo");
  add_common(redemo, c_redemo, false);
  redemo->add_option("--samples", demo.samples)->check(CLI::PositiveNumber)->capture_default_str();
  redemo->add_option("--features", demo.features)->check(CLI::PositiveNumber)->capture_default_str();
  redemo->add_option("--train-fraction", demo.train_fraction)->capture_default_str();
  redemo->add_option("--kernel", demo.kernel)->check(CLI::IsMember({"linear", "rbf"}))->capture_default_str();
  redemo->add_option("--sigma", demo.sigma)->check(CLI::PositiveNumber)->capture_default_str();
  redemo->add_option("--ridge", demo.ridge)->check(CLI::NonNegativeNumber)->capture_default_str();
  redemo->add_option("--noise", demo.noise)->check(CLI::NonNegativeNumber)->capture_default_str();
  redemo->add_option("--out-dir", demo.out_dir, "Directory for transcript.jsonl and predictions.csv");

  PipelineOptions pipe;
  auto* pipeline = app.add_subcommand("pipeline", "Raw gaze samples to windowed feature signals");
  add_common(pipeline, c_pipeline, false);
  pipeline->add_option("-i,--input", pipe.input, "Sample CSV")->required();
  pipeline->add_option("--colliders", pipe.colliders, "Collider CSV: object_id,cx,cy,cz,ex,ey,ez");
  pipeline->add_option("--attention-output", pipe.attention_output, "Attention CSV output");
  pipeline->add_option("--window", pipe.window)->check(CLI::PositiveNumber)->capture_default_str();
  pipeline->add_option("--step", pipe.step)->check(CLI::PositiveNumber)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (generate->parsed()) return cmd_generate(gen, c_generate, out, err);
    if (privatize->parsed()) return cmd_privatize(priv, c_privatize, out, err);
    if (utility->parsed()) return cmd_utility(util, c_utility, out, err);
    if (optimal->parsed()) return cmd_optimal_k(optk, c_optimal, out, err);
    if (correlate->parsed()) return cmd_correlate(corr, c_correlate, out, err);
    if (leak->parsed()) return cmd_leak(leak_opt, c_leak, out, err);
    if (redemo->parsed()) return cmd_re_demo(demo, c_redemo, out, err);
    if (pipeline->parsed()) return cmd_pipeline(pipe, c_pipeline, out, err);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kConfigError;
}

}  // namespace gpk::cli
