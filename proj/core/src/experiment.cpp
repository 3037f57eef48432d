#include "aact/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "aact/error.hpp"
#include "aact/random.hpp"

namespace aact {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  text = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorKind::kConfig,
                "bad value '" + std::string(text) + "' for " + std::string(key));
  }
  return value;
}

bool parse_bool(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "1" || text == "true" || text == "yes" || text == "on") return true;
  if (text == "0" || text == "false" || text == "no" || text == "off") return false;
  throw Error(ErrorKind::kConfig, "bad boolean '" + std::string(text) + "' for " + std::string(key));
}

std::string fmt(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join_labels(std::span<const Label> labels, char sep = ' ') {
  std::string out;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(labels[i]);
  }
  return out;
}

template <typename T>
std::string join(const std::vector<T>& values, char sep = ' ') {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(values[i]);
  }
  return out;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::kData, "cannot write " + path.string());
  return os;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

// ---- DatasetSpec ----

DatasetSpec DatasetSpec::parse(std::string_view text) {
  text = trim(text);
  DatasetSpec spec;
  if (text == "mnist") {
    spec.kind = Kind::kMnist;
  } else if (text == "fashion_mnist" || text == "fashion-mnist") {
    spec.kind = Kind::kFashionMnist;
  } else if (text.starts_with("feature:")) {
    spec.kind = Kind::kFeatureFile;
    const std::string_view rest = text.substr(8);
    const auto comma = rest.find(',');
    spec.train_path = std::string(trim(rest.substr(0, comma)));
    if (comma != std::string_view::npos) spec.test_path = std::string(trim(rest.substr(comma + 1)));
    if (spec.train_path.empty()) throw Error(ErrorKind::kConfig, "feature dataset needs a path");
  } else {
    throw Error(ErrorKind::kConfig, "unknown dataset '" + std::string(text) +
                                        "' (mnist, fashion_mnist, feature:TRAIN[,TEST])");
  }
  return spec;
}

std::string DatasetSpec::to_string() const {
  switch (kind) {
    case Kind::kMnist: return "mnist";
    case Kind::kFashionMnist: return "fashion_mnist";
    case Kind::kFeatureFile: {
      std::string s = "feature:" + train_path.string();
      if (!test_path.empty()) s += "," + test_path.string();
      return s;
    }
  }
  return "mnist";
}

// ---- ExperimentConfig ----

void ExperimentConfig::validate() const {
  growth.validate();
  if (runs == 0) throw Error(ErrorKind::kConfig, "runs must be at least 1");
  if (split.kind == SplitSpec::Kind::kEven && split.tasks == 0) {
    throw Error(ErrorKind::kConfig, "split needs at least one task");
  }
  if (split.kind == SplitSpec::Kind::kUneven && split.sizes.empty()) {
    throw Error(ErrorKind::kConfig, "uneven split needs task sizes");
  }
}

void ExperimentConfig::set(std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "dataset") {
    dataset = DatasetSpec::parse(value);
  } else if (key == "split") {
    const auto seed = split.order_seed;
    split = SplitSpec::parse(value);
    if (!split.order_seed) split.order_seed = seed;
  } else if (key == "order-seed") {
    split.order_seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "l") {
    growth.step = parse_number<std::size_t>(key, value);
  } else if (key == "t-max") {
    growth.t_max = parse_number<std::size_t>(key, value);
  } else if (key == "r") {
    growth.r = parse_number<double>(key, value);
  } else if (key == "l-max") {
    growth.l_max = parse_number<std::size_t>(key, value);
  } else if (key == "expected-acc") {
    growth.expected_accuracy = parse_number<double>(key, value);
  } else if (key == "scope") {
    growth.scope = parse_number<double>(key, value);
  } else if (key == "stall-limit") {
    growth.stall_limit = parse_number<std::size_t>(key, value);
  } else if (key == "r-levels") {
    growth.r_levels = parse_number<std::size_t>(key, value);
  } else if (key == "val-fraction") {
    growth.val_fraction = parse_number<double>(key, value);
  } else if (key == "val-patience") {
    growth.val_patience = parse_number<std::size_t>(key, value);
  } else if (key == "seed") {
    seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "runs") {
    runs = parse_number<std::size_t>(key, value);
  } else if (key == "mode") {
    mode = parse_inference_mode(value);
  } else if (key == "activation") {
    activation = parse_activation(value);
  } else if (key == "out") {
    out = std::string(value);
  } else if (key == "per-instance") {
    per_instance = parse_bool(key, value);
  } else {
    throw Error(ErrorKind::kConfig, "unknown config key '" + std::string(key) + "'");
  }
}

void ExperimentConfig::apply_file(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::kConfig, "cannot read config file " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::kConfig,
                  path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    }
    std::string key(trim(s.substr(0, eq)));
    std::replace(key.begin(), key.end(), '_', '-');
    set(key, s.substr(eq + 1));
  }
}

ExperimentConfig ExperimentConfig::from_file(const fs::path& path) {
  ExperimentConfig cfg;
  cfg.apply_file(path);
  return cfg;
}

std::string ExperimentConfig::to_text() const {
  std::ostringstream os;
  os << "dataset=" << dataset.to_string() << '\n'
     << "split=" << split.to_string() << '\n';
  if (split.order_seed) os << "order-seed=" << *split.order_seed << '\n';
  os << "l=" << growth.step << '\n'
     << "t-max=" << growth.t_max << '\n'
     << "r=" << fmt_g(growth.r) << '\n'
     << "l-max=" << growth.l_max << '\n'
     << "expected-acc=" << fmt_g(growth.expected_accuracy) << '\n'
     << "scope=" << fmt_g(growth.scope) << '\n'
     << "stall-limit=" << growth.stall_limit << '\n'
     << "r-levels=" << growth.r_levels << '\n'
     << "val-fraction=" << fmt_g(growth.val_fraction) << '\n'
     << "val-patience=" << growth.val_patience << '\n'
     << "activation=" << to_string(activation) << '\n'
     << "mode=" << to_string(mode) << '\n'
     << "runs=" << runs << '\n'
     << "seed=" << seed << '\n'
     << "per-instance=" << (per_instance ? "true" : "false") << '\n';
  return os.str();
}

// ---- Data ----

fs::path default_data_dir() {
  if (const char* env = std::getenv("AACT_DATA_DIR"); env && *env) return env;
  return "data";
}

namespace {

void split_idx(const IdxDataset& ds, RealMatrix& x, std::vector<Label>& labels) {
  x = preprocess(ds.images);
  labels.assign(ds.labels.begin(), ds.labels.end());
}

void require_file(const fs::path& p) {
  std::error_code ec;
  if (!fs::is_regular_file(p, ec)) {
    throw Error(ErrorKind::kData,
                "missing dataset file " + p.string() +
                    " (set AACT_DATA_DIR or run tools/fetch_datasets.py)");
  }
}

}  // namespace

LoadedData load_dataset(const DatasetSpec& spec, const fs::path& data_dir) {
  LoadedData out;
  if (spec.kind == DatasetSpec::Kind::kFeatureFile) {
    require_file(spec.train_path);
    FeatureSet train = load_feature_matrix(spec.train_path);
    out.train_x = std::move(train.x);
    out.train_labels = std::move(train.labels);
    if (spec.test_path.empty()) {
      out.test_x = out.train_x;
      out.test_labels = out.train_labels;
    } else {
      require_file(spec.test_path);
      FeatureSet test = load_feature_matrix(spec.test_path);
      if (test.x.cols() != out.train_x.cols()) {
        throw Error(ErrorKind::kData, "train and test feature widths differ");
      }
      out.test_x = std::move(test.x);
      out.test_labels = std::move(test.labels);
    }
    return out;
  }

  const fs::path dir =
      data_dir / (spec.kind == DatasetSpec::Kind::kMnist ? "mnist" : "fashion_mnist");
  const fs::path files[4] = {dir / "train-images-idx3-ubyte", dir / "train-labels-idx1-ubyte",
                             dir / "t10k-images-idx3-ubyte", dir / "t10k-labels-idx1-ubyte"};
  for (const auto& f : files) require_file(f);
  split_idx(load_idx(files[0], files[1]), out.train_x, out.train_labels);
  split_idx(load_idx(files[2], files[3]), out.test_x, out.test_labels);
  if (out.test_x.cols() != out.train_x.cols()) {
    throw Error(ErrorKind::kData, "train and test image sizes differ");
  }
  return out;
}

std::vector<Label> label_universe(const LoadedData& data) {
  const std::set<Label> s(data.train_labels.begin(), data.train_labels.end());
  return {s.begin(), s.end()};
}

// ---- Runs ----

std::uint64_t run_order_seed(const ExperimentConfig& cfg, std::size_t run) {
  if (cfg.split.order_seed) return *cfg.split.order_seed;
  return derive_seed(cfg.seed, {0x6f7264, run});
}

std::uint64_t run_growth_seed(const ExperimentConfig& cfg, std::size_t run) {
  return derive_seed(cfg.seed, {0x67726f, run});
}

std::vector<TaskPlan> plan_run(const ExperimentConfig& cfg, std::span<const Label> universe,
                               std::size_t run) {
  SplitSpec spec = cfg.split;
  spec.order_seed = run_order_seed(cfg, run);
  return make_splits(universe, spec);
}

std::vector<Fraction> evaluate_tasks(const AutoActivatorModel& model,
                                     const std::vector<TaskDataset>& tests,
                                     InferenceMode mode, bool per_instance) {
  std::vector<Fraction> out;
  out.reserve(tests.size());
  for (const auto& task : tests) {
    const std::vector<Label> truth = task.row_labels();
    Fraction f{0, truth.size()};
    if (per_instance) {
      for (Eigen::Index i = 0; i < task.x.rows(); ++i) {
        const Prediction p = predict(model, task.x.row(i), mode);
        f.correct += p.global_labels[0] == truth[static_cast<std::size_t>(i)] ? 1 : 0;
      }
    } else {
      const Prediction p = predict(model, task.x, mode);
      for (std::size_t i = 0; i < truth.size(); ++i) {
        f.correct += p.global_labels[i] == truth[i] ? 1 : 0;
      }
    }
    out.push_back(f);
  }
  return out;
}

namespace {

struct RunTasks {
  std::vector<TaskDataset> train;
  std::vector<TaskDataset> test;
};

RunTasks build_run_tasks(const LoadedData& data, const std::vector<TaskPlan>& order) {
  RunTasks out;
  for (const auto& plan : order) {
    out.train.push_back(build_task(data.train_x, data.train_labels, plan));
    out.test.push_back(build_task(data.test_x, data.test_labels, plan));
    if (out.train.back().size() == 0) {
      throw Error(ErrorKind::kData, "task " + std::to_string(plan.task_index) +
                                        " has no training rows");
    }
    if (out.test.back().size() == 0) {
      throw Error(ErrorKind::kData, "task " + std::to_string(plan.task_index) +
                                        " has no test rows");
    }
  }
  return out;
}

}  // namespace

RunResult run_single(const ExperimentConfig& cfg, const LoadedData& data, std::size_t run) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::vector<Label> universe = label_universe(data);

  RunResult res;
  res.run = run;
  res.order_seed = run_order_seed(cfg, run);
  res.order = plan_run(cfg, universe, run);
  const RunTasks tasks = build_run_tasks(data, res.order);

  GrowthConfig growth = cfg.growth;
  growth.seed = run_growth_seed(cfg, run);

  const std::size_t T = res.order.size();
  res.matrix = AccuracyMatrix(T);
  AutoActivatorModel model;
  std::vector<TaskDataset> seen;
  for (std::size_t s = 0; s < T; ++s) {
    model = train_session(std::move(model), tasks.train[s], growth, cfg.activation);
    seen.push_back(tasks.test[s]);
    const auto row = evaluate_tasks(model, seen, cfg.mode, cfg.per_instance);
    for (std::size_t t = 0; t <= s; ++t) res.matrix.set(s, t, row[t]);
  }

  res.aca = aca(res.matrix);
  res.aia = aia(res.matrix);
  if (T >= 2) {
    res.bwt = bwt(res.matrix);
    res.forgetting = forgetting(res.matrix);
  }
  res.nodes_per_task = model.meta.node_counts;
  res.parameters = model.parameter_count();
  res.budget = memory_budget(res.parameters, 0, 0, 0);
  res.model = std::move(model);
  res.seconds = seconds_since(start);
  return res;
}

MeanStd mean_std(const std::vector<double>& values) {
  MeanStd out;
  if (values.empty()) return out;
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(sq / static_cast<double>(values.size()));
  return out;
}

namespace {

void summarize(ExperimentReport& rep) {
  std::vector<double> acas, aias, bwts, fvals, nodes;
  bool have_bwt = true;
  for (const auto& r : rep.runs) {
    acas.push_back(r.aca);
    aias.push_back(r.aia);
    if (r.bwt) {
      bwts.push_back(*r.bwt);
      fvals.push_back(*r.forgetting);
    } else {
      have_bwt = false;
    }
    std::size_t total = 0;
    for (auto n : r.nodes_per_task) total += n;
    nodes.push_back(static_cast<double>(total));
    rep.seconds += r.seconds;
  }
  rep.aca = mean_std(acas);
  rep.aia = mean_std(aias);
  if (have_bwt && !bwts.empty()) {
    rep.bwt = mean_std(bwts);
    rep.forgetting = mean_std(fvals);
  }
  rep.total_nodes = mean_std(nodes);
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg, const LoadedData& data,
                                bool write_files) {
  cfg.validate();
  ExperimentReport rep;
  for (std::size_t k = 0; k < cfg.runs; ++k) rep.runs.push_back(run_single(cfg, data, k));
  summarize(rep);
  if (write_files) write_experiment_files(cfg, rep);
  return rep;
}

// ---- Reports ----

void write_accuracy_csv(std::ostream& os, const ExperimentReport& report) {
  os << "# aact-accuracy-v1\n"
     << "run,session,task,task_index,classes,correct,total,accuracy\n";
  for (const auto& r : report.runs) {
    const std::size_t T = r.matrix.t_total();
    for (std::size_t s = 0; s < T; ++s) {
      for (std::size_t t = 0; t <= s; ++t) {
        const Fraction f = *r.matrix.at(s, t);
        os << r.run << ',' << s << ',' << t << ',' << r.order[t].task_index << ','
           << join_labels(r.order[t].class_labels) << ',' << f.correct << ',' << f.total << ','
           << fmt(f.value(), 8) << '\n';
      }
    }
  }
}

void write_summary_csv(std::ostream& os, const ExperimentReport& report) {
  os << "# aact-summary-v1\n"
     << "run,order_seed,task_order,aca,aia,bwt,forgetting,total_nodes,nodes_per_task,"
        "parameters,model_mb,exemplar_mb,total_mb\n";
  auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string(); };
  for (const auto& r : report.runs) {
    std::vector<std::size_t> order;
    for (const auto& p : r.order) order.push_back(p.task_index);
    std::size_t total = 0;
    for (auto n : r.nodes_per_task) total += n;
    os << r.run << ',' << r.order_seed << ',' << join(order) << ',' << fmt(100.0 * r.aca) << ','
       << fmt(100.0 * r.aia) << ',' << opt(r.bwt) << ',' << opt(r.forgetting) << ',' << total
       << ',' << join(r.nodes_per_task) << ',' << r.parameters << ','
       << fmt(r.budget.model_mb) << ',' << fmt(r.budget.exemplar_mb) << ','
       << fmt(r.budget.total_mb) << '\n';
  }
  os << "mean,,," << fmt(100.0 * report.aca.mean) << ',' << fmt(100.0 * report.aia.mean) << ','
     << (report.bwt ? fmt(report.bwt->mean) : "") << ','
     << (report.forgetting ? fmt(report.forgetting->mean) : "") << ','
     << fmt(report.total_nodes.mean, 2) << ",,,,,\n";
  os << "std,,," << fmt(100.0 * report.aca.std) << ',' << fmt(100.0 * report.aia.std) << ','
     << (report.bwt ? fmt(report.bwt->std) : "") << ','
     << (report.forgetting ? fmt(report.forgetting->std) : "") << ','
     << fmt(report.total_nodes.std, 2) << ",,,,,\n";
}

void write_timing_csv(std::ostream& os, const ExperimentReport& report) {
  os << "# aact-timing-v1\nrun,seconds\n";
  for (const auto& r : report.runs) os << r.run << ',' << fmt(r.seconds, 3) << '\n';
  os << "total," << fmt(report.seconds, 3) << '\n';
}

void write_experiment_files(const ExperimentConfig& cfg, const ExperimentReport& report) {
  fs::create_directories(cfg.out);
  {
    auto os = open_out(cfg.out / "config.txt");
    os << cfg.to_text();
  }
  {
    auto os = open_out(cfg.out / "accuracy.csv");
    write_accuracy_csv(os, report);
  }
  {
    auto os = open_out(cfg.out / "summary.csv");
    write_summary_csv(os, report);
  }
  {
    auto os = open_out(cfg.out / "timing.csv");
    write_timing_csv(os, report);
  }
  for (const auto& r : report.runs) {
    save_model(r.model, cfg.out / ("model_run" + std::to_string(r.run) + ".aact"));
  }
}

// ---- Sweep ----

std::vector<SweepCell> sweep_params(const ExperimentConfig& cfg, const LoadedData& data,
                                    const SweepGrid& grid, bool write_files) {
  cfg.validate();
  std::vector<double> accs = grid.expected_accuracy;
  if (accs.empty()) accs.push_back(cfg.growth.expected_accuracy);

  std::vector<SweepCell> cells;
  for (double acc : accs) {
    for (std::size_t step : grid.steps) {
      for (std::size_t tm : grid.t_max) {
        ExperimentConfig c = cfg;
        c.growth.step = step;
        c.growth.t_max = tm;
        c.growth.expected_accuracy = acc;
        SweepCell cell;
        cell.step = step;
        cell.t_max = tm;
        cell.expected_accuracy = acc;
        cell.report = run_experiment(c, data, false);
        double ppc = 0.0;
        for (const auto& r : cell.report.runs) {
          for (auto n : r.nodes_per_task) cell.max_unit_nodes = std::max(cell.max_unit_nodes, n);
          ppc += static_cast<double>(r.parameters) /
                 static_cast<double>(r.model.total_classes());
        }
        cell.params_per_class = ppc / static_cast<double>(cell.report.runs.size());
        cells.push_back(std::move(cell));
      }
    }
  }

  if (write_files) {
    fs::create_directories(cfg.out);
    {
      auto os = open_out(cfg.out / "sweep.csv");
      write_sweep_csv(os, cells);
    }
    auto os = open_out(cfg.out / "sweep_timing.csv");
    os << "# aact-sweep-timing-v1\nl,t_max,expected_acc,seconds\n";
    for (const auto& c : cells) {
      os << c.step << ',' << c.t_max << ',' << fmt(c.expected_accuracy, 4) << ','
         << fmt(c.report.seconds, 3) << '\n';
    }
  }
  return cells;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepCell>& cells) {
  os << "# aact-sweep-v1\n"
     << "l,t_max,expected_acc,aca_mean,aca_std,total_nodes_mean,total_nodes_std,"
        "max_unit_nodes,params_per_class\n";
  for (const auto& c : cells) {
    os << c.step << ',' << c.t_max << ',' << fmt(c.expected_accuracy, 4) << ','
       << fmt(100.0 * c.report.aca.mean) << ',' << fmt(100.0 * c.report.aca.std) << ','
       << fmt(c.report.total_nodes.mean, 2) << ',' << fmt(c.report.total_nodes.std, 2) << ','
       << c.max_unit_nodes << ',' << fmt(c.params_per_class, 2) << '\n';
  }
}

// ---- Ablation ----

std::vector<AblationRow> run_ablation(const ExperimentConfig& cfg, const LoadedData& data,
                                      bool write_files) {
  cfg.validate();
  const std::vector<Label> universe = label_universe(data);
  std::vector<AblationRow> rows;
  for (std::size_t k = 0; k < cfg.runs; ++k) {
    const auto order = plan_run(cfg, universe, k);
    const RunTasks tasks = build_run_tasks(data, order);
    GrowthConfig growth = cfg.growth;
    growth.seed = run_growth_seed(cfg, k);
    AutoActivatorModel model;
    for (const auto& t : tasks.train) {
      model = train_session(std::move(model), t, growth, cfg.activation);
    }
    for (InferenceMode mode :
         {InferenceMode::kFull, InferenceMode::kComponent1Only, InferenceMode::kOff}) {
      AblationRow row;
      row.run = k;
      row.mode = mode;
      row.per_task = evaluate_tasks(model, tasks.test, mode, cfg.per_instance);
      double sum = 0.0;
      for (const auto& f : row.per_task) sum += f.value();
      row.aca = sum / static_cast<double>(row.per_task.size());
      rows.push_back(std::move(row));
    }
  }
  if (write_files) {
    fs::create_directories(cfg.out);
    auto os = open_out(cfg.out / "ablation.csv");
    write_ablation_csv(os, rows);
  }
  return rows;
}

std::map<InferenceMode, double> ablation_means(const std::vector<AblationRow>& rows) {
  std::map<InferenceMode, double> sum;
  std::map<InferenceMode, std::size_t> count;
  for (const auto& r : rows) {
    sum[r.mode] += r.aca;
    ++count[r.mode];
  }
  for (auto& [mode, s] : sum) s /= static_cast<double>(count[mode]);
  return sum;
}

void write_ablation_csv(std::ostream& os, const std::vector<AblationRow>& rows) {
  os << "# aact-ablation-v1\nrun,mode,aca,per_task\n";
  for (const auto& r : rows) {
    os << r.run << ',' << to_string(r.mode) << ',' << fmt(100.0 * r.aca) << ',';
    for (std::size_t i = 0; i < r.per_task.size(); ++i) {
      if (i) os << ' ';
      os << fmt(100.0 * r.per_task[i].value(), 4);
    }
    os << '\n';
  }
  for (const auto& [mode, mean] : ablation_means(rows)) {
    os << "mean," << to_string(mode) << ',' << fmt(100.0 * mean) << ",\n";
  }
}

// ---- Exports ----

void write_responses_csv(std::ostream& os, const AutoActivatorModel& model, const RealMatrix& x,
                         std::span<const Label> labels) {
  if (model.empty()) throw Error(ErrorKind::kState, "model has no units");
  if (static_cast<std::size_t>(x.rows()) != labels.size()) {
    throw Error(ErrorKind::kDimension, "responses: rows and labels differ in count");
  }
  std::vector<RealMatrix> probs;
  os << "# aact-responses-v1\nsample,label";
  for (std::size_t u = 0; u < model.units.size(); ++u) {
    probs.push_back(unit_response(model.units[u], x).probs);
    for (Label l : model.label_map[u]) os << ",u" << u << "_c" << l;
  }
  os << '\n';
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    os << i << ',' << labels[static_cast<std::size_t>(i)];
    for (const auto& p : probs) {
      for (Eigen::Index c = 0; c < p.cols(); ++c) os << ',' << fmt(p(i, c), 6);
    }
    os << '\n';
  }
}

void write_plan(std::ostream& os, const ExperimentConfig& cfg, std::span<const Label> universe) {
  cfg.validate();
  os << "dataset " << cfg.dataset.to_string() << ", split " << cfg.split.to_string() << ", "
     << cfg.runs << " run(s), seed " << cfg.seed << '\n';
  for (std::size_t k = 0; k < cfg.runs; ++k) {
    const auto order = plan_run(cfg, universe, k);
    os << "run " << k << " (order seed " << run_order_seed(cfg, k) << "): " << order.size()
       << " tasks\n";
    for (std::size_t s = 0; s < order.size(); ++s) {
      os << "  session " << s << ": task " << order[s].task_index << " classes {"
         << join_labels(order[s].class_labels, ',') << "}\n";
    }
  }
}

}  // namespace aact
