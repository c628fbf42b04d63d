// Reproduction harness for RevDir CDRodeo conditional density estimation:
// single-point estimation, tuning sweeps, reconstruction grids, sparsity
// batches, marginal pipelines, and complexity benchmarks, all emitting CSV.

#include "cdrodeo/csv.hpp"
#include "cdrodeo/marginal.hpp"
#include "cdrodeo/models.hpp"
#include "cdrodeo/parallel.hpp"
#include "cdrodeo/rodeo.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace cdrodeo;
using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start)
{
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::vector<double> parse_list(const std::string& text)
{
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty())
      values.push_back(std::stod(item));
  if (values.empty())
    throw CLI::ValidationError("empty list: " + text);
  return values;
}

std::vector<int> parse_int_list(const std::string& text)
{
  std::vector<int> values;
  for (double v : parse_list(text))
    values.push_back(static_cast<int>(v));
  return values;
}

// Options shared by every subcommand.
struct CommonOpts
{
  std::string model = "b";
  int d1 = 3;
  long long n = 10000;
  std::uint64_t seed = 1;
  std::string a = "auto";
  double beta = 0.8;
  std::string h0 = "auto";
  std::string kernel = "gaussian";
  std::string variant = "revdir";
  std::string marginal = "known";
  std::string w = "auto";
  std::string out;
  int threads = 0;
  bool no_time = false;
  std::string input;
  double c = 2.0;
  long long aux_size = 0;

  void attach(CLI::App* cmd)
  {
    cmd->add_option("--model", model, "simulation model: a, b or c")
      ->check(CLI::IsMember({"a", "b", "c"}));
    cmd->add_option("--d1", d1, "number of conditioning variables");
    cmd->add_option("--n", n, "sample size");
    cmd->add_option("--seed", seed, "base seed for all draws");
    cmd->add_option("--a", a, "threshold exponent, or 'auto' for log(d-1)");
    cmd->add_option("--beta", beta, "bandwidth decay factor in (0,1)");
    cmd->add_option("--h0", h0, "initial bandwidth in (0,1], or 'auto'");
    cmd->add_option("--kernel", kernel, "kernel name")
      ->check(CLI::IsMember({"gaussian", "biweight"}));
    cmd->add_option("--variant", variant, "selector variant")
      ->check(CLI::IsMember({"direct", "reverse", "revdir"}));
    cmd->add_option("--marginal", marginal, "marginal source for f~_X")
      ->check(CLI::IsMember({"known", "preestimator", "chained"}));
    cmd->add_option("--w", w, "evaluation point, comma-separated, or 'auto'");
    cmd->add_option("--out", out, "output CSV path ('-' for stdout)");
    cmd->add_option("--threads", threads,
                    "worker pool size (0 = available parallelism)");
    cmd->add_flag("--no-time", no_time,
                  "write 0 in wall-time columns (byte-stable output)");
    cmd->add_option("--input", input,
                    "read observations from a CSV instead of a model");
    cmd->add_option("--c", c, "pre-estimator exponent c > 1");
    cmd->add_option("--aux-size", aux_size,
                    "pre-estimator auxiliary sample size (0 = min(n^c, 1e6))");
  }

  ModelSpec spec() const
  {
    return ModelSpec{model_by_name(model), d1, seed};
  }

  RodeoConfig config(int d_total) const
  {
    RodeoConfig cfg;
    cfg.variant = variant_by_name(variant);
    cfg.kernel = kernel_by_name(kernel);
    cfg.beta = beta;
    if (a != "auto")
      cfg.a = std::stod(a);
    if (h0 != "auto")
      cfg.h0 = std::stod(h0);
    (void)d_total;
    return cfg;
  }

  EvalPoint eval_point(const ModelSpec& ms) const
  {
    if (w == "auto") {
      EvalPoint p = EvalPoint::Zero(ms.d());
      if (ms.model == Model::a)
        p[ms.d() - 1] = 0.4; // keep y2 inside the positive support
      return p;
    }
    const auto values = parse_list(w);
    EvalPoint p(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
      p[static_cast<Eigen::Index>(i)] = values[i];
    return p;
  }
};

Sample load_csv_sample(const std::string& path, int d1)
{
  std::ifstream in(path);
  if (!in)
    throw InvalidInput("cannot open input file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#')
      continue;
    if (first && line.find_first_not_of("0123456789+-.eE, \t") !=
                   std::string::npos) {
      first = false;
      continue; // header row
    }
    first = false;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
      row.push_back(std::stod(cell));
    rows.push_back(std::move(row));
  }
  if (rows.empty())
    throw InvalidInput("no data rows in " + path);
  Matrix data(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size())
      throw InvalidInput("ragged CSV input");
    for (std::size_t k = 0; k < rows[i].size(); ++k)
      data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
        rows[i][k];
  }
  return Sample(std::move(data), d1);
}

// Auxiliary X-only sample for the pre-estimator, drawn from the model's
// marginal with a decorrelated seed.
Matrix draw_aux(const ModelSpec& ms, Eigen::Index n_x)
{
  const ModelSpec aux_spec{ms.model, ms.d1,
                           CounterRng::splitmix64(ms.seed ^ 0x5eeda0c100ULL)};
  const Sample s = sample_model(aux_spec, n_x);
  return s.data().leftCols(ms.d1);
}

struct PreparedRun
{
  Sample sample;
  MarginalValues marginal;
  bool truth_known = false;
  ModelSpec model_spec;
};

PreparedRun prepare(const CommonOpts& opt)
{
  if (!opt.input.empty()) {
    Sample s = load_csv_sample(opt.input, opt.d1);
    if (opt.marginal != "chained" && s.d1() > 0)
      throw InvalidInput(
        "CSV input supports --marginal chained only (no known density)");
    MarginalValues m = s.d1() == 0
                         ? MarginalValues::unit(s.n())
                         : chained_marginal(s, RodeoConfig{}, {std::nullopt,
                                                               opt.threads});
    return PreparedRun{std::move(s), std::move(m), false,
                       ModelSpec{Model::b, std::max(opt.d1, 1), opt.seed}};
  }

  const ModelSpec ms = opt.spec();
  Sample s = sample_model(ms, opt.n);
  MarginalValues m = MarginalValues::unit(s.n());
  if (opt.marginal == "known") {
    const MarginalSource src = KnownMarginal{[ms](const Eigen::VectorXd& x) {
      return known_marginal_density(ms, x);
    }};
    m = marginal_values(s, src);
  } else if (opt.marginal == "preestimator") {
    const Eigen::Index n_x =
      opt.aux_size > 0
        ? static_cast<Eigen::Index>(opt.aux_size)
        : static_cast<Eigen::Index>(std::min(
            1.0e6, std::ceil(std::pow(static_cast<double>(opt.n), opt.c))));
    const Matrix aux = draw_aux(ms, n_x);
    const MarginalSource src =
      KernelPreestimator{opt.c, kernel_by_name(opt.kernel)};
    m = marginal_values(s, src, aux, {std::nullopt, opt.threads});
  } else {
    RodeoConfig stage_cfg;
    stage_cfg.beta = opt.beta;
    stage_cfg.kernel = kernel_by_name(opt.kernel);
    m = chained_marginal(s, stage_cfg, {std::nullopt, opt.threads});
  }
  return PreparedRun{std::move(s), std::move(m), true, ms};
}

EvalPoint eval_point_for(const CommonOpts& opt, const PreparedRun& run)
{
  if (opt.w == "auto") {
    EvalPoint p = EvalPoint::Zero(run.sample.d());
    if (run.truth_known && run.model_spec.model == Model::a)
      p[run.sample.d() - 1] = 0.4; // keep y2 inside the positive support
    return p;
  }
  const auto values = parse_list(opt.w);
  EvalPoint p(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    p[static_cast<Eigen::Index>(i)] = values[i];
  return p;
}

std::string join_w(const EvalPoint& w)
{
  std::string out;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    out += CsvWriter::num(w[i]);
    if (i + 1 < w.size())
      out += ';';
  }
  return out;
}

int cmd_estimate(const CommonOpts& opt)
{
  const PreparedRun run = prepare(opt);
  const EvalPoint w = eval_point_for(opt, run);
  if (w.size() != run.sample.d())
    throw InvalidInput("--w length does not match the sample dimension");
  const RodeoConfig cfg = opt.config(run.sample.d());

  const auto start = Clock::now();
  const RodeoResult res = run_rodeo(run.sample, run.marginal, w, cfg);
  const double ms = opt.no_time ? 0.0 : elapsed_ms(start);

  std::string header = "w,estimate,true_density,abs_error";
  for (int k = 0; k < run.sample.d(); ++k)
    header += ",h_" + std::to_string(k + 1);
  header += ",stop_reason,iterations,wall_time_ms";
  CsvWriter csv(opt.out, "cdrodeo estimate v1", header);

  std::vector<std::string> cells{join_w(w), CsvWriter::num(res.estimate)};
  if (run.truth_known) {
    const double truth = true_density(run.model_spec, w);
    cells.push_back(CsvWriter::num(truth));
    cells.push_back(CsvWriter::num(std::abs(res.estimate - truth)));
  } else {
    cells.push_back("");
    cells.push_back("");
  }
  for (int k = 0; k < run.sample.d(); ++k)
    cells.push_back(CsvWriter::num(res.bandwidth[k]));
  cells.push_back(to_string(res.trace.stop_reason));
  cells.push_back(
    CsvWriter::num(static_cast<long long>(res.trace.iterations.size())));
  cells.push_back(CsvWriter::num(ms));
  csv.row(cells);
  return 0;
}

int cmd_sweep_a(const CommonOpts& opt, const std::string& a_grid_text,
                int samples, int points)
{
  const auto a_grid = parse_list(a_grid_text);
  const ModelSpec base = opt.spec();

  struct Task
  {
    double a;
    int sample_id;
    int point_id;
    double f_true = 0.0;
    double abs_error = 0.0;
  };
  std::vector<Task> tasks;
  for (double a : a_grid)
    for (int b = 0; b < samples; ++b)
      for (int p = 0; p < points; ++p)
        tasks.push_back(Task{a, b, p, 0.0, 0.0});

  // per-sample data and evaluation points drawn from the joint law
  std::vector<Sample> sample_cache;
  std::vector<MarginalValues> marginal_cache;
  std::vector<Matrix> point_cache;
  for (int b = 0; b < samples; ++b) {
    const ModelSpec ms{base.model, base.d1, base.seed + static_cast<std::uint64_t>(b)};
    Sample s = sample_model(ms, opt.n);
    const MarginalSource src = KnownMarginal{[ms](const Eigen::VectorXd& x) {
      return known_marginal_density(ms, x);
    }};
    marginal_cache.push_back(marginal_values(s, src));
    sample_cache.push_back(std::move(s));
    const ModelSpec ps{base.model, base.d1,
                       CounterRng::splitmix64(ms.seed ^ 0x9017e5ULL)};
    point_cache.push_back(sample_model(ps, points).data());
  }

  parallel_for(tasks.size(), opt.threads, [&](std::size_t t) {
    Task& task = tasks[t];
    const ModelSpec ms{base.model, base.d1,
                       base.seed + static_cast<std::uint64_t>(task.sample_id)};
    RodeoConfig cfg = opt.config(ms.d());
    cfg.a = task.a;
    const EvalPoint w =
      point_cache[task.sample_id].row(task.point_id).transpose();
    const RodeoResult res = run_rodeo(sample_cache[task.sample_id],
                                      marginal_cache[task.sample_id], w, cfg);
    task.f_true = true_density(ms, w);
    task.abs_error = std::abs(res.estimate - task.f_true);
  });

  CsvWriter csv(opt.out, "cdrodeo sweep-a v1",
                "a,sample_id,point_id,f_true,abs_error");
  for (const Task& t : tasks)
    csv.row({CsvWriter::num(t.a), CsvWriter::num(t.sample_id),
             CsvWriter::num(t.point_id), CsvWriter::num(t.f_true),
             CsvWriter::num(t.abs_error)});

  // companion aggregate: per-sample mean over evaluation points
  std::string agg_path;
  if (!opt.out.empty() && opt.out != "-") {
    const auto dot = opt.out.rfind('.');
    agg_path = dot == std::string::npos
                 ? opt.out + "_agg"
                 : opt.out.substr(0, dot) + "_agg" + opt.out.substr(dot);
  }
  CsvWriter agg(agg_path, "cdrodeo sweep-a-agg v1", "a,sample_id,mean_abs_error");
  for (double a : a_grid)
    for (int b = 0; b < samples; ++b) {
      double sum = 0.0;
      int count = 0;
      for (const Task& t : tasks)
        if (t.a == a && t.sample_id == b) {
          sum += t.abs_error;
          ++count;
        }
      agg.row({CsvWriter::num(a), CsvWriter::num(b),
               CsvWriter::num(sum / count)});
    }
  return 0;
}

int cmd_sweep_beta(const CommonOpts& opt, const std::string& beta_grid_text,
                   int samples)
{
  const auto beta_grid = parse_list(beta_grid_text);
  const ModelSpec base = opt.spec();

  CsvWriter csv(opt.out, "cdrodeo sweep-beta v1",
                "beta,sample_id,abs_error,wall_time_ms");
  for (double beta : beta_grid) {
    for (int b = 0; b < samples; ++b) {
      const ModelSpec ms{base.model, base.d1,
                         base.seed + static_cast<std::uint64_t>(b)};
      const Sample s = sample_model(ms, opt.n);
      const MarginalSource src = KnownMarginal{[ms](const Eigen::VectorXd& x) {
        return known_marginal_density(ms, x);
      }};
      const MarginalValues m = marginal_values(s, src);
      RodeoConfig cfg = opt.config(ms.d());
      cfg.beta = beta;
      const EvalPoint w = opt.eval_point(ms);
      if (b == 0)
        (void)run_rodeo(s, m, w, cfg); // warm-up excluded per configuration
      const auto start = Clock::now();
      const RodeoResult res = run_rodeo(s, m, w, cfg);
      const double ms_elapsed = opt.no_time ? 0.0 : elapsed_ms(start);
      const double truth = true_density(ms, w);
      csv.row({CsvWriter::num(beta), CsvWriter::num(b),
               CsvWriter::num(std::abs(res.estimate - truth)),
               CsvWriter::num(ms_elapsed)});
    }
  }
  return 0;
}

int cmd_reconstruct(const CommonOpts& opt, const std::string& direction,
                    double grid_min, double grid_max, int grid_points)
{
  const PreparedRun run = prepare(opt);
  const ModelSpec ms = run.model_spec;
  EvalPoint anchor = eval_point_for(opt, run);
  if (anchor.size() != run.sample.d())
    throw InvalidInput("--w length does not match the sample dimension");

  int dir = -1;
  if (direction == "y" || direction == "y1")
    dir = ms.d1;
  else if (direction == "y2" && ms.model == Model::a)
    dir = ms.d1 + 1;
  else if (direction.size() > 1 && direction[0] == 'x')
    dir = std::stoi(direction.substr(1)) - 1;
  if (dir < 0 || dir >= ms.d())
    throw InvalidInput("bad --direction: " + direction);

  std::vector<double> grid(grid_points);
  for (int g = 0; g < grid_points; ++g)
    grid[g] = grid_min + (grid_max - grid_min) * g /
                           std::max(1, grid_points - 1);

  std::vector<double> est(grid_points), truth(grid_points);
  const RodeoConfig cfg = opt.config(ms.d());
  parallel_for(static_cast<std::size_t>(grid_points), opt.threads,
               [&](std::size_t g) {
                 EvalPoint w = anchor;
                 w[dir] = grid[g];
                 const RodeoResult res =
                   run_rodeo(run.sample, run.marginal, w, cfg);
                 est[g] = res.estimate;
                 truth[g] = run.truth_known ? true_density(ms, w) : 0.0;
               });

  CsvWriter csv(opt.out, "cdrodeo reconstruct v1",
                "grid_value,estimate,true_density");
  for (int g = 0; g < grid_points; ++g)
    csv.row({CsvWriter::num(grid[g]), CsvWriter::num(est[g]),
             run.truth_known ? CsvWriter::num(truth[g]) : ""});
  return 0;
}

int cmd_sparsity(const CommonOpts& opt, const std::string& d1_list_text,
                 int replicates)
{
  if (opt.model != "b" && opt.model != "c")
    throw InvalidInput("sparsity sweep is defined for models b and c");
  const auto d1_list = parse_int_list(d1_list_text);

  struct Row
  {
    int d1;
    int replicate;
    std::uint64_t seed;
    double estimate = 0.0;
    double truth = 0.0;
    StopReason stop = StopReason::all_deactivated;
    double wall_ms = 0.0;
    std::vector<double> bandwidths;
  };
  std::vector<Row> rows;
  for (int d1 : d1_list)
    for (int r = 0; r < replicates; ++r)
      rows.push_back(Row{d1, r, opt.seed + static_cast<std::uint64_t>(r), 0.0,
                         0.0, StopReason::all_deactivated, 0.0, {}});

  parallel_for(rows.size(), opt.threads, [&](std::size_t i) {
    Row& row = rows[i];
    const ModelSpec ms{model_by_name(opt.model), row.d1, row.seed};
    const Sample s = sample_model(ms, opt.n);
    const MarginalSource src = KnownMarginal{[ms](const Eigen::VectorXd& x) {
      return known_marginal_density(ms, x);
    }};
    const MarginalValues m = marginal_values(s, src);
    const EvalPoint w = EvalPoint::Zero(ms.d());
    RodeoConfig cfg = opt.config(ms.d());
    const auto start = Clock::now();
    const RodeoResult res = run_rodeo(s, m, w, cfg);
    row.wall_ms = opt.no_time ? 0.0 : elapsed_ms(start);
    row.estimate = res.estimate;
    row.truth = true_density(ms, w);
    row.stop = res.trace.stop_reason;
    row.bandwidths.assign(res.bandwidth.values().data(),
                          res.bandwidth.values().data() + ms.d());
  });

  CsvWriter csv(opt.out, "cdrodeo sparsity v1",
                "model,d1,replicate,seed,estimate,true_value,abs_error,"
                "stop_reason,wall_time_ms");
  for (const Row& r : rows)
    csv.row({opt.model, CsvWriter::num(r.d1), CsvWriter::num(r.replicate),
             std::to_string(r.seed), CsvWriter::num(r.estimate),
             CsvWriter::num(r.truth),
             CsvWriter::num(std::abs(r.estimate - r.truth)),
             to_string(r.stop), CsvWriter::num(r.wall_ms)});

  std::string bw_path;
  if (!opt.out.empty() && opt.out != "-") {
    const auto dot = opt.out.rfind('.');
    bw_path = dot == std::string::npos
                ? opt.out + "_bandwidths"
                : opt.out.substr(0, dot) + "_bandwidths" + opt.out.substr(dot);
  }
  CsvWriter bw(bw_path, "cdrodeo sparsity-bandwidths v1",
               "model,d1,replicate,component,role,bandwidth");
  for (const Row& r : rows)
    for (std::size_t k = 0; k < r.bandwidths.size(); ++k) {
      // x1 and y are the relevant directions in models b and c
      const bool relevant = k == 0 || static_cast<int>(k) >= r.d1;
      bw.row({opt.model, CsvWriter::num(r.d1), CsvWriter::num(r.replicate),
              CsvWriter::num(static_cast<int>(k) + 1),
              relevant ? "relevant" : "irrelevant",
              CsvWriter::num(r.bandwidths[k])});
    }
  return 0;
}

int cmd_bench(const CommonOpts& opt, const std::string& n_grid_text,
              const std::string& d1_grid_text, int repeats)
{
  const auto n_grid = parse_list(n_grid_text);
  const auto d1_grid = d1_grid_text.empty() ? std::vector<int>{}
                                            : parse_int_list(d1_grid_text);

  struct Config
  {
    long long n;
    int d1;
  };
  std::vector<Config> configs;
  for (double n : n_grid)
    configs.push_back(Config{static_cast<long long>(n), opt.d1});
  for (int d1 : d1_grid)
    configs.push_back(Config{opt.n, d1});

  CsvWriter csv(opt.out, "cdrodeo bench v1", "n,d,wall_time_ms,z_evaluations");
  std::vector<double> log_n, log_t;
  for (const Config& c : configs) {
    const ModelSpec ms{model_by_name(opt.model), c.d1, opt.seed};
    const Sample s = sample_model(ms, c.n);
    const MarginalSource src = KnownMarginal{[ms](const Eigen::VectorXd& x) {
      return known_marginal_density(ms, x);
    }};
    const MarginalValues m = marginal_values(s, src);
    const EvalPoint w = opt.eval_point(ms);
    const RodeoConfig cfg = opt.config(ms.d());

    (void)run_rodeo(s, m, w, cfg); // warm-up excluded
    double best_ms = std::numeric_limits<double>::infinity();
    std::int64_t z_evals = 0;
    for (int rep = 0; rep < repeats; ++rep) {
      const auto start = Clock::now();
      const RodeoResult res = run_rodeo(s, m, w, cfg);
      best_ms = std::min(best_ms, elapsed_ms(start));
      z_evals = res.trace.z_evaluations;
    }
    if (opt.no_time)
      best_ms = 0.0;
    csv.row({CsvWriter::num(c.n), CsvWriter::num(c.d1 + ms.d2()),
             CsvWriter::num(best_ms),
             CsvWriter::num(static_cast<long long>(z_evals))});
    const bool in_n_sweep = c.d1 == opt.d1;
    if (in_n_sweep && best_ms > 0.0) {
      log_n.push_back(std::log(static_cast<double>(c.n)));
      log_t.push_back(std::log(best_ms));
    }
  }

  if (log_n.size() >= 2) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < log_n.size(); ++i) {
      mx += log_n[i];
      my += log_t[i];
    }
    mx /= log_n.size();
    my /= log_n.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < log_n.size(); ++i) {
      sxy += (log_n[i] - mx) * (log_t[i] - my);
      sxx += (log_n[i] - mx) * (log_n[i] - mx);
    }
    std::cerr << "loglog_slope_time_vs_n=" << (sxy / sxx) << '\n';
  }
  return 0;
}

int cmd_marginal(const CommonOpts& opt, const std::string& cache_dir)
{
  const ModelSpec ms = opt.spec();
  const Sample s = sample_model(ms, opt.n);
  RodeoConfig stage_cfg;
  stage_cfg.beta = opt.beta;
  stage_cfg.kernel = kernel_by_name(opt.kernel);
  ChainedOptions copts;
  copts.threads = opt.threads;
  if (!cache_dir.empty())
    copts.cache_dir = cache_dir;
  const MarginalValues m = chained_marginal(s, stage_cfg, copts);

  CsvWriter csv(opt.out, "cdrodeo marginal v1", "index,value");
  for (Eigen::Index i = 0; i < m.size(); ++i)
    csv.row({CsvWriter::num(static_cast<long long>(i)),
             CsvWriter::num(m[i])});
  return 0;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"RevDir CDRodeo conditional density estimation harness"};
  app.require_subcommand(1);
  app.set_config("--config", "", "plain key=value config file; flags override");

  CommonOpts est_opts;
  CLI::App* est = app.add_subcommand("estimate", "single-point estimate");
  est_opts.attach(est);

  CommonOpts sa_opts;
  std::string a_grid = "0,0.5,1,1.5,2";
  int sa_samples = 3;
  int sa_points = 16;
  CLI::App* sa = app.add_subcommand("sweep-a", "absolute error over a grid of a");
  sa_opts.attach(sa);
  sa->add_option("--a-grid", a_grid, "comma-separated grid of a values");
  sa->add_option("--samples", sa_samples, "number of independent samples (B)");
  sa->add_option("--points", sa_points, "evaluation points per sample (M)");

  CommonOpts sb_opts;
  std::string beta_grid = "0.5,0.8,0.9";
  int sb_samples = 3;
  CLI::App* sb =
    app.add_subcommand("sweep-beta", "error and run time over a grid of beta");
  sb_opts.attach(sb);
  sb->add_option("--beta-grid", beta_grid, "comma-separated grid of beta values");
  sb->add_option("--samples", sb_samples, "number of independent samples (B)");

  CommonOpts rc_opts;
  std::string direction = "y";
  double grid_min = -2.0, grid_max = 2.0;
  int grid_points = 41;
  CLI::App* rc = app.add_subcommand(
    "reconstruct", "vary one coordinate of w on a grid, others anchored");
  rc_opts.attach(rc);
  rc->add_option("--direction", direction, "x1..xd1, y (= y1), or y2");
  rc->add_option("--grid-min", grid_min, "grid lower end");
  rc->add_option("--grid-max", grid_max, "grid upper end");
  rc->add_option("--grid-points", grid_points, "number of grid points");

  CommonOpts sp_opts;
  std::string d1_list = "1,4";
  int replicates = 10;
  CLI::App* sp = app.add_subcommand(
    "sparsity", "estimates and selected bandwidths over growing dimension");
  sp_opts.attach(sp);
  sp->add_option("--d1-list", d1_list, "comma-separated list of d1 values");
  sp->add_option("--replicates", replicates, "seeded replicates per dimension");

  CommonOpts bn_opts;
  std::string n_grid = "10000,20000,40000,80000";
  std::string d1_grid;
  int repeats = 3;
  CLI::App* bn =
    app.add_subcommand("bench", "run-time scaling over n and over d");
  bn_opts.attach(bn);
  bn->add_option("--n-grid", n_grid, "comma-separated sample sizes");
  bn->add_option("--d1-grid", d1_grid, "comma-separated d1 values (at fixed n)");
  bn->add_option("--repeats", repeats, "timed repetitions (min is reported)");

  CommonOpts mg_opts;
  std::string cache_dir;
  CLI::App* mg =
    app.add_subcommand("marginal", "run the chained marginal pipeline");
  mg_opts.attach(mg);
  mg->add_option("--cache-dir", cache_dir, "stage cache directory (resumable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      // --help and friends
      return app.exit(e);
    }
    std::cerr << e.what() << '\n';
    return 1;
  }

  try {
    if (est->parsed())
      return cmd_estimate(est_opts);
    if (sa->parsed())
      return cmd_sweep_a(sa_opts, a_grid, sa_samples, sa_points);
    if (sb->parsed())
      return cmd_sweep_beta(sb_opts, beta_grid, sb_samples);
    if (rc->parsed())
      return cmd_reconstruct(rc_opts, direction, grid_min, grid_max,
                             grid_points);
    if (sp->parsed())
      return cmd_sparsity(sp_opts, d1_list, replicates);
    if (bn->parsed())
      return cmd_bench(bn_opts, n_grid, d1_grid, repeats);
    if (mg->parsed())
      return cmd_marginal(mg_opts, cache_dir);
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
