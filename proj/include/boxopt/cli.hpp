// Copyright 2026 The boxopt Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BOXOPT_CLI_HPP_
#define BOXOPT_CLI_HPP_

// Command-line front end. Exit codes: 0 success, 1 domain or runtime error,
// 2 usage error (bad flags, bad configuration values).

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "boxopt/bench.hpp"
#include "boxopt/benders.hpp"
#include "boxopt/binpack.hpp"
#include "boxopt/bit_matrix.hpp"
#include "boxopt/error.hpp"
#include "boxopt/fit_matrix.hpp"
#include "boxopt/io.hpp"
#include "boxopt/kdtree.hpp"
#include "boxopt/master.hpp"
#include "boxopt/mip_solver.hpp"
#include "boxopt/model.hpp"
#include "boxopt/report.hpp"
#include "boxopt/subproblem.hpp"
#include "nlohmann/json.hpp"

namespace boxopt {

// "LxWxH" in millimetres.
inline Dim3 parse_dim3(const std::string& s) {
  Dim3 d{};
  std::istringstream in(s);
  char x1 = 0, x2 = 0;
  if (!(in >> d.l >> x1 >> d.w >> x2 >> d.h) || x1 != 'x' || x2 != 'x' ||
      in.peek() != std::char_traits<char>::eof() || !d.positive()) {
    throw UsageError("expected LxWxH with positive integers, got '" + s + "'");
  }
  return d;
}

namespace cli_internal {

using ojson = nlohmann::ordered_json;

struct GridFlags {
  std::string min = "155x155x105";
  std::string max = "995x595x595";
  Mm step = 10;

  void add(CLI::App* app) {
    app->add_option("--min", min, "smallest box LxWxH")->capture_default_str();
    app->add_option("--max", max, "largest box LxWxH")->capture_default_str();
    app->add_option("--step", step, "grid step in mm")->capture_default_str();
  }
  BoxGrid grid() const {
    BoxGrid g{parse_dim3(min), parse_dim3(max), step};
    g.validate();
    return g;
  }
};

// Writes to `path`, or to `out` when path is "-".
template <typename Fn>
void emit(const std::string& path, std::ostream& out, Fn&& fn) {
  if (path == "-") {
    fn(out);
  } else {
    with_output(path, fn);
  }
}

inline std::vector<Volume> volumes_of(const std::vector<Box>& boxes) {
  std::vector<Volume> v;
  v.reserve(boxes.size());
  for (const Box& b : boxes) v.push_back(b.volume);
  return v;
}

inline std::vector<Volume> volumes_of(const std::vector<PackingUnit>& units) {
  std::vector<Volume> v;
  v.reserve(units.size());
  for (const PackingUnit& u : units) v.push_back(u.volume);
  return v;
}

inline ojson rejections_json(const std::vector<Rejection>& rs) {
  ojson out = ojson::array();
  for (const Rejection& r : rs) {
    out.push_back({{"line", r.line}, {"id", r.external_id}, {"reason", r.reason}});
  }
  return out;
}

inline IngestResult load_units(const std::string& path, const Dim3& largest,
                               std::int64_t budget) {
  return with_input(path, [&](std::istream& in) {
    return ingest_packing_units(in, largest, budget);
  });
}

inline std::vector<Box> load_boxes(const std::string& path) {
  auto boxes = with_input(path, [](std::istream& in) { return read_boxes(in); });
  if (boxes.empty()) throw DomainError(path + " lists no boxes");
  return boxes;
}

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::size_t threads = 0;
};

// ---------------------------------------------------------------------------

struct GenBoxes {
  GridFlags grid;
  std::string out = "-";

  void add(CLI::App& app, Context& ctx) {
    auto* sub = app.add_subcommand("gen-boxes", "write the box grid as CSV");
    grid.add(sub);
    sub->add_option("--out", out, "output CSV ('-' for stdout)");
    sub->callback([this, &ctx] {
      const auto boxes = generate_box_grid(grid.grid());
      emit(out, ctx.out, [&](std::ostream& o) { write_boxes(boxes, o); });
    });
  }
};

struct GenCartons {
  GridFlags grid;
  std::string boxes = "boxes.csv";
  std::string out = "cartons.csv";
  std::string rel_out = "rel.csv";
  std::size_t max_heights = 4;

  void add(CLI::App& app, Context& ctx) {
    auto* sub = app.add_subcommand("gen-cartons",
                                   "derive cartons and REL from a box list");
    grid.add(sub);
    sub->add_option("--boxes", boxes, "box CSV")->capture_default_str();
    sub->add_option("--out", out, "carton CSV")->capture_default_str();
    sub->add_option("--rel-out", rel_out, "REL CSV")->capture_default_str();
    sub->add_option("--max-heights", max_heights, "crease heights per carton")
        ->capture_default_str();
    sub->callback([this, &ctx] {
      const auto bs = load_boxes(boxes);
      CreaseRule rule;
      rule.max_heights = max_heights;
      rule.validate();
      const CartonSet set = derive_cartons(bs, grid.grid(), rule);
      emit(out, ctx.out, [&](std::ostream& o) { write_cartons(set.cartons, o); });
      emit(rel_out, ctx.out, [&](std::ostream& o) { write_rel(set.rel, o); });
    });
  }
};

struct GenUnits {
  std::uint64_t seed = 1;
  int count = 100;
  SyntheticSpec spec;
  std::string item_min = "30x20x10";
  std::string item_max = "400x300x200";
  std::string largest = "995x595x595";
  std::string out = "-";

  void add(CLI::App& app, Context& ctx) {
    auto* sub = app.add_subcommand("gen-units", "draw synthetic packing units");
    sub->add_option("--seed", seed)->capture_default_str();
    sub->add_option("--count", count)->capture_default_str();
    sub->add_option("--mean-items", spec.mean_items)->capture_default_str();
    sub->add_option("--max-items", spec.max_items)->capture_default_str();
    sub->add_option("--item-min", item_min)->capture_default_str();
    sub->add_option("--item-max", item_max)->capture_default_str();
    sub->add_option("--largest-box", largest)->capture_default_str();
    sub->add_option("--node-budget", spec.node_budget)->capture_default_str();
    sub->add_option("--out", out, "JSON-lines output ('-' for stdout)");
    sub->callback([this, &ctx] {
      spec.item_min = parse_dim3(item_min);
      spec.item_max = parse_dim3(item_max);
      spec.largest_box = parse_dim3(largest);
      const auto units = generate_synthetic_units(seed, count, spec);
      emit(out, ctx.out, [&](std::ostream& o) { write_packing_units(units, o); });
    });
  }
};

struct ComputeFit {
  GridFlags grid;
  std::string mode = "kdtree";
  std::string boxes = "boxes.csv";
  std::string units = "units.jsonl";
  std::string out = "fit.bin";
  std::string stats;
  std::int64_t leaf_threshold = 30;
  std::int64_t node_budget = 1'000'000;

  void add(CLI::App& app, Context& ctx) {
    auto* sub = app.add_subcommand("compute-fit", "evaluate the fitting matrix");
    grid.add(sub);
    sub->add_option("--mode", mode)
        ->check(CLI::IsMember({"grid", "kdtree"}))
        ->capture_default_str();
    sub->add_option("--boxes", boxes)->capture_default_str();
    sub->add_option("--units", units)->capture_default_str();
    sub->add_option("--out", out)->capture_default_str();
    sub->add_option("--stats", stats, "write evaluation statistics JSON");
    sub->add_option("--leaf-threshold", leaf_threshold)->capture_default_str();
    sub->add_option("--node-budget", node_budget)->capture_default_str();
    sub->callback([this, &ctx] { run(ctx); });
  }

  void run(Context& ctx) {
    const auto bs = load_boxes(boxes);
    const IngestResult in = load_units(units, bs.back().dims, node_budget);
    for (const Rejection& r : in.rejections) {
      ctx.err << "rejected unit '" << r.external_id << "' (line " << r.line
              << "): " << r.reason << '\n';
    }
    const BinpackOracle oracle{node_budget};
    FitResult fit;
    if (mode == "grid") {
      fit = evaluate_exhaustive(in.units, bs, oracle, ctx.threads);
    } else {
      KdConfig cfg;
      cfg.leaf_threshold = leaf_threshold;
      fit = evaluate_all(in.units, bs, grid.grid(), oracle, cfg, ctx.threads);
    }
    with_output(out, [&](std::ostream& o) { serialize(fit.matrix, o); });
    if (!stats.empty()) {
      ojson s;
      s["mode"] = mode;
      s["units"] = in.units.size();
      s["boxes"] = bs.size();
      s["oracle_calls"] = fit.stats.oracle_calls;
      s["exhausted_calls"] = fit.stats.exhausted_calls;
      s["grid_oracle_calls"] = in.units.size() * bs.size();
      s["seconds"] = fit.stats.seconds;
      s["rejections"] = rejections_json(in.rejections);
      with_output(stats, [&](std::ostream& o) { o << s.dump(2) << '\n'; });
    }
  }
};

// Cheapest available fitting box per unit.
inline std::vector<int> assign_units(const BitMatrix& fit, const Availability& y) {
  std::vector<int> out(fit.rows(), -1);
  const auto yw = y.words();
  for (std::size_t p = 0; p < fit.rows(); ++p) {
    const auto row = fit.row(p);
    for (std::size_t i = 0; i < row.size(); ++i) {
      const Word w = row[i] & yw[i];
      if (w) {
        out[p] = static_cast<int>(i * kWordBits + std::countr_zero(w));
        break;
      }
    }
  }
  return out;
}

struct Optimize {
  std::string mode = "benders-xy";
  std::string fit = "fit.bin";
  std::string boxes = "boxes.csv";
  std::string units = "units.jsonl";
  std::string cartons = "cartons.csv";
  std::string rel = "rel.csv";
  std::string out = "-";
  std::string cuts_out;
  int budget = 8;
  std::vector<int> fixed;
  std::string backend = "builtin";
  std::string solver_command = SolverOptions{}.external_command;
  double tol = 1e-6;
  int max_iter = 100;
  double time_limit = 0;
  std::int64_t node_budget = 1'000'000;
  std::size_t direct_cap = ProblemConfig{}.direct_cap;

  void add(CLI::App& app, Context& ctx) {
    auto* sub = app.add_subcommand("optimize", "select cartons");
    sub->add_option("--mode", mode)
        ->check(CLI::IsMember({"direct", "benders-x", "benders-xy"}))
        ->capture_default_str();
    sub->add_option("--fit", fit)->capture_default_str();
    sub->add_option("--boxes", boxes)->capture_default_str();
    sub->add_option("--units", units)->capture_default_str();
    sub->add_option("--cartons", cartons)->capture_default_str();
    sub->add_option("--rel", rel)->capture_default_str();
    sub->add_option("--out", out, "result JSON ('-' for stdout)");
    sub->add_option("--cuts", cuts_out, "write the final cut pool (JSON lines)");
    sub->add_option("-M,--num-cartons", budget, "cartons to select")
        ->capture_default_str();
    sub->add_option("--fixed-boxes", fixed, "box ids that must be available")
        ->delimiter(',');
    sub->add_option("--backend", backend)
        ->check(CLI::IsMember({"builtin", "external"}))
        ->capture_default_str();
    sub->add_option("--solver-command", solver_command,
                    "external solver; {mps} and {sol} are substituted")
        ->capture_default_str();
    sub->add_option("--tol", tol)->capture_default_str();
    sub->add_option("--max-iter", max_iter)->capture_default_str();
    sub->add_option("--time-limit", time_limit, "seconds, 0 for none")
        ->capture_default_str();
    sub->add_option("--node-budget", node_budget)->capture_default_str();
    sub->add_option("--direct-cap", direct_cap, "max units x boxes for --mode direct")
        ->capture_default_str();
    sub->callback([this, &ctx] { run(ctx); });
  }

  void run(Context& ctx) {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    const auto bs = load_boxes(boxes);
    const IngestResult in = load_units(units, bs.back().dims, node_budget);
    const BitMatrix matrix =
        with_input(fit, [](std::istream& i) { return deserialize(i); });
    if (matrix.rows() != in.units.size() || matrix.cols() != bs.size()) {
      throw DomainError("fit matrix is " + std::to_string(matrix.rows()) + "x" +
                        std::to_string(matrix.cols()) + " but inputs have " +
                        std::to_string(in.units.size()) + " units and " +
                        std::to_string(bs.size()) + " boxes");
    }
    const auto cs =
        with_input(cartons, [](std::istream& i) { return read_cartons(i); });
    const RelTable table = with_input(rel, [&](std::istream& i) {
      return read_rel(i, static_cast<int>(cs.size()), static_cast<int>(bs.size()));
    });
    const auto bv = volumes_of(bs);
    const auto uv = volumes_of(in.units);
    std::vector<Volume> cv;
    for (const Carton& c : cs) cv.push_back(c.dims.volume());
    const double load_seconds =
        std::chrono::duration<double>(clock::now() - t0).count();

    ProblemConfig problem;
    problem.cartons = budget;
    problem.fixed_boxes = fixed;
    problem.direct_cap = direct_cap;
    SolverOptions solver;
    solver.backend = backend;
    solver.external_command = solver_command;

    ojson result;
    result["mode"] = mode;
    CartonSelection z(cs.size());
    Volume theta = 0;
    double gap = 0;
    ojson history = ojson::array();
    std::string termination;
    const auto t1 = clock::now();
    if (mode == "direct") {
      const MipModel m = build_direct(matrix, bv, uv, table, problem);
      const MipSolution sol = solve_mip(m, solver);
      if (sol.status == MipStatus::kInfeasible) {
        throw InfeasibleError("direct model infeasible");
      }
      if (sol.status != MipStatus::kOptimal) {
        throw Error(std::string("direct model: solver returned ") +
                    to_string(sol.status));
      }
      const auto& vars = m.variables();
      for (std::size_t j = 0; j < vars.size(); ++j) {
        if (vars[j].role == VarRole::kCarton && sol.values[j] > 0.5) z.set(vars[j].a);
      }
      theta = sol.objective;
      termination = "optimal";
    } else {
      BendersConfig cfg;
      cfg.problem = problem;
      cfg.tol = tol;
      cfg.max_iter = max_iter;
      if (time_limit > 0) cfg.time_limit = time_limit;
      cfg.solver = solver;
      cfg.threads = ctx.threads;
      const BendersResult r = benders_loop(
          {matrix, bv, uv, table, cv},
          mode == "benders-xy" ? BendersMode::kXY : BendersMode::kX, cfg);
      z = r.best_z;
      theta = r.theta;
      gap = r.gap;
      termination = r.termination;
      for (const IterationRecord& it : r.iterations) {
        history.push_back({{"iteration", it.iteration},
                           {"theta", it.theta},
                           {"f", it.f},
                           {"incumbent", it.incumbent}});
      }
      if (!cuts_out.empty()) {
        with_output(cuts_out, [&](std::ostream& o) { write_cut_pool(r.pool, o); });
      }
    }
    const double solve_seconds =
        std::chrono::duration<double>(clock::now() - t1).count();

    const Availability y = expand_cartons_to_boxes(z, table);
    const DualSolution d = fast_dual(matrix, bv, uv, y, ctx.threads);
    if (mode == "direct") gap = relative_gap(d.f, theta);
    Volume total = 0;
    for (Volume v : uv) total += v;

    ojson selected = ojson::array();
    for (std::size_t k : z.ones()) {
      const Carton& c = cs[k];
      selected.push_back({{"id", c.id},
                          {"l", c.dims.l},
                          {"w", c.dims.w},
                          {"heights", c.crease_heights}});
    }
    ojson available = ojson::array();
    for (std::size_t b : y.ones()) {
      available.push_back({{"id", bs[b].id},
                           {"l", bs[b].dims.l},
                           {"w", bs[b].dims.w},
                           {"h", bs[b].dims.h}});
    }
    ojson assignment = ojson::array();
    const auto assigned = assign_units(matrix, y);
    for (std::size_t p = 0; p < assigned.size(); ++p) {
      assignment.push_back({{"unit", in.units[p].external_id}, {"box", assigned[p]}});
    }
    const Score s = total > 0 ? report(d.f, total) : Score{};
    result["termination"] = termination;
    result["incumbent"] = d.f;
    result["theta"] = theta;
    result["gap"] = gap;
    result["total_unit_volume"] = total;
    result["score"] = std::stod(significant(s.score));
    result["kpi"] = std::stod(significant(s.kpi));
    result["counts"] = {{"units", in.units.size()},
                        {"boxes", bs.size()},
                        {"cartons", cs.size()},
                        {"rel", table.size()},
                        {"rejected_units", in.rejections.size()}};
    result["selected_cartons"] = selected;
    result["boxes"] = available;
    result["assignment"] = assignment;
    result["history"] = history;
    result["timings"] = {{"load_seconds", load_seconds},
                         {"solve_seconds", solve_seconds}};
    emit(out, ctx.out, [&](std::ostream& o) { o << result.dump(2) << '\n'; });
  }
};

struct Report {
  std::string result;
  std::optional<Volume> objective;
  std::optional<Volume> total;

  void add(CLI::App& app, Context& ctx) {
    auto* sub = app.add_subcommand("report", "score and empty-volume KPI");
    auto* r = sub->add_option("--result", result, "result JSON from optimize");
    sub->add_option("--objective", objective, "empty volume in mm^3")->excludes(r);
    sub->add_option("--total-volume", total, "packing-unit volume in mm^3")
        ->excludes(r);
    sub->callback([this, &ctx] { run(ctx); });
  }

  void run(Context& ctx) {
    Volume obj = 0, tot = 0;
    if (!result.empty()) {
      const auto j = with_input(result, [](std::istream& i) {
        return nlohmann::json::parse(i);
      });
      obj = j.at("incumbent").get<Volume>();
      tot = j.at("total_unit_volume").get<Volume>();
    } else {
      if (!objective || !total) {
        throw UsageError("give --result or both --objective and --total-volume");
      }
      obj = *objective;
      tot = *total;
    }
    const Score s = report(obj, tot);
    ojson out;
    out["objective"] = obj;
    out["total_unit_volume"] = tot;
    out["score"] = std::stod(significant(s.score));
    out["kpi"] = std::stod(significant(s.kpi));
    out["kpi_percent"] = significant(100.0 * s.kpi) + "%";
    ctx.out << out.dump(2) << '\n';
  }
};

struct Bench {
  std::string suite = "fit";
  std::vector<std::int64_t> sizes;
  BenchOptions opt;
  std::string format = "csv";
  std::string out = "-";

  void add(CLI::App& app, Context& ctx) {
    auto* sub = app.add_subcommand("bench", "timing benchmarks (medians)");
    sub->add_option("--suite", suite, "dual, fit or end2end")->capture_default_str();
    sub->add_option("--sizes", sizes, "suite sizes")->delimiter(',');
    sub->add_option("--repetitions", opt.repetitions)->capture_default_str();
    sub->add_option("--seed", opt.seed)->capture_default_str();
    sub->add_option("--format", format)
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    sub->add_option("--out", out);
    sub->callback([this, &ctx] {
      opt.threads = ctx.threads == 0 ? 1 : ctx.threads;
      const auto rows = bench(suite, sizes, opt);
      emit(out, ctx.out, [&](std::ostream& o) {
        if (format == "csv") {
          write_bench_csv(rows, o);
        } else {
          o << bench_json(rows).dump(2) << '\n';
        }
      });
    });
  }
};

struct Fits {
  std::vector<std::string> items;
  std::string box;
  std::int64_t node_budget = 1'000'000;

  void add(CLI::App& app, Context& ctx) {
    auto* sub = app.add_subcommand("fits", "single packing query");
    sub->add_option("--items", items, "item dims LxWxH")->delimiter(',')->required();
    sub->add_option("--box", box, "box dims LxWxH")->required();
    sub->add_option("--node-budget", node_budget)->capture_default_str();
    sub->callback([this, &ctx] {
      FitQuery q;
      for (const auto& s : items) q.items.push_back({parse_dim3(s)});
      q.box = parse_dim3(box);
      q.node_budget = node_budget;
      const FitVerdict v = fits(q);
      ctx.out << ojson{{"fits", v.fits}, {"exhausted", v.exhausted},
                       {"nodes", v.nodes}}.dump()
              << '\n';
    });
  }
};

}  // namespace cli_internal

inline int run_cli(int argc, const char* const* argv, std::ostream& out,
                   std::ostream& err) {
  using namespace cli_internal;
  CLI::App app{"Variable-height box and carton optimizer", "boxopt"};
  app.set_config("--config", "", "read flags from a TOML/INI file");
  app.require_subcommand(1);
  Context ctx{out, err};
  app.add_option("--threads", ctx.threads, "worker threads, 0 = all cores")
      ->capture_default_str();
  GenBoxes gen_boxes;
  GenCartons gen_cartons;
  GenUnits gen_units;
  ComputeFit compute_fit;
  Optimize optimize;
  Report report_cmd;
  Bench bench_cmd;
  Fits fits_cmd;
  gen_boxes.add(app, ctx);
  gen_cartons.add(app, ctx);
  gen_units.add(app, ctx);
  compute_fit.add(app, ctx);
  optimize.add(app, ctx);
  report_cmd.add(app, ctx);
  bench_cmd.add(app, ctx);
  fits_cmd.add(app, ctx);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace boxopt

#endif  // BOXOPT_CLI_HPP_
