#include "ctrpo/sweep.hpp"

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "ctrpo/csv.hpp"
#include "ctrpo/svgplot.hpp"
#include "ctrpo/training.hpp"

namespace ctrpo {

namespace {

SweepRun make_run(int experiment, const ExperimentConfig& base, Algorithm alg, double r, double c,
                  double cl) {
    SweepRun run;
    run.config = base;
    run.config.algorithm = alg;
    run.config.constraint.r = r;
    run.config.constraint.c = c;
    run.config.constraint.cl = cl;
    run.name = "exp" + std::to_string(experiment) + "_" + to_string(alg) + "_r" + csv_double(r) + "_c" +
               csv_double(c) + "_cl" + csv_double(cl);
    return run;
}

}  // namespace

std::vector<SweepRun> sweep_configs(int experiment, const ExperimentConfig& base) {
    std::vector<SweepRun> runs;
    switch (experiment) {
        case 1:
            for (const Algorithm alg : {Algorithm::Cpo, Algorithm::Trpo, Algorithm::TrpoRp})
                for (const double r : {0.1, 0.05, 0.03}) runs.push_back(make_run(1, base, alg, r, 0.01, 0.25));
            break;
        case 2:
            for (const double r : {0.15, 0.05, 0.03})
                runs.push_back(make_run(2, base, Algorithm::Cpo, r, 0.01, 0.25));
            break;
        case 3:
            for (const double cl : {0.5, 0.25, 0.1})
                runs.push_back(make_run(3, base, Algorithm::Cpo, 0.05, 0.01, cl));
            break;
        case 4:
            for (const auto& [c, cl] :
                 {std::pair<double, double>{10.0, 250.0}, {0.1, 2.5}, {0.01, 0.25}})
                runs.push_back(make_run(4, base, Algorithm::Cpo, 0.05, c, cl));
            break;
        default:
            throw std::invalid_argument("experiment must be 1, 2, 3, or 4");
    }
    return runs;
}

std::vector<SweepRunResult> run_sweep(int experiment, const ExperimentConfig& base,
                                      const std::string& out_dir, int eval_rollouts) {
    if (eval_rollouts < 1) throw std::invalid_argument("eval_rollouts must be positive");
    const std::vector<SweepRun> runs = sweep_configs(experiment, base);
    std::filesystem::create_directories(out_dir);

    std::vector<SweepRunResult> results;
    std::vector<PlotSeries> success_series, violation_series;

    for (const SweepRun& run : runs) {
        SweepRunResult res;
        res.name = run.name;
        const std::string run_dir = out_dir + "/" + run.name;
        try {
            std::filesystem::create_directories(run_dir);
            const TrainResult trained = train(run.config, run_dir);
            const GaussianPolicy policy(trained.policy_spec, trained.policy_params);
            const std::vector<EvalEpisode> eval_rows =
                evaluate_policy(run.config.env, run.config.constraint, policy, eval_rollouts,
                                run.config.training.seed + kEvalSeedOffset, run.config.gamma_c);
            write_eval_csv(run_dir + "/eval.csv", eval_rows);
            res.eval = aggregate_eval(eval_rows);
            res.ok = true;

            PlotSeries succ{run.name, {}, {}};
            PlotSeries viol{run.name, {}, {}};
            for (const IterationMetrics& row : trained.metrics.rows) {
                succ.x.push_back(static_cast<double>(row.cumulative_samples));
                succ.y.push_back(row.success_rate);
                viol.x.push_back(static_cast<double>(row.cumulative_samples));
                viol.y.push_back(row.avg_violations);
            }
            success_series.push_back(std::move(succ));
            violation_series.push_back(std::move(viol));
        } catch (const std::exception& e) {
            res.ok = false;
            res.error = e.what();
        }
        results.push_back(std::move(res));
    }

    std::ofstream summary(out_dir + "/summary.csv");
    if (!summary) throw std::runtime_error("cannot open sweep summary for writing");
    summary << "name,status,error,eval_success_rate,eval_avg_violations,eval_mean_return,"
               "eval_mean_discounted_cost\n";
    for (const SweepRunResult& res : results) {
        summary << res.name << "," << (res.ok ? "ok" : "failed") << "," << res.error << ",";
        if (res.ok) {
            summary << csv_double(res.eval.success_rate) << "," << csv_double(res.eval.avg_violations) << ","
                    << csv_double(res.eval.mean_return) << "," << csv_double(res.eval.mean_discounted_cost);
        } else {
            summary << ",,,";
        }
        summary << "\n";
    }

    if (!success_series.empty()) {
        write_line_chart_svg(out_dir + "/success_rate.svg",
                             "Experiment " + std::to_string(experiment) + ": success rate", "samples",
                             "success rate", success_series);
        write_line_chart_svg(out_dir + "/avg_violations.svg",
                             "Experiment " + std::to_string(experiment) + ": constraint violations",
                             "samples", "violations per episode", violation_series);
    }
    return results;
}

}  // namespace ctrpo
