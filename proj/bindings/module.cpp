#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "uard/agent.hpp"
#include "uard/harness.hpp"

namespace py = pybind11;

PYBIND11_MODULE(uard, m) {
  m.doc() =
      "Uncertainty-aware reward discounting laboratory: ensemble tabular "
      "Q-learning with a dual-source reliability filter on deceptive grid "
      "worlds";

  py::class_<uard::SplitMix64>(m, "SplitMix64")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("next_u64", &uard::SplitMix64::next_u64)
      .def("next_unit", &uard::SplitMix64::next_unit)
      .def("next_below", &uard::SplitMix64::next_below, py::arg("n"))
      .def("next_gaussian",
           py::overload_cast<>(&uard::SplitMix64::next_gaussian))
      .def("next_gaussian",
           py::overload_cast<double, double>(&uard::SplitMix64::next_gaussian),
           py::arg("mean"), py::arg("stddev"));
  m.def("derive_stream", &uard::derive_stream, py::arg("base_seed"),
        py::arg("run_index"), py::arg("label"));

  py::class_<uard::Cell>(m, "Cell")
      .def(py::init<>())
      .def(py::init([](int row, int col) { return uard::Cell{row, col}; }),
           py::arg("row"), py::arg("col"))
      .def_readwrite("row", &uard::Cell::row)
      .def_readwrite("col", &uard::Cell::col)
      .def("__eq__",
           [](const uard::Cell& a, const uard::Cell& b) { return a == b; })
      .def("__repr__", [](const uard::Cell& c) {
        return "Cell(" + std::to_string(c.row) + ", " + std::to_string(c.col) +
               ")";
      });

  py::enum_<uard::Action>(m, "Action")
      .value("Up", uard::Action::Up)
      .value("Down", uard::Action::Down)
      .value("Left", uard::Action::Left)
      .value("Right", uard::Action::Right);

  py::enum_<uard::GridSize>(m, "GridSize")
      .value("G6", uard::GridSize::G6)
      .value("G8", uard::GridSize::G8)
      .value("G10", uard::GridSize::G10);

  py::class_<uard::GridWorldConfig>(m, "GridWorldConfig")
      .def(py::init<>())
      .def_readwrite("width", &uard::GridWorldConfig::width)
      .def_readwrite("height", &uard::GridWorldConfig::height)
      .def_readwrite("start", &uard::GridWorldConfig::start)
      .def_readwrite("goal", &uard::GridWorldConfig::goal)
      .def_readwrite("traps", &uard::GridWorldConfig::traps)
      .def_readwrite("max_steps", &uard::GridWorldConfig::max_steps)
      .def_readwrite("observed_trap_reward",
                     &uard::GridWorldConfig::observed_trap_reward)
      .def_readwrite("goal_reward", &uard::GridWorldConfig::goal_reward)
      .def_readwrite("observed_step_reward",
                     &uard::GridWorldConfig::observed_step_reward)
      .def_readwrite("true_step_reward",
                     &uard::GridWorldConfig::true_step_reward)
      .def_readwrite("true_trap_reward",
                     &uard::GridWorldConfig::true_trap_reward)
      .def("n_states", &uard::GridWorldConfig::n_states)
      .def("is_trap", &uard::GridWorldConfig::is_trap, py::arg("cell"))
      .def("validate", &uard::GridWorldConfig::validate);

  py::class_<uard::GridState>(m, "GridState")
      .def(py::init<>())
      .def_readwrite("position", &uard::GridState::position)
      .def_readwrite("steps_taken", &uard::GridState::steps_taken);

  py::class_<uard::StepOutcome>(m, "StepOutcome")
      .def_readonly("next_state", &uard::StepOutcome::next_state)
      .def_readonly("observed_reward", &uard::StepOutcome::observed_reward)
      .def_readonly("true_reward", &uard::StepOutcome::true_reward)
      .def_readonly("terminal", &uard::StepOutcome::terminal)
      .def_readonly("trap_hit", &uard::StepOutcome::trap_hit)
      .def_readonly("goal_reached", &uard::StepOutcome::goal_reached);

  py::class_<uard::PerturbationSpec>(m, "PerturbationSpec")
      .def(py::init<>())
      .def_readwrite("trigger_step", &uard::PerturbationSpec::trigger_step)
      .def_readwrite("magnitude", &uard::PerturbationSpec::magnitude)
      .def_readwrite("enabled", &uard::PerturbationSpec::enabled);

  m.def("make_preset", &uard::make_preset, py::arg("size"));
  m.def("reset", &uard::reset, py::arg("config"));
  m.def("step", &uard::step, py::arg("config"), py::arg("state"),
        py::arg("action"));
  m.def("apply_perturbation", &uard::apply_perturbation, py::arg("config"),
        py::arg("state"), py::arg("spec"));
  m.def("state_index", &uard::state_index, py::arg("config"),
        py::arg("state"));

  py::class_<uard::ValueEstimate>(m, "ValueEstimate")
      .def_readonly("mu", &uard::ValueEstimate::mu)
      .def_readonly("sigma_m", &uard::ValueEstimate::sigma_m);

  py::class_<uard::QEnsemble>(m, "QEnsemble")
      .def(py::init<int, int, int, double, std::uint64_t, double, double>(),
           py::arg("n_heads"), py::arg("n_states"), py::arg("n_actions"),
           py::arg("init_scale"), py::arg("rng_seed"),
           py::arg("learning_rate") = 0.1, py::arg("discount_factor") = 0.95)
      .def("mean", &uard::QEnsemble::mean, py::arg("s"), py::arg("a"))
      .def("sigma_m", &uard::QEnsemble::sigma_m, py::arg("s"), py::arg("a"))
      .def("estimate", &uard::QEnsemble::estimate, py::arg("s"), py::arg("a"))
      .def("update", &uard::QEnsemble::update, py::arg("s"), py::arg("a"),
           py::arg("reward"), py::arg("s_next"), py::arg("terminal"))
      .def("head_value", &uard::QEnsemble::head_value, py::arg("head"),
           py::arg("s"), py::arg("a"))
      .def("set_head_value", &uard::QEnsemble::set_head_value, py::arg("head"),
           py::arg("s"), py::arg("a"), py::arg("value"))
      .def("n_heads", &uard::QEnsemble::n_heads)
      .def("n_states", &uard::QEnsemble::n_states)
      .def("n_actions", &uard::QEnsemble::n_actions);

  py::enum_<uard::AnnotatorKind>(m, "AnnotatorKind")
      .value("Conservative", uard::AnnotatorKind::Conservative)
      .value("MildlyTempted", uard::AnnotatorKind::MildlyTempted)
      .value("Stochastic", uard::AnnotatorKind::Stochastic);

  py::class_<uard::AnnotatorProfile>(m, "AnnotatorProfile")
      .def(py::init<>())
      .def_readwrite("kind", &uard::AnnotatorProfile::kind)
      .def_readwrite("trap_bias", &uard::AnnotatorProfile::trap_bias)
      .def_readwrite("noise_std", &uard::AnnotatorProfile::noise_std)
      .def_readwrite("trap_noise_std", &uard::AnnotatorProfile::trap_noise_std);

  py::class_<uard::FeedbackSample>(m, "FeedbackSample")
      .def_readonly("annotations", &uard::FeedbackSample::annotations)
      .def_readonly("mean_h", &uard::FeedbackSample::mean_h)
      .def_readonly("sigma_h", &uard::FeedbackSample::sigma_h);

  py::class_<uard::NoiseSpec>(m, "NoiseSpec")
      .def(py::init<>())
      .def_readwrite("level", &uard::NoiseSpec::level)
      .def_readwrite("std_scale", &uard::NoiseSpec::std_scale)
      .def_static("from_level", &uard::NoiseSpec::from_level,
                  py::arg("level"), py::arg("goal_reward") = 10.0);

  m.def("default_profiles", &uard::default_profiles);
  m.def(
      "annotate",
      [](const std::vector<uard::AnnotatorProfile>& profiles,
         double env_observed_reward, bool trap_hit,
         const uard::NoiseSpec& noise, uard::SplitMix64& rng) {
        return uard::annotate(profiles, env_observed_reward, trap_hit, noise,
                              rng);
      },
      py::arg("profiles"), py::arg("env_observed_reward"), py::arg("trap_hit"),
      py::arg("noise"), py::arg("rng"));

  py::class_<uard::SigmaHStore>(m, "SigmaHStore")
      .def(py::init<int, int, double>(), py::arg("n_states"),
           py::arg("n_actions"), py::arg("tau") = 0.1)
      .def("update", &uard::SigmaHStore::update, py::arg("s"), py::arg("a"),
           py::arg("sample"))
      .def("value", &uard::SigmaHStore::value, py::arg("s"), py::arg("a"))
      .def("visited", &uard::SigmaHStore::visited, py::arg("s"), py::arg("a"));

  py::enum_<uard::FilterVariant>(m, "FilterVariant")
      .value("Reciprocal", uard::FilterVariant::Reciprocal)
      .value("LinearSubtraction", uard::FilterVariant::LinearSubtraction)
      .value("ExponentialDecay", uard::FilterVariant::ExponentialDecay);

  py::class_<uard::FilterParams>(m, "FilterParams")
      .def(py::init<>())
      .def_readwrite("lambda_", &uard::FilterParams::lambda)
      .def_readwrite("alpha", &uard::FilterParams::alpha)
      .def_readwrite("beta", &uard::FilterParams::beta)
      .def_readwrite("variant", &uard::FilterParams::variant)
      .def_readwrite("adaptive", &uard::FilterParams::adaptive)
      .def_readwrite("lambda_min", &uard::FilterParams::lambda_min)
      .def_readwrite("lambda_max", &uard::FilterParams::lambda_max)
      .def_readwrite("abstain_threshold",
                     &uard::FilterParams::abstain_threshold);

  py::class_<uard::ActionScore>(m, "ActionScore")
      .def_readonly("j", &uard::ActionScore::j)
      .def_readonly("risk", &uard::ActionScore::risk)
      .def_readonly("abstain", &uard::ActionScore::abstain);

  m.def("score", &uard::score, py::arg("params"), py::arg("mu"),
        py::arg("sigma_m"), py::arg("sigma_h"));
  m.def("dj_dsigma_m", &uard::dj_dsigma_m, py::arg("params"), py::arg("mu"),
        py::arg("sigma_m"), py::arg("sigma_h"));
  m.def("dj_dsigma_h", &uard::dj_dsigma_h, py::arg("params"), py::arg("mu"),
        py::arg("sigma_m"), py::arg("sigma_h"));
  m.def("check_proposition_1", &uard::check_proposition_1, py::arg("params"),
        py::arg("mu"), py::arg("sigma_m"), py::arg("sigma_h"));
  m.def("check_proposition_2", &uard::check_proposition_2, py::arg("params"),
        py::arg("mu"), py::arg("rng"), py::arg("trials") = 100);
  m.def("adaptive_lambda", &uard::adaptive_lambda, py::arg("params"),
        py::arg("sigma_m"), py::arg("sigma_h"), py::arg("baseline_sigma"));

  py::enum_<uard::TieBreak>(m, "TieBreak")
      .value("LowestActionIndex", uard::TieBreak::LowestActionIndex)
      .value("RandomUniform", uard::TieBreak::RandomUniform);

  py::class_<uard::PolicyConfig>(m, "PolicyConfig")
      .def(py::init<>())
      .def_readwrite("epsilon_start", &uard::PolicyConfig::epsilon_start)
      .def_readwrite("epsilon_decay", &uard::PolicyConfig::epsilon_decay)
      .def_readwrite("epsilon_min", &uard::PolicyConfig::epsilon_min)
      .def_readwrite("tie_break", &uard::PolicyConfig::tie_break);

  py::class_<uard::VariantSpec>(m, "VariantSpec")
      .def(py::init<>())
      .def_readwrite("use_sigma_m", &uard::VariantSpec::use_sigma_m)
      .def_readwrite("use_sigma_h", &uard::VariantSpec::use_sigma_h)
      .def_readwrite("use_discounting", &uard::VariantSpec::use_discounting)
      .def_readwrite("name", &uard::VariantSpec::name)
      .def_static("all",
                  [] {
                    const auto& v = uard::VariantSpec::all();
                    return std::vector<uard::VariantSpec>(v.begin(), v.end());
                  })
      .def_static("by_name", &uard::VariantSpec::by_name, py::arg("name"));

  py::enum_<uard::DiscountMode>(m, "DiscountMode")
      .value("ScoreFilter", uard::DiscountMode::ScoreFilter)
      .value("RewardFilter", uard::DiscountMode::RewardFilter);

  py::class_<uard::ActionChoice>(m, "ActionChoice")
      .def_readonly("action", &uard::ActionChoice::action)
      .def_readonly("abstained", &uard::ActionChoice::abstained);

  m.def("gated_score", &uard::gated_score, py::arg("ensemble"),
        py::arg("sigma_h_store"), py::arg("params"), py::arg("variant"),
        py::arg("s"), py::arg("a"), py::arg("baseline_sigma") = -1.0);
  m.def("select_action", &uard::select_action, py::arg("ensemble"),
        py::arg("sigma_h_store"), py::arg("params"), py::arg("variant"),
        py::arg("policy"), py::arg("env"), py::arg("state"),
        py::arg("epsilon"), py::arg("abstention_enabled"), py::arg("rng"),
        py::arg("baseline_sigma") = -1.0);

  py::class_<uard::EpisodeMetrics>(m, "EpisodeMetrics")
      .def_readonly("episode", &uard::EpisodeMetrics::episode)
      .def_readonly("true_return", &uard::EpisodeMetrics::true_return)
      .def_readonly("observed_return", &uard::EpisodeMetrics::observed_return)
      .def_readonly("trap_visits", &uard::EpisodeMetrics::trap_visits)
      .def_readonly("abstentions", &uard::EpisodeMetrics::abstentions)
      .def_readonly("goal_reached", &uard::EpisodeMetrics::goal_reached)
      .def_readonly("mean_sigma_m", &uard::EpisodeMetrics::mean_sigma_m)
      .def_readonly("mean_sigma_h", &uard::EpisodeMetrics::mean_sigma_h)
      .def_readonly("epsilon", &uard::EpisodeMetrics::epsilon);

  py::class_<uard::MeanStd>(m, "MeanStd")
      .def_readonly("mean", &uard::MeanStd::mean)
      .def_readonly("std", &uard::MeanStd::std);

  py::class_<uard::FinalWindow>(m, "FinalWindow")
      .def_readonly("true_return", &uard::FinalWindow::true_return)
      .def_readonly("observed_return", &uard::FinalWindow::observed_return)
      .def_readonly("trap_visits", &uard::FinalWindow::trap_visits)
      .def_readonly("goal_rate", &uard::FinalWindow::goal_rate)
      .def_readonly("abstention_rate", &uard::FinalWindow::abstention_rate)
      .def_readonly("n_episodes", &uard::FinalWindow::n_episodes);

  py::class_<uard::RunSummary>(m, "RunSummary")
      .def_readonly("seed", &uard::RunSummary::seed)
      .def_readonly("variant_name", &uard::RunSummary::variant_name)
      .def_readonly("episodes", &uard::RunSummary::episodes)
      .def_readonly("final_window", &uard::RunSummary::final_window)
      .def_readonly("alignment_gap", &uard::RunSummary::alignment_gap)
      .def_readonly("perturbed_episode", &uard::RunSummary::perturbed_episode);

  py::class_<uard::VariantAggregate>(m, "VariantAggregate")
      .def_readonly("variant_name", &uard::VariantAggregate::variant_name)
      .def_readonly("n_runs", &uard::VariantAggregate::n_runs)
      .def_readonly("true_return", &uard::VariantAggregate::true_return)
      .def_readonly("observed_return",
                    &uard::VariantAggregate::observed_return)
      .def_readonly("trap_visits", &uard::VariantAggregate::trap_visits)
      .def_readonly("alignment_gap", &uard::VariantAggregate::alignment_gap)
      .def_readonly("goal_rate", &uard::VariantAggregate::goal_rate)
      .def_readonly("abstention_rate",
                    &uard::VariantAggregate::abstention_rate);

  py::class_<uard::SampleStats>(m, "SampleStats")
      .def(py::init([](double mean, double std, int n) {
             return uard::SampleStats{mean, std, n};
           }),
           py::arg("mean"), py::arg("std"), py::arg("n"))
      .def_readwrite("mean", &uard::SampleStats::mean)
      .def_readwrite("std", &uard::SampleStats::std)
      .def_readwrite("n", &uard::SampleStats::n);

  py::class_<uard::TTestResult>(m, "TTestResult")
      .def_readonly("t", &uard::TTestResult::t)
      .def_readonly("df", &uard::TTestResult::df)
      .def_readonly("p", &uard::TTestResult::p)
      .def_readonly("significant_at_05", &uard::TTestResult::significant_at_05);

  m.def("mean_std",
        [](const std::vector<double>& values) { return uard::mean_std(values); },
        py::arg("values"));
  m.def("aggregate",
        [](const std::vector<uard::RunSummary>& runs) {
          return uard::aggregate(runs);
        },
        py::arg("runs"));
  m.def("welch_t_test", &uard::welch_t_test, py::arg("a"), py::arg("b"));
  m.def("pooled_t_test", &uard::pooled_t_test, py::arg("a"), py::arg("b"));
  m.def("incomplete_beta", &uard::incomplete_beta, py::arg("a"), py::arg("b"),
        py::arg("x"));
  m.def("student_t_two_sided_p", &uard::student_t_two_sided_p, py::arg("t"),
        py::arg("df"));
  m.def("reduction_percent", &uard::reduction_percent, py::arg("baseline"),
        py::arg("treated"));
  m.def("sign_preservation_radius", &uard::sign_preservation_radius,
        py::arg("ensemble"), py::arg("sigma_h_store"), py::arg("params"),
        py::arg("s"));

  py::class_<uard::TrainingConfig>(m, "TrainingConfig")
      .def(py::init<>())
      .def_readwrite("env", &uard::TrainingConfig::env)
      .def_readwrite("variant", &uard::TrainingConfig::variant)
      .def_readwrite("filter", &uard::TrainingConfig::filter)
      .def_readwrite("mode", &uard::TrainingConfig::mode)
      .def_readwrite("policy", &uard::TrainingConfig::policy)
      .def_readwrite("noise", &uard::TrainingConfig::noise)
      .def_readwrite("perturbation", &uard::TrainingConfig::perturbation)
      .def_readwrite("annotators", &uard::TrainingConfig::annotators)
      .def_readwrite("abstention_enabled",
                     &uard::TrainingConfig::abstention_enabled)
      .def_readwrite("n_episodes", &uard::TrainingConfig::n_episodes)
      .def_readwrite("n_heads", &uard::TrainingConfig::n_heads)
      .def_readwrite("init_scale", &uard::TrainingConfig::init_scale)
      .def_readwrite("learning_rate", &uard::TrainingConfig::learning_rate)
      .def_readwrite("discount_factor",
                     &uard::TrainingConfig::discount_factor)
      .def_readwrite("rng_seed", &uard::TrainingConfig::rng_seed)
      .def_readwrite("seed_label", &uard::TrainingConfig::seed_label);

  m.def("run_training", &uard::run_training, py::arg("config"),
        py::call_guard<py::gil_scoped_release>());

  py::class_<uard::ExperimentSpec>(m, "ExperimentSpec")
      .def(py::init<>())
      .def_readwrite("grid", &uard::ExperimentSpec::grid)
      .def_readwrite("variants", &uard::ExperimentSpec::variants)
      .def_readwrite("n_seeds", &uard::ExperimentSpec::n_seeds)
      .def_readwrite("n_episodes", &uard::ExperimentSpec::n_episodes)
      .def_readwrite("base_seed", &uard::ExperimentSpec::base_seed)
      .def_readwrite("filter", &uard::ExperimentSpec::filter)
      .def_readwrite("lambdas", &uard::ExperimentSpec::lambdas)
      .def_readwrite("noise_levels", &uard::ExperimentSpec::noise_levels)
      .def_readwrite("noise_level", &uard::ExperimentSpec::noise_level)
      .def_readwrite("mode", &uard::ExperimentSpec::mode)
      .def_readwrite("hard_trap", &uard::ExperimentSpec::hard_trap)
      .def_readwrite("perturbation", &uard::ExperimentSpec::perturbation)
      .def_readwrite("abstention_enabled",
                     &uard::ExperimentSpec::abstention_enabled)
      .def_readwrite("policy", &uard::ExperimentSpec::policy)
      .def_readwrite("annotators", &uard::ExperimentSpec::annotators)
      .def_readwrite("n_heads", &uard::ExperimentSpec::n_heads)
      .def_readwrite("init_scale", &uard::ExperimentSpec::init_scale)
      .def_readwrite("learning_rate", &uard::ExperimentSpec::learning_rate)
      .def_readwrite("discount_factor",
                     &uard::ExperimentSpec::discount_factor)
      .def_readwrite("out_dir", &uard::ExperimentSpec::out_dir)
      .def_readwrite("jobs", &uard::ExperimentSpec::jobs);

  py::class_<uard::ReportBundle>(m, "ReportBundle")
      .def_readonly("suite_dir", &uard::ReportBundle::suite_dir)
      .def_readonly("run_csvs", &uard::ReportBundle::run_csvs)
      .def_readonly("aggregate_csv", &uard::ReportBundle::aggregate_csv)
      .def_readonly("report_md", &uard::ReportBundle::report_md)
      .def_readonly("labels", &uard::ReportBundle::labels)
      .def_readonly("aggregates", &uard::ReportBundle::aggregates)
      .def_readonly("runs", &uard::ReportBundle::runs);

  m.def("parse_config_file", &uard::parse_config_file, py::arg("path"));
  m.def("make_training_config", &uard::make_training_config, py::arg("spec"),
        py::arg("variant"), py::arg("seed_index"), py::arg("stream_label"));
  m.def("run_suite", &uard::run_suite, py::arg("spec"),
        py::call_guard<py::gil_scoped_release>());
  m.def("run_noise_sweep", &uard::run_noise_sweep, py::arg("spec"),
        py::call_guard<py::gil_scoped_release>());
  m.def("run_lambda_sweep", &uard::run_lambda_sweep, py::arg("spec"),
        py::call_guard<py::gil_scoped_release>());
  m.def("run_filter_curves", &uard::run_filter_curves, py::arg("spec"));
  m.def("run_ood_test", &uard::run_ood_test, py::arg("spec"),
        py::call_guard<py::gil_scoped_release>());
  m.def("run_stats", &uard::run_stats, py::arg("suite_dir"));
}
