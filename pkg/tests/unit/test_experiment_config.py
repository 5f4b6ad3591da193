"""Tests for experiment YAML files and their resolution."""

import numpy as np
import pytest

from distributed_emo.config.experiment import (
    ExperimentConfig,
    load_experiment_config,
)
from distributed_emo.config.settings import Settings
from distributed_emo.dynamics.state import Algorithm
from distributed_emo.exceptions import ConfigurationError
from distributed_emo.experiments.resolve import (
    initial_state,
    resolve_experiment,
)
from distributed_emo.problem.objectives import (
    QuadraticObjective,
    SeparableQuadraticL1,
)
from distributed_emo.problem.sets import Ball, Box, Interval

INLINE_YAML = """\
problem:
  m: 1
  d0: [1.0]
  supply_weights: [0.25, 0.75]
  agents:
    - objective: {kind: quadratic_l1, a: [1.0], b: [0.5]}
      set: {kind: interval, lo: -1, hi: 1}
      w: [[1.0]]
    - objective: {kind: quadratic, Q: [[2, 0], [0, 2]]}
      set:
        kind: product
        factors:
          - {kind: interval, lo: 0, hi: 2}
          - {kind: ball, center: [0.0], radius: 1.0}
      w: [[1.0, -1.0]]
graph:
  edges: [[0, 1, 2.0]]
algorithm: ddfa
h: 0.05
t_end: 20
sample_stride: 5
init:
  lambda: [0.5, 0.5]
"""


@pytest.fixture
def inline_file(tmp_path):
    path = tmp_path / "tiny.yaml"
    path.write_text(INLINE_YAML)
    return path


@pytest.mark.unit
class TestLoadExperimentConfig:
    """YAML parsing and validation."""

    def test_inline_problem(self, inline_file):
        config = load_experiment_config(inline_file)
        assert config.name == "tiny"
        assert config.algorithm == "ddfa"
        assert config.h == 0.05
        assert config.init.lam == [0.5, 0.5]
        assert config.problem.agents[1].set.factors[1].kind == "ball"

    def test_builtin_problem(self, tmp_path):
        path = tmp_path / "ns.yaml"
        path.write_text("name: demo\nproblem: {builtin: nonsmooth10}\n")
        config = load_experiment_config(path)
        assert config.name == "demo"
        assert config.problem.builtin == "nonsmooth10"
        assert config.graph is None

    @pytest.mark.parametrize(
        "text, setting",
        [
            ("problem: {builtin: tsp}\n", "problem.builtin"),
            ("problem: {builtin: minnorm}\nh: -1\n", "h"),
            ("problem: {builtin: minnorm}\nsample_stride: 0\n", "sample_stride"),
            ("problem: {builtin: minnorm}\nalgorithm: newton\n", "algorithm"),
            ("problem: {builtin: minnorm}\nstep: 0.1\n", "step"),
            ("problem: {m: 1}\n", "problem"),
            (
                "problem: {builtin: minnorm}\ngraph: {builtin: ring, "
                "edges: [[0, 1]]}\n",
                "graph",
            ),
        ],
    )
    def test_invalid_settings_are_named(self, tmp_path, text, setting):
        path = tmp_path / "bad.yaml"
        path.write_text(text)
        with pytest.raises(ConfigurationError) as exc_info:
            load_experiment_config(path)
        assert exc_info.value.setting == setting

    def test_not_a_mapping(self, tmp_path):
        path = tmp_path / "list.yaml"
        path.write_text("- 1\n- 2\n")
        with pytest.raises(ConfigurationError) as exc_info:
            load_experiment_config(path)
        assert exc_info.value.setting == "config"

    def test_invalid_yaml(self, tmp_path):
        path = tmp_path / "broken.yaml"
        path.write_text("problem: [unclosed\n")
        with pytest.raises(ConfigurationError):
            load_experiment_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            load_experiment_config(tmp_path / "absent.yaml")


@pytest.mark.unit
class TestOverrides:
    """Flag overrides and settings defaults."""

    def test_overrides_skip_none(self):
        config = ExperimentConfig.for_builtin("nonsmooth10", h=0.02)
        updated = config.with_overrides(h=None, t_end=50.0, algorithm="dpofa")
        assert updated.h == 0.02
        assert updated.t_end == 50.0
        assert updated.algorithm == "dpofa"
        assert config.algorithm == "both"

    def test_overrides_are_validated(self):
        config = ExperimentConfig.for_builtin("nonsmooth10")
        with pytest.raises(ConfigurationError) as exc_info:
            config.with_overrides(tol=0.0)
        assert exc_info.value.setting == "tol"

    def test_overrides_keep_init_alias(self, inline_file):
        config = load_experiment_config(inline_file).with_overrides(seed=3)
        assert config.seed == 3
        assert config.init.lam == [0.5, 0.5]

    def test_defaults_from_settings(self):
        settings = Settings(default_step=0.02, sample_stride=7)
        config = ExperimentConfig.for_builtin("minnorm", t_end=5.0)
        filled = config.with_defaults(settings)
        assert filled.h == 0.02
        assert filled.t_end == 5.0
        assert filled.sample_stride == 7
        assert filled.tol == settings.default_tol
        assert filled.output == settings.output_dir
        assert filled.selection == "min_norm"


@pytest.mark.unit
class TestResolve:
    """Building problems, graphs and initial states from configs."""

    def test_inline_problem_is_built(self, inline_file):
        resolved = resolve_experiment(load_experiment_config(inline_file))
        problem = resolved.problem
        assert problem.n == 2
        assert problem.dims == (1, 2)
        assert isinstance(problem.agents[0].objective, SeparableQuadraticL1)
        assert isinstance(problem.agents[1].objective, QuadraticObjective)
        assert isinstance(problem.agents[0].constraint_set, Interval)
        factors = problem.agents[1].constraint_set.factors
        assert isinstance(factors[0], Interval)
        assert isinstance(factors[1], Ball)
        np.testing.assert_allclose(problem.agents[0].supply, [0.25])
        np.testing.assert_allclose(problem.agents[1].supply, [0.75])
        assert resolved.graph.adjacency[0, 1] == 2.0

    def test_builtin_keeps_default_graph(self):
        resolved = resolve_experiment(
            ExperimentConfig.for_builtin("netflow6x12")
        )
        assert resolved.problem.n == 12
        assert resolved.graph.n == 12
        assert resolved.graph.edge_count > 12

    def test_graph_override(self):
        config = ExperimentConfig.for_builtin(
            "nonsmooth10", graph={"builtin": "complete"}
        )
        assert resolve_experiment(config).graph.edge_count == 45

    def test_line_graph_needs_netflow(self):
        config = ExperimentConfig.for_builtin(
            "nonsmooth10", graph={"builtin": "line_graph"}
        )
        with pytest.raises(ConfigurationError) as exc_info:
            resolve_experiment(config)
        assert exc_info.value.setting == "graph.builtin"

    def test_edge_outside_graph(self):
        config = ExperimentConfig.for_builtin(
            "minnorm", graph={"edges": [[0, 1], [1, 5]]}
        )
        with pytest.raises(ConfigurationError) as exc_info:
            resolve_experiment(config)
        assert exc_info.value.setting == "graph"

    def test_bad_edges(self):
        config = ExperimentConfig.for_builtin(
            "minnorm", graph={"edges": [[0, 0], [1, 2], [2, 3]]}
        )
        with pytest.raises(ConfigurationError):
            resolve_experiment(config)

    def test_invalid_inline_data(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text(
            INLINE_YAML.replace("w: [[1.0, -1.0]]", "w: [[1.0]]")
        )
        with pytest.raises(ConfigurationError) as exc_info:
            resolve_experiment(load_experiment_config(path))
        assert exc_info.value.setting == "problem"

    def test_box_sets(self, tmp_path):
        path = tmp_path / "box.yaml"
        path.write_text(
            "problem:\n"
            "  m: 1\n"
            "  d0: [0.0]\n"
            "  agents:\n"
            "    - objective: {a: [1.0]}\n"
            "      set: {kind: box, lo: [-1, -1], hi: [1, 1]}\n"
            "      w: [[1.0, 1.0]]\n"
        )
        problem = resolve_experiment(load_experiment_config(path)).problem
        assert isinstance(problem.agents[0].constraint_set, Box)
        np.testing.assert_array_equal(problem.agents[0].objective.a, [1.0, 1.0])

    def test_initial_state_overrides(self, inline_file):
        config = load_experiment_config(inline_file)
        problem = resolve_experiment(config).problem
        state = initial_state(config, problem, Algorithm.DDFA)
        np.testing.assert_array_equal(state.lam, [0.5, 0.5])
        np.testing.assert_array_equal(state.z, [0.0, 0.0])
        # P(0) on the product set [0, 2] x ball
        np.testing.assert_array_equal(state.primal, [0.0, 0.0, 0.0])

    def test_initial_state_length_checked(self):
        config = ExperimentConfig.for_builtin(
            "nonsmooth10", init={"z": [0.0, 1.0]}
        )
        problem = resolve_experiment(config).problem
        with pytest.raises(ConfigurationError) as exc_info:
            initial_state(config, problem, Algorithm.DPOFA)
        assert exc_info.value.setting == "init.z"
