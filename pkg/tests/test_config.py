import math

import pytest

from abelode.config import (
    ConfigError,
    equation_config,
    load_pairs,
    merton_params,
    parse_pairs,
    solver_config,
)

GOOD = """\
# a comment line
degree = 3
coefficients = 1 | -3 | 1 | 1

x_end = 20
atol = 1e-10
"""


class TestParsePairs:
    def test_comments_and_blank_lines_ignored(self):
        pairs = parse_pairs(GOOD)
        assert pairs["degree"] == "3"
        assert pairs["atol"] == "1e-10"
        assert "#" not in "".join(pairs)

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError):
            parse_pairs("degree = 2\ndegree = 3\n")

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            parse_pairs("degrees = 2\n")

    def test_line_without_separator_rejected(self):
        with pytest.raises(ConfigError):
            parse_pairs("degree 2\n")

    def test_load_pairs_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_pairs(str(tmp_path / "absent.cfg"))


class TestEquationConfig:
    def test_round_trip_to_equation(self):
        cfg = equation_config(parse_pairs(GOOD))
        assert cfg.degree == 3
        assert cfg.x0 == 0.0 and cfg.y0 == 0.0  # defaults
        assert cfg.x_end == 20.0
        eq = cfg.build()
        assert eq.degree == 3
        assert eq.coeffs[1](0.0) == -3.0

    def test_coefficient_count_must_match_degree(self):
        with pytest.raises(ConfigError):
            equation_config(parse_pairs(
                "degree = 3\ncoefficients = 1 | 0 | -1\nx_end = 1\n"))

    def test_required_keys(self):
        with pytest.raises(ConfigError):
            equation_config(parse_pairs("degree = 2\ncoefficients = 1 | 0 | -1\n"))
        with pytest.raises(ConfigError):
            equation_config(parse_pairs("coefficients = 1 | 0 | -1\nx_end = 1\n"))

    def test_horizon_must_advance(self):
        with pytest.raises(ConfigError):
            equation_config(parse_pairs(
                "degree = 2\ncoefficients = 1 | 0 | -1\nx0 = 5\nx_end = 1\n"))

    def test_unparseable_coefficient(self):
        with pytest.raises(ConfigError):
            equation_config(parse_pairs(
                "degree = 2\ncoefficients = 1 | 0*) | -1\nx_end = 1\n"))


class TestSolverConfig:
    def test_overrides_applied(self):
        config = solver_config(parse_pairs("atol = 1e-6\nnewton_max_iters = 20\n"))
        assert config.atol == 1e-6
        assert config.newton_max_iters == 20
        assert config.rtol == 1e-9  # untouched default

    def test_base_preserved(self):
        base = solver_config(parse_pairs("rtol = 1e-4\n"))
        override = solver_config(parse_pairs("atol = 1e-6\n"), base)
        assert override.rtol == 1e-4
        assert override.atol == 1e-6

    def test_non_numeric_value_rejected(self):
        with pytest.raises(ConfigError):
            solver_config(parse_pairs("atol = tiny\n"))


class TestMertonParams:
    def test_required_fields(self):
        params = merton_params(parse_pairs("sigma0_sq = 1.2\nmu = 1.5\n"))
        assert params.sigma0_sq == 1.2
        assert params.r == 0.0

    def test_missing_required_field(self):
        with pytest.raises(ConfigError):
            merton_params(parse_pairs("sigma0_sq = 1.2\n"))

    def test_invalid_values_surface_as_config_errors(self):
        with pytest.raises((ConfigError, ValueError)):
            merton_params(parse_pairs("sigma0_sq = -1\nmu = 1\n"))
