"""
Tests for utility helper functions.
"""

import time
from pathlib import Path

import pytest

from utils.helpers import (
    PhaseTimer,
    format_duration,
    format_energy,
    format_percentage,
    molecule_label,
    parse_bond_length,
    percent_error,
    split_seed,
)


class TestHelpers:
    """Test suite for helper functions."""

    def test_percent_error(self):
        """Signed error relative to |reference|."""
        assert percent_error(-1.0, -1.0) == 0.0
        assert percent_error(-0.99, -1.0) == pytest.approx(1.0)
        assert percent_error(-1.01, -1.0) == pytest.approx(-1.0)
        with pytest.raises(ValueError):
            percent_error(-1.0, 0.0)

    def test_format_energy(self):
        assert format_energy(-1.137283834) == "-1.13728383 Ha"
        assert format_energy(-1.5, decimals=2) == "-1.50 Ha"

    def test_format_percentage(self):
        """Values are already percentages."""
        assert format_percentage(0.546) == "0.5460%"
        assert format_percentage(12.3456, decimals=1) == "12.3%"

    def test_format_duration(self):
        assert format_duration(0.0123) == "12.3 ms"
        assert format_duration(5.0) == "5.00 s"
        assert format_duration(600.0) == "10.0 min"

    def test_split_seed(self):
        """Children are reproducible and distinct per key path."""
        assert split_seed(0, 1, 2) == split_seed(0, 1, 2)
        assert split_seed(0, 1, 2) != split_seed(0, 2, 1)
        assert split_seed(0, 1) != split_seed(1, 1)
        assert split_seed(3) >= 0

    def test_parse_bond_length(self):
        assert parse_bond_length(Path("h6_0.9.fcidump")) == 0.9
        assert parse_bond_length(Path("data/fixtures/h2_sto3g_0.7414.fcidump")) == 0.7414
        assert parse_bond_length(Path("h2o_2.fcidump")) == 2.0
        assert parse_bond_length(Path("h2o.fcidump")) is None

    def test_molecule_label(self):
        assert molecule_label(Path("h6_0.9.fcidump")) == "H6"
        assert molecule_label(Path("fixtures/h2o_sto3g_1.0.fcidump")) == "H2O"
        assert molecule_label(Path("lih.fcidump")) == "LIH"


class TestPhaseTimer:
    """Per-phase wall-clock accumulation."""

    def test_accumulates(self):
        timer = PhaseTimer()
        for _ in range(3):
            with timer.phase("sampling"):
                time.sleep(0.001)
        assert timer.count("sampling") == 3
        assert timer.total("sampling") > 0.0
        assert timer.total("davidson") == 0.0
        assert timer.count("davidson") == 0

    def test_records_on_error(self):
        timer = PhaseTimer()
        with pytest.raises(RuntimeError):
            with timer.phase("projection"):
                raise RuntimeError("fail")
        assert timer.count("projection") == 1

    def test_merge(self):
        first, second = PhaseTimer(), PhaseTimer()
        with first.phase("a"):
            pass
        with second.phase("a"):
            pass
        with second.phase("b"):
            pass
        first.merge(second)
        assert first.count("a") == 2
        assert list(first.as_dict()) == ["a", "b"]
