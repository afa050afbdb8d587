"""
Tests for the FCIDUMP reader and writer.
"""

import io

import numpy as np
import pytest

from data.fcidump import parse_fcidump, read_fcidump, write_fcidump
from tests.conftest import FIXTURE_DIR, h2_reference_energies
from utils.errors import FcidumpFormatError
from validation.generate_fixtures import chain_geometry, default_fixtures, write_fixture


HEADER = "&FCI NORB=2,NELEC=2,MS2=0,\n ORBSYM=1,1,\n ISYM=1,\n&END\n"


class TestParse:
    """Parsing the shipped H2 fixture and small hand-written files."""

    def test_h2_fixture_header(self, h2):
        """Orbital and electron counts come from the header."""
        assert h2.n_orbitals == 2
        assert h2.n_alpha == 1
        assert h2.n_beta == 1
        assert h2.n_qubits == 4

    def test_h2_fixture_values(self, h2):
        """Integrals land on every symmetry image."""
        assert h2.core_energy == pytest.approx(0.7137539936876182, abs=1e-15)
        assert h2.one_body[0, 0] == pytest.approx(-1.2524635735648986, abs=1e-15)
        assert h2.one_body[0, 1] == 0.0
        assert h2.two_body[0, 0, 1, 1] == pytest.approx(0.663634047861504, abs=1e-15)
        assert h2.two_body[1, 1, 0, 0] == pytest.approx(0.663634047861504, abs=1e-15)
        for image in [(1, 0, 1, 0), (0, 1, 0, 1), (1, 0, 0, 1), (0, 1, 1, 0)]:
            assert h2.two_body[image] == pytest.approx(0.181210462015197, abs=1e-15)

    def test_stream_and_string_agree(self, h2_path):
        """A text stream parses like the string it holds."""
        text = h2_path.read_text()
        from_string = parse_fcidump(text)
        from_stream = parse_fcidump(io.StringIO(text))
        np.testing.assert_array_equal(from_string.two_body, from_stream.two_body)

    def test_single_line_header_with_slash(self):
        """Header may be one line and end with '/'."""
        text = "&fci norb=1, nelec=2, ms2=0 /\n 0.5 1 1 1 1\n -1.0 1 1 0 0\n 0.1 0 0 0 0\n"
        hamiltonian = parse_fcidump(text)
        assert hamiltonian.n_orbitals == 1
        assert hamiltonian.two_body[0, 0, 0, 0] == 0.5

    def test_fortran_exponent(self):
        """Values written with D exponents are accepted."""
        text = "&FCI NORB=1,NELEC=2,MS2=0 &END\n 5.0D-01 1 1 1 1\n -1.0d+00 1 1 0 0\n"
        hamiltonian = parse_fcidump(text)
        assert hamiltonian.two_body[0, 0, 0, 0] == 0.5
        assert hamiltonian.one_body[0, 0] == -1.0

    def test_orbital_energy_records_ignored(self):
        """``value i 0 0 0`` records do not touch the integrals."""
        text = HEADER + " -0.6 1 0 0 0\n -0.5 1 1 0 0\n"
        hamiltonian = parse_fcidump(text)
        assert hamiltonian.one_body[0, 0] == -0.5

    def test_missing_core_defaults_to_zero(self):
        hamiltonian = parse_fcidump(HEADER + " -0.5 1 1 0 0\n")
        assert hamiltonian.core_energy == 0.0

    def test_open_shell(self):
        """MS2 splits the electrons between spins."""
        hamiltonian = parse_fcidump("&FCI NORB=3,NELEC=3,MS2=1 &END\n")
        assert (hamiltonian.n_alpha, hamiltonian.n_beta) == (2, 1)

    def test_consistent_duplicates_accepted(self):
        """Repeating a symmetry image with the same value is fine."""
        text = HEADER + " 0.2 2 1 2 1\n 0.2 1 2 1 2\n"
        hamiltonian = parse_fcidump(text)
        assert hamiltonian.two_body[0, 1, 0, 1] == 0.2


class TestParseErrors:
    """Malformed files raise FcidumpFormatError with a line number."""

    def test_missing_header(self):
        with pytest.raises(FcidumpFormatError):
            parse_fcidump(" 0.5 1 1 1 1\n")

    def test_missing_norb(self):
        with pytest.raises(FcidumpFormatError, match="NORB"):
            parse_fcidump("&FCI NELEC=2 &END\n")

    def test_parity_mismatch(self):
        with pytest.raises(FcidumpFormatError, match="parity"):
            parse_fcidump("&FCI NORB=2,NELEC=3,MS2=0 &END\n")

    def test_index_out_of_range(self):
        with pytest.raises(FcidumpFormatError) as info:
            parse_fcidump(HEADER + " 0.5 1 1 0 0\n 0.1 3 1 1 1\n")
        assert info.value.line_number == 6

    def test_wrong_field_count(self):
        with pytest.raises(FcidumpFormatError) as info:
            parse_fcidump(HEADER + " 0.5 1 1 0\n")
        assert info.value.line_number == 5

    def test_conflicting_duplicates(self):
        with pytest.raises(FcidumpFormatError, match="conflicting"):
            parse_fcidump(HEADER + " 0.2 2 1 2 1\n 0.3 1 2 1 2\n")

    def test_non_numeric_value(self):
        with pytest.raises(FcidumpFormatError):
            parse_fcidump(HEADER + " abc 1 1 0 0\n")

    def test_uhf_rejected(self):
        with pytest.raises(FcidumpFormatError, match="UHF"):
            parse_fcidump("&FCI NORB=1,NELEC=2,MS2=0,UHF=.TRUE. &END\n")

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            read_fcidump(tmp_path / "absent.fcidump")


class TestWrite:
    """Serialization back to FCIDUMP."""

    def test_round_trip_h2(self, h2):
        """write then parse reproduces the integrals exactly."""
        again = parse_fcidump(write_fcidump(h2))
        assert again.core_energy == h2.core_energy
        np.testing.assert_array_equal(again.one_body, h2.one_body)
        np.testing.assert_array_equal(again.two_body, h2.two_body)

    def test_round_trip_random(self, random_molecule):
        """Random 4-orbital open-shell molecule survives a round trip."""
        hamiltonian = random_molecule(4, 3, 2, seed=3)
        again = parse_fcidump(write_fcidump(hamiltonian))
        assert (again.n_alpha, again.n_beta) == (3, 2)
        np.testing.assert_allclose(again.two_body, hamiltonian.two_body, atol=1e-15)
        np.testing.assert_allclose(again.one_body, hamiltonian.one_body, atol=1e-15)

    def test_unique_records_only(self, h2):
        """One record per symmetry class of (ij|kl)."""
        text = write_fcidump(h2)
        two_body_lines = [line for line in text.splitlines()[4:] if line.split()[-1] != "0"]
        assert len(two_body_lines) == 4

    def test_write_to_path(self, h2, tmp_path):
        target = tmp_path / "h2.fcidump"
        write_fcidump(h2, target)
        assert read_fcidump(target).n_orbitals == 2


class TestGeneratedFixtures:
    """PySCF-written fixtures"""

    def test_h2_matches_shipped_file(self, h2, tmp_path):
        pytest.importorskip("pyscf")
        path = write_fixture("h2_sto3g_0.7414", chain_geometry(2, 0.7414), tmp_path)
        regenerated = read_fcidump(path)
        assert regenerated.n_orbitals == 2
        assert h2_reference_energies(regenerated) == pytest.approx(h2_reference_energies(h2), abs=1e-6)

    def test_default_set_present(self):
        pytest.importorskip("pyscf")
        missing = [name for name in default_fixtures() if not (FIXTURE_DIR / f"{name}.fcidump").is_file()]
        assert missing == []

    def test_default_set_names(self):
        names = set(default_fixtures())
        assert {"h4_sto3g_0.9", "h6_sto3g_0.9", "h8_sto3g_0.9", "h10_sto3g_0.9", "h2o_sto3g_1.0"} <= names
        assert {"h6_sto3g_0.7", "h6_sto3g_1.2", "h6_sto3g_1.5"} <= names
