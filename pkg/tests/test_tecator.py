import numpy as np
import pytest

from conftest import TECATOR_CSV
from fqreg.exceptions import ParseError
from fqreg.fpca import compute_fpca
from fqreg.grid import Grid
from fqreg.tecator import (
    SpectraTable,
    convert_statlib,
    load_spectra_csv,
    run_tecator_analysis,
    to_functional_dataset,
    write_spectra_csv,
)

WAVELENGTHS = np.linspace(850, 1050, 100)


def _write(path, header, rows, eol="\n"):
    lines = [",".join(header)] + [",".join(map(str, r)) for r in rows]
    path.write_bytes((eol.join(lines) + eol).encode())
    return path


@pytest.fixture(scope="module")
def tecator():
    return load_spectra_csv(TECATOR_CSV)


class TestLoad:
    def test_toy_file(self, tmp_path):
        header = [f"{w:.4f}" for w in WAVELENGTHS] + ["fat"]
        rows = [list(np.linspace(2, 3, 100)) + [10.5], list(np.linspace(3, 2, 100)) + [22.0]]
        table = load_spectra_csv(_write(tmp_path / "toy.csv", header, rows))
        assert table.n_samples == 2
        np.testing.assert_allclose(table.wavelengths, WAVELENGTHS, atol=5e-5)
        np.testing.assert_array_equal(table.fat, [10.5, 22.0])

    def test_crlf(self, tmp_path):
        header = [f"{w:.4f}" for w in WAVELENGTHS] + ["fat"]
        rows = [[1.0] * 100 + [3.0]] * 3
        assert load_spectra_csv(_write(tmp_path / "crlf.csv", header, rows, "\r\n")).n_samples == 3

    def test_row_missing_fat(self, tmp_path):
        header = [f"{w:.4f}" for w in WAVELENGTHS] + ["fat"]
        rows = [[1.0] * 101, [1.0] * 100]
        with pytest.raises(ParseError) as info:
            load_spectra_csv(_write(tmp_path / "short.csv", header, rows))
        assert info.value.line == 3
        assert "line 3" in str(info.value)

    def test_header_missing_fat(self, tmp_path):
        header = [f"{w:.4f}" for w in WAVELENGTHS]
        with pytest.raises(ParseError) as info:
            load_spectra_csv(_write(tmp_path / "nofat.csv", header, [[1.0] * 100]))
        assert info.value.line == 1

    def test_non_numeric(self, tmp_path):
        header = [f"{w:.4f}" for w in WAVELENGTHS] + ["fat"]
        rows = [[1.0] * 101, [1.0] * 50 + ["abc"] + [1.0] * 50]
        with pytest.raises(ParseError, match="line 3.*column 51"):
            load_spectra_csv(_write(tmp_path / "bad.csv", header, rows))

    def test_wrong_channel_count(self, tmp_path):
        header = [str(w) for w in range(50)] + ["fat"]
        with pytest.raises(ParseError, match="expected 100"):
            load_spectra_csv(_write(tmp_path / "fifty.csv", header, [[1.0] * 51]))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            load_spectra_csv(tmp_path / "nope.csv")

    def test_canonical_file(self, tecator):
        assert tecator.n_samples == 240
        assert tecator.absorbance.shape == (240, 100)
        assert tecator.wavelengths[0] == 850 and tecator.wavelengths[-1] == 1050

    def test_write_roundtrip(self, tecator, tmp_path):
        write_spectra_csv(tecator, tmp_path / "copy.csv")
        again = load_spectra_csv(tmp_path / "copy.csv")
        np.testing.assert_array_equal(again.absorbance, tecator.absorbance)
        np.testing.assert_array_equal(again.fat, tecator.fat)


class TestConvertStatlib:
    def test_synthetic_archive(self, tecator, tmp_path):
        # archive layout: free text, then 125 numbers per sample in lines of 5
        lines = ["Tecator data", "Some description; 1. permission note", ""]
        rng = np.random.default_rng(0)
        for spec, fat in zip(tecator.absorbance[:7], tecator.fat[:7]):
            rec = np.concatenate([spec, rng.normal(size=22), [60.0, fat, 17.0]])
            lines += [" ".join(f"{v:.5f}" for v in rec[k : k + 5]) for k in range(0, 125, 5)]
        raw = tmp_path / "tecator.txt"
        raw.write_text("\n".join(lines) + "\n")
        table = convert_statlib(raw, tmp_path / "tecator.csv")
        loaded = load_spectra_csv(tmp_path / "tecator.csv")
        np.testing.assert_allclose(loaded.absorbance, tecator.absorbance[:7], atol=1e-12)
        np.testing.assert_allclose(loaded.fat, tecator.fat[:7])
        assert table.n_samples == 7

    def test_truncated_archive(self, tmp_path):
        raw = tmp_path / "bad.txt"
        raw.write_text("1 2 3 4 5\n")
        with pytest.raises(ParseError):
            convert_statlib(raw, tmp_path / "out.csv")


class TestResample:
    def test_at_original_wavelengths(self, tecator):
        knots = (tecator.wavelengths - 850) / 200
        ds = to_functional_dataset(tecator, grid=Grid(knots))
        assert len(ds.grid) == 100
        np.testing.assert_allclose(ds.curves, tecator.absorbance, atol=1e-10)

    def test_constant_row(self):
        table = SpectraTable(WAVELENGTHS, np.full((2, 100), 2.5), [1.0, 2.0])
        np.testing.assert_allclose(to_functional_dataset(table, 101).curves, 2.5, rtol=1e-13)

    def test_canonical_first_curve(self, tecator):
        ds = to_functional_dataset(tecator, 101)
        raw_max = np.abs(tecator.absorbance[0]).max()
        assert np.abs(ds.curves[0]).max() == pytest.approx(raw_max, rel=0.10)


class TestAnalysis:
    def test_first_component_explains_85_percent(self, tecator):
        basis = compute_fpca(to_functional_dataset(tecator, 101), 1)
        assert basis.variance_explained >= 0.85

    def test_selected_p(self, tecator):
        assert run_tecator_analysis(tecator, [1]).selected_p == 1

    def test_row_order_invariance(self, tecator):
        perm = np.random.default_rng(1).permutation(240)
        shuffled = SpectraTable(tecator.wavelengths, tecator.absorbance[perm], tecator.fat[perm])
        a = run_tecator_analysis(tecator, [1, 2, 3])
        b = run_tecator_analysis(shuffled, [1, 2, 3])
        for ra, rb in zip(a.results, b.results):
            assert rb.u_stat == pytest.approx(ra.u_stat, rel=1e-8)
