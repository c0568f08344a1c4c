"""Bath spectrum checks: hand counts, conservation laws, and the
enumeration-vs-collapse cross oracle."""

import math
from collections import defaultdict

import pytest

from spinprobe import (ModelParams, ParameterError, bath_spectrum,
                       collapse_uniform, enumerate_exact, spectrum_to_csv,
                       total_multiplicity, validate_params)


def params(**kw):
    base = dict(n=4, eps0=4.0, eps=2.0, delta=1.0, omega=1.0, chi=0.0, g=0.5, T=1.0)
    base.update(kw)
    return validate_params(ModelParams(**base))


def class_table(entries):
    """Aggregate entries into an exact {(G, Omega, alpha): total mult} map."""
    table = defaultdict(int)
    for e in entries:
        key = (round(e.G, 12), round(e.Omega, 12), round(e.alpha, 12))
        table[key] += e.mult
    return dict(table)


class TestEnumerateExact:
    def test_single_spin(self):
        entries = enumerate_exact(params(n=1, g=0.5, omega=1.0, chi=0.0))
        assert len(entries) == 2
        assert class_table(entries) == {(0.5, 1.0, 0.0): 1, (-0.5, -1.0, 0.0): 1}

    def test_two_spin_ring(self):
        entries = enumerate_exact(params(n=2, g=1.0, omega=1.0, chi=0.3))
        # both bonds of the 2-ring connect the same pair
        assert class_table(entries) == {
            (2.0, 2.0, 0.6): 1,
            (0.0, 0.0, -0.6): 2,
            (-2.0, -2.0, 0.6): 1,
        }

    def test_open_chain_single_bond_counts(self):
        entries = enumerate_exact(params(n=2, g=1.0, omega=1.0, chi=0.3,
                                         boundary="open"))
        assert class_table(entries) == {
            (2.0, 2.0, 0.3): 1,
            (0.0, 0.0, -0.3): 2,
            (-2.0, -2.0, 0.3): 1,
        }

    def test_size_guard(self):
        with pytest.raises(ParameterError):
            enumerate_exact(params(n=21))

    def test_per_spin_omega(self):
        entries = enumerate_exact(params(n=2, omega=(1.0, 3.0), g=1.0))
        omegas = sorted(e.Omega for e in entries)
        assert omegas == [-4.0, -2.0, 2.0, 4.0]


class TestCollapseUniform:
    def test_requires_uniform(self):
        with pytest.raises(ParameterError):
            collapse_uniform(params(n=3, omega=(1.0, 1.0, 1.0)))

    def test_n4_k2_wall_counts(self):
        entries = collapse_uniform(params(n=4, chi=0.1))
        by_kw = {(e.k, e.w): e.mult for e in entries}
        assert by_kw[(2, 2)] == 4   # one block of two down spins
        assert by_kw[(2, 4)] == 2   # alternating
        assert sum(m for (k, _), m in by_kw.items() if k == 2) == math.comb(4, 2)

    def test_chi_zero_merges_to_binomials(self):
        entries = collapse_uniform(params(n=50, chi=0.0, g=0.01))
        assert len(entries) == 51
        by_k = {e.k: e.mult for e in entries}
        assert by_k[25] == math.comb(50, 25)
        assert total_multiplicity(entries) == 2 ** 50

    @pytest.mark.parametrize("boundary", ["periodic", "open"])
    @pytest.mark.parametrize("n", [2, 3, 5, 8, 12])
    def test_matches_enumeration(self, n, boundary):
        p = params(n=n, chi=0.1, g=0.7, omega=1.3, boundary=boundary)
        assert class_table(collapse_uniform(p)) == class_table(enumerate_exact(p))

    def test_multiplicity_conservation(self):
        for n in (1, 2, 7, 12, 50):
            entries = collapse_uniform(params(n=n, chi=0.1))
            assert total_multiplicity(entries) == 2 ** n

    def test_first_moments_vanish(self):
        for entries in (collapse_uniform(params(n=12, chi=0.1)),
                        enumerate_exact(params(n=8, chi=0.2, g=0.3))):
            assert sum(e.mult * e.Omega for e in entries) == pytest.approx(0.0, abs=1e-9)
            assert sum(e.mult * e.G for e in entries) == pytest.approx(0.0, abs=1e-9)

    def test_weighted_sums_agree_with_enumeration(self):
        # arbitrary test functionals of (G, Omega, alpha) under Boltzmann weights
        p = params(n=10, chi=0.1, g=0.4, T=0.7)
        beta = p.beta

        def weighted(entries, f):
            return sum(e.mult * math.exp(-beta * (0.5 * e.Omega + e.alpha))
                       * f(e.G, e.Omega, e.alpha) for e in entries)

        fns = [lambda G, O, a: 1.0,
               lambda G, O, a: G * G + 0.3 * O,
               lambda G, O, a: math.cos(G + a) * math.exp(-0.1 * O),
               lambda G, O, a: math.sin(2.2 * G) * a]
        col = collapse_uniform(p)
        enu = enumerate_exact(p)
        for f in fns:
            a, b = weighted(col, f), weighted(enu, f)
            assert abs(a - b) <= 1e-12 * max(abs(a), abs(b), 1.0)


class TestDispatchAndDump:
    def test_dispatcher_picks_collapse_for_uniform(self):
        assert len(bath_spectrum(params(n=12, chi=0.0))) == 13
        assert len(bath_spectrum(params(n=3, omega=(1.0, 2.0, 3.0)))) == 8

    def test_csv_dump(self, tmp_path):
        p = params(n=4, chi=0.1)
        path = tmp_path / "spectrum.csv"
        spectrum_to_csv(collapse_uniform(p), str(path), p)
        lines = path.read_text().splitlines()
        header = [ln for ln in lines if ln.startswith("#")]
        assert header
        cols = [ln for ln in lines if not ln.startswith("#")][0]
        assert cols == "k,w,G,Omega,alpha,multiplicity"
        body = [ln for ln in lines if not ln.startswith("#")][1:]
        assert sum(int(row.split(",")[-1]) for row in body) == 16
