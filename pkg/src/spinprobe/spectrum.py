"""Bath eigenvalue classes: exact enumeration and degeneracy collapse.

Every bath configuration is a length-n string of sigma_z eigenvalues
s_i = +1 (up) or -1 (down).  A configuration enters the dynamics only through
three collective eigenvalues,

    G     = g * sum_i s_i            (coupling to the probe)
    Omega = sum_i omega_i * s_i      (bath Zeeman energy)
    alpha = sum_bonds chi_i s_i s_{i+1}  (intra-bath interaction)

so the 2^n configurations can be grouped into classes that share (G, Omega,
alpha).  For uniform omega and chi the class of a string is fixed by
(k, w) = (number of down spins, number of domain walls), and the class sizes
have exact closed forms; this collapses the state space from 2^n to O(n^2)
and is what makes n = 50 baths tractable.

Multiplicities are computed in exact integer arithmetic and stored both as
integers and as logs (Boltzmann products at large n overflow doubles long
before the counts do).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ModelParams, ParameterError, validate_params
from .util import write_csv_atomic

# 2^20 dense configurations is the largest enumeration worth supporting.
MAX_ENUMERATION_SPINS = 20


@dataclass(frozen=True)
class SpectrumEntry:
    """One bath eigenvalue class.

    k      number of down spins; w: number of anti-aligned bonds (domain
           walls), or -1 for classes merged over w (possible when chi = 0).
    mult   exact number of configurations in the class; log_mult = ln(mult).
    """

    k: int
    w: int
    G: float
    Omega: float
    alpha: float
    mult: int
    log_mult: float


def _entry(k: int, w: int, G: float, Omega: float, alpha: float, mult: int) -> SpectrumEntry:
    return SpectrumEntry(k=k, w=w, G=G, Omega=Omega, alpha=alpha,
                         mult=mult, log_mult=math.log(mult))


def enumerate_exact(p: ModelParams) -> list[SpectrumEntry]:
    """All 2^n bath configurations, one entry (mult = 1) per bit string.

    Bit i of the configuration integer is 1 when spin i points down
    (s_i = -1).  Supports per-spin omega and per-bond chi; guarded to
    n <= 20.  Entries are sorted by (k, w, configuration index).
    """
    p = validate_params(p)
    if p.n > MAX_ENUMERATION_SPINS:
        raise ParameterError(
            f"exact enumeration needs 2^n states; n = {p.n} exceeds {MAX_ENUMERATION_SPINS}")
    n = p.n
    omega = p.omega_list
    chi = p.chi_list
    bonds = [(i, (i + 1) % n) for i in range(n)] if p.boundary == "periodic" \
        else [(i, i + 1) for i in range(n - 1)]

    entries = []
    for config in range(1 << n):
        s = np.array([1.0 - 2.0 * ((config >> i) & 1) for i in range(n)])
        k = int(bin(config).count("1"))
        walls = sum(1 for (i, j) in bonds if s[i] != s[j])
        G = p.g * float(s.sum())
        Om = float(np.dot(omega, s))
        al = float(sum(chi[b] * s[i] * s[j] for b, (i, j) in enumerate(bonds)))
        entries.append(_entry(k, walls, G, Om, al, 1))
    entries.sort(key=lambda e: (e.k, e.w, e.Omega, e.alpha))
    return entries


def _ring_wall_count(n: int, k: int, blocks: int) -> int:
    """Configurations of a labelled n-ring with k down spins in ``blocks`` runs.

    Standard run combinatorics: (n/blocks) C(k-1, blocks-1) C(n-k-1, blocks-1),
    always an integer.
    """
    num = n * math.comb(k - 1, blocks - 1) * math.comb(n - k - 1, blocks - 1)
    if num % blocks:
        raise AssertionError("ring run count is not integral")  # pragma: no cover
    return num // blocks


def _chain_wall_count(n: int, k: int, walls: int) -> int:
    """Configurations of a labelled open n-chain with k down spins and given walls."""
    if k in (0, n):
        return 1 if walls == 0 else 0
    runs = walls + 1
    total = 0
    for first_down in (True, False):
        down_runs = (runs + 1) // 2 if first_down else runs // 2
        up_runs = runs - down_runs
        if down_runs < 1 or up_runs < 1:
            continue
        if k < down_runs or n - k < up_runs:
            continue
        total += math.comb(k - 1, down_runs - 1) * math.comb(n - k - 1, up_runs - 1)
    return total


def collapse_uniform(p: ModelParams) -> list[SpectrumEntry]:
    """Collapse a uniform bath to its (k, w) classes with exact multiplicities.

    Requires scalar omega and chi.  For chi = 0 the wall count is irrelevant
    and the classes merge over w into the n+1 binomial classes C(n, k)
    (entries then carry w = -1).  Entries are sorted by (k, w); the total
    multiplicity is exactly 2^n.
    """
    p = validate_params(p)
    if not p.uniform:
        raise ParameterError("collapse_uniform requires scalar omega and chi")
    n = p.n
    omega = float(p.omega)
    chi = float(p.chi)

    def magnet(k: int) -> float:
        return float(n - 2 * k)

    entries = []
    if chi == 0.0:
        for k in range(n + 1):
            entries.append(_entry(k, -1, p.g * magnet(k), omega * magnet(k),
                                  0.0, math.comb(n, k)))
        return entries

    if p.boundary == "periodic":
        def alpha_of(w: int) -> float:
            return chi * (n - 2 * w)
        for k in range(n + 1):
            if k in (0, n):
                entries.append(_entry(k, 0, p.g * magnet(k), omega * magnet(k),
                                      alpha_of(0), 1))
                continue
            for blocks in range(1, min(k, n - k) + 1):
                w = 2 * blocks
                entries.append(_entry(k, w, p.g * magnet(k), omega * magnet(k),
                                      alpha_of(w), _ring_wall_count(n, k, blocks)))
    else:
        def alpha_of(w: int) -> float:
            return chi * (n - 1 - 2 * w)
        for k in range(n + 1):
            for w in range(n):
                mult = _chain_wall_count(n, k, w)
                if mult:
                    entries.append(_entry(k, w, p.g * magnet(k), omega * magnet(k),
                                          alpha_of(w), mult))
    entries.sort(key=lambda e: (e.k, e.w))
    return entries


def bath_spectrum(p: ModelParams) -> list[SpectrumEntry]:
    """Spectrum dispatcher: collapsed classes when uniform, else enumeration."""
    p = validate_params(p)
    if p.uniform:
        return collapse_uniform(p)
    return enumerate_exact(p)


def total_multiplicity(entries: list[SpectrumEntry]) -> int:
    """Exact integer sum of class multiplicities (must equal 2^n)."""
    return sum(e.mult for e in entries)


def spectrum_to_csv(entries: list[SpectrumEntry], path: str, p: ModelParams,
                    header_lines: tuple[str, ...] = ()) -> None:
    """Debug dump of a spectrum: columns k, w, G, Omega, alpha, multiplicity."""
    rows = [(e.k, e.w, e.G, e.Omega, e.alpha, e.mult) for e in entries]
    lines = list(header_lines) or [f"bath spectrum for n={p.n} boundary={p.boundary}"]
    write_csv_atomic(path, ("k", "w", "G", "Omega", "alpha", "multiplicity"),
                     rows, header_lines=lines)
