"""Closed-system time evolution of atoms plus one cavity mode.

hbar = 1 and times are in units of 1/g.  Small problems use a dense matrix
exponential; larger ones a fixed-step RK4 with enough substeps to keep
``dt * ||H||`` small.
"""

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.linalg import expm

from .operators import (
    CompositeBasis,
    ModelParams,
    build_full_tc_hamiltonian,
    build_rwa_hamiltonian,
    embed_photons,
)
from .sector import SectorBasis
from .states import StateVector, atomic_state
from .validation import InvalidArgumentError

__all__ = [
    "EvolutionConfig",
    "EmissionProfile",
    "EvolutionError",
    "ScanPoint",
    "evolve",
    "almost_dark_scan",
    "stationarity_check",
    "with_vacuum",
    "singlet_product",
    "worker_count",
    "rwa_setup",
]

DENSE_LIMIT = 4096
RK4_STEP_NORM = 0.02
SCAN_CUTOFF = 60


class EvolutionError(RuntimeError):
    """Integration lost unitarity beyond the configured tolerance."""


@dataclass(frozen=True)
class EvolutionConfig:
    T: float = 50.0
    steps: int = 500
    integrator: str = "auto"
    m_max: int = None
    norm_tolerance: float = 1e-9

    def __post_init__(self):
        if not (self.T > 0 and math.isfinite(self.T)):
            raise InvalidArgumentError(f"horizon must be positive, got {self.T}")
        if int(self.steps) != self.steps or self.steps < 1:
            raise InvalidArgumentError(f"steps must be a positive integer, got {self.steps}")
        if self.integrator not in ("auto", "expm", "rk4"):
            raise InvalidArgumentError(f"unknown integrator {self.integrator!r}")
        if self.m_max is not None and self.m_max < 1:
            raise InvalidArgumentError("m_max must be >= 1")
        if self.norm_tolerance <= 0:
            raise InvalidArgumentError("norm_tolerance must be positive")


@dataclass
class EmissionProfile:
    times: np.ndarray
    photon_expectation: np.ndarray
    atomic_excitation: np.ndarray
    energy: np.ndarray
    norm: np.ndarray
    integrator: str = ""
    params: dict = field(default_factory=dict)

    @property
    def max_leakage(self):
        return float(np.max(self.photon_expectation))

    def summary(self):
        return {
            **self.params,
            "integrator": self.integrator,
            "samples": len(self.times),
            "max_leakage": self.max_leakage,
            "max_norm_drift": float(np.max(np.abs(self.norm - 1.0))),
            "energy_drift": float(np.ptp(self.energy)),
            "excitation_range": float(np.ptp(self.atomic_excitation)),
        }

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["time", "photon_expectation", "atomic_excitation"])
        for row in zip(self.times, self.photon_expectation, self.atomic_excitation):
            w.writerow([repr(float(x)) for x in row])
        return buf.getvalue()

    def to_json(self):
        return json.dumps(self.summary(), sort_keys=True)


def with_vacuum(v, basis):
    """Put an atomic vector next to the cavity state it should start in.

    For an RWA basis of total excitation ``E`` the photon number is
    ``E - k``; for a cutoff basis it is the vacuum.
    """
    if isinstance(v.basis, CompositeBasis):
        return v
    m = 0
    if basis.mode == "rwa":
        ks = {c.bit_count() for c in v.basis.codes} if isinstance(v.basis, SectorBasis) else None
        if ks is None:
            ks = {c.bit_count() for c in v.support()}
        if len(ks) != 1:
            raise InvalidArgumentError("RWA evolution needs a single atomic weight")
        m = basis.bound - ks.pop()
    return embed_photons(v, basis, m)


def singlet_product(n, pairs):
    """Normalized product of singlets on ``pairs`` with remaining atoms in the ground state."""
    terms = {"0" * n: 1.0}
    for i, j in pairs:
        new = {}
        for lab, a in terms.items():
            for bi, bj, s in (("0", "1", 1.0), ("1", "0", -1.0)):
                lab2 = list(lab)
                lab2[i - 1], lab2[j - 1] = bi, bj
                key = "".join(lab2)
                new[key] = new.get(key, 0.0) + s * a
        terms = new
    v = atomic_state(terms, exact=False)
    return v.normalized()


def _hamiltonian_matrix(H):
    return H.to_scipy().tocsr()


def _integrator(config, dim):
    if config.integrator != "auto":
        return config.integrator
    return "expm" if dim <= DENSE_LIMIT else "rk4"


def evolve(H, v0, config=None):
    """Integrate ``i d/dt psi = H psi`` from ``v0`` over ``[0, T]``.

    Samples ``steps + 1`` points including ``t = 0``.  Returns the final
    state and an ``EmissionProfile``.
    """
    config = config or EvolutionConfig()
    basis = H.domain
    if not isinstance(basis, CompositeBasis):
        raise InvalidArgumentError("evolution needs an atom-photon Hamiltonian")
    v0 = with_vacuum(v0, basis)
    if v0.basis != basis:
        raise InvalidArgumentError("initial state is not on the Hamiltonian's basis")
    psi = v0.to_numpy().copy()
    if abs(np.linalg.norm(psi) - 1.0) > config.norm_tolerance:
        raise InvalidArgumentError("initial state must be normalized")

    Hs = _hamiltonian_matrix(H)
    steps = int(config.steps)
    dt = config.T / steps
    times = np.linspace(0.0, config.T, steps + 1)
    method = _integrator(config, len(basis))
    photons, excit = basis.photons, basis.excitations

    if method == "expm":
        U = expm(-1j * dt * Hs.toarray())
        advance = lambda x: U @ x  # noqa: E731
    else:
        hnorm = float(np.max(np.asarray(abs(Hs).sum(axis=1)), initial=0.0))
        sub = max(1, math.ceil(dt * hnorm / RK4_STEP_NORM))
        h = dt / sub

        def advance(x):
            for _ in range(sub):
                k1 = -1j * (Hs @ x)
                k2 = -1j * (Hs @ (x + 0.5 * h * k1))
                k3 = -1j * (Hs @ (x + 0.5 * h * k2))
                k4 = -1j * (Hs @ (x + h * k3))
                x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            return x

    ph = np.empty(steps + 1)
    ex = np.empty(steps + 1)
    en = np.empty(steps + 1)
    nm = np.empty(steps + 1)
    for s in range(steps + 1):
        if s:
            psi = advance(psi)
        p = np.abs(psi) ** 2
        nm[s] = math.sqrt(p.sum())
        if abs(nm[s] - 1.0) > config.norm_tolerance:
            raise EvolutionError(
                f"norm drifted to {nm[s]!r} at t={times[s]:g} (tolerance {config.norm_tolerance:g})"
            )
        ph[s] = max(float(p @ photons), 0.0)
        ex[s] = float(p @ excit)
        en[s] = float(np.vdot(psi, Hs @ psi).real)

    profile = EmissionProfile(
        times, ph, ex, en, nm, method, {"T": config.T, "steps": steps, "dim": len(basis)}
    )
    return StateVector(basis, psi, False), profile


def stationarity_check(H, v0, T, tol=1e-9, steps=200):
    """True when ``|<v0|v(t)>| >= 1 - tol`` at every sampled time."""
    basis = H.domain
    v0 = with_vacuum(v0, basis)
    x0 = v0.to_numpy()
    Hd = H.to_scipy().toarray()
    U = expm(-1j * (T / steps) * Hd)
    x = x0.copy()
    for _ in range(steps):
        x = U @ x
        if abs(np.vdot(x0, x)) < 1.0 - tol:
            return False
    return True


class ScanPoint(NamedTuple):
    omega_a: float
    max_leakage: float
    max_leakage_refined: float
    converged: bool


_INITIAL = {
    "almost_dark": {"11": 1.0, "00": -1.0},
    "singlet": {"01": 1.0, "10": -1.0},
}


def _scan_point(args):
    omega, omega_c, g, T, steps, m_max, initial, conv_tol = args
    params = ModelParams(2, (g, g), omega_c, omega)
    v = atomic_state(_INITIAL[initial], exact=False).normalized()
    leak = []
    for cut in (m_max, m_max + 2):
        H = build_full_tc_hamiltonian(params, cut)
        _, prof = evolve(H, v, EvolutionConfig(T / g, steps, m_max=cut))
        leak.append(prof.max_leakage)
    return ScanPoint(float(omega), leak[0], leak[1], abs(leak[0] - leak[1]) <= conv_tol)


def worker_count():
    """Worker processes for parameter grids, from ``DARKSTATES_THREADS`` (default 1)."""
    raw = os.environ.get("DARKSTATES_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise InvalidArgumentError(f"DARKSTATES_THREADS must be an integer, got {raw!r}") from None


def almost_dark_scan(
    omega_list, g=1.0, T=50.0, config=None, initial="almost_dark", conv_tol=1e-6, omega_c=None
):
    """Leakage of a two-atom state under the full model across atomic frequencies.

    The cavity frequency stays fixed (``omega_c = g`` unless given) while
    ``omega_a`` runs over ``omega_list``.  Shrinking both together instead
    drives the photon displacement ``2g/omega_c`` up without bound.  Each
    point is run at cutoffs ``m_max`` and ``m_max + 2``; ``converged`` flags
    whether the two agree within ``conv_tol``.
    """
    if initial not in _INITIAL:
        raise InvalidArgumentError(f"initial must be one of {sorted(_INITIAL)}")
    if g <= 0:
        raise InvalidArgumentError("g must be positive")
    config = config or EvolutionConfig(T)
    omega_c = g if omega_c is None else omega_c
    m_max = config.m_max or SCAN_CUTOFF
    jobs = [
        (float(w), float(omega_c), float(g), T, config.steps, m_max, initial, conv_tol)
        for w in omega_list
    ]
    for w in omega_list:
        if w < 0:
            raise InvalidArgumentError("frequencies must be >= 0")
    workers = worker_count()
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as pool:
            return list(pool.map(_scan_point, jobs))
    return [_scan_point(j) for j in jobs]


def rwa_setup(n, k, couplings=None, omega=1.0):
    """RWA Hamiltonian on total excitation ``k`` at resonance."""
    return build_rwa_hamiltonian(ModelParams(n, couplings, omega, omega), k)

