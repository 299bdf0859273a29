"""Sample-path generation on a regular time grid.

Two generators:

* exact: factorize the exact covariance on the grid (Cholesky with diagonal
  jitter escalation).  O(s^3), intended for s up to ~2000; this is the
  verification baseline.
* wood_chan: FFT circulant embedding of the stationary increment process for
  constant Hurst index, extended to a time-varying index by simulating a
  field of constant-index paths on an index grid from shared noise and
  interpolating.  Fast but approximate for non-constant h.

All randomness flows from a single 64-bit seed through numpy SeedSequence
spawning, so output is independent of scheduling and thread count.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import NumericalError
from .operator import covariance_matrix
from .specfun import HurstFunctional

__all__ = [
    "SimulationConfig",
    "MbmPathSet",
    "simulate_exact",
    "simulate_wood_chan_fbm",
    "simulate_wood_chan_mbm",
    "simulate_mbm_d",
    "simulate",
]

#: eigenvalue floor for the circulant embedding (unit-variance increments)
EMBED_TOL = 1e-9
MAX_DOUBLINGS = 4


@dataclass(frozen=True)
class SimulationConfig:
    """Everything needed to reproduce a path set."""

    h: HurstFunctional
    s: int = 256
    n_paths: int = 1
    d: int = 1
    seed: int = 0
    method: str = "exact"  # "exact" | "wood_chan"

    def __post_init__(self):
        if self.s < 2:
            raise ValueError("need at least 2 grid points")
        if self.n_paths < 1 or self.d < 1:
            raise ValueError("n_paths and d must be positive")
        if self.method not in ("exact", "wood_chan"):
            raise ValueError(f"unknown method {self.method!r}")

    @property
    def T(self) -> float:
        return self.h.T

    @property
    def grid(self) -> np.ndarray:
        """t_k = k T / s for k = 1..s; time 0 is implicit (value 0)."""
        return np.arange(1, self.s + 1) * (self.T / self.s)


@dataclass(frozen=True)
class MbmPathSet:
    """Simulated values, indexed (path, component, time)."""

    config: SimulationConfig
    values: np.ndarray  # shape (n_paths, d, s)
    method: str

    def __post_init__(self):
        if not np.all(np.isfinite(self.values)):
            raise NumericalError("simulated values contain non-finite entries")

    @property
    def grid(self) -> np.ndarray:
        return self.config.grid

    def with_origin(self) -> np.ndarray:
        """Values with the implicit B(0) = 0 prepended on the time axis."""
        n, d, s = self.values.shape
        out = np.zeros((n, d, s + 1))
        out[:, :, 1:] = self.values
        return out

    def to_csv(self, path) -> None:
        """One row per (path, time), d value columns."""
        n, d, s = self.values.shape
        with open(path, "w") as fh:
            fh.write("path,t," + ",".join(f"v{j+1}" for j in range(d)) + "\n")
            grid = self.grid
            for p in range(n):
                for k in range(s):
                    vals = ",".join(f"{self.values[p, j, k]:.17g}" for j in range(d))
                    fh.write(f"{p},{grid[k]:.17g},{vals}\n")

    def metadata(self) -> dict:
        c = self.config
        return {
            "method": self.method,
            "seed": c.seed,
            "s": c.s,
            "n_paths": c.n_paths,
            "d": c.d,
            "T": c.T,
            "hurst": c.h.description,
        }


def simulate(config: SimulationConfig) -> MbmPathSet:
    """Dispatch on config.method."""
    if config.method == "exact":
        return simulate_exact(config)
    return simulate_wood_chan_mbm(config)


# ---------------------------------------------------------------------------
# exact method
# ---------------------------------------------------------------------------

def _cholesky_with_jitter(R: np.ndarray) -> np.ndarray:
    """Cholesky factor, escalating diagonal jitter up to 1e-10 * trace."""
    trace = float(np.trace(R))
    jitter = 0.0
    for _ in range(5):
        try:
            return np.linalg.cholesky(R + jitter * np.eye(len(R)))
        except np.linalg.LinAlgError:
            jitter = 1e-14 * trace if jitter == 0.0 else jitter * 10.0
            if jitter > 1e-10 * trace:
                break
    raise NumericalError(
        "covariance factorization failed after jitter escalation; invalid h?"
    )


def simulate_exact(config: SimulationConfig) -> MbmPathSet:
    """Zero-mean Gaussian paths with the exact grid covariance.

    The d components are independent; each uses its own spawned RNG stream.
    """
    R = covariance_matrix(config.grid, config.h).values
    L = _cholesky_with_jitter(R)
    streams = np.random.SeedSequence(config.seed).spawn(config.d)
    values = np.empty((config.n_paths, config.d, config.s))
    for j in range(config.d):
        rng = np.random.default_rng(streams[j])
        Z = rng.standard_normal((config.s, config.n_paths))
        values[:, j, :] = (L @ Z).T
    return MbmPathSet(config=config, values=values, method="exact")


# ---------------------------------------------------------------------------
# circulant embedding (Wood-Chan)
# ---------------------------------------------------------------------------

def _fgn_autocov(H: float, m: int) -> np.ndarray:
    """Unit-spacing fGn autocovariance rho(0..m-1)."""
    k = np.arange(m, dtype=float)
    return 0.5 * ((k + 1) ** (2 * H) - 2 * k ** (2 * H) + np.abs(k - 1) ** (2 * H))


def _embedding_eigs(H: float, m: int) -> np.ndarray:
    """Eigenvalues of the circulant embedding of size 2m."""
    rho = _fgn_autocov(H, m + 1)
    c = np.concatenate([rho[:-1], [rho[m]], rho[1:-1][::-1]])
    return np.fft.fft(c).real


def _embedding_size(H_levels, s: int) -> tuple[int, dict]:
    """Smallest half-size m >= s whose embedding is nonnegative for all levels."""
    m = 1 << (s - 1).bit_length()  # power of two >= s, for FFT speed
    for _ in range(MAX_DOUBLINGS + 1):
        eigs = {H: _embedding_eigs(H, m) for H in H_levels}
        if all(e.min() >= -EMBED_TOL for e in eigs.values()):
            return m, {H: np.clip(e, 0.0, None) for H, e in eigs.items()}
        m *= 2
    worst = min(e.min() for e in eigs.values())
    raise NumericalError(
        f"circulant embedding not nonnegative after {MAX_DOUBLINGS} doublings "
        f"(min eigenvalue {worst:g})"
    )


def _wood_chan_fgn_levels(H_levels, s: int, n_paths: int, rng) -> np.ndarray:
    """Unit-spacing fGn samples for each Hurst level from shared noise.

    Returns shape (levels, n_paths, s).  The same complex noise drives every
    level so that paths vary smoothly across levels.
    """
    m, eigs = _embedding_size(H_levels, s)
    M = 2 * m
    n_pairs = (n_paths + 1) // 2
    U = rng.standard_normal((n_pairs, M))
    V = rng.standard_normal((n_pairs, M))
    zeta = U + 1j * V
    out = np.empty((len(H_levels), n_paths, s))
    for i, H in enumerate(H_levels):
        w = np.sqrt(eigs[H] / M) * zeta
        y = np.fft.fft(w, axis=1)
        pair = np.empty((2 * n_pairs, s))
        pair[0::2] = y.real[:, :s]
        pair[1::2] = y.imag[:, :s]
        out[i] = pair[:n_paths]
    return out


def simulate_wood_chan_fbm(H: float, s: int, T: float, n_paths: int,
                           seed: int) -> MbmPathSet:
    """Constant-index paths via circulant embedding; exact in law."""
    if not 0.5 < H < 1.0:
        raise ValueError(f"Hurst index must be in (1/2,1), got {H}")
    config = SimulationConfig(h=HurstFunctional.constant(H, T=T), s=s,
                              n_paths=n_paths, d=1, seed=seed, method="wood_chan")
    rng = np.random.default_rng(np.random.SeedSequence(seed).spawn(1)[0])
    fgn = _wood_chan_fgn_levels([H], s, n_paths, rng)[0]
    dt = T / s
    values = np.cumsum(fgn, axis=1)[:, None, :] * dt ** H
    return MbmPathSet(config=config, values=values, method="wood_chan")


def _hurst_levels(h: HurstFunctional, grid: np.ndarray, spacing: float = 0.02):
    vals = h(grid)
    lo, hi = float(vals.min()), float(vals.max())
    if hi - lo < 1e-14:
        return np.array([lo])
    n = max(2, int(np.ceil((hi - lo) / spacing)) + 1)
    return np.linspace(lo, hi, n)


def simulate_wood_chan_mbm(config: SimulationConfig) -> MbmPathSet:
    """Field construction: constant-index paths on an index grid, then
    linear interpolation in the index at each time.

    Approximate for non-constant h; for constant h it reduces exactly to
    simulate_wood_chan_fbm with the same seed.
    """
    grid = config.grid
    levels = _hurst_levels(config.h, grid)
    hvals = config.h(grid)
    dt = config.T / config.s
    streams = np.random.SeedSequence(config.seed).spawn(config.d)
    values = np.empty((config.n_paths, config.d, config.s))
    for j in range(config.d):
        rng = np.random.default_rng(streams[j])
        fgn = _wood_chan_fgn_levels(levels, config.s, config.n_paths, rng)
        fields = np.cumsum(fgn, axis=2) * dt ** levels[:, None, None]
        if len(levels) == 1:
            values[:, j, :] = fields[0]
            continue
        # per time index: interpolate across levels at h(t_k)
        idx = np.clip(np.searchsorted(levels, hvals) - 1, 0, len(levels) - 2)
        w = (hvals - levels[idx]) / (levels[idx + 1] - levels[idx])
        k = np.arange(config.s)
        values[:, j, :] = (1 - w) * fields[idx, :, k].T + w * fields[idx + 1, :, k].T
    return MbmPathSet(config=config, values=values, method="wood_chan")


def simulate_mbm_d(config: SimulationConfig) -> MbmPathSet:
    """d independent components sharing the same Hurst function."""
    return simulate(config)
