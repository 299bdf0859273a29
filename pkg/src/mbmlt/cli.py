"""Command-line entry point: config parsing, dispatch, and file output.

Subcommands: simulate, covariance, localtime, stransform, kernels, converge,
selftest.  All numeric work lives in the library modules; this file only
parses configuration, calls them, and writes CSV plus a JSON manifest.

Exit codes: 1 config error, 2 math-domain error (range/truncation-bound
violation or divergence), 3 numerical failure (quadrature/factorization).
Thread count for BLAS is pinned via MBMLT_NUM_THREADS (default 1) before
numpy is loaded, so outputs are byte-identical regardless of the ambient
OMP/BLAS environment.
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time
from pathlib import Path

FMT = "%.17g"


def _pin_threads() -> None:
    n = os.environ.get("MBMLT_NUM_THREADS", "1")
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                "NUMEXPR_NUM_THREADS", "VECLIB_MAXIMUM_THREADS"):
        os.environ[var] = n


def _load_config(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _build(cfg: dict):
    """Construct domain objects from the parsed configuration."""
    from .chaos import TestFunction
    from .specfun import HurstFunctional

    T = float(cfg.get("T", 1.0))
    h = HurstFunctional.from_config(cfg["hurst"], T=T)
    d = int(cfg.get("d", 1))
    phi = None
    if "test_function" in cfg:
        phi = TestFunction.from_config(cfg["test_function"])
        if phi.d != d:
            raise ValueError(f"test function has {phi.d} components, d = {d}")
    return h, d, phi


def _write_manifest(outdir: Path, cfg: dict, extra: dict, t0: float) -> None:
    from . import __version__

    manifest = {
        "config": cfg,
        "version": __version__,
        "wall_time_s": round(time.time() - t0, 3),
        **extra,
    }
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))


def _write_csv(path: Path, header: list, rows) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(FMT % v if isinstance(v, float) else str(v)
                              for v in row) + "\n")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _cmd_simulate(cfg: dict, outdir: Path) -> dict:
    from .simulate import SimulationConfig, simulate

    h, d, _ = _build(cfg)
    sim = SimulationConfig(
        h=h, s=int(cfg.get("s", 256)), n_paths=int(cfg.get("n_paths", 1)),
        d=d, seed=int(cfg.get("seed", 0)), method=cfg.get("method", "exact"),
    )
    paths = simulate(sim)
    paths.to_csv(outdir / "paths.csv")
    return paths.metadata()


def _cmd_covariance(cfg: dict, outdir: Path) -> dict:
    import numpy as np

    from .operator import covariance_matrix

    h, _, _ = _build(cfg)
    s = int(cfg.get("s", 64))
    grid = np.arange(1, s + 1) * (h.T / s)
    cov = covariance_matrix(grid, h)
    cov.to_csv(outdir / "covariance.csv")
    return {"grid_points": s, "min_eigenvalue": cov.min_eigenvalue()}


def _cmd_localtime(cfg: dict, outdir: Path) -> dict:
    from .localtime import RegularizationParams, local_time_mc
    from .simulate import SimulationConfig, simulate

    h, d, _ = _build(cfg)
    sim = SimulationConfig(
        h=h, s=int(cfg.get("s", 256)), n_paths=int(cfg.get("n_paths", 1000)),
        d=d, seed=int(cfg.get("seed", 0)), method=cfg.get("method", "exact"),
    )
    paths = simulate(sim)
    N = int(cfg.get("N", 0))
    rows = []
    for eps in [float(e) for e in cfg.get("eps", [0.1])]:
        est = local_time_mc(paths, RegularizationParams(eps=eps, N=N))
        rows.append((est.params.eps, est.params.N, est.estimate, est.stderr,
                     est.n_paths))
    _write_csv(outdir / "localtime.csv",
               ["eps", "N", "estimate", "stderr", "n_paths"], rows)
    return {"n_paths": sim.n_paths, "seed": sim.seed, "method": sim.method}


def _cmd_stransform(cfg: dict, outdir: Path) -> dict:
    from .chaos import TestFunction, s_transform_local_time

    h, d, phi = _build(cfg)
    if phi is None:
        phi = TestFunction.zero(d)
    N = int(cfg.get("N", 0))
    rows = []
    for eps in [float(e) for e in cfg.get("eps", [0.0])]:
        val = s_transform_local_time(h, N, h.T, phi, eps=eps)
        rows.append((eps, N, val))
    _write_csv(outdir / "stransform.csv", ["eps", "N", "value"], rows)
    return {"N": N}


def _cmd_kernels(cfg: dict, outdir: Path) -> dict:
    from .chaos import ChaosIndex, KernelSpec, kernel_eval

    h, d, _ = _build(cfg)
    index = ChaosIndex(tuple(int(n) for n in cfg["kernel_index"]))
    if index.d != d:
        raise ValueError(f"kernel index has {index.d} components, d = {d}")
    eps = cfg.get("kernel_eps")
    spec = KernelSpec(h=h, T=h.T, N=int(cfg.get("N", 0)), index=index,
                      eps=None if eps is None else float(eps))
    order = index.total
    rows = []
    for u in cfg["u_grid"]:
        u = [float(x) for x in (u if isinstance(u, list) else [u])]
        if len(u) != order:
            raise ValueError(f"u point needs {order} coordinates, got {len(u)}")
        rows.append((*u, kernel_eval(spec, u)))
    _write_csv(outdir / "kernels.csv",
               [f"u{i+1}" for i in range(order)] + ["value"], rows)
    return {"index": list(index.n_vec), "order": order}


def _cmd_converge(cfg: dict, outdir: Path) -> dict:
    from .chaos import TestFunction, convergence_eps

    h, d, phi = _build(cfg)
    if phi is None:
        phi = TestFunction.zero(d)
    N = int(cfg.get("N", 0))
    eps_list = [float(e) for e in cfg.get("eps", [1e-1, 1e-2, 1e-3, 1e-4])]
    rows = convergence_eps(h, N, h.T, phi, eps_list)
    _write_csv(outdir / "converge.csv", ["eps", "value", "gap"],
               [(r.eps, r.value, r.gap) for r in rows])
    return {"N": N, "final_gap": rows[-1].gap}


def _cmd_selftest(cfg: dict, outdir: Path) -> dict:
    """Run the acceptance suite; requires a repository checkout with tests/."""
    test_file = Path(__file__).resolve().parents[2] / "tests" / "test_acceptance.py"
    if not test_file.exists():
        raise FileNotFoundError(f"acceptance suite not found at {test_file}")
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "-v", str(test_file)],
        cwd=test_file.parents[1],
    )
    if proc.returncode != 0:
        raise RuntimeError(f"acceptance suite failed (pytest exit {proc.returncode})")
    return {"acceptance": "passed"}


COMMANDS = {
    "simulate": _cmd_simulate,
    "covariance": _cmd_covariance,
    "localtime": _cmd_localtime,
    "stransform": _cmd_stransform,
    "kernels": _cmd_kernels,
    "converge": _cmd_converge,
    "selftest": _cmd_selftest,
}


def main(argv=None) -> int:
    _pin_threads()
    parser = argparse.ArgumentParser(
        prog="mbmlt",
        description="Multifractional Brownian motion, local times, and "
                    "chaos-expansion kernels",
    )
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="JSON configuration file")
    parser.add_argument("--out", default=".", help="output directory")
    parser.add_argument("--seed", type=int, help="override config seed")
    parser.add_argument("--eps", type=float, action="append",
                        help="override config eps list (repeatable)")
    args = parser.parse_args(argv)

    t0 = time.time()
    try:
        cfg = _load_config(args.config) if args.config else {}
        if args.seed is not None:
            cfg["seed"] = args.seed
        if args.eps:
            cfg["eps"] = args.eps
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        if args.command != "selftest" and "hurst" not in cfg:
            raise ValueError("config must define a 'hurst' entry")
        extra = COMMANDS[args.command](cfg, outdir)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError, OSError) as exc:
        from .errors import AdmissibilityError

        if isinstance(exc, AdmissibilityError):
            print(json.dumps({"error": "math-domain", "reason": str(exc)}),
                  file=sys.stderr)
            return 2
        print(json.dumps({"error": "config", "reason": str(exc)}), file=sys.stderr)
        return 1
    except RuntimeError as exc:
        print(json.dumps({"error": "numerical", "reason": str(exc)}), file=sys.stderr)
        return 3
    _write_manifest(outdir, cfg, {"command": args.command, **extra}, t0)
    return 0


if __name__ == "__main__":
    sys.exit(main())
