#!/usr/bin/env python3
"""Smoke test for the lsprobe Python bindings.

Build the extension first:

    cargo build --release -p lsprobe-py

The script locates the built cdylib, stages it under the import name and
exercises the main types end to end on small grids.
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path


def stage_module() -> None:
    root = Path(__file__).resolve().parents[1]
    candidates = [
        root / "target" / "release" / "liblsprobe.so",
        root / "target" / "debug" / "liblsprobe.so",
        root / "target" / "release" / "liblsprobe.dylib",
        root / "target" / "debug" / "liblsprobe.dylib",
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit(
            "extension not found; run `cargo build --release -p lsprobe-py` first"
        )
    stage = Path(tempfile.mkdtemp(prefix="lsprobe-py-"))
    suffix = ".so" if built.suffix == ".so" else ".so"  # python dlopens .so on linux/mac
    shutil.copy2(built, stage / f"lsprobe{suffix}")
    sys.path.insert(0, str(stage))


def approx(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol * max(abs(b), 1e-300)


def main() -> None:
    stage_module()
    import lsprobe

    # geometry
    ball = lsprobe.Shape.ball((0.0, 0.0, 0.0), 0.8)
    assert approx(ball.signed_distance((0.0, 0.0, 2.0)), 1.2, 1e-12)
    assert ball.contains((0.1, 0.0, 0.0))
    pos, normal = ball.surface_point((0.0, 0.0, 1.0))
    assert approx(pos[2], 0.8, 1e-12) and approx(normal[2], 1.0, 1e-12)

    peanut = lsprobe.Shape.peanut((0.0, 0.0, 0.0), 0.5, 0.4)
    assert peanut.contains((0.0, 0.0, 0.8))
    assert not peanut.contains((0.6, 0.6, 0.0))

    # closed-form references
    hb = lsprobe.halfball_log_integral(0.5, 10)
    assert approx(hb, 5.59693, 1e-4), hb
    born = lsprobe.born_far_field(0.8, 0.5, 1.0, (0.0, 0.0, -1.0), (0.0, 0.0, 1.0))
    assert approx(born.real, -0.0653933, 1e-5), born
    alpha, beta = lsprobe.kelvin_constants(1.0, 1.0)
    assert approx(alpha, 1.0 / (6.0 * math.pi), 1e-12)
    assert approx(alpha + beta, 1.0 / (4.0 * math.pi), 1e-12)

    # probe path formula
    path = lsprobe.probe_path(ball, (0.0, 0.0, 1.0), 2, 5)
    assert len(path) == 4 and approx(path[0][2], 1.3, 1e-12)

    # acoustic forward solve against the series reference
    problem = lsprobe.AcousticProblem(ball, 1.5, 1.0, half_extent=1.0, n=32)
    rows = problem.far_field((0.0, 0.0, 1.0), n_polar=8, n_azimuth=16)
    num = 0.0
    den = 0.0
    for theta, _phi, re, im, w in rows:
        ref = lsprobe.mie_far_field_amplitude(0.8, 1.5, 1.0, math.cos(theta))
        num += w * abs(complex(re, im) - ref) ** 2
        den += w * abs(ref) ** 2
    err = math.sqrt(num / den)
    assert err < 3e-2, f"far-field error vs series reference: {err:.3e}"

    mixed = problem.mixed_reciprocity((0.0, 0.0, 1.5), (0.0, 0.0, -1.0))
    assert mixed < 2e-2, f"mixed reciprocity residual {mixed:.3e}"

    # the probe classifies the true boundary point and recovers the contrast
    fit = problem.probe((0.0, 0.0, 1.0), j_min=2, j_max=8)
    assert fit["classification"] == "boundary", fit
    assert 0.35 < fit["contrast_estimate"] < 0.65, fit

    # elastic: P/S split far field and mixed reciprocity on a coarse grid
    elastic = lsprobe.ElasticProblem(ball, 1.3, 1.0, 1.0, 1.0, half_extent=1.2, n=16)
    rows = elastic.far_field((0.0, 0.0, 1.0), (1.0, 0.0, 0.0), n_polar=4, n_azimuth=8)
    assert any(p > 0.0 for _, _, p, _, _ in rows)
    emixed = elastic.mixed_reciprocity(
        (0.0, 0.0, 1.5), (0.0, 0.0, 1.0), (0.0, 0.0, -1.0), (0.0, 1.0, 0.0)
    )
    assert emixed < 5e-2, f"elastic mixed reciprocity residual {emixed:.3e}"

    print("python bindings smoke test: all checks passed")
    print(f"  far-field error vs series reference: {err:.3e}")
    print(f"  mixed reciprocity residuals: acoustic {mixed:.2e}, elastic {emixed:.2e}")
    print(
        "  probe fit: slope {slope:.4e}, r2 {r2:.4f}, contrast {contrast_estimate:.4f}".format(
            **fit
        )
    )


if __name__ == "__main__":
    main()
