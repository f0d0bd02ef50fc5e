"""Timing comparison of the numba and numpy kernel paths.

Times the three hot kernels on workload-shaped inputs: probability
evaluation over a full preset grid for the generation-4 gasket and the
generation-3 carpet, and one default-quality frame splat.  The numba
variants are warmed up first so JIT compilation is excluded.  Run from
the repository root:

    python benchmarks/bench_kernels.py [--repeats N]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from fractalwalk import kernels
from fractalwalk.evolution import preset_grid, spectral_decompose
from fractalwalk.hamiltonian import build_classical_generator, build_hamiltonian
from fractalwalk.lattice import canonical_input, generate
from fractalwalk.render import RenderSpec, frame_geometry


def best_of(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def spectral_args(kind: str, generation: int):
    lattice = generate(kind, generation)
    spectrum = spectral_decompose(build_hamiltonian(lattice))
    weights = np.ascontiguousarray(spectrum.eigenvectors[canonical_input(lattice), :])
    times = preset_grid(lattice.kind)
    return lattice, (spectrum.eigenvalues, spectrum.eigenvectors, weights, times)


def classical_args(kind: str, generation: int):
    lattice = generate(kind, generation)
    spectrum = spectral_decompose(build_classical_generator(lattice))
    weights = np.ascontiguousarray(spectrum.eigenvectors[canonical_input(lattice), :])
    times = preset_grid(lattice.kind)
    return spectrum.eigenvalues, spectrum.eigenvectors, weights, times


def splat_args(kind: str, generation: int):
    lattice = generate(kind, generation)
    spec = RenderSpec()
    width, height, x0, y_top = frame_geometry(lattice, spec)
    probs = np.full(lattice.n_sites, 1.0 / lattice.n_sites)
    return (
        np.ascontiguousarray(lattice.coords[:, 0]),
        np.ascontiguousarray(lattice.coords[:, 1]),
        probs, x0, y_top, 1.0 / spec.pixels_per_spacing, width, height,
        spec.spot_sigma,
    )


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5,
                        help="timed repetitions per case; the best is reported")
    args = parser.parse_args()

    sg, sg_spectral = spectral_args("sg", 4)
    sc, sc_spectral = spectral_args("sc", 3)
    cases = [
        (f"quantum  sg:4  ({sg.n_sites} sites x 501 times)",
         kernels.quantum_probabilities_numpy,
         getattr(kernels, "quantum_probabilities_numba", None),
         sg_spectral),
        (f"quantum  sc:3  ({sc.n_sites} sites x 241 times)",
         kernels.quantum_probabilities_numpy,
         getattr(kernels, "quantum_probabilities_numba", None),
         sc_spectral),
        ("classical sg:4 (123 sites x 501 times)",
         kernels.classical_probabilities_numpy,
         getattr(kernels, "classical_probabilities_numba", None),
         classical_args("sg", 4)),
        ("splat    sg:4  (one 24 px/spacing frame)",
         kernels.gaussian_splat_numpy,
         getattr(kernels, "gaussian_splat_numba", None),
         splat_args("sg", 4)),
    ]

    if not kernels.USING_NUMBA:
        print("numba backend inactive (FRACTALWALK_NO_NUMBA set or numba "
              "missing); timing the numpy path only\n")

    header = f"{'case':<42} {'numpy':>10} {'numba':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for name, numpy_fn, numba_fn, fn_args in cases:
        numpy_s = best_of(lambda: numpy_fn(*fn_args), args.repeats)
        if kernels.USING_NUMBA and numba_fn is not None:
            numba_fn(*fn_args)  # warmup: compile outside the timed loop
            numba_s = best_of(lambda: numba_fn(*fn_args), args.repeats)
            ratio = f"{numpy_s / numba_s:7.2f}x"
            numba_ms = f"{numba_s * 1e3:8.2f}ms"
        else:
            numba_ms, ratio = "-", "-"
        print(f"{name:<42} {numpy_s * 1e3:8.2f}ms {numba_ms:>10} {ratio:>8}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
