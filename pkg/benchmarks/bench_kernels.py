"""
numba vs numpy timings for the hot loops in cavityio.kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each kernel is called once untimed to trigger compilation, then timed
`repeat` times; the median is reported with the max abs deviation
between the two flavours.
"""
import argparse
import time

import numpy as np
from scipy.linalg import eigh_tridiagonal

from cavityio import kernels
from cavityio.fock import squeezed_number_ket


def timeit(fn, args, repeat):
    fn(*args)
    ts = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        ts.append(time.perf_counter() - t0)
    return np.median(ts), out


def cases():
    rng = np.random.default_rng(1)

    om = np.sort(rng.uniform(30.0, 32.0, 512))
    f = np.exp(1j * om) / (om - 31.0 + 0.01j)
    fp = rng.normal(size=512) + 1j * rng.normal(size=512)
    vec = rng.normal(size=512) + 1j * rng.normal(size=512)
    yield "upsilon_matrix N=512", "upsilon_matrix", (om, f, fp, 0.3)
    yield "upsilon_contract N=512", "upsilon_contract", (om, vec, f, fp, 0.3)

    x, p = np.meshgrid(np.linspace(-6, 6, 257), np.linspace(-6, 6, 257))
    x, p = x.ravel().copy(), p.ravel().copy()
    yield "number_wigner n=10 257^2", "number_wigner", (x, p, 10)

    dim = 400
    lam, vr = eigh_tridiagonal(np.zeros(dim), np.sqrt(np.arange(1, dim)))
    vecs = ((-1j) ** (np.arange(dim) % 4))[:, None] * vr
    psi = squeezed_number_ket(0.8, 1, 120)
    alpha = (rng.uniform(-3, 3, 4096) + 1j * rng.uniform(-3, 3, 4096))
    yield "parity_wigner dim=400 4096 pts", "parity_wigner", (
        np.ascontiguousarray(vecs[:psi.size]), lam, psi.astype(complex),
        np.abs(alpha), np.angle(alpha))

    xi, pi_ = np.meshgrid(np.linspace(-5, 5, 161), np.linspace(-5, 5, 161))
    wi = np.exp(-2 * (xi ** 2 + pi_ ** 2)) * 2 / np.pi
    yield "gauss_direct 4096 x 161^2", "gauss_direct", (
        x[:4096].copy(), p[:4096].copy(), xi.ravel(), pi_.ravel(), wi.ravel(),
        0.9, 0.19, (10 / 160) ** 2)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not kernels.HAVE_NUMBA:
        print("numba not importable; nothing to compare")
        return
    print(f"{'kernel':34s} {'numpy [s]':>11s} {'numba [s]':>11s} {'speedup':>8s} {'max|diff|':>10s}")
    for label, name, args_ in cases():
        t_np, a = timeit(getattr(kernels.numpy_impl, name), args_, args.repeat)
        t_nb, b = timeit(getattr(kernels.numba_impl, name), args_, args.repeat)
        print(f"{label:34s} {t_np:11.4f} {t_nb:11.4f} {t_np / t_nb:8.2f} "
              f"{np.max(np.abs(a - b)):10.2e}")


if __name__ == "__main__":
    main()
