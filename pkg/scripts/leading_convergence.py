#!/usr/bin/env python3
"""Convergence of eps * QFI to the leading coefficients at the optimal probes.

For each channel the table shows eps * J at the best unextended pure input
and at the best ancilla-extended input, next to the geometric predictions
(the sphere and ball maxima of the leading quadratic form).

Example:
    python scripts/leading_convergence.py --random 3
"""

import argparse

import numpy as np

from qest.catalog import depolarizing, gad, random_low_noise
from qest.channels import extend_family, family_from_low_noise, from_noise_operators
from qest.estimation import channel_qfi
from qest.linalg import dagger, hermitian_eig, pure_to_density
from qest.lownoise import METHOD_DIRECT, enhancement_factor, optimal_input_states


def normalized_random(seed, num_m):
    ms = list(random_low_noise(seed, num_m=num_m).noise_ops)
    s = sum(dagger(m) @ m for m in ms)
    w, _ = hermitian_eig(s)
    return from_noise_operators([m / np.sqrt(w[-1]) for m in ms],
                                name=f"random(seed={seed})")


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--betaE", type=float, default=1.0)
    parser.add_argument("--random", type=int, default=2, help="number of random channels")
    parser.add_argument("--eps", type=float, nargs="+", default=[1e-2, 1e-3, 1e-4])
    args = parser.parse_args()

    channels = [depolarizing(), gad(args.betaE)]
    channels += [normalized_random(seed, 1 + seed % 4) for seed in range(args.random)]

    for ln in channels:
        report = enhancement_factor(ln.noise_ops, method=METHOD_DIRECT)
        pure, extended = optimal_input_states(report)
        fam = family_from_low_noise(ln)
        fam_ext = extend_family(fam, 2)
        rho_s = pure_to_density(pure)
        rho_sa = pure_to_density(extended)

        print(f"\n{ln.name}: eta = {report.eta:.9f}  "
              f"L_pure = {report.leading_pure:.9f}  L_ext = {report.leading_extended:.9f}")
        print(f"  {'eps':>10}  {'eps*J_S':>14}  {'eps*J_SA':>14}")
        for eps in args.eps:
            t_s = eps * channel_qfi(fam, rho_s, eps).qfi
            t_sa = eps * channel_qfi(fam_ext, rho_sa, eps).qfi
            print(f"  {eps:>10.1e}  {t_s:>14.9f}  {t_sa:>14.9f}")


if __name__ == "__main__":
    main()
