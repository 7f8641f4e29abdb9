"""Acceptance suite: one test per release criterion, each printing a
pass/fail line with its wall time (run with ``pytest -v -s`` to see them).
Tolerances and time budgets are fixed here, not tuned at runtime.
"""

import json
import time
from contextlib import contextmanager

import numpy as np
from qest.catalog import depolarizing, gad, random_low_noise
from qest.channels import (
    extend_family,
    family_from_low_noise,
    from_noise_operators,
)
from qest.cli import main
from qest.estimation import (
    QfiEvaluator,
    SearchConfig,
    channel_qfi,
    maximize_qfi_pure,
    optimal_estimator,
    qfi,
    sld,
)
from qest.linalg import (
    bloch_to_density,
    dagger,
    hermitian_eig,
    partial_trace,
    pure_to_density,
)
from qest.lownoise import (
    METHOD_BOTH,
    METHOD_CLOSED_FORM,
    METHOD_DIRECT,
    enhancement_factor,
    eta_bruteforce,
    leading_qfi_coefficient,
    noise_geometry,
    optimal_input_states,
    quadratic_form,
)
from qest.unitary import UnitaryFamily, log_hamiltonian, unitary_channel_family, unitary_qfi_max

from conftest import random_density, random_hermitian


@contextmanager
def criterion(num, desc, time_limit):
    start = time.perf_counter()
    ok = True
    try:
        yield
    except BaseException:
        ok = False
        raise
    finally:
        elapsed = time.perf_counter() - start
        print(
            f"\n[criterion {num:02d}] {'PASS' if ok else 'FAIL'} in {elapsed:.1f}s "
            f"(limit {time_limit:.0f}s): {desc}"
        )
        if ok and elapsed >= time_limit:
            raise AssertionError(
                f"criterion {num} exceeded its time budget: {elapsed:.1f}s >= {time_limit}s"
            )


def bell_density():
    bell = np.zeros(4, dtype=complex)
    bell[0] = bell[3] = 1.0 / np.sqrt(2.0)
    return pure_to_density(bell)


def random_pure_states(rng, count):
    polar = np.arccos(rng.uniform(-1.0, 1.0, size=count))
    azim = rng.uniform(0.0, 2.0 * np.pi, size=count)
    xs = np.stack(
        [np.sin(polar) * np.cos(azim), np.sin(polar) * np.sin(azim), np.cos(polar)], axis=-1
    )
    return bloch_to_density(xs)


def test_criterion_01_depolarizing_exact_qfi():
    with criterion(1, "depolarizing QFI equals 1/(eps(2-eps)) for random pure inputs", 5.0):
        rng = np.random.default_rng(101)
        fam = family_from_low_noise(depolarizing())
        for eps in (0.05, 0.1, 0.2):
            ev = QfiEvaluator(fam, eps)
            vals = ev.qfi(random_pure_states(rng, 50))
            np.testing.assert_allclose(vals, 1.0 / (eps * (2.0 - eps)), atol=1e-6)


def test_criterion_02_depolarizing_extended_qfi():
    with criterion(2, "extended depolarizing QFI at the Bell probe equals 3/(eps(4-3eps))", 10.0):
        fam = extend_family(family_from_low_noise(depolarizing()), 2)
        for eps in (0.05, 0.1, 0.2):
            res = channel_qfi(fam, bell_density(), eps)
            np.testing.assert_allclose(res.qfi, 3.0 / (eps * (4.0 - 3.0 * eps)), atol=1e-6)


def test_criterion_03_eta_attainment():
    with criterion(3, "depolarizing attains eta = 3/2, amplitude damping stays at 1", 10.0):
        dep_ops = depolarizing().noise_ops
        closed = enhancement_factor(dep_ops, method=METHOD_CLOSED_FORM)
        np.testing.assert_allclose(closed.eta, 1.5, atol=1e-9)
        np.testing.assert_allclose(eta_bruteforce(dep_ops, 10_000), 1.5, atol=1e-4)
        for beta_e in (0.1, 1.0, 5.0):
            report = enhancement_factor(gad(beta_e).noise_ops, method=METHOD_DIRECT)
            np.testing.assert_allclose(report.eta, 1.0, atol=1e-6)


def test_criterion_04_universal_bound():
    with criterion(4, "10000 random channels satisfy 1 <= eta <= 3/2", 60.0):
        lo, hi = np.inf, -np.inf
        for seed in range(10_000):
            ms = random_low_noise(seed, num_m=1 + seed % 6).noise_ops
            eta = enhancement_factor(ms, method=METHOD_DIRECT).eta
            lo, hi = min(lo, eta), max(hi, eta)
        assert lo >= 1.0 - 1e-9, f"eta dipped to {lo}"
        assert hi <= 1.5 + 1e-9, f"eta reached {hi}"


def test_criterion_05_closed_form_vs_oracles():
    with criterion(5, "closed form, direct path and brute force agree", 120.0):
        count = 0
        seed = 0
        while count < 1000:
            ms = random_low_noise(seed, num_m=2 + seed % 5).noise_ops
            seed += 1
            geom = noise_geometry(ms)
            w, _ = hermitian_eig(geom.h.astype(complex))
            if w[0] <= 0 or w[2] / w[0] >= 1e6:
                continue
            report = enhancement_factor(ms, method=METHOD_BOTH)
            assert report.agreement < 1e-8, f"seed {seed - 1}: gap {report.agreement}"
            brute = eta_bruteforce(ms, 1000)
            assert abs(brute - report.eta) < 1e-4, f"seed {seed - 1}: brute {brute} vs {report.eta}"
            count += 1


def _richardson_limit(ts):
    # ts sampled at eps = 1e-2, 1e-3, 1e-4; two levels kill the eps and eps^2 terms
    r1a = (10.0 * ts[1] - ts[0]) / 9.0
    r1b = (10.0 * ts[2] - ts[1]) / 9.0
    return (100.0 * r1b - r1a) / 99.0


def test_criterion_06_leading_coefficient_convergence():
    with criterion(6, "eps * QFI converges to the leading coefficients", 60.0):
        channels = [depolarizing(), gad(1.0)]
        for seed in range(20):
            ms = list(random_low_noise(seed, num_m=1 + seed % 4).noise_ops)
            s = sum(dagger(m) @ m for m in ms)
            w, _ = hermitian_eig(s)
            ms = [m / np.sqrt(w[-1]) for m in ms]  # validity then reaches eps = 0.9
            channels.append(from_noise_operators(ms))
        eps_grid = (1e-2, 1e-3, 1e-4)
        for ln in channels:
            report = enhancement_factor(ln.noise_ops, method=METHOD_DIRECT)
            pure, extended = optimal_input_states(report)
            fam = family_from_low_noise(ln)
            fam_ext = extend_family(fam, 2)
            rho_s = pure_to_density(pure)
            rho_sa = pure_to_density(extended)
            t_s = [eps * channel_qfi(fam, rho_s, eps).qfi for eps in eps_grid]
            t_sa = [eps * channel_qfi(fam_ext, rho_sa, eps).qfi for eps in eps_grid]
            err_s = abs(_richardson_limit(t_s) - report.leading_pure)
            err_sa = abs(_richardson_limit(t_sa) - report.leading_extended)
            assert err_s < 1e-4, f"{ln.name}: pure-limit error {err_s:.2e}"
            assert err_sa < 1e-4, f"{ln.name}: extended-limit error {err_sa:.2e}"


def test_criterion_07_unitary_no_enhancement():
    with criterion(7, "ancillas do not help one-parameter unitary families", 30.0):
        for seed in range(20):
            rng = np.random.default_rng(7000 + seed)
            gen = random_hermitian(rng, 2)
            w, v = hermitian_eig(gen)

            def build(theta, w=w, v=v):
                return (v * np.exp(-1j * theta * w)) @ dagger(v)

            fam = UnitaryFamily(parameter="theta", validity=(-10.0, 10.0), build=build, dim=2)
            gap_sq, _ = unitary_qfi_max(log_hamiltonian(fam, 0.7))
            assert gap_sq > 0.05  # seeded generators are safely non-degenerate
            chan = unitary_channel_family(fam)
            _, best2 = maximize_qfi_pure(chan, 0.7, 2)
            assert abs(best2 - gap_sq) < 1e-6 * max(1.0, gap_sq)
            _, best4 = maximize_qfi_pure(extend_family(chan, 2), 0.7, 4)
            assert abs(best4 / gap_sq - 1.0) < 1e-3


def test_criterion_08_estimation_property_suite():
    with criterion(8, "SLD residual, convexity, monotonicity, dominance, saturation", 60.0):
        rng = np.random.default_rng(808)

        # solving the SLD equation on the support of rho
        for _ in range(200):
            n = int(rng.integers(2, 5))
            rho = random_density(rng, n)
            drho = random_hermitian(rng, n)
            drho -= np.trace(drho) / n * np.eye(n)
            l_op = sld(rho, drho)
            p, v = hermitian_eig(rho, tol=1e-8)
            proj = (v * (p > 1e-10)) @ dagger(v)
            resid = proj @ (drho - 0.5 * (l_op @ rho + rho @ l_op)) @ proj
            assert np.max(np.abs(resid)) < 1e-8

        # convexity of the Fisher information in the state family
        for trial in range(200):
            ln_a = random_low_noise(trial, num_m=1 + trial % 4)
            ln_b = random_low_noise(5000 + trial, num_m=1 + (trial + 1) % 4)
            theta = min(0.02, 0.3 * ln_a.validity[1], 0.3 * ln_b.validity[1])
            ev_a = QfiEvaluator(family_from_low_noise(ln_a), theta)
            ev_b = QfiEvaluator(family_from_low_noise(ln_b), theta)
            rho_a, drho_a = ev_a.output_and_derivative(random_density(rng, 2))
            rho_b, drho_b = ev_b.output_and_derivative(random_density(rng, 2))
            lam = rng.uniform(0.05, 0.95)
            mix_rho = lam * rho_a + (1 - lam) * rho_b
            mix_drho = lam * drho_a + (1 - lam) * drho_b
            j_mix = qfi(mix_rho, sld(mix_rho, mix_drho))
            j_split = lam * qfi(rho_a, sld(rho_a, drho_a)) + (1 - lam) * qfi(rho_b, sld(rho_b, drho_b))
            assert j_mix <= j_split + 1e-7

        # monotonicity under discarding the ancilla
        for trial in range(200):
            ln = random_low_noise(2000 + trial, num_m=1 + trial % 5)
            fam = family_from_low_noise(ln)
            theta = min(0.03, 0.3 * ln.validity[1])
            rho_sa = random_density(rng, 4)
            j_joint = channel_qfi(extend_family(fam, 2), rho_sa, theta).qfi
            j_red = channel_qfi(fam, partial_trace(rho_sa, 2, 2, "S"), theta).qfi
            assert j_red <= j_joint + 1e-7

        # a mixed input never beats the best pure input
        cfg = SearchConfig(sphere_points=600)
        for trial in range(200):
            ln = random_low_noise(3000 + trial, num_m=1 + trial % 5)
            fam = family_from_low_noise(ln)
            theta = min(0.04, 0.3 * ln.validity[1])
            _, best = maximize_qfi_pure(fam, theta, 2, search=cfg)
            j_mixed = channel_qfi(fam, random_density(rng, 2), theta).qfi
            assert j_mixed <= best + 1e-6

        # the optimal estimator is locally unbiased and saturates the bound
        for trial in range(200):
            ln = random_low_noise(4000 + trial, num_m=1 + trial % 5)
            theta = min(0.05, 0.3 * ln.validity[1])
            res = channel_qfi(family_from_low_noise(ln), random_density(rng, 2), theta)
            if res.qfi <= 1e-12:
                continue
            est = optimal_estimator(res)
            assert abs(np.trace(res.rho @ est).real - theta) < 1e-8
            assert abs(np.trace(res.drho @ est).real - 1.0) < 1e-8
            shifted = est - theta * np.eye(2)
            variance = np.trace(res.rho @ shifted @ shifted).real
            assert abs(variance - 1.0 / res.qfi) < 1e-8


def test_criterion_09_geometry_identity():
    with criterion(9, "quadratic form equals the leading coefficient on 1000 pairs", 30.0):
        rng = np.random.default_rng(909)
        for trial in range(1000):
            num_m = 1 + trial % 6
            ms = [
                rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
                for _ in range(num_m)
            ]
            geom = noise_geometry(ms)
            x = rng.standard_normal(3)
            nrm = np.linalg.norm(x)
            if nrm > 1.0:
                x *= rng.uniform(0.0, 1.0) / nrm
            lhs = quadratic_form(geom, x)
            rhs = leading_qfi_coefficient(ms, bloch_to_density(x))
            assert abs(lhs - rhs) < 1e-10 * max(1.0, abs(rhs))


def test_criterion_10_cli_contract(tmp_path, capsys):
    with criterion(10, "CLI reproduces the closed forms with stable exit codes", 60.0):
        dep_file = tmp_path / "dep.json"
        dep_file.write_text(json.dumps({"dim": 2, "type": "depolarizing"}), encoding="utf-8")
        gad_file = tmp_path / "gad.json"
        gad_file.write_text(
            json.dumps({"dim": 2, "type": "gad", "betaE": 1.0}), encoding="utf-8"
        )

        # criterion 1 through the CLI: random pure inputs at three noise levels
        rng = np.random.default_rng(110)
        for eps in (0.05, 0.1, 0.2):
            for _ in range(10):
                x = rng.standard_normal(3)
                x /= np.linalg.norm(x)
                spec = ",".join(f"{v:.17g}" for v in x)
                assert main(["qfi", str(dep_file), "--epsilon", str(eps), f"--input={spec}"]) == 0
                out = json.loads(capsys.readouterr().out)
                np.testing.assert_allclose(out["qfi"], 1 / (eps * (2 - eps)), atol=1e-6)

        # criterion 2 through the CLI
        for eps in (0.05, 0.1, 0.2):
            assert main(
                ["qfi", str(dep_file), "--epsilon", str(eps), "--input", "bell", "--ancilla"]
            ) == 0
            out = json.loads(capsys.readouterr().out)
            np.testing.assert_allclose(out["qfi"], 3 / (eps * (4 - 3 * eps)), atol=1e-6)

        # criterion 3 through the CLI
        assert main(["eta", str(dep_file), "--method", "both", "--grid", "10000"]) == 0
        out = json.loads(capsys.readouterr().out)
        np.testing.assert_allclose(out["eta"], 1.5, atol=1e-9)
        np.testing.assert_allclose(out["eta_bruteforce"], 1.5, atol=1e-4)
        for beta_e in (0.1, 1.0, 5.0):
            gad_file.write_text(
                json.dumps({"dim": 2, "type": "gad", "betaE": beta_e}), encoding="utf-8"
            )
            assert main(["eta", str(gad_file)]) == 0
            out = json.loads(capsys.readouterr().out)
            np.testing.assert_allclose(out["eta"], 1.0, atol=1e-6)

        # validate passes on the catalog file and fails on tampered data
        assert main(["validate", str(dep_file)]) == 0
        capsys.readouterr()

        broken = tmp_path / "broken.json"
        broken.write_text("{not json", encoding="utf-8")
        assert main(["validate", str(broken)]) == 2
        capsys.readouterr()

        assert main(["qfi", str(dep_file), "--epsilon", "0", "--input", "0,0,1"]) == 3
        capsys.readouterr()

        missing_dir = tmp_path / "no" / "such" / "dir" / "x.csv"
        assert main(
            ["sweep", str(dep_file), "--eps-start", "1e-2", "--eps-end", "1e-1",
             "--steps", "2", "--out", str(missing_dir)]
        ) == 4
        capsys.readouterr()

        # bit-exact sweep reproducibility and the leading-coefficient columns
        out_a, out_b = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["sweep", str(dep_file), "--eps-start", "1e-3", "--eps-end", "1e-1", "--steps", "15"]
        assert main(args + ["--out", str(out_a)]) == 0
        assert main(args + ["--out", str(out_b)]) == 0
        assert out_a.read_bytes() == out_b.read_bytes()
        rows = [
            [float(v) for v in line.split(",")]
            for line in out_a.read_text(encoding="utf-8").splitlines()[1:]
        ]
        np.testing.assert_allclose(rows[0][3], 0.5, atol=2e-3)
        np.testing.assert_allclose(rows[0][4], 0.75, atol=3e-3)
