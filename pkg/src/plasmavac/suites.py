"""Identity verification suites behind ``plasmavac verify``.

Every suite draws admissible random samples, evaluates an identity by two
independent routes and records the worst discrepancy as one named check.
A check name is ``suite.identity``; ``inject`` perturbs the named check so
that the failure path can be exercised end to end.
"""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from . import boundary, geometry, linalg, norms, plasma, vacuum
from .errors import PlasmaVacError
from .geometry import FrontDerivs


class UnknownSuiteError(PlasmaVacError, KeyError):
    """No suite with the requested name."""


@dataclass
class Check:
    name: str
    value: float
    tol: float
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        d = asdict(self)
        d["value"] = _json_float(self.value)
        return d


def _json_float(x):
    x = float(x)
    return x if math.isfinite(x) else repr(x)


class Checker:
    """Collects the checks of one suite."""

    def __init__(self, suite: str, inject: str | None = None):
        self.suite = suite
        self.inject = inject
        self.checks: list[Check] = []

    def _hit(self, name: str) -> bool:
        return self.inject is not None and self.inject in (name, f"{self.suite}.{name}")

    def within(self, name: str, err: float, tol: float, detail: str = "") -> None:
        """Pass when ``err <= tol``; an injected check sees ``err + 10 tol``."""
        err = float(err)
        if self._hit(name):
            err += 10.0 * tol
            detail = (detail + "; " if detail else "") + "perturbation injected"
        ok = bool(np.isfinite(err) and err <= tol)
        self.checks.append(Check(f"{self.suite}.{name}", err, tol, ok, detail))

    def holds(self, name: str, cond: bool, detail: str = "") -> None:
        if self._hit(name):
            cond = False
            detail = (detail + "; " if detail else "") + "perturbation injected"
        self.checks.append(Check(f"{self.suite}.{name}", 0.0 if cond else 1.0, 0.0, bool(cond), detail))


def rel_err(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(b)))))


# ---------------------------------------------------------------------------
# Samplers


def sample_eps(rng) -> float:
    return float(rng.uniform(0.05, 0.95))


def sample_derivs(rng, eps: float, flat: bool = False) -> FrontDerivs:
    """Front derivatives inside both invertibility gates."""
    pt = float(rng.uniform(-0.95, 0.95) / eps)
    p1 = 0.0 if flat else float(rng.uniform(-0.5, 1.0))
    return FrontDerivs(pt, p1, float(rng.uniform(-2, 2)), float(rng.uniform(-2, 2)))


def sample_nu(rng) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v) * float(rng.uniform(0.0, 0.99))


def sample_plasma(rng) -> plasma.PlasmaState:
    H = rng.normal(size=3)
    q = 0.5 * float(H @ H) + float(rng.uniform(0.2, 2.0))
    return plasma.PlasmaState(q, rng.normal(size=3), H, float(rng.uniform(-0.5, 0.5)))


def sample_hat(rng) -> boundary.HatBoundary:
    """Boundary basic state with every coefficient of the boundary form active."""
    n = lambda s=1.0: float(rng.normal() * s)  # noqa: E731
    while True:
        hat = boundary.HatBoundary(
            H=np.r_[0.0, rng.normal(size=2)], calH=np.r_[0.0, rng.normal(size=2)], calE1=n(),
            v2=n(0.5), v3=n(0.5), phi_t=n(0.3), phi_2=n(0.3), phi_3=n(0.3),
            dt_calH2=n(), dt_calH3=n(), d2_calE1=n(), d3_calE1=n(), d2_calH2=n(), d3_calH3=n(),
            jump_d1q=n(), d1_vN=n(), d1_HN=n(),
        )
        if hat.stability_margin() > 0.05 and float(np.linalg.norm(hat.v)) < 1.5:
            return hat


# ---------------------------------------------------------------------------
# Suites


def suite_linalg(ck: Checker, rng, samples: int) -> None:
    ev = det = cp = 0.0
    for _ in range(max(samples // 10, 10)):
        n = int(rng.integers(2, 9))
        a = rng.normal(size=(n, n))
        s = a + a.T
        ev = max(ev, rel_err(linalg.sym_eigvals(s), np.linalg.eigvalsh(s)))
        det = max(det, abs(linalg.det(a) - np.linalg.det(a)) / max(1.0, abs(np.linalg.det(a))))
        cp = max(cp, rel_err(linalg.char_poly(s)[::-1], np.poly(s)) if n <= 6 else 0.0)
    ck.within("jacobi_vs_reference", ev, 1e-10)
    ck.within("lu_det_vs_reference", det, 1e-10)
    ck.within("char_poly_vs_reference", cp, 1e-8)


def suite_determinants(ck: Checker, rng, samples: int) -> None:
    dj = flat = curved = 0.0
    for _ in range(samples):
        eps = sample_eps(rng)
        d = sample_derivs(rng, eps)
        pack = geometry.jacobians_at(d, eps)
        dj = max(dj, abs(pack.detJ - linalg.det(pack.J)) / max(abs(pack.detJ), 1e-300))
        nu = sample_nu(rng)
        fam = vacuum.assemble_secondary(nu)
        f = vacuum.det_frak_B1_flat(nu)
        flat = max(flat, abs(f - linalg.det(fam.B[1])) / max(1.0, abs(f)))
        formula, direct = vacuum.det_frak_B1_curved(nu, d, eps)
        curved = max(curved, abs(formula - direct) / max(1.0, abs(formula)))
    ck.within("det_J", dj, 1e-10, "relative to the closed form")
    ck.within("det_B1_flat", flat, 1e-10)
    ck.within("det_B1_curved", curved, 1e-10)


def suite_spectra(ck: Checker, rng, samples: int) -> None:
    diff = expl = 0.0
    counts_ok = True
    for _ in range(samples):
        eps = sample_eps(rng)
        d = sample_derivs(rng, eps)
        pt = d.t if abs(d.t) > 1e-3 else 0.5
        r = boundary.btilde1_spectrum(pt, d.x2, d.x3, eps)
        diff = max(diff, r.max_abs_diff / max(1.0, float(np.max(np.abs(r.closed_form)))))
        counts_ok &= r.incoming == (4 if pt > 0 else 2) and not r.degenerate
        expl = max(expl, boundary.explicit_matches_assembled(pt, d.x2, d.x3, eps))
    ck.within("btilde1_closed_vs_numeric", diff, 1e-10)
    ck.within("btilde1_explicit_vs_assembled", expl, 1e-12)
    ck.holds("incoming_counts", counts_ok, "4 for phi_t > 0, 2 for phi_t < 0")
    ck.holds("degenerate_flag", boundary.btilde1_spectrum(0.0, 0.3, 0.4, 0.5).degenerate)
    ws = boundary.ws_system_characteristics()
    ck.holds("B1_signature", tuple(ws["B1_signature"]) == (2, 2, 2), str(ws["B1_signature"]))
    ck.holds("minus_E12_signature", tuple(ws["minus_E12_signature"]) == (1, 6, 1), str(ws["minus_E12_signature"]))
    ck.holds("boundary_condition_count", ws["total_boundary_conditions"] == 4)


def suite_symmetrizer(ck: Checker, rng, samples: int) -> None:
    sym = spread = aug = 0.0
    pos = True
    for _ in range(samples):
        nu = sample_nu(rng)
        fam = vacuum.assemble_secondary(nu)
        sym = max(sym, max(linalg.asymmetry(B) for B in fam.B))
        spread = max(spread, rel_err(linalg.sym_eigvals(fam.B[0]), vacuum.frak_b0_spectrum(nu)))
        for j in (1, 2, 3):
            aug = max(aug, rel_err(fam.B[j], vacuum.augmentation_rhs(fam, j)))
        pos &= vacuum.positivity_frak_B0(nu) > 0
    ck.within("frak_B_symmetric", sym, 1e-14)
    ck.within("frak_B0_spectrum", spread, 1e-10, "{1-|nu|, 1, 1+|nu|} each twice")
    ck.within("augmentation_identity", aug, 1e-14)
    ck.holds("frak_B0_positive", pos)


def suite_b0(ck: Checker, rng, samples: int) -> None:
    sym = cpe = 0.0
    descartes = positive = True
    for _ in range(samples):
        eps = sample_eps(rng)
        d = sample_derivs(rng, eps)
        B0 = vacuum.assemble_B0(d, eps)
        sym = max(sym, linalg.asymmetry(B0))
        scaled = vacuum.b0_scale(d, eps) * B0
        cubic = vacuum.b0_cubic(d, eps)
        want = np.polynomial.polynomial.polymul(cubic, cubic)
        got = linalg.char_poly(0.5 * (scaled + scaled.T))
        cpe = max(cpe, float(np.max(np.abs(got - want) / np.maximum(1.0, np.abs(want)))))
        descartes &= list(np.sign(cubic[::-1])) == [1, -1, 1, -1]
        positive &= linalg.sym_eigvals(0.5 * (B0 + B0.T))[0] > 0
    ck.within("B0_symmetric", sym, 1e-12)
    ck.within("char_poly_is_cubic_squared", cpe, 1e-9)
    ck.holds("descartes_pattern", descartes)
    ck.holds("B0_positive_definite", positive)


def suite_m_family(ck: Checker, rng, samples: int) -> None:
    sym = blocks = bnd = form = 0.0
    for _ in range(samples):
        eps = sample_eps(rng)
        d = sample_derivs(rng, eps)
        nu = sample_nu(rng)
        fam = vacuum.assemble_M(nu, d, eps)
        sym = max(sym, max(linalg.asymmetry(M) for M in fam.M))
        dflat = d._replace(x1=0.0)
        blocks = max(blocks, rel_err(vacuum.m1_block_form(nu, dflat, eps), vacuum.assemble_M(nu, dflat, eps).M[1]))
        # boundary: nu1 fixed by the characteristic choice
        pt, p2, p3 = dflat.t, dflat.x2, dflat.x3
        nu2, nu3 = nu[1] * 0.3, nu[2] * 0.3
        nu1 = vacuum.boundary_nu1(nu2, nu3, pt, p2, p3, eps)
        if nu1 * nu1 + nu2 * nu2 + nu3 * nu3 < 0.98:
            S, T = vacuum.m1_boundary_blocks(nu2, nu3, pt, p2, p3, eps)
            Mb = np.block([[S, T], [-T, S]]) / (1.0 - (eps * pt) ** 2)
            M1 = vacuum.assemble_M([nu1, nu2, nu3], dflat, eps).M[1]
            bnd = max(bnd, rel_err(Mb, M1))
            closed, direct = vacuum.quadratic_form_M1(rng.normal(size=6), nu2, nu3, pt, p2, p3, eps)
            form = max(form, abs(closed - direct) / max(1.0, abs(direct)))
    ck.within("M_symmetric", sym, 1e-10)
    ck.within("M1_block_form_on_boundary", blocks, 1e-10)
    ck.within("M1_boundary_blocks", bnd, 1e-10)
    ck.within("MWW_closed_vs_direct", form, 1e-9)


def suite_boundary_form(ck: Checker, rng, samples: int) -> None:
    gap = grad = res = 0.0
    for _ in range(samples):
        hat = sample_hat(rng)
        eps = float(rng.uniform(0.1, 0.6))
        gamma = float(rng.uniform(1.0, 10.0))
        tr = boundary.manufacture_trace(hat, gamma, eps, rng.normal(size=7))
        res = max(res, max(abs(v) for v in boundary.boundary_residuals(tr, hat, gamma, eps).values()))
        direct, decomposed, terms = boundary.quadratic_form_A(tr, hat, gamma, eps)
        scale = max(1.0, abs(terms["plasma"]) + abs(terms["vacuum"]))
        gap = max(gap, abs(direct - decomposed) / scale)
        fg = boundary.resolve_front_gradient(tr, hat, gamma, eps)
        grad = max(grad, rel_err([fg.phi_t, fg.phi_2, fg.phi_3], [tr.phi_t, tr.phi_2, tr.phi_3]))
    ck.within("manufactured_traces_admissible", res, 1e-10)
    ck.within("A_direct_vs_decomposed", gap, 1e-9)
    ck.within("front_gradient_recovery", grad, 1e-9)


def suite_plasma(ck: Checker, rng, samples: int) -> None:
    sym = cong = 0.0
    pos = True
    for _ in range(samples):
        U = sample_plasma(rng)
        mats = plasma.assemble_plasma_matrices(U)
        sym = max(sym, max(linalg.asymmetry(A) for A in mats))
        pos &= linalg.sym_eigvals(mats[0])[0] > 0
        d = sample_derivs(rng, 0.5)
        sec = plasma.assemble_secondary_plasma(U, d)
        closed = plasma.secondary_closed_form(U, d)
        cong = max(cong, max(rel_err(a, b) for a, b in zip(sec.A, closed)))
    ck.within("A_symmetric", sym, 1e-12)
    ck.holds("A0_positive_definite", pos)
    ck.within("secondary_congruence_vs_closed_form", cong, 1e-10)
    flat = plasma.PlasmaState(1.5, np.zeros(3), [0.0, 1.0, 0.0])
    A1 = plasma.assemble_Atilde1(flat, FrontDerivs(0.0, 0.0, 0.0, 0.0))
    ck.within("flat_boundary_matrix_is_E12", rel_err(A1, plasma.e_matrix(1)), 1e-14)


def suite_c_operator(ck: Checker, rng, samples: int) -> None:
    err = 0.0
    for _ in range(max(samples // 10, 10)):
        U = sample_plasma(rng)
        d = sample_derivs(rng, 0.5)
        dU = rng.normal(size=(4, 8))
        err = max(err, rel_err(plasma.zero_order_C(U, dU, d), plasma.zero_order_C_fd(U, dU, d)))
    ck.within("C_analytic_vs_finite_difference", err, 1e-6)


def suite_good_unknown(ck: Checker, rng, samples: int) -> None:
    """A pure front displacement has zero good unknown."""
    x1 = np.linspace(-1.0, 1.0, 201)
    err = 0.0
    for _ in range(max(samples // 20, 10)):
        a, b, c = rng.uniform(0.1, 0.3), rng.uniform(0.5, 2.0), rng.uniform(-1, 1)
        psi_hat = a * np.sin(x1)
        psi1_hat = a * np.cos(x1)
        psi = c * np.exp(-x1 * x1)
        f = lambda y: np.sin(b * y)  # noqa: E731
        W_hat_d1 = b * np.cos(b * (x1 + psi_hat)) * (1.0 + psi1_hat)
        s = 1e-6
        dW = (f(x1 + psi_hat + s * psi) - f(x1 + psi_hat - s * psi)) / (2 * s)
        err = max(err, float(np.max(np.abs(plasma.good_unknown(dW, psi, psi1_hat, W_hat_d1)))))
    ck.within("front_displacement_annihilated", err, 1e-8)
    W = rng.normal(size=(8, 5))
    ck.within("zero_front_is_identity", rel_err(plasma.good_unknown(W, 0.0, 0.0, rng.normal(size=(8, 5))), W), 0.0)


def suite_lift(ck: Checker, rng, samples: int) -> None:
    n = 32
    x2 = np.arange(n) * 2 * math.pi / n
    X2, X3 = np.meshgrid(x2, x2, indexing="ij")
    x1 = np.linspace(0.0, 3.0, 61)
    times = np.linspace(0.0, 1.0, 5)
    trace = slope = ok = 0.0
    passed = True
    for _ in range(max(samples // 50, 6)):
        modes = [(int(rng.integers(0, 4)), int(rng.integers(0, 4))) for _ in range(3)]
        amps = rng.normal(size=(2, 3))
        pa = sum(amps[0, i] * np.cos(k2 * X2 + k3 * X3) for i, (k2, k3) in enumerate(modes))
        pb = sum(amps[1, i] * np.sin(k2 * X2 + k3 * X3 + 0.3) for i, (k2, k3) in enumerate(modes))
        w = float(rng.uniform(0.5, 3.0))
        phi = np.stack([math.cos(w * t) * pa + math.sin(w * t) * pb for t in times])
        scale = float(rng.uniform(0.2, 1.0)) / float(np.max(geometry.torus_sobolev_norm(phi, 2.0)))
        phi = phi * scale
        phi_t = np.stack([w * (-math.sin(w * t) * pa + math.cos(w * t) * pb) for t in times]) * scale
        rep = geometry.verify_lift_estimates(phi, x1, phi_t=phi_t)
        trace = max(trace, rep["trace_error"])
        slope = max(slope, rep["sup_abs_psi_1"])
        ok = max(ok, rep["j0_sup_psi"] / rep["j0_bound"], rep["j1_sup_psi"] / rep["j1_bound"])
        passed &= rep["pass"]
    ck.within("trace_equals_front", trace, 1e-12)
    ck.within("slope_bound_half", slope, 0.5, "sup|Psi_1| for ||phi||_H2 <= 1")
    ck.within("sup_bound_inverse_sqrt_2pi", ok, 1.0, "sup|Psi| over ||phi||_H3/2 / sqrt(2 pi)")
    ck.holds("lift_report_pass", passed)


def suite_transforms(ck: Checker, rng, samples: int) -> None:
    fam = inv = j1 = pt = 0.0
    for _ in range(samples):
        eps = sample_eps(rng)
        d = sample_derivs(rng, eps)
        pack = geometry.jacobians_at(d, eps)
        w = rng.normal(size=6)
        tf = geometry.transform_fields(w, pack)
        fam = max(fam, rel_err(pack.L @ tf.w_g, tf.w_bb))
        inv = max(inv, rel_err(geometry.inverse_transform(tf.w_bb, pack), w))
        j1 = max(j1, rel_err(pack.J1 @ pack.J, vacuum.b0_scale(d, eps) * np.eye(6)))
        pt = max(pt, rel_err(geometry.frak_from_tilde(w, d), tf.w_frak), rel_err(geometry.bb_from_tilde(w, d, eps), tf.w_bb))
    ck.within("three_routes_agree", fam, 1e-12, "J W~ = L (1+Psi_1) K^-T W~")
    ck.within("inverse_round_trip", inv, 1e-12)
    ck.within("J1_is_scaled_inverse", j1, 1e-12)
    ck.within("pointwise_vs_matrix", pt, 1e-13)


def suite_b4(ck: Checker, rng, samples: int) -> None:
    err = 0.0
    for _ in range(max(samples // 10, 10)):
        eps = float(rng.uniform(0.1, 0.9))
        c = rng.uniform(-0.2, 0.2, size=(4, 3))

        def at(t, c=c):
            return FrontDerivs(*(c[k, 0] + c[k, 1] * t + c[k, 2] * t * t for k in range(4)))

        def dt_at(t, c=c):
            return FrontDerivs(*(c[k, 1] + 2 * c[k, 2] * t for k in range(4)))

        t0 = float(rng.uniform(-0.5, 0.5))
        _, B4 = vacuum.assemble_B0_B4(at(t0), dt_at(t0), eps)
        err = max(err, rel_err(B4, vacuum.b4_finite_difference(at, t0, eps)))
    ck.within("B4_analytic_vs_finite_difference", err, 1e-7)


def suite_maxwell_transform(ck: Checker, rng, samples: int) -> None:
    res = geometry.transform_convergence()
    for key, order in res["orders"].items():
        ck.within(f"order_{key}", max(0.0, 1.9 - order), 0.0, f"fitted order {order:.3f} (need >= 1.9)")


def suite_norms(ck: Checker, rng, samples: int) -> None:
    t = np.linspace(0.0, 1.0, 11)
    x1 = np.linspace(0.0, 1.0, 201)
    x2 = np.arange(16) * 2 * math.pi / 16
    grid = norms.Grid3(t, x1, x2)
    V = 2 * math.pi
    c, g = float(rng.uniform(0.5, 2)), float(rng.uniform(1, 5))
    const = np.full(grid.shape, c)
    ck.within("H1_constant", abs(norms.H1_gamma_norm(const, g, grid) - g * g * c * c * V) / (g * g * c * c * V), 1e-12)
    lin = np.broadcast_to(x1[None, :, None], grid.shape)
    want = (g * g / 3 + 1) * V
    ck.within("H1_linear_x1", abs(norms.H1_gamma_norm(lin, g, grid) - want) / want, 1e-4)
    ck.within("conormal_below_full", max(0.0, norms.conormal_H1_norm(lin, g, grid) - norms.H1_gamma_norm(lin, g, grid)), 0.0)
    ts = np.arange(32) / 32 * 2 * math.pi
    tr = np.full((32, 16), c)
    got = norms.trace_Hhalf_gamma(tr, g, ts, x2, taper=0.0)
    ck.within("Hhalf_constant", abs(got - g * c * c * 4 * math.pi**2) / (g * c * c * 4 * math.pi**2), 1e-12)
    mode = np.cos(x2)[None, :] * np.ones((32, 1))
    want = math.sqrt(g * g + 1) * 4 * math.pi**2 / 2
    ck.within("Hhalf_cos_mode", abs(norms.trace_Hhalf_gamma(mode, g, ts, x2, taper=0.0) - want) / want, 1e-12)
    z = np.arange(64) * 2 * math.pi / 64
    u = np.sin(z)[:, None] * np.cos(2 * z)[None, :]
    r = norms.periodic_derivative_H1_gamma(u, g, (2 * math.pi, 2 * math.pi)) / norms.fourier_H1_gamma(u, g, (2 * math.pi, 2 * math.pi))
    ck.within("fourier_vs_derivative_side", abs(1.0 - r), 0.08)


def suite_solver(ck: Checker, rng, samples: int) -> None:
    from .solver.basic_state import build_basic_state
    from .solver.experiments import energy_check
    from .solver.ibvp import Discretization, run

    basic = build_basic_state()
    disc = Discretization(basic, 16, 8)
    final = run(disc, 0.5, 0.5)
    zero = not (np.any(final.U) or np.any(final.W) or np.any(final.phi))
    ck.holds("zero_data_stays_zero", zero)
    for closure in ("sat-upwind", "sat-neutral"):
        rep = energy_check(basic, 32, 16, 1.0, closure=closure)
        ck.within(f"energy_nonincrease_{closure}", max(0.0, rep["max_rel_increase"]), 1e-10)


SUITES: dict[str, Callable] = {
    "linalg": suite_linalg,
    "determinants": suite_determinants,
    "spectra": suite_spectra,
    "symmetrizer": suite_symmetrizer,
    "b0": suite_b0,
    "m-family": suite_m_family,
    "boundary-form": suite_boundary_form,
    "plasma": suite_plasma,
    "c-operator": suite_c_operator,
    "good-unknown": suite_good_unknown,
    "lift": suite_lift,
    "transforms": suite_transforms,
    "b4": suite_b4,
    "maxwell-transform": suite_maxwell_transform,
    "norms": suite_norms,
    "solver": suite_solver,
}


def run_suite(name: str, samples: int = 1000, seed: int = 0, inject: str | None = None) -> dict:
    if name not in SUITES:
        raise UnknownSuiteError(f"unknown suite {name!r}; available: {', '.join(SUITES)}")
    ck = Checker(name, inject)
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    SUITES[name](ck, rng, samples)
    return {
        "suite": name,
        "passed": sum(c.passed for c in ck.checks),
        "total": len(ck.checks),
        "ok": all(c.passed for c in ck.checks),
        "seconds": time.perf_counter() - t0,
        "checks": [c.to_dict() for c in ck.checks],
    }


def run_suites(names=None, samples: int = 1000, seed: int = 0, inject: str | None = None) -> dict:
    """Run the selected suites (all when ``names`` is empty or ``["all"]``)."""
    if not names or list(names) == ["all"]:
        names = list(SUITES)
    reports = [run_suite(n, samples, seed, inject) for n in names]
    failing = [c["name"] for r in reports for c in r["checks"] if not c["passed"]]
    return {"ok": not failing, "suites": reports, "failing": failing, "samples": samples, "seed": seed}
