"""Model-layer tests: site families, standardization, assumption scans."""

import numpy as np
import pytest

from breatherlab.errors import DomainError, InputError
from breatherlab.model import (
    DistributionSpec,
    ModelSpec,
    PeriodicPotentialSpec,
    SingleSiteSpec,
    analytic_kappa1,
    evaluate_site,
    normalize_energy,
    site_lambda_derivative,
    site_values,
    standardize,
    total_potential,
    validate_assumptions,
)


def bump_scalar(a, r, x):
    """Independent scalar oracle for the bump profile (plain formula)."""
    s = float(np.sum(np.square(x)))
    t = 1.0 - s / r**2
    return a * max(t, 0.0) ** 2


def breather_site(a=1.0, r=0.4, lo=1.0, hi=2.0, standardized=False):
    return SingleSiteSpec(
        kind="breather", amplitude=a, radius=r, lambda_minus=lo, lambda_plus=hi,
        standardized=standardized,
    )


def alloy_site(a=1.0, r=0.4, lo=0.0, hi=1.0, standardized=False):
    return SingleSiteSpec(
        kind="alloy", amplitude=a, radius=r, lambda_minus=lo, lambda_plus=hi,
        standardized=standardized,
    )


def breather_model(d=1, vper_kind="zero", amp=0.5, **site_kw):
    site = breather_site(**site_kw)
    if vper_kind == "zero":
        vper = PeriodicPotentialSpec(kind="zero")
    else:
        vper = PeriodicPotentialSpec(kind="cosine-sum", amplitudes=(amp,) * d)
    dist = DistributionSpec(
        kind="uniform", lambda_minus=site.lambda_minus, lambda_plus=site.lambda_plus
    )
    return ModelSpec(d=d, vper=vper, site=site, dist=dist)


class TestEvaluateSite:
    def test_breather_matches_scalar_formula(self):
        # u(lam, x) = -f(lam x); cross-check against the plain scalar formula
        site = breather_site(a=1.0, r=0.4)
        val = evaluate_site(site, 2.0, 0.1)
        assert val == pytest.approx(-bump_scalar(1.0, 0.4, 0.2), abs=1e-15)
        assert val == pytest.approx(-0.5625, abs=1e-12)

    def test_breather_standardized_zero_at_floor(self):
        site = breather_site(standardized=True)
        xs = np.linspace(-0.5, 0.5, 41)[:, None]
        vals = evaluate_site(site, site.lambda_minus, xs)
        assert np.all(vals == 0.0)

    def test_alloy_monotone_in_coupling(self):
        site = alloy_site()
        xs = np.linspace(-0.6, 0.6, 101)[:, None]
        lo = evaluate_site(site, 0.3, xs)
        hi = evaluate_site(site, 0.8, xs)
        assert np.all(hi >= lo)

    def test_outside_cell_is_exact_zero(self):
        for site in (breather_site(), alloy_site(a=2.0, r=0.5)):
            pts = np.array([[0.51], [0.75], [-0.9], [12.0]])
            assert np.all(evaluate_site(site, site.lambda_plus, pts) == 0.0)

    def test_coupling_domain_error(self):
        site = breather_site(lo=1.0, hi=2.0)
        with pytest.raises(DomainError):
            evaluate_site(site, 2.5, 0.0)
        with pytest.raises(DomainError):
            evaluate_site(site, 0.5, 0.0)

    def test_2d_points(self):
        site = breather_site(a=1.5, r=0.3, lo=1.0, hi=2.0)
        pt = np.array([0.05, -0.08])
        got = evaluate_site(site, 1.7, pt[None, :])[0]
        assert got == pytest.approx(-bump_scalar(1.5, 0.3, 1.7 * pt), abs=1e-14)


class TestDerivative:
    def test_alloy_derivative_is_profile(self):
        site = alloy_site(a=0.7, r=0.45)
        xs = np.linspace(-0.5, 0.5, 31)[:, None]
        d1 = site_lambda_derivative(site, 0.2, xs)
        d2 = site_lambda_derivative(site, 0.9, xs)
        f = np.array([bump_scalar(0.7, 0.45, x) for x in xs])
        assert np.allclose(d1, f, atol=1e-14)
        assert np.allclose(d1, d2, atol=1e-14)

    def test_breather_derivative_nonnegative(self):
        site = breather_site()
        lams = np.linspace(1.0, 2.0, 23)
        xs = np.linspace(-0.5, 0.5, 57)[:, None]
        dv = site_values(site, lams, xs)  # sanity: values finite
        assert np.all(np.isfinite(dv))
        for lam in lams:
            assert np.all(site_lambda_derivative(site, lam, xs) >= 0.0)

    def test_breather_derivative_against_finite_difference(self):
        # analytic -x f'(lam x) vs difference quotient of evaluate_site
        site = breather_site(a=1.0, r=0.4)
        step = 1e-5
        rng = np.random.default_rng(7)
        for _ in range(20):
            lam = rng.uniform(1.1, 1.9)
            x = rng.uniform(-0.45, 0.45)
            fd = (evaluate_site(site, lam + step, x) - evaluate_site(site, lam - step, x)) / (
                2 * step
            )
            assert site_lambda_derivative(site, lam, x) == pytest.approx(fd, abs=1e-6)

    def test_repulsivity_closed_form(self):
        # g(x) = -x f'(x) = (4 a |x|^2 / r^2)(1 - |x|^2/r^2)_+ and the breather
        # derivative is g(lam x)/lam; both forms must agree on a grid.
        a, r = 1.3, 0.35
        site = breather_site(a=a, r=r, lo=1.0, hi=2.0)
        lam = 1.6
        xs = np.linspace(-0.49, 0.49, 97)
        got = site_lambda_derivative(site, lam, xs[:, None])
        y2 = (lam * xs) ** 2
        g = 4.0 * a * y2 / r**2 * np.clip(1.0 - y2 / r**2, 0.0, None)
        assert np.allclose(got, g / lam, atol=1e-13)
        assert np.all(g >= 0.0)

    def test_tabulated_derivative_finite_difference(self):
        lam_nodes = tuple(np.linspace(1.0, 2.0, 21))
        x_nodes = (tuple(np.linspace(-0.5, 0.5, 41)),)
        lam_grid = np.asarray(lam_nodes)
        x_grid = np.asarray(x_nodes[0])
        vals = lam_grid[:, None] * np.array([bump_scalar(1.0, 0.4, x) for x in x_grid])[None, :]
        site = SingleSiteSpec(
            kind="tabulated", lambda_minus=1.0, lambda_plus=2.0,
            lambda_nodes=lam_nodes, x_nodes=x_nodes, values=vals,
        )
        d = site_lambda_derivative(site, 1.5, 0.1)
        assert d == pytest.approx(bump_scalar(1.0, 0.4, 0.1), rel=1e-3)


class TestStandardize:
    def test_alloy_floor_zero_unchanged(self):
        model = ModelSpec(
            d=1,
            vper=PeriodicPotentialSpec(kind="zero"),
            site=alloy_site(lo=0.0, hi=1.0),
            dist=DistributionSpec(kind="uniform", lambda_minus=0.0, lambda_plus=1.0),
        )
        std = standardize(model)
        assert std.vper.site_floor is None
        xs = np.linspace(-0.5, 0.5, 33)[:, None]
        for lam in (0.0, 0.4, 1.0):
            assert np.allclose(
                evaluate_site(std.site, lam, xs), evaluate_site(model.site, lam, xs)
            )

    def test_breather_standardized_nonnegative(self):
        model = breather_model()
        std = standardize(model)
        xs = np.linspace(-0.5, 0.5, 101)[:, None]
        for lam in np.linspace(1.0, 2.0, 11):
            vals = evaluate_site(std.site, lam, xs)
            assert np.all(vals >= 0.0)
        assert np.all(evaluate_site(std.site, 1.0, xs) == 0.0)

    def test_total_potential_invariant(self):
        # V_per + V_omega evaluated at random points is unchanged by the
        # floor shuffle, checked against direct summation.
        model = breather_model(vper_kind="cosine-sum", amp=0.3)
        std = standardize(model)
        rng = np.random.default_rng(11)
        couplings = {(k,): rng.uniform(1.0, 2.0) for k in range(-3, 4)}
        pts = rng.uniform(-1.2, 1.2, size=(100, 1))
        before = total_potential(model, couplings, pts)
        after = total_potential(std, couplings, pts)
        assert np.allclose(before, after, atol=1e-12)

    def test_idempotent(self):
        model = standardize(breather_model())
        assert standardize(model) is model

    def test_monotone_pointwise_after_standardization(self):
        std = standardize(breather_model())
        xs = np.linspace(-0.5, 0.5, 64)[:, None]
        lams = np.linspace(1.0, 2.0, 16)
        vals = site_values(std.site, lams, xs)
        assert np.all(np.diff(vals, axis=0) >= -1e-12)


class TestDistributions:
    def test_uniform_tail_constants(self):
        dist = DistributionSpec(kind="uniform", lambda_minus=1.0, lambda_plus=3.0)
        assert dist.alpha == pytest.approx(0.5)
        assert dist.kappa == 1.0
        assert dist.mass_below(0.5) == pytest.approx(0.25)

    def test_beta_sampling_and_tail(self):
        dist = DistributionSpec(
            kind="truncated-beta", lambda_minus=0.0, lambda_plus=1.0, beta_a=0.5, beta_b=1.0
        )
        u = np.linspace(0.001, 0.999, 999)
        x = dist.sample(u)
        assert np.all((x >= 0.0) & (x <= 1.0))
        for eps in (0.01, 0.1, 0.4):
            assert dist.mass_below(eps) >= dist.alpha * eps**dist.kappa * (1 - 1e-9)

    def test_atom_distribution(self):
        dist = DistributionSpec(
            kind="two-point-plus-uniform", lambda_minus=1.0, lambda_plus=2.0,
            atom_mass_at_min=0.6,
        )
        u = np.linspace(0.0, 0.999, 1000)
        x = dist.sample(u)
        assert np.mean(x == 1.0) == pytest.approx(0.6, abs=2e-3)
        star, p = dist.lambda_star()
        assert 1.0 < star < 2.0
        assert 0.0 < p < 1.0

    def test_atom_mass_one_rejected(self):
        with pytest.raises(InputError):
            DistributionSpec(
                kind="two-point-plus-uniform", lambda_minus=0.0, lambda_plus=1.0,
                atom_mass_at_min=1.0,
            )


class TestValidateAssumptions:
    def test_breather_passes(self):
        model = breather_model()
        rep = validate_assumptions(model, lambda_grid_size=64, x_grid_size=256)
        assert rep.passed, rep.to_dict()
        assert rep.kappa1 <= analytic_kappa1(model.site) + 1e-12
        assert rep.eps1 > 0 and rep.eps2 > 0

    def test_uniform_assumption_v(self):
        model = breather_model()
        rep = validate_assumptions(model)
        assert rep.verdicts["v"]
        assert rep.kappa == 1.0
        assert rep.alpha == pytest.approx(1.0 / model.dist.width)

    def test_sign_changing_alloy_fails_iii(self):
        x_nodes = (tuple(np.linspace(-0.5, 0.5, 41)),)
        xg = np.asarray(x_nodes[0])
        f = np.sin(2 * np.pi * xg) * np.exp(-8 * xg**2)  # takes both signs
        lam_nodes = (0.0, 0.5, 1.0)
        vals = np.asarray(lam_nodes)[:, None] * f[None, :]
        site = SingleSiteSpec(
            kind="tabulated", lambda_minus=0.0, lambda_plus=1.0,
            lambda_nodes=lam_nodes, x_nodes=x_nodes, values=vals,
        )
        model = ModelSpec(
            d=1,
            vper=PeriodicPotentialSpec(kind="zero"),
            site=site,
            dist=DistributionSpec(kind="uniform", lambda_minus=0.0, lambda_plus=1.0),
        )
        rep = validate_assumptions(model, lambda_grid_size=16, x_grid_size=64)
        assert not rep.verdicts["iii"]
        assert rep.violation_site is not None and rep.violation_site[0] == "iii"
        assert rep.worst_violation > 0

    def test_deterministic(self):
        model = breather_model(vper_kind="cosine-sum")
        r1 = validate_assumptions(model)
        r2 = validate_assumptions(model)
        assert r1.to_dict() == r2.to_dict()

    def test_grid_size_guard(self):
        with pytest.raises(DomainError):
            validate_assumptions(breather_model(), lambda_grid_size=8)


class TestNormalize:
    def test_shift_recorded(self):
        model = breather_model(vper_kind="cosine-sum")
        shifted = normalize_energy(model, 1.25)
        assert shifted.vper.offset == pytest.approx(-1.25)
        assert shifted.energy_shift == pytest.approx(1.25)
        again = normalize_energy(shifted, -0.25)
        assert again.vper.offset == pytest.approx(-1.0)
        assert again.energy_shift == pytest.approx(1.0)
