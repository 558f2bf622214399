"""Monte Carlo estimation of the integrated density of states.

Couplings are generated by the counter-based Philox generator keyed on
(master_seed, realization index), with the per-site value read off at the
site's row-major position, so every field is a pure function of
(master_seed, index, site) and runs are reproducible bit for bit regardless
of worker scheduling.

Estimates are normalized eigenvalue counts N(E, H^{L,X}) / L^d averaged over
realizations; Dirichlet counts bound the limit from below and ground-state
(Mezincescu) counts from above, pathwise at equal box size.
"""

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import InputError, InsufficientDataError
from .lattice import GridSpec, assemble
from .model import DistributionSpec
from .spectral import count_below, tridiag_count_below

FAST_BC_KINDS = ("dirichlet", "neumann", "robin", "mezincescu")


@dataclass(frozen=True)
class Realization:
    """Seeded coupling field on the sites of one box."""

    master_seed: int
    index: int
    L: int
    d: int
    couplings: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.couplings, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "couplings", arr)


def _uniform_field(master_seed: int, index: int, count: int) -> np.ndarray:
    key = np.array([master_seed, index], dtype=np.uint64)
    gen = np.random.Generator(np.random.Philox(key=key))
    return gen.random(count)


def sample_realization(dist: DistributionSpec, master_seed: int, index: int,
                       L: int, d: int) -> Realization:
    """Deterministic coupling field: site k holds the inverse-CDF image of the
    k-th (row-major) variate of the stream keyed on (master_seed, index)."""
    u = _uniform_field(master_seed, index, L**d)
    lams = dist.sample(u).reshape((L,) * d)
    return Realization(master_seed=master_seed, index=index, L=L, d=d, couplings=lams)


@dataclass(frozen=True)
class IDSCurve:
    """Per-energy, per-boundary-condition normalized counting estimates.

    ``box_sizes`` is per energy point (constant for fixed-box runs, varying
    for the energy-matched band-edge pipeline).  ``counts`` optionally keeps
    the raw per-realization integer counts for pathwise checks and bootstrap
    resampling.
    """

    energies: np.ndarray
    box_sizes: np.ndarray
    n: int
    M: int
    seed: int
    d: int
    estimates: dict
    errors: dict
    counts: dict = None

    def to_csv(self, file):
        """Write the pinned column layout: E,N_D,se_D,N_M,se_M,L,n,M,seed."""
        if "D" not in self.estimates or "M" not in self.estimates:
            raise InputError("curve CSV needs both the D and M estimates")
        close = False
        if isinstance(file, (str, bytes, os.PathLike)):
            file = open(file, "w", newline="\n")
            close = True
        try:
            file.write("E,N_D,se_D,N_M,se_M,L,n,M,seed\n")
            for j, E in enumerate(self.energies):
                row = [
                    f"{E:.17g}",
                    f"{self.estimates['D'][j]:.17g}",
                    f"{self.errors['D'][j]:.17g}",
                    f"{self.estimates['M'][j]:.17g}",
                    f"{self.errors['M'][j]:.17g}",
                    str(int(self.box_sizes[j])),
                    str(self.n),
                    str(self.M),
                    str(self.seed),
                ]
                file.write(",".join(row) + "\n")
        finally:
            if close:
                file.close()


def _label_of(bc):
    return bc.label


def _counts_fast_1d(model, grid, bcs, energies, master_seed, indices, index_offset):
    """Vectorized tridiagonal path: batch all realizations per boundary case."""
    from .model import site_values

    M = len(indices)
    L, n, N = grid.L, grid.n, grid.num_dof
    u = np.empty((M, L))
    for row, i in enumerate(indices):
        u[row] = _uniform_field(master_seed, i + index_offset, L)
    lams = model.dist.sample(u)
    vals = site_values(model.site, lams.ravel(), grid.offset_points())
    vrand = vals.reshape(M, N)

    out = {}
    for bc in bcs:
        base = assemble(model, grid, bc)
        diag = base.matrix.diagonal()[None, :] + vrand
        off = base.matrix.diagonal(1)
        counts = np.empty((M, len(energies)), dtype=int)
        for j, E in enumerate(energies):
            counts[:, j] = tridiag_count_below(diag, off, float(E))
        out[_label_of(bc)] = counts
    return out


def _counts_general(model, grid, bcs, energies, master_seed, indices, index_offset,
                    dense_threshold):
    out = {_label_of(bc): np.empty((len(indices), len(energies)), dtype=int)
           for bc in bcs}
    for row, i in enumerate(indices):
        real = sample_realization(model.dist, master_seed, i + index_offset,
                                  grid.L, grid.d)
        for bc in bcs:
            H = assemble(model, grid, bc, couplings=real.couplings)
            for j, E in enumerate(energies):
                out[_label_of(bc)][row, j] = count_below(
                    H, float(E), dense_threshold=dense_threshold
                ).count
    return out


def _count_block(args):
    (model, grid, bcs, energies, master_seed, indices, index_offset,
     dense_threshold) = args
    fast = grid.d == 1 and all(bc.kind in FAST_BC_KINDS for bc in bcs)
    if fast:
        return _counts_fast_1d(model, grid, bcs, energies, master_seed, indices,
                               index_offset)
    return _counts_general(model, grid, bcs, energies, master_seed, indices,
                           index_offset, dense_threshold)


def estimate_ids(model, n: int, L: int, bcs, energies, M: int, master_seed: int,
                 workers: int = 1, keep_counts: bool = True,
                 dense_threshold: int = 2000, index_offset: int = 0) -> IDSCurve:
    """Estimate N(E)/L^d for each boundary condition over M realizations.

    All boundary conditions share the same realizations (couplings depend on
    (master_seed, index) only), so pathwise comparisons are meaningful.  Work
    is split into contiguous index blocks; the merge is by block order,
    making the result independent of scheduling.
    """
    if np.any(np.diff(energies) < 0):
        raise InputError("energies must be sorted")
    bcs = list(bcs)
    labels = [_label_of(bc) for bc in bcs]
    if len(set(labels)) != len(labels):
        raise InputError("boundary conditions must carry distinct labels")
    grid = GridSpec(L=L, n=n, d=model.d)
    energies = np.asarray(energies, dtype=float)

    indices = np.arange(M)
    if workers > 1 and M >= 4 * workers:
        blocks = np.array_split(indices, workers)
        tasks = [
            (model, grid, bcs, energies, master_seed, blk, index_offset,
             dense_threshold)
            for blk in blocks if blk.size
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_count_block, tasks))
        merged = {
            lab: np.concatenate([r[lab] for r in results], axis=0) for lab in labels
        }
    else:
        merged = _count_block(
            (model, grid, bcs, energies, master_seed, indices, index_offset,
             dense_threshold)
        )

    vol = float(L**model.d)
    estimates, errors = {}, {}
    for lab in labels:
        cnt = merged[lab]
        estimates[lab] = cnt.mean(axis=0) / vol
        if M > 1:
            errors[lab] = cnt.std(axis=0, ddof=1) / math.sqrt(M) / vol
        else:
            errors[lab] = np.zeros(len(energies))
    return IDSCurve(
        energies=energies, box_sizes=np.full(len(energies), L, dtype=int),
        n=n, M=M, seed=master_seed, d=model.d,
        estimates=estimates, errors=errors,
        counts=merged if keep_counts else None,
    )


def bracketing_report(model, n: int, Ls, bcs, energies, M: int, master_seed: int,
                      workers: int = 1) -> dict:
    """Monotone bracketing of the IDS between the two boundary conditions.

    ``bcs`` must be the (Dirichlet, Mezincescu-type) pair.  Checks, within
    two combined standard errors: the normalized Dirichlet means do not
    decrease along increasing L, the upper-condition means do not increase,
    and every Dirichlet value sits below every upper value per energy;
    pathwise count ordering at equal L is checked exactly.
    """
    if len(Ls) < 2:
        raise InputError("bracketing needs at least two box sizes")
    lab_lo, lab_hi = _label_of(bcs[0]), _label_of(bcs[1])
    curves = {}
    for L in Ls:
        curves[L] = estimate_ids(model, n, L, bcs, energies, M, master_seed,
                                 workers=workers, keep_counts=True)

    pathwise_violations = 0
    total_pairs = 0
    for L in Ls:
        c = curves[L].counts
        pathwise_violations += int(np.sum(c[lab_lo] > c[lab_hi]))
        total_pairs += c[lab_lo].size

    def _mono(lab, sign):
        worst = np.inf
        ok = True
        ordered = sorted(Ls)
        for a, b in zip(ordered, ordered[1:]):
            ea, eb = curves[a].estimates[lab], curves[b].estimates[lab]
            sa, sb = curves[a].errors[lab], curves[b].errors[lab]
            slack = 2.0 * np.sqrt(sa**2 + sb**2)
            gap = sign * (eb - ea)  # should be >= -slack
            worst = min(worst, float(np.min(gap + slack)))
            ok = ok and bool(np.all(gap >= -slack))
        return ok, worst

    lower_mono, lower_worst = _mono(lab_lo, +1.0)
    upper_mono, upper_worst = _mono(lab_hi, -1.0)

    cross_ok = True
    cross_worst = np.inf
    for La in Ls:
        for Lb in Ls:
            ea, sa = curves[La].estimates[lab_lo], curves[La].errors[lab_lo]
            eb, sb = curves[Lb].estimates[lab_hi], curves[Lb].errors[lab_hi]
            slack = 2.0 * np.sqrt(sa**2 + sb**2)
            margin = eb - ea + slack
            cross_worst = min(cross_worst, float(np.min(margin)))
            cross_ok = cross_ok and bool(np.all(margin >= 0.0))

    report = {
        "Ls": [int(L) for L in Ls],
        "energies": [float(E) for E in energies],
        "samples": M,
        "seed": master_seed,
        "pathwise_violations": pathwise_violations,
        "pathwise_pairs": total_pairs,
        "lower_monotone": lower_mono,
        "lower_worst_margin": lower_worst,
        "upper_monotone": upper_mono,
        "upper_worst_margin": upper_worst,
        "cross_ordering": cross_ok,
        "cross_worst_margin": cross_worst,
        "all_pass": bool(
            pathwise_violations == 0 and lower_mono and upper_mono and cross_ok
        ),
        "curves": {
            int(L): {
                lab: list(map(float, curves[L].estimates[lab])) for lab in (lab_lo, lab_hi)
            }
            for L in Ls
        },
    }
    return report


@dataclass(frozen=True)
class BoxChoice:
    L: int
    clamped: bool
    raw: float


def choose_box_size(E: float, cfg=None, form: str = "lower", B2: float = None,
                    L_max: int = 64) -> BoxChoice:
    """Energy-matched box size, L ~ E^(-1/2).

    form="upper": floor(sqrt(c2 / (2 c7 E))) from the cutoff machinery (needs
    ``cfg``); form="lower": ceil(2 sqrt(B2) / sqrt(E)) from the test-function
    bound (needs ``B2``).  The result is clamped to [2, L_max] and the clamp
    is flagged, never silent.
    """
    if E <= 0:
        raise InputError("box matching needs E > 0")
    if form == "upper":
        if cfg is None:
            raise InputError("upper form needs a TempleConfig")
        raw = math.sqrt(cfg.c2 / (2.0 * cfg.c7 * E))
        L0 = math.floor(raw)
    elif form == "lower":
        if B2 is None:
            raise InputError("lower form needs the kinetic constant B2")
        raw = 2.0 * math.sqrt(B2) / math.sqrt(E)
        L0 = math.ceil(raw)
    else:
        raise InputError("form must be 'upper' or 'lower'")
    L = min(max(L0, 2), L_max)
    return BoxChoice(L=int(L), clamped=(L != L0), raw=raw)


def matched_box_curve(model, n: int, make_bcs, energies, M: int, master_seed: int,
                      B2: float, L_max: int = 64, workers: int = 1) -> IDSCurve:
    """Estimate the IDS with the box size matched per energy, L ~ E^(-1/2).

    ``make_bcs(grid)`` builds the boundary-condition pair for each box size.
    Realizations are independent across energy points (the point index is
    folded into the high bits of the stream index).
    """
    energies = np.asarray(energies, dtype=float)
    labels = None
    per_point = []
    box = []
    for j, E in enumerate(sorted(energies)):
        choice = choose_box_size(float(E), form="lower", B2=B2, L_max=L_max)
        bcs = make_bcs(GridSpec(L=choice.L, n=n, d=model.d))
        cur = estimate_ids(model, n, choice.L, bcs, [float(E)], M, master_seed,
                           workers=workers, keep_counts=True,
                           index_offset=(j + 1) << 32)
        if labels is None:
            labels = list(cur.estimates)
        per_point.append(cur)
        box.append(choice.L)
    estimates = {lab: np.array([c.estimates[lab][0] for c in per_point])
                 for lab in labels}
    errors = {lab: np.array([c.errors[lab][0] for c in per_point])
              for lab in labels}
    counts = {lab: np.concatenate([c.counts[lab] for c in per_point], axis=1)
              for lab in labels}
    return IDSCurve(
        energies=np.sort(energies), box_sizes=np.asarray(box, dtype=int),
        n=n, M=M, seed=master_seed, d=model.d,
        estimates=estimates, errors=errors, counts=counts,
    )


@dataclass(frozen=True)
class LifshitzFit:
    """Log-log-log slope of the counting estimates near the band edge."""

    window: tuple
    slope: float
    ci_lo: float
    ci_hi: float
    target: float
    points: tuple
    label: str
    n_points: int
    n_resamples: int

    def to_dict(self):
        return {
            "window": list(self.window),
            "slope": self.slope,
            "ci_lo": self.ci_lo,
            "ci_hi": self.ci_hi,
            "target": self.target,
            "points": [list(p) for p in self.points],
            "label": self.label,
            "n_points": self.n_points,
            "n_resamples": self.n_resamples,
        }


def fit_lifshitz(curve: IDSCurve, window=(1e-4, 1e-1), label: str = "M",
                 max_rel_se: float = 0.25, min_points: int = 5,
                 target: float = None, n_boot: int = 200,
                 boot_seed: int = 0xB007) -> LifshitzFit:
    """Least-squares slope of log|log N| against log E on the window.

    Points need estimates inside [N_min, N_max] with relative standard error
    under ``max_rel_se``.  The confidence interval is a percentile bootstrap
    over realizations (200 resamples) when raw counts are available.
    """
    lo, hi = window
    if not 0.0 < lo < hi < 1.0:
        raise InputError("window must satisfy 0 < N_min < N_max < 1")
    est = np.asarray(curve.estimates[label], dtype=float)
    se = np.asarray(curve.errors[label], dtype=float)
    admissible = (est >= lo) & (est <= hi)
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(est > 0, se / est, np.inf)
    admissible &= rel < max_rel_se
    if int(admissible.sum()) < min_points:
        raise InsufficientDataError(
            f"window [{lo:g}, {hi:g}] admits {int(admissible.sum())} points "
            f"(need {min_points}) with relative error < {max_rel_se:g}"
        )
    E = curve.energies[admissible]
    N = est[admissible]
    x = np.log(E)
    y = np.log(np.abs(np.log(N)))
    slope, _ = np.polyfit(x, y, 1)

    if target is None:
        target = -curve.d / 2.0

    slopes = []
    n_used = 0
    if curve.counts is not None and n_boot > 0:
        counts = curve.counts[label][:, admissible]
        vols = (curve.box_sizes[admissible].astype(float)) ** curve.d
        M = counts.shape[0]
        gen = np.random.Generator(
            np.random.Philox(key=np.array([boot_seed, curve.seed], dtype=np.uint64))
        )
        for _ in range(n_boot):
            sel = gen.integers(0, M, size=M)
            mean_b = counts[sel].mean(axis=0) / vols
            if np.any(mean_b <= 0.0) or np.any(mean_b >= 1.0):
                continue
            yb = np.log(np.abs(np.log(mean_b)))
            slopes.append(np.polyfit(x, yb, 1)[0])
        n_used = len(slopes)
    if n_used >= 10:
        ci_lo, ci_hi = np.percentile(slopes, [2.5, 97.5])
    else:
        ci_lo = ci_hi = float(slope)
    return LifshitzFit(
        window=(float(lo), float(hi)), slope=float(slope),
        ci_lo=float(ci_lo), ci_hi=float(ci_hi), target=float(target),
        points=tuple((float(a), float(b)) for a, b in zip(x, y)),
        label=label, n_points=int(admissible.sum()), n_resamples=n_used,
    )


def synthetic_curve(energies, c: float, s: float, d: int = 1) -> IDSCurve:
    """Curve with N(E) = exp(-c E^-s) under both labels, for fit self-tests."""
    energies = np.asarray(energies, dtype=float)
    est = np.exp(-c * energies ** (-s))
    data = {"D": est.copy(), "M": est.copy()}
    zero = {"D": np.zeros_like(est), "M": np.zeros_like(est)}
    return IDSCurve(
        energies=energies, box_sizes=np.ones(len(energies), dtype=int),
        n=0, M=1, seed=0, d=d, estimates=data, errors=zero, counts=None,
    )


def lower_tail_check(model, n: int, make_bcs, energies, M: int, master_seed: int,
                     B1: float, B2: float, eps1: float, eps2: float,
                     L_max: int = 64, workers: int = 1) -> dict:
    """Monte Carlo check of the analytic lower tail of the Dirichlet curve.

    At each energy, with the matched box L and the coupling window
    delta = eps1 E / (2 B1), the estimate must dominate
    P(lambda - lambda_minus <= delta)^(L^d) / L^d within two standard errors.
    """
    rows = []
    all_pass = True
    for j, E in enumerate(energies):
        choice = choose_box_size(float(E), form="lower", B2=B2, L_max=L_max)
        grid = GridSpec(L=choice.L, n=n, d=model.d)
        bcs = make_bcs(grid)
        cur = estimate_ids(model, n, choice.L, bcs, [float(E)], M, master_seed,
                           workers=workers, index_offset=(j + 101) << 32)
        est = float(cur.estimates["D"][0])
        se = float(cur.errors["D"][0])
        delta = eps1 * float(E) / (2.0 * B1)
        p_site = model.dist.cdf_below(delta)
        analytic = p_site ** (choice.L**model.d) / choice.L**model.d
        ok = est >= analytic - 2.0 * se
        all_pass = all_pass and ok
        rows.append({
            "E": float(E), "L": choice.L, "delta": delta,
            "delta_within_eps2": bool(delta <= eps2),
            "p_site": p_site, "analytic": analytic,
            "estimate": est, "se": se, "pass": bool(ok),
        })
    return {"rows": rows, "all_pass": bool(all_pass)}
