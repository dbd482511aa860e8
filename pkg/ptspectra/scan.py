"""Eigenvalue continuation in the coupling.

Levels are labelled at ``eps = 0`` by matching the computed spectrum to the
unperturbed formula, then followed outward from zero: each step takes the
nearest eigenvalue at the next coupling, and trajectories that claim the
same eigenvalue are resolved by an optimal assignment on that colliding
subset only. A step that cannot be matched within ``match_tol`` is retried
on a grid ten times finer (twice) before giving up.
A walk to a single coupling skips the intermediate grid when the match at
the target, and through the midpoint, is clear-cut.

On top of continuation sit reality certificates, threshold bisection and
truncation-convergence tables.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from ptspectra.decorators import log_call
from ptspectra.errors import (
    BracketError,
    ConvergenceError,
    InvalidInputError,
    MatchingAmbiguityError,
    NumericalError,
)
from ptspectra.families import H3Family, Size, SpectralFamily
from ptspectra.linalg import conjugation_defect, eigen_residual, eigenvalues
from ptspectra.logger import get_logger
from ptspectra.models import (
    ConvergenceTable,
    Label,
    RealityCertificate,
    ThresholdReport,
    Trajectory,
    TrajectoryPoint,
    format_label,
)

log = get_logger()

REFINE_FACTOR = 10
MAX_REFINE_DEPTH = 2
FLIP_WINDOW = 5
CONJUGATION_TOL = 1e-9


@dataclass
class ScanConfig:
    """Knobs shared by every continuation-based operation.

    ``reality_tol`` is relative: a value counts as real when
    ``|Im| <= reality_tol * (1 + |value|)``. ``reference_truncation``
    defaults to the family's doubled truncation. ``path_step`` is the
    coupling step used when an operation has to walk from 0 to a single
    target coupling. A walk first tries to reach its target in one jump:
    it is taken when every tracked value's nearest eigenvalue, directly and
    through the midpoint, is closer than ``jump_ratio`` times the second
    nearest. ``jump_ratio = 0`` always steps.
    """

    eps_grid: Sequence[float] = (0.0,)
    truncation: Optional[Size] = None
    reference_truncation: Optional[Size] = None
    quad_order: Optional[int] = None
    reality_tol: float = 1e-8
    match_tol: float = 1.0
    track_count: int = 5
    workers: int = 1
    path_step: float = 0.02
    refine: bool = True
    check_truncation: bool = True
    jump_ratio: float = 0.25

    def validate(self) -> "ScanConfig":
        grid = np.asarray(self.eps_grid, dtype=float)
        if grid.ndim != 1 or len(grid) == 0:
            raise InvalidInputError("eps grid must be a non-empty list of couplings")
        if not np.all(np.isfinite(grid)):
            raise InvalidInputError("eps grid has non-finite values")
        if len(grid) > 1:
            steps = np.diff(grid)
            if not (np.all(steps > 0) or np.all(steps < 0)):
                raise InvalidInputError("eps grid must be strictly monotone")
        for name in ("reality_tol", "match_tol", "path_step"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidInputError(f"{name} must be positive, got {value!r}")
        if int(self.track_count) != self.track_count or self.track_count < 1:
            raise InvalidInputError(f"track_count must be a positive integer, got {self.track_count!r}")
        if self.workers < 0:
            raise InvalidInputError("workers must be >= 0 (0 = one per CPU)")
        if self.quad_order is not None and self.quad_order < 1:
            raise InvalidInputError("quad_order must be >= 1")
        if not (0.0 <= self.jump_ratio < 1.0):
            raise InvalidInputError(f"jump_ratio must be in [0, 1), got {self.jump_ratio!r}")
        return self

    def tolerance(self, value: complex) -> float:
        return self.reality_tol * (1.0 + abs(value))

    def is_real(self, value: complex) -> bool:
        return abs(complex(value).imag) <= self.tolerance(value)

    def max_workers(self) -> int:
        return self.workers if self.workers > 0 else (os.cpu_count() or 1)


def _with_quad_order(family: SpectralFamily, cfg: ScanConfig) -> SpectralFamily:
    if cfg.quad_order is not None and isinstance(family, H3Family):
        return H3Family(cfg.quad_order)
    return family


# ---------------------------------------------------------------------------
# Matching
# ---------------------------------------------------------------------------

def match_step(prev: np.ndarray, candidates: np.ndarray, match_tol: float) -> np.ndarray:
    """Index into *candidates* for each tracked value in *prev*.

    Nearest neighbour per trajectory; trajectories sharing a nearest
    candidate are reassigned together by minimal total distance over the
    candidates within *match_tol* that no other trajectory has taken.

    Raises:
        MatchingAmbiguityError: a trajectory has no candidate within
            *match_tol*, or a collision cannot be resolved.
    """
    dist = np.abs(prev[:, None] - candidates[None, :])
    nearest = np.argmin(dist, axis=1)
    rows = np.arange(len(prev))
    if np.any(dist[rows, nearest] > match_tol):
        worst = float(np.max(dist[rows, nearest]))
        raise MatchingAmbiguityError(
            f"nearest eigenvalue {worst:.3g} away exceeds match_tol={match_tol:g}"
        )
    assigned = nearest.copy()
    picked, counts = np.unique(nearest, return_counts=True)
    colliding = set(picked[counts > 1].tolist())
    if not colliding:
        return assigned
    members = [t for t in rows if nearest[t] in colliding]
    taken = {int(nearest[t]) for t in rows if nearest[t] not in colliding}
    cols = [
        j for j in range(len(candidates))
        if j not in taken and float(np.min(dist[members, j])) <= match_tol
    ]
    if len(cols) < len(members):
        raise MatchingAmbiguityError(
            f"{len(members)} trajectories compete for {len(cols)} eigenvalues within match_tol"
        )
    sub_rows, sub_cols = linear_sum_assignment(dist[np.ix_(members, cols)])
    for r, c in zip(sub_rows, sub_cols):
        assigned[members[r]] = cols[c]
    if np.any(dist[rows, assigned] > match_tol):
        raise MatchingAmbiguityError("collision resolution left a trajectory beyond match_tol")
    return assigned


# ---------------------------------------------------------------------------
# Continuation engine
# ---------------------------------------------------------------------------

@dataclass
class _Solved:
    eps: float
    eigenvalues: np.ndarray
    norm: float
    defect: float


@dataclass
class _Continuation:
    family: SpectralFamily
    size: Size
    cfg: ScanConfig
    cache: Dict[float, _Solved] = field(default_factory=dict)

    @property
    def truncation(self) -> Tuple[int, ...]:
        return self.family.truncation_of(self.size)

    def _solve_one(self, eps: float) -> _Solved:
        try:
            h = self.family.build(eps, self.size)
            eigs = eigenvalues(h.matrix).eigenvalues
        except NumericalError as exc:
            if exc.eps is None:
                exc.eps = eps
            if exc.truncation is None:
                exc.truncation = "x".join(str(n) for n in self.truncation)
            raise
        norm = h.norm()
        defect = conjugation_defect(eigs)
        if defect > CONJUGATION_TOL * max(norm, 1.0):
            log.warning(
                "spectrum not conjugation-closed at eps=%r: defect %.3g", eps, defect
            )
        return _Solved(eps=eps, eigenvalues=eigs, norm=norm, defect=defect)

    def solve(self, eps_values: Sequence[float]) -> None:
        todo = [float(e) for e in dict.fromkeys(eps_values) if float(e) not in self.cache]
        if not todo:
            return
        workers = min(self.cfg.max_workers(), len(todo))
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(self._solve_one, todo))
        else:
            results = [self._solve_one(e) for e in todo]
        for sol in results:
            self.cache[sol.eps] = sol

    def get(self, eps: float) -> _Solved:
        eps = float(eps)
        if eps not in self.cache:
            self.solve([eps])
        return self.cache[eps]

    # -- labelling -------------------------------------------------------------

    def anchor(self, labels: Optional[Sequence[Label]] = None) -> Tuple[List[Label], np.ndarray]:
        """Tracked labels and their eigenvalues at ``eps = 0``."""
        levels = self.family.unperturbed_levels(self.size)
        if labels is None:
            if self.cfg.track_count > len(levels):
                raise InvalidInputError(
                    f"cannot track {self.cfg.track_count} levels in a basis of {len(levels)}"
                )
            chosen = levels[: self.cfg.track_count]
        else:
            lookup = dict(levels)
            missing = [format_label(lb) for lb in labels if tuple(lb) not in lookup]
            if missing:
                raise InvalidInputError(f"unknown level label(s): {', '.join(missing)}")
            chosen = [(tuple(lb), lookup[tuple(lb)]) for lb in labels]

        energies = [e for _, e in chosen]
        for a, b in zip(sorted(energies), sorted(energies)[1:]):
            if abs(b - a) <= 1e-12 * max(1.0, abs(a)):
                log.warning("degenerate unperturbed level %r; labels may swap", a)

        spectrum = self.get(0.0).eigenvalues
        used = np.zeros(len(spectrum), dtype=bool)
        values = np.empty(len(chosen), dtype=complex)
        for i, (_, energy) in enumerate(chosen):
            dist = np.where(used, np.inf, np.abs(spectrum - energy))
            j = int(np.argmin(dist))
            if dist[j] > self.cfg.match_tol:
                raise MatchingAmbiguityError(
                    f"no eigenvalue within match_tol of unperturbed level {energy!r}",
                    eps=0.0, truncation=self._trunc_text(),
                )
            used[j] = True
            values[i] = spectrum[j]
        return [lb for lb, _ in chosen], values

    def _trunc_text(self) -> str:
        return "x".join(str(n) for n in self.truncation)

    # -- stepping --------------------------------------------------------------

    def step(self, a: float, values: np.ndarray, b: float, depth: int = 0) -> np.ndarray:
        candidates = self.get(b).eigenvalues
        try:
            return candidates[match_step(values, candidates, self.cfg.match_tol)]
        except MatchingAmbiguityError as exc:
            if depth >= MAX_REFINE_DEPTH:
                exc.eps = b
                exc.truncation = self._trunc_text()
                raise
        inner = np.linspace(a, b, REFINE_FACTOR + 1)[1:]
        log.info("refining continuation between eps=%r and eps=%r", a, b)
        self.solve(inner)
        prev = a
        for e in inner:
            values = self.step(prev, values, float(e), depth + 1)
            prev = float(e)
        return values

    def follow(self, path: Sequence[float], start: np.ndarray) -> Dict[float, np.ndarray]:
        """Tracked values at every point of *path*; ``path[0]`` carries *start*."""
        path = [float(e) for e in path]
        self.solve(path[1:])
        out = {path[0]: start}
        values = start
        for a, b in zip(path, path[1:]):
            values = self.step(a, values, b)
            out[b] = values
        return out

    def _clear_match(self, values: np.ndarray, candidates: np.ndarray) -> Optional[np.ndarray]:
        """Nearest-candidate indices when every one is unambiguous, else ``None``."""
        if len(candidates) < 2:
            return None
        dist = np.abs(values[:, None] - candidates[None, :])
        order = np.argsort(dist, axis=1, kind="stable")
        rows = np.arange(len(values))
        nearest = order[:, 0]
        d1 = dist[rows, nearest]
        d2 = dist[rows, order[:, 1]]
        if len(np.unique(nearest)) < len(nearest):
            return None
        if np.any(d1 > self.cfg.match_tol) or np.any(d1 > self.cfg.jump_ratio * d2):
            return None
        return nearest

    def jump(self, a: float, values: np.ndarray, b: float) -> Optional[np.ndarray]:
        """Tracked values at *b* in one move, or ``None`` when the move is not
        clear-cut. The direct match must agree with the path through the
        midpoint."""
        if self.cfg.jump_ratio <= 0.0:
            return None
        mid = 0.5 * (a + b)
        self.solve([b, mid])
        at_b = self.get(b).eigenvalues
        direct = self._clear_match(values, at_b)
        if direct is None:
            return None
        at_mid = self.get(mid).eigenvalues
        halfway = self._clear_match(values, at_mid)
        if halfway is None:
            return None
        onward = self._clear_match(at_mid[halfway], at_b)
        if onward is None or not np.array_equal(onward, direct):
            return None
        log.debug("jumped from eps=%r to eps=%r", a, b)
        return at_b[direct]

    def walk(self, start_eps: float, start: np.ndarray, target: float) -> np.ndarray:
        """Continue from *start_eps* to *target*: one jump when it is clear-cut,
        otherwise steps of at most ``path_step``."""
        if target == start_eps:
            return start
        jumped = self.jump(float(start_eps), start, float(target))
        if jumped is not None:
            return jumped
        n = max(1, int(math.ceil(abs(target - start_eps) / self.cfg.path_step)))
        path = np.linspace(start_eps, target, n + 1)
        path[-1] = target
        return self.follow(path, start)[float(target)]

    def residuals(self, eps: float, values: np.ndarray) -> np.ndarray:
        M = self.family.build(eps, self.size).matrix
        return np.array([eigen_residual(M, v) for v in values])


def _branches(grid: Sequence[float]) -> List[List[float]]:
    """Paths from 0 outward: one toward positive couplings, one toward negative."""
    pos = sorted(e for e in grid if e > 0)
    neg = sorted((e for e in grid if e < 0), reverse=True)
    return [[0.0] + branch for branch in (pos, neg) if branch]


def _flip_refined(path: List[float], flags: List[bool]) -> List[float]:
    """*path* with ten-fold refinement within five steps of every flag flip."""
    extra: List[float] = []
    for i in range(len(path) - 1):
        if flags[i] == flags[i + 1]:
            continue
        lo = max(0, i - FLIP_WINDOW)
        hi = min(len(path) - 1, i + 1 + FLIP_WINDOW)
        for k in range(lo, hi):
            extra.extend(np.linspace(path[k], path[k + 1], REFINE_FACTOR + 1)[1:-1].tolist())
    if not extra:
        return path
    merged = sorted(set(path) | set(extra), key=abs)
    return merged


@log_call(level="INFO")
def scan(family: SpectralFamily, cfg: ScanConfig) -> List[Trajectory]:
    """Follow the ``cfg.track_count`` lowest levels across ``cfg.eps_grid``.

    Points come back in grid order. Each carries the residual of its
    eigenvalue, the reality flag and the conjugation defect of the full
    spectrum at that coupling.

    Raises:
        MatchingAmbiguityError: continuation failed even after refinement.
    """
    cfg.validate()
    family = _with_quad_order(family, cfg)
    size = family.normalize_size(cfg.truncation)
    grid = [float(e) for e in cfg.eps_grid]
    for e in grid:
        family.validate_eps(e)

    cont = _Continuation(family, size, cfg)
    labels, start = cont.anchor()
    cont.solve(grid)
    values: Dict[float, np.ndarray] = {0.0: start}
    for path in _branches(grid):
        followed = cont.follow(path, start)
        if cfg.refine:
            flags = [all(cfg.is_real(v) for v in followed[e]) for e in path]
            refined = _flip_refined(path, flags)
            if len(refined) > len(path):
                log.info("refining %d couplings around reality flips", len(refined) - len(path))
                followed = cont.follow(refined, start)
        values.update({e: followed[e] for e in path})

    workers = min(cfg.max_workers(), len(grid))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            res = list(pool.map(lambda e: cont.residuals(e, values[e]), grid))
    else:
        res = [cont.residuals(e, values[e]) for e in grid]

    trajectories = [Trajectory(label=lb, truncation=cont.truncation) for lb in labels]
    for e, r in zip(grid, res):
        defect = cont.get(e).defect
        for t, traj in enumerate(trajectories):
            v = complex(values[e][t])
            traj.points.append(
                TrajectoryPoint(
                    eps=e, value=v, residual=float(r[t]),
                    real_flag=cfg.is_real(v), conjugation_defect=defect,
                )
            )
    return trajectories


# ---------------------------------------------------------------------------
# Certification
# ---------------------------------------------------------------------------

def _reference_size(family: SpectralFamily, cfg: ScanConfig, size: Size) -> Size:
    if cfg.reference_truncation is not None:
        return family.normalize_size(cfg.reference_truncation)
    return family.normalize_size(family.doubled(size))


def _values_at(cont: _Continuation, labels: Sequence[Label], eps: float) -> np.ndarray:
    _, start = cont.anchor(labels)
    return cont.walk(0.0, start, eps)


@log_call(level="INFO")
def certify_levels(
    family: SpectralFamily, labels: Sequence[Label], eps: float, cfg: ScanConfig
) -> List[RealityCertificate]:
    """Reality certificates for several levels at *eps*, in the order given.

    All levels share one walk per truncation. Each verdict needs
    ``|Im| <= tol`` at the working truncation; the value at the reference
    (doubled) truncation must agree to ``10 * tol`` first.

    Raises:
        ConvergenceError: the reference truncation moves an eigenvalue by
            more than ``10 * tol``.
    """
    cfg.validate()
    family = _with_quad_order(family, cfg)
    family.validate_eps(eps)
    labels = [tuple(lb) for lb in labels]
    if not labels:
        raise InvalidInputError("no level labels to certify")
    if len(set(labels)) != len(labels):
        raise InvalidInputError("level labels must be distinct")
    size = family.normalize_size(cfg.truncation)
    ref_size = _reference_size(family, cfg, size)

    cont = _Continuation(family, size, cfg)
    values = _values_at(cont, labels, eps)
    ref_cont = _Continuation(family, ref_size, cfg)
    ref_values = values if ref_size == size else _values_at(ref_cont, labels, eps)
    residuals = cont.residuals(eps, values)

    certificates = []
    for label, v, rv, res in zip(labels, values, ref_values, residuals):
        value, ref_value = complex(v), complex(rv)
        tol = cfg.tolerance(value)
        shift = abs(value - ref_value)
        if shift > 10.0 * tol:
            raise ConvergenceError(
                f"level {format_label(label)} moves by {shift:.3g} under truncation doubling "
                f"(allowed {10.0 * tol:.3g})",
                eps=eps,
                truncation=ref_cont._trunc_text(),
            )
        certificates.append(
            RealityCertificate(
                label=label,
                eps=float(eps),
                value=value,
                reference_value=ref_value,
                truncation=cont.truncation,
                reference_truncation=ref_cont.truncation,
                tolerance=tol,
                real=cfg.is_real(value),
                residual=float(res),
            )
        )
    return certificates


@log_call(level="INFO")
def certify_reality(
    family: SpectralFamily, label: Label, eps: float, cfg: ScanConfig
) -> RealityCertificate:
    """Is level *label* real at *eps*? See :func:`certify_levels`."""
    return certify_levels(family, [label], eps, cfg)[0]


@log_call(level="INFO")
def certified_range(
    family: SpectralFamily, label: Label, eps_grid: Sequence[float], cfg: ScanConfig
) -> Tuple[float, float]:
    """Widest run of grid couplings around 0 where *label* stays certified real.

    *eps_grid* must contain 0. Returns ``(eps_min, eps_max)``; both are 0
    when only the unperturbed point passes.
    """
    grid = sorted(float(e) for e in eps_grid)
    if 0.0 not in grid:
        raise InvalidInputError("certified range needs 0 in the coupling grid")
    family = _with_quad_order(family, cfg)
    label = tuple(label)
    size = family.normalize_size(cfg.truncation)
    ref_size = _reference_size(family, cfg, size)
    order = [lb for lb, _ in family.unperturbed_levels(size)]
    if label not in order:
        raise InvalidInputError(f"unknown level label {format_label(label)}")
    track = order.index(label) + 1

    base = replace(cfg, eps_grid=grid, track_count=track)
    work = scan(family, replace(base, truncation=size))
    ref = work if ref_size == size else scan(family, replace(base, truncation=ref_size))
    work_t = next(t for t in work if t.label == label)
    ref_t = next(t for t in ref if t.label == label)

    ok = {}
    for p, q in zip(work_t.points, ref_t.points):
        tol = cfg.tolerance(p.value)
        ok[p.eps] = p.real_flag and abs(p.value - q.value) <= 10.0 * tol
    zero = grid.index(0.0)
    lo = hi = zero
    while hi + 1 < len(grid) and ok[grid[hi + 1]]:
        hi += 1
    while lo - 1 >= 0 and ok[grid[lo - 1]]:
        lo -= 1
    return grid[lo], grid[hi]


# ---------------------------------------------------------------------------
# Thresholds
# ---------------------------------------------------------------------------

def _pair_status(
    cont: _Continuation, pair: Tuple[Label, Label], eps: float
) -> Tuple[bool, np.ndarray]:
    _, start = cont.anchor(list(pair))
    values = cont.walk(0.0, start, eps)
    return all(cont.cfg.is_real(v) for v in values), values


def _confirm_reference(
    ref: _Continuation, pair: Tuple[Label, Label], eps_real: float, eps_complex: float, where: str
) -> None:
    for e, expected in ((eps_real, True), (eps_complex, False)):
        if _pair_status(ref, pair, e)[0] != expected:
            raise ConvergenceError(
                f"reference truncation disagrees on pair reality {where}",
                eps=e,
                truncation=ref._trunc_text(),
            )


@log_call(level="INFO")
def locate_threshold(
    family: SpectralFamily,
    pair: Tuple[Label, Label],
    bracket: Tuple[float, float],
    tol: float,
    cfg: ScanConfig,
) -> ThresholdReport:
    """Bisect the coupling where the pair stops being real.

    ``bracket = (eps_real, eps_complex)``: the pair must be real at the
    first end and not real at the second; the ends may be in either order.
    With ``cfg.check_truncation`` the status at both ends is confirmed at
    the reference truncation before bisecting, and again at the final
    ``eps_star +/- uncertainty``.

    Raises:
        BracketError: both ends have the same status, or the real end is not real.
        ConvergenceError: the reference truncation disagrees at an end or
            at the final bracket.
    """
    cfg.validate()
    family = _with_quad_order(family, cfg)
    if not (math.isfinite(tol) and tol > 0):
        raise InvalidInputError(f"tolerance must be positive, got {tol!r}")
    eps_real, eps_complex = (float(e) for e in bracket)
    if eps_real == eps_complex:
        raise BracketError("bracket ends coincide")
    for e in (eps_real, eps_complex):
        family.validate_eps(e)
    pair = (tuple(pair[0]), tuple(pair[1]))
    size = family.normalize_size(cfg.truncation)

    cont = _Continuation(family, size, cfg)
    real_lo, v_lo = _pair_status(cont, pair, eps_real)
    real_hi, v_hi = _pair_status(cont, pair, eps_complex)
    if real_lo == real_hi:
        raise BracketError(
            f"pair is {'real' if real_lo else 'complex'} at both ends of ({eps_real}, {eps_complex})"
        )
    if not real_lo:
        raise BracketError(
            f"pair must be real at the first bracket end {eps_real} and complex at {eps_complex}"
        )

    ref: Optional[_Continuation] = None
    if cfg.check_truncation:
        ref_size = _reference_size(family, cfg, size)
        if ref_size != size:
            ref = _Continuation(family, ref_size, cfg)
            _confirm_reference(ref, pair, eps_real, eps_complex, "at bracket end")

    lo, hi = eps_real, eps_complex
    history = [(lo, float(abs(v_lo[0] - v_lo[1])))]
    max_imag = float(np.max(np.abs(v_hi.imag)))
    while 0.5 * abs(hi - lo) > tol:
        mid = 0.5 * (lo + hi)
        v_mid = cont.walk(lo, v_lo, mid)
        if all(cfg.is_real(v) for v in v_mid):
            lo, v_lo = mid, v_mid
            history.append((mid, float(abs(v_mid[0] - v_mid[1]))))
        else:
            hi = mid
            max_imag = float(np.max(np.abs(v_mid.imag)))

    if ref is not None:
        _confirm_reference(ref, pair, lo, hi, "near the threshold")

    eps_star = 0.5 * (lo + hi)
    return ThresholdReport(
        pair=pair,
        eps_star=eps_star,
        uncertainty=0.5 * abs(hi - lo),
        side=int(np.sign(eps_star)),
        min_gap=history[-1][1],
        max_imag=max_imag,
        truncation=cont.truncation,
        gap_history=history,
    )


# ---------------------------------------------------------------------------
# Truncation convergence
# ---------------------------------------------------------------------------

@log_call(level="INFO")
def truncation_convergence(
    family: SpectralFamily,
    eps: float,
    sizes: Sequence[Size],
    k: int,
    cfg: Optional[ScanConfig] = None,
) -> ConvergenceTable:
    """The *k* lowest levels at *eps* for each truncation in *sizes*."""
    cfg = (cfg or ScanConfig()).validate()
    family = _with_quad_order(family, cfg)
    family.validate_eps(eps)
    sizes = [family.normalize_size(s) for s in sizes]
    dims = [int(np.prod(family.truncation_of(s))) for s in sizes]
    if not sizes or any(b <= a for a, b in zip(dims, dims[1:])):
        raise InvalidInputError("truncation sizes must be strictly increasing")
    labels = [lb for lb, _ in family.unperturbed_levels(sizes[0])[:k]]
    if len(labels) < k:
        raise InvalidInputError(f"smallest truncation holds fewer than {k} levels")

    values: Dict[Label, List[complex]] = {lb: [] for lb in labels}
    for size in sizes:
        cont = _Continuation(family, size, cfg)
        _, start = cont.anchor(labels)
        found = cont.walk(0.0, start, eps)
        for lb, v in zip(labels, found):
            values[lb].append(complex(v))
    return ConvergenceTable(
        eps=float(eps),
        sizes=[family.truncation_of(s) for s in sizes],
        values=values,
    )
