"""Model generators and bounded countermodel search.

Three ways to produce valid models:

* :func:`enumerate_models` streams every valid model up to a size bound,
  in a fixed deterministic order (preorder, then transition relation,
  then valuation);
* :func:`random_model` samples one: random DAG closed to a preorder,
  serial transitions at a target density, rejection plus edge-adding
  repair for the commutation conditions, valuation sampled upward-closed;
* :func:`product_frame` builds one correct by construction from a stage
  poset and an ordinary serial transition graph.

:func:`find_countermodel` scans the exhaustive stream (then random
samples, if given a budget) for a model and world refuting a formula,
double-checking any hit against the path oracle before returning it.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from typing import Iterable, Iterator, Sequence

from .checker import denote
from .model import BirelationalModel, _close_masks, iter_bits
from .oracle import oracle_check
from .syntax import (
    And,
    Atom,
    BOTTOM,
    ExistsNext,
    ExistsRelease,
    ExistsUntil,
    ForallNext,
    ForallRelease,
    ForallUntil,
    Formula,
    Implies,
    Or,
    atoms_of,
)

__all__ = [
    "GenParams",
    "GenerationError",
    "EngineDisagreementError",
    "SearchResult",
    "atom_names",
    "enumerate_preorders",
    "upward_closed_masks",
    "frame_conditions_hold",
    "enumerate_frames",
    "enumerate_models",
    "random_model",
    "product_frame",
    "find_countermodel",
    "random_formula",
    "enumerate_formulas",
]

_ATOM_POOL = "pqrstuvabcdefgh"


class GenerationError(RuntimeError):
    """Random generation failed within the attempt budget."""


class EngineDisagreementError(AssertionError):
    """Fixpoint engine and path oracle returned different verdicts."""


@dataclass(frozen=True)
class GenParams:
    n_worlds: int
    n_atoms: int
    seed: int = 0
    max_attempts: int = 32
    edge_density: float = 0.3

    def __post_init__(self):
        if self.n_worlds < 1:
            raise ValueError("n_worlds must be >= 1")
        if self.n_atoms < 0:
            raise ValueError("n_atoms must be >= 0")
        if not 0.0 <= self.edge_density <= 1.0:
            raise ValueError("edge_density must be in [0, 1]")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")


def atom_names(a: int) -> list[str]:
    if a <= len(_ATOM_POOL):
        return list(_ATOM_POOL[:a])
    return list(_ATOM_POOL) + [f"p{i}" for i in range(a - len(_ATOM_POOL))]


# ---------------------------------------------------------------------------
# Exhaustive enumeration

@lru_cache(maxsize=None)
def enumerate_preorders(n: int) -> tuple[tuple[int, ...], ...]:
    """All reflexive-transitive relations on ``range(n)`` as up-mask tuples."""
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    out = []
    for bits in range(1 << len(pairs)):
        up = [1 << i for i in range(n)]
        for k, (i, j) in enumerate(pairs):
            if bits >> k & 1:
                up[i] |= 1 << j
        if all(_closed_under(up, i) for i in range(n)):
            out.append(tuple(up))
    return tuple(out)


def _closed_under(up: list[int], i: int) -> bool:
    acc = up[i]
    for j in iter_bits(up[i]):
        acc |= up[j]
    return acc == up[i]


def upward_closed_masks(up: Sequence[int]) -> list[int]:
    """All P-upward-closed world sets of a closed preorder."""
    n = len(up)
    out = []
    for mask in range(1 << n):
        if all(not (up[i] & ~mask) for i in iter_bits(mask)):
            out.append(mask)
    return out


def frame_conditions_hold(up: Sequence[int], succ: Sequence[int]) -> bool:
    """C1 and C2 for a closed preorder and serial transition masks."""
    n = len(up)
    pred = [0] * n
    for u in range(n):
        for j in iter_bits(succ[u]):
            pred[j] |= 1 << u
    for x in range(n):
        ux = up[x]
        for y in iter_bits(succ[x]):
            uy = up[y]
            for z in iter_bits(uy):
                if not (ux & pred[z]):
                    return False  # C1
            for z in iter_bits(ux):
                if not (succ[z] & uy):
                    return False  # C2
    return True


def enumerate_frames(n: int) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All (preorder, serial transitions) pairs satisfying C1 and C2."""
    full = (1 << n) - 1
    succ_choices = range(1, full + 1)
    for up in enumerate_preorders(n):
        for succ in product(succ_choices, repeat=n):
            if frame_conditions_hold(up, succ):
                yield up, succ


def enumerate_models(n: int, a: int) -> Iterator[BirelationalModel]:
    """Every valid model with ``n`` worlds and ``a`` atoms, deterministically.

    Worlds are named ``w0 .. w{n-1}``; atoms come from :func:`atom_names`.
    """
    worlds = tuple(f"w{i}" for i in range(n))
    names = atom_names(a)
    for up, succ in enumerate_frames(n):
        up_masks = upward_closed_masks(up)
        for assignment in product(up_masks, repeat=a):
            val = dict(zip(names, assignment))
            yield BirelationalModel(worlds, up, succ, val)


# ---------------------------------------------------------------------------
# Random generation

def _find_violation(up: Sequence[int], succ: Sequence[int]) -> tuple[str, int, int, int] | None:
    n = len(up)
    pred = [0] * n
    for u in range(n):
        for j in iter_bits(succ[u]):
            pred[j] |= 1 << u
    for x in range(n):
        for y in iter_bits(succ[x]):
            for z in iter_bits(up[y]):
                if not (up[x] & pred[z]):
                    return ("C1", x, y, z)
            for z in iter_bits(up[x]):
                if not (succ[z] & up[y]):
                    return ("C2", x, y, z)
    return None


def _repair_transitions(up: Sequence[int], succ: list[int]) -> list[int]:
    # Adding R-edges only: for a C2 breach (x,y,z) add z->y (y P y discharges
    # it); for a C1 breach add x->z (x P x).  Each addition may create new
    # obligations, but the complete relation satisfies both conditions, so
    # the loop terminates.
    while True:
        v = _find_violation(up, succ)
        if v is None:
            return succ
        kind, x, y, z = v
        if kind == "C2":
            succ[z] |= 1 << y
        else:
            succ[x] |= 1 << z


def random_model(params: GenParams) -> BirelationalModel:
    """Sample a valid model; identical params (and seed) give identical output."""
    rng = random.Random(params.seed)
    n = params.n_worlds
    worlds = tuple(f"w{i}" for i in range(n))
    names = atom_names(params.n_atoms)
    last: tuple[list[int], list[int]] | None = None
    up: list[int] = []
    succ: list[int] = []
    ok = False
    for _ in range(params.max_attempts):
        order = list(range(n))
        rng.shuffle(order)
        edges = [
            (order[i], order[j])
            for i in range(n)
            for j in range(i + 1, n)
            if rng.random() < params.edge_density
        ]
        up = _close_masks(n, edges)
        succ = []
        for _i in range(n):
            mask = 0
            for j in range(n):
                if rng.random() < params.edge_density:
                    mask |= 1 << j
            if not mask:
                mask = 1 << rng.randrange(n)
            succ.append(mask)
        last = (up, succ)
        if frame_conditions_hold(up, succ):
            ok = True
            break
    if not ok:
        if last is None:
            raise GenerationError("no attempts made")
        up, succ = last
        succ = _repair_transitions(up, list(succ))
        if not frame_conditions_hold(up, succ):
            raise GenerationError(
                f"repair failed after {params.max_attempts} attempts"
            )
    val: dict[str, int] = {}
    for atom in names:
        base = 0
        for i in range(n):
            if rng.random() < 0.5:
                base |= 1 << i
        closed = 0
        for i in iter_bits(base):
            closed |= up[i]
        val[atom] = closed
    return BirelationalModel(worlds, tuple(up), tuple(succ), val)


# ---------------------------------------------------------------------------
# Product construction

def product_frame(
    stages: Sequence[str],
    stage_order: Iterable[tuple[str, str]],
    states: Sequence[str],
    state_transitions: Iterable[tuple[str, str]],
    valuation: dict[tuple[str, str], Iterable[str]],
) -> BirelationalModel:
    """Product of a stage poset with a serial transition graph.

    Worlds are pairs ``{stage}.{state}``; (k, s) P (k', s') iff k <= k'
    and s = s'; (k, s) R (k', s') iff k = k' and s -> s'.  Both
    commutation conditions hold by construction.  The valuation must be
    monotone along the stage order for each fixed state.
    """
    k_index = {k: i for i, k in enumerate(stages)}
    s_index = {s: i for i, s in enumerate(states)}
    nk, ns = len(stages), len(states)
    k_up = _close_masks(nk, [(k_index[a], k_index[b]) for a, b in stage_order])
    s_succ = [0] * ns
    for a, b in state_transitions:
        s_succ[s_index[a]] |= 1 << s_index[b]
    for s in states:
        if not s_succ[s_index[s]]:
            raise ValueError(f"state {s!r} has no transition; the graph must be serial")

    atoms_at: dict[tuple[int, int], set[str]] = {}
    for (k, s), atoms in valuation.items():
        atoms_at[(k_index[k], s_index[s])] = set(atoms)
    for ki in range(nk):
        for kj in iter_bits(k_up[ki]):
            for si in range(ns):
                lower = atoms_at.get((ki, si), set())
                upper = atoms_at.get((kj, si), set())
                if not lower <= upper:
                    raise ValueError(
                        f"valuation not monotone: {sorted(lower - upper)} true at "
                        f"({stages[ki]}, {states[si]}) but not at ({stages[kj]}, {states[si]})"
                    )

    def widx(ki: int, si: int) -> int:
        return ki * ns + si

    worlds = tuple(f"{k}.{s}" for k in stages for s in states)
    up = [0] * (nk * ns)
    succ = [0] * (nk * ns)
    val: dict[str, int] = {}
    for ki in range(nk):
        for si in range(ns):
            w = widx(ki, si)
            for kj in iter_bits(k_up[ki]):
                up[w] |= 1 << widx(kj, si)
            for sj in iter_bits(s_succ[si]):
                succ[w] |= 1 << widx(ki, sj)
            for atom in atoms_at.get((ki, si), ()):
                val[atom] = val.get(atom, 0) | (1 << w)
    return BirelationalModel(worlds, tuple(up), tuple(succ), val)


# ---------------------------------------------------------------------------
# Countermodel search

@dataclass
class SearchResult:
    outcome: str  # "countermodel" | "exhausted" | "budget_exceeded"
    model: BirelationalModel | None = None
    world: str | None = None
    models_checked: int = 0
    bounds: dict = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.outcome == "countermodel"


def _search_atoms(f: Formula, a: int) -> list[str]:
    names = sorted(atoms_of(f))
    for extra in _ATOM_POOL:
        if len(names) >= a:
            break
        if extra not in names:
            names.append(extra)
    return names


def find_countermodel(
    f: Formula,
    max_worlds: int = 3,
    atoms: int = 2,
    budget: int = 0,
    seed: int = 0,
) -> SearchResult:
    """Search for a model and world where ``f`` fails.

    Scans every valid model up to ``max_worlds`` worlds (complete, so the
    ``exhausted`` outcome is a proof of validity within the bounds), then
    up to ``budget`` random models of larger sizes.  Hits are verified
    with the path oracle; a verdict mismatch raises
    :class:`EngineDisagreementError` rather than returning a bogus model.
    """
    names = _search_atoms(f, atoms)
    bounds = {"max_worlds": max_worlds, "atoms": names, "budget": budget, "seed": seed}
    checked = 0
    for n in range(1, max_worlds + 1):
        for m in enumerate_models(n, len(names)):
            checked += 1
            hit = _refuting_world(m, f)
            if hit is not None:
                return SearchResult("countermodel", m, hit, checked, bounds)
    if budget <= 0:
        return SearchResult("exhausted", None, None, checked, bounds)
    rng = random.Random(seed)
    for k in range(budget):
        n = max_worlds + 1 + k % 3
        params = GenParams(
            n_worlds=n, n_atoms=len(names), seed=rng.getrandbits(63), edge_density=0.3
        )
        m = random_model(params)
        m = BirelationalModel(m.worlds, m.up, m.succ, dict(zip(names, (m.val[a] for a in m.atoms))))
        checked += 1
        hit = _refuting_world(m, f)
        if hit is not None:
            return SearchResult("countermodel", m, hit, checked, bounds)
    return SearchResult("budget_exceeded", None, None, checked, bounds)


def _refuting_world(m: BirelationalModel, f: Formula) -> str | None:
    mask = denote(m, f, validate=False)[f]
    if mask == m.full:
        return None
    world = m.worlds[next(iter_bits(m.full & ~mask))]
    if oracle_check(m, world, f, validate=False):
        raise EngineDisagreementError(
            f"engine refutes {f} at {world} of {m!r} but the oracle satisfies it"
        )
    return world


# ---------------------------------------------------------------------------
# Formula generation

_UNARY_OPS = (ExistsNext, ForallNext)
_BINARY_OPS = (And, Or, Implies, ExistsUntil, ExistsRelease, ForallUntil, ForallRelease)


def random_formula(
    rng: random.Random,
    max_height: int,
    atoms: Sequence[str],
    allow_bottom: bool = True,
) -> Formula:
    """Random AST of height at most ``max_height`` (a lone leaf has height 1)."""
    leaves: list[Formula] = [Atom(a) for a in atoms]
    if allow_bottom:
        leaves.append(BOTTOM)

    def go(h: int) -> Formula:
        if h <= 1 or rng.random() < 0.25:
            return rng.choice(leaves)
        op = rng.choice(_UNARY_OPS + _BINARY_OPS)
        if op in _UNARY_OPS:
            return op(go(h - 1))
        return op(go(h - 1), go(h - 1))

    return go(max_height)


def enumerate_formulas(
    max_height: int, atoms: Sequence[str], include_bottom: bool = False
) -> list[Formula]:
    """All distinct formulas up to ``max_height``, children before parents."""
    leaves: list[Formula] = [Atom(a) for a in atoms]
    if include_bottom:
        leaves.append(BOTTOM)
    cumulative: list[Formula] = list(leaves)
    exact: list[Formula] = list(leaves)
    for _h in range(2, max_height + 1):
        prev_cumulative = list(cumulative)
        new: list[Formula] = []
        for op in _UNARY_OPS:
            new.extend(op(f) for f in exact)
        for op in _BINARY_OPS:
            new.extend(op(l, r) for l in exact for r in prev_cumulative)
            older = prev_cumulative[: len(prev_cumulative) - len(exact)]
            new.extend(op(l, r) for l in older for r in exact)
        cumulative.extend(new)
        exact = new
    return cumulative
