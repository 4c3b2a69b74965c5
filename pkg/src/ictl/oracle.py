"""Reference semantics by explicit path analysis.

This module answers the same questions as the fixpoint engine but by a
different route: per-world graph searches over the transition relation
plus explicit quantification over P-up-sets.  On finite serial graphs,
simple-stem lassos suffice as witnesses and counter-witnesses for the
path quantifiers, so every search below terminates and is exact.

Verdicts for until/release path properties at a world ``w``:

* some path satisfies ``f U g``: ``w`` reaches a g-world through f-worlds;
* some path satisfies ``f R g``: staying inside g-worlds, ``w`` reaches
  either an (f and g)-world or a cycle;
* every path satisfies ``f U g``: inside the non-g region reachable from
  ``w`` there is neither a non-f world nor a cycle;
* every path satisfies ``f R g``: ``w`` is a g-world, and no walk through
  (g and not-f)-worlds from it can step into a non-g world.

The universal connectives additionally quantify over the up-set of ``w``;
``classical_*`` run the same analyses with the preorder ignored (up-set
collapsed to the world itself, implication read materially).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .model import BirelationalModel, ensure_valid, iter_bits
from .syntax import (
    And,
    Atom,
    Bottom,
    ExistsNext,
    ExistsRelease,
    ExistsUntil,
    ForallNext,
    ForallRelease,
    ForallUntil,
    Formula,
    Implies,
    Or,
    subformulas,
)

__all__ = [
    "Lasso",
    "PathLiftError",
    "lasso_is_path",
    "lasso_satisfies_until",
    "lasso_satisfies_release",
    "enumerate_lassos",
    "lift_path",
    "oracle_denotation",
    "oracle_check",
    "classical_denotation",
    "classical_check",
    "implication_worlds",
    "exists_next_worlds",
    "forall_next_worlds",
    "exists_until_worlds",
    "exists_release_worlds",
    "forall_until_worlds",
    "forall_release_worlds",
]


@dataclass(frozen=True)
class Lasso:
    """Finite form ``prefix . cycle^omega`` of an infinite path."""

    prefix: tuple[int, ...]
    cycle: tuple[int, ...]

    def states(self) -> tuple[int, ...]:
        return self.prefix + self.cycle

    def render(self, m: BirelationalModel) -> str:
        pre = " ".join(m.worlds[i] for i in self.prefix)
        cyc = " ".join(m.worlds[i] for i in self.cycle)
        return f"{pre} ({cyc})*".strip()


class PathLiftError(ValueError):
    """Lifting failed, which on a closed frame means C2 is violated."""


def lasso_is_path(m: BirelationalModel, lasso: Lasso) -> bool:
    """All consecutive hops, the seam, and the cycle wrap must be R-edges."""
    if not lasso.cycle:
        return False
    seq = lasso.states()
    if any(i >= m.n for i in seq):
        return False
    for a, b in zip(seq, seq[1:]):
        if not (m.succ[a] >> b & 1):
            return False
    return bool(m.succ[seq[-1]] >> lasso.cycle[0] & 1)


def lasso_satisfies_until(m: BirelationalModel, lasso: Lasso, a: int, b: int) -> bool:
    for x in lasso.states():
        if b >> x & 1:
            return True
        if not (a >> x & 1):
            return False
    return False  # loops forever without reaching b


def lasso_satisfies_release(m: BirelationalModel, lasso: Lasso, a: int, b: int) -> bool:
    for x in lasso.states():
        if not (b >> x & 1):
            return False
        if a >> x & 1:
            return True
    return True  # b holds forever around the cycle


def enumerate_lassos(m: BirelationalModel, start: str) -> Iterator[Lasso]:
    """Every lasso from ``start`` whose stem-plus-cycle repeats no world.

    Each distinct ultimately-periodic path has exactly one such
    representation, so the stream is finite and duplicate-free; seriality
    guarantees it is nonempty.
    """
    s = m.world_index(start)
    stack = [s]
    on_stack = {s: 0}

    def explore() -> Iterator[Lasso]:
        x = stack[-1]
        for y in iter_bits(m.succ[x]):
            if y in on_stack:
                k = on_stack[y]
                yield Lasso(tuple(stack[:k]), tuple(stack[k:]))
            else:
                on_stack[y] = len(stack)
                stack.append(y)
                yield from explore()
                stack.pop()
                del on_stack[y]

    yield from explore()


def lift_path(m: BirelationalModel, w_prime: str, prefix: list[str]) -> list[str]:
    """Lift an R-path prefix to one starting at a P-greater world.

    Given ``w P w_prime`` and an R-path ``prefix`` from ``w``, returns a
    path of equal length from ``w_prime`` whose i-th world is P-above
    ``prefix[i]``, choosing the lowest-index candidate at each step.  C2
    guarantees a candidate exists; :class:`PathLiftError` therefore
    signals an invalid frame.
    """
    if not prefix:
        raise ValueError("prefix must be nonempty")
    rho = [m.world_index(x) for x in prefix]
    wp = m.world_index(w_prime)
    if not (m.up[rho[0]] >> wp & 1):
        raise ValueError(f"{prefix[0]!r} P {w_prime!r} does not hold")
    for a, b in zip(rho, rho[1:]):
        if not (m.succ[a] >> b & 1):
            raise ValueError(f"prefix is not an R-path at {m.worlds[a]!r} -> {m.worlds[b]!r}")
    tau = [wp]
    for i in range(1, len(rho)):
        candidates = m.succ[tau[-1]] & m.up[rho[i]]
        if not candidates:
            raise PathLiftError(
                f"cannot lift step {i}: no R-successor of {m.worlds[tau[-1]]!r} "
                f"P-above {m.worlds[rho[i]]!r} (C2 violated)"
            )
        tau.append((candidates & -candidates).bit_length() - 1)
    return [m.worlds[i] for i in tau]


# ---------------------------------------------------------------------------
# Graph searches

def _reach(m: BirelationalModel, start: int, region: int) -> int:
    """Worlds reachable from ``start`` by R-steps staying inside ``region``."""
    if not (region >> start & 1):
        return 0
    seen = 1 << start
    frontier = [start]
    while frontier:
        nxt = []
        for x in frontier:
            fresh = m.succ[x] & region & ~seen
            seen |= fresh
            nxt.extend(iter_bits(fresh))
        frontier = nxt
    return seen


def _has_cycle(m: BirelationalModel, mask: int) -> bool:
    """Does the subgraph induced on ``mask`` contain a cycle?"""
    color: dict[int, int] = {}  # 1 = on current DFS stack, 2 = done
    for s in iter_bits(mask):
        if s in color:
            continue
        color[s] = 1
        stack = [(s, iter_bits(m.succ[s] & mask))]
        while stack:
            node, it = stack[-1]
            y = next(it, -1)
            if y < 0:
                color[node] = 2
                stack.pop()
            elif color.get(y, 0) == 1:
                return True
            elif y not in color:
                color[y] = 1
                stack.append((y, iter_bits(m.succ[y] & mask)))
    return False


def _some_path_until(m: BirelationalModel, w: int, a: int, b: int) -> bool:
    if b >> w & 1:
        return True
    reach = _reach(m, w, a & ~b)
    for x in iter_bits(reach):
        if m.succ[x] & b:
            return True
    return False


def _some_path_release(m: BirelationalModel, w: int, a: int, b: int) -> bool:
    if not (b >> w & 1):
        return False
    reach = _reach(m, w, b)
    if reach & a:
        return True
    return _has_cycle(m, reach)


def _all_paths_until(m: BirelationalModel, w: int, a: int, b: int) -> bool:
    if b >> w & 1:
        return True
    reach = _reach(m, w, m.full & ~b)
    if reach & ~a:
        return False
    return not _has_cycle(m, reach)


def _all_paths_release(m: BirelationalModel, w: int, a: int, b: int) -> bool:
    if not (b >> w & 1):
        return False
    reach = _reach(m, w, b & ~a)
    for x in iter_bits(reach):
        if m.succ[x] & ~b & m.full:
            return False
    return True


# ---------------------------------------------------------------------------
# Per-operator world sets

def implication_worlds(m: BirelationalModel, a: int, b: int) -> int:
    out = 0
    for w in range(m.n):
        if not (m.up[w] & a & ~b):
            out |= 1 << w
    return out


def exists_next_worlds(m: BirelationalModel, a: int) -> int:
    out = 0
    for w in range(m.n):
        if m.succ[w] & a:
            out |= 1 << w
    return out


def forall_next_worlds(m: BirelationalModel, a: int) -> int:
    safe = 0
    for x in range(m.n):
        if not (m.succ[x] & ~a & m.full):
            safe |= 1 << x
    out = 0
    for w in range(m.n):
        if not (m.up[w] & ~safe):
            out |= 1 << w
    return out


def exists_until_worlds(m: BirelationalModel, a: int, b: int) -> int:
    out = 0
    for w in range(m.n):
        if _some_path_until(m, w, a, b):
            out |= 1 << w
    return out


def exists_release_worlds(m: BirelationalModel, a: int, b: int) -> int:
    out = 0
    for w in range(m.n):
        if _some_path_release(m, w, a, b):
            out |= 1 << w
    return out


def forall_until_worlds(m: BirelationalModel, a: int, b: int) -> int:
    ok = 0
    for x in range(m.n):
        if _all_paths_until(m, x, a, b):
            ok |= 1 << x
    out = 0
    for w in range(m.n):
        if not (m.up[w] & ~ok):
            out |= 1 << w
    return out


def forall_release_worlds(m: BirelationalModel, a: int, b: int) -> int:
    ok = 0
    for x in range(m.n):
        if _all_paths_release(m, x, a, b):
            ok |= 1 << x
    out = 0
    for w in range(m.n):
        if not (m.up[w] & ~ok):
            out |= 1 << w
    return out


# ---------------------------------------------------------------------------
# Evaluators

def oracle_denotation(
    m: BirelationalModel, f: Formula, *, validate: bool = True
) -> dict[Formula, int]:
    """Verdict bitmask per subformula, memoized bottom-up."""
    if validate:
        ensure_valid(m)
    sets: dict[Formula, int] = {}
    for g in subformulas(f):
        match g:
            case Atom(name):
                v = m.atom_mask(name)
            case Bottom():
                v = 0
            case And(l, r):
                v = sets[l] & sets[r]
            case Or(l, r):
                v = sets[l] | sets[r]
            case Implies(l, r):
                v = implication_worlds(m, sets[l], sets[r])
            case ExistsNext(s):
                v = exists_next_worlds(m, sets[s])
            case ForallNext(s):
                v = forall_next_worlds(m, sets[s])
            case ExistsUntil(l, r):
                v = exists_until_worlds(m, sets[l], sets[r])
            case ExistsRelease(l, r):
                v = exists_release_worlds(m, sets[l], sets[r])
            case ForallUntil(l, r):
                v = forall_until_worlds(m, sets[l], sets[r])
            case ForallRelease(l, r):
                v = forall_release_worlds(m, sets[l], sets[r])
            case _:
                raise TypeError(f"not a formula: {g!r}")
        sets[g] = v
    return sets


def oracle_check(
    m: BirelationalModel, world: str, f: Formula, *, validate: bool = True
) -> bool:
    w = m.world_index(world)
    return bool(oracle_denotation(m, f, validate=validate)[f] >> w & 1)


def classical_denotation(m: BirelationalModel, f: Formula) -> dict[Formula, int]:
    """Plain CTL semantics over R alone: the preorder is read as equality,
    so implication is material and universal operators quantify only over
    paths from the world itself."""
    sets: dict[Formula, int] = {}
    for g in subformulas(f):
        match g:
            case Atom(name):
                v = m.atom_mask(name)
            case Bottom():
                v = 0
            case And(l, r):
                v = sets[l] & sets[r]
            case Or(l, r):
                v = sets[l] | sets[r]
            case Implies(l, r):
                v = (m.full & ~sets[l]) | sets[r]
            case ExistsNext(s):
                v = exists_next_worlds(m, sets[s])
            case ForallNext(s):
                a = sets[s]
                v = 0
                for w in range(m.n):
                    if not (m.succ[w] & ~a & m.full):
                        v |= 1 << w
            case ExistsUntil(l, r):
                v = exists_until_worlds(m, sets[l], sets[r])
            case ExistsRelease(l, r):
                v = exists_release_worlds(m, sets[l], sets[r])
            case ForallUntil(l, r):
                v = 0
                for w in range(m.n):
                    if _all_paths_until(m, w, sets[l], sets[r]):
                        v |= 1 << w
            case ForallRelease(l, r):
                v = 0
                for w in range(m.n):
                    if _all_paths_release(m, w, sets[l], sets[r]):
                        v |= 1 << w
            case _:
                raise TypeError(f"not a formula: {g!r}")
        sets[g] = v
    return sets


def classical_check(m: BirelationalModel, world: str, f: Formula) -> bool:
    """Standard CTL verdict over the transition graph, ignoring the preorder."""
    w = m.world_index(world)
    return bool(classical_denotation(m, f)[f] >> w & 1)
