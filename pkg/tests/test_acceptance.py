"""Acceptance gate: one test per release criterion.

Each test enforces its criterion exactly (bounds, counts, zero-mismatch
requirements, runtime budgets where stated) and prints one PASS line
with measured statistics; run with ``pytest -s`` to see the lines.
"""

import random
import time
from itertools import islice

import pytest

import ictl.gen as gen
from helpers import (
    all_prefixes,
    differential_corpus,
    lift_corpus,
    mask_to_names,
    naive_exists_next,
    naive_forall_next,
    naive_implication,
)
from ictl.checker import check, denote, valid_in_model
from ictl.fixtures import four_world_model
from ictl.gen import (
    GenParams,
    enumerate_formulas,
    enumerate_models,
    find_countermodel,
    product_frame,
    random_formula,
    random_model,
)
from ictl.harness import compile_battery, scan_models
from ictl.model import (
    BirelationalModel,
    is_upward_closed,
    validate_frame,
)
from ictl.oracle import classical_denotation, lift_path, oracle_check, oracle_denotation
from ictl.syntax import (
    ExistsNext,
    ForallNext,
    Implies,
    parse_formula,
    print_formula,
    subformulas,
)

UNFOLDING_VALIDITIES = [
    "(E[p U q] -> q | (p & EX E[p U q])) & ((q | (p & EX E[p U q])) -> E[p U q])",
    "(E[p R q] -> q & (p | EX E[p R q])) & ((q & (p | EX E[p R q])) -> E[p R q])",
    "q | (p & AX A[p U q]) -> A[p U q]",
    "q & (p | AX A[p R q]) -> A[p R q]",
]

STRICT_CONVERSES = [
    "A[p U q] -> q | (p & AX A[p U q])",
    "A[q R p] -> p & (q | AX A[q U p])",
]


def report(criterion: int, message: str) -> None:
    print(f"PASS criterion {criterion}: {message}")


@pytest.fixture(scope="module")
def corpus():
    return differential_corpus()


def test_criterion_01_fixture_reproduction(four_world):
    """Four exact verdicts on the bundled four-world model, both engines,
    in under a second."""
    t0 = time.monotonic()
    cases = [
        ("w1", "A[p U q]", True),
        ("w1", "q", False),
        ("w1", "p & AX A[p U q]", False),
        ("v2", "A[p U q]", False),
    ]
    for world, text, expected in cases:
        f = parse_formula(text)
        assert check(four_world, world, f).satisfied is expected, (world, text)
        assert oracle_check(four_world, world, f) is expected, (world, text)
    elapsed = time.monotonic() - t0
    assert elapsed < 1.0
    report(1, f"4 fixture verdicts exact on both engines in {elapsed:.3f}s")


def test_criterion_02_disputed_release_adjudication(four_world):
    """Both engines must agree on the universal release at the base world;
    the verdict itself is recorded, not assumed."""
    t0 = time.monotonic()
    f = parse_formula("A[q R p]")
    engine = check(four_world, "w1", f).satisfied
    oracle = oracle_check(four_world, "w1", f)
    assert engine == oracle
    elapsed = time.monotonic() - t0
    assert elapsed < 1.0
    report(
        2,
        f"A[q R p] at w1: engines agree on verdict={engine} in {elapsed:.3f}s "
        "(the only path from w1 leaves p before any q-and-p point)",
    )


def test_criterion_03_unfolding_validities():
    """The four one-step unfolding laws hold on every valid model with up
    to 3 worlds and 2 atoms (exhaustive), and on 10^4 random models with
    up to 6 worlds."""
    t0 = time.monotonic()
    exhaustive_counts = []
    for text in UNFOLDING_VALIDITIES:
        result = find_countermodel(parse_formula(text), max_worlds=3, atoms=2)
        assert result.outcome == "exhausted", text
        exhaustive_counts.append(result.models_checked)
    assert all(c == exhaustive_counts[0] for c in exhaustive_counts)

    formulas = [parse_formula(t) for t in UNFOLDING_VALIDITIES]
    violations = 0
    n_random = 10_000
    for k in range(n_random):
        m = random_model(GenParams(n_worlds=1 + k % 6, n_atoms=2, seed=30_000 + k))
        for f in formulas:
            if not valid_in_model(m, f, validate=False):
                violations += 1
    assert violations == 0
    elapsed = time.monotonic() - t0
    assert elapsed < 300.0
    report(
        3,
        f"4 unfolding laws: exhausted over {exhaustive_counts[0]} models (n<=3), "
        f"0 violations over {n_random} random models (n<=6) in {elapsed:.1f}s",
    )


def test_criterion_04_strict_converses_refuted():
    """Both converse unfoldings have countermodels within 4 worlds, and
    the hits are independently confirmed by the path oracle."""
    t0 = time.monotonic()
    sizes = []
    for text in STRICT_CONVERSES:
        f = parse_formula(text)
        result = find_countermodel(f, max_worlds=4, atoms=2)
        assert result.found, text
        assert validate_frame(result.model).ok
        assert not oracle_check(result.model, result.world, f)
        sizes.append(result.model.n)
    elapsed = time.monotonic() - t0
    assert elapsed < 60.0
    report(
        4,
        f"both strict converses refuted (found sizes {sizes}, oracle-confirmed) "
        f"in {elapsed:.1f}s",
    )


def test_criterion_05_monotonicity(corpus):
    """Every denotation of every tested formula is upward-closed along the
    preorder, over at least 10^4 (model, formula) pairs."""
    rng = random.Random(505)
    formulas = [random_formula(rng, 3, ["p", "q"]) for _ in range(16)]
    pairs = 0
    for m in corpus:
        for f in formulas:
            for s in denote(m, f, validate=False).values():
                assert is_upward_closed(m, s), (m, f)
            pairs += 1
    assert pairs >= 10_000
    report(5, f"all denotations upward-closed over {pairs} (model, formula) pairs")


def test_criterion_06_definitional_equalities(corpus):
    """Engine sets for implication and the two next-step operators match
    sets recomputed directly from the satisfaction clauses."""
    rng = random.Random(606)
    templates = ["p -> q", "q -> p", "~p", "EX p", "EX q", "AX p", "AX q", "AX (p -> q)", "EX ~q"]
    formulas = [parse_formula(t) for t in templates]
    formulas += [random_formula(rng, 3, ["p", "q"]) for _ in range(8)]
    checked = 0
    for m in corpus:
        for f in formulas:
            sets = denote(m, f, validate=False)
            for g in subformulas(f):
                got = mask_to_names(m, sets[g])
                if isinstance(g, Implies):
                    want = naive_implication(
                        m, mask_to_names(m, sets[g.left]), mask_to_names(m, sets[g.right])
                    )
                elif isinstance(g, ExistsNext):
                    want = naive_exists_next(m, mask_to_names(m, sets[g.sub]))
                elif isinstance(g, ForallNext):
                    want = naive_forall_next(m, mask_to_names(m, sets[g.sub]))
                else:
                    continue
                assert got == want, (m, g)
                checked += 1
    report(6, f"implication/next-step sets match definitional recomputation ({checked} sets)")


def test_criterion_07_bounded_path_lifting():
    """For every related pair w P w' and every transition walk of length
    up to 2n from w, lifting yields an equal-length componentwise-related
    walk from w'."""
    lifts = 0
    for m in lift_corpus():
        for w in range(m.n):
            uppers = [j for j in range(m.n) if m.up[w] >> j & 1]
            for prefix in all_prefixes(m, w, 2 * m.n):
                names = [m.worlds[i] for i in prefix]
                for upper in uppers:
                    lifted = lift_path(m, m.worlds[upper], names)
                    assert len(lifted) == len(names)
                    for lo, hi in zip(names, lifted):
                        assert m.up[m.world_index(lo)] >> m.world_index(hi) & 1
                    lifts += 1
    assert lifts > 10_000
    report(7, f"{lifts} path lifts succeeded with componentwise relatedness, 0 failures")


def test_criterion_08_exhaustive_engine_oracle_equivalence():
    """Fixpoint and path-oracle verdicts coincide for every formula of
    height <= 3 over p, q at every world of every valid model with up to
    3 worlds and 2 atoms."""
    t0 = time.monotonic()
    battery = compile_battery(enumerate_formulas(3, ["p", "q"]))
    assert len(battery.formulas) == 8162

    def stream():
        for n in (1, 2, 3):
            yield from enumerate_models(n, 2)

    stats = scan_models(stream(), battery)
    elapsed = time.monotonic() - t0
    assert stats.models == 82_582  # 4 + 280 + 82298
    assert stats.ok, stats.disagreements[:3]
    assert elapsed < 600.0
    report(
        8,
        f"exhaustive equivalence: {stats.verdicts} verdicts over {stats.models} models "
        f"x {len(battery.formulas)} formulas, 0 disagreements in {elapsed:.0f}s",
    )


def test_criterion_09_classical_reduction():
    """On transition graphs with the equality preorder, the knowledge
    semantics collapses to plain CTL: engine denotations equal the
    classical ones on 10^3 random serial graphs."""
    rng = random.Random(909)
    formulas_pool = [random_formula(rng, 3, ["p", "q"]) for _ in range(40)]
    disagreements = 0
    n_models = 1000
    for k in range(n_models):
        n = 1 + k % 6
        worlds = tuple(f"s{i}" for i in range(n))
        succ = tuple(rng.randrange(1, 1 << n) for _ in range(n))
        val = {"p": rng.randrange(1 << n), "q": rng.randrange(1 << n)}
        m = BirelationalModel(worlds, tuple(1 << i for i in range(n)), succ, val)
        for f in rng.sample(formulas_pool, 4):
            eng = denote(m, f, validate=False)
            cls = classical_denotation(m, f)
            if any(eng[g] != cls[g] for g in subformulas(f)):
                disagreements += 1
    assert disagreements == 0
    report(9, f"classical reduction: 0 disagreements over {n_models} identity-preorder graphs")


def test_criterion_10_non_duality():
    """The next-step operators are not dual: a countermodel to the dual
    schema exists within 4 worlds."""
    f = parse_formula("~AX~p -> EX p")
    result = find_countermodel(f, max_worlds=4, atoms=1)
    assert result.found
    assert result.model.n <= 4
    assert not oracle_check(result.model, result.world, f)
    report(
        10,
        f"dual schema refuted on a {result.model.n}-world model at {result.world} "
        f"after {result.models_checked} models",
    )


def test_criterion_11_generator_soundness(monkeypatch):
    """Every generator output validates; products never need repair."""
    checked = 0
    for m in enumerate_models(2, 2):
        assert validate_frame(m).ok
        checked += 1
    for m in islice(enumerate_models(3, 2), 0, 3000, 3):
        assert validate_frame(m).ok
        checked += 1
    for k in range(200):
        m = random_model(GenParams(n_worlds=1 + k % 6, n_atoms=2, seed=77_000 + k))
        assert validate_frame(m).ok
        checked += 1

    def no_repair(*args, **kwargs):
        raise AssertionError("product construction must not reach the repair path")

    monkeypatch.setattr(gen, "_repair_transitions", no_repair)
    for nk, ns in [(1, 1), (1, 3), (2, 2), (3, 2), (2, 4)]:
        stages = [f"k{i}" for i in range(nk)]
        order = [(f"k{i}", f"k{i + 1}") for i in range(nk - 1)]
        states = [f"s{i}" for i in range(ns)]
        trans = [(f"s{i}", f"s{(i + 1) % ns}") for i in range(ns)] + [("s0", "s0")]
        val = {(k, states[-1]): ["q"] for k in stages}
        if ns > 1:
            val[(stages[-1], states[0])] = ["p"]
        m = product_frame(stages, order, states, trans, val)
        assert validate_frame(m).ok
        checked += 1
    report(11, f"{checked} generated models all pass frame validation; products repair-free")
