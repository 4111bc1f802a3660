import random

import pytest
from hypothesis import given, settings

from delearn.catalog import coin_model, coin_toss
from delearn.epistemic import (
    EpistemicModel,
    EvaluationError,
    Event,
    EventModel,
    Post,
    canonicalize,
    eval_formula,
    eval_global,
    identity_event_model,
    models_bisimilar,
    product_update,
    raw_product,
)
from delearn.formula import (
    And,
    Atom,
    Bot,
    DynAction,
    DynEvent,
    Iff,
    Implies,
    Know,
    KnowWhether,
    Neg,
    Or,
    Top,
    parse_formula,
)
from helpers import random_event_model, random_formula, random_model, seeds

P3 = ["p", "q", "r"]


def truth_table(f, v):
    """Propositional oracle written against Python's own connectives."""
    if isinstance(f, Atom):
        return f.name in v
    if isinstance(f, Top):
        return True
    if isinstance(f, Bot):
        return False
    if isinstance(f, Neg):
        return not truth_table(f.sub, v)
    a, b = truth_table(f.left, v), truth_table(f.right, v)
    return {And: a and b, Or: a or b, Implies: (not a) or b, Iff: a is b}[type(f)]


def components_by_closure(worlds, val, related):
    """Oracle for component valuation sets from an explicit relation."""
    parent = {w: w for w in worlds}

    def find(w):
        while parent[w] != w:
            w = parent[w]
        return w

    for u, v in related:
        parent[find(u)] = find(v)
    groups = {}
    for w in worlds:
        groups.setdefault(find(w), set()).add(val[w])
    return {frozenset(g) for g in groups.values()}


def direct_product(m, e):
    """Cartesian construction straight from the definition."""
    worlds = [(w, x) for w in m.worlds for x in e.events if eval_formula(m, w, e.events[x].pre)]
    val = {}
    for w, x in worlds:
        out = set()
        for p_, what in e.events[x].post.items():
            if what is Post.TRUE or (what is Post.KEEP and p_ in m.val(w)):
                out.add(p_)
        val[(w, x)] = frozenset(out)
    related = [
        (a, b)
        for a in worlds
        for b in worlds
        if b[0] in m.cell(a[0]) and b[1] in e.cell(a[1])
    ]
    return worlds, val, related


# ---------------------------------------------------------------- worked cases


def test_coin_toss_update():
    m, e = coin_model(), coin_toss()
    out = product_update(m, e)
    assert len(out) == 2
    assert set(out.components()) == {frozenset([frozenset({"h"})]), frozenset([frozenset()])}
    drawn = EpistemicModel(["h"], {"x": {"h"}, "y": set()}, [["x"], ["y"]])
    assert models_bisimilar(out, drawn)


def test_coin_toss_formula():
    f = parse_formula("K(h & ~[E]h & ~[E]~h & [E](K h | K ~h))")
    assert eval_formula(coin_model(), "w", f, {"E": coin_toss()})
    assert eval_global(coin_model(), f, {"E": coin_toss()})


def test_top_everywhere_and_empty_model():
    m = random_model(random.Random(1), P3)
    assert eval_global(m, Top())
    assert eval_global(EpistemicModel(P3, {}, []), Bot())


def test_know_whether_on_two_worlds():
    m = EpistemicModel(["p"], {"a": {"p"}, "b": set()}, [["a", "b"]])
    assert not eval_global(m, parse_formula("Kw p"))
    assert eval_global(m, parse_formula("~Kw p"))


def test_light_switch_initial_model():
    m = EpistemicModel.single(["l", "r", "s"], [frozenset(), frozenset({"l"})])
    assert eval_global(m, parse_formula("K(~r & ~s) & ~Kw l"))


def test_identity_update_is_canonical_form():
    m = EpistemicModel(["p", "q"], {1: {"p"}, 2: {"p"}, 3: set()}, [[1, 2], [3]])
    assert product_update(m, identity_event_model(["p", "q"])) == canonicalize(m)


def test_canonical_merges_duplicates():
    two = EpistemicModel(["p"], {1: {"p"}, 2: set(), 3: {"p"}, 4: set()}, [[1, 2], [3, 4]])
    assert len(canonicalize(two).partition) == 1
    four = EpistemicModel(["p"], {1: {"p"}, 2: {"p"}, 3: set(), 4: set()}, [[1, 2, 3, 4]])
    assert len(canonicalize(four)) == 2


def test_errors():
    m = coin_model()
    with pytest.raises(EvaluationError):
        eval_formula(m, "nowhere", Top())
    with pytest.raises(EvaluationError):
        eval_formula(m, "w", DynEvent("missing", Top()))
    with pytest.raises(EvaluationError):
        eval_formula(m, "w", DynAction("a", Top()))
    with pytest.raises(ValueError):
        product_update(m, identity_event_model(["p"]))


def test_empty_update_is_vacuous():
    m = coin_model()
    never = EventModel(["h"], {"x": Event.assigning(Bot(), ["h"])}, [["x"]])
    assert product_update(m, never).is_empty()
    assert eval_global(m, DynEvent("N", Bot()), {"N": never})


# ---------------------------------------------------------------- properties


def test_propositional_eval_matches_truth_table():
    rng = random.Random(3)
    for _ in range(300):
        f = random_formula(rng, P3, 4, modal=False)
        m = random_model(rng, P3)
        for w in m.worlds:
            assert eval_formula(m, w, f) == truth_table(f, m.val(w))


@given(seeds)
def test_know_whether_is_know_or_know_not(seed):
    rng = random.Random(seed)
    m = random_model(rng, P3)
    f = random_formula(rng, P3, 3)
    for w in m.worlds:
        assert eval_formula(m, w, KnowWhether(f)) == eval_formula(m, w, Or(Know(f), Know(Neg(f))))


@given(seeds)
def test_s5_axioms(seed):
    rng = random.Random(seed)
    m = random_model(rng, P3)
    f = random_formula(rng, P3, 3)
    for axiom in (Implies(Know(f), f), Implies(Know(f), Know(Know(f))), Implies(Neg(Know(f)), Know(Neg(Know(f))))):
        assert eval_global(m, axiom)


@given(seeds)
def test_product_matches_direct_construction(seed):
    rng = random.Random(seed)
    props = ["p", "q"]
    m, e = random_model(rng, props), random_event_model(rng, props)
    worlds, val, related = direct_product(m, e)
    out = product_update(m, e)
    assert len(raw_product(m, e)) == len(worlds) <= len(m) * len(e.events)
    assert set(out.components()) == components_by_closure(worlds, val, related)


@given(seeds)
def test_canonical_form_properties(seed):
    rng = random.Random(seed)
    props = ["p", "q"]
    m, e = random_model(rng, props), random_event_model(rng, props)
    c = canonicalize(m)
    assert canonicalize(c) == c
    assert product_update(c, e) == product_update(m, e)
    cells = [tuple(c.val(w) for w in cell) for cell in c.partition]
    assert all(len(set(x)) == len(x) for x in cells)
    assert len({frozenset(x) for x in cells}) == len(cells)


@given(seeds)
def test_bisimilarity_matches_component_inclusion(seed):
    rng = random.Random(seed)
    props = ["p", "q"]
    m1 = random_model(rng, props, max_worlds=4)
    m2 = random_model(rng, props, max_worlds=4) if rng.random() < 0.5 else canonicalize(m1)
    a, b = set(m1.components()), set(m2.components())
    expected = all(x in b for x in a) and all(y in a for y in b)
    assert models_bisimilar(m1, m2) == expected


@given(seeds)
def test_dynamic_modality_is_conjunction_over_events(seed):
    rng = random.Random(seed)
    props = ["p", "q"]
    m, e = random_model(rng, props), random_event_model(rng, props)
    f = random_formula(rng, props, 2)
    raw = raw_product(m, e)
    for w in m.worlds:
        expected = all(eval_formula(raw, pw, f) for pw in raw.worlds if pw[0] == w)
        assert eval_formula(m, w, DynEvent("E", f), {"E": e}) == expected


@given(seeds)
def test_truth_is_invariant_under_contraction(seed):
    rng = random.Random(seed)
    props = ["p", "q"]
    m, e = random_model(rng, props), random_event_model(rng, props)
    f = And(random_formula(rng, props, 3), DynEvent("E", random_formula(rng, props, 2)))
    c = canonicalize(m)
    for w in m.worlds:
        comp = frozenset(m.val(v) for v in m.cell(w))
        twin = next(x for x in c.worlds if c.val(x) == m.val(w) and frozenset(c.val(y) for y in c.cell(x)) == comp)
        assert eval_formula(m, w, f, {"E": e}) == eval_formula(c, twin, f, {"E": e})
