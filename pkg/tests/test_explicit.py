import random

import pytest
from hypothesis import given

from delearn.catalog import light_switch
from delearn.domain import (
    Observation,
    comp,
    compatibility_domain,
    induced_domain,
    induced_epistemic_model,
    isomorphic,
)
from delearn.epistemic import EpistemicModel, Post, eval_global, render_valuation
from delearn.explicit import learn_explicit, observation_formula
from delearn.formula import Or, parse_formula, render_formula
from delearn.traces import ObservedTransition, sound_complete_transitions
from helpers import random_small_domain, seeds

LRS = ["l", "r", "s"]
O = Observation.parse


def components(model):
    """Each component as (precondition text, set of assigned valuations)."""
    out = set()
    for cell in model.partition:
        pres = {render_formula(model.events[e].pre) for e in cell}
        assert len(pres) == 1
        posts = set()
        for e in cell:
            post = model.events[e].post
            assert Post.KEEP not in post.values()
            posts.add(render_valuation(frozenset(p for p, x in post.items() if x is Post.TRUE), model.props))
        out.add((pres.pop(), frozenset(posts)))
    return out


def test_observation_formula_text():
    assert render_formula(observation_formula(O("~r ~s"), LRS)) == "K(~r & ~s) & ~Kw l"
    assert render_formula(observation_formula(O("l r ~s"), LRS)) == "K(l & r & ~s)"
    assert render_formula(observation_formula(O(""), ["p", "q"])) == "K true & ~Kw p & ~Kw q"


def test_learned_light_switch_models():
    models = learn_explicit(LRS, ["flip", "move"], sound_complete_transitions(light_switch(self_loops=False)))
    assert components(models["move"]) == {
        ("K(~r & ~s) & ~Kw l", frozenset({"~l r ~s", "~l r s"})),
        ("K(~l & r) & ~Kw s", frozenset({"l ~r ~s", "~l ~r ~s"})),
        ("K(~r & s) & ~Kw l", frozenset({"l r s", "l r ~s"})),
        ("K(l & r) & ~Kw s", frozenset({"l ~r s", "~l ~r s"})),
    }
    assert components(models["flip"]) == {
        ("K(~r & ~s) & ~Kw l", frozenset({"l ~r s", "~l ~r s"})),
        ("K(~r & s) & ~Kw l", frozenset({"l ~r ~s", "~l ~r ~s"})),
    }


def test_self_loops_add_flip_components():
    models = learn_explicit(LRS, ["flip", "move"], sound_complete_transitions(light_switch()))
    extra = components(models["flip"]) - components(
        learn_explicit(LRS, ["flip", "move"], sound_complete_transitions(light_switch(self_loops=False)))["flip"]
    )
    assert extra == {
        ("K(l & r) & ~Kw s", frozenset({"l r s", "l r ~s"})),
        ("K(~l & r) & ~Kw s", frozenset({"~l r s", "~l r ~s"})),
    }


def test_explicit_knowledge_formula():
    models = learn_explicit(LRS, ["flip", "move"], sound_complete_transitions(light_switch(self_loops=False)))
    m0 = EpistemicModel.single(LRS, comp(O("~r ~s"), LRS))
    assert eval_global(m0, parse_formula("~Kw l & [flip]~Kw l & [flip][move]K l"), models)


def test_shared_target_gives_disjunctive_precondition():
    sigma = [
        ObservedTransition(O("p"), "a", O("q")),
        ObservedTransition(O("~p"), "a", O("q")),
    ]
    (cell,) = learn_explicit(["p", "q"], ["a"], sigma)["a"].partition
    model = learn_explicit(["p", "q"], ["a"], sigma)["a"]
    pre = model.events[cell[0]].pre
    assert isinstance(pre, Or)
    assert render_formula(pre) == "K p & ~Kw q | K ~p & ~Kw q"
    assert len(cell) == 2


def test_actions_without_transitions_get_empty_models():
    models = learn_explicit(["p"], ["a", "b"], [ObservedTransition(O("p"), "a", O("p"))])
    assert models["b"].events == {}
    with pytest.raises(ValueError):
        learn_explicit(["p"], ["a"], [ObservedTransition(O("p"), "c", O("p"))])


@given(seeds)
def test_observation_formula_identifies_observation(seed):
    d = random_small_domain(random.Random(seed))
    for s in d.states:
        m = EpistemicModel.single(d.props, comp(d.obs[s], d.props))
        for t in d.states:
            assert eval_global(m, observation_formula(d.obs[t], d.props)) == (d.obs[s] == d.obs[t])


@given(seeds)
def test_component_sizes(seed):
    d = random_small_domain(random.Random(seed))
    models = learn_explicit(d.props, d.actions, sound_complete_transitions(d))
    for a, model in models.items():
        targets = {t.target for t in sound_complete_transitions(d) if t.action == a}
        assert len(model.partition) == len(targets)
        assert sorted(len(c) for c in model.partition) == sorted(
            2 ** (len(d.props) - len(o.observed)) for o in targets
        )


@given(seeds)
def test_learned_models_reproduce_compatibility_domain(seed):
    d = random_small_domain(random.Random(seed))
    models = learn_explicit(d.props, d.actions, sound_complete_transitions(d))
    m0 = induced_epistemic_model(frozenset(comp(d.obs[d.initial], d.props)), d.props)
    assert isomorphic(induced_domain(models, m0), compatibility_domain(d)) is not None
