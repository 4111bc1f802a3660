"""Command-line entry point.

Exit status: 0 on success, 1 on a negative answer (not bisimilar, formula
false, no plan, invalid domain), 2 on bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Callable, Dict, List, Optional, Sequence, TextIO

from .domain import (
    BudgetExceeded,
    Domain,
    behavioural_equivalence_domain,
    canonical_order,
    compatibility_domain,
    eval_on_state,
    isomorphic,
    obs_bisimilar,
    validate,
)
from .epistemic import EvaluationError, eval_formula, eval_global
from .explicit import learn_explicit
from .formula import FormulaSyntaxError, parse_formula, render_formula
from .implicit import learn_domains, learn_implicit
from .planner import plan
from .serialize import (
    domain_from_json,
    domain_to_json,
    dumps,
    epistemic_model_from_json,
    event_models_from_json,
    event_models_to_json,
    observation_to_json,
    resolve_state,
    sigma_from_json,
    sigma_to_json,
    state_ids,
    traces_from_json,
    traces_to_json,
)
from .traces import execute, observe, sound_complete_transitions, sound_complete_traces

OK, NEGATIVE, BAD_INPUT = 0, 1, 2


class InputError(Exception):
    pass


class Result:
    """Payload plus exit code; ``text`` is the human rendering."""

    def __init__(self, data: Any, text: Optional[str] = None, code: int = OK):
        self.data = data
        self.text = text
        self.code = code


def _load(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None


def _load_domain(path: str):
    return domain_from_json(_load(path))


def _names(text: Optional[str], flag: str, unique: bool = True) -> List[str]:
    if text is None:
        raise InputError(f"{flag} is required")
    names = [x.strip() for x in text.split(",") if x.strip()]
    if unique and len(set(names)) != len(names):
        raise InputError(f"{flag} lists a name twice")
    return names


def _need(value: Any, flag: str) -> Any:
    if value is None:
        raise InputError(f"{flag} is required")
    return value


def _verdict(value: bool) -> Result:
    return Result({"result": value}, "true" if value else "false", OK if value else NEGATIVE)


# ---------------------------------------------------------------- commands


def cmd_validate(args) -> Result:
    d, _ = _load_domain(_need(args.domain, "--domain"))
    problems = validate(d)
    text = "\n".join(problems) if problems else "valid"
    return Result({"valid": not problems, "problems": problems}, text, NEGATIVE if problems else OK)


def cmd_simulate(args) -> Result:
    d, ids = _load_domain(_need(args.domain, "--domain"))
    start = resolve_state(d, ids, args.start) if args.start else d.initial
    acts = _names(args.actions, "--actions", unique=False) if args.actions else []
    run = execute(d, start, acts)
    seen = observe(d, run)
    names = state_ids(d)
    data = {
        "states": [names[s] for s in run.states],
        "actions": list(run.actions),
        "observations": [observation_to_json(o) for o in seen.observations],
    }
    lines = []
    for i, s in enumerate(run.states):
        if i:
            lines.append(f"  --{run.actions[i - 1]}-->")
        lines.append(f"{names[s]}: {d.show(s)}  [{seen.observations[i]}]")
    return Result(data, "\n".join(lines))


def cmd_traces(args) -> Result:
    d, _ = _load_domain(_need(args.domain, "--domain"))
    if args.transitions:
        return Result(sigma_to_json(sound_complete_transitions(d), d.props))
    traces = sound_complete_traces(d, args.length, args.budget)
    return Result(traces_to_json(traces, d.props))


def cmd_learn_explicit(args) -> Result:
    sigma = sigma_from_json(_load(_need(args.sigma, "--sigma")))
    props = _names(args.props, "--props")
    actions = _names(args.actions, "--actions") if args.actions else sorted({t.action for t in sigma})
    return Result(event_models_to_json(learn_explicit(props, actions, sigma)))


def cmd_learn_implicit(args) -> Result:
    traces = traces_from_json(_load(_need(args.traces, "--traces")))
    props = _names(args.props, "--props")
    if args.all:
        found = canonical_order(learn_domains(props, traces))
        return Result([domain_to_json(d) for d in found], code=OK if found else NEGATIVE)
    return Result(domain_to_json(learn_implicit(props, traces)))


def cmd_comp_domain(args) -> Result:
    d, _ = _load_domain(_need(args.domain, "--domain"))
    return Result(domain_to_json(compatibility_domain(d)))


def cmd_beq_domain(args) -> Result:
    d, _ = _load_domain(_need(args.domain, "--domain"))
    return Result(domain_to_json(behavioural_equivalence_domain(d)))


def _pair(args):
    d1, _ = _load_domain(_need(args.a, "--a"))
    d2, _ = _load_domain(_need(args.b, "--b"))
    return d1, d2


def cmd_bisim(args) -> Result:
    return _verdict(obs_bisimilar(*_pair(args)) is not None)


def cmd_iso(args) -> Result:
    d1, d2 = _pair(args)
    witness = isomorphic(d1, d2)
    if witness is None:
        return _verdict(False)
    ids1, ids2 = state_ids(d1), state_ids(d2)
    mapping = {ids1[s]: ids2[t] for s, t in sorted(witness.items(), key=lambda kv: int(ids1[kv[0]][1:]))}
    text = "true\n" + "\n".join(f"{a} -> {b}" for a, b in mapping.items())
    return Result({"result": True, "mapping": mapping}, text)


def cmd_eval(args) -> Result:
    text = _need(args.formula, "--formula")
    if args.domain:
        d, ids = _load_domain(args.domain)
        f = parse_formula(text, action_modalities=True)
        state = resolve_state(d, ids, args.state) if args.state else d.initial
        return _verdict(eval_on_state(d, state, f))
    model = epistemic_model_from_json(_load(_need(args.model, "--model or --domain")))
    env = event_models_from_json(_load(args.events), model.props) if args.events else {}
    f = parse_formula(text)
    if args.world:
        return _verdict(eval_formula(model, args.world, f, env))
    return _verdict(eval_global(model, f, env))


def cmd_plan(args) -> Result:
    d, ids = _load_domain(_need(args.domain, "--domain"))
    goal = parse_formula(_need(args.goal, "--goal"), action_modalities=True)
    start = resolve_state(d, ids, args.start) if args.start else d.initial
    found = plan(d, start, goal, args.horizon)
    if found is None:
        return Result({"plan": None}, "no plan", NEGATIVE)
    return Result({"plan": list(found)}, "plan: (" + ", ".join(found) + ")")


COMMANDS: Dict[str, Callable[[argparse.Namespace], Result]] = {
    "validate": cmd_validate,
    "simulate": cmd_simulate,
    "traces": cmd_traces,
    "learn-explicit": cmd_learn_explicit,
    "learn-implicit": cmd_learn_implicit,
    "comp-domain": cmd_comp_domain,
    "beq-domain": cmd_beq_domain,
    "bisim": cmd_bisim,
    "iso": cmd_iso,
    "eval": cmd_eval,
    "plan": cmd_plan,
}

HELP = {
    "validate": "check the domain conditions",
    "simulate": "run an action sequence and show what is observed",
    "traces": "sound and complete observation traces (or observed transitions)",
    "learn-explicit": "learn one event model per action from observed transitions",
    "learn-implicit": "learn the behavioural equivalence domain from traces",
    "comp-domain": "compatibility domain of a valuation domain",
    "beq-domain": "behavioural equivalence domain by brute-force enumeration",
    "bisim": "are two deterministic domains observationally bisimilar",
    "iso": "are two domains isomorphic (shape and observations)",
    "eval": "evaluate a formula on a model or on a domain state",
    "plan": "shortest plan reaching a goal formula",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(BAD_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="delearn", description="Learn and analyse partially observable domains.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        p = sub.add_parser(name, help=HELP[name], description=HELP[name])
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--out", help="write the result to this file instead of stdout")
        if name in ("validate", "simulate", "traces", "comp-domain", "beq-domain", "plan", "eval"):
            p.add_argument("--domain", help="domain JSON file")
        if name in ("bisim", "iso"):
            p.add_argument("--a", help="first domain JSON file")
            p.add_argument("--b", help="second domain JSON file")
        if name in ("learn-explicit", "learn-implicit"):
            p.add_argument("--props", help="comma-separated propositions")
        if name in ("learn-explicit", "simulate"):
            p.add_argument("--actions", help="comma-separated action labels")
        if name == "learn-explicit":
            p.add_argument("--sigma", help="observed-transition JSON file")
        if name == "learn-implicit":
            p.add_argument("--traces", help="trace JSON file")
            p.add_argument("--all", action="store_true", help="emit every learned domain")
        if name == "traces":
            p.add_argument("--length", type=int, help="actions per trace (default 2^(2|P|))")
            p.add_argument("--budget", type=int, default=10**6, help="maximum number of traces")
            p.add_argument("--transitions", action="store_true", help="emit observed transitions instead")
        if name in ("simulate", "plan"):
            p.add_argument("--start", help="start state: file id or literal text")
        if name == "eval":
            p.add_argument("--model", help="epistemic model JSON file")
            p.add_argument("--events", help="JSON file mapping names to event models")
            p.add_argument("--world", help="evaluate at this world instead of globally")
            p.add_argument("--state", help="domain state: file id or literal text")
            p.add_argument("--formula", help="formula text")
        if name == "plan":
            p.add_argument("--goal", help="goal formula")
            p.add_argument("--horizon", type=int, help="maximum plan length")
    return parser


def _emit(result: Result, as_json: bool, out: Optional[str], stdout: TextIO) -> None:
    if result.text is not None and not as_json:
        body = result.text + "\n"
    else:
        body = dumps(result.data)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(body)
    else:
        stdout.write(body)


def run(argv: Optional[Sequence[str]] = None, stdout: Optional[TextIO] = None, stderr: Optional[TextIO] = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        result = COMMANDS[args.command](args)
        _emit(result, args.json, args.out, stdout)
    except FormulaSyntaxError as exc:
        stderr.write(f"error: formula: {exc}\n")
        return BAD_INPUT
    except (InputError, ValueError, EvaluationError, BudgetExceeded, KeyError, TypeError) as exc:
        stderr.write(f"error: {exc}\n")
        return BAD_INPUT
    except OSError as exc:
        stderr.write(f"error: {exc}\n")
        return BAD_INPUT
    return result.code


def main() -> None:
    sys.exit(run())
