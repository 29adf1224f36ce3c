"""Verification tasks and their JSON reports.

Every task evaluates both sides of one identity exactly.  Tasks that sweep
over many inputs report the sides of the first counterexample, or of the
first input when everything verifies, together with the number of checks.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Any, Callable, Iterable

from .. import k_calculus as kc
from .. import torsion
from ..exact_arith import format_rational
from ..pushforward import EPSILON, adams_rr_sides
from .config import Config, ConfigError
from .evaluate import EvalError

REPORT_KEYS = ("task", "status", "epsilon", "lhs", "rhs", "elapsed_ms")


@dataclass
class Report:
    task: str
    status: str
    lhs: str = ""
    rhs: str = ""
    epsilon: int = EPSILON
    elapsed_ms: float = 0.0
    message: str | None = None
    checked: int | None = None

    @property
    def ok(self) -> bool:
        return self.status == "verified"


def serialize_report(r: Report) -> str:
    data: dict[str, Any] = {
        "task": r.task, "status": r.status, "epsilon": r.epsilon,
        "lhs": r.lhs, "rhs": r.rhs, "elapsed_ms": round(r.elapsed_ms, 3),
    }
    if r.checked is not None:
        data["checked"] = r.checked
    if r.message is not None:
        data["message"] = r.message
    return json.dumps(data, separators=(", ", ": "))


def report_from_json(text: str) -> Report:
    d = json.loads(text)
    return Report(d["task"], d["status"], d.get("lhs", ""), d.get("rhs", ""),
                  d.get("epsilon", EPSILON), d.get("elapsed_ms", 0.0),
                  d.get("message"), d.get("checked"))


def format_text(r: Report) -> str:
    line = f"[{r.status}] {r.task}: lhs = {r.lhs} ; rhs = {r.rhs}"
    if r.checked is not None:
        line += f" ({r.checked} checks)"
    if r.message:
        line += f" -- {r.message}"
    return line


@dataclass
class Operations:
    """The operations a task calls; tests swap in corrupted versions."""

    ch: Callable = kc.ch
    adams: Callable = kc.adams
    adams_H: Callable = kc.adams_H
    rho: Callable = kc.rho
    acgenus: Callable = kc.acgenus


class _Tally:
    def __init__(self):
        self.first: tuple[str, str] | None = None
        self.failure: tuple[str, str, str] | None = None
        self.count = 0

    def check(self, lhs, rhs, label: str = "", equal: bool | None = None):
        self.count += 1
        ok = (lhs == rhs) if equal is None else equal
        pair = (str(lhs), str(rhs))
        if self.first is None:
            self.first = pair
        if not ok and self.failure is None:
            self.failure = pair + (label,)

    def report(self, task_id: str) -> Report:
        if self.failure:
            lhs, rhs, label = self.failure
            return Report(task_id, "counterexample", lhs, rhs, message=label or None,
                          checked=self.count)
        lhs, rhs = self.first or ("", "")
        return Report(task_id, "verified", lhs, rhs, checked=self.count)


def _as_list(v) -> list:
    return list(v) if isinstance(v, (list, tuple)) else [v]


def _samples(cfg: Config, task: dict, space: kc.Space, rng: random.Random,
             degree: int | None = None) -> list[kc.KClass]:
    if "x" in task:
        values = []
        for text in _as_list(task["x"]):
            v = cfg.evaluator(task["space"])(text)
            if isinstance(v, Fraction):
                v = space.kclass(v)
            if not isinstance(v, kc.KClass):
                raise EvalError(f"{text!r} does not evaluate to a K-class")
            values.append(v)
        return values
    return [kc.random_kclass(space, rng, degree) for _ in range(int(task.get("samples", 20)))]


def _task_adams_ch(cfg, task, ops, tally):
    space = cfg.space(task["space"])
    rng = random.Random(task.get("seed", 0))
    xs = _samples(cfg, task, space, rng)
    for k in _as_list(task["k"]):
        for x in xs:
            tally.check(ops.ch(ops.adams(k, x)), ops.adams_H(k, ops.ch(x)), f"k={k}, x={x}")


def _task_adams_compose(cfg, task, ops, tally):
    space = cfg.space(task["space"])
    rng = random.Random(task.get("seed", 0))
    xs = _samples(cfg, task, space, rng)
    ys = [kc.random_kclass(space, rng) for _ in xs]
    pairs = [(k, l) for k in _as_list(task["k"]) for l in _as_list(task.get("l", task["k"]))]
    for k, l in pairs:
        for x in xs:
            tally.check(ops.adams(k, ops.adams(l, x)), ops.adams(k * l, x),
                        f"composition k={k}, l={l}, x={x}")
    for k in _as_list(task["k"]):
        one = space.k_one()
        tally.check(ops.adams(k, one), one, f"unit k={k}")
        for x, y in zip(xs, ys):
            tally.check(ops.adams(k, x * y), ops.adams(k, x) * ops.adams(k, y),
                        f"multiplicativity k={k}")
            same = space.kclass(y.upoly, x.degree)
            tally.check(ops.adams(k, x + same), ops.adams(k, x) + ops.adams(k, same),
                        f"additivity k={k}")


def _task_rho_properties(cfg, task, ops, tally):
    rng = random.Random(task.get("seed", 0))
    if "bundles" in task:
        bundles = [cfg.bundles[b] for b in task["bundles"]]
    else:
        space = cfg.space(task["space"])
        bundles = [kc.random_bundle(space, rng, int(task.get("max_roots", 4)))
                   for _ in range(int(task.get("samples", 20)))]
    for k in _as_list(task["k"]):
        for i, b in enumerate(bundles):
            other = bundles[(i + 1) % len(bundles)]
            r = ops.rho(k, b)
            td = ops.acgenus(b)
            tally.check(ops.ch(r) * td, ops.adams_H(k, td), f"ch(rho)*td = psiH(td), k={k}")
            if other.space == b.space:
                tally.check(ops.rho(k, b + other), r * ops.rho(k, other),
                            f"multiplicativity k={k}")
            triv = ops.rho(k, kc.Bundle.trivial(b.space, b.rank))
            tally.check(triv, b.space.k_one(), f"trivial bundle k={k}")
            unit_ok = (r * r.inverse()).same_class(b.space.k_one())
            tally.check(r.inverse() * r, b.space.k_one(), f"unit k={k}",
                        equal=unit_ok and kc.zk_membership(r, k))


def _task_adams_rr(cfg, task, ops, tally):
    f = cfg.fibrations[task["fibration"]]
    x = task.get("x", "1")
    if x == "basis":
        xs = [c for d in _as_list(task.get("degrees", [0])) for c in kc.kclass_basis(f.total, d)]
    else:
        xs = []
        for text in _as_list(x):
            v = cfg.evaluator(task["fibration"])(text)
            xs.append(f.total.kclass(v) if isinstance(v, Fraction) else v)
    for k in _as_list(task["k"]):
        for c in xs:
            lhs, rhs = adams_rr_sides(f, k, c, task.get("epsilon"))
            tally.check(lhs, rhs, f"k={k}, x={c}")


def _task_e_bound(cfg, task, ops, tally):
    m = int(task["m"])
    kmax = task.get("kmax")
    bound = torsion.e_order_bound(m, kmax)
    if m % 2 == 0:
        oracle = torsion.bernoulli_order(m // 2)
    else:
        oracle = torsion.e_order_gcd(m, bound.ceiling)
    tally.check(bound.bound, oracle, f"m={m}")


def _task_clutching(cfg, task, ops, tally):
    ls = _as_list(task.get("l", list(range(2, 25))))
    ks = _as_list(task.get("k", list(range(1, 8))))
    gs = _as_list(task.get("g", [0, 1, 2, 3]))
    for l in ls:
        for k in ks:
            for m in range(l):
                x = torsion.ClutchingClass.line_difference(l, m)
                tally.check(torsion.clutch_adams(k, x).m, torsion.line_power_degree(l, m, k),
                            f"substitution l={l}, k={k}, m={m}")
            for g in gs:
                base = torsion.clutch_adams(k, torsion.ClutchingClass.make(l, 1, 0)).m
                shifted = torsion.clutch_adams(k, torsion.ClutchingClass.make(l, 1, g)).m
                tally.check(shifted, k ** g * base % l, f"scaling l={l}, k={k}, g={g}")
                for k2 in ks:
                    for m in range(l):
                        x = torsion.ClutchingClass.make(l, m, g)
                        tally.check(torsion.clutch_adams(k2, torsion.clutch_adams(k, x)),
                                    torsion.clutch_adams(k * k2, x),
                                    f"composition l={l}, k={k}, k'={k2}, g={g}")


def _task_lens_rho(cfg, task, ops, tally):
    l = int(task["l"])
    cs = range(1, l) if task.get("c", "all") == "all" else _as_list(task["c"])
    if "a" in task:
        rotations = [tuple(task["a"])]
    else:
        units = [a for a in range(1, l) if gcd(a, l) == 1]
        rotations = []
        for m in _as_list(task.get("m", [1, 2])):
            rotations.extend(_tuples(units, int(m)))
    for c in cs:
        for a in rotations:
            s = torsion.RhoSum(l, c, a)
            value = torsion.lens_rho(s)
            oracle = torsion.lens_rho_group_ring(s)
            same = value.value == oracle
            tally.check(format_rational(value.mod1), format_rational(torsion.mod1(oracle)),
                        f"c={c}, a={a}",
                        equal=same and torsion.denominator_divides_power_of(value.mod1, l))


def _tuples(units: list[int], m: int) -> Iterable[tuple[int, ...]]:
    if m == 0:
        yield ()
        return
    for head in units:
        for rest in _tuples([u for u in units if u >= head], m - 1):
            yield (head,) + rest


TASKS = {
    "adams-ch": _task_adams_ch,
    "adams-compose": _task_adams_compose,
    "rho-properties": _task_rho_properties,
    "adams-rr": _task_adams_rr,
    "e-bound": _task_e_bound,
    "clutching": _task_clutching,
    "lens-rho": _task_lens_rho,
}


def task_id(task: dict) -> str:
    if "id" in task:
        return str(task["id"])
    parts = [task.get("kind", "?")]
    for key in ("space", "fibration"):
        if key in task:
            parts.append(str(task[key]))
    for key in ("l", "m", "k"):
        if key in task:
            parts.append(key + ",".join(str(v) for v in _as_list(task[key])))
    return ":".join(parts)


def run_task(cfg: Config, task: dict, ops: Operations | None = None) -> Report:
    ops = ops or Operations()
    tid = task_id(task)
    t0 = time.perf_counter()
    kind = task.get("kind")
    try:
        if kind not in TASKS:
            raise ConfigError(f"unknown task kind {kind!r}")
        tally = _Tally()
        TASKS[kind](cfg, task, ops, tally)
        report = tally.report(tid)
        if task.get("epsilon") is not None:
            report.epsilon = int(task["epsilon"])
    except (ConfigError, EvalError, KeyError, ValueError, ZeroDivisionError) as exc:
        msg = f"missing parameter {exc}" if isinstance(exc, KeyError) else str(exc)
        report = Report(tid, "error", message=msg)
    report.elapsed_ms = (time.perf_counter() - t0) * 1000
    return report


def run_all(cfg: Config, selection: str = "all", ops: Operations | None = None) -> list[Report]:
    tasks = cfg.tasks
    if selection != "all":
        tasks = [t for t in tasks if task_id(t) == selection or t.get("kind") == selection]
        if not tasks:
            return [Report(selection, "error", message=f"no task matches {selection!r}")]
    reports = [run_task(cfg, t, ops) for t in tasks]
    return sorted(reports, key=lambda r: r.task)
