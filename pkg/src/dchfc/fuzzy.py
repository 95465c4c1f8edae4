"""Mamdani fuzzy inference: trapezoidal terms, min/max rules, centroid defuzzification.

The engine is vectorised over batches of crisp inputs because the simulator
scores every node every round.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

INPUT_TERMS = ("Low", "Medium", "High")
OUTPUT_TERMS = ("VeryLow", "Low", "Medium", "High", "VeryHigh")
DEFAULT_RESOLUTION = 1001


class FuzzyError(ValueError):
    pass


@dataclass(frozen=True)
class MembershipFunction:
    """Trapezoid ``(a, b, c, d)``; a triangle when ``b == c``."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        if not self.a <= self.b <= self.c <= self.d:
            raise FuzzyError(f"breakpoints must be non-decreasing: {self.breakpoints}")

    @property
    def breakpoints(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    def __call__(self, v):
        v = np.asarray(v, dtype=float)
        out = np.zeros_like(v)
        out[(v >= self.b) & (v <= self.c)] = 1.0
        if self.b > self.a:
            m = (v > self.a) & (v < self.b)
            out[m] = (v[m] - self.a) / (self.b - self.a)
        if self.d > self.c:
            m = (v > self.c) & (v < self.d)
            out[m] = (self.d - v[m]) / (self.d - self.c)
        return out if out.ndim else float(out)


def membership(mf: MembershipFunction, v: float) -> float:
    return float(mf(v))


@dataclass(frozen=True)
class LinguisticVariable:
    name: str
    universe: tuple[float, float]
    terms: Mapping[str, MembershipFunction]

    def __post_init__(self):
        lo, hi = self.universe
        if not lo < hi:
            raise FuzzyError(f"{self.name}: empty universe {self.universe}")
        for label, mf in self.terms.items():
            if mf.a < lo or mf.d > hi:
                raise FuzzyError(f"{self.name}.{label} extends outside universe {self.universe}")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.terms)

    def fuzzify(self, v) -> np.ndarray:
        """Memberships of ``v`` in every term, shape ``v.shape + (n_terms,)``."""
        v = np.clip(np.asarray(v, dtype=float), *self.universe)
        return np.stack([mf(v) for mf in self.terms.values()], axis=-1)

    def check_coverage(self, resolution: int = DEFAULT_RESOLUTION) -> None:
        grid = np.linspace(*self.universe, resolution)
        if np.any(self.fuzzify(grid).max(axis=-1) <= 0.0):
            raise FuzzyError(f"{self.name}: terms leave part of the universe uncovered")


@dataclass(frozen=True)
class Rule:
    antecedent: tuple[str, ...]
    consequent: str


@dataclass(frozen=True)
class RuleBase:
    inputs: tuple[LinguisticVariable, ...]
    output: LinguisticVariable
    rules: tuple[Rule, ...]
    resolution: int = DEFAULT_RESOLUTION
    # derived lookup tables, filled in __post_init__
    _antecedent_idx: np.ndarray = field(init=False, repr=False, compare=False)
    _consequent_idx: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        combos = list(itertools.product(*(v.labels for v in self.inputs)))
        seen = [r.antecedent for r in self.rules]
        if sorted(seen) != sorted(combos) or len(set(seen)) != len(seen):
            raise FuzzyError(
                f"rule table must list each of the {len(combos)} antecedent combinations exactly once"
            )
        out_labels = self.output.labels
        for r in self.rules:
            if r.consequent not in out_labels:
                raise FuzzyError(f"unknown output term {r.consequent!r}")
        ante = np.array(
            [[v.labels.index(t) for v, t in zip(self.inputs, r.antecedent)] for r in self.rules], dtype=int
        )
        cons = np.array([out_labels.index(r.consequent) for r in self.rules], dtype=int)
        object.__setattr__(self, "_antecedent_idx", ante)
        object.__setattr__(self, "_consequent_idx", cons)

    @property
    def grid(self) -> np.ndarray:
        return np.linspace(*self.output.universe, self.resolution)

    def output_terms_on_grid(self) -> np.ndarray:
        """(n_out_terms, resolution) membership table of the output variable."""
        return np.stack([mf(self.grid) for mf in self.output.terms.values()])

    def firing_strengths(self, crisp) -> np.ndarray:
        """Min-AND firing strength of every rule, shape ``(batch, n_rules)``."""
        crisp = np.atleast_2d(np.asarray(crisp, dtype=float))
        if crisp.shape[1] != len(self.inputs):
            raise FuzzyError(f"expected {len(self.inputs)} inputs, got {crisp.shape[1]}")
        mu = [var.fuzzify(crisp[:, k]) for k, var in enumerate(self.inputs)]
        strengths = mu[0][:, self._antecedent_idx[:, 0]]
        for k in range(1, len(mu)):
            strengths = np.minimum(strengths, mu[k][:, self._antecedent_idx[:, k]])
        return strengths


@dataclass(frozen=True)
class AggregatedFuzzySet:
    grid: np.ndarray
    mu: np.ndarray

    @property
    def support(self) -> tuple[float, float]:
        nz = np.flatnonzero(self.mu > 0)
        if nz.size == 0:
            raise FuzzyError("empty fuzzy set has no support")
        return float(self.grid[nz[0]]), float(self.grid[nz[-1]])


def infer_batch(rb: RuleBase, crisp) -> np.ndarray:
    """Aggregated output memberships, shape ``(batch, resolution)``.

    Rules sharing a consequent collapse to their strongest firing before
    clipping; max-aggregation makes that identical to clipping each rule.
    """
    strengths = rb.firing_strengths(crisp)
    n_out = len(rb.output.terms)
    per_term = np.zeros((strengths.shape[0], n_out))
    for t in range(n_out):
        cols = rb._consequent_idx == t
        if cols.any():
            per_term[:, t] = strengths[:, cols].max(axis=1)
    terms = rb.output_terms_on_grid()
    return np.minimum(per_term[:, :, None], terms[None, :, :]).max(axis=1)


def infer(rb: RuleBase, inputs: Sequence[float]) -> AggregatedFuzzySet:
    return AggregatedFuzzySet(rb.grid, infer_batch(rb, [inputs])[0])


def centroid(grid: np.ndarray, mu: np.ndarray) -> np.ndarray:
    """Centroid along the last axis on a uniform grid (trapezoid weights)."""
    w = np.ones(grid.shape[-1])
    w[0] = w[-1] = 0.5
    mass = (mu * w).sum(axis=-1)
    if np.any(mass <= 0.0):
        raise FuzzyError("cannot defuzzify an all-zero fuzzy set")
    return (mu * (w * grid)).sum(axis=-1) / mass


def defuzzify_centroid(s: AggregatedFuzzySet) -> float:
    return float(centroid(s.grid, s.mu))


def evaluate(rb: RuleBase, crisp) -> np.ndarray:
    """Crisp output for each row of ``crisp``."""
    return centroid(rb.grid, infer_batch(rb, crisp))


# -- default knowledge base ---------------------------------------------------

DEFAULT_INPUT_BREAKPOINTS = {
    "Low": (0.0, 0.0, 0.2, 0.45),
    "Medium": (0.25, 0.45, 0.55, 0.75),
    "High": (0.55, 0.8, 1.0, 1.0),
}
DEFAULT_OUTPUT_BREAKPOINTS = {
    "VeryLow": (0.0, 0.0, 0.0, 0.25),
    "Low": (0.0, 0.25, 0.25, 0.5),
    "Medium": (0.25, 0.5, 0.5, 0.75),
    "High": (0.5, 0.75, 0.75, 1.0),
    "VeryHigh": (0.75, 1.0, 1.0, 1.0),
}
INPUT_NAMES = ("Residual_Energy", "Reachability", "Reception_Power")


def make_variable(name: str, breakpoints: Mapping[str, Sequence[float]], universe=(0.0, 1.0)) -> LinguisticVariable:
    return LinguisticVariable(name, tuple(universe), {k: MembershipFunction(*v) for k, v in breakpoints.items()})


def monotone_rule_table() -> list[Rule]:
    """Consequent = round(mean of antecedent indices on a 0/2/4 scale)."""
    scale = {"Low": 0, "Medium": 2, "High": 4}
    rules = []
    for combo in itertools.product(INPUT_TERMS, repeat=3):
        idx = round(sum(scale[t] for t in combo) / 3)
        rules.append(Rule(combo, OUTPUT_TERMS[idx]))
    return rules


def parse_rule_table(text: str) -> list[Rule]:
    """Parse lines of the form ``E_term,R_term,RP_term -> P_term``.

    Blank lines and ``#`` comments are ignored.
    """
    rules = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            lhs, rhs = (s.strip() for s in line.split("->"))
        except ValueError:
            raise FuzzyError(f"line {lineno}: expected 'A,B,C -> P', got {raw!r}") from None
        ante = tuple(t.strip() for t in lhs.split(","))
        if len(ante) != 3 or not rhs:
            raise FuzzyError(f"line {lineno}: expected three antecedent terms and one consequent")
        rules.append(Rule(ante, rhs))
    return rules


def format_rule_table(rules: Sequence[Rule]) -> str:
    return "".join(f"{','.join(r.antecedent)} -> {r.consequent}\n" for r in rules)


def load_rule_table(path: str | Path | None = None) -> list[Rule]:
    if path is None:
        text = resources.files("dchfc").joinpath("data/default_rules.txt").read_text()
    else:
        text = Path(path).read_text()
    return parse_rule_table(text)


def default_rulebase(
    rules: Sequence[Rule] | None = None,
    input_breakpoints: Mapping[str, Sequence[float]] | None = None,
    output_breakpoints: Mapping[str, Sequence[float]] | None = None,
    resolution: int = DEFAULT_RESOLUTION,
) -> RuleBase:
    ib = input_breakpoints or DEFAULT_INPUT_BREAKPOINTS
    ob = output_breakpoints or DEFAULT_OUTPUT_BREAKPOINTS
    inputs = tuple(make_variable(name, ib) for name in INPUT_NAMES)
    for var in inputs:
        var.check_coverage()
    output = make_variable("Potential", ob)
    return RuleBase(inputs, output, tuple(rules if rules is not None else load_rule_table()), resolution)
