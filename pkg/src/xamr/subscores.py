"""Fine-grained breakdown: seven aspect views scored with the same metric.

Each aspect is a transform of a triple set; the aspect score is the metric
applied to the views of gold and pred. Views keep the ``top`` triple only
for Unlabeled and NoWSD.

Triple selection per aspect:

* Unlabeled: relation and attribute roles replaced by ``rel``.
* NoWSD: ``-NN`` sense suffixes stripped from instance and top concepts.
* Concepts: instance triples only.
* NamedEnt: for each ``name`` edge, the instance of its source, the edge,
  the instance of the name node and its ``opN`` attributes.
* Negation: each ``polarity -`` attribute and its source's instance.
* Reentrancies: relations into a variable with two or more incoming
  relations, plus instances of both endpoints.
* SRL: relations labeled ``argN`` or ``argN-of``, plus endpoint instances.
"""

from __future__ import annotations

import enum
import re
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .smatch import (
    MatchResult,
    Scorable,
    SearchConfig,
    SmatchMetric,
    aggregate,
    as_triples,
    score_pairs,
    search_config_of,
)
from .triples import ATTRIBUTE, INSTANCE, RELATION, Triple, TripleSet

_SENSE_RE = re.compile(r"-\d+$")
_OP_RE = re.compile(r"^op\d+$")
_SRL_RE = re.compile(r"^arg\d+(-of)?$")


class Aspect(enum.Enum):
    UNLABELED = "unlabeled"
    NO_WSD = "no_wsd"
    REENTRANCIES = "reentrancies"
    CONCEPTS = "concepts"
    NAMED_ENT = "named_ent"
    NEGATION = "negation"
    SRL = "srl"

    @property
    def label(self) -> str:
        return _LABELS[self]


# row order of the breakdown table
ASPECTS = (
    Aspect.UNLABELED,
    Aspect.NO_WSD,
    Aspect.REENTRANCIES,
    Aspect.CONCEPTS,
    Aspect.NAMED_ENT,
    Aspect.NEGATION,
    Aspect.SRL,
)

_LABELS = {
    Aspect.UNLABELED: "Unlabeled",
    Aspect.NO_WSD: "No WSD",
    Aspect.REENTRANCIES: "Reentrancies",
    Aspect.CONCEPTS: "Concepts",
    Aspect.NAMED_ENT: "Named Ent.",
    Aspect.NEGATION: "Negation",
    Aspect.SRL: "SRL",
}


def _with_endpoints(ts: TripleSet, selected: Iterable[Triple]) -> TripleSet:
    selected = list(selected)
    keep_vars = set()
    for t in selected:
        keep_vars.add(t.source)
        if t.kind == RELATION:
            keep_vars.add(t.target)
    instances = [t for t in ts.of_kind(INSTANCE) if t.source in keep_vars]
    return TripleSet.from_triples(_dedupe_instances(instances) + selected)


def _dedupe_instances(instances: list[Triple]) -> list[Triple]:
    seen, out = set(), []
    for t in instances:
        if t not in seen:
            seen.add(t)
            out.append(t)
    return out


def aspect_view(ts: TripleSet, aspect: Aspect) -> TripleSet:
    """The sub-bag (or relabeling) of ``ts`` that ``aspect`` scores."""
    if aspect is Aspect.UNLABELED:
        return TripleSet(
            tuple(
                t if t.kind == INSTANCE or t.is_top else t._replace(relation="rel")
                for t in ts.triples
            ),
            ts.variables,
        )
    if aspect is Aspect.NO_WSD:
        return TripleSet(
            tuple(
                t._replace(target=_SENSE_RE.sub("", t.target))
                if t.kind == INSTANCE or t.is_top
                else t
                for t in ts.triples
            ),
            ts.variables,
        )
    if aspect is Aspect.CONCEPTS:
        return TripleSet.from_triples(ts.of_kind(INSTANCE))
    relations = ts.of_kind(RELATION)
    if aspect is Aspect.NAMED_ENT:
        names = [t for t in relations if t.relation == "name"]
        name_vars = {t.target for t in names}
        ops = [
            t
            for t in ts.of_kind(ATTRIBUTE)
            if t.source in name_vars and _OP_RE.match(t.relation)
        ]
        return _with_endpoints(ts, names + ops)
    if aspect is Aspect.NEGATION:
        return _with_endpoints(
            ts, [t for t in ts.of_kind(ATTRIBUTE) if t.relation == "polarity" and t.target == "-"]
        )
    if aspect is Aspect.REENTRANCIES:
        incoming = Counter(t.target for t in relations)
        return _with_endpoints(ts, [t for t in relations if incoming[t.target] >= 2])
    if aspect is Aspect.SRL:
        return _with_endpoints(ts, [t for t in relations if _SRL_RE.match(t.relation)])
    raise ValueError(f"unknown aspect {aspect!r}")


def concept_bag_score(gold: TripleSet, pred: TripleSet) -> MatchResult:
    """F1 over concept multisets; equals aligned scoring of Concepts views."""
    g = Counter(t.target for t in gold.of_kind(INSTANCE))
    p = Counter(t.target for t in pred.of_kind(INSTANCE))
    return MatchResult(
        Fraction(sum((g & p).values())), sum(p.values()), sum(g.values()), exact=True
    )


@dataclass(frozen=True)
class BreakdownReport:
    overall: MatchResult
    aspects: dict[Aspect, MatchResult]

    def __post_init__(self):
        missing = set(ASPECTS) - set(self.aspects)
        if missing:
            raise ValueError(f"breakdown missing aspects: {sorted(a.value for a in missing)}")

    def rows(self) -> list[tuple[str, str, MatchResult]]:
        """(json key, table label, result) in table order, overall first."""
        return [("smatch", "SMATCH", self.overall)] + [
            (a.value, a.label, self.aspects[a]) for a in ASPECTS
        ]


Metric = Callable[[Scorable, Scorable], MatchResult]


def _aspect_metric(metric: Metric, aspect: Aspect) -> Metric:
    if aspect is Aspect.CONCEPTS and isinstance(metric, SmatchMetric):
        return concept_bag_score
    return metric


def breakdown(
    gold: Scorable,
    pred: Scorable,
    cfg: SearchConfig = SearchConfig(),
    metric: Metric | None = None,
) -> BreakdownReport:
    metric = metric or SmatchMetric(cfg)
    g, p = as_triples(gold), as_triples(pred)
    return BreakdownReport(
        metric(g, p),
        {a: _aspect_metric(metric, a)(aspect_view(g, a), aspect_view(p, a)) for a in ASPECTS},
    )


class ViewMetric:
    """Picklable ``metric`` applied to the views of one aspect."""

    def __init__(self, metric: Metric, aspect: Aspect | None):
        self.metric = metric
        self.aspect = aspect

    def __call__(self, gold: Scorable, pred: Scorable) -> MatchResult:
        g, p = as_triples(gold), as_triples(pred)
        if self.aspect is None:
            return self.metric(g, p)
        return _aspect_metric(self.metric, self.aspect)(
            aspect_view(g, self.aspect), aspect_view(p, self.aspect)
        )


def corpus_breakdown(
    pairs: Sequence[tuple[Scorable, Scorable]],
    cfg: SearchConfig = SearchConfig(),
    metric: Metric | None = None,
    jobs: int = 1,
) -> BreakdownReport:
    """Micro-averaged breakdown over (gold, pred) pairs."""
    if not pairs:
        raise ValueError("corpus_breakdown needs at least one pair")
    metric = metric or SmatchMetric(cfg)
    pairs = [(as_triples(g), as_triples(p)) for g, p in pairs]

    search = search_config_of(metric, cfg)

    def run(aspect):
        results = score_pairs(pairs, ViewMetric(metric, aspect), jobs)
        return aggregate(results, search.seed, search.restarts)

    return BreakdownReport(run(None), {a: run(a) for a in ASPECTS})
