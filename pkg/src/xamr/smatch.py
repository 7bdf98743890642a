"""Smatch: triple-overlap F1 under the best variable alignment.

The alignment search maps the variables of the graph with fewer variables
injectively into the other graph. Small problems are solved exactly by
branch and bound; larger ones by hill climbing with seeded restarts.
Binary scores are exact rationals (:class:`fractions.Fraction`).
"""

from __future__ import annotations

import itertools
import random
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence, Union

from .penman import AmrGraph
from .triples import ATTRIBUTE, INSTANCE, RELATION, TripleSet, to_triples

# graded problems accept a move only if it gains more than this
GRADED_TOLERANCE = 1e-12
BRUTE_FORCE_LIMIT = 8

Similarity = Callable[[str, str], float]
Scorable = Union[TripleSet, AmrGraph]


@dataclass(frozen=True)
class SearchConfig:
    restarts: int = 4
    seed: int = 0
    # exhaustive search when the smaller graph has at most this many variables
    exact_threshold: int = 6

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.exact_threshold < 0:
            raise ValueError("exact_threshold must be >= 0")


@dataclass(frozen=True)
class Alignment:
    """Injective partial map from pred variables to gold variables."""

    mapping: Mapping[str, str]
    matched_score: Fraction

    def inverse(self) -> "Alignment":
        return Alignment({g: p for p, g in self.mapping.items()}, self.matched_score)


@dataclass(frozen=True)
class MatchResult:
    """Matched triple mass against the pred and gold totals.

    Precision, recall and F1 are derived exact rationals. When one side is
    empty its ratio is undefined; it is reported as 0 and flagged. Two empty
    sides score 1.
    """

    matched: Fraction
    pred_total: int
    gold_total: int
    alignment: Alignment | None = None
    restarts_used: int = 0
    seed: int = 0
    exact: bool = False
    pairs: int = 1

    @property
    def precision_undefined(self) -> bool:
        return self.pred_total == 0 and self.gold_total > 0

    @property
    def recall_undefined(self) -> bool:
        return self.gold_total == 0 and self.pred_total > 0

    @property
    def precision(self) -> Fraction:
        if self.pred_total == 0:
            return Fraction(1) if self.gold_total == 0 else Fraction(0)
        return Fraction(self.matched) / self.pred_total

    @property
    def recall(self) -> Fraction:
        if self.gold_total == 0:
            return Fraction(1) if self.pred_total == 0 else Fraction(0)
        return Fraction(self.matched) / self.gold_total

    @property
    def f1(self) -> Fraction:
        p, r = self.precision, self.recall
        if p + r == 0:
            return Fraction(0)
        return 2 * p * r / (p + r)

    def transposed(self) -> "MatchResult":
        """The same comparison with gold and pred roles exchanged."""
        return MatchResult(
            self.matched,
            self.gold_total,
            self.pred_total,
            self.alignment.inverse() if self.alignment is not None else None,
            self.restarts_used,
            self.seed,
            self.exact,
            self.pairs,
        )

    def as_dict(self) -> dict:
        out = {
            "precision": float(self.precision),
            "recall": float(self.recall),
            "f1": float(self.f1),
            "matched": float(self.matched),
            "pred_triples": self.pred_total,
            "gold_triples": self.gold_total,
            "pairs": self.pairs,
        }
        if self.precision_undefined:
            out["precision_undefined"] = True
        if self.recall_undefined:
            out["recall_undefined"] = True
        return out


def as_triples(x: Scorable) -> TripleSet:
    return x if isinstance(x, TripleSet) else to_triples(x)


def _graded_overlap(a: list[str], b: list[str], similarity: Similarity | None):
    """Overlap of two small concept bags; graded pairs are matched greedily."""
    exact = Counter(a) & Counter(b)
    hits = sum(exact.values())
    if similarity is None:
        return hits
    rest_a = list((Counter(a) - exact).elements())
    rest_b = list((Counter(b) - exact).elements())
    total = float(hits)
    if rest_a and rest_b:
        scored = sorted(
            ((similarity(x, y), i, j) for i, x in enumerate(rest_a) for j, y in enumerate(rest_b)),
            key=lambda s: (-s[0], s[1], s[2]),
        )
        used_a, used_b = set(), set()
        for s, i, j in scored:
            if s > 0 and i not in used_a and j not in used_b:
                used_a.add(i)
                used_b.add(j)
                total += s
    return total


class _Problem:
    """Score tables for mapping ``left`` variables into ``right`` variables.

    ``len(left.variables) <= len(right.variables)`` is assumed, so a total
    injective map always exists and dominates every partial one.
    """

    def __init__(
        self,
        left: TripleSet,
        right: TripleSet,
        similarity: Similarity | None,
        grade_top: bool = True,
    ):
        self.graded = similarity is not None
        self.lv = left.variables
        self.rv = right.variables
        li = {v: i for i, v in enumerate(self.lv)}
        ri = {v: j for j, v in enumerate(self.rv)}

        def unary_parts(ts: TripleSet, index):
            inst = [[] for _ in index]
            top = [[] for _ in index]
            attr = [Counter() for _ in index]
            for t in ts.triples:
                k = index[t.source]
                if t.kind == INSTANCE:
                    inst[k].append(t.target)
                elif t.is_top:
                    top[k].append(t.target)
                elif t.kind == ATTRIBUTE:
                    attr[k][(t.relation, t.target)] += 1
            return inst, top, attr

        linst, ltop, lattr = unary_parts(left, li)
        rinst, rtop, rattr = unary_parts(right, ri)
        self.left_concepts = [tuple(c) for c in linst]
        self.right_concepts = [tuple(c) for c in rinst]
        zero = 0.0 if self.graded else 0
        self.unary = [
            [
                zero
                + sum((lattr[i] & rattr[j]).values())
                + _graded_overlap(linst[i], rinst[j], similarity)
                + _graded_overlap(ltop[i], rtop[j], similarity if grade_top else None)
                for j in range(len(self.rv))
            ]
            for i in range(len(self.lv))
        ]

        self.left_rel: dict[tuple[int, int], Counter] = {}
        for t in left.of_kind(RELATION):
            self.left_rel.setdefault((li[t.source], li[t.target]), Counter())[t.relation] += 1
        self.right_rel: dict[tuple[int, int], Counter] = {}
        for t in right.of_kind(RELATION):
            self.right_rel.setdefault((ri[t.source], ri[t.target]), Counter())[t.relation] += 1
        self.pairs_of: list[list[tuple[int, int]]] = [[] for _ in self.lv]
        for i, k in self.left_rel:
            self.pairs_of[i].append((i, k))
            if k != i:
                self.pairs_of[k].append((i, k))
        self._pair_cache: dict = {}

    def pair_score(self, key: tuple[int, int], j: int, l: int) -> int:
        if j < 0 or l < 0:
            return 0
        ck = (key, j, l)
        hit = self._pair_cache.get(ck)
        if hit is None:
            other = self.right_rel.get((j, l))
            hit = sum((self.left_rel[key] & other).values()) if other else 0
            self._pair_cache[ck] = hit
        return hit

    def score(self, m: Sequence[int]):
        total = 0.0 if self.graded else 0
        for i, j in enumerate(m):
            if j >= 0:
                total += self.unary[i][j]
        for key in self.left_rel:
            total += self.pair_score(key, m[key[0]], m[key[1]])
        return total

    def gain(self, m: list[int], changes: dict[int, int]):
        """Score change if left variables in ``changes`` were remapped."""
        delta = 0.0 if self.graded else 0
        keys = set()
        for i, j in changes.items():
            old = m[i]
            if j >= 0:
                delta += self.unary[i][j]
            if old >= 0:
                delta -= self.unary[i][old]
            keys.update(self.pairs_of[i])
        for key in keys:
            a, b = key
            delta += self.pair_score(key, changes.get(a, m[a]), changes.get(b, m[b]))
            delta -= self.pair_score(key, m[a], m[b])
        return delta

    # -- exact search -------------------------------------------------------

    def solve_exact(self, incumbent: list[int] | None = None) -> list[int]:
        """Branch and bound over total injective maps.

        Each relation triple bag is credited to whichever endpoint is
        assigned last; ``bound[i][j]`` caps what assigning ``i -> j`` can
        add, so candidates sorted by it allow cutting off a whole loop.
        """
        nl, nr = len(self.lv), len(self.rv)
        if nl == 0:
            return []
        right_out: list[list[int]] = [[] for _ in range(nr)]
        right_in: list[list[int]] = [[] for _ in range(nr)]
        for j, l in self.right_rel:
            right_out[j].append(l)
            right_in[l].append(j)

        def relation_cap(key, i, j):
            a, b = key
            if a == b:
                return self.pair_score(key, j, j)
            if a == i:
                return max((self.pair_score(key, j, l) for l in right_out[j]), default=0)
            return max((self.pair_score(key, l, j) for l in right_in[j]), default=0)

        # order: most constrained (largest attainable value) first
        solo = [
            max(
                self.unary[i][j] + sum(relation_cap(key, i, j) for key in self.pairs_of[i])
                for j in range(nr)
            )
            for i in range(nl)
        ]
        order = sorted(range(nl), key=lambda i: (-solo[i], i))
        depth_of = {i: d for d, i in enumerate(order)}
        completes: list[list[tuple[int, int]]] = [[] for _ in range(nl)]
        for key in self.left_rel:
            completes[max(depth_of[key[0]], depth_of[key[1]])].append(key)
        bound = [
            [
                self.unary[i][j] + sum(relation_cap(key, i, j) for key in completes[d])
                for j in range(nr)
            ]
            for d, i in enumerate(order)
        ]
        candidates = [sorted(range(nr), key=lambda j, d=d: (-bound[d][j], j)) for d in range(nl)]
        rest = [0] * (nl + 1)
        for d in range(nl - 1, -1, -1):
            rest[d] = rest[d + 1] + bound[d][candidates[d][0]]

        slack = 1e-9 if self.graded else 0
        best = [None, None]
        if incumbent is not None:
            best = [self.score(incumbent), list(incumbent)]
        m = [-1] * nl
        used = [False] * nr

        def dfs(d: int, value) -> bool:
            """Returns True once the global bound is reached."""
            if d == nl:
                if best[0] is None or value > best[0]:
                    best[0], best[1] = value, list(m)
                return best[0] >= rest[0] - slack
            i = order[d]
            for j in candidates[d]:
                if best[0] is not None and value + bound[d][j] + rest[d + 1] <= best[0] + slack:
                    break
                if used[j]:
                    continue
                m[i] = j
                step = self.unary[i][j]
                for key in completes[d]:
                    step += self.pair_score(key, m[key[0]], m[key[1]])
                if best[0] is None or value + step + rest[d + 1] > best[0] + slack:
                    used[j] = True
                    done = dfs(d + 1, value + step)
                    used[j] = False
                    if done:
                        m[i] = -1
                        return True
                m[i] = -1
            return False

        dfs(0, 0)
        return best[1]

    # -- hill climbing --------------------------------------------------------

    def climb(self, rng: random.Random) -> list[int]:
        nl, nr = len(self.lv), len(self.rv)
        lorder = list(range(nl))
        rorder = list(range(nr))
        rng.shuffle(lorder)
        rng.shuffle(rorder)
        m = [-1] * nl
        used: set[int] = set()
        for i in lorder:
            if not self.left_concepts[i]:
                continue
            for j in rorder:
                if j not in used and self.left_concepts[i] == self.right_concepts[j]:
                    m[i] = j
                    used.add(j)
                    break
        for i in lorder:
            if m[i] < 0:
                free = [j for j in rorder if j not in used]
                m[i] = rng.choice(free)
                used.add(m[i])

        tol = GRADED_TOLERANCE if self.graded else 0
        while True:
            best_gain, best_move = tol, None
            free = [j for j in rorder if j not in used]
            for i in lorder:
                for j in free:
                    g = self.gain(m, {i: j})
                    if g > best_gain:
                        best_gain, best_move = g, {i: j}
            for a in range(nl):
                i = lorder[a]
                for b in range(a + 1, nl):
                    k = lorder[b]
                    g = self.gain(m, {i: m[k], k: m[i]})
                    if g > best_gain:
                        best_gain, best_move = g, {i: m[k], k: m[i]}
            if best_move is None:
                return m
            for i, j in best_move.items():
                used.discard(m[i])
            for i, j in best_move.items():
                m[i] = j
                used.add(j)


def _restart_rng(seed: int, restart: int) -> random.Random:
    # one independent stream per restart, so k+1 restarts extend k restarts
    return random.Random(f"{seed}/{restart}")


def align(
    gold: TripleSet,
    pred: TripleSet,
    cfg: SearchConfig,
    similarity: Similarity | None = None,
    grade_top: bool = True,
) -> MatchResult:
    """Search for the best alignment; shared by binary and graded scoring.

    With ``similarity``, instance triples of aligned variables earn graded
    credit, and so do ``top`` triples unless ``grade_top`` is false.
    """
    flipped = len(pred.variables) > len(gold.variables)
    left, right = (gold, pred) if flipped else (pred, gold)
    problem = _Problem(left, right, similarity, grade_top)
    exact = len(left.variables) <= cfg.exact_threshold
    restarts = 0
    if exact:
        best_m = problem.solve_exact(problem.climb(_restart_rng(cfg.seed, 0)))
    else:
        best_m, best_value = None, None
        for r in range(cfg.restarts):
            m = problem.climb(_restart_rng(cfg.seed, r))
            value = problem.score(m)
            restarts += 1
            if best_value is None or value > best_value:
                best_m, best_value = m, value
    value = problem.score(best_m)
    matched = Fraction(value)
    pairs = {problem.lv[i]: problem.rv[j] for i, j in enumerate(best_m) if j >= 0}
    if flipped:
        pairs = {p: g for g, p in pairs.items()}
    return MatchResult(
        matched,
        len(pred.triples),
        len(gold.triples),
        Alignment(pairs, matched),
        restarts,
        cfg.seed,
        exact,
    )


def smatch_score(gold: Scorable, pred: Scorable, cfg: SearchConfig = SearchConfig()) -> MatchResult:
    """Smatch precision/recall/F1 of ``pred`` against ``gold``."""
    return align(as_triples(gold), as_triples(pred), cfg)


def _renamed_bag(ts: TripleSet, mapping: Mapping[str, str], graded: Callable) -> Counter:
    """Triples with variables renamed; unmapped variables get private names.

    Triples for which ``graded`` is true are left out.
    """
    name = lambda v: mapping.get(v, ("unmapped", v))
    bag = Counter()
    for t in ts.triples:
        if graded(t):
            continue
        target = name(t.target) if t.kind == RELATION else t.target
        bag[(t.kind, t.relation, name(t.source), target)] += 1
    return bag


def brute_force_score(
    gold: Scorable,
    pred: Scorable,
    similarity: Similarity | None = None,
    grade_top: bool = True,
) -> MatchResult:
    """Exact optimum by enumerating every injective variable mapping.

    Each candidate is scored by renaming pred triples and intersecting the
    bags directly, independently of the search tables. With ``similarity``
    the instance and ``top`` triples earn graded credit (one concept per
    variable is assumed). Refuses inputs whose smaller side has more than
    eight variables.
    """
    gold, pred = as_triples(gold), as_triples(pred)
    gv, pv = gold.variables, pred.variables
    if min(len(gv), len(pv)) > BRUTE_FORCE_LIMIT:
        raise ValueError(
            f"brute force limited to {BRUTE_FORCE_LIMIT} variables on the smaller side"
        )
    if len(pv) <= len(gv):
        mappings = (dict(zip(pv, perm)) for perm in itertools.permutations(gv, len(pv)))
    else:
        mappings = (
            {p: g for g, p in zip(gv, perm)} for perm in itertools.permutations(pv, len(gv))
        )
    if similarity is None:
        graded = lambda t: False
    else:
        graded = lambda t: t.kind == INSTANCE or (grade_top and t.is_top)
    gold_bag = _renamed_bag(gold, {v: v for v in gv}, graded)
    gold_concept = {t.source: t.target for t in gold.of_kind(INSTANCE)}
    gold_top = {t.source: t.target for t in gold.triples if t.is_top}

    best_value, best_map = None, {}
    for mapping in mappings:
        value = sum((_renamed_bag(pred, mapping, graded) & gold_bag).values())
        if similarity is not None:
            value = float(value)
            for t in pred.triples:
                if graded(t):
                    g = mapping.get(t.source)
                    other = (gold_concept if t.kind == INSTANCE else gold_top).get(g)
                    if other is not None:
                        value += 1.0 if other == t.target else similarity(t.target, other)
        if best_value is None or value > best_value:
            best_value, best_map = value, mapping
    if best_value is None:
        best_value = 0
    matched = Fraction(best_value)
    return MatchResult(
        matched, len(pred.triples), len(gold.triples), Alignment(best_map, matched), exact=True
    )


@dataclass(frozen=True)
class SmatchMetric:
    """Picklable scorer for corpus-level and parallel evaluation."""

    cfg: SearchConfig = field(default_factory=SearchConfig)

    def __call__(self, gold: Scorable, pred: Scorable) -> MatchResult:
        return smatch_score(gold, pred, self.cfg)


def aggregate(results: Iterable[MatchResult], seed: int = 0, restarts: int = 0) -> MatchResult:
    """Micro-average: sum matched mass and totals before dividing."""
    results = list(results)
    return MatchResult(
        sum((r.matched for r in results), Fraction(0)),
        sum(r.pred_total for r in results),
        sum(r.gold_total for r in results),
        None,
        restarts,
        seed,
        all(r.exact for r in results),
        len(results),
    )


def score_pairs(
    pairs: Sequence[tuple[Scorable, Scorable]],
    metric: Callable[[Scorable, Scorable], MatchResult],
    jobs: int = 1,
) -> list[MatchResult]:
    """Score each (gold, pred) pair, optionally across ``jobs`` processes."""
    golds = [g for g, _ in pairs]
    preds = [p for _, p in pairs]
    if jobs <= 1 or len(pairs) < 2:
        return [metric(g, p) for g, p in zip(golds, preds)]
    chunk = max(1, len(pairs) // (jobs * 4))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(metric, golds, preds, chunksize=chunk))


def zip_corpora(golds: Sequence, preds: Sequence) -> list[tuple]:
    if len(golds) != len(preds):
        raise ValueError(
            f"corpus length mismatch: {len(golds)} gold vs {len(preds)} predicted graphs"
        )
    return list(zip(golds, preds))


def corpus_score(
    pairs: Sequence[tuple[Scorable, Scorable]],
    cfg: SearchConfig = SearchConfig(),
    *,
    metric: Callable[[Scorable, Scorable], MatchResult] | None = None,
    jobs: int = 1,
) -> MatchResult:
    """Corpus-level micro-averaged score over (gold, pred) pairs."""
    if not pairs:
        raise ValueError("corpus_score needs at least one pair")
    metric = metric or SmatchMetric(cfg)
    search = search_config_of(metric, cfg)
    return aggregate(score_pairs(pairs, metric, jobs), search.seed, search.restarts)


def search_config_of(metric, default: SearchConfig = SearchConfig()) -> SearchConfig:
    """The SearchConfig a metric object runs with, if it exposes one."""
    cfg = getattr(metric, "cfg", default)
    cfg = getattr(cfg, "search", cfg)
    return cfg if isinstance(cfg, SearchConfig) else default
