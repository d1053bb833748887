"""Fusion data: label algebras, gluing ranks, weights and the anomaly.

A :class:`FusionDatum` is a based presentation of a semisimple fusion
algebra: a finite ordered label set with a duality involution and a unit,
the genus-0 three-point ranks, an exact rational weight per label, and a
rational anomaly constant.  Ranks in arbitrary genus follow from the
three-point table by the gluing recursion implemented in :func:`rank`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Hashable, Mapping, Sequence

from .errors import FusionDatumError, InvalidInputError

Label = Hashable


def parse_fraction(value: object) -> Fraction:
    """Parse ``"num/den"`` or an integer-like value into an exact rational."""
    if isinstance(value, bool):
        raise FusionDatumError(f"cannot parse rational from {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise FusionDatumError(f"cannot parse rational from {value!r}") from exc


def format_fraction(value: Fraction) -> str:
    """Render an exact rational as ``"num/den"`` (or a bare integer)."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass(frozen=True)
class FusionDatum:
    """Fusion algebra presentation used as input to all rank computations.

    Fields:
        labels: ordered label identifiers (ints for built-ins, strings for
            data loaded from files).
        dual: the duality involution, as a map on labels.
        unit: the unit label.
        n3_table: genus-0 three-point ranks, keyed by *sorted label-index*
            triples; absent keys mean rank 0.
        weights: rational weight per label; the unit weight is 0 and
            weights are duality-invariant.
        anomaly: the rational central-charge constant.

    Construction validates every structural axiom and raises
    :class:`FusionDatumError` naming the violated one.
    """

    labels: tuple[Label, ...]
    dual: Mapping[Label, Label]
    unit: Label
    n3_table: Mapping[tuple[int, int, int], int]
    weights: Mapping[Label, Fraction]
    anomaly: Fraction
    name: str = field(default="custom", compare=False)

    def __post_init__(self) -> None:
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        index = {m: i for i, m in enumerate(labels)}
        if len(index) != len(labels) or not labels:
            raise FusionDatumError("labels must be a nonempty set without repeats")
        object.__setattr__(self, "dual", dict(self.dual))
        object.__setattr__(
            self, "weights", {m: parse_fraction(w) for m, w in self.weights.items()}
        )
        object.__setattr__(self, "anomaly", parse_fraction(self.anomaly))
        table: dict[tuple[int, int, int], int] = {}
        for key, value in self.n3_table.items():
            if int(value) != value or value < 0:
                raise FusionDatumError("n3 values must be nonnegative integers")
            skey = tuple(sorted(key))
            if any(i not in range(len(labels)) for i in skey):
                raise FusionDatumError("n3 keys must be label-index triples")
            if table.setdefault(skey, int(value)) != int(value):
                raise FusionDatumError("n3 must be invariant under permutations")
        object.__setattr__(self, "n3_table", {k: v for k, v in table.items() if v})
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_rank_memo", {})
        self._validate()
        object.__setattr__(
            self, "_dual_index", tuple(index[self.dual[m]] for m in labels)
        )

    def _validate(self) -> None:
        labels = set(self.labels)
        if set(self.dual) != labels or set(self.dual.values()) - labels:
            raise FusionDatumError("dual must be defined on exactly the label set")
        for m in self.labels:
            if self.dual[self.dual[m]] != m:
                raise FusionDatumError("dual must be an involution")
        if self.unit not in labels:
            raise FusionDatumError("unit must be a label")
        if self.dual[self.unit] != self.unit:
            raise FusionDatumError("unit must be self-dual")
        if set(self.weights) != labels:
            raise FusionDatumError("weights must be defined on exactly the label set")
        if self.weights[self.unit] != 0:
            raise FusionDatumError("unit weight must be zero")
        for m in self.labels:
            if self.weights[m] != self.weights[self.dual[m]]:
                raise FusionDatumError("weights must be duality-invariant")
        unit_idx = self._index[self.unit]
        for i, m in enumerate(self.labels):
            for j in range(len(self.labels)):
                expect = 1 if self.dual[m] == self.labels[j] else 0
                if self.n3_by_index(i, j, unit_idx) != expect:
                    raise FusionDatumError(
                        "n3(mu, nu, unit) must equal the duality pairing"
                    )

    # -- lookups ---------------------------------------------------------

    def index(self, label: Label) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise InvalidInputError(f"unknown label {label!r}") from None

    def dual_label(self, label: Label) -> Label:
        return self.dual[self.labels[self.index(label)]]

    def weight(self, label: Label) -> Fraction:
        return self.weights[self.labels[self.index(label)]]

    def n3_by_index(self, i: int, j: int, k: int) -> int:
        return self.n3_table.get(tuple(sorted((i, j, k))), 0)

    def n3(self, a: Label, b: Label, c: Label) -> int:
        return self.n3_by_index(self.index(a), self.index(b), self.index(c))

    @property
    def num_labels(self) -> int:
        return len(self.labels)


@lru_cache(maxsize=None)
def builtin_sl2(level: int) -> FusionDatum:
    """The sl_2 fusion datum at the given level.

    Labels are box counts ``0..level``; duality is trivial, the unit is 0,
    ``weight(a) = a(a+2) / (4(level+2))`` and the anomaly is
    ``3*level/(level+2)``.  The three-point table is the level-truncated
    Clebsch-Gordan rule: rank 1 exactly when ``a+b+c`` is even and
    ``|a-b| <= c <= min(a+b, 2*level-a-b)``, else 0.
    """
    if level < 1:
        raise InvalidInputError("level must be a positive integer")
    labels = tuple(range(level + 1))
    n3 = {}
    for a in labels:
        for b in labels[a:]:
            for c in labels[b:]:
                if (a + b + c) % 2 == 0 and c <= a + b and a + b + c <= 2 * level:
                    n3[(a, b, c)] = 1
    return FusionDatum(
        labels=labels,
        dual={a: a for a in labels},
        unit=0,
        n3_table=n3,
        weights={a: Fraction(a * (a + 2), 4 * (level + 2)) for a in labels},
        anomaly=Fraction(3 * level, level + 2),
        name=f"sl2(level={level})",
    )


@lru_cache(maxsize=None)
def builtin_slr_level1(r: int) -> FusionDatum:
    """The sl_r level-1 fusion datum.

    Labels ``0..r-1`` index the fundamental-weight orbits; ``dual(i) =
    (r-i) mod r``, ``weight(i) = i(r-i)/(2r)``, anomaly ``r-1``, and the
    three-point rank is 1 exactly when ``a+b+c = 0 mod r``.
    """
    if r < 2:
        raise InvalidInputError("r must be at least 2")
    labels = tuple(range(r))
    n3 = {}
    for a in labels:
        for b in labels[a:]:
            for c in labels[b:]:
                if (a + b + c) % r == 0:
                    n3[(a, b, c)] = 1
    return FusionDatum(
        labels=labels,
        dual={i: (r - i) % r for i in labels},
        unit=0,
        n3_table=n3,
        weights={i: Fraction(i * (r - i), 2 * r) for i in labels},
        anomaly=Fraction(r - 1),
        name=f"slr1(r={r})",
    )


def rank(datum: FusionDatum, g: int, labels: Sequence[Label]) -> int:
    """Rank d_g(labels) of the bundle of conformal blocks, by gluing.

    The recursion trades one genus for a dual pair of extra labels,

        d_g(mu) = sum_nu d_{g-1}(mu, nu, nu*),

    and splits off genus-0 three-point factors at genus 0,

        d_0(mu_1, ..., mu_n) = sum_nu d_0(mu_1, mu_2, nu) d_0(nu*, mu_3, ...),

    down to the base cases d_0(a,b,c) = n3(a,b,c), d_0(mu,nu) = [nu = mu*],
    d_0(mu) = [mu = unit] and d_0() = 1.  Results are memoized per datum on
    (g, label multiset), so the value is manifestly S_n-invariant.
    """
    if g < 0:
        raise InvalidInputError("genus must be nonnegative")
    idx = tuple(sorted(datum.index(m) for m in labels))
    return rank_by_indices(datum, g, idx)


def rank_by_indices(datum: FusionDatum, g: int, idx: tuple[int, ...]) -> int:
    """Rank with labels given as a sorted tuple of label indices."""
    memo = datum._rank_memo
    key = (g, idx)
    cached = memo.get(key)
    if cached is not None:
        return cached
    dual = datum._dual_index
    if g > 0:
        total = 0
        for v in range(datum.num_labels):
            total += rank_by_indices(datum, g - 1, tuple(sorted(idx + (v, dual[v]))))
    else:
        n = len(idx)
        if n == 0:
            total = 1
        elif n == 1:
            total = 1 if idx[0] == datum.index(datum.unit) else 0
        elif n == 2:
            total = 1 if idx[1] == dual[idx[0]] else 0
        elif n == 3:
            total = datum.n3_by_index(*idx)
        else:
            a, b, rest = idx[0], idx[1], idx[2:]
            total = 0
            for v in range(datum.num_labels):
                t = datum.n3_by_index(a, b, v)
                if t:
                    total += t * rank_by_indices(
                        datum, 0, tuple(sorted((dual[v],) + rest))
                    )
    memo[key] = total
    return total


def anomaly_prefactor_exponent(datum: FusionDatum) -> Fraction:
    """Coefficient of lambda_1 in the global exponential prefactor: -anomaly/2."""
    return -datum.anomaly / 2


# -- JSON interchange -----------------------------------------------------


_REQUIRED_FIELDS = ("labels", "dual", "unit", "n3", "weights", "anomaly")


def load_fusion_datum(text: str) -> FusionDatum:
    """Parse the JSON fusion-datum interchange format.

    Expected shape::

        {"labels": [...], "dual": {label: label}, "unit": label,
         "n3": [{"a":..,"b":..,"c":..,"value":int}, ...],
         "weights": {label: "num/den"}, "anomaly": "num/den"}

    Label names that are all decimal integers are interned as ints, so a
    file written from a built-in datum loads back equal to it.  Structural
    axioms are re-validated; violations raise :class:`FusionDatumError`
    naming the failed axiom.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FusionDatumError(f"parse error: {exc}") from exc
    if not isinstance(data, dict):
        raise FusionDatumError("parse error: top level must be an object")
    for fieldname in _REQUIRED_FIELDS:
        if fieldname not in data:
            raise FusionDatumError(f"missing field {fieldname!r}")
    raw_labels = [str(x) for x in data["labels"]]
    numeric = all(s.lstrip("-").isdigit() for s in raw_labels)
    conv = (lambda s: int(str(s))) if numeric else (lambda s: str(s))
    labels = tuple(conv(x) for x in raw_labels)
    index = {m: i for i, m in enumerate(labels)}

    def known(raw: object) -> Label:
        label = conv(raw)
        if label not in index:
            raise FusionDatumError(f"unknown label {raw!r} in table entry")
        return label

    dual = {known(k): known(v) for k, v in dict(data["dual"]).items()}
    unit = known(data["unit"])
    n3: dict[tuple[int, int, int], int] = {}
    for entry in data["n3"]:
        key = tuple(sorted(index[known(entry[f])] for f in ("a", "b", "c")))
        value = int(entry["value"])
        if n3.setdefault(key, value) != value:
            raise FusionDatumError("n3 must be invariant under permutations")
    weights = {known(k): parse_fraction(v) for k, v in dict(data["weights"]).items()}
    return FusionDatum(
        labels=labels,
        dual=dual,
        unit=unit,
        n3_table=n3,
        weights=weights,
        anomaly=parse_fraction(data["anomaly"]),
    )


def dump_fusion_datum(datum: FusionDatum) -> str:
    """Serialize a datum to the JSON interchange format (see loader)."""
    body = {
        "labels": [str(m) for m in datum.labels],
        "dual": {str(m): str(datum.dual[m]) for m in datum.labels},
        "unit": str(datum.unit),
        "n3": [
            {
                "a": str(datum.labels[i]),
                "b": str(datum.labels[j]),
                "c": str(datum.labels[k]),
                "value": value,
            }
            for (i, j, k), value in sorted(datum.n3_table.items())
        ],
        "weights": {str(m): format_fraction(datum.weights[m]) for m in datum.labels},
        "anomaly": format_fraction(datum.anomaly),
    }
    return json.dumps(body, indent=2, sort_keys=True)
