"""Extraction of p-values, test statistics and sample sizes from plain text.

Pattern catalog (whitespace-tolerant, case as noted):

========  =============================================  ==================
kind      surface form                                   params
========  =============================================  ==================
bare_p    ``p < .05``, ``ps > 0.1``, ``p = 1.2e-4``      none
t_test    ``t(12) = 4.3, p = .01``                       ``[df]``
f_test    ``F(21, 30) = 2,3, p < .01``                   ``[df1, df2]``
chi2      ``χ2(1, N = 320) = 22.31, p < .001``           ``[df]`` or ``[df, n]``
r_corr    ``r(48) = -.32, p = .02``                      ``[df]``
z_test    ``z = 2.81, p = .005``                         none
========  =============================================  ==================

The chi-squared head accepts ``χ2``, ``χ²``, ``X2``, ``x2``, ``×2`` (a common
PDF-to-text rendering of χ), ``X^2`` and ``chi-square``. Operators are
``<``, ``=``, ``>`` plus ``<=``/``≤`` (read as ``<``) and ``>=``/``≥``.
Numbers may carry a sign (ASCII or Unicode minus), omit the leading zero, or
use an exponent. Inside a test expression a comma between two digits is a
decimal separator only when a ``, p`` follows, so ``F(21,30)=2,3, p<0.01``
parses as F = 2.3 without disturbing the df list.

An expression whose comparison operator is missing (``p .01``,
``t(12) 4.3, p = .01``) is not a mention; it is reported in the rejected
list together with p-values outside [0, 1].
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Literal, Sequence

logger = logging.getLogger(__name__)


class Kind(str, Enum):
    bare_p = "bare_p"
    t_test = "t_test"
    f_test = "f_test"
    chi2 = "chi2"
    r_corr = "r_corr"
    z_test = "z_test"


class SizeSource(str, Enum):
    free_text_N = "free_text_N"
    chi2_arg = "chi2_arg"
    derived_from_df = "derived_from_df"


OPERATOR_SIGN = {"lt": -1, "eq": 0, "gt": 1}
SIGNIFICANCE_LEVEL = 0.05

_OPS = {"<": "lt", "<=": "lt", "≤": "lt", "=": "eq", ">": "gt", ">=": "gt", "≥": "gt"}

_MINUS = "−"
_NUM = rf"[+\-{_MINUS}]?(?:\d+(?:\.\d+)?|\.\d+)(?:[eE][+\-{_MINUS}]?\d+)?"
_OP = r"<=|>=|≤|≥|<|>|="
_DF = r"\d+(?:\.\d+)?"
_STAT = (
    rf"[+\-{_MINUS}]?(?:\d+,\d+(?=\s*[,;]\s*[pP])|\d+(?:\.\d+)?|\.\d+)"
    rf"(?:[eE][+\-{_MINUS}]?\d+)?"
)
# Operators are optional in the grammar so that a corrupted expression is
# consumed whole and reported, instead of leaking a partial match.
_STAT_TAIL = rf"\s*(?P<sop>{_OP})?\s*(?P<stat>{_STAT})"
_P_TAIL = rf"\s*[,;:]?\s*(?P<pw>[pP]s?)\s*(?P<pop>{_OP})?\s*(?P<p>{_NUM})"
_NB = r"(?<![A-Za-z0-9_])"

_TEST_PATTERNS: dict[Kind, re.Pattern] = {
    Kind.t_test: re.compile(rf"{_NB}[tT]\s*\(\s*(?P<a1>{_DF})\s*\){_STAT_TAIL}{_P_TAIL}"),
    Kind.f_test: re.compile(
        rf"{_NB}[fF]\s*\(\s*(?P<a1>{_DF})\s*,\s*(?P<a2>{_DF})\s*\){_STAT_TAIL}{_P_TAIL}"
    ),
    Kind.chi2: re.compile(
        rf"(?<![A-Za-z0-9_])(?:χ|𝜒|×|X|x|[cC]hi|CHI)\s*(?:-\s*squared?|\s+squared?|\^\s*2|²|2)"
        rf"\s*\(\s*(?P<a1>{_DF})\s*"
        rf"(?:,\s*(?:(?P<nexpr>[nN]\s*=\s*(?P<n>\d{{1,3}}(?:,\d{{3}})+|\d+))|(?P<a2>\d+)))?\s*\)"
        rf"{_STAT_TAIL}{_P_TAIL}"
    ),
    Kind.r_corr: re.compile(rf"{_NB}r\s*\(\s*(?P<a1>{_DF})\s*\){_STAT_TAIL}{_P_TAIL}"),
    Kind.z_test: re.compile(rf"{_NB}[zZ]{_STAT_TAIL}\s*[,;]\s*(?P<pw>[pP]s?)\s*(?P<pop>{_OP})?\s*(?P<p>{_NUM})"),
}
_BARE_P = re.compile(rf"{_NB}(?P<pw>[pP]s?)(?:\s*(?P<pop>{_OP})\s*|\s+|(?=[.\d]))(?P<p>{_NUM})")
_FREE_N = re.compile(r"(?<![A-Za-z0-9_])[nN]\s*=\s*(?P<n>\d{1,3}(?:,\d{3})+|\d+)(?![\d.,]\d)")


def _to_float(s: str) -> float:
    return float(s.replace(_MINUS, "-").replace(",", "."))


@dataclass(frozen=True)
class StatMention:
    kind: Kind
    params: tuple[float, ...]
    stat_value: float | None
    p_operator: Literal["lt", "eq", "gt"]
    p_value: float
    char_span: tuple[int, int]
    explicit_n: int | None = None
    # where the sample size inside a chi-squared head was found
    n_span: tuple[int, int] | None = None

    @property
    def has_test_statistic(self) -> bool:
        return self.kind is not Kind.bare_p

    @property
    def is_significant(self) -> bool:
        # "p > .05" reports a non-significant result even though the printed
        # value is at the threshold.
        return self.p_value <= SIGNIFICANCE_LEVEL and self.p_operator != "gt"

    def shifted(self, offset: int) -> "StatMention":
        n_span = None if self.n_span is None else (self.n_span[0] + offset, self.n_span[1] + offset)
        return StatMention(
            self.kind,
            self.params,
            self.stat_value,
            self.p_operator,
            self.p_value,
            (self.char_span[0] + offset, self.char_span[1] + offset),
            self.explicit_n,
            n_span,
        )


@dataclass(frozen=True)
class Rejected:
    kind: Kind
    char_span: tuple[int, int]
    reason: str


@dataclass
class StatScan:
    mentions: list[StatMention] = field(default_factory=list)
    rejected: list[Rejected] = field(default_factory=list)

    def diagnostics(self) -> dict:
        """Per-paper diagnostics record: count and spans of rejected candidates."""
        return {
            "rejected_count": len(self.rejected),
            "rejected": [
                {"kind": r.kind.value, "span": list(r.char_span), "reason": r.reason}
                for r in self.rejected
            ],
        }


def _candidate(kind: Kind, m: re.Match) -> StatMention | Rejected:
    span = m.span()
    if m.group("pop") is None:
        return Rejected(kind, span, "missing p-value operator")
    if kind is not Kind.bare_p and m.group("sop") is None:
        return Rejected(kind, span, "missing test-statistic operator")
    p = _to_float(m.group("p"))
    if not 0.0 <= p <= 1.0:
        return Rejected(kind, span, f"p-value {p:g} outside [0, 1]")

    params: tuple[float, ...] = ()
    stat = None
    explicit_n = None
    n_span = None
    if kind is not Kind.bare_p:
        stat = _to_float(m.group("stat"))
        groups = m.groupdict()
        params = tuple(_to_float(groups[g]) for g in ("a1", "a2") if groups.get(g) is not None)
        if kind is Kind.chi2:
            if groups.get("n") is not None:
                explicit_n = int(groups["n"].replace(",", ""))
                n_span = m.span("nexpr")
            elif groups.get("a2") is not None:
                n_span = m.span("a2")
    return StatMention(
        kind=kind,
        params=params,
        stat_value=stat,
        p_operator=_OPS[m.group("pop")],
        p_value=p,
        char_span=span,
        explicit_n=explicit_n,
        n_span=n_span,
    )


def parse_statistics(text: str) -> StatScan:
    """Scan ``text`` for statistical expressions, keeping the rejects."""
    found: list[tuple[int, int, Kind, re.Match]] = []
    for kind, pattern in _TEST_PATTERNS.items():
        for m in pattern.finditer(text):
            found.append((m.start(), -m.end(), kind, m))
    found.sort(key=lambda c: (c[0], c[1]))

    taken: list[tuple[int, int]] = []
    results: list[StatMention | Rejected] = []
    cursor = -1
    for start, neg_end, kind, m in found:
        if start < cursor:
            continue
        cursor = -neg_end
        taken.append((start, cursor))
        results.append(_candidate(kind, m))

    def covered(a: int, b: int) -> bool:
        return any(s < b and a < e for s, e in taken)

    for m in _BARE_P.finditer(text):
        if not covered(*m.span()):
            results.append(_candidate(Kind.bare_p, m))

    scan = StatScan()
    for item in sorted(results, key=lambda r: r.char_span):
        (scan.mentions if isinstance(item, StatMention) else scan.rejected).append(item)
    if scan.rejected:
        logger.debug("rejected %d statistical expression(s)", len(scan.rejected))
    return scan


def extract_stat_mentions(text: str, diagnostics: list[Rejected] | None = None) -> list[StatMention]:
    """Return well-formed statistical mentions sorted by position.

    Rejected candidates are appended to ``diagnostics`` when given.
    """
    scan = parse_statistics(text)
    if diagnostics is not None:
        diagnostics.extend(scan.rejected)
    return scan.mentions


@dataclass(frozen=True)
class SampleSizeMention:
    value: int
    source: SizeSource
    char_span: tuple[int, int]


def derive_sample_sizes(text: str, mentions: Sequence[StatMention]) -> list[SampleSizeMention]:
    out: list[SampleSizeMention] = []
    for m in mentions:
        if m.kind is Kind.chi2 and m.n_span is not None:
            value = m.explicit_n if m.explicit_n is not None else int(m.params[1])
            out.append(SampleSizeMention(value, SizeSource.chi2_arg, m.n_span))
        elif m.kind is Kind.t_test and m.params and float(m.params[0]).is_integer():
            out.append(SampleSizeMention(int(m.params[0]) + 1, SizeSource.derived_from_df, m.char_span))
    for m in _FREE_N.finditer(text):
        out.append(SampleSizeMention(int(m.group("n").replace(",", "")), SizeSource.free_text_N, m.span()))

    seen: set[tuple[int, tuple[int, int]]] = set()
    unique = []
    for s in out:
        key = (s.value, s.char_span)
        if s.value >= 1 and key not in seen:
            seen.add(key)
            unique.append(s)
    unique.sort(key=lambda s: (s.char_span, s.source.value))
    return unique


STAT_FEATURE_NAMES = (
    "real_p",
    "real_p_sign",
    "p_val_range",
    "num_hypo_tested",
    "extend_p",
    "num_significant",
    "sample_size",
)


@dataclass(frozen=True)
class StatFeatures:
    real_p: float = 1.0
    real_p_sign: int = 0
    p_val_range: float = 0.0
    num_hypo_tested: int = 0
    extend_p: bool = False
    num_significant: int = 0
    sample_size: int | None = None
    defaults: frozenset[str] = frozenset(STAT_FEATURE_NAMES)

    def as_dict(self) -> dict[str, float]:
        return {
            "real_p": float(self.real_p),
            "real_p_sign": float(self.real_p_sign),
            "p_val_range": float(self.p_val_range),
            "num_hypo_tested": float(self.num_hypo_tested),
            "extend_p": float(self.extend_p),
            "num_significant": float(self.num_significant),
            "sample_size": float(self.sample_size or 0),
        }


_AGGREGATE = {"max": max, "min": min, "sum": sum}


def derive_statistical_features(
    mentions: Iterable[StatMention],
    sample_sizes: Iterable[SampleSizeMention] = (),
    sample_size_rule: Literal["max", "min", "sum"] = "max",
) -> StatFeatures:
    mentions = sorted(mentions, key=lambda m: m.char_span)
    sizes = [s.value for s in sample_sizes]
    sample_size = _AGGREGATE[sample_size_rule](sizes) if sizes else None
    if not mentions:
        defaults = set(STAT_FEATURE_NAMES)
        if sample_size is not None:
            defaults.discard("sample_size")
        return StatFeatures(sample_size=sample_size, defaults=frozenset(defaults))

    pvals = [m.p_value for m in mentions]
    lowest = min(pvals)
    # first mention by position wins ties at the minimum
    argmin = next(m for m in mentions if m.p_value == lowest)
    n_tests = sum(m.has_test_statistic for m in mentions)
    return StatFeatures(
        real_p=lowest,
        real_p_sign=OPERATOR_SIGN[argmin.p_operator],
        p_val_range=max(pvals) - lowest,
        num_hypo_tested=n_tests,
        extend_p=n_tests > 0,
        num_significant=sum(m.is_significant for m in mentions),
        sample_size=sample_size,
        defaults=frozenset() if sample_size is not None else frozenset({"sample_size"}),
    )


def statistical_features_from_text(
    text: str, sample_size_rule: Literal["max", "min", "sum"] = "max"
) -> tuple[StatFeatures, StatScan]:
    scan = parse_statistics(text)
    sizes = derive_sample_sizes(text, scan.mentions)
    return derive_statistical_features(scan.mentions, sizes, sample_size_rule), scan
