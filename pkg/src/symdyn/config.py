"""Strict ``key = value`` run configuration and construction of models and
potentials from it.

Lines starting with ``#`` are comments. Every key must be known and every
value must parse and sit inside its documented range; anything else raises
:class:`ConfigError`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable

from .errors import ConfigError, SymdynError
from .models import (BetaModel, GapSet, SFTModel, SGapModel, ShiftModel, SoficModel, even_shift, full_shift,
                     golden_mean, sft_from_matrix)
from .potentials import HolderSeries, LocallyConstant, Potential
from .words import as_word

TASKS = ("enumerate", "entropy", "pressure", "spec-check", "decompose", "verify-uniqueness", "mme", "gibbs",
         "periodic", "beta-code", "entropy-gap", "separated")
MODELS = ("golden", "full", "sft", "even", "sofic", "beta", "sgap")


def _int_in(lo: int, hi: int) -> Callable[[str], int]:
    def parse(text: str) -> int:
        v = int(text)
        if not lo <= v <= hi:
            raise ValueError(f"must lie in [{lo}, {hi}]")
        return v
    return parse


def _float_in(lo: float, hi: float, open_lo: bool = False) -> Callable[[str], float]:
    def parse(text: str) -> float:
        v = float(Fraction(text))
        if v < lo or v > hi or (open_lo and v == lo):
            raise ValueError(f"must lie in {'(' if open_lo else '['}{lo}, {hi}]")
        return v
    return parse


def _choice(options) -> Callable[[str], str]:
    def parse(text: str) -> str:
        if text not in options:
            raise ValueError(f"must be one of {', '.join(options)}")
        return text
    return parse


def _window(text: str) -> tuple[int, int]:
    a, _, b = text.partition(":")
    lo, hi = int(a), int(b)
    if not 1 <= lo <= hi:
        raise ValueError("window a:b needs 1 <= a <= b")
    return lo, hi


def _int_list(text: str) -> list[int]:
    vals = [int(t) for t in text.replace(",", " ").split()]
    if not vals or any(v < 0 for v in vals):
        raise ValueError("need a nonempty list of nonnegative integers")
    return vals


def _float_list(text: str) -> list[float]:
    vals = [float(Fraction(t)) for t in text.replace(",", " ").split()]
    if not vals:
        raise ValueError("need a nonempty list")
    return vals


def _fraction_list(text: str) -> list[Fraction]:
    vals = [Fraction(t) for t in text.replace(",", " ").split()]
    if not vals or any(v <= 0 for v in vals):
        raise ValueError("weights must be positive")
    return vals


def _matrix(text: str) -> list[list[int]]:
    rows = [[int(t) for t in row.split()] for row in text.split(";") if row.strip()]
    if not rows or any(len(r) != len(rows) for r in rows):
        raise ValueError("matrix must be square, rows separated by ';'")
    return rows


def _word(text: str) -> tuple:
    return as_word(text)


def _text(text: str) -> str:
    return text


def _fraction(text: str) -> Fraction:
    return Fraction(text)


# key -> (parser, help)
KEYS: dict[str, tuple[Callable[[str], Any], str]] = {
    "task": (_choice(TASKS), "task to run"),
    "model": (_choice(MODELS), "shift model kind"),
    "matrix": (_matrix, "0/1 transition matrix, rows separated by ';'"),
    "symbols": (_int_in(1, 9), "alphabet size of the full shift"),
    "edges": (_text, "sofic edges 'src-dst:label, ...'"),
    "z": (_word, "z-prefix digits of a beta-shift"),
    "beta": (_text, "beta (rational, decimal, 'golden' or an algebraic expression)"),
    "z_length": (_int_in(1, 512), "z-prefix length derived from beta"),
    "gaps": (_text, "gap set of an S-gap shift, e.g. '1,2,4' or '2:3' (2, 5, 8, ...)"),
    "depth": (_int_in(1, 30), "word length / enumeration depth"),
    "window": (_window, "estimation window a:b"),
    "tau_max": (_int_in(0, 8), "largest gap searched"),
    "variant": (_choice(("leq", "strong", "periodic")), "specification variant"),
    "grow": (_choice(("yes", "no")), "grow the depth until a counterexample appears"),
    "M": (_int_list, "list of M values for G^M"),
    "rule": (_choice(("trivial", "beta-canonical", "threshold")), "decomposition rule"),
    "r": (_float_in(0.0, 100.0), "threshold rate"),
    "potential": (_choice(("zero", "symbols", "table", "geometric", "harmonic")), "potential kind"),
    "values": (_float_list, "potential values on symbols"),
    "weights": (_fraction_list, "exact values of exp(phi) on symbols"),
    "table": (_text, "locally constant table 'word:value, ...'"),
    "ratio": (_float_in(0.0, 1.0, open_lo=True), "geometric coefficient ratio"),
    "terms": (_int_in(1, 100000), "number of series terms"),
    "base": (_float_list, "base values of the series potential on symbols"),
    "n": (_int_in(2, 40), "time horizon of the empirical measure"),
    "cyl_depth": (_int_in(1, 12), "cylinder depth for measure comparisons"),
    "h": (_float_in(0.0, 10.0), "hypothesised entropy or pressure"),
    "tol": (_float_in(0.0, 1.0), "tolerance"),
    "x": (_fraction, "point in [0,1)"),
    "eps": (_fraction, "metric scale"),
    "resolution": (_int_in(10, 10**12), "grid size G (resolution 1/G)"),
    "horizon": (_int_in(0, 200), "probe horizon"),
    "y_matrix": (_matrix, "transition matrix of the subshift Y"),
    "marker": (_word, "word absent from L(Y)"),
    "alpha": (_fraction, "proportion of marked windows"),
    "window_size": (_int_in(1, 20), "surgery window length"),
    "N": (_int_list, "numbers of windows"),
    "w1": (_word, "first word"),
    "w2": (_word, "second word"),
    "k_max": (_int_in(1, 12), "largest family size"),
    "seed": (_int_in(0, 2**31 - 1), "random seed"),
    "format": (_choice(("table", "csv", "json")), "output format"),
    "out": (_text, "output path"),
    "plot_dir": (_text, "directory for figures"),
    "glue_rows": (_int_in(0, 100000), "glue-table rows shown"),
}


def parse_value(key: str, text: str):
    if key not in KEYS:
        raise ConfigError(f"unknown configuration key {key!r}")
    parser, _ = KEYS[key]
    try:
        return parser(text.strip())
    except (ValueError, ZeroDivisionError, SymdynError) as exc:
        raise ConfigError(f"bad value for {key!r}: {text.strip()!r} ({exc})") from None


def parse_config(text: str) -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected key = value")
        key = key.strip()
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = parse_value(key, value)
    return out


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_config(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None


@dataclass
class RunConfig:
    values: dict

    def get(self, key: str, default=None):
        if key not in KEYS:
            raise ConfigError(f"unknown configuration key {key!r}")
        return self.values.get(key, default)

    def require(self, key: str):
        if key not in self.values:
            raise ConfigError(f"task needs the key {key!r}")
        return self.values[key]


def build_model(cfg: RunConfig) -> ShiftModel:
    kind = cfg.get("model", "golden")
    try:
        if kind == "golden":
            return golden_mean()
        if kind == "full":
            return full_shift(cfg.get("symbols", 2))
        if kind == "even":
            return even_shift()
        if kind == "sft":
            return sft_from_matrix(cfg.require("matrix"))
        if kind == "sofic":
            edges = []
            for item in cfg.require("edges").split(","):
                arrow, _, label = item.strip().partition(":")
                src, _, dst = arrow.partition("-")
                edges.append((int(src), int(dst), int(label)))
            return SoficModel(edges)
        if kind == "beta":
            if "z" in cfg.values:
                return BetaModel(cfg.values["z"])
            return BetaModel.from_beta(cfg.require("beta"), cfg.get("z_length", 64))
        if kind == "sgap":
            return SGapModel(GapSet.parse(cfg.require("gaps")))
    except ValueError as exc:
        raise ConfigError(f"bad model description: {exc}") from None
    raise ConfigError(f"unknown model {kind!r}")  # pragma: no cover


def build_potential(cfg: RunConfig, alphabet_size: int) -> Potential:
    kind = cfg.get("potential", "zero")
    if kind == "zero":
        return LocallyConstant.constant(0.0, alphabet_size)
    if kind == "symbols":
        vals = cfg.require("values")
        if len(vals) != alphabet_size:
            raise ConfigError(f"'values' needs {alphabet_size} entries")
        weights = cfg.get("weights")
        if weights is not None and len(weights) != alphabet_size:
            raise ConfigError(f"'weights' needs {alphabet_size} entries")
        return LocallyConstant.on_symbols(vals, weights)
    if kind == "table":
        table = {}
        for item in cfg.require("table").split(","):
            w, _, v = item.strip().partition(":")
            table[as_word(w, alphabet_size)] = float(Fraction(v))
        ks = {len(w) for w in table}
        if len(ks) != 1:
            raise ConfigError("table words must share one length")
        return LocallyConstant(ks.pop(), table, alphabet_size, default=0.0)
    base = cfg.get("base", [0.0] * alphabet_size)
    if len(base) != alphabet_size:
        raise ConfigError(f"'base' needs {alphabet_size} entries")
    if kind == "geometric":
        return HolderSeries.geometric(cfg.get("ratio", 0.5), cfg.get("terms", 40), base)
    return HolderSeries.harmonic(cfg.get("terms", 1000), base)
