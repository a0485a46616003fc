"""Words over a finite alphabet ``{0, ..., A-1}``.

Words are plain tuples of ints. Strings are accepted wherever a word is
expected; for alphabets of size at most 10 each character is one digit,
otherwise symbols are separated by ``.`` (``"10.3.2"``).
"""
from __future__ import annotations

from typing import Iterable, Sequence, Union

from .errors import ArgumentError

Word = tuple
WordLike = Union[str, Sequence[int]]

EMPTY: Word = ()


def as_word(w: WordLike, alphabet_size: int | None = None) -> Word:
    """Coerce ``w`` to a tuple of ints, validating symbols against the alphabet."""
    if isinstance(w, str):
        text = w.strip()
        if text in ("", "ε", "-"):
            word: tuple = ()
        elif "." in text or "," in text:
            word = tuple(int(s) for s in text.replace(",", ".").split(".") if s != "")
        else:
            word = tuple(int(c) for c in text)
    else:
        word = tuple(int(a) for a in w)
    if alphabet_size is not None:
        for a in word:
            if not 0 <= a < alphabet_size:
                raise ArgumentError(f"symbol {a} outside alphabet of size {alphabet_size}")
    return word


def format_word(w: Iterable[int], alphabet_size: int = 10) -> str:
    w = tuple(w)
    if alphabet_size <= 10:
        return "".join(str(a) for a in w)
    return ".".join(str(a) for a in w)


def subword(w: WordLike, i: int, j: int) -> Word:
    """Return ``w_i ... w_j`` using 1-based inclusive indices."""
    w = as_word(w)
    if not (1 <= i <= j <= len(w)):
        raise ArgumentError(f"need 1 <= i <= j <= |w|, got i={i}, j={j}, |w|={len(w)}")
    return w[i - 1 : j]


def lex_leq_prefix(v: Sequence[int], z: Sequence[int]) -> bool:
    """Lexicographic pre-order on finite words, compared on the common length."""
    m = min(len(v), len(z))
    return tuple(v[:m]) <= tuple(z[:m])


def longest_run(w: WordLike, symbol: int = 0) -> int:
    best = run = 0
    for a in as_word(w):
        run = run + 1 if a == symbol else 0
        best = max(best, run)
    return best


def repeat_to(w: WordLike, length: int) -> Word:
    """Periodic continuation ``w w w ...`` cut to ``length`` symbols."""
    w = as_word(w)
    if not w:
        raise ArgumentError("cannot repeat the empty word")
    reps = -(-length // len(w))
    return (tuple(w) * reps)[:length]
