"""
Noncommutative polynomials in two symbols with exact rational coefficients.

Words are plain strings over the alphabet ``"AB"``; the empty string is the
unit word. Ordering of letters is ``A < B``, which is also Python's string
order, so canonical rotations are simply ``min`` over rotations.
"""

import json
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from types import MappingProxyType

from ..errors import UnsupportedOrderError

__all__ = [
    "NCPoly",
    "canonical_word",
    "cyclic_reduce",
    "generator_parts",
    "tk_polynomial",
    "load_golden",
    "golden_payload",
    "TK_MAX_ORDER",
]

ALPHABET = "AB"
TK_MAX_ORDER = 8


def _check_word(word):
    if not isinstance(word, str) or any(c not in ALPHABET for c in word):
        raise ValueError(f"invalid word {word!r}; letters must be A or B")
    return word


class NCPoly:
    """Immutable noncommutative polynomial in ``A`` and ``B``.

    Parameters
    ----------
    terms : mapping of str to number, optional
        Word to coefficient. Coefficients are converted to
        :class:`fractions.Fraction`; zero coefficients are dropped.

    Examples
    --------
    >>> a, b = NCPoly.symbol("A"), NCPoly.symbol("B")
    >>> str(a * b - b * a)
    '1 AB\\n-1 BA'
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms=None):
        clean = {}
        for word, coef in (terms or {}).items():
            coef = Fraction(coef)
            if coef:
                clean[_check_word(word)] = coef
        self._terms = MappingProxyType(dict(sorted(clean.items(), key=_term_key)))
        self._hash = None

    # constructors -----------------------------------------------------------
    @classmethod
    def symbol(cls, letter):
        return cls({_check_word(letter): 1})

    @classmethod
    def constant(cls, value):
        return cls({"": value})

    @classmethod
    def zero(cls):
        return cls()

    # container protocol -----------------------------------------------------
    @property
    def terms(self):
        """Read-only mapping word -> Fraction, sorted by (degree, word)."""
        return self._terms

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def is_zero(self):
        return not self._terms

    def coefficient(self, word):
        return self._terms.get(word, Fraction(0))

    def degrees(self):
        """Sorted list of word lengths that occur."""
        return sorted({len(w) for w in self._terms})

    def homogeneous_part(self, m):
        """Terms of degree `m`."""
        return NCPoly({w: c for w, c in self._terms.items() if len(w) == m})

    def degree_range(self, lo, hi):
        """Terms with ``lo <= degree <= hi``."""
        return NCPoly({w: c for w, c in self._terms.items() if lo <= len(w) <= hi})

    # arithmetic -------------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, NCPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return NCPoly.constant(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for w, c in other._terms.items():
            out[w] = out.get(w, 0) + c
        return NCPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return NCPoly({w: -c for w, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return NCPoly({w: c * other for w, c in self._terms.items()})
        if not isinstance(other, NCPoly):
            return NotImplemented
        out = {}
        for w1, c1 in self._terms.items():
            for w2, c2 in other._terms.items():
                w = w1 + w2
                out[w] = out.get(w, 0) + c1 * c2
        return NCPoly(out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * other
        return NotImplemented

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("exponent must be a non-negative integer")
        out = NCPoly.constant(1)
        for _ in range(n):
            out = out * self
        return out

    # comparison / display ---------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, NCPoly):
            return dict(self._terms) == dict(other._terms)
        if isinstance(other, (int, Fraction)):
            return self == NCPoly.constant(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def __str__(self):
        if not self._terms:
            return "0"
        return "\n".join(f"{c} {w or '1'}" for w, c in self._terms.items())

    def __repr__(self):
        body = ", ".join(f"{w!r}: {str(c)!r}" for w, c in self._terms.items())
        return f"NCPoly({{{body}}})"


def _term_key(item):
    word = item[0]
    return (len(word), word)


def canonical_word(word):
    """Lexicographically smallest rotation of `word` (with ``A < B``)."""
    _check_word(word)
    if len(word) < 2:
        return word
    return min(word[i:] + word[:i] for i in range(len(word)))


def cyclic_reduce(p):
    """Replace each word by its canonical rotation and merge coefficients.

    Two polynomials with equal reductions have equal traces under every
    matrix substitution.
    """
    out = {}
    for w, c in p.terms.items():
        cw = canonical_word(w)
        out[cw] = out.get(cw, 0) + c
    return NCPoly(out)


def _check_order(k):
    if not isinstance(k, int) or isinstance(k, bool) or not 1 <= k <= TK_MAX_ORDER:
        raise UnsupportedOrderError(f"order k must be an integer in [1, {TK_MAX_ORDER}], got {k!r}")


@lru_cache(maxsize=None)
def _generator(k):
    a, b = NCPoly.symbol("A"), NCPoly.symbol("B")
    x = a + b - a * b
    total = NCPoly.zero()
    # powers of x, a, b built incrementally
    xp, ap, bp = NCPoly.constant(1), NCPoly.constant(1), NCPoly.constant(1)
    for j in range(1, k):
        xp, ap, bp = xp * x, ap * a, bp * b
        total = total + (xp - ap - bp) * Fraction(1, j)
    return total


def generator_parts(k):
    """Homogeneous parts ``P_m`` of the order-`k` generating expansion.

    The word length of each monomial equals its power of the expansion
    parameter, since ``A`` and ``B`` carry one power each.

    Returns
    -------
    dict
        ``m -> P_m`` for ``1 <= m <= 2k - 2`` (empty for ``k = 1``).
    """
    _check_order(k)
    gen = _generator(k)
    return {m: gen.homogeneous_part(m) for m in range(1, 2 * k - 1)}


def tk_polynomial(k):
    """Correction polynomial ``T_k = sum_{m=k}^{2k-2} P_m``.

    Parameters
    ----------
    k : int
        Regularization order, ``1 <= k <= 8``.

    Returns
    -------
    NCPoly
        Unreduced form; apply :func:`cyclic_reduce` for the canonical one.

    Raises
    ------
    UnsupportedOrderError
        If `k` is out of range.
    """
    _check_order(k)
    return _generator(k).degree_range(k, 2 * k - 2)


# ---------------------------------------------------------------------------
# golden file
# ---------------------------------------------------------------------------

GOLDEN_ORDERS = range(1, 6)


def golden_payload(orders=GOLDEN_ORDERS):
    """JSON-ready list of canonical ``T_k`` for the given orders."""
    payload = []
    for k in orders:
        poly = cyclic_reduce(tk_polynomial(k))
        terms = [
            {"word": w, "num": c.numerator, "den": c.denominator}
            for w, c in poly.terms.items()
        ]
        payload.append({"k": k, "terms": terms})
    return payload


def load_golden(path=None):
    """Read ``tk_polynomials.json`` into ``{k: NCPoly}``.

    Parameters
    ----------
    path : path-like, optional
        Defaults to the copy shipped with the package.
    """
    if path is None:
        text = resources.files("jplab.data").joinpath("tk_polynomials.json").read_text()
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    out = {}
    for entry in json.loads(text):
        out[int(entry["k"])] = NCPoly(
            {t["word"]: Fraction(int(t["num"]), int(t["den"])) for t in entry["terms"]}
        )
    return out
