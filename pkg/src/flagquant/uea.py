"""Exact universal enveloping algebra engine.

Elements are finite maps from canonical PBW monomials to coefficients.  A
canonical monomial is a non-decreasing tuple of Chevalley basis indices;
since the basis is ordered ``F < H < E`` this is exactly the ordering
n^- . h . n with each block sorted.

Coefficients are exact Gaussian rationals (sympy ``QQ_I``) unless an element
was built from floating input, in which case they are Python complex numbers
and the same rewrite path is used with floating arithmetic.
"""
from __future__ import annotations

import itertools
import math
import re
from collections import Counter

import numpy as np
from sympy.polys.domains import QQ, QQ_I
from sympy.utilities.iterables import multiset_permutations

from ._exact import conj, fmt_qqi, parse_qqi, qqi, to_complex
from .errors import ResourceError, UsageError
from .rootsys import RootDatum, Weight

MAX_DEGREE = 12


def _is_exact(c) -> bool:
    return isinstance(c, QQ_I.dtype)


def _coerce(c):
    """Exact for int/Fraction/QQ_I input, complex for floating input."""
    if isinstance(c, (float, complex, np.floating, np.complexfloating)):
        return complex(c)
    return qqi(c)


def _add_into(out: dict, key, value):
    v = out.get(key)
    v = value if v is None else v + value
    if v:
        out[key] = v
    else:
        out.pop(key, None)


# ---------------------------------------------------------------------------
# normal ordering


def _word_cache(rd: RootDatum) -> dict:
    cache = rd.__dict__.get("_pbw_cache")
    if cache is None:
        cache = {}
        rd.__dict__["_pbw_cache"] = cache
    return cache


def _normal_word(rd: RootDatum, word: tuple) -> dict:
    """Canonical expansion of a word with integer coefficients (memoized)."""
    cache = _word_cache(rd)
    hit = cache.get(word)
    if hit is not None:
        return hit
    for i in range(len(word) - 1):
        if word[i] > word[i + 1]:
            break
    else:
        cache[word] = {word: 1}
        return cache[word]
    x, y = word[i], word[i + 1]
    out = dict(_normal_word(rd, word[:i] + (y, x) + word[i + 2:]))
    for z, c in rd.bracket(x, y):
        for m, v in _normal_word(rd, word[:i] + (z,) + word[i + 2:]).items():
            _add_into(out, m, c * v)
    cache[word] = out
    return out


def _normal_word_random(rd: RootDatum, word: tuple, rng) -> dict:
    """Same expansion, rewriting at a randomly chosen descent (no memo)."""
    descents = [i for i in range(len(word) - 1) if word[i] > word[i + 1]]
    if not descents:
        return {word: 1}
    i = descents[rng.integers(len(descents))]
    x, y = word[i], word[i + 1]
    out = dict(_normal_word_random(rd, word[:i] + (y, x) + word[i + 2:], rng))
    for z, c in rd.bracket(x, y):
        for m, v in _normal_word_random(rd, word[:i] + (z,) + word[i + 2:], rng).items():
            _add_into(out, m, c * v)
    return out


class PBWElement:
    """Normal-ordered element of U(g)."""

    __slots__ = ("rd", "terms")

    def __init__(self, rd: RootDatum, terms: dict | None = None):
        self.rd = rd
        self.terms = {}
        for m, c in (terms or {}).items():
            c = _coerce(c)
            if c:
                self.terms[tuple(m)] = c

    # constructors
    @classmethod
    def one(cls, rd: RootDatum, coeff=1) -> "PBWElement":
        return cls(rd, {(): coeff})

    @classmethod
    def zero(cls, rd: RootDatum) -> "PBWElement":
        return cls(rd, {})

    @classmethod
    def letter(cls, rd: RootDatum, a, coeff=1) -> "PBWElement":
        if isinstance(a, str):
            a = rd.parse_basis_label(a)
        return cls(rd, {(a,): coeff})

    @classmethod
    def from_word(cls, rd: RootDatum, word, coeff=1) -> "PBWElement":
        return normal_order(rd, word, coeff)

    @classmethod
    def from_vector(cls, rd: RootDatum, vec) -> "PBWElement":
        """Degree-1 element sum_a vec[a] X_a."""
        return cls(rd, {(a,): c for a, c in enumerate(vec)})

    # queries
    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        if not self.terms:
            raise UsageError("the zero element has no filtration degree")
        return max(len(m) for m in self.terms)

    @property
    def exact(self) -> bool:
        return all(_is_exact(c) for c in self.terms.values())

    def to_float(self) -> "PBWElement":
        return PBWElement(self.rd, {m: to_complex(c) for m, c in self.terms.items()})

    def _check(self, other: "PBWElement"):
        if other.rd is not self.rd:
            raise UsageError("PBW elements over different root data")

    def _align(self, other):
        if self.exact and other.exact:
            return self, other
        return self.to_float(), other.to_float()

    # arithmetic
    def __add__(self, other):
        if not isinstance(other, PBWElement):
            other = PBWElement.one(self.rd, other)
        self._check(other)
        a, b = self._align(other)
        out = dict(a.terms)
        for m, c in b.terms.items():
            _add_into(out, m, c)
        return PBWElement(self.rd, out)

    __radd__ = __add__

    def __neg__(self):
        return PBWElement(self.rd, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s) -> "PBWElement":
        s = _coerce(s)
        if isinstance(s, complex):
            return PBWElement(self.rd, {m: to_complex(c) * s for m, c in self.terms.items()})
        if not self.exact:
            return PBWElement(self.rd, {m: c * to_complex(s) for m, c in self.terms.items()})
        return PBWElement(self.rd, {m: c * s for m, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, PBWElement):
            return multiply(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other):
        if not isinstance(other, PBWElement):
            return NotImplemented
        return self.rd is other.rd and (self - other).is_zero

    def __hash__(self):
        return hash((self.rd.label, frozenset(self.terms.items())))

    def allclose(self, other: "PBWElement", tol: float = 1e-9) -> bool:
        diff = self.to_float() - other.to_float()
        return all(abs(c) <= tol for c in diff.terms.values())

    def max_abs(self) -> float:
        return max((abs(to_complex(c)) for c in self.terms.values()), default=0.0)

    def homogeneous(self, d: int) -> "PBWElement":
        return PBWElement(self.rd, {m: c for m, c in self.terms.items() if len(m) == d})

    def __repr__(self):
        return f"PBWElement({self})"

    def __str__(self):
        return format_monomials(self.rd, self.terms)

    @classmethod
    def parse(cls, rd: RootDatum, text: str) -> "PBWElement":
        """Inverse of ``str``; words need not be canonical (they get normal-ordered)."""
        out = cls.zero(rd)
        for coeff, word in parse_monomials(rd, text):
            out = out + normal_order(rd, word, coeff)
        return out


def _fmt_coeff(c) -> str:
    if _is_exact(c):
        s = fmt_qqi(c)
        return f"({s})" if " i" in s else s
    re_, im = complex(c).real + 0.0, complex(c).imag + 0.0   # + 0.0 drops the sign of zero
    if not im:
        return repr(re_)
    sign = "-" if im < 0 else "+"
    return f"({repr(re_) + ' ' if re_ else ''}{sign}{abs(im)!r} i)"


_FLOAT_COEFF_RE = re.compile(r"^\(?\s*([+-]?[\d.eE+-]+?)?\s*(?:([+-])\s*([\d.eE+-]+)\s*i)?\s*\)?$")


def _parse_coeff(cs: str):
    try:
        return parse_qqi(cs)
    except ValueError:
        pass
    m = _FLOAT_COEFF_RE.match(cs.strip())
    if not m or not any(m.groups()):
        raise ValueError(cs)
    re_, sign, im = m.groups()
    val = complex(float(re_) if re_ else 0.0, 0.0)
    if im is not None:
        val += complex(0.0, float(im) * (-1 if sign == "-" else 1))
    return val


def format_monomials(rd: RootDatum, terms: dict, tilde: bool = False) -> str:
    if not terms:
        return "0"
    parts = []
    for m in sorted(terms, key=lambda m: (len(m), m)):
        letters = []
        for a, grp in itertools.groupby(m):
            k = len(list(grp))
            lab = rd.basis_label(a)
            if tilde:
                lab = lab[0] + "~" + lab[1:]
            letters.append(lab + (f"^{k}" if k > 1 else ""))
        coeff = _fmt_coeff(terms[m])
        parts.append(coeff if not letters else f"{coeff} * {' '.join(letters)}")
    return " + ".join(parts)


_LETTER_RE = re.compile(r"([EFH])~?\[([^\]]+)\](?:\^(\d+))?")


def parse_monomials(rd: RootDatum, text: str):
    """Yield (coeff, word) pairs from the text format."""
    text = text.strip()
    if text == "0":
        return
    for term in re.split(r"\s\+\s", text):
        term = term.strip()
        if " * " in term:
            cs, ws = term.split(" * ", 1)
        elif _LETTER_RE.match(term.lstrip("-")):
            cs, ws = ("-1", term[1:]) if term.startswith("-") else ("1", term)
        else:
            cs, ws = term, ""
        try:
            coeff = _parse_coeff(cs)
        except ValueError as exc:
            raise UsageError(f"bad coefficient in {term!r}") from exc
        word = []
        pos = 0
        ws = ws.strip()
        while pos < len(ws):
            if ws[pos] in " *":
                pos += 1
                continue
            m = _LETTER_RE.match(ws, pos)
            if not m:
                raise UsageError(f"bad monomial {ws!r}")
            kind, body, power = m.groups()
            a = rd.parse_basis_label(f"{kind}[{body}]")
            word.extend([a] * int(power or 1))
            pos = m.end()
        yield coeff, tuple(word)


def normal_order(rd: RootDatum, word, coeff=1, rng=None) -> PBWElement:
    """Rewrite ``coeff * X_{word[0]} ... X_{word[-1]}`` into canonical form.

    With ``rng`` the descent to rewrite is chosen at random; the result must
    not depend on that choice (PBW confluence).
    """
    word = tuple(rd.parse_basis_label(w) if isinstance(w, str) else int(w) for w in word)
    if len(word) > MAX_DEGREE:
        raise ResourceError(f"word of length {len(word)} exceeds degree cap {MAX_DEGREE}")
    coeff = _coerce(coeff)
    expansion = _normal_word(rd, word) if rng is None else _normal_word_random(rd, word, rng)
    return PBWElement(rd, {m: coeff * v for m, v in expansion.items()})


def multiply(u1: PBWElement, u2: PBWElement) -> PBWElement:
    u1._check(u2)
    a, b = u1._align(u2)
    rd = u1.rd
    out: dict = {}
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            if len(m1) + len(m2) > MAX_DEGREE:
                raise ResourceError("product exceeds degree cap")
            c = c1 * c2
            for m, v in _normal_word(rd, m1 + m2).items():
                _add_into(out, m, c * v)
    return PBWElement(rd, out)


def commutator(u1: PBWElement, u2: PBWElement) -> PBWElement:
    return multiply(u1, u2) - multiply(u2, u1)


# ---------------------------------------------------------------------------
# involutions


def check(u: PBWElement) -> PBWElement:
    """The antiautomorphism with X -> -X on g."""
    out = PBWElement.zero(u.rd)
    for m, c in u.terms.items():
        out = out + normal_order(u.rd, m[::-1], c * (-1) ** len(m))
    return out


def _theta_letter(rd: RootDatum, a: int) -> int:
    kind, k = rd.basis[a]
    if kind == "H":
        return a
    return rd.e_index[k] if kind == "F" else rd.f_index[k]


def theta(u: PBWElement) -> PBWElement:
    """Antilinear automorphism with theta E_a = -F_a, theta H = -H."""
    rd = u.rd
    out = PBWElement.zero(rd)
    for m, c in u.terms.items():
        word = tuple(_theta_letter(rd, a) for a in m)
        out = out + normal_order(rd, word, conj(c) * (-1) ** len(m))
    return out


def chevalley_involutions(u: PBWElement) -> tuple:
    return check(u), theta(u)


# ---------------------------------------------------------------------------
# Cartan part


class HPolynomial:
    """Polynomial in the simple coroots H_1..H_r; keys are sorted index tuples."""

    __slots__ = ("rank", "terms")

    def __init__(self, rank: int, terms: dict | None = None):
        self.rank = rank
        self.terms = {tuple(sorted(m)): c for m, c in (terms or {}).items() if c}

    def evaluate(self, lam):
        """Substitute H_j -> lam(H_j); exact for a :class:`Weight` and exact coefficients."""
        if isinstance(lam, Weight):
            vals = [QQ(c.numerator, c.denominator) for c in lam.coords]
            if all(_is_exact(c) for c in self.terms.values()):
                total = QQ_I(0, 0)
                for m, c in self.terms.items():
                    p = QQ(1)
                    for j in m:
                        p *= vals[j]
                    total += c * QQ_I(p, 0)
                return total
            lam = lam.as_floats()
        vals = [complex(x) for x in lam]
        total = 0j
        for m, c in self.terms.items():
            p = to_complex(c)
            for j in m:
                p *= vals[j]
            total += p
        return total

    @property
    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=-1)

    def __eq__(self, other):
        return isinstance(other, HPolynomial) and self.terms == other.terms

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda m: (len(m), m)):
            letters = " ".join(f"H[a{j + 1}]" + (f"^{k}" if k > 1 else "")
                               for j, k in sorted(Counter(m).items()))
            parts.append(_fmt_coeff(self.terms[m]) + (f" * {letters}" if letters else ""))
        return " + ".join(parts)

    __repr__ = __str__


def hc_project(u: PBWElement) -> HPolynomial:
    """Component of ``u`` in U(h) along n^- U(g) + U(g) n."""
    h0 = u.rd.h_index[0]
    h_set = set(u.rd.h_index)
    terms = {}
    for m, c in u.terms.items():
        if all(a in h_set for a in m):
            terms[tuple(a - h0 for a in m)] = c
    return HPolynomial(u.rd.rank, terms)


def phi(u: PBWElement, lam):
    """phi_lam(u) = u_0(lam)."""
    return hc_project(u).evaluate(lam)


# ---------------------------------------------------------------------------
# symmetric algebra


class SymPolynomial:
    """Polynomial in commuting variables X~_a, one per Chevalley basis element."""

    __slots__ = ("rd", "terms")

    def __init__(self, rd: RootDatum, terms: dict | None = None):
        self.rd = rd
        self.terms = {}
        for m, c in (terms or {}).items():
            c = _coerce(c)
            if c:
                key = tuple(sorted(m))
                v = self.terms.get(key)
                v = c if v is None else v + c
                if v:
                    self.terms[key] = v
                else:
                    self.terms.pop(key, None)

    @classmethod
    def variable(cls, rd: RootDatum, a, coeff=1) -> "SymPolynomial":
        if isinstance(a, str):
            a = rd.parse_basis_label(a)
        return cls(rd, {(a,): coeff})

    @classmethod
    def constant(cls, rd: RootDatum, c) -> "SymPolynomial":
        return cls(rd, {(): c})

    @classmethod
    def linear(cls, rd: RootDatum, vec) -> "SymPolynomial":
        return cls(rd, {(a,): c for a, c in enumerate(vec) if c})

    @property
    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=-1)

    @property
    def exact(self) -> bool:
        return all(_is_exact(c) for c in self.terms.values())

    def to_float(self) -> "SymPolynomial":
        return SymPolynomial(self.rd, {m: to_complex(c) for m, c in self.terms.items()})

    def _align(self, other):
        if self.exact and other.exact:
            return self, other
        return self.to_float(), other.to_float()

    def homogeneous(self, d: int) -> "SymPolynomial":
        return SymPolynomial(self.rd, {m: c for m, c in self.terms.items() if len(m) == d})

    def __add__(self, other):
        if not isinstance(other, SymPolynomial):
            other = SymPolynomial.constant(self.rd, other)
        a, b = self._align(other)
        out = dict(a.terms)
        for m, c in b.terms.items():
            _add_into(out, m, c)
        return SymPolynomial(self.rd, out)

    __radd__ = __add__

    def __neg__(self):
        return SymPolynomial(self.rd, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, s) -> "SymPolynomial":
        s = _coerce(s)
        if isinstance(s, complex) or not self.exact:
            return SymPolynomial(self.rd, {m: to_complex(c) * to_complex(s) for m, c in self.terms.items()})
        return SymPolynomial(self.rd, {m: c * s for m, c in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, SymPolynomial):
            return self.scale(other)
        a, b = self._align(other)
        out: dict = {}
        for m1, c1 in a.terms.items():
            for m2, c2 in b.terms.items():
                _add_into(out, tuple(sorted(m1 + m2)), c1 * c2)
        return SymPolynomial(self.rd, out)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        out = SymPolynomial.constant(self.rd, 1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, SymPolynomial):
            return NotImplemented
        return (self - other).terms == {}

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def allclose(self, other, tol: float = 1e-9) -> bool:
        return all(abs(to_complex(c)) <= tol for c in (self - other).terms.values())

    def derivative(self, a: int) -> "SymPolynomial":
        out = {}
        for m, c in self.terms.items():
            k = m.count(a)
            if k:
                i = m.index(a)
                out[m[:i] + m[i + 1:]] = c * k
        return SymPolynomial(self.rd, out)

    def variables(self) -> set:
        return {a for m in self.terms for a in m}

    def evaluate(self, values) -> complex:
        """Evaluate with X~_a -> values[a] (floating)."""
        total = 0j
        for m, c in self.terms.items():
            p = to_complex(c)
            for a in m:
                p *= values[a]
            total += p
        return total

    def evaluate_many(self, values: np.ndarray) -> np.ndarray:
        """``values`` has shape (N, dim); returns (N,)."""
        values = np.asarray(values)
        out = np.zeros(values.shape[0], dtype=complex)
        for m, c in self.terms.items():
            p = np.full(values.shape[0], to_complex(c), dtype=complex)
            for a in m:
                p = p * values[:, a]
            out += p
        return out

    def __str__(self):
        return format_monomials(self.rd, self.terms, tilde=True)

    __repr__ = __str__


def principal_symbol(u: PBWElement) -> tuple:
    """(d, top-degree part of ``u`` read as a commutative polynomial)."""
    d = u.degree
    return d, SymPolynomial(u.rd, {m: c for m, c in u.terms.items() if len(m) == d})


def symmetrize(p: SymPolynomial) -> PBWElement:
    """beta: X~_1 ... X~_d -> (1/d!) sum over orderings of X_1 ... X_d."""
    rd = p.rd
    out = PBWElement.zero(rd)
    for m, c in p.terms.items():
        d = len(m)
        mult = math.prod(math.factorial(k) for k in Counter(m).values())
        w = QQ_I(QQ(mult, math.factorial(d)), 0)
        cc = c * w if _is_exact(c) else c * mult / math.factorial(d)
        for perm in multiset_permutations(list(m)):
            out = out + normal_order(rd, perm, cc)
    return out


def poisson_bracket_sym(p: SymPolynomial, q: SymPolynomial) -> SymPolynomial:
    """Lie-Poisson bracket with {X~, Y~} = [X, Y]~, extended by Leibniz."""
    rd = p.rd
    a_, b_ = p._align(q)
    out = SymPolynomial(rd)
    dp = {a: a_.derivative(a) for a in a_.variables()}
    dq = {b: b_.derivative(b) for b in b_.variables()}
    for a, pa in dp.items():
        for b, qb in dq.items():
            br = rd.bracket(a, b)
            if not br:
                continue
            lin = SymPolynomial(rd, {(c,): v for c, v in br})
            out = out + pa * qb * lin
    return out


# ---------------------------------------------------------------------------
# helpers


def linear_substitute(u: PBWElement, mat: np.ndarray) -> PBWElement:
    """Replace each letter X_b by sum_a mat[a, b] X_a and re-normal-order (floating)."""
    rd = u.rd
    images = [PBWElement.from_vector(rd, mat[:, b]) for b in range(rd.dim)]
    out = PBWElement.zero(rd).to_float()
    for m, c in u.terms.items():
        term = PBWElement.one(rd, to_complex(c)).to_float()
        for a in m:
            term = multiply(term, images[a])
        out = out + term
    return out


def casimir(rd: RootDatum) -> PBWElement:
    """Quadratic Casimir sum_{a,b} (B^-1)_{ab} X_a X_b for the Killing form B."""
    out = PBWElement.zero(rd)
    inv = rd.killing_inverse
    for a in range(rd.dim):
        for b in range(rd.dim):
            if inv[a][b]:
                out = out + normal_order(rd, (a, b), inv[a][b])
    return out


def casimir_polynomial(rd: RootDatum) -> SymPolynomial:
    inv = rd.killing_inverse
    return SymPolynomial(rd, {(a, b): inv[a][b] for a in range(rd.dim) for b in range(rd.dim) if inv[a][b]})


def random_element(rd: RootDatum, max_degree: int, rng, n_terms: int = 4, exact: bool = True,
                   homogeneous: bool = False) -> PBWElement:
    """Random element with small Gaussian-rational (or complex) coefficients."""
    out = PBWElement.zero(rd)
    while out.is_zero:
        for _ in range(n_terms):
            d = max_degree if homogeneous else int(rng.integers(0, max_degree + 1))
            word = tuple(int(x) for x in rng.integers(0, rd.dim, size=d))
            if exact:
                c = QQ_I(QQ(int(rng.integers(-5, 6)), int(rng.integers(1, 4))),
                         QQ(int(rng.integers(-5, 6)), int(rng.integers(1, 4))))
            else:
                c = complex(rng.normal(), rng.normal())
            out = out + PBWElement(rd, {tuple(sorted(word)): c})
    return out


def random_sym(rd: RootDatum, degree: int, rng, n_terms: int = 3) -> SymPolynomial:
    """Random homogeneous polynomial of the given degree with exact coefficients."""
    out = SymPolynomial(rd)
    while not out.terms:
        for _ in range(n_terms):
            m = tuple(int(x) for x in rng.integers(0, rd.dim, size=degree))
            out = out + SymPolynomial(rd, {m: QQ_I(QQ(int(rng.integers(-4, 5)), int(rng.integers(1, 3))), 0)})
    return out


def pbw_monomials(rd: RootDatum, max_degree: int) -> list:
    """All canonical monomials of degree <= max_degree, by degree."""
    out = []
    for d in range(max_degree + 1):
        out.extend(itertools.combinations_with_replacement(range(rd.dim), d))
    return out
