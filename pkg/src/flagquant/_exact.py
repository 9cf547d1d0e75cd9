"""Exact scalar helpers built on sympy's Gaussian-rational domain ``QQ_I``.

Elements of ``QQ_I`` do not compare equal to Python ints, so zero tests in
this package always use truthiness (``if not c``).
"""
from __future__ import annotations

import re
from fractions import Fraction

from sympy.polys.domains import QQ, QQ_I

__all__ = ["QQ", "QQ_I", "qqi", "to_complex", "conj", "fmt_rational", "fmt_qqi", "parse_qqi", "parse_rational"]


def qqi(x) -> "QQ_I.dtype":
    """Convert int, Fraction, mpq, complex-with-integer-parts or QQ_I to QQ_I."""
    if isinstance(x, QQ_I.dtype):
        return x
    if isinstance(x, complex):
        re_, im_ = Fraction(x.real), Fraction(x.imag)
        return QQ_I(QQ(re_.numerator, re_.denominator), QQ(im_.numerator, im_.denominator))
    if isinstance(x, Fraction):
        return QQ_I(QQ(x.numerator, x.denominator), 0)
    if isinstance(x, float):
        f = Fraction(x)
        return QQ_I(QQ(f.numerator, f.denominator), 0)
    return QQ_I(QQ(x), 0)


def to_complex(c) -> complex:
    if isinstance(c, QQ_I.dtype):
        return complex(float(c.x), float(c.y))
    return complex(c)


def conj(c):
    if isinstance(c, QQ_I.dtype):
        return QQ_I(c.x, -c.y)
    if isinstance(c, complex):
        return c.conjugate()
    return c


def fmt_rational(q) -> str:
    q = QQ(q)
    num, den = int(q.numerator), int(q.denominator)
    return str(num) if den == 1 else f"{num}/{den}"


def fmt_qqi(c) -> str:
    """``p/q`` for real values, ``p/q+r/s i`` otherwise."""
    c = qqi(c)
    if not c.y:
        return fmt_rational(c.x)
    im = fmt_rational(c.y)
    sign = "" if im.startswith("-") else "+"
    return f"{fmt_rational(c.x)}{sign}{im} i"


_RAT = r"[+-]?\d+(?:/\d+)?"
_QQI_RE = re.compile(rf"^\(?\s*({_RAT})?\s*(?:([+-]?)\s*(\d+(?:/\d+)?)?\s*i)?\s*\)?$")


def parse_rational(s: str):
    s = s.strip()
    if not re.fullmatch(_RAT, s):
        raise ValueError(f"not a rational: {s!r}")
    f = Fraction(s)
    return QQ(f.numerator, f.denominator)


def parse_qqi(s: str):
    s = s.strip()
    m = _QQI_RE.match(s)
    if not m or not s.strip("() "):
        raise ValueError(f"cannot parse Gaussian rational: {s!r}")
    re_s, sign, im_s = m.groups()
    has_i = s.rstrip(") ").endswith("i")
    re_v = parse_rational(re_s) if re_s else QQ(0)
    if has_i:
        im_v = parse_rational(im_s) if im_s else QQ(1)
        if sign == "-":
            im_v = -im_v
        if re_s and not sign and im_s is None:
            # "3i" style: the number belongs to the imaginary part
            re_v, im_v = QQ(0), re_v
    else:
        im_v = QQ(0)
    return QQ_I(re_v, im_v)
