"""Form files: UTF-8 JSON with decimal-string coefficients.

    {"n": 1,
     "terms": [{"indices": [1], "re": "1.0", "im": "0.0"},
               {"indices": [2], "re": "0.0", "im": "1.0"}],
     "label": "dz", "omega_scale": "1/1", "divisors": [1]}

"degree" is optional when there are terms (it is inferred from them) and
defaults to n otherwise.  Coefficients are written with repr(float), which
round-trips exactly.
"""

import json
from dataclasses import dataclass
from fractions import Fraction

from lagform.exterior import ExteriorForm
from lagform.torus import RationalTorus


class FormFileError(ValueError):
    pass


@dataclass(frozen=True)
class FormFile:
    form: ExteriorForm
    label: str = ""
    omega_scale: Fraction = Fraction(1)
    divisors: tuple = None

    def torus(self):
        return RationalTorus(self.form.n, self.divisors, self.omega_scale)


def _decimal(value, where):
    if not isinstance(value, str):
        raise FormFileError(f"{where}: coefficient must be a decimal string")
    try:
        return float(value)
    except ValueError:
        raise FormFileError(f"{where}: {value!r} is not a decimal") from None


def loads(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormFileError(f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise FormFileError("top level must be an object")
    n = data.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise FormFileError("'n' must be a positive integer")
    terms = data.get("terms")
    if not isinstance(terms, list):
        raise FormFileError("'terms' must be a list")
    coeffs = {}
    degree = None
    for t, term in enumerate(terms):
        where = f"term {t}"
        if not isinstance(term, dict) or set(term) - {"indices", "re", "im"}:
            raise FormFileError(f"{where}: expected keys indices, re, im")
        idx = term.get("indices")
        if not isinstance(idx, list) or not all(isinstance(i, int) and not isinstance(i, bool) for i in idx):
            raise FormFileError(f"{where}: indices must be a list of integers")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise FormFileError(f"{where}: indices {idx} are not strictly increasing")
        if idx and (idx[0] < 1 or idx[-1] > 2 * n):
            raise FormFileError(f"{where}: indices {idx} outside 1..{2 * n}")
        if degree is None:
            degree = len(idx)
        elif len(idx) != degree:
            raise FormFileError(f"{where}: mixed degrees {degree} and {len(idx)}")
        key = tuple(idx)
        if key in coeffs:
            raise FormFileError(f"{where}: duplicate indices {idx}")
        coeffs[key] = complex(_decimal(term.get("re", "0.0"), where), _decimal(term.get("im", "0.0"), where))
    declared = data.get("degree")
    if declared is not None:
        if not isinstance(declared, int) or isinstance(declared, bool) or not 0 <= declared <= 2 * n:
            raise FormFileError(f"'degree' must be an integer in 0..{2 * n}")
        if degree is not None and degree != declared:
            raise FormFileError(f"terms have degree {degree} but 'degree' is {declared}")
        degree = declared
    if degree is None:
        degree = n
    label = data.get("label", "")
    if not isinstance(label, str):
        raise FormFileError("'label' must be a string")
    try:
        scale = Fraction(data.get("omega_scale", "1/1"))
    except (ValueError, TypeError, ZeroDivisionError):
        raise FormFileError("'omega_scale' must be a rational 'p/q'") from None
    if scale <= 0:
        raise FormFileError("'omega_scale' must be positive")
    divisors = data.get("divisors")
    if divisors is not None:
        if not isinstance(divisors, list) or not all(isinstance(d, int) for d in divisors):
            raise FormFileError("'divisors' must be a list of integers")
        divisors = tuple(divisors)
        try:
            RationalTorus(n, divisors)
        except ValueError as exc:
            raise FormFileError(f"divisors: {exc}") from None
    form = ExteriorForm(n, degree, coeffs)
    return FormFile(form, label, scale, divisors)


def load(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def dumps(form, label="", omega_scale=Fraction(1), divisors=None):
    terms = [
        json.dumps({"indices": list(key), "re": repr(float(c.real)), "im": repr(float(c.imag))})
        for key, c in form.coeffs.items()
    ]
    scale = Fraction(omega_scale)
    lines = ["{", f' "n": {form.n},', f' "degree": {form.k},', f' "label": {json.dumps(label)},']
    lines.append(f' "omega_scale": "{scale.numerator}/{scale.denominator}",')
    if divisors is not None:
        lines.append(f' "divisors": {json.dumps([int(d) for d in divisors])},')
    if terms:
        lines.append(' "terms": [')
        lines.append(",\n".join("  " + t for t in terms))
        lines.append(" ]")
    else:
        lines.append(' "terms": []')
    lines.append("}")
    return "\n".join(lines) + "\n"


def dump(path, form, **meta):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(form, **meta))
