"""JSON and CSV codecs for every value the toolkit exchanges.

Schemas (all JSON, UTF-8):

  polynomial        {"p": int, "coeffs": [int, ...]}        little-endian
  polynomial (CSV)  coefficients joined by ':'              little-endian
  function          {"p": int, "n": int, "terms": [[e_1, ..., e_n, c], ...]}
  form              {"p": int, "dims": [int, ...],
                     "entries": [[i_1, ..., i_k, c], ...]}  nonzero entries
  multiaffine form  form keys plus "components", one {"subset", "entries"}
                    object per nonvanishing component
  variety           {"p": int, "ambient": [int, ...],
                     "constraints": [{"subset": [...], "form": {...}}, ...]}
  combination       {"terms": [{"re": float, "im": float,
                     "kind": "multiaffine"|"poly", "payload": {...}}, ...],
                     "m": int, "l1": float, "l2_error": float}

Encoding is deterministic (entries and terms are emitted in sorted order)
and floats use the shortest representation that parses back to the same
double, so decode(encode(x)) == x exactly.  Decoding errors report the
JSON path of the offending node, e.g. "$.terms[3].re".
"""

import json
from fractions import Fraction

import numpy as np

from .ffpoly import PolyFp
from .forms import MultiaffineForm, MultilinearForm, PolynomialFn
from .phaseapprox import PhaseCombination, PhaseTerm
from .varieties import FiberReport, MultilinearVariety

__all__ = [
    "SerializationError",
    "poly_to_json", "poly_from_json", "poly_to_csv_cell", "poly_from_csv_cell",
    "polynomial_fn_to_json", "polynomial_fn_from_json",
    "form_to_json", "form_from_json",
    "multiaffine_to_json", "multiaffine_from_json",
    "variety_to_json", "variety_from_json",
    "combination_to_json", "combination_from_json",
    "fiber_report_to_json", "fraction_to_text", "fraction_from_text",
    "dumps", "loads",
]


class SerializationError(ValueError):
    """Malformed document; the message starts with the JSON path."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def _need(doc, key, path):
    if not isinstance(doc, dict):
        raise SerializationError(path, f"expected an object, got {type(doc).__name__}")
    if key not in doc:
        raise SerializationError(path, f"missing key {key!r}")
    return doc[key]


def _as_int(value, path) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SerializationError(path, f"expected an integer, got {value!r}")
    return value


def _as_float(value, path) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SerializationError(path, f"expected a number, got {value!r}")
    return float(value)


def _as_list(value, path) -> list:
    if not isinstance(value, list):
        raise SerializationError(path, f"expected an array, got {type(value).__name__}")
    return value


def _int_list(value, path) -> list[int]:
    return [_as_int(v, f"{path}[{i}]") for i, v in enumerate(_as_list(value, path))]


def fraction_to_text(value: Fraction) -> str:
    return str(Fraction(value))


def fraction_from_text(text, path="$") -> Fraction:
    if not isinstance(text, str):
        raise SerializationError(path, f"expected a fraction string, got {text!r}")
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise SerializationError(path, f"bad fraction {text!r}: {exc}") from None


# ------------------------------------------------------------ polynomials

def poly_to_json(f: PolyFp) -> dict:
    return {"p": f.p, "coeffs": list(f.coeffs)}


def poly_from_json(doc, path="$") -> PolyFp:
    p = _as_int(_need(doc, "p", path), f"{path}.p")
    coeffs = _int_list(_need(doc, "coeffs", path), f"{path}.coeffs")
    try:
        return PolyFp(p, coeffs)
    except ValueError as exc:
        raise SerializationError(path, str(exc)) from None


def poly_to_csv_cell(f: PolyFp) -> str:
    return ":".join(str(c) for c in f.coeffs)


def poly_from_csv_cell(cell: str, p: int) -> PolyFp:
    if not isinstance(cell, str):
        raise SerializationError("$", f"expected a string cell, got {cell!r}")
    text = cell.strip()
    if not text:
        return PolyFp(p, [])
    try:
        coeffs = [int(part) for part in text.split(":")]
    except ValueError:
        raise SerializationError("$", f"bad coefficient cell {cell!r}") from None
    return PolyFp(p, coeffs)


def polynomial_fn_to_json(q: PolynomialFn) -> dict:
    terms = [list(exps) + [c] for exps, c in sorted(q.terms.items())]
    return {"p": q.p, "n": q.n, "terms": terms}


def polynomial_fn_from_json(doc, path="$") -> PolynomialFn:
    p = _as_int(_need(doc, "p", path), f"{path}.p")
    n = _as_int(_need(doc, "n", path), f"{path}.n")
    terms = {}
    for i, row in enumerate(_as_list(_need(doc, "terms", path), f"{path}.terms")):
        row = _int_list(row, f"{path}.terms[{i}]")
        if len(row) != n + 1:
            raise SerializationError(f"{path}.terms[{i}]",
                                     f"expected {n} exponents and a coefficient")
        exps, c = tuple(row[:-1]), row[-1]
        terms[exps] = terms.get(exps, 0) + c
    try:
        return PolynomialFn(p, n, terms)
    except ValueError as exc:
        raise SerializationError(path, str(exc)) from None


# ------------------------------------------------------------------ forms

def _entries_of(tensor: np.ndarray) -> list:
    entries = []
    for idx in sorted(map(tuple, np.argwhere(tensor))):
        entries.append([int(i) for i in idx] + [int(tensor[idx])])
    return entries


def _tensor_from_entries(dims, rows, p, path) -> np.ndarray:
    tensor = np.zeros(tuple(dims), dtype=np.int64)
    for i, row in enumerate(_as_list(rows, path)):
        row = _int_list(row, f"{path}[{i}]")
        if len(row) != len(dims) + 1:
            raise SerializationError(f"{path}[{i}]",
                                     f"expected {len(dims)} indices and a coefficient")
        idx, c = tuple(row[:-1]), row[-1]
        if any(not 0 <= v < d for v, d in zip(idx, dims)):
            raise SerializationError(f"{path}[{i}]",
                                     f"index {idx} out of range for dims {tuple(dims)}")
        tensor[idx] = (tensor[idx] + c) % p
    return tensor


def form_to_json(alpha: MultilinearForm) -> dict:
    return {"p": alpha.p, "dims": list(alpha.dims),
            "entries": _entries_of(alpha.tensor)}


def form_from_json(doc, path="$") -> MultilinearForm:
    p = _as_int(_need(doc, "p", path), f"{path}.p")
    dims = _int_list(_need(doc, "dims", path), f"{path}.dims")
    if any(d < 0 for d in dims):
        raise SerializationError(f"{path}.dims", f"negative dimension in {dims}")
    tensor = _tensor_from_entries(dims, _need(doc, "entries", path), p,
                                  f"{path}.entries")
    try:
        return MultilinearForm(p, tuple(dims), tensor)
    except ValueError as exc:
        raise SerializationError(path, str(exc)) from None


def multiaffine_to_json(beta: MultiaffineForm) -> dict:
    components = []
    for subset in sorted(beta.components, key=lambda s: (len(s), sorted(s))):
        components.append({"subset": sorted(subset),
                           "entries": _entries_of(beta.components[subset].tensor)})
    return {"p": beta.p, "dims": list(beta.dims), "components": components}


def multiaffine_from_json(doc, path="$") -> MultiaffineForm:
    p = _as_int(_need(doc, "p", path), f"{path}.p")
    dims = _int_list(_need(doc, "dims", path), f"{path}.dims")
    components = {}
    rows = _as_list(_need(doc, "components", path), f"{path}.components")
    for i, comp in enumerate(rows):
        cpath = f"{path}.components[{i}]"
        subset = _int_list(_need(comp, "subset", cpath), f"{cpath}.subset")
        if len(set(subset)) != len(subset):
            raise SerializationError(f"{cpath}.subset", f"repeated slot in {subset}")
        if any(not 0 <= s < len(dims) for s in subset):
            raise SerializationError(f"{cpath}.subset", f"slot out of range in {subset}")
        sub_dims = [dims[s] for s in sorted(subset)]
        tensor = _tensor_from_entries(sub_dims, _need(comp, "entries", cpath), p,
                                      f"{cpath}.entries")
        key = frozenset(subset)
        if key in components:
            raise SerializationError(f"{cpath}.subset", f"duplicate subset {subset}")
        try:
            components[key] = MultilinearForm(p, tuple(sub_dims), tensor)
        except ValueError as exc:
            raise SerializationError(cpath, str(exc)) from None
    try:
        return MultiaffineForm(p, tuple(dims), components)
    except ValueError as exc:
        raise SerializationError(path, str(exc)) from None


# -------------------------------------------------------------- varieties

def variety_to_json(w: MultilinearVariety) -> dict:
    constraints = [{"subset": list(subset), "form": form_to_json(form)}
                   for subset, form in w.constraints]
    return {"p": w.p, "ambient": list(w.ambient), "constraints": constraints}


def variety_from_json(doc, path="$") -> MultilinearVariety:
    ambient = _int_list(_need(doc, "ambient", path), f"{path}.ambient")
    rows = _as_list(_need(doc, "constraints", path), f"{path}.constraints")
    constraints = []
    for i, row in enumerate(rows):
        cpath = f"{path}.constraints[{i}]"
        subset = _int_list(_need(row, "subset", cpath), f"{cpath}.subset")
        form = form_from_json(_need(row, "form", cpath), f"{cpath}.form")
        constraints.append((tuple(subset), form))
    if "p" in doc:
        p = _as_int(doc["p"], f"{path}.p")
    elif constraints:
        p = constraints[0][1].p
    else:
        raise SerializationError(path, 'missing key "p" (required without constraints)')
    try:
        return MultilinearVariety(p, tuple(ambient), constraints)
    except ValueError as exc:
        raise SerializationError(path, str(exc)) from None


# ----------------------------------------------------- phase combinations

def combination_to_json(comb: PhaseCombination) -> dict:
    terms = []
    for term in comb.terms:
        if term.kind == "poly":
            payload = polynomial_fn_to_json(term.source)
        else:
            payload = multiaffine_to_json(term.source)
        terms.append({"re": term.coefficient.real, "im": term.coefficient.imag,
                      "kind": term.kind, "payload": payload})
    doc = {"terms": terms, "m": comb.m, "l1": comb.coefficient_l1,
           "l2_error": comb.l2_error}
    if comb.exact_l1 is not None:
        doc["l1_exact"] = fraction_to_text(comb.exact_l1)
    return doc


def combination_from_json(doc, path="$") -> PhaseCombination:
    terms = []
    for i, row in enumerate(_as_list(_need(doc, "terms", path), f"{path}.terms")):
        tpath = f"{path}.terms[{i}]"
        re = _as_float(_need(row, "re", tpath), f"{tpath}.re")
        im = _as_float(_need(row, "im", tpath), f"{tpath}.im")
        kind = _need(row, "kind", tpath)
        payload = _need(row, "payload", tpath)
        if kind == "poly":
            source = polynomial_fn_from_json(payload, f"{tpath}.payload")
        elif kind == "multiaffine":
            source = multiaffine_from_json(payload, f"{tpath}.payload")
        else:
            raise SerializationError(f"{tpath}.kind", f"unknown kind {kind!r}")
        terms.append(PhaseTerm(complex(re, im), source))
    m = _as_int(_need(doc, "m", path), f"{path}.m")
    if m != len(terms):
        raise SerializationError(f"{path}.m", f"m = {m} but {len(terms)} terms given")
    l1 = _as_float(_need(doc, "l1", path), f"{path}.l1")
    l2_error = _as_float(_need(doc, "l2_error", path), f"{path}.l2_error")
    exact_l1 = None
    if "l1_exact" in doc:
        exact_l1 = fraction_from_text(doc["l1_exact"], f"{path}.l1_exact")
    comb = PhaseCombination(tuple(terms), l2_error, exact_l1)
    if abs(comb.coefficient_l1 - l1) > 1e-9:
        raise SerializationError(f"{path}.l1",
                                 f"l1 = {l1} but coefficients sum to {comb.coefficient_l1}")
    return comb


# ----------------------------------------------------------- one-way dumps

def fiber_report_to_json(rep: FiberReport) -> dict:
    """Flatten a fiber report; decoding is not supported (reports are logs)."""
    convolution = None
    if rep.convolution is not None:
        convolution = {
            "positive": rep.convolution.positive,
            "min_value": fraction_to_text(rep.convolution.min_value),
            "precondition_ok": rep.convolution.precondition_ok,
            "size_threshold": fraction_to_text(rep.convolution.size_threshold),
            "bad_count": rep.convolution.bad_count,
            "codimension": rep.convolution.codimension,
        }
    verification = [
        {"point": [list(map(int, v)) for v in point],
         "bias": fraction_to_text(bias)}
        for point, bias in rep.verification
    ]
    return {
        "status": rep.status,
        "seed": rep.seed,
        "draws": rep.draws,
        "c_input": fraction_to_text(rep.c_input),
        "c_tilde_measured": None if rep.c_tilde_measured is None
                            else fraction_to_text(rep.c_tilde_measured),
        "chain_bound": fraction_to_text(rep.chain_bound),
        "target_floor": None if rep.target_floor is None
                        else fraction_to_text(rep.target_floor),
        "epsilon": fraction_to_text(rep.epsilon),
        "c_prime": fraction_to_text(rep.c_prime),
        "finder_K": rep.finder_K,
        "max_codim": rep.max_codim,
        "chosen_shift": [list(map(int, v)) for v in rep.chosen_shift],
        "set_a_density": fraction_to_text(rep.set_a_density),
        "bad_count": rep.bad_count,
        "convolution": convolution,
        "variety": None if rep.variety is None else variety_to_json(rep.variety),
        "verification": verification,
    }


# ------------------------------------------------------------- text layer

def dumps(doc) -> str:
    """Deterministic JSON text with a trailing newline (UTF-8, LF)."""
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SerializationError(f"line {exc.lineno} column {exc.colno}",
                                 exc.msg) from None
