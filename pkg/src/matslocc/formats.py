"""JSON file formats for matrix spaces, states, and witness subspaces.

Parse failures raise :class:`ParseError` carrying the line of the offending
value; structural problems (ragged rows, wrong sizes) are located by walking
the raw text to the JSON path that failed.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from matslocc.arith import parse_scalar
from matslocc.errors import MatSloccError, ParseError
from matslocc.matspace import MatrixSpace, Subspace
from matslocc.slocc import TripartiteState


class _Bad(Exception):
    def __init__(self, path: tuple, message: str):
        super().__init__(message)
        self.path = path
        self.message = message


def locate(text: str, path: tuple) -> int | None:
    """1-based line where the value at ``path`` (keys and indices) starts."""
    stack: list[list] = []  # entries: [kind, key_or_index]
    i, line, n = 0, 1, len(text)
    pending_key = None

    def current_path():
        return tuple(frame[1] for frame in stack)

    def value_starts():
        return current_path() == path

    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            i += 1
            continue
        if ch in " \t\r,:":
            i += 1
            continue
        if ch == '"':
            j = i + 1
            while j < n and text[j] != '"':
                j += 2 if text[j] == "\\" else 1
            s = text[i + 1 : j]
            if stack and stack[-1][0] == "obj" and pending_key is None and text[j + 1 : j + 40].lstrip().startswith(":"):
                pending_key = json.loads(f'"{s}"')
                stack[-1][1] = pending_key
                i = j + 1
                continue
            if value_starts():
                return line
            pending_key = None
            _advance(stack)
            i = j + 1
            continue
        if ch in "[{":
            if value_starts():
                return line
            pending_key = None
            stack.append(["arr", 0] if ch == "[" else ["obj", None])
            i += 1
            continue
        if ch in "]}":
            stack.pop()
            _advance(stack)
            pending_key = None
            i += 1
            continue
        # bare literal (number, true, false, null)
        if value_starts():
            return line
        while i < n and text[i] not in ",]}\n \t\r":
            i += 1
        pending_key = None
        _advance(stack)
    return None


def _advance(stack):
    if stack and stack[-1][0] == "arr":
        stack[-1][1] += 1
    elif stack and stack[-1][0] == "obj":
        stack[-1][1] = None


def _load(text: str, what: str):
    if not text.strip():
        raise ParseError(f"{what}: line 1: empty input")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{what}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _wrap(text: str, what: str, fn):
    data = _load(text, what)
    try:
        return fn(data)
    except _Bad as exc:
        line = locate(text, exc.path)
        where = "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in exc.path) or "<root>"
        prefix = f"line {line}: " if line else ""
        raise ParseError(f"{what}: {prefix}at {where}: {exc.message}") from None
    except MatSloccError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"{what}: {exc}") from None


def _int(data, key, path):
    v = data.get(key) if isinstance(data, dict) else None
    if not isinstance(v, int) or isinstance(v, bool) or v < 1:
        raise _Bad(path + (key,), f"'{key}' must be a positive integer")
    return v


def _scalar(x, path):
    if isinstance(x, int) and not isinstance(x, bool):
        x = str(x)
    if not isinstance(x, str):
        raise _Bad(path, "scalar must be a string like '1/2+3/4*i'")
    try:
        return parse_scalar(x)
    except ParseError as exc:
        raise _Bad(path, str(exc)) from None


def _matrix(rows_data, m, n, path):
    if not isinstance(rows_data, list) or len(rows_data) != m:
        raise _Bad(path, f"expected a list of {m} rows")
    out = {}
    for i, row in enumerate(rows_data):
        if not isinstance(row, list) or len(row) != n:
            raise _Bad(path + (i,), f"ragged row: expected {n} entries")
        for j, x in enumerate(row):
            v = _scalar(x, path + (i, j))
            if v:
                out[i * n + j] = v
    return out


def space_from_data(data) -> MatrixSpace:
    if not isinstance(data, dict):
        raise _Bad((), "expected an object with rows, cols, basis")
    m, n = _int(data, "rows", ()), _int(data, "cols", ())
    basis = data.get("basis")
    if not isinstance(basis, list) or not basis:
        raise _Bad(("basis",), "'basis' must be a nonempty list of matrices")
    return MatrixSpace(m, n, [_matrix(b, m, n, ("basis", t)) for t, b in enumerate(basis)])


def state_from_data(data) -> TripartiteState:
    if not isinstance(data, dict):
        raise _Bad((), "expected an object with dims and amplitudes")
    dims = data.get("dims")
    if not (isinstance(dims, list) and len(dims) == 3 and all(isinstance(x, int) and x >= 1 for x in dims)):
        raise _Bad(("dims",), "'dims' must be three positive integers")
    amps = data.get("amplitudes")
    if not isinstance(amps, list) or not amps:
        raise _Bad(("amplitudes",), "'amplitudes' must be a nonempty list")
    items = []
    seen = set()
    for t, entry in enumerate(amps):
        path = ("amplitudes", t)
        if not isinstance(entry, dict):
            raise _Bad(path, "amplitude entry must be an object")
        idx = []
        for key, bound in zip("abc", dims):
            v = entry.get(key)
            if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < bound:
                raise _Bad(path + (key,), f"index '{key}' must be an integer in [0, {bound})")
            idx.append(v)
        if tuple(idx) in seen:
            raise _Bad(path, f"duplicate index triple {tuple(idx)}")
        seen.add(tuple(idx))
        items.append((tuple(idx), _scalar(entry.get("value"), path + ("value",))))
    norm = data.get("norm_sq")
    try:
        norm = None if norm is None else Fraction(norm)
    except (ValueError, TypeError, ZeroDivisionError):
        raise _Bad(("norm_sq",), "'norm_sq' must be a rational string") from None
    return TripartiteState(dims, items, norm)


def witnesses_from_data(data, ambient: int) -> list[Subspace]:
    """``{"witnesses": [{"U": [[scalar, ...], ...]}, ...]}``."""
    if not isinstance(data, dict) or not isinstance(data.get("witnesses"), list):
        raise _Bad((), "expected an object with a 'witnesses' list")
    out = []
    for t, w in enumerate(data["witnesses"]):
        path = ("witnesses", t, "U")
        U = w.get("U") if isinstance(w, dict) else None
        if not isinstance(U, list) or not U:
            raise _Bad(path, "'U' must be a nonempty list of vectors")
        vecs = []
        for k, v in enumerate(U):
            if not isinstance(v, list) or len(v) != ambient:
                raise _Bad(path + (k,), f"vector must have {ambient} entries")
            vecs.append({j: s for j, x in enumerate(v) if (s := _scalar(x, path + (k, j)))})
        out.append(Subspace(ambient, vecs))
    return out


def parse_space(text: str) -> MatrixSpace:
    return _wrap(text, "matrix space", space_from_data)


def parse_state(text: str) -> TripartiteState:
    return _wrap(text, "state", state_from_data)


def parse_witnesses(text: str, ambient: int) -> list[Subspace]:
    return _wrap(text, "witnesses", lambda d: witnesses_from_data(d, ambient))


def _read(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def load_space(path) -> MatrixSpace:
    return parse_space(_read(path))


def load_state(path) -> TripartiteState:
    return parse_state(_read(path))


def load_witnesses(path, ambient: int) -> list[Subspace]:
    return parse_witnesses(_read(path), ambient)


def dump_json(obj) -> str:
    return json.dumps(obj, indent=1, sort_keys=True) + "\n"
