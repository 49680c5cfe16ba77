"""JSON descriptor files: algebra, module, measure, named frames and options.

Complex numbers are two-element arrays ``[re, im]``.  Real entries may be
JSON numbers or rational strings such as ``"7/3"``.  Unknown fields are
rejected and every error carries the path of the offending field.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from .algebra import BlockSpec
from .errors import DescriptorError, InvalidSpace
from .frame import DEFAULT_DIRECTIONS, STRATEGIES, FrameMap
from .hmodule import ModuleSpace, mod_validate
from .measure import MeasureSpace

TOP_FIELDS = ("algebra", "module", "measure", "frames", "options")
OPTION_FIELDS = ("tol", "strategy", "directions", "seed")
DEFAULT_OPTIONS = {"tol": 1e-10, "strategy": None, "directions": DEFAULT_DIRECTIONS, "seed": 0}


@dataclass
class Descriptor:
    algebra: BlockSpec
    space: ModuleSpace
    measure: MeasureSpace
    frames: dict[str, FrameMap] = field(default_factory=dict)
    options: dict = field(default_factory=dict)

    def option(self, name):
        return self.options.get(name, DEFAULT_OPTIONS[name])

    def frame(self, name: str) -> FrameMap:
        try:
            return self.frames[name]
        except KeyError:
            raise DescriptorError(f"no frame named {name!r} (have {sorted(self.frames)})",
                                  "frames") from None


def shipped_example(name: str) -> Path:
    """Path of a descriptor shipped with the package, e.g. ``"example_2_7"``."""
    if not name.endswith(".json"):
        name += ".json"
    return Path(str(resources.files("cstarframes").joinpath("examples", name)))


def _fields(obj, ctx, required, optional=()):
    if not isinstance(obj, dict):
        raise DescriptorError("expected an object", ctx)
    unknown = sorted(set(obj) - set(required) - set(optional))
    if unknown:
        raise DescriptorError(f"unknown field {unknown[0]!r}", ctx)
    for name in required:
        if name not in obj:
            raise DescriptorError(f"missing field {name!r}", ctx)


def _list(obj, ctx, length=None):
    if not isinstance(obj, list):
        raise DescriptorError("expected an array", ctx)
    if length is not None and len(obj) != length:
        raise DescriptorError(f"expected {length} entries, got {len(obj)}", ctx)
    return obj


def _real(x, ctx) -> float:
    if isinstance(x, bool):
        raise DescriptorError("expected a real number", ctx)
    if isinstance(x, (int, float)):
        v = float(x)
    elif isinstance(x, str):
        try:
            v = float(Fraction(x.strip()))
        except (ValueError, ZeroDivisionError):
            raise DescriptorError(f"cannot read {x!r} as a real number", ctx) from None
    else:
        raise DescriptorError("expected a real number", ctx)
    if not math.isfinite(v):
        raise DescriptorError("real number must be finite", ctx)
    return v


def _int(x, ctx, minimum=None) -> int:
    if isinstance(x, bool) or not isinstance(x, int):
        raise DescriptorError("expected an integer", ctx)
    if minimum is not None and x < minimum:
        raise DescriptorError(f"expected an integer >= {minimum}", ctx)
    return x


def _complex(x, ctx) -> complex:
    if not isinstance(x, list) or len(x) != 2:
        raise DescriptorError("complex entry must be a [re, im] pair", ctx)
    return complex(_real(x[0], f"{ctx}[0]"), _real(x[1], f"{ctx}[1]"))


def _cvector(x, ctx, length) -> np.ndarray:
    _list(x, ctx, length)
    return np.array([_complex(v, f"{ctx}[{i}]") for i, v in enumerate(x)], dtype=complex)


def _cmatrix(x, ctx, rows, cols) -> np.ndarray:
    _list(x, ctx, rows)
    return np.array([_cvector(r, f"{ctx}[{i}]", cols) for i, r in enumerate(x)], dtype=complex)


def parse_descriptor(data, validate: bool = True) -> Descriptor:
    """Build a :class:`Descriptor` from decoded JSON.

    Raises
    ------
    DescriptorError
        On structural problems.
    InvalidSpace
        If ``validate`` and the module violates an axiom.
    """
    _fields(data, "$", TOP_FIELDS[:3], TOP_FIELDS[3:])

    alg = data["algebra"]
    _fields(alg, "algebra", ("block_sizes",))
    sizes = [_int(n, f"algebra.block_sizes[{i}]", 1)
             for i, n in enumerate(_list(alg["block_sizes"], "algebra.block_sizes"))]
    if not sizes:
        raise DescriptorError("need at least one block", "algebra.block_sizes")
    spec = BlockSpec(tuple(sizes))

    mod = data["module"]
    _fields(mod, "module", ("rows", "cols", "basis"))
    rows = _int(mod["rows"], "module.rows", 1)
    cols = _int(mod["cols"], "module.cols", 1)
    if rows != spec.dim:
        raise DescriptorError(f"rows must equal the algebra dimension {spec.dim}", "module.rows")
    basis = [_cmatrix(b, f"module.basis[{i}]", rows, cols)
             for i, b in enumerate(_list(mod["basis"], "module.basis"))]
    if not basis:
        raise DescriptorError("need at least one basis element", "module.basis")
    space = ModuleSpace(spec, rows, cols, basis)
    if validate:
        report = mod_validate(space)
        if not report.ok:
            raise InvalidSpace(str(report.failures[0]))

    meas = data["measure"]
    _fields(meas, "measure", ("intervals", "atoms"))
    ivs = []
    for i, iv in enumerate(_list(meas["intervals"], "measure.intervals")):
        ctx = f"measure.intervals[{i}]"
        _list(iv, ctx, 2)
        ivs.append((_real(iv[0], f"{ctx}[0]"), _real(iv[1], f"{ctx}[1]")))
    ats = []
    for k, at in enumerate(_list(meas["atoms"], "measure.atoms")):
        ctx = f"measure.atoms[{k}]"
        _list(at, ctx, 2)
        ats.append((_real(at[0], f"{ctx}[0]"), _real(at[1], f"{ctx}[1]")))
    try:
        measure = MeasureSpace(ivs, ats)
    except ValueError as e:
        raise DescriptorError(str(e), "measure") from None

    frames = {}
    raw_frames = data.get("frames", {})
    if not isinstance(raw_frames, dict):
        raise DescriptorError("expected an object", "frames")
    m = space.dim
    for name, fr in raw_frames.items():
        ctx = f"frames.{name}"
        _fields(fr, ctx, ("intervals", "atoms"))
        _list(fr["intervals"], f"{ctx}.intervals", len(measure.intervals))
        coeffs = []
        for i, cs in enumerate(fr["intervals"]):
            c_ctx = f"{ctx}.intervals[{i}]"
            if not _list(cs, c_ctx):
                raise DescriptorError("need at least one coefficient", c_ctx)
            coeffs.append(np.array([_cvector(c, f"{c_ctx}[{j}]", m) for j, c in enumerate(cs)]))
        _list(fr["atoms"], f"{ctx}.atoms", len(measure.atoms))
        atoms = np.array([_cvector(v, f"{ctx}.atoms[{k}]", m) for k, v in enumerate(fr["atoms"])],
                         dtype=complex).reshape(-1, m)
        try:
            frames[name] = FrameMap(space, measure, coeffs, atoms)
        except InvalidSpace:
            raise
        except ValueError as e:
            raise DescriptorError(str(e), ctx) from None

    options = {}
    raw_opts = data.get("options", {})
    _fields(raw_opts, "options", (), OPTION_FIELDS)
    if "tol" in raw_opts:
        options["tol"] = _real(raw_opts["tol"], "options.tol")
        if options["tol"] < 0:
            raise DescriptorError("tolerance must be nonnegative", "options.tol")
    if "strategy" in raw_opts:
        if raw_opts["strategy"] not in STRATEGIES:
            raise DescriptorError(f"strategy must be one of {STRATEGIES}", "options.strategy")
        options["strategy"] = raw_opts["strategy"]
    if "directions" in raw_opts:
        options["directions"] = _int(raw_opts["directions"], "options.directions", 1)
    if "seed" in raw_opts:
        options["seed"] = _int(raw_opts["seed"], "options.seed", 0)
    return Descriptor(spec, space, measure, frames, options)


def loads_descriptor(text: str, validate: bool = True) -> Descriptor:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise DescriptorError(e.msg, f"line {e.lineno} column {e.colno}") from None
    return parse_descriptor(data, validate)


def load_descriptor(path, validate: bool = True) -> Descriptor:
    return loads_descriptor(Path(path).read_text(), validate)


def _num(x: float):
    x = float(x) + 0.0
    return int(x) if x.is_integer() and abs(x) < 2 ** 53 else x


def _pair(z) -> list:
    return [_num(z.real), _num(z.imag)]


def descriptor_to_json(desc: Descriptor) -> dict:
    sp = desc.space
    out = {
        "algebra": {"block_sizes": list(desc.algebra.block_sizes)},
        "module": {
            "rows": sp.rows,
            "cols": sp.cols,
            "basis": [[[_pair(z) for z in row] for row in b] for b in sp.basis],
        },
        "measure": {
            "intervals": [[_num(a), _num(b)] for a, b in desc.measure.intervals],
            "atoms": [[_num(w), _num(m)] for w, m in desc.measure.atoms],
        },
        "frames": {
            name: {
                "intervals": [[[_pair(z) for z in c] for c in cs] for cs in F.intervals],
                "atoms": [[_pair(z) for z in v] for v in F.atoms],
            }
            for name, F in desc.frames.items()
        },
    }
    if desc.options:
        out["options"] = {k: desc.options[k] for k in OPTION_FIELDS if k in desc.options}
    return out


def _format(obj, indent=0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{pad}  {json.dumps(k)}: {_format(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, list) and any(isinstance(v, (list, dict)) for v in obj):
        if all(isinstance(v, list) and not any(isinstance(w, (list, dict)) for w in v) for v in obj):
            return "[" + ", ".join(_format(v) for v in obj) + "]"
        items = [f"{pad}  {_format(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    return json.dumps(obj)


def dumps_descriptor(desc: Descriptor) -> str:
    """Deterministic JSON text; floats are written with round-trip precision."""
    return _format(descriptor_to_json(desc)) + "\n"


def save_descriptor(desc: Descriptor, path):
    Path(path).write_text(dumps_descriptor(desc))
