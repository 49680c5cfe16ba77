"""Command-line interface.

Exit codes: 0 success, 2 invalid module, 3 parse or usage error, 4 not a frame,
5 kernel violation, 6 not a dual pair, 7 singular operator, 8 point out
of domain, 9 analysis not applicable to the measure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import AlgebraElement
from .descriptor import (DEFAULT_OPTIONS, Descriptor, dumps_descriptor, load_descriptor)
from .errors import (DescriptorError, InvalidSpace, KernelViolation, NotAFrame, NotApplicable,
                     OutOfDomain, Singular)
from .exactness import (FRAME_WITH_BOUND, NOT_FRAME, exactness_scan, psi_identity_defect, psi_map,
                        removal_check_atom, riesz_type_check)
from .frame import STRATEGIES, canonical_dual, duality_defect, frame_bounds

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_PARSE = 3
EXIT_NOT_FRAME = 4
EXIT_KERNEL = 5
EXIT_NOT_DUAL = 6
EXIT_SINGULAR = 7
EXIT_DOMAIN = 8
EXIT_NOT_APPLICABLE = 9

_ERROR_CODES = (
    (DescriptorError, EXIT_PARSE),
    (InvalidSpace, EXIT_INVALID),
    (NotAFrame, EXIT_NOT_FRAME),
    (KernelViolation, EXIT_KERNEL),
    (Singular, EXIT_SINGULAR),
    (OutOfDomain, EXIT_DOMAIN),
    (NotApplicable, EXIT_NOT_APPLICABLE),
)


def fmt(x: float) -> str:
    """17 significant digits, always with a decimal point or exponent."""
    s = format(float(x) + 0.0, ".17g")
    if not any(c in s for c in ".ein"):
        s += ".0"
    return s


def fmt_complex(z: complex) -> str:
    z = complex(z)
    if z.imag == 0:
        return fmt(z.real)
    sign = "-" if z.imag < 0 else "+"
    return f"{fmt(z.real)}{sign}{fmt(abs(z.imag))}j"


def fmt_vector(v) -> str:
    return "[" + ", ".join(fmt_complex(z) for z in v) + "]"


def fmt_element(a: AlgebraElement) -> str:
    if a.spec.is_commutative:
        return "diag(" + ", ".join(fmt_complex(b[0, 0]) for b in a.blocks) + ")"
    parts = ["[" + ", ".join(fmt_vector(r) for r in b) + "]" for b in a.blocks]
    return "blocks(" + ", ".join(parts) + ")"


def _pair(z):
    z = complex(z)
    return [z.real + 0.0, z.imag + 0.0]


def _element_json(a: AlgebraElement):
    return [[[_pair(z) for z in row] for row in b] for b in a.blocks]


def _canonical_vector(v) -> np.ndarray:
    """Unit vector with its largest entry made real and positive (eigenvectors are defined up to phase)."""
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    i = int(np.argmax(np.abs(v).round(12)))
    v = v * (abs(v[i]) / v[i])
    re, im = v.real.copy(), v.imag.copy()
    re[np.abs(re) < 1e-15] = 0.0
    im[np.abs(im) < 1e-15] = 0.0
    return re + 1j * im


class Session:
    """Resolved flags plus the loaded descriptor."""

    def __init__(self, args, desc: Descriptor):
        self.args = args
        self.desc = desc

    def opt(self, name):
        flag = getattr(self.args, name, None)
        if flag is not None:
            return flag
        return self.desc.option(name)

    @property
    def tol(self) -> float:
        return self.opt("tol")

    def emit(self, lines, payload):
        if self.args.json:
            print(json.dumps(payload, indent=2))
        else:
            print("\n".join(lines))


def cmd_validate(args) -> int:
    try:
        load_descriptor(args.path)
    except InvalidSpace as e:
        print(f"INVALID: {e}")
        return EXIT_INVALID
    print("VALID")
    return EXIT_OK


def cmd_bounds(s: Session) -> int:
    F = s.desc.frame(s.args.frame)
    rep = frame_bounds(F, strategy=s.opt("strategy"), n_directions=s.opt("directions"),
                       tol=s.tol, seed=s.opt("seed"))
    lines = [f"frame {s.args.frame}", f"strategy {rep.strategy}"]
    if rep.is_tight:
        lines.append(f"A=B={fmt(rep.lower)}")
    else:
        lines.append(f"A={fmt(rep.lower)}, B={fmt(rep.upper)}")
    if rep.strategy != "commutative-exact":
        lines.append(f"directions_used {rep.directions_used} (A is an upper estimate, B a lower estimate)")
    certs = {}
    for label, (block, x) in (("lower", rep.lower_witness), ("upper", rep.upper_witness)):
        x = _canonical_vector(x)
        lines.append(f"{label} certificate: block {block}, coords {fmt_vector(x)}")
        certs[label] = {"block": block, "coords": [_pair(z) for z in x]}
    s.emit(lines, {
        "frame": s.args.frame, "strategy": rep.strategy,
        "A": rep.lower, "B": rep.upper, "A_hex": float(rep.lower).hex(), "B_hex": float(rep.upper).hex(),
        "tight": rep.is_tight, "directions_used": rep.directions_used, "tolerance": rep.tolerance,
        "lower_certificate": certs["lower"], "upper_certificate": certs["upper"],
    })
    return EXIT_OK


def cmd_dual(s: Session) -> int:
    F = s.desc.frame(s.args.frame)
    G = canonical_dual(F, s.tol)
    name = s.args.name or f"{s.args.frame}_dual"
    frames = dict(s.desc.frames)
    frames[name] = G
    out = Descriptor(s.desc.algebra, s.desc.space, s.desc.measure, frames, dict(s.desc.options))
    text = dumps_descriptor(out)
    defect = duality_defect(F, G, s.tol).defect
    if s.args.out is None:
        sys.stdout.write(text)
        return EXIT_OK
    Path(s.args.out).write_text(text)
    s.emit([f"canonical dual of {s.args.frame} written as frame {name}", f"defect={fmt(defect)}"],
           {"frame": s.args.frame, "dual": name, "defect": defect, "defect_hex": float(defect).hex()})
    return EXIT_OK


def cmd_check_dual(s: Session) -> int:
    F, G = s.desc.frame(s.args.frame), s.desc.frame(s.args.other)
    rep = duality_defect(F, G, s.tol)
    s.emit([f"pair ({s.args.frame}, {s.args.other})", f"defect={fmt(rep.defect)}",
            f"is_dual={'true' if rep.is_dual else 'false'}"],
           {"frame": s.args.frame, "dual": s.args.other, "defect": rep.defect,
            "defect_hex": float(rep.defect).hex(), "is_dual": rep.is_dual, "tolerance": rep.tolerance})
    return EXIT_OK if rep.is_dual else EXIT_NOT_DUAL


def _removal_lines(r):
    where = f"atom {r.atom_index}, mass {fmt(r.mass)}" if r.atom_index is not None else "no atom"
    lines = [f"omega0={fmt(r.omega0)} ({where})", f"psi(omega0)={fmt_element(r.psi_at_omega0)}"]
    if r.verdict == NOT_FRAME:
        lines.append("verdict: NotFrame (criterion not invertible)")
    elif r.verdict == FRAME_WITH_BOUND:
        lines += [f"verdict: FrameWithBound, guaranteed={fmt(r.guaranteed_lower_bound)}",
                  f"a_norm={fmt(r.a_norm)}", f"k={fmt(r.k)}"]
    else:
        lines.append("verdict: MeasureZeroTrivial")
    lines.append(f"frame lower bound A={fmt(r.frame_lower_bound)}")
    return lines


def _removal_json(r):
    return {
        "omega0": r.omega0, "atom_index": r.atom_index, "mass": r.mass,
        "psi_at_omega0": _element_json(r.psi_at_omega0),
        "criterion_invertible": r.criterion_invertible, "verdict": r.verdict,
        "a_norm": r.a_norm, "k": r.k, "guaranteed_lower_bound": r.guaranteed_lower_bound,
        "frame_lower_bound": r.frame_lower_bound,
    }


def cmd_remove(s: Session) -> int:
    F = s.desc.frame(s.args.frame)
    a = s.args
    if a.scan:
        scan = exactness_scan(F, s.tol)
        lines = [f"frame {a.frame}"]
        for r in scan.reports:
            v = r.verdict if r.verdict != FRAME_WITH_BOUND else f"{r.verdict}, guaranteed={fmt(r.guaranteed_lower_bound)}"
            lines.append(f"atom {r.atom_index} omega0={fmt(r.omega0)}: {v}")
        lines.append(f"exact_on_atoms={'true' if scan.exact_on_atoms else 'false'}")
        s.emit(lines, {"frame": a.frame, "reports": [_removal_json(r) for r in scan.reports],
                       "exact_on_atoms": scan.exact_on_atoms})
        return EXIT_OK
    if (a.omega0 is None) == (a.atom_index is None):
        print("remove: give exactly one of --omega0, --atom-index, --scan", file=sys.stderr)
        return EXIT_PARSE
    r = removal_check_atom(F, a.omega0, atom_index=a.atom_index, tol=s.tol,
                           strategy=s.opt("strategy"))
    s.emit([f"frame {a.frame}"] + _removal_lines(r), {"frame": a.frame, **_removal_json(r)})
    return EXIT_OK


def cmd_riesz(s: Session) -> int:
    F = s.desc.frame(s.args.frame)
    r = riesz_type_check(F, s.tol)
    yn = lambda b: "n/a" if b is None else ("true" if b else "false")
    lines = [f"frame {s.args.frame}", f"applicable={yn(r.applicable)}"]
    if r.applicable:
        lines += [f"rank={r.rank}", f"target_dim={r.target_dim}"]
    lines += [f"is_riesz_type={yn(r.is_riesz_type)}", f"zero_atoms={list(r.zero_atoms)}"]
    payload = {"frame": s.args.frame, "applicable": r.applicable, "rank": r.rank,
               "target_dim": r.target_dim, "is_riesz_type": r.is_riesz_type,
               "zero_atoms": list(r.zero_atoms)}
    if r.second_dual is not None:
        lines.append(f"second dual: defect={fmt(r.second_dual_defect)}")
        for k, v in enumerate(r.second_dual.atoms):
            lines.append(f"  atom {k}: {fmt_vector(v)}")
        payload["second_dual_defect"] = r.second_dual_defect
        payload["second_dual_atoms"] = [[_pair(z) for z in v] for v in r.second_dual.atoms]
    s.emit(lines, payload)
    return EXIT_OK


def cmd_psi(s: Session) -> int:
    F = s.desc.frame(s.args.frame)
    a = s.args
    if (a.omega0 is None) == (a.atom_index is None):
        print("psi: give exactly one of --omega0, --atom-index", file=sys.stderr)
        return EXIT_PARSE
    if a.atom_index is not None:
        if not 0 <= a.atom_index < len(F.measure.atoms):
            raise OutOfDomain(f"atom index {a.atom_index} out of range")
        omega0 = F.measure.atoms[a.atom_index][0]
    else:
        omega0 = a.omega0
    psi = psi_map(F, omega0, s.tol)
    defect = psi_identity_defect(F, omega0, s.tol)
    lines = [f"frame {a.frame}", f"omega0={fmt(omega0)}, mass={fmt(F.measure.point_mass(omega0))}"]
    for i in range(len(psi.intervals)):
        terms = [fmt_element(psi.coefficient(i, j)) for j in range(len(psi.intervals[i]))]
        lines.append(f"interval {i}: " + " + ".join(f"{t}*w^{j}" for j, t in enumerate(terms)))
    for k in range(len(psi.atoms)):
        lines.append(f"atom {k}: {fmt_element(psi.atom_value(k))}")
    lines.append(f"identity defect={fmt(defect)}")
    s.emit(lines, {
        "frame": a.frame, "omega0": omega0, "identity_defect": defect,
        "intervals": [[_element_json(psi.coefficient(i, j)) for j in range(len(c))]
                      for i, c in enumerate(psi.intervals)],
        "atoms": [_element_json(psi.atom_value(k)) for k in range(len(psi.atoms))],
    })
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=argparse.SUPPRESS,
                        help=f"numerical tolerance (default {DEFAULT_OPTIONS['tol']:g})")
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="machine-readable output")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="cstarframes", parents=[common],
                                description="Continuous frames in Hilbert C*-modules.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", parents=[common], help="check a descriptor")
    v.add_argument("path")

    b = sub.add_parser("bounds", parents=[common], help="optimal frame bounds")
    b.add_argument("path")
    b.add_argument("frame")
    b.add_argument("--strategy", choices=STRATEGIES)
    b.add_argument("--directions", type=int)

    d = sub.add_parser("dual", parents=[common], help="canonical dual as a descriptor")
    d.add_argument("path")
    d.add_argument("frame")
    d.add_argument("--out")
    d.add_argument("--name", help="name of the dual frame (default <frame>_dual)")

    c = sub.add_parser("check-dual", parents=[common], help="duality defect of a pair")
    c.add_argument("path")
    c.add_argument("frame")
    c.add_argument("other")

    r = sub.add_parser("remove", parents=[common], help="atom removal analysis")
    r.add_argument("path")
    r.add_argument("frame")
    r.add_argument("--omega0", type=float)
    r.add_argument("--atom-index", type=int)
    r.add_argument("--scan", action="store_true", help="check every atom")
    r.add_argument("--strategy", choices=STRATEGIES)

    z = sub.add_parser("riesz", parents=[common], help="Riesz-type test")
    z.add_argument("path")
    z.add_argument("frame")

    q = sub.add_parser("psi", parents=[common], help="the map ω ↦ <F(ω₀), S⁻¹F(ω)>")
    q.add_argument("path")
    q.add_argument("frame")
    q.add_argument("--omega0", type=float)
    q.add_argument("--atom-index", type=int)
    return p


COMMANDS = {
    "bounds": cmd_bounds,
    "dual": cmd_dual,
    "check-dual": cmd_check_dual,
    "remove": cmd_remove,
    "riesz": cmd_riesz,
    "psi": cmd_psi,
}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors; 2 is reserved for invalid descriptors
        return EXIT_PARSE if e.code == 2 else (e.code or 0)
    for name in ("tol", "seed"):
        if not hasattr(args, name):
            setattr(args, name, None)
    args.json = getattr(args, "json", False)
    for name in ("strategy", "directions"):
        if not hasattr(args, name):
            setattr(args, name, None)
    try:
        if args.command == "validate":
            return cmd_validate(args)
        desc = load_descriptor(args.path)
        return COMMANDS[args.command](Session(args, desc))
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except tuple(cls for cls, _ in _ERROR_CODES) as e:
        code = next(c for cls, c in _ERROR_CODES if isinstance(e, cls))
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
