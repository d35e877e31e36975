"""Command-line interface.

Weight files are JSON: ``{"d": 1, "alpha": 1.0, "A": [[...], ...]}`` with
optional ``"B_L"``, ``"B_R"``, ``"beta_L"``, ``"beta_R"``.  A complex entry
is either a plain number or a ``[re, im]`` pair.  Results go to stdout as JSON
(or ``key: value`` lines with ``--text``).

Exit codes: 0 success, 1 bad input, 2 assumption violated (repeated zero or a
zero on the unit circle), 3 numerical failure or oracle mismatch.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import numkit, oracles, fixtures
from .errors import AssumptionViolation, NumericalFailure, ValidationError
from .invariant import free_energy, invariant_boundaries
from .process import assemble_chain, covariance_toeplitz, sample
from .symbol import compute_spectrum, fourier_coefficient
from .szego import (TrigPolySymbol, asymptotic_report, block_reduce, corrected_toeplitz,
                    plain_toeplitz_det, symbol_of_weight)
from .verify import cross_check
from .weights import BoundaryWeight, GaussianWeight, make_gaussian_weight

EXIT_OK, EXIT_INPUT, EXIT_ASSUMPTION, EXIT_NUMERICAL = 0, 1, 2, 3


# --- serialisation ----------------------------------------------------------

def _parse_scalar(x, where: str) -> complex:
    if isinstance(x, bool):
        raise ValidationError(f"{where}: expected a number, got {x!r}")
    if isinstance(x, (int, float)):
        return complex(x)
    if isinstance(x, list) and len(x) == 2 and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in x):
        return complex(x[0], x[1])
    raise ValidationError(f"{where}: expected a number or [re, im], got {x!r}")


def parse_matrix(data, name: str, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Nested row-major list -> complex array, naming the offending entry on error."""
    if not isinstance(data, list) or not all(isinstance(r, list) for r in data):
        raise ValidationError(f"{name}: expected a list of rows")
    if shape is not None and len(data) != shape[0]:
        raise ValidationError(f"{name}: expected {shape[0]} rows, got {len(data)}")
    ncol = shape[1] if shape is not None else (len(data[0]) if data else 0)
    M = np.empty((len(data), ncol), dtype=np.complex128)
    for i, row in enumerate(data):
        if len(row) != ncol:
            raise ValidationError(f"{name}: row {i} has {len(row)} entries, expected {ncol}")
        for j, x in enumerate(row):
            M[i, j] = _parse_scalar(x, f"{name}[{i}][{j}]")
    return numkit.as_matrix(M, name)


def encode(x):
    """JSON-ready form: complex -> [re, im], arrays -> nested lists.

    Arrays and scalars with an exactly zero imaginary part are written as
    plain reals; parsing them back gives the same complex128 bits.
    """
    if isinstance(x, dict):
        return {k: encode(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [encode(v) for v in x]
    if isinstance(x, np.ndarray):
        if np.iscomplexobj(x) and not np.any(x.imag):
            x = x.real
        return encode(x.tolist())
    if isinstance(x, (complex, np.complexfloating)):
        if x.imag == 0:
            return float(x.real)
        return [float(x.real), float(x.imag)]
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, (np.integer, np.bool_)):
        return x.item()
    return x


def read_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from exc


def load_weight_file(path: str):
    """Return ``(weight, B_L or None, B_R or None)`` from a JSON weight file."""
    return weight_from_dict(read_json(path))


def weight_from_dict(raw: dict):
    if not isinstance(raw, dict):
        raise ValidationError("weight file must hold a JSON object")
    for key in ("d", "alpha", "A"):
        if key not in raw:
            raise ValidationError(f"missing key {key!r}")
    d = raw["d"]
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        raise ValidationError(f"d must be a positive integer, got {d!r}")
    A = parse_matrix(raw["A"], "A", (2 * d, 2 * d))
    w = make_gaussian_weight(raw["alpha"], A)
    bounds = []
    for side in ("L", "R"):
        if f"B_{side}" in raw:
            B = parse_matrix(raw[f"B_{side}"], f"B_{side}", (d, d))
            bounds.append(BoundaryWeight(raw.get(f"beta_{side}", 1.0), B))
        else:
            bounds.append(None)
    return w, bounds[0], bounds[1]


def weight_to_dict(w: GaussianWeight, bL: BoundaryWeight | None = None,
                   bR: BoundaryWeight | None = None) -> dict:
    out = {"d": w.d, "alpha": w.alpha, "A": encode(w.A)}
    for side, b in (("L", bL), ("R", bR)):
        if b is not None:
            out[f"B_{side}"] = encode(b.B)
            out[f"beta_{side}"] = b.beta
    return out


def load_symbol_file(path: str) -> TrigPolySymbol:
    """``{"d": d, "coefficients": [Psi_0, Psi_1, ..., Psi_N]}``."""
    raw = read_json(path)
    if not isinstance(raw, dict) or "coefficients" not in raw or "d" not in raw:
        raise ValidationError("symbol file needs keys 'd' and 'coefficients'")
    d = raw["d"]
    cs = [parse_matrix(c, f"coefficients[{j}]", (d, d)) for j, c in enumerate(raw["coefficients"])]
    return TrigPolySymbol(tuple(cs))


# --- commands -----------------------------------------------------------------

def cmd_validate(args):
    raw = read_json(args.file)
    try:
        w, _, _ = weight_from_dict(raw)
    except ValidationError as exc:
        report = {"valid": False, "error": str(exc)}
        try:
            d = raw["d"]
            A = parse_matrix(raw["A"], "A", (2 * d, 2 * d))
            report["min_eigenvalue"] = numkit.min_eigenvalue(A)
            report["rank_A_LR"] = numkit.numerical_rank(A[:d, d:])
        except (ValidationError, KeyError, TypeError):
            pass
        return report, EXIT_INPUT, str(exc)
    rank = w.d - w.k
    return ({"valid": True, "d": w.d, "alpha": w.alpha, "min_eigenvalue": numkit.min_eigenvalue(w.A),
             "rank_A_LR": rank, "k": w.k, "regime": "I" if w.k == 0 else "I'"}, EXIT_OK, None)


def _spectrum_dict(s):
    return {
        "d": s.d, "k": s.k,
        "zeros_inside": s.zeros_inside, "zeros_outside": s.zeros_outside,
        "u_inside": s.u_inside.T, "u_outside": s.u_outside.T,
        "alpha_inside": s.alpha_inside, "alpha_outside": s.alpha_outside,
        "ker_A_LR": s.ker_LR.T, "ker_A_RL": s.ker_RL.T,
        "p_top": s.p_top, "psi_const": s.psi_const,
    }


def cmd_spectrum(args):
    w, _, _ = load_weight_file(args.file)
    return _spectrum_dict(compute_spectrum(w)), EXIT_OK, None


def cmd_boundaries(args):
    w, _, _ = load_weight_file(args.file)
    ib = invariant_boundaries(w)
    return ({"W_lt1": ib.W_lt1, "W_gt1_inv": ib.W_gt1_inv,
             "B_L": ib.B_L.B, "beta_L": ib.B_L.beta, "B_R": ib.B_R.B, "beta_R": ib.B_R.beta,
             "Lambda": ib.Lambda, "free_energy": ib.free_energy}, EXIT_OK, None)


def cmd_free_energy(args):
    w, _, _ = load_weight_file(args.file)
    if args.method == "dft" and args.p is None:
        raise ValidationError("--method dft needs --p")
    f = free_energy(w, None, args.method, args.p)
    return {"method": args.method, "P": args.p, "free_energy": f}, EXIT_OK, None


def _chain_boundaries(w, bL, bR):
    if bL is not None and bR is not None:
        return bL, bR, False
    ib = invariant_boundaries(w)
    return bL or ib.B_L, bR or ib.B_R, bL is None and bR is None


def cmd_covariance(args):
    w, bL, bR = load_weight_file(args.file)
    bL, bR, eigen = _chain_boundaries(w, bL, bR)
    law = assemble_chain(w, bL, bR, args.p)
    out = {"P": args.p, "eigen_boundaries": eigen, "toeplitz": law.is_toeplitz, "Sigma": law.Sigma}
    if eigen:
        s = compute_spectrum(w)
        out["C"] = {str(k): fourier_coefficient(s, k) for k in range(-args.p, args.p + 1)}
        err = np.abs(covariance_toeplitz(s, args.p).dense() - law.Sigma).max()
        if err > args.tol:
            raise NumericalFailure(f"chain covariance differs from Toeplitz(C) by {err:.3g}")
    return out, EXIT_OK, None


def cmd_sample(args):
    w, bL, bR = load_weight_file(args.file)
    bL, bR, _ = _chain_boundaries(w, bL, bR)
    law = assemble_chain(w, bL, bR, args.p)
    draws = sample(law, args.n, args.seed)
    return {"P": args.p, "n": args.n, "seed": args.seed, "draws": draws}, EXIT_OK, None


def cmd_szego(args):
    if args.order_n:
        sym = block_reduce(load_symbol_file(args.order_n))
    elif args.file:
        w, _, _ = load_weight_file(args.file)
        sym = symbol_of_weight(w)
    else:
        raise ValidationError("szego needs a weight file or --order-n FILE")
    ct = corrected_toeplitz(sym, args.p)
    det = oracles.dense_det(ct.matrix.dense()).real
    out = {"P": args.p, "g": ct.g, "kappa": ct.kappa, "corrected_det": det,
           "predicted_det": ct.predicted_det(), "plain_det": plain_toeplitz_det(sym, args.p)}
    if args.p >= 4:
        out["table"] = [vars(r) for r in asymptotic_report(sym, args.p)]
    rel = abs(det - ct.predicted_det()) / ct.predicted_det()
    if rel > args.tol:
        return out, EXIT_NUMERICAL, f"corrected determinant misses g^P kappa by {rel:.3g}"
    return out, EXIT_OK, None


def cmd_verify(args):
    weights = []
    if not args.no_fixtures:
        weights += [("ou", fixtures.ou()), ("rank-deficient", fixtures.rank_deficient())]
    for path in args.files:
        weights.append((path, load_weight_file(path)[0]))
    for i in range(args.random):
        d = 1 + i % 4
        weights.append((f"random d={d} seed={args.seed + i}", oracles.random_weight(d, args.seed + i)))
    t0 = time.perf_counter()
    results, failed = [], []
    for name, w in weights:
        for c in cross_check(w, args.tol):
            results.append({"weight": name, "check": c.name, "error": c.error, "tol": c.tol, "ok": c.ok})
            if not c.ok:
                failed.append(f"{name}: {c.name} (error {c.error:.3g})")
    out = {"weights": len(weights), "checks": len(results), "failed": len(failed),
           "seconds": time.perf_counter() - t0, "results": results}
    if failed:
        return out, EXIT_NUMERICAL, "oracle mismatch: " + "; ".join(failed)
    return out, EXIT_OK, None


# --- entry point ----------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    # usage errors are input errors; argparse's own code 2 is taken
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="eigenbc", description="Eigen-boundary conditions for Gaussian chains")
    p.add_argument("--tol", type=float, default=1e-8, help="verification tolerance (default 1e-8)")
    p.add_argument("--text", action="store_true", help="human-readable output instead of JSON")
    sub = p.add_subparsers(dest="command", required=True)

    def with_file(name, help, optional=False):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("file", nargs="?" if optional else None, help="weight file (JSON, '-' for stdin)")
        return sp

    with_file("validate", "check Hermitian/PD and report the rank regime").set_defaults(func=cmd_validate)
    with_file("spectrum", "zeros, kernel vectors and residues").set_defaults(func=cmd_spectrum)
    with_file("boundaries", "eigen-boundaries, Lambda and free energy").set_defaults(func=cmd_boundaries)
    sp = with_file("free-energy", "free energy per edge")
    sp.add_argument("--method", choices=["eigen", "integral", "dft"], default="eigen")
    sp.add_argument("--p", type=int, default=None, help="ring size for --method dft")
    sp.set_defaults(func=cmd_free_energy)
    sp = with_file("covariance", "covariance of a chain with P edges")
    sp.add_argument("--p", type=int, required=True)
    sp.set_defaults(func=cmd_covariance)
    sp = with_file("sample", "draw chain configurations")
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--seed", type=int, required=True)
    sp.set_defaults(func=cmd_sample)
    sp = with_file("szego", "corner-corrected Toeplitz determinants", optional=True)
    sp.add_argument("--p", type=int, required=True)
    sp.add_argument("--order-n", dest="order_n", metavar="FILE", help="symbol file of order N >= 2")
    sp.set_defaults(func=cmd_szego)
    sp = sub.add_parser("verify", help="cross-check against brute-force oracles")
    sp.add_argument("files", nargs="*", help="extra weight files")
    sp.add_argument("--random", type=int, default=10, help="number of random weights (default 10)")
    sp.add_argument("--seed", type=int, default=0, help="first seed for random weights")
    sp.add_argument("--no-fixtures", action="store_true", help="skip the built-in reference weights")
    sp.set_defaults(func=cmd_verify)
    return p


def _render_text(out, prefix=""):
    lines = []
    for k, v in out.items():
        if isinstance(v, dict):
            lines += _render_text(v, f"{prefix}{k}.")
        else:
            lines.append(f"{prefix}{k}: {json.dumps(encode(v))}")
    return lines


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code
    try:
        out, code, message = args.func(args)
    except ValidationError as exc:
        out, code, message = None, EXIT_INPUT, str(exc)
    except AssumptionViolation as exc:
        out, code, message = None, EXIT_ASSUMPTION, f"assumption violated: {exc}"
    except NumericalFailure as exc:
        out, code, message = None, EXIT_NUMERICAL, f"numerical failure: {exc}"
    if out is not None:
        if args.text:
            print("\n".join(_render_text(out)))
        else:
            print(json.dumps(encode(out)))
    if message:
        print(f"eigenbc {args.command}: {message}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
