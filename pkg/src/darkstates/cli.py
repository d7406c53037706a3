"""Command-line front end: ``darkstates <command> [options]``.

Every command writes a header block (command, parameters, versions)
followed by its result, as JSON (default) or CSV.  Exit status is 0 on
success, 2 on invalid input and 1 on internal failure.
"""

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

import numpy as np

from . import __version__
from .darkspace import (
    constraint_certificates,
    dark_basis,
    dark_dimension,
    invisible_basis,
    transparent_basis,
    transparent_dimension,
)
from .dynamics import EvolutionConfig, almost_dark_scan, evolve
from .operators import ModelParams, build_full_tc_hamiltonian, build_rwa_hamiltonian, sector_interaction
from .quanta import cancellation_pairing, quantize, scaling_fit
from .sector import SectorBasis, rank_assignment, sector
from .singlets import RESTRICTIONS, enumerate_matchings, singlet_decompose
from .states import atomic_state, fraction_str
from .validation import InvalidArgumentError, as_fraction, check_atoms, check_couplings, check_weight
from .verify import VerificationError, run_checks

SCHEMA_VERSION = 1
_KINDS = {"dark": dark_basis, "transparent": transparent_basis, "invisible": invisible_basis}


# parsing helpers ----------------------------------------------------------


def _parse_state(text, n=None, exact=True):
    """``"100:1/3,010:2/3"`` -> atomic state."""
    terms = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        label, sep, amp = item.partition(":")
        if not sep or set(label) - {"0", "1"}:
            raise InvalidArgumentError(f"bad state term {item!r}; expected LABEL:AMPLITUDE")
        if n is not None and len(label) != n:
            raise InvalidArgumentError(f"label {label!r} does not have {n} atoms")
        terms[label] = as_fraction(amp) if exact else _complex(amp)
    if not terms:
        raise InvalidArgumentError("empty state")
    return atomic_state(terms, exact)


def _complex(text):
    text = text.strip()
    if "i" in text or "j" in text:
        try:
            return complex(text.replace("i", "j"))
        except ValueError:
            raise InvalidArgumentError(f"cannot parse amplitude {text!r}") from None
    return float(as_fraction(text))


def _float_list(text):
    try:
        return [float(as_fraction(x)) for x in text.split(",") if x.strip()]
    except InvalidArgumentError:
        raise
    except ValueError as exc:
        raise InvalidArgumentError(str(exc)) from exc


def _terms(v):
    return {lab: fraction_str(a) for lab, a in v.terms().items()}


# commands -----------------------------------------------------------------


def cmd_dim(a):
    if a.n is not None:
        ns = [check_atoms(a.n)]
    else:
        ns = range(1, check_atoms(a.n_max) + 1)
    rows = []
    for n in ns:
        ks = [check_weight(n, a.k)] if a.k is not None else range(n + 1)
        for k in ks:
            rows.append([n, k, len(sector(n, k)), dark_dimension(n, k), transparent_dimension(n, k)])
    header = ["n", "k", "sector_size", "dark_dim", "transparent_dim"]
    return [dict(zip(header, r)) for r in rows], (header, rows)


def cmd_dark_basis(a):
    n = check_atoms(a.n)
    k = check_weight(n, a.k)
    sub = _KINDS[a.kind](n, k, a.g)
    vecs = [_terms(v) for v in sub.vectors]
    rows = [[i, lab, amp] for i, v in enumerate(vecs) for lab, amp in v.items()]
    result = {
        "kind": a.kind,
        "dim": sub.dim,
        "couplings": [fraction_str(g) for g in sub.couplings],
        "vectors": vecs,
    }
    return result, (["vector", "label", "amplitude"], rows)


def cmd_witness(a):
    n = check_atoms(a.n)
    k = check_weight(n, a.k)
    if k < 1:
        raise InvalidArgumentError("witnesses need k >= 1")
    kind, certs = constraint_certificates(n, k)
    if a.target is not None:
        if len(a.target) != n or set(a.target) - {"0", "1"}:
            raise InvalidArgumentError(f"target must be a {n}-atom label, got {a.target!r}")
        code = int(a.target, 2)
        if code not in certs:
            space = "B(n,k-1)" if kind == "column" else "B(n,k)"
            raise InvalidArgumentError(f"{a.target} is not a {kind} target in {space}")
        certs = {code: certs[code]}
    out, rows = [], []
    for code, v in certs.items():
        label = format(code, f"0{n}b")
        entry = {"target": label, "amplitudes": _terms(v)}
        if kind == "column":
            ranks = rank_assignment(n, k, code).member_rank
            entry["member_rank"] = {format(c, f"0{n}b"): ranks[c] for c in sector(n, k).codes}
        out.append(entry)
        rows.extend([label, lab, amp] for lab, amp in entry["amplitudes"].items())
    return {"certificate": kind, "witnesses": out}, (["target", "label", "amplitude"], rows)


def cmd_singlet_decompose(a):
    if a.state is not None:
        v = _parse_state(a.state)
    else:
        n = check_atoms(a.n)
        k = check_weight(n, a.k)
        basis = dark_basis(n, k)
        if not 0 <= a.basis_index < basis.dim:
            raise InvalidArgumentError(f"basis index must be in [0, {basis.dim})")
        v = basis.vectors[a.basis_index]
    dec = singlet_decompose(v, a.restrict)
    rows = [[str(m), fraction_str(c)] for m, c in zip(dec.family, dec.coefficients)]
    result = {"target": _terms(dec.target), **dec.to_json()}
    result["family"] = [str(m) for m in dec.family]
    return result, (["matching", "coefficient"], rows)


def cmd_matchings(a):
    n = check_atoms(a.n)
    if a.k < 0 or 2 * a.k > n:
        raise InvalidArgumentError(f"need 0 <= 2k <= n, got k={a.k}")
    ms = enumerate_matchings(n, a.k, a.restrict)
    rows = [[str(m)] for m in ms]
    return {"count": len(ms), "matchings": [str(m) for m in ms]}, (["matching"], rows)


def cmd_quanta_check(a):
    v = _parse_state(a.state)
    if not isinstance(v.basis, SectorBasis):
        raise InvalidArgumentError("quanta-check needs a state of one excitation weight")
    H = sector_interaction(v.basis.n, v.basis.k)
    eps = [as_fraction(e) for e in a.epsilon.split(",") if e.strip()]
    if not eps or any(e <= 0 for e in eps):
        raise InvalidArgumentError("epsilon list must hold positive values")
    reports = []
    for e in eps:
        reports.append(cancellation_pairing(quantize(v, H, e)).to_json())
    K, ratios, fitted = scaling_fit([r["epsilon"] for r in reports], [r["shift_error"] for r in reports])
    header = ["epsilon", "nu", "n_quanta", "amp_error", "passage_error", "shift_error",
              "cancelled_fraction", "condition_q"]
    rows = [[r[h] for h in header] for r in reports]
    result = {"reports": reports, "K": K, "halving_ratios": ratios, "fitted_ratio": fitted}
    return result, (header, rows)


def _model(a, n):
    g = check_couplings(n, a.g, exact=False)
    return ModelParams(n, g, a.omega_c, a.omega_a)


def cmd_evolve(a):
    if a.state is not None:
        v = _parse_state(a.state, exact=False)
    else:
        n = check_atoms(a.n)
        k = check_weight(n, a.k)
        basis = dark_basis(n, k, a.g)
        if not 0 <= a.dark_index < basis.dim:
            raise InvalidArgumentError(f"dark index must be in [0, {basis.dim})")
        v = basis.vectors[a.dark_index]
    if v.norm() == 0:
        raise InvalidArgumentError("zero state")
    v = v.normalized()
    n = v.basis.n
    params = _model(a, n)
    config = EvolutionConfig(a.T, a.steps, a.integrator, a.m_max)
    if a.model == "rwa":
        if not isinstance(v.basis, SectorBasis):
            raise InvalidArgumentError("RWA evolution needs a state of one excitation weight")
        H = build_rwa_hamiltonian(params, v.basis.k)
    else:
        H = build_full_tc_hamiltonian(params, a.m_max)
    _, prof = evolve(H, v, config)
    header = ["time", "photon_expectation", "atomic_excitation"]
    rows = [[float(t), float(p), float(x)] for t, p, x in
            zip(prof.times, prof.photon_expectation, prof.atomic_excitation)]
    result = {
        "summary": prof.summary(),
        "times": prof.times.tolist(),
        "photon_expectation": prof.photon_expectation.tolist(),
        "atomic_excitation": prof.atomic_excitation.tolist(),
    }
    return result, (header, rows)


def cmd_almost_dark_scan(a):
    omegas = _float_list(a.omega)
    config = EvolutionConfig(a.T, a.steps, m_max=a.m_max)
    pts = almost_dark_scan(omegas, float(as_fraction(a.g)), a.T, config, a.initial, omega_c=a.omega_c)
    header = ["omega_a", "max_leakage", "max_leakage_refined", "converged"]
    rows = [list(p) for p in pts]
    leak = [p.max_leakage for p in pts]
    mono = all(x >= y for x, y in zip(leak, leak[1:]))
    result = {"points": [p._asdict() for p in pts], "non_increasing": mono}
    return result, (header, rows)


def cmd_verify(a):
    results = run_checks(a.n_max, seed=a.seed)
    rows = [[name, ok, detail] for name, ok, detail in results]
    return {"checks": [dict(zip(("name", "ok", "detail"), r)) for r in rows]}, (
        ["name", "ok", "detail"],
        rows,
    )


# argument parser ----------------------------------------------------------


def _common(p):
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("-o", "--output", help="write to this file instead of stdout")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized checks")


def _model_args(p):
    p.add_argument("--g", default=None, help="couplings, comma separated (p/q allowed)")
    p.add_argument("--omega-c", type=float, default=1.0)
    p.add_argument("--omega-a", type=float, default=1.0)


def build_parser():
    parser = argparse.ArgumentParser(prog="darkstates", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dim", help="dimension table")
    p.add_argument("--n-max", type=int, default=8)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.set_defaults(func=cmd_dim)

    p = sub.add_parser("dark-basis", help="exact dark/transparent/invisible basis")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--g", default=None)
    p.add_argument("--kind", choices=sorted(_KINDS), default="dark")
    p.set_defaults(func=cmd_dark_basis)

    p = sub.add_parser("witness", help="constraint-independence certificates")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--target", help="label of one parent (or member, for row certificates)")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("singlet-decompose", help="expand a dark state over singlet products")
    p.add_argument("--state", help='exact state, e.g. "1010:1,0110:-1"')
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--basis-index", type=int, default=0)
    p.add_argument("--restrict", choices=RESTRICTIONS, default="non_crossing_uncovered")
    p.set_defaults(func=cmd_singlet_decompose)

    p = sub.add_parser("matchings", help="list singlet matchings")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--restrict", choices=RESTRICTIONS, default="non_crossing_uncovered")
    p.set_defaults(func=cmd_matchings)

    p = sub.add_parser("quanta-check", help="amplitude quantization reports")
    p.add_argument("--state", required=True)
    p.add_argument("--epsilon", default="1/8,1/16,1/32,1/64,1/128,1/256")
    p.set_defaults(func=cmd_quanta_check)

    p = sub.add_parser("evolve", help="unitary evolution with emission profile")
    p.add_argument("--state", help='initial atomic state, e.g. "11:1,00:-1"')
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--dark-index", type=int, default=0)
    p.add_argument("--model", choices=("rwa", "tc"), default="rwa")
    _model_args(p)
    p.add_argument("--T", type=float, default=50.0)
    p.add_argument("--steps", type=int, default=500)
    p.add_argument("--m-max", type=int, default=None)
    p.add_argument("--integrator", choices=("auto", "expm", "rk4"), default="auto")
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("almost-dark-scan", help="leakage of a two-atom state versus omega_a")
    p.add_argument("--omega", default="0.5,0.25,0.125")
    p.add_argument("--omega-c", type=float, default=None)
    p.add_argument("--g", default="1")
    p.add_argument("--T", type=float, default=50.0)
    p.add_argument("--steps", type=int, default=500)
    p.add_argument("--m-max", type=int, default=None)
    p.add_argument("--initial", choices=("almost_dark", "singlet"), default="almost_dark")
    p.set_defaults(func=cmd_almost_dark_scan)

    p = sub.add_parser("verify", help="run the invariant suite")
    p.add_argument("--n-max", type=int, default=6)
    p.set_defaults(func=cmd_verify)

    for p in sub.choices.values():
        _common(p)
    return parser


def _jsonable(x):
    if isinstance(x, Fraction):
        return fraction_str(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.bool_):
        return bool(x)
    raise TypeError(f"not serializable: {type(x)}")


def _render(a, result, table):
    params = {
        k: v for k, v in sorted(vars(a).items()) if k not in ("func", "output", "format", "command")
    }
    header = {
        "command": a.command,
        "artifact_version": __version__,
        "schema_version": SCHEMA_VERSION,
        "parameters": params,
    }
    if a.format == "json":
        return json.dumps({**header, "result": result}, indent=2, sort_keys=True, default=_jsonable) + "\n"
    buf = io.StringIO()
    buf.write(f"# command: {a.command}\n")
    buf.write(f"# artifact_version: {__version__}\n")
    buf.write(f"# schema_version: {SCHEMA_VERSION}\n")
    for k, v in params.items():
        buf.write(f"# {k}: {v}\n")
    w = csv.writer(buf, lineterminator="\n")
    cols, rows = table
    w.writerow(cols)
    w.writerows(rows)
    return buf.getvalue()


def main(argv=None):
    parser = build_parser()
    a = parser.parse_args(argv)
    try:
        result, table = a.func(a)
        text = _render(a, result, table)
    except VerificationError as exc:
        print(f"darkstates: {exc}", file=sys.stderr)
        return 1
    except InvalidArgumentError as exc:
        print(f"darkstates: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"darkstates: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    if a.output:
        with open(a.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
