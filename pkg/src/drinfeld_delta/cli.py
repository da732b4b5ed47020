"""Command-line front end.

Subcommands
    analyze  <config>   invariants, residual checks, slope/Hodge verdict
    verify   <config>   identity battery only (exit 4 on any failure)
    slopes   <config>   Newton data of a raw operator matrix

Configs are JSON; field elements are little-endian digit lists over F_p,
series are {"lead": int, "coeffs": [element, ...], "prec": int?}.  Reports
are emitted as JSON with sorted keys so identical inputs give identical
bytes; timing goes to stderr only.

Exit codes: 0 ok, 1 bad input, 2 precision exhausted, 3 undecided at this
precision, 4 a verification check failed.
"""

import argparse
import json
import random
import sys
import time

from .errors import (
    DrinfeldDeltaError,
    Inconsistent,
    NotAdmissible,
    ParseError,
    PrecisionExhausted,
    Undecided,
    UnsupportedDimension,
    ValidationError,
)
from .ffield import Field, is_irreducible
from .series import SeriesRing
from .twisted import (
    AndersonModule,
    DrinfeldModule,
    TwistedSeries,
    motive_reconstruct,
    motive_reduce,
    s_star_invert,
)
from . import invariants as inv_mod
from . import isocrystal as iso
from . import jets
from . import linalg as la

MIN_PRECISION = 10


# -- (de)serialization --------------------------------------------------------


def _de_element(field, obj):
    if not isinstance(obj, list) or not all(isinstance(c, int) for c in obj):
        raise ParseError("field elements are little-endian digit lists")
    if any(not 0 <= c < field.p for c in obj):
        raise ParseError(f"digits must lie in [0, {field.p})")
    if len(obj) > field.n:
        raise ParseError(f"too many digits for a degree-{field.n} extension")
    return field.from_coeffs(obj)


def _de_series(ring, obj, default_prec):
    if not isinstance(obj, dict) or "coeffs" not in obj:
        raise ParseError('series are {"lead": int, "coeffs": [...], "prec": int?}')
    lead = obj.get("lead", 0)
    prec = obj.get("prec", default_prec)
    if not isinstance(lead, int) or not isinstance(prec, int):
        raise ParseError("series lead and prec must be integers")
    coeffs = [_de_element(ring.field, c) for c in obj["coeffs"]]
    if lead + len(coeffs) > prec:
        raise ParseError("series window extends past its own precision")
    return ring.make(lead, coeffs, prec)


def _ser_series(x):
    field = x.ring.field
    cs = list(x.coeffs)
    while cs and cs[-1] == 0:  # the window pads with zeros; round-trip safe
        cs.pop()
    return {
        "lead": x.lead,
        "coeffs": [field.coeffs(c) for c in cs],
        "prec": x.prec,
    }


def _ser_fraction(fr):
    return [fr.numerator, fr.denominator]


def _ser_floor(f):
    if f is None:
        return None
    return "exact" if f == float("inf") else int(f)


# -- configuration ------------------------------------------------------------


def parse_config(path, overrides):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read config: {exc}")
    except json.JSONDecodeError as exc:
        raise ParseError(f"config is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        raise ParseError("config must be a JSON object")

    for key in ("p", "h", "s", "field_modulus"):
        if key not in raw:
            raise ParseError(f"missing config key {key!r}")
    p, h, s = raw["p"], raw["h"], raw["s"]
    if not (isinstance(p, int) and p >= 2 and all(p % k for k in range(2, p))):
        raise ParseError("p must be a prime")
    if not (isinstance(h, int) and h >= 1 and isinstance(s, int) and s >= 1):
        raise ParseError("h and s must be positive integers")
    modulus = raw["field_modulus"]
    if (
        not isinstance(modulus, list)
        or len(modulus) != h * s + 1
        or modulus[-1] != 1
    ):
        raise ParseError(
            "field_modulus must be a monic degree h*s coefficient list"
        )
    if not is_irreducible(tuple(modulus), p):
        raise ParseError("field_modulus is not irreducible over F_p")
    field = Field(p, tuple(modulus))
    ring = SeriesRing(field, h)

    options = raw.get("options", {})
    if not isinstance(options, dict):
        raise ParseError("options must be an object")
    precision = overrides.get("precision") or raw.get("precision")
    if not isinstance(precision, int) or precision < MIN_PRECISION:
        raise ParseError(f"precision must be an integer >= {MIN_PRECISION}")

    cfg = {
        "ring": ring,
        "N": precision,
        "pad": options.get("pad"),
        "tau_cut": overrides.get("tau_cut") or options.get("tau_cut"),
        "seed": overrides.get("seed", options.get("seed", 0)),
        "checks": options.get("checks"),
        "field_desc": {"p": p, "h": h, "s": s, "modulus": modulus},
    }
    for key in ("pad", "tau_cut"):
        if cfg[key] is not None and (not isinstance(cfg[key], int) or cfg[key] < 1):
            raise ParseError(f"{key} must be a positive integer")

    if "module" in raw:
        cfg["module"] = _de_module(ring, raw["module"], cfg)
    if "matrix" in raw:
        mat = raw["matrix"]
        default_prec = precision + 8
        if not isinstance(mat, list) or not mat:
            raise ParseError("matrix must be a nonempty list of rows")
        rows = []
        for row in mat:
            if not isinstance(row, list) or len(row) != len(mat):
                raise ParseError("matrix must be square")
            rows.append(tuple(_de_series(ring, e, default_prec) for e in row))
        cfg["matrix"] = tuple(rows)
    return cfg


def _de_module(ring, obj, cfg):
    if not isinstance(obj, dict) or "coefficients" not in obj:
        raise ParseError('module needs {"d": int, "coefficients": [...]}')
    d = obj.get("d", 1)
    coeffs = obj["coefficients"]
    if not isinstance(coeffs, list) or len(coeffs) < 2:
        raise ParseError("need tau-degree coefficients up to the rank")
    depth = len(coeffs) - 1
    pad = cfg["pad"] if cfg["pad"] is not None else depth + 4
    default_prec = cfg["N"] + pad + 8
    if d == 1:
        series = [_de_series(ring, c, default_prec) for c in coeffs]
        return DrinfeldModule(ring, series)
    mats = []
    for M in coeffs:
        if not isinstance(M, list) or len(M) != d:
            raise ParseError(f"each coefficient must be a {d}x{d} matrix")
        mats.append(
            tuple(tuple(_de_series(ring, e, default_prec) for e in row) for row in M)
        )
    return AndersonModule(ring, mats)


# -- analyze ------------------------------------------------------------------


def _invariants_report(mod, cfg):
    N = cfg["N"]
    nu, inv = inv_mod.compute_invariants(
        mod, N, tau_cut=cfg["tau_cut"], pad=cfg["pad"], stabilize=True
    )
    pad = cfg["pad"] if cfg["pad"] is not None else mod.r + 4
    residuals = inv_mod.verify_identities(mod, inv, nu, N + pad, N)
    M = inv_mod.f_star_matrix(mod, inv)
    report = {
        "invariants": {
            "m": inv.m,
            "cl": inv.cl,
            "h_seq": list(inv.h_seq),
            "lambdas": [_ser_series(l) for l in inv.lambdas],
            "gamma": _ser_series(inv.gamma),
            "f_list": [_ser_series(f) for f in inv.f_list],
            "alphas_head": [_ser_series(a) for a in inv.alphas[:8]],
            "certified_precision": inv.precision,
        },
        "f_star": [[_ser_series(e) for e in row] for row in M],
        "residuals": _ser_residuals(residuals),
    }
    try:
        wa = iso.weak_admissibility(mod.ring, M, inv.lambdas, inv.gamma)
        report["isocrystal"] = {
            "weakly_admissible": wa["weakly_admissible"],
            "t_N": wa["t_N"],
            "t_H": wa["t_H"],
            "slopes": [_ser_fraction(x) for x in wa["slopes"]],
            "hodge_divisors": list(wa["hodge_divisors"]),
            "fil_dims": list(wa["fil_dims"]),
            "pole_order": wa["pole_order"],
            "note": wa["note"],
        }
    except Undecided as exc:
        report["isocrystal"] = {"undecided": str(exc)}
    return report


def _ser_residuals(res):
    out = {}
    for name, entry in res.items():
        e = dict(entry)
        for key in ("floor", "construction_column_floor"):
            if key in e:
                e[key] = _ser_floor(e[key])
        out[name] = e
    return out


def _anderson_report(mod, cfg):
    N = cfg["N"]
    cap = N + (cfg["pad"] if cfg["pad"] is not None else mod.s + 4)
    cut = cfg["tau_cut"] if cfg["tau_cut"] is not None else N + mod.s + 4
    nu = jets.nu1(mod, cut, cap)
    floor = jets.nu1_residual(mod, nu, cap)
    val_ok = all(
        la.mat_ord_lb(M) >= i for i, M in nu.terms.items()
    )
    # a 1 x d row supported at tau^s, to be pushed below degree s
    row = tuple(
        mod.ring.one(cap) if j == 0 else mod.ring.zero(cap) for j in range(mod.d)
    )
    elem = TwistedSeries(mod.ring, 1, mod.d, {mod.s: (row,)})
    coords = motive_reduce(mod, elem, cap)
    back = motive_reconstruct(mod, coords, cap)
    floor_rt, _ = back.sub(elem).represented_zero_floor()
    return {
        "partial": True,
        "note": (
            "character invariants require d = 1 "
            "(UnsupportedDimension); reporting the N^1 layer only"
        ),
        "nu1": {
            "terms": cut,
            "valuation_ok": val_ok,
            "residual_floor": _ser_floor(floor),
            "pass": val_ok and floor is not None and floor >= N,
        },
        "motive": {
            "rank": mod.rank,
            "round_trip_floor": _ser_floor(floor_rt),
            "pass": floor_rt is not None and floor_rt >= N,
        },
    }


def cmd_analyze(cfg):
    if "module" not in cfg:
        raise ParseError("analyze needs a module in the config")
    mod = cfg["module"]
    report = {
        "command": "analyze",
        "field": cfg["field_desc"],
        "precision": cfg["N"],
    }
    if mod.d == 1:
        report["module"] = {"d": 1, "rank": mod.r}
        report.update(_invariants_report(mod, cfg))
        code = 0
        if "undecided" in report.get("isocrystal", {}):
            code = 3
        return report, code
    report["module"] = {"d": mod.d, "depth": mod.s, "rank": mod.rank}
    report.update(_anderson_report(mod, cfg))
    return report, 0


# -- verify -------------------------------------------------------------------


def _rand_series(ring, rng, prec, lead_range=3, terms=6, unit=False):
    lead = 0 if unit else rng.randrange(lead_range)
    cs = [rng.randrange(ring.field.size) for _ in range(terms)]
    if unit and cs[0] == 0:
        cs[0] = 1
    if not any(cs):
        cs[0] = 1
    return ring.poly(cs, prec, lead)


def _check_leibniz(ring, rng, prec, trials=25):
    z = ring.z(prec)
    for _ in range(trials):
        x = _rand_series(ring, rng, prec)
        y = _rand_series(ring, rng, prec)
        lhs = (x * y).delta()
        rhs = x.qpow(1, prec) * y.delta() + y.qpow(1, prec) * x.delta() \
            + z * x.delta() * y.delta()
        d = lhs - rhs
        if d.coeffs:
            return False, f"residual order {d.ord()}"
    return True, f"{trials} random pairs"


def _check_sstar(ring, rng, prec, trials=8):
    n_terms = 6
    for _ in range(trials):
        d = rng.choice([1, 2])
        terms = {}
        for i in range(4):
            M = []
            for r in range(d):
                row = []
                for c in range(d):
                    e = _rand_series(ring, rng, prec, unit=(i == 0 and r == c))
                    if i == 0 and r != c:
                        e = e.zshift(1)  # keeps the constant term invertible
                    row.append(e)
                M.append(tuple(row))
            terms[i] = tuple(M)
        B = TwistedSeries(ring, d, d, terms)
        Cc = s_star_invert(B, n_terms, prec)
        one = TwistedSeries.identity(ring, d, prec)
        left = Cc.compose(B, prec).sub(one)
        fl, _ = left.represented_zero_floor()
        if fl is None or fl < prec - 2:
            return False, "left inverse fails"
        right = B.compose(Cc, prec).sub(one)
        fr, _ = right.represented_zero_floor()
        if fr is None or fr < prec - 2:
            return False, "right inverse fails"
    return True, f"{trials} random operators, both sides"


def _check_ghost_shift(ring, prec, d=1, n=3):
    """w_i of the level below, pulled through Frobenius, is w_(i+1)."""
    phi = jets.jet_frobenius(ring, n, d, prec)
    w_lo = jets.ghost_map(ring, n - 1, d, prec)
    w_hi = jets.ghost_map(ring, n, d, prec)
    worst = float("inf")
    for i in range(n):
        resid = w_lo[i].compose(phi, prec).sub(w_hi[i + 1])
        fl, _ = resid.represented_zero_floor()
        if fl is None:
            return False, f"component {i} certified nonzero"
        worst = min(worst, fl)
    return worst >= prec - n, f"floor {int(worst)} over {n} components"


def _check_lf_identity(ring, prec, d=1, n=3):
    """Vertical Frobenius chain restricted to N equals (phi o i) o f-chain."""
    vert = None
    for k in range(n, 0, -1):
        step = jets.jet_frobenius(ring, k, d, prec)
        vert = step if vert is None else step.compose(vert, prec)
    lhs = vert.restrict_cols(range(d, (n + 1) * d))
    phi1 = jets.jet_frobenius(ring, 1, d, prec)
    phi_i = phi1.restrict_cols(range(d, 2 * d))
    lat = None
    for k in range(2, n + 1):
        f_k = jets.jet_frobenius(ring, k, d, prec, lateral=True)
        lat = f_k if lat is None else lat.compose(f_k, prec)
    rhs = phi_i if lat is None else phi_i.compose(lat, prec)
    resid = lhs.sub(rhs)
    fl, _ = resid.represented_zero_floor()
    if fl is None:
        return False, "certified nonzero"
    return fl >= prec - n, f"floor {int(fl)}"


def _check_character_shift(mod, nu, cap, N, kmax=4):
    """Psi_k pulled through the lateral Frobenius is Psi_(k+1)."""
    for k in range(1, kmax + 1):
        f_next = jets.jet_frobenius(mod.ring, k + 1, mod.d, cap, lateral=True)
        lhs = jets.canonical_character(k, k, nu, cap).compose(f_next, cap)
        rhs = jets.canonical_character(k + 1, k + 1, nu, cap)
        fl, _ = lhs.sub(rhs).represented_zero_floor()
        if fl is None or fl < N:
            return False, f"fails at k={k}"
    return True, f"k <= {kmax}"


def _check_nu1(mod, nu, cap, N):
    floor = jets.nu1_residual(mod, nu, cap)
    val_ok = all(la.mat_ord_lb(M) >= i for i, M in nu.terms.items())
    ok = val_ok and floor is not None and floor >= N
    return ok, f"residual floor {_ser_floor(floor)}, valuations {'ok' if val_ok else 'BAD'}"


def cmd_verify(cfg):
    if "module" not in cfg:
        raise ParseError("verify needs a module in the config")
    mod = cfg["module"]
    ring = mod.ring
    N = cfg["N"]
    rng = random.Random(cfg["seed"])
    depth = mod.r if mod.d == 1 else mod.s
    pad = cfg["pad"] if cfg["pad"] is not None else depth + 4
    cap = N + pad
    cut = cfg["tau_cut"] if cfg["tau_cut"] is not None else N + depth + 4

    checks = []

    def run(name, fn, *args, **kwargs):
        try:
            ok, detail = fn(*args, **kwargs)
        except DrinfeldDeltaError as exc:
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        checks.append({"check": name, "pass": bool(ok), "detail": detail})

    run("twisted_leibniz", _check_leibniz, ring, rng, cap)
    run("s_star_inversion", _check_sstar, ring, rng, cap)
    run("ghost_frobenius_shift", _check_ghost_shift, ring, cap, mod.d)
    run("lateral_factorization", _check_lf_identity, ring, cap, mod.d)

    nu = jets.nu1(mod, cut, cap)
    run("nu1_functional_equation", _check_nu1, mod, nu, cap, N)
    run("character_shift", _check_character_shift, mod, nu, cap, N)

    if mod.d == 1:
        def theta_checks():
            nu2, inv = inv_mod.compute_invariants(
                mod, N, tau_cut=cfg["tau_cut"], pad=cfg["pad"]
            )
            res = inv_mod.verify_identities(mod, inv, nu2, cap, N)
            bad = [k for k, v in res.items() if not v["pass"]]
            return not bad, ("all residuals pass" if not bad
                             else f"failing: {', '.join(bad)}")
        run("theta_identities", theta_checks)
    else:
        checks.append({
            "check": "theta_identities",
            "pass": True,
            "detail": "skipped: requires d = 1 (UnsupportedDimension)",
        })

    all_ok = all(c["pass"] for c in checks)
    report = {
        "command": "verify",
        "field": cfg["field_desc"],
        "precision": N,
        "seed": cfg["seed"],
        "checks": checks,
        "all_pass": all_ok,
    }
    return report, 0 if all_ok else 4


# -- slopes -------------------------------------------------------------------


def cmd_slopes(cfg):
    if "matrix" not in cfg:
        raise ParseError("slopes needs a matrix in the config")
    data = iso.newton_data(cfg["ring"], cfg["matrix"])
    report = {
        "command": "slopes",
        "field": cfg["field_desc"],
        "t_N": data["t_N"],
        "slopes": [_ser_fraction(x) for x in data["slopes"]],
        "note": "slopes of the sigma-linearized operator, scaled by 1/s",
    }
    return report, 0


# -- entry point --------------------------------------------------------------


def _emit(report, json_out):
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if json_out:
        with open(json_out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="drinfeld-delta",
        description="delta-geometric invariants of z-power modules",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in (
        ("analyze", "compute invariants and the admissibility verdict"),
        ("verify", "run the identity battery"),
        ("slopes", "Newton data of a raw operator matrix"),
    ):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("config", help="path to a JSON config")
        sp.add_argument("--precision", type=int, help="override z-precision")
        sp.add_argument("--tau-cut", type=int, dest="tau_cut",
                        help="override the tau truncation")
        sp.add_argument("--seed", type=int, help="seed for randomized checks")
        sp.add_argument("--json-out", help="write the report to a file")
    args = parser.parse_args(argv)

    overrides = {}
    for key in ("precision", "tau_cut", "seed"):
        val = getattr(args, key)
        if val is not None:
            overrides[key] = val

    t0 = time.perf_counter()
    try:
        cfg = parse_config(args.config, overrides)
        handler = {"analyze": cmd_analyze, "verify": cmd_verify,
                   "slopes": cmd_slopes}[args.command]
        report, code = handler(cfg)
    except (ParseError, ValidationError, NotAdmissible,
            UnsupportedDimension) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except PrecisionExhausted as exc:
        print(f"precision exhausted: {exc}", file=sys.stderr)
        return 2
    except Undecided as exc:
        print(f"undecided: {exc}", file=sys.stderr)
        return 3
    except Inconsistent as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 4
    _emit(report, args.json_out)
    print(f"elapsed: {time.perf_counter() - t0:.2f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
