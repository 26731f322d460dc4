"""Command line experiment runner: ``owtf <subcommand> [flags]``.

Every subcommand prints a report (JSON by default, ``--format csv`` for a flat
table) and exits 0 iff every checked quantity passes. Errors produce a single
JSON line on stderr and one of the exit codes in :data:`EXIT_CODES`.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import os
import sys

import numpy as np

from . import constants
from .errors import OWTFError, SpecError
from .factory import parse_operator, parse_signal, random_operator
from .grid import MODERATE, MixedNormParams, PhaseGrid, parse_exponent, parse_weight, translate, unit_weight
from .io import write_array
from .locops import localization, op_conv, op_conv_direct, parse_mask, smoothed_spectrogram
from .opwindow import equivalence_report, hs_norm, nuclear_bound, op_stft, op_stft_adjoint, rank_one
from .report import ReportRecord, Row
from .tfshift import mod_norm, stft, tf_shift_matrix
from .weylcohen import (
    calibrate_duality_factor,
    calibrate_spreading_scale,
    cohen,
    half,
    spreading,
    symplectic_ft,
    weyl_quantize,
    weyl_symbol,
    wigner,
)

EXIT_CODES = {
    "ok": 0,
    "check-failed": 1,
    "parse": 2,
    "dimension-mismatch": 3,
    "degenerate-window": 4,
    "unsupported-grid": 5,
    "invalid-grid": 6,
    "not-hermitian": 7,
    "not-positive": 7,
    "window-count": 8,
    "format": 9,
    "io": 9,
    "error": 10,
}

EXACT_TOL = 1e-10


class UsageError(SpecError):
    pass


def _rel(a, b) -> float:
    """Max-norm residual of ``a - b`` relative to ``max |b|``."""
    a, b = np.asarray(a), np.asarray(b)
    scale = np.abs(b).max()
    err = np.abs(a - b).max()
    return float(err / scale) if scale > 0 else float(err)


# ---------------------------------------------------------------- identity suite


def identity_suite(N: int, seed: int) -> list[Row]:
    """Exact identities on Z_N for seeded random data; Weyl items are skipped for even N."""
    rng = np.random.default_rng(np.random.SeedSequence(seed))

    def vec():
        x = rng.standard_normal((N, 2))
        return (x[:, 0] + 1j * x[:, 1]) / np.sqrt(2)

    def mat():
        return random_operator(N, int(rng.integers(2**31)))

    rows = []
    psi, phi = vec(), vec()
    S = mat()
    nrm2 = lambda x: float(np.vdot(x, x).real)

    V = stft(psi, phi)
    rows.append(Row.check("moyal", _rel(np.sum(np.abs(V) ** 2), constants.moyal_factor(N) * nrm2(psi) * nrm2(phi)), 1e-9))

    VS = op_stft(S, psi)
    rows.append(Row.check(
        "operator_moyal", _rel(np.sum(np.abs(VS) ** 2), constants.twirl_factor(N) * hs_norm(S) ** 2 * nrm2(psi)), 1e-9))
    rec = op_stft_adjoint(S, VS) / (constants.twirl_factor(N) * hs_norm(S) ** 2)
    rows.append(Row.check("inversion", _rel(rec, psi), 1e-9))

    Psi = rng.standard_normal((N, N, N)) + 1j * rng.standard_normal((N, N, N))
    rows.append(Row.check("op_stft_adjoint", _rel(np.vdot(Psi, VS), np.vdot(op_stft_adjoint(S, Psi), psi)), 1e-9))

    rows.append(Row.check("twirl", _rel(op_conv(np.ones((N, N)), S), constants.twirl_factor(N) * np.trace(S) * np.eye(N)),
                          EXACT_TOL))

    params = MixedNormParams.unweighted(2, 2, N)
    rows.append(Row.check("mod_norm_l2", _rel(mod_norm(psi, params), np.sqrt(N) * np.linalg.norm(psi)), EXACT_TOL))

    f = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
    rows.append(Row.check(
        "symplectic_square", _rel(symplectic_ft(symplectic_ft(f)), constants.symplectic_square_factor(N) * f), EXACT_TOL))

    weyl_names = ("weyl_roundtrip", "weyl_duality", "weyl_covariance", "spreading_symbol", "spreading_convolution")
    if N % 2:
        a = rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))
        L = weyl_quantize(a)
        rows.append(Row.check("weyl_roundtrip", _rel(weyl_symbol(L), a), 1e-12))
        lhs = np.vdot(psi, L @ phi)
        rhs = constants.weyl_duality_factor(N) * np.sum(a * np.conj(wigner(psi, phi)))
        rows.append(Row.check("weyl_duality", _rel(lhs, rhs), 1e-9))
        worst = 0.0
        for k in range(N):
            for l in range(N):
                P = tf_shift_matrix((k, l), N)
                worst = max(worst, _rel(weyl_symbol(P @ L @ P.conj().T), translate(a, (k, l))))
        rows.append(Row.check("weyl_covariance", worst, EXACT_TOL))
        rows.append(Row.check("spreading_symbol", _rel(spreading(S), symplectic_ft(weyl_symbol(S))), EXACT_TOL))
        rows.append(Row.check(
            "spreading_convolution", _rel(spreading(op_conv(f, S)), symplectic_ft(f) * spreading(S)), EXACT_TOL))
    else:
        rows.extend(Row.skip(name, "even N") for name in weyl_names)

    P = rank_one(phi, phi)
    rows.append(Row.check("cohen_spectrogram", _rel(cohen(P, psi), np.abs(V) ** 2), EXACT_TOL))
    rows.append(Row.check(
        "cohen_operator_stft", _rel(cohen(S.conj().T @ S, psi), np.linalg.norm(VS, axis=2) ** 2), EXACT_TOL))

    mask = rng.random((N, N))
    A = localization(mask, phi, phi)
    Q = cohen(A, psi)
    rows.append(Row.check("smoothed_spectrogram", _rel(Q, smoothed_spectrogram(mask, phi, psi)), EXACT_TOL))
    mass = mask.sum() * constants.moyal_factor(N) * nrm2(psi) * nrm2(phi)
    rows.append(Row.check("smoothed_spectrogram_mass", _rel(Q.sum(), mass), 1e-9))
    rows.append(Row.check("localization_vs_conv", _rel(A, op_conv(mask, rank_one(phi, phi))), EXACT_TOL))
    worst = 0.0
    for k in range(N):
        for l in range(N):
            Pz = tf_shift_matrix((k, l), N)
            worst = max(worst, _rel(localization(translate(mask, (k, l)), phi, phi), Pz @ A @ Pz.conj().T))
    rows.append(Row.check("localization_covariance", worst, EXACT_TOL))
    rows.append(Row.check("conv_adjoint", _rel(op_conv(f, S).conj().T, op_conv(f.conj(), S.conj().T)), EXACT_TOL))
    # SVD bounds on both sides, so the convolution inequality is reported but not asserted
    v = unit_weight(N)
    ratio = nuclear_bound(op_conv(f, S).conj().T, v) / (np.abs(f).sum() * nuclear_bound(S.conj().T, v))
    rows.append(Row.info("conv_nuclear_ratio", ratio))
    if N <= 16:
        rows.append(Row.check("op_conv_reference", _rel(op_conv(f, S), op_conv_direct(f, S)), EXACT_TOL))
    else:
        rows.append(Row.skip("op_conv_reference", "N > 16"))
    return rows


# ---------------------------------------------------------------- helpers


def _heatmap_csv(path: str, F: np.ndarray) -> None:
    """Plot-ready ``k,l,re,im,abs`` table of a phase-space field."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "l", "re", "im", "abs"])
        for k in range(F.shape[0]):
            for l in range(F.shape[1]):
                z = complex(F[k, l])
                w.writerow([k, l, repr(z.real), repr(z.imag), repr(abs(z))])


def _save(args, F: np.ndarray) -> None:
    if getattr(args, "out", None):
        write_array(args.out, F)
    if getattr(args, "csv", None):
        _heatmap_csv(args.csv, F)


def _weights(args, N):
    v = parse_weight(args.weight, N)
    m = parse_weight(args.mod_weight, N, MODERATE) if args.mod_weight else v.as_moderate()
    return m, v


# ---------------------------------------------------------------- subcommands


def cmd_stft(args, rep: ReportRecord):
    psi = parse_signal(args.signal, args.n)
    N = psi.shape[0]
    phi = parse_signal(args.window, N)
    V = stft(psi, phi)
    rep.N = N
    moyal = constants.moyal_factor(N) * np.vdot(psi, psi).real * np.vdot(phi, phi).real
    rep.add(Row.check("moyal", _rel(np.sum(np.abs(V) ** 2), moyal), 1e-9))
    _save(args, V)


def cmd_opstft(args, rep):
    psi = parse_signal(args.signal, args.n)
    N = psi.shape[0]
    S = parse_operator(args.op, N)
    VS = op_stft(S, psi)
    rep.N = N
    target = constants.twirl_factor(N) * hs_norm(S) ** 2 * np.vdot(psi, psi).real
    rep.add(Row.check("operator_moyal", _rel(np.sum(np.abs(VS) ** 2), target), 1e-9))
    _save(args, VS)


def cmd_modnorm(args, rep):
    psi = parse_signal(args.signal, args.n)
    N = psi.shape[0]
    m = parse_weight(args.mod_weight or "one", N, MODERATE)
    params = MixedNormParams(parse_exponent(args.p), parse_exponent(args.q), m)
    value = mod_norm(psi, params)
    rep.N = N
    rep.add(Row.info("mod_norm", value))
    if params.p == params.q == 2 and np.all(m.values == 1):
        rep.add(Row.check("l2_identity", _rel(value, np.sqrt(N) * np.linalg.norm(psi)), EXACT_TOL))


def cmd_equivalence(args, rep):
    N = args.n
    if N is None:
        raise UsageError("--n is required")
    S = parse_operator(args.op, N)
    m, v = _weights(args, N)
    params = MixedNormParams(parse_exponent(args.p), parse_exponent(args.q), m)
    er = equivalence_report(S, params, v, seed=args.seed, count=args.samples, tol=args.tol)
    rep.N = N
    c = er.constants
    for name in ("c_lower", "c_upper", "c_vm", "c_vv", "nuclear_bound", "hs_norm", "gauss_m1v"):
        rep.add(Row.info(name, getattr(c, name)))
    rep.add(Row.info("v_submultiplicative", c.v_submultiplicative))
    rep.add(Row.info("ratio_min", er.ratio_min))
    rep.add(Row.info("ratio_median", er.ratio_median))
    rep.add(Row.info("ratio_max", er.ratio_max))
    rep.add(Row("verdict", er.verdict, args.tol, "pass" if er.verdict else "fail"))
    rep.extra["equivalence"] = er.to_dict()
    if args.table:
        with open(args.table, "w", newline="") as fh:
            fh.write(er.to_csv())


def cmd_cohen(args, rep):
    psi = parse_signal(args.signal, args.n)
    N = psi.shape[0]
    T = parse_operator(args.op, N)
    Q = cohen(T, psi)
    rep.N = N
    rep.add(Row.info("min_real", float(Q.real.min())))
    rep.add(Row.info("max_abs_imag", float(np.abs(Q.imag).max())))
    if np.abs(T - T.conj().T).max() <= EXACT_TOL * max(np.abs(T).max(), 1e-300):
        rep.add(Row.check("real_for_hermitian", float(np.abs(Q.imag).max() / max(np.abs(Q).max(), 1e-300)), EXACT_TOL))
    _save(args, Q)


def cmd_weyl(args, rep):
    if (args.op is None) == (args.symbol is None):
        raise UsageError("weyl needs exactly one of --op or --symbol")
    if args.n is not None:
        half(args.n)
    if args.op is not None:
        T = parse_operator(args.op, args.n)
        a = weyl_symbol(T)
        rep.add(Row.check("roundtrip", _rel(weyl_quantize(a), T), 1e-12))
        out = a
    else:
        a = parse_operator(f"file:{args.symbol}", args.n)
        T = weyl_quantize(a)
        rep.add(Row.check("roundtrip", _rel(weyl_symbol(T), a), 1e-12))
        out = T
    rep.N = out.shape[0]
    _save(args, out)


def cmd_spreading(args, rep):
    if args.n is not None:
        half(args.n)
    T = parse_operator(args.op, args.n)
    F = spreading(T)
    rep.N = T.shape[0]
    rep.add(Row.check("symbol_identity", _rel(F, symplectic_ft(weyl_symbol(T))), EXACT_TOL))
    rep.add(Row.info("calibrated_spreading_scale_N3", calibrate_spreading_scale(3)))
    _save(args, F)


def cmd_locop(args, rep):
    N = args.n
    if N is None:
        raise UsageError("--n is required")
    f = parse_mask(args.mask, N)
    phi1, phi2 = parse_signal(args.window1, N), parse_signal(args.window2, N)
    A = localization(f, phi1, phi2)
    rep.N = N
    rep.add(Row.check("matches_conv", _rel(A, op_conv(f.values, rank_one(phi2, phi1))), EXACT_TOL))
    rep.add(Row.info("hs_norm", hs_norm(A)))
    herm = float(np.abs(A - A.conj().T).max())
    rep.add(Row.info("hermitian_defect", herm))
    if f.nonnegative and np.allclose(phi1, phi2):
        w = np.linalg.eigvalsh((A + A.conj().T) / 2)
        rep.add(Row.check("psd", max(0.0, -float(w[0])) / max(float(w[-1]), 1e-300), EXACT_TOL))
    _save(args, A)


def cmd_smooth_spec(args, rep):
    psi = parse_signal(args.signal, args.n)
    N = psi.shape[0]
    f = parse_mask(args.mask, N)
    phi = parse_signal(args.window, N)
    Sm = smoothed_spectrogram(f, phi, psi)
    Q = cohen(localization(f, phi, phi), psi)
    rep.N = N
    rep.add(Row.check("cohen_identity", _rel(Q, Sm), EXACT_TOL))
    mass = np.sum(f.values) * constants.moyal_factor(N) * np.vdot(psi, psi).real * np.vdot(phi, phi).real
    rep.add(Row.check("mass", _rel(np.sum(Sm), mass), 1e-9))
    _save(args, Sm)


def cmd_identity_suite(args, rep):
    N = args.n
    rep.N = N
    for row in identity_suite(N, args.seed):
        rep.add(row)
    rep.add(Row.info("calibrated_spreading_scale_N3", calibrate_spreading_scale(3, args.seed)))
    rep.add(Row.info("calibrated_duality_factor_N3", calibrate_duality_factor(3, args.seed)))


def cmd_gen(args, rep):
    N = args.n
    if args.kind == "signal":
        arr = parse_signal(args.spec, N)
    elif args.kind == "operator":
        arr = parse_operator(args.spec, N)
    elif args.kind == "weight":
        arr = parse_weight(args.spec, N).values
    else:
        arr = parse_mask(args.spec, N).values
    rep.N = arr.shape[0]
    rep.add(Row.info("shape", list(arr.shape)))
    rep.add(Row.info("l2_norm", float(np.linalg.norm(arr))))
    write_array(args.out, arr)


HANDLERS = {
    "stft": cmd_stft,
    "opstft": cmd_opstft,
    "modnorm": cmd_modnorm,
    "equivalence": cmd_equivalence,
    "cohen": cmd_cohen,
    "weyl": cmd_weyl,
    "spreading": cmd_spreading,
    "locop": cmd_locop,
    "smooth-spec": cmd_smooth_spec,
    "identity-suite": cmd_identity_suite,
    "gen": cmd_gen,
}


# ---------------------------------------------------------------- parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = _Parser(prog="owtf", description=__doc__.splitlines()[0], formatter_class=fmt)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text, formatter_class=fmt)
        p.add_argument("--n", type=int, default=None, help="grid side N (inferred from file inputs when omitted)")
        p.add_argument("--format", choices=("json", "csv"), default="json", help="report format")
        p.add_argument("--report", default="-", help="report path ('-' for stdout)")
        p.add_argument("--config", default=None, help="JSON document supplying flag defaults")
        return p

    def signal(p, default="random:0"):
        p.add_argument("--signal", default=default, help="gauss | delta[:k] | random:<seed> | file:<path>")

    def outputs(p, heatmap=True):
        p.add_argument("--out", default=None, help="write the result array (OWTF1 binary)")
        if heatmap:
            p.add_argument("--csv", default=None, help="write a plot-ready k,l,re,im,abs table")

    op_help = ("rankone:gauss | multiwindow:<k> | random:<seed>[:<rank>] | weyl:<file> | locop:<mask> | "
               "schwartz | sqrt:<op> | zero | file:<path>")

    p = add("stft", "discrete short-time Fourier transform V_phi psi")
    signal(p)
    p.add_argument("--window", default="gauss", help="window signal spec")
    outputs(p)

    p = add("opstft", "operator STFT z -> S pi(z)^* psi (N x N x N field)")
    signal(p)
    p.add_argument("--op", required=True, help=op_help)
    outputs(p, heatmap=False)

    p = add("modnorm", "weighted modulation-space norm with the Gaussian window")
    signal(p)
    p.add_argument("--p", default="2", help="inner exponent (1..inf)")
    p.add_argument("--q", default="2", help="outer exponent (1..inf)")
    p.add_argument("--mod-weight", default=None, help="one | poly:<s> | file:<path> (default one)")

    p = add("equivalence", "sample the norm-equivalence ratio against its two-sided constants")
    p.add_argument("--op", required=True, help=op_help)
    p.add_argument("--p", default="2", help="inner exponent (1..inf)")
    p.add_argument("--q", default="2", help="outer exponent (1..inf)")
    p.add_argument("--weight", default="one", help="submultiplicative weight v")
    p.add_argument("--mod-weight", default=None, help="v-moderate weight m (default: v)")
    p.add_argument("--samples", type=int, default=100, help="number of random signals")
    p.add_argument("--seed", type=int, default=0, help="sampling seed")
    p.add_argument("--tol", type=float, default=1e-12, help="relative slack on the constants")
    p.add_argument("--table", default=None, help="write the per-sample ratio table as CSV")

    p = add("cohen", "Cohen's class distribution Q_T psi (odd or even N)")
    signal(p)
    p.add_argument("--op", required=True, help=op_help)
    outputs(p)

    p = add("weyl", "Weyl symbol of an operator, or the operator of a symbol (odd N)")
    p.add_argument("--op", default=None, help=op_help)
    p.add_argument("--symbol", default=None, help="OWTF1 file holding a symbol to quantize")
    outputs(p)

    p = add("spreading", "spreading function F_W(T) (odd N)")
    p.add_argument("--op", required=True, help=op_help)
    outputs(p)

    p = add("locop", "localization operator with mask f and windows phi1, phi2")
    p.add_argument("--mask", default="disk:2", help="ones | delta | disk:<r> | gauss:<sigma> | file:<path>")
    p.add_argument("--window1", default="gauss", help="analysis window spec")
    p.add_argument("--window2", default="gauss", help="synthesis window spec")
    outputs(p, heatmap=False)

    p = add("smooth-spec", "smoothed spectrogram reflect(f) * |V_phi psi|^2")
    signal(p)
    p.add_argument("--mask", default="gauss:1", help="mask spec")
    p.add_argument("--window", default="gauss", help="window signal spec")
    outputs(p)

    p = add("identity-suite", "run every exact identity on seeded random data")
    p.set_defaults(n=5)
    p.add_argument("--seed", type=int, default=0, help="data seed")

    p = add("gen", "generate a signal, operator, weight or mask and write it as OWTF1")
    p.add_argument("kind", choices=("signal", "operator", "weight", "mask"))
    p.add_argument("--spec", required=True, help="spec string for the chosen kind")
    p.add_argument("--out", required=True, help="output path")
    return parser


def parse_args(argv) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        with open(args.config) as fh:
            cfg = json.load(fh)
        if not isinstance(cfg, dict):
            raise UsageError("--config must hold a JSON object")
        known = set(vars(args))
        bad = sorted(k for k in (key.replace("-", "_") for key in cfg) if k not in known or k in ("command", "config"))
        if bad:
            raise UsageError(f"unknown config keys: {', '.join(bad)}")
        subparser = parser._subparsers._group_actions[0].choices[args.command]
        subparser.set_defaults(**{k.replace("-", "_"): v for k, v in cfg.items()})
        args = parser.parse_args(argv)
    return args


def _config_of(args) -> dict:
    skip = {"report", "config", "out", "csv", "table", "format"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _threads():
    raw = os.environ.get("OWTF_THREADS")
    if not raw:
        return None
    try:
        n = int(raw)
    except ValueError as exc:
        raise UsageError(f"OWTF_THREADS must be a positive integer, got {raw!r}") from exc
    if n < 1:
        raise UsageError(f"OWTF_THREADS must be a positive integer, got {raw!r}")
    return n


def _fail(code: str, message: str) -> int:
    status = EXIT_CODES.get(code, EXIT_CODES["error"])
    sys.stderr.write(json.dumps({"error": code, "exit": status, "message": message}, sort_keys=True) + "\n")
    return status


def run(argv=None, stdout=None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    try:
        args = parse_args(argv)
        threads = _threads()
        if args.n is not None:
            PhaseGrid(args.n)
        rep = ReportRecord(command=args.command, config=_config_of(args), seed=getattr(args, "seed", None),
                           threads=threads)
        limiter = contextlib.nullcontext()
        if threads is not None:
            from threadpoolctl import threadpool_limits

            limiter = threadpool_limits(limits=threads)
        with limiter:
            HANDLERS[args.command](args, rep)
        text = rep.render(args.format)
        if args.report == "-":
            stdout.write(text)
        else:
            with open(args.report, "w", newline="") as fh:
                fh.write(text)
        return EXIT_CODES["ok"] if rep.passed else EXIT_CODES["check-failed"]
    except OWTFError as exc:
        return _fail(exc.code, str(exc))
    except OSError as exc:
        return _fail("io", str(exc))
    except ValueError as exc:
        return _fail("error", str(exc))


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
