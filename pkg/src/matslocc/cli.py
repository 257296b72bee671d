"""``matslocc`` command line: analyze spaces, decide conversions, bound rates.

Every subcommand prints one JSON document with sorted keys and floats rounded
to 12 significant digits.  Exit codes: 0 computed, 1 a verification suite or
certificate re-check failed, 2 parse or configuration error, 3 size guard hit.

Global options may also be set through ``MATSLOCC_SEED``, ``MATSLOCC_TRIALS``,
``MATSLOCC_PRIME``, ``MATSLOCC_SIZE_GUARD``, ``MATSLOCC_CERTIFY``,
``MATSLOCC_JOBS`` and ``MATSLOCC_PRETTY``; explicit flags win.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

from matslocc.arith import PrimeField, default_field
from matslocc.compression import CompressionParams, asymptotic_profile, mrk_tensor_power
from matslocc.errors import ConfigError, MatSloccError, SizeGuardExceeded
from matslocc.formats import load_space, load_state, load_witnesses
from matslocc.matspace import DEFAULT_SIZE_GUARD, image, kernel
from matslocc.rank import (
    DEFAULT_TRIALS,
    certified_bounds,
    certify,
    estimate_max_rank,
    max_rank_greedy,
    rank_exact,
)
from matslocc.shrunk import canonical_witnesses, check_certificate, has_shrunk_subspace, ncrk_bounds, verify_shrunk
from matslocc.slocc import can_convert, rate_bounds
from matslocc.verify import SUITES, CheckConfig, run_suite

EXIT_OK, EXIT_FAILED, EXIT_INPUT, EXIT_SIZE = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    """Resolved global options (defaults: seed 0, 16 trials, default prime, guard 2**22, 1 job)."""

    seed: int = 0
    trials: int = DEFAULT_TRIALS
    prime: int | None = None
    size_guard: int = DEFAULT_SIZE_GUARD
    certify: bool = False
    jobs: int = 1
    pretty: bool = False

    def __post_init__(self):
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.size_guard < 1:
            raise ConfigError("size guard must be >= 1")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")

    @property
    def field(self) -> PrimeField:
        return default_field() if self.prime is None else PrimeField.for_prime(self.prime)

    def check_config(self) -> CheckConfig:
        return CheckConfig(self.seed, self.trials, self.field, self.size_guard, self.jobs)


_OPTIONS = {
    # name: (type, env var)
    "seed": (int, "MATSLOCC_SEED"),
    "trials": (int, "MATSLOCC_TRIALS"),
    "prime": (int, "MATSLOCC_PRIME"),
    "size_guard": (int, "MATSLOCC_SIZE_GUARD"),
    "certify": (bool, "MATSLOCC_CERTIFY"),
    "jobs": (int, "MATSLOCC_JOBS"),
    "pretty": (bool, "MATSLOCC_PRETTY"),
}


def _env_value(name: str, kind, env) -> object:
    raw = env.get(_OPTIONS[name][1])
    if raw is None or raw == "":
        return None
    if kind is bool:
        if raw.lower() in ("1", "true", "yes", "on"):
            return True
        if raw.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{_OPTIONS[name][1]}={raw!r} is not a boolean")
    try:
        return int(raw, 0)
    except ValueError:
        raise ConfigError(f"{_OPTIONS[name][1]}={raw!r} is not an integer") from None


def resolve_config(args: argparse.Namespace, env=None) -> RunConfig:
    env = os.environ if env is None else env
    values = {}
    for name, (kind, _) in _OPTIONS.items():
        v = getattr(args, name, None)
        if v is None:
            v = _env_value(name, kind, env)
        if v is not None:
            values[name] = v
    return RunConfig(**values)


# -- output --------------------------------------------------------------------


def _normalize(obj):
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return str(obj)
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {str(k): _normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_normalize(v) for v in obj]
    return obj


def render(obj, pretty: bool = False) -> str:
    obj = _normalize(obj)
    if pretty:
        return json.dumps(obj, sort_keys=True, indent=2) + "\n"
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


# -- subcommands -----------------------------------------------------------------


def cmd_analyze(args, cfg: RunConfig) -> tuple[dict, int]:
    S = load_space(args.space)
    F = cfg.field
    supplied = load_witnesses(args.witnesses, S.cols) if args.witnesses else []
    rep = estimate_max_rank(S, cfg.trials, cfg.seed, F, cfg.jobs)
    out = {
        "rows": S.rows,
        "cols": S.cols,
        "dim": S.dim,
        "dim_image": image(S).dim,
        "dim_kernel": kernel(S).dim,
        "mrk_randomized": rep.to_json(),
        "mrk_greedy": rank_exact(max_rank_greedy(S)) if S.dim else 0,
        "shrunk": None,
        "ncrk": None,
    }
    code = EXIT_OK
    square = S.rows == S.cols
    witnesses = []
    if square:
        witnesses = [w for w in (verify_shrunk(S, U) for U in supplied) if w is not None]
        witnesses += canonical_witnesses(S)
    if cfg.certify:
        rep = certify(S, rep)
        out["mrk_randomized"] = rep.to_json()
        caps = {f"shrunk-{w.source}": S.cols - w.shrinkage for w in witnesses}
        out["mrk_bounds"] = certified_bounds(S, rep, caps).to_json()
    if square:
        dec = has_shrunk_subspace(S, cfg.trials, cfg.seed, F, witnesses, cfg.size_guard, cfg.jobs)
        out["shrunk"] = dec.to_json()
        out["ncrk"] = ncrk_bounds(S, witnesses, cfg.trials, cfg.seed, F, cfg.size_guard, cfg.jobs).to_json()
        if cfg.certify and dec.certificate is not None:
            ok = check_certificate(S, dec.certificate, cfg.size_guard)
            out["certificate_rechecked"] = ok
            code = EXIT_OK if ok else EXIT_FAILED
    return out, code


def cmd_convert(args, cfg: RunConfig) -> tuple[dict, int]:
    state = load_state(args.state)
    v = can_convert(
        state, args.copies, args.target, cfg.trials, cfg.seed, cfg.field, cfg.size_guard, cfg.certify, cfg.jobs
    )
    return v.to_json(), EXIT_OK


def cmd_rate(args, cfg: RunConfig) -> tuple[dict, int]:
    state = load_state(args.state)
    supplied = load_witnesses(args.witnesses, state.dims[1]) if args.witnesses else []
    rb = rate_bounds(
        state, args.target, args.max_copies, cfg.trials, cfg.seed, cfg.field, supplied, cfg.size_guard, cfg.jobs
    )
    return rb.to_json(), EXIT_OK


def cmd_compression(args, cfg: RunConfig) -> tuple[dict, int]:
    CompressionParams.square(args.p, args.q, args.d).require_maximal()
    if args.asymptotic:
        return {"asymptotic": asymptotic_profile(args.p, args.q, args.d).to_json()}, EXIT_OK
    value = mrk_tensor_power(args.p, args.q, args.d, args.copies)
    return {"p": args.p, "q": args.q, "d": args.d, "copies": args.copies, "mrk": value}, EXIT_OK


def cmd_verify(args, cfg: RunConfig) -> tuple[dict, int]:
    report = run_suite(args.suite, cfg.check_config())
    return report, EXIT_OK if report["passed"] else EXIT_FAILED


# -- parser ----------------------------------------------------------------------


def _add_globals(p: argparse.ArgumentParser, sub: bool) -> None:
    # on subparsers the defaults are suppressed so they never clobber values given before the subcommand
    d = argparse.SUPPRESS if sub else None
    g = p.add_argument_group("global options")
    g.add_argument("--seed", type=int, default=d, help="master RNG seed (default 0)")
    g.add_argument("--trials", type=int, default=d, help="randomized trials per rank estimate (default 16)")
    g.add_argument("--prime", type=int, default=d, help="prime p = 1 mod 4 below 2**31 (default 2147483629)")
    g.add_argument("--size-guard", dest="size_guard", type=int, default=d,
                   help="maximal matrix entries for tensor constructions (default 4194304)")
    g.add_argument("--certify", action="store_true", default=d, help="re-verify witnesses exactly")
    g.add_argument("--jobs", type=int, default=d, help="threads for randomized trials (default 1)")
    g.add_argument("--pretty", action="store_true", default=d, help="indented output")


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="matslocc", description=__doc__.splitlines()[0], allow_abbrev=False)
    _add_globals(parser, sub=False)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("analyze", allow_abbrev=False, help="rank, shrunk-subspace and ncrk report for a matrix space file")
    p.add_argument("space")
    p.add_argument("--witnesses", help="JSON file of candidate shrunk subspaces")
    p.set_defaults(func=cmd_analyze)

    p = subs.add_parser("convert", allow_abbrev=False, help="n copies of a state to a target Schmidt rank")
    p.add_argument("state")
    p.add_argument("--copies", type=_positive, default=1)
    p.add_argument("--target", type=_positive, required=True)
    p.set_defaults(func=cmd_convert)

    p = subs.add_parser("rate", allow_abbrev=False, help="bounds on the transformation rate to a target Schmidt rank")
    p.add_argument("state")
    p.add_argument("--target", type=_positive, required=True)
    p.add_argument("--max-copies", dest="max_copies", type=_positive)
    p.add_argument("--witnesses", help="JSON file of candidate shrunk subspaces")
    p.set_defaults(func=cmd_rate)

    p = subs.add_parser("compression", allow_abbrev=False, help="maximal rank of compression-space tensor powers")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--copies", type=_positive)
    mode.add_argument("--asymptotic", action="store_true")
    p.set_defaults(func=cmd_compression)

    p = subs.add_parser("verify", allow_abbrev=False, help="run a reproducible check suite")
    p.add_argument("--suite", required=True, help=f"one of: {', '.join(SUITES)}")
    p.set_defaults(func=cmd_verify)

    for sp in subs.choices.values():
        _add_globals(sp, sub=True)
    return parser


def _error(exc: Exception, pretty: bool) -> str:
    body = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, SizeGuardExceeded) and exc.largest_tested is not None:
        body["largest_tested"] = exc.largest_tested
    return render(body, pretty)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    pretty = bool(getattr(args, "pretty", False))
    try:
        cfg = resolve_config(args)
        pretty = cfg.pretty
        out, code = args.func(args, cfg)
    except SizeGuardExceeded as exc:
        sys.stderr.write(_error(exc, pretty))
        return EXIT_SIZE
    except MatSloccError as exc:
        sys.stderr.write(_error(exc, pretty))
        return EXIT_INPUT
    sys.stdout.write(render(out, pretty))
    return code


if __name__ == "__main__":
    sys.exit(main())
