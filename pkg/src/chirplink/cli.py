"""Command-line front end: ``ber``, ``throughput``, ``loopback`` and ``chirp``.

Options mirror :class:`~chirplink.harness.SimConfig` fields; a flat
``key = value`` config file may set any field, with command-line flags taking
precedence.  Exit codes: 0 success, 2 configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

import numpy as np

from .chirp import SpreadingFactor, VALID_SF, raw_upchirp, despread, dft
from .modem import (
    IqPair,
    ModConfig,
    iqcss_demodulate,
    iqcss_modulate,
    lora_demod_coherent,
    lora_demod_noncoherent,
    lora_modulate,
)
from .channel import apply_awgn, snr_to_sigma2
from .harness import SCHEMES, CHANNELS, ConfigError, SimConfig, run_ber, run_throughput, write_csv
from .plotting import plot_records_svg

_INT_FIELDS = {"max_frames", "min_bit_errors", "seed", "payload_symbols", "workers"}
_FLOAT_FIELDS = {"axis_start", "axis_step", "axis_stop", "bandwidth_hz", "carrier_hz", "speed_kmh"}
_STR_FIELDS = {"scheme", "channel", "axis"}


def _parse_bool(text: str) -> bool:
    value = text.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _parse_sf_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise ConfigError(f"bad spreading-factor list {text!r}") from exc


def parse_axis_spec(text: str) -> tuple[float, float, float]:
    """Parse ``start:step:stop`` (or a single value) in dB."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            v = float(parts[0])
            return v, 1.0, v
        if len(parts) == 3:
            start, step, stop = (float(p) for p in parts)
            return start, step, stop
    except ValueError:
        pass
    raise ConfigError(f"bad axis sweep {text!r}; expected start:step:stop")


def _coerce_field(name: str, text: str):
    text = text.strip()
    if name in _INT_FIELDS:
        try:
            return int(text)
        except ValueError as exc:
            raise ConfigError(f"field {name} expects an integer, got {text!r}") from exc
    if name in _FLOAT_FIELDS:
        try:
            return float(text)
        except ValueError as exc:
            raise ConfigError(f"field {name} expects a number, got {text!r}") from exc
    if name in _STR_FIELDS:
        return text
    if name == "sf_list":
        return _parse_sf_list(text)
    if name == "cp_len":
        return None if text.lower() == "none" else int(text)
    if name == "es":
        return None if text.lower() == "none" else float(text)
    if name == "tap_profile":
        return None if text.lower() == "none" else text
    if name == "truncate_est":
        return _parse_bool(text)
    raise ConfigError(f"unknown config key {name!r}")


def read_config_file(path: str) -> dict:
    """Parse a flat ``key = value`` file with ``#`` comments."""
    overrides = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = stripped.partition("=")
            overrides[key.strip()] = _coerce_field(key.strip(), value)
    return overrides


def _add_sim_options(sub: argparse.ArgumentParser, axis_flags: tuple[str, ...]) -> None:
    sub.add_argument("--config", help="config file; flags override its values")
    sub.add_argument("--scheme", choices=SCHEMES)
    sub.add_argument("--sf", help="spreading factors, e.g. 7 or 7,8")
    sub.add_argument("--channel", choices=CHANNELS)
    for flag in axis_flags:
        sub.add_argument(f"--{flag}", help="sweep in dB: start:step:stop or one value")
    sub.add_argument("--max-frames", type=int)
    sub.add_argument("--min-bit-errors", type=int)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--bandwidth-hz", type=float)
    sub.add_argument("--carrier-hz", type=float)
    sub.add_argument("--speed-kmh", type=float)
    sub.add_argument("--cp-len", type=int)
    sub.add_argument("--payload-symbols", type=int)
    sub.add_argument("--workers", type=int)
    sub.add_argument("--tap-profile")
    sub.add_argument("--es", type=float)
    sub.add_argument(
        "--no-truncate-est",
        action="store_true",
        help="keep estimated taps beyond the cyclic prefix",
    )
    sub.add_argument("--out", default="results.csv", help="output CSV path")
    sub.add_argument("--plot", help="optional SVG plot path")


def _config_from_args(args: argparse.Namespace, axis_flags: tuple[str, ...]) -> SimConfig:
    overrides: dict = {}
    if args.config:
        overrides.update(read_config_file(args.config))

    flag_map = {
        "scheme": args.scheme,
        "channel": args.channel,
        "max_frames": args.max_frames,
        "min_bit_errors": args.min_bit_errors,
        "seed": args.seed,
        "bandwidth_hz": args.bandwidth_hz,
        "carrier_hz": args.carrier_hz,
        "speed_kmh": args.speed_kmh,
        "cp_len": args.cp_len,
        "payload_symbols": args.payload_symbols,
        "workers": args.workers,
        "tap_profile": args.tap_profile,
        "es": args.es,
    }
    for key, value in flag_map.items():
        if value is not None:
            overrides[key] = value
    if args.sf is not None:
        overrides["sf_list"] = _parse_sf_list(args.sf)
    if args.no_truncate_est:
        overrides["truncate_est"] = False

    given = [flag for flag in axis_flags if getattr(args, flag) is not None]
    if len(given) > 1:
        raise ConfigError(f"give only one of {', '.join('--' + f for f in axis_flags)}")
    if given:
        start, step, stop = parse_axis_spec(getattr(args, given[0]))
        overrides["axis"] = given[0]
        overrides["axis_start"] = start
        overrides["axis_step"] = step
        overrides["axis_stop"] = stop

    valid = {f.name for f in dataclasses.fields(SimConfig)}
    unknown = set(overrides) - valid
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return dataclasses.replace(SimConfig(), **overrides)


def _cmd_sweep(args: argparse.Namespace, throughput: bool) -> int:
    axis_flags = ("ebn0", "snr")
    cfg = _config_from_args(args, axis_flags)
    if throughput and cfg.axis != "snr":
        cfg = dataclasses.replace(cfg, axis="snr")
    records = run_throughput(cfg) if throughput else run_ber(cfg)
    write_csv(records, args.out)
    print(f"wrote {len(records)} rows to {args.out}")
    if args.plot:
        kind = "throughput" if throughput else "ber"
        plot_records_svg(records, args.plot, kind=kind, bandwidth_hz=cfg.bandwidth_hz)
        print(f"wrote plot to {args.plot}")
    return 0


def _loopback_ok(scheme: str, sf_int: int, trials: int) -> bool:
    sf = SpreadingFactor(sf_int)
    n = sf.n
    mod = ModConfig(sf, float(n))
    rng = np.random.default_rng(sf_int)
    if sf_int <= 8:
        symbols = np.arange(n)
    else:
        symbols = rng.integers(0, n, size=trials)
    if scheme == "iqcss":
        partners = rng.integers(0, n, size=symbols.size)
        for k_i, k_q in zip(symbols, partners):
            pair = IqPair(int(k_i), int(k_q))
            if iqcss_demodulate(iqcss_modulate(mod, pair), sf) != pair:
                return False
        return True
    demod = lora_demod_noncoherent if scheme == "lora-noncoherent" else lora_demod_coherent
    return all(demod(lora_modulate(mod, int(k)), sf) == int(k) for k in symbols)


def _cmd_loopback(args: argparse.Namespace) -> int:
    schemes = list(SCHEMES) if args.all or not args.scheme else [args.scheme]
    sfs = list(VALID_SF) if args.all or not args.sf else list(_parse_sf_list(args.sf))
    failures = 0
    for scheme in schemes:
        for sf in sfs:
            if sf not in VALID_SF:
                raise ConfigError(f"spreading factor {sf} outside 6..12")
            ok = _loopback_ok(scheme, sf, args.trials)
            print(f"{'PASS' if ok else 'FAIL'} scheme={scheme} sf={sf}")
            failures += 0 if ok else 1
    return 0 if failures == 0 else 1


def _cmd_chirp(args: argparse.Namespace) -> int:
    sf = SpreadingFactor(args.sf)
    if args.symbol is None:
        signal = raw_upchirp(sf)
    else:
        signal = lora_modulate(ModConfig(sf, float(sf.n)), args.symbol)
    if args.snr_db is not None:
        noise = snr_to_sigma2(args.snr_db, sf.sf, float(sf.n))
        signal = apply_awgn(signal, noise, np.random.default_rng(args.seed))
    if args.what == "spectrum":
        values = dft(despread(signal, sf))
        header = "bin,re,im"
    else:
        values = signal
        header = "sample,re,im"
    lines = [header]
    lines += [f"{i},{v.real:.9g},{v.imag:.9g}" for i, v in enumerate(values)]
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {values.size} rows to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chirplink",
        description="Chirp spread spectrum link simulator (chirp-FSK and I/Q chirp signaling)",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    ber = subs.add_parser("ber", help="bit-error-ratio sweep")
    _add_sim_options(ber, axis_flags=("ebn0", "snr"))
    ber.set_defaults(func=lambda a: _cmd_sweep(a, throughput=False))

    thr = subs.add_parser("throughput", help="(1-SER)*rate sweep over SNR")
    _add_sim_options(thr, axis_flags=("ebn0", "snr"))
    thr.set_defaults(func=lambda a: _cmd_sweep(a, throughput=True))

    loop = subs.add_parser("loopback", help="noiseless modulate/demodulate self-test")
    loop.add_argument("--all", action="store_true", help="every scheme and spreading factor")
    loop.add_argument("--scheme", choices=SCHEMES)
    loop.add_argument("--sf", help="spreading factors, e.g. 7 or 7,8")
    loop.add_argument("--trials", type=int, default=1000, help="random symbols when sf > 8")
    loop.set_defaults(func=_cmd_loopback)

    chirp = subs.add_parser("chirp", help="dump a chirp waveform or despread spectrum")
    chirp.add_argument("--sf", type=int, default=7)
    chirp.add_argument("-k", "--symbol", type=int, help="data symbol (default: raw chirp)")
    chirp.add_argument("--snr-db", type=float, help="add noise at this per-sample SNR")
    chirp.add_argument("--seed", type=int, default=0)
    chirp.add_argument("--what", choices=("spectrum", "waveform"), default="spectrum")
    chirp.add_argument("--out", default="chirp.csv")
    chirp.set_defaults(func=_cmd_chirp)
    return parser


def _merge_negative_values(argv: list[str]) -> list[str]:
    """Join ``--flag -5:1:0`` into ``--flag=-5:1:0`` so argparse accepts it."""
    merged: list[str] = []
    skip = False
    for i, token in enumerate(argv):
        if skip:
            skip = False
            continue
        nxt = argv[i + 1] if i + 1 < len(argv) else None
        if (
            token.startswith("--")
            and "=" not in token
            and nxt is not None
            and len(nxt) > 1
            and nxt[0] == "-"
            and nxt[1].isdigit()
        ):
            merged.append(f"{token}={nxt}")
            skip = True
        else:
            merged.append(token)
    return merged


def cli_main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    if argv is None:
        argv = sys.argv[1:]
    argv = _merge_negative_values(list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse handles --help (0) and bad flags (2)
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))
