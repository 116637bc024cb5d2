"""``hecke-density``: constants, term reports, sweeps, ratios grids and the verification suite.

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 capacity refusal.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction

import click

from . import __version__, constants, density, ratios, verify
from .errors import CapacityError, DomainError, HeckeDensityError
from .fourier_pairs import make_test_function

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_CAPACITY = 3

SWEEP_COLUMNS = (
    "K", "M", "nu", "family",
    "Wf_exact", "Wf_asym",
    "Szeta_sum", "Szeta_asym",
    "SL_sum", "SL_asym",
    "SAprime_sum", "SAprime_asym",
    "SGamma_asym",
    "Sinert", "Sram_exact", "Sram_limit", "Ssplit",
    "D1_uncond", "D1_conj", "theorem_pred",
    "defect", "defect_times_K", "residual_times_M2", "split_scaled",
)  # fmt: skip
RATIOS_COLUMNS = ("alpha", "gamma", "K", "P", "G", "R", "tail")
CAPACITY_MARKER = "#CAPACITY_REFUSED"


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    K_grid: tuple[int, ...] = ()
    family: str = "fejer"
    nu: float = 0.5
    prime_cutoff: int = constants.DEFAULT_PRIME_CUTOFF
    psi_cutoff: float = constants.DEFAULT_PSI_CUTOFF
    norm_budget: int = density.DEFAULT_NORM_BUDGET
    threads: int = 1
    out: str | None = None
    fmt: str = "csv"
    timestamp: bool = True
    extra: dict = field(default_factory=dict)

    def test_function(self):
        return make_test_function(self.family, self.nu)


def geometric_grid(K_min: int, K_max: int, steps: int) -> tuple[int, ...]:
    """``steps`` integers from K_min to K_max, equally spaced in log K (duplicates dropped)."""
    if steps <= 0:
        return ()
    if K_min < 2 or K_max < K_min:
        raise DomainError("grid needs 2 <= K-min <= K-max")
    if steps == 1:
        return (K_min,)
    ratio = K_max / K_min
    ks = [round(K_min * ratio ** (i / (steps - 1))) for i in range(steps)]
    return tuple(dict.fromkeys(ks))


def fmt_number(x) -> str:
    """Shortest round-trip decimal for floats; complex values with zero imaginary part collapse."""
    if isinstance(x, complex):
        return repr(x.real) if x.imag == 0 else repr(x)
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _json_default(x):
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, Fraction):
        return float(x)
    raise TypeError(f"cannot serialise {type(x).__name__}")


def _timestamp_line() -> str:
    return f"# generated {datetime.now(timezone.utc).isoformat(timespec='seconds')}\n"


class _Sink:
    """CSV/JSON writer to a file or stdout; rows are flushed as they arrive."""

    def __init__(self, cfg: RunConfig, columns) -> None:
        self.cfg = cfg
        self.columns = tuple(columns)
        self.rows: list[dict] = []
        self._fh = None
        self._writer = None

    def __enter__(self):
        try:
            self._fh = open(self.cfg.out, "w", newline="") if self.cfg.out else sys.stdout
        except OSError as exc:
            raise click.FileError(self.cfg.out, hint=str(exc)) from exc
        if self.cfg.fmt == "csv":
            if self.cfg.timestamp:
                self._fh.write(_timestamp_line())
            self._writer = csv.writer(self._fh, lineterminator="\n")
            self._writer.writerow(self.columns)
            self._fh.flush()
        return self

    def row(self, values: dict) -> None:
        if self._writer is not None:
            self._writer.writerow([fmt_number(values[c]) for c in self.columns])
            self._fh.flush()
        else:
            self.rows.append(values)

    def trailer(self, marker: str, message: str) -> None:
        if self._writer is not None:
            self._writer.writerow([marker, message])
            self._fh.flush()
        else:
            self.rows.append({marker: message})

    def __exit__(self, *exc) -> None:
        if self.cfg.fmt == "json":
            json.dump(self.rows, self._fh, indent=2, default=_json_default)
            self._fh.write("\n")
        if self._fh is not sys.stdout:
            self._fh.close()
        else:
            self._fh.flush()


def _write_json(cfg: RunConfig, obj) -> None:
    text = json.dumps(obj, indent=2, default=_json_default) + "\n"
    if cfg.out:
        try:
            with open(cfg.out, "w") as fh:
                fh.write(text)
        except OSError as exc:
            raise click.FileError(cfg.out, hint=str(exc)) from exc
    else:
        click.echo(text, nl=False)


# ---------------------------------------------------------------------------
# shared options


def _common(fn):
    opts = [
        click.option("--family", type=click.Choice(["fejer", "bump"]), default="fejer", show_default=True),
        click.option("--nu", type=float, default=0.5, show_default=True, help="Support half-width of fhat."),
        click.option("--prime-cutoff", type=int, default=constants.DEFAULT_PRIME_CUTOFF, show_default=True),
        click.option("--psi-cutoff", type=float, default=constants.DEFAULT_PSI_CUTOFF, show_default=True),
        click.option("--norm-budget", type=int, default=density.DEFAULT_NORM_BUDGET, show_default=True),
        click.option("--threads", type=click.IntRange(min=1), default=1, show_default=True),
        click.option("--out", type=click.Path(dir_okay=False), default=None, help="Output file (default stdout)."),
        click.option("--no-timestamp", is_flag=True, help="Omit the timestamp comment line from CSV output."),
    ]
    for opt in reversed(opts):
        fn = opt(fn)
    return fn


def _format_option(default: str):
    return click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default=default, show_default=True)


def _grid_options(fn):
    for opt in reversed(
        [
            click.option("--K", "K", type=int, multiple=True, help="Family size; repeatable."),
            click.option("--K-min", "K_min", type=int, default=2**10, show_default=True),
            click.option("--K-max", "K_max", type=int, default=2**20, show_default=True),
            click.option("--K-steps", "K_steps", type=int, default=6, show_default=True),
        ]
    ):
        fn = opt(fn)
    return fn


def _config(subcommand: str, K_grid=(), fmt="csv", extra=None, **kw) -> RunConfig:
    return RunConfig(
        subcommand=subcommand,
        K_grid=tuple(K_grid),
        family=kw["family"],
        nu=kw["nu"],
        prime_cutoff=kw["prime_cutoff"],
        psi_cutoff=kw["psi_cutoff"],
        norm_budget=kw["norm_budget"],
        threads=kw["threads"],
        out=kw["out"],
        fmt=fmt,
        timestamp=not kw["no_timestamp"],
        extra=extra or {},
    )


def _grid(K, K_min, K_max, K_steps) -> tuple[int, ...]:
    return tuple(K) if K else geometric_grid(K_min, K_max, K_steps)


def _refuse(exc: CapacityError):
    click.echo(f"capacity refusal: {exc}", err=True)
    sys.exit(EXIT_CAPACITY)


# ---------------------------------------------------------------------------
# subcommands


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__)
def main() -> None:
    """Numerical laboratory for the one-level density of Hecke L-functions over Z[i]."""


@main.command("constants")
@_common
@_format_option("json")
def cmd_constants(fmt, **kw):
    """Closed-form constants with their consistency checks."""
    cfg = _config("constants", fmt=fmt, **kw)
    try:
        rep = constants.constants_report(cfg.prime_cutoff, cfg.psi_cutoff)
    except DomainError as exc:
        raise click.UsageError(str(exc)) from exc
    checks = [r for r in verify.run_checks(["constants"])]
    table = io.StringIO()
    width = max(len(k) for k in rep.to_dict())
    for k, v in rep.to_dict().items():
        table.write(f"{k:<{width}}  {v!r}\n")
    for r in checks:
        table.write(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}\n")
    # table on stdout when the report goes to a file, otherwise on stderr
    click.echo(table.getvalue(), nl=False, err=cfg.out is None)
    if fmt == "json":
        _write_json(cfg, rep.to_dict())
    else:
        flat = {k: v for k, v in rep.to_dict().items() if k not in ("cj", "cutoffs")}
        flat.update({f"c{j}": v for j, v in enumerate(rep.cj, start=2)})
        flat.update({"P": rep.cutoffs[0], "T": rep.cutoffs[1]})
        with _Sink(cfg, ("name", "value")) as sink:
            for k, v in flat.items():
                sink.row({"name": k, "value": v})
    if not all(r.passed for r in checks):
        sys.exit(EXIT_VERIFY_FAILED)


@main.command("terms")
@click.option("--K", "K", type=int, default=1000, show_default=True)
@_common
@_format_option("json")
def cmd_terms(K, fmt, **kw):
    """Full term report (both sides of the identity) at a single K."""
    cfg = _config("terms", (K,), fmt=fmt, **kw)
    try:
        t = cfg.test_function()
        rep = density.term_report(
            K, t, P=cfg.prime_cutoff, T=cfg.psi_cutoff, norm_budget=cfg.norm_budget, threads=cfg.threads
        )
    except CapacityError as exc:
        _refuse(exc)
    except (DomainError, HeckeDensityError) as exc:
        raise click.UsageError(str(exc)) from exc
    if fmt == "json":
        _write_json(cfg, rep.to_dict())
    else:
        with _Sink(cfg, SWEEP_COLUMNS) as sink:
            sink.row(sweep_row(rep, t, cfg))


def sweep_row(rep: density.TermReport, t, cfg: RunConfig) -> dict:
    K, M = rep.K, rep.M
    pred = density.theorem_prediction(K, t, cfg.prime_cutoff, cfg.psi_cutoff)
    return {
        "K": K,
        "M": M,
        "nu": t.nu,
        "family": t.family,
        "Wf_exact": rep.W_f_exact,
        "Wf_asym": rep.W_f_asymptotic,
        "Szeta_sum": rep.S_zeta_sum,
        "Szeta_asym": rep.S_zeta_asymptotic,
        "SL_sum": rep.S_L_sum,
        "SL_asym": rep.S_L_asymptotic,
        "SAprime_sum": rep.S_Aprime_sum,
        "SAprime_asym": rep.S_Aprime_asymptotic,
        "SGamma_asym": rep.S_Gamma_asymptotic,
        "Sinert": rep.S_inert,
        "Sram_exact": rep.S_ram_exact,
        "Sram_limit": rep.S_ram_limit,
        "Ssplit": rep.S_split,
        "D1_uncond": rep.D1_unconditional,
        "D1_conj": rep.D1_conjectured,
        "theorem_pred": pred,
        "defect": rep.identity_defect,
        "defect_times_K": rep.identity_defect * K,
        "residual_times_M2": (rep.D1_unconditional - pred) * M * M,
        "split_scaled": rep.S_split * K ** (1 - t.nu) / M,
    }


@main.command("sweep")
@_grid_options
@_common
@_format_option("csv")
def cmd_sweep(K, K_min, K_max, K_steps, fmt, **kw):
    """One row per K of a geometric grid: every term, residual and scaled residual."""
    try:
        grid = _grid(K, K_min, K_max, K_steps)
        cfg = _config("sweep", grid, fmt=fmt, **kw)
        t = cfg.test_function()
    except DomainError as exc:
        raise click.UsageError(str(exc)) from exc
    refused = None
    with _Sink(cfg, SWEEP_COLUMNS) as sink:
        for k in grid:
            try:
                rep = density.term_report(
                    k, t, P=cfg.prime_cutoff, T=cfg.psi_cutoff, norm_budget=cfg.norm_budget, threads=cfg.threads
                )
            except CapacityError as exc:
                sink.trailer(CAPACITY_MARKER, f"K={k} required={exc.required}")
                refused = exc
                break
            except DomainError as exc:
                raise click.UsageError(str(exc)) from exc
            sink.row(sweep_row(rep, t, cfg))
    if refused is not None:
        _refuse(refused)


def _parse_complex(_ctx, _param, values):
    try:
        return tuple(complex(v.replace(" ", "")) for v in values)
    except ValueError as exc:
        raise click.BadParameter(str(exc)) from exc


@main.command("ratios")
@click.option("--alpha", multiple=True, callback=_parse_complex, default=("0.05",), show_default=True)
@click.option("--gamma", multiple=True, callback=_parse_complex, default=("0.1",), show_default=True)
@_grid_options
@_common
@_format_option("csv")
def cmd_ratios(alpha, gamma, K, K_min, K_max, K_steps, fmt, **kw):
    """Ratios prediction R(alpha, gamma) over a grid of shifts and K."""
    try:
        grid = _grid(K, K_min, K_max, K_steps)
        cfg = _config("ratios", grid, fmt=fmt, **kw)
    except DomainError as exc:
        raise click.UsageError(str(exc)) from exc
    with _Sink(cfg, RATIOS_COLUMNS) as sink:
        for a in alpha:
            for g in gamma:
                for k in grid:
                    try:
                        R, G, tail = ratios.ratios_prediction_R_full(ratios.ShiftPoint(a, g), k, cfg.prime_cutoff)
                    except DomainError as exc:
                        raise click.UsageError(str(exc)) from exc
                    sink.row(
                        {"alpha": a, "gamma": g, "K": k, "P": cfg.prime_cutoff, "G": G, "R": R, "tail": tail}
                    )


@main.command("verify")
@click.option("--only", multiple=True, help="Run only these blocks (repeatable or comma separated).")
def cmd_verify(only):
    """Run the gating invariant suite; exit 1 naming any failure."""
    wanted = [b for item in only for b in item.split(",") if b]
    try:
        results = verify.run_checks(wanted or None)
    except ValueError as exc:
        raise click.UsageError(f"{exc}; known blocks: {', '.join(verify.blocks())}") from exc
    for r in results:
        click.echo(f"{'PASS' if r.passed else 'FAIL'} {r.block}/{r.name}: {r.detail}")
    failed = [r for r in results if not r.passed]
    if failed:
        click.echo(f"{len(failed)} of {len(results)} checks failed: {', '.join(r.name for r in failed)}", err=True)
        sys.exit(EXIT_VERIFY_FAILED)
    click.echo(f"all {len(results)} checks passed")


if __name__ == "__main__":  # pragma: no cover
    main()
