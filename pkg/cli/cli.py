#!/usr/bin/env python3

import csv
import functools
import io
import json
import os
import sys

import click

from config.manager import StateManager
from config.settings import load_settings
from core import status
from core.algebra import (
    all_nodes,
    d_H,
    d_V,
    delta_V,
    euler_Eq,
    euler_Estar,
    interior_euler_I,
    last_root,
    parse_combo,
    top_covertex,
)
from core.checks import acceptance_checks
from core.errors import AromaKitError, ConfigError, PreconditionError, VerificationError
from core.evaldiff import PolyVectorField, check_dH_identity, elementary_differential, random_divfree_field, random_field
from core.forest import generate
from core.genfun import dimension_table
from core.homotopy import (
    aug_h_H,
    aug_h_V,
    d_H_divfree,
    h_H,
    h_H_divfree,
    h_H_divfree_simple,
    h_V,
    ibp_homotopy,
    nth_antiderivative,
)
from core.spaces import (
    annihilator_div_basis,
    annihilator_edge_subsets,
    basis,
    dimension,
    divergence_basis,
    exactness_report,
    solenoidal_basis,
    solenoidal_dimension,
    solenoidal_generators,
    vp_certificate,
)

SELECTORS = {"all": all_nodes, "root": last_root, "covertex": top_covertex}


def handle_errors(func):
    """Map domain errors to exit codes: 2 for failed verification, 1 otherwise."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except VerificationError as e:
            click.echo(f"❌ {e}", err=True)
            sys.exit(2)
        except AromaKitError as e:
            click.echo(f"❌ {e}", err=True)
            sys.exit(1)

    return wrapper


def output_options(func):
    func = click.option('--csv', 'as_csv', is_flag=True, help='Shortcut for --format csv')(func)
    func = click.option('--json', 'as_json', is_flag=True, help='Shortcut for --format json')(func)
    func = click.option('--format', 'fmt', type=click.Choice(['text', 'json', 'csv']), default=None,
                        help='Output format (default from settings)')(func)
    return func


def grade_options(roots=1):
    def decorate(func):
        func = click.option('--force', is_flag=True, help='Allow orders above max_order')(func)
        func = click.option('--divfree', is_flag=True, help='Quotient out forests with a 1-loop')(func)
        func = click.option('--covertices', '-p', default=0, show_default=True, type=int, help='Number of covertices')(func)
        func = click.option('--roots', '-n', default=roots, show_default=True, type=int, help='Number of roots')(func)
        func = click.option('--order', '-N', required=True, type=int, help='Number of nodes')(func)
        return func

    return decorate


def _fmt(ctx, fmt, as_json=False, as_csv=False):
    if as_json:
        return 'json'
    if as_csv:
        return 'csv'
    return fmt or ctx.obj['settings'].default_format


def _check_order(ctx, N, force=False):
    limit = ctx.obj['settings'].max_order
    if N > limit and not force:
        raise PreconditionError(f"order {N} exceeds max_order {limit}; pass --force to continue")


def _emit(fmt, records, text_lines, payload=None):
    """Print records as text lines, JSON, or CSV."""
    if fmt == 'json':
        click.echo(json.dumps(records if payload is None else payload, indent=2, ensure_ascii=False))
    elif fmt == 'csv':
        if not records:
            return
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=list(records[0].keys()), lineterminator='\n')
        writer.writeheader()
        writer.writerows(records)
        click.echo(buffer.getvalue(), nl=False)
    else:
        for line in text_lines:
            click.echo(line)


def _emit_combo(fmt, combo, label=None):
    records = combo.to_records()
    text = combo.to_text()
    _emit(fmt, records, [f"{label}: {text}" if label else text], payload={"combo": text, "terms": records})


@click.group()
@click.version_option(version="0.1.0")
@click.option('--config', 'config_path', type=click.Path(dir_okay=False), help='YAML settings file')
@click.option('--threads', type=int, help='Worker threads for matrix assembly')
@click.option('--verbose', '-v', is_flag=True, help='Print progress lines')
@click.pass_context
def cli(ctx, config_path, threads, verbose):
    """Aromatic bicomplex toolkit: forests, derivatives, homotopies and dimension tables"""
    try:
        settings = load_settings(config_path)
    except ConfigError as e:
        click.echo(f"❌ {e}", err=True)
        sys.exit(1)
    updates = {}
    if threads:
        updates['threads'] = max(1, threads)
    if verbose:
        updates['verbose'] = True
    settings = settings.model_copy(update=updates)
    status.configure(settings.state_path, settings.verbose)
    ctx.obj = {
        'settings': settings,
        'state': StateManager(settings.state_path, enabled=settings.cache),
    }


@cli.command('enumerate')
@grade_options()
@click.option('--orbits', is_flag=True, help='One representative per relabelling orbit with nonzero wedge')
@output_options
@click.pass_context
@handle_errors
def enumerate_forests(ctx, order, roots, covertices, divfree, force, orbits, fmt, as_json, as_csv):
    """List the aromatic forests of a grade"""
    _check_order(ctx, order, force)
    forests = basis(order, roots, covertices, divfree).representatives if orbits else generate(order, roots, covertices, divfree)
    status.log(f"{len(forests)} forests of order {order}, n={roots}, p={covertices}")
    records = [{"index": j, "forest": f.text} for j, f in enumerate(forests)]
    _emit(_fmt(ctx, fmt, as_json, as_csv), records, [f.text for f in forests],
          payload={"N": order, "n": roots, "p": covertices, "divfree": divfree, "forests": [f.text for f in forests]})


@cli.command()
@grade_options()
@output_options
@click.pass_context
@handle_errors
def dims(ctx, order, roots, covertices, divfree, force, fmt, as_json, as_csv):
    """Count forests and the dimension of the form space of a grade"""
    _check_order(ctx, order, force)
    state = ctx.obj['state']
    forests = state.cached("forests", order, roots, covertices, lambda: len(generate(order, roots, covertices, divfree)), divfree)
    dim = state.cached("dim", order, roots, covertices, lambda: dimension(order, roots, covertices, divfree), divfree)
    record = {"N": order, "n": roots, "p": covertices, "divfree": divfree, "forests": forests, "dim": dim}
    name = "Ω~" if divfree else "Ω"
    _emit(_fmt(ctx, fmt, as_json, as_csv), [record],
          [f"{name}_{{{roots},{covertices}}}^{order}: {forests} forests, dimension {dim}"], payload=record)


@cli.command()
@click.option('--max-order', '-K', default=10, show_default=True, type=int, help='Largest order in the tables')
@click.option('--columns', default=5, show_default=True, type=int, help='Root counts shown in the bottom rows table')
@click.option('--which', type=click.Choice(['solenoidal', 'bottom', 'both']), default='both', show_default=True)
@output_options
@click.pass_context
@handle_errors
def tables(ctx, max_order, columns, which, fmt, as_json, as_csv):
    """Dimension tables from the generating functions"""
    result = dimension_table(max_order, columns)
    fmt = _fmt(ctx, fmt, as_json, as_csv)
    solenoidal = [row.model_dump() for row in result.solenoidal]
    bottom = []
    for row in result.bottom_rows:
        record = {"N": row.N}
        for n, value in zip(reversed(range(columns)), row.first_row):
            record[f"first_n{n}"] = value
        for n, value in zip(reversed(range(columns)), row.second_row):
            record[f"second_n{n}"] = value
        record["functional"] = row.functional
        bottom.append(record)

    if fmt == 'json':
        payload = result.model_dump()
        if which == 'solenoidal':
            payload.pop('bottom_rows')
        elif which == 'bottom':
            payload.pop('solenoidal')
        _emit(fmt, [], [], payload=payload)
        return
    if fmt == 'csv':
        if which in ('solenoidal', 'both'):
            _emit(fmt, solenoidal, [])
        if which == 'both':
            click.echo()
        if which in ('bottom', 'both'):
            _emit(fmt, bottom, [])
        return

    lines = []
    if which in ('solenoidal', 'both'):
        lines.append(f"{'N':>3} {'|Ω_1|':>10} {'|Ω°_0|':>10} {'|Ψ|':>10} {'|Ψ~|':>10}")
        for row in result.solenoidal:
            lines.append(f"{row.N:>3} {row.omega_1:>10} {row.self_looped:>10} {row.psi:>10} {row.psi_tilde:>10}")
    if which == 'both':
        lines.append("")
    if which in ('bottom', 'both'):
        header = " ".join(f"{'n=' + str(n):>8}" for n in reversed(range(columns)))
        lines.append(f"{'N':>3} {'row':>6} {header} {'|I_1|':>8}")
        for row in result.bottom_rows:
            lines.append(f"{row.N:>3} {'Ω_0':>6} " + " ".join(f"{v:>8}" for v in row.first_row))
            lines.append(f"{'':>3} {'Ω_1':>6} " + " ".join(f"{v:>8}" for v in row.second_row) + f" {row.functional:>8}")
    _emit(fmt, [], lines)


@cli.command()
@click.argument('combo')
@click.option('--divfree', is_flag=True, help='Drop 1-loop terms from the result')
@output_options
@click.pass_context
@handle_errors
def dh(ctx, combo, divfree, fmt, as_json, as_csv):
    """Horizontal derivative of a combination"""
    c = parse_combo(combo)
    _emit_combo(_fmt(ctx, fmt, as_json, as_csv), d_H_divfree(c) if divfree else d_H(c))


@cli.command()
@click.argument('combo')
@output_options
@click.pass_context
@handle_errors
def dv(ctx, combo, fmt, as_json, as_csv):
    """Vertical derivative of a combination"""
    _emit_combo(_fmt(ctx, fmt, as_json, as_csv), d_V(parse_combo(combo)))


@cli.command()
@click.argument('combo')
@click.option('--kind', type=click.Choice(['E', 'star', 'interior', 'delta']), default='E', show_default=True,
              help='E^q, the variational E°, the interior operator I, or δ_V')
@click.option('--q', 'q', default=0, show_default=True, type=int, help='Number of detached roots kept by E^q')
@click.option('--at', 'at', type=click.Choice(list(SELECTORS)), default='all', show_default=True,
              help='Nodes E^q is summed over')
@output_options
@click.pass_context
@handle_errors
def euler(ctx, combo, kind, q, at, fmt, as_json, as_csv):
    """Euler operators"""
    c = parse_combo(combo)
    if kind == 'star':
        result = euler_Estar(c)
    elif kind == 'interior':
        result = interior_euler_I(c)
    elif kind == 'delta':
        result = delta_V(c)
    else:
        result = euler_Eq(c, q, SELECTORS[at])
    _emit_combo(_fmt(ctx, fmt, as_json, as_csv), result)


@cli.group()
def homotopy():
    """Homotopy operators"""
    pass


@homotopy.command('hH')
@click.argument('combo')
@output_options
@click.pass_context
@handle_errors
def homotopy_h(ctx, combo, fmt, as_json, as_csv):
    """Horizontal homotopy h_H"""
    _emit_combo(_fmt(ctx, fmt, as_json, as_csv), h_H(parse_combo(combo)))


@homotopy.command('hV')
@click.argument('combo')
@output_options
@click.pass_context
@handle_errors
def homotopy_v(ctx, combo, fmt, as_json, as_csv):
    """Vertical homotopy h_V"""
    _emit_combo(_fmt(ctx, fmt, as_json, as_csv), h_V(parse_combo(combo)))


@homotopy.command('ibp')
@click.argument('combo')
@click.option('--pick', type=click.Choice(['first', 'last']), default='first', show_default=True,
              help='Which 1-loop is opened at each step')
@output_options
@click.pass_context
@handle_errors
def homotopy_ibp(ctx, combo, pick, fmt, as_json, as_csv):
    """Integration by parts homotopy on scalars"""
    _emit_combo(_fmt(ctx, fmt, as_json, as_csv), ibp_homotopy(parse_combo(combo), pick))


@homotopy.command('divfree')
@click.argument('combo')
@click.option('--simple', is_flag=True, help='Use the pair of modified operators (one root, N > 1)')
@output_options
@click.pass_context
@handle_errors
def homotopy_divfree(ctx, combo, simple, fmt, as_json, as_csv):
    """Divergence-free horizontal homotopy with its remainder"""
    c = parse_combo(combo)
    if simple:
        parts = dict(zip(("first", "second"), h_H_divfree_simple(c)))
    else:
        parts = dict(zip(("h", "remainder"), h_H_divfree(c)))
    records = [{"part": name, **term} for name, value in parts.items() for term in value.to_records()]
    _emit(_fmt(ctx, fmt, as_json, as_csv), records,
          [f"{name}: {value.to_text()}" for name, value in parts.items()],
          payload={name: value.to_text() for name, value in parts.items()})


@homotopy.command('aug')
@click.argument('combo')
@click.option('--vertical', is_flag=True, help='Apply the augmented vertical homotopy I∘h_V')
@output_options
@click.pass_context
@handle_errors
def homotopy_aug(ctx, combo, vertical, fmt, as_json, as_csv):
    """Augmented homotopy operators on scalars with covertices"""
    c = parse_combo(combo)
    _emit_combo(_fmt(ctx, fmt, as_json, as_csv), aug_h_V(c) if vertical else aug_h_H(c))


@homotopy.command('antiderivative')
@click.argument('combo')
@click.option('--roots', '-n', 'n', default=1, show_default=True, type=int, help='Number of trailing roots regrafted')
@output_options
@click.pass_context
@handle_errors
def homotopy_antiderivative(ctx, combo, n, fmt, as_json, as_csv):
    """Higher antiderivative h^(n)"""
    _emit_combo(_fmt(ctx, fmt, as_json, as_csv), nth_antiderivative(parse_combo(combo), n))


@cli.group()
def solenoidal():
    """Solenoidal forms"""
    pass


def _emit_combos(fmt, combos, payload_key='elements', extra=None):
    records = [{"element": j, **term} for j, c in enumerate(combos) for term in c.to_records()]
    payload = {**(extra or {}), payload_key: [c.to_text() for c in combos]}
    _emit(fmt, records, [c.to_text() for c in combos], payload=payload)


@solenoidal.command('gen')
@click.option('--order', '-N', required=True, type=int, help='Number of nodes')
@click.option('--divfree', is_flag=True, help='Quotient out forests with a 1-loop')
@click.option('--force', is_flag=True, help='Allow orders above max_order')
@output_options
@click.pass_context
@handle_errors
def solenoidal_gen(ctx, order, divfree, force, fmt, as_json, as_csv):
    """Generators d_H∧γ of the solenoidal forms"""
    _check_order(ctx, order, force)
    settings = ctx.obj['settings']
    gens = solenoidal_generators(order, divfree)
    dim = ctx.obj['state'].cached("kernel", order, 1, 0, lambda: solenoidal_dimension(order, divfree, settings.threads), divfree)
    status.log(f"{len(gens)} generators spanning a space of dimension {dim}")
    _emit_combos(_fmt(ctx, fmt, as_json, as_csv), gens, 'generators', {"N": order, "divfree": divfree, "dim": dim})


@solenoidal.command('basis')
@click.option('--order', '-N', required=True, type=int, help='Number of nodes')
@click.option('--force', is_flag=True, help='Allow orders above max_order')
@output_options
@click.pass_context
@handle_errors
def solenoidal_basis_cmd(ctx, order, force, fmt, as_json, as_csv):
    """Explicit basis of the solenoidal forms from self-looped scalars"""
    _check_order(ctx, order, force)
    _emit_combos(_fmt(ctx, fmt, as_json, as_csv), solenoidal_basis(order), 'basis', {"N": order})


@cli.command('divergence-basis')
@click.option('--order', '-N', required=True, type=int, help='Number of nodes')
@output_options
@click.pass_context
@handle_errors
def divergence_basis_cmd(ctx, order, fmt, as_json, as_csv):
    """Divergences graphed over the self-looped scalars"""
    pairs = divergence_basis(order)
    records = [{"alpha": alpha.text, **term} for alpha, c in pairs for term in c.to_records()]
    _emit(_fmt(ctx, fmt, as_json, as_csv), records,
          [f"{alpha.text}: {c.to_text()}" for alpha, c in pairs],
          payload={"N": order, "divergences": {alpha.text: c.to_text() for alpha, c in pairs}})


@cli.command()
@click.option('--order', '-N', type=int, help='Number of nodes (all non-self-looped scalars)')
@click.option('--beta', help='Single non-self-looped scalar, expanded over edge subsets')
@click.option('--per-distinct', is_flag=True, help='Count each resulting graph once')
@output_options
@click.pass_context
@handle_errors
def annihilators(ctx, order, beta, per_distinct, fmt, as_json, as_csv):
    """Functionals vanishing on every divergence"""
    fmt = _fmt(ctx, fmt, as_json, as_csv)
    if beta:
        _emit_combo(fmt, annihilator_edge_subsets(beta, per_distinct), label=beta)
        return
    if order is None:
        raise PreconditionError("pass --order or --beta")
    _emit_combos(fmt, annihilator_div_basis(order), 'functionals', {"N": order})


@cli.command()
@click.option('--order', '-N', required=True, type=int, help='Number of nodes')
@click.option('--n-max', type=int, help='Largest root count (default N)')
@click.option('--p-max', type=int, help='Largest covertex count (default min(2, N))')
@click.option('--divfree', is_flag=True, help='Check the 1-loop free bicomplex')
@click.option('--strict', is_flag=True, help='Exit with code 2 when a defect is found')
@output_options
@click.pass_context
@handle_errors
def exactness(ctx, order, n_max, p_max, divfree, strict, fmt, as_json, as_csv):
    """Compare image and kernel dimensions across the bicomplex"""
    report = exactness_report(order, n_max, p_max, divfree, ctx.obj['settings'].threads)
    records = [entry.model_dump() for entry in report.entries]
    lines = []
    for e in report.entries:
        mark = "ℹ️ " if e.informational else ("✅" if e.exact else "❌")
        line = f"{mark} {e.direction:<10} n={e.n} p={e.p} image={e.dim_image} kernel={e.dim_kernel}"
        if e.witness:
            line += f" witness: {e.witness}"
        lines.append(line)
    lines.append(f"{'✅ exact' if report.exact else '⚠️ not exact'} at N={order}{' (divergence-free)' if divfree else ''}")
    _emit(_fmt(ctx, fmt, as_json, as_csv), records, lines, payload=report.model_dump())
    if strict and not report.exact:
        sys.exit(2)


def _load_coefficients(path):
    try:
        with open(path, 'r') as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read coefficient map {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError("a coefficient map is a JSON object {forest: coefficient}")
    return data


@cli.command('vp-check')
@click.argument('coeffs', type=click.Path(exists=True, dir_okay=False))
@click.option('--order', '-N', type=int, help='Highest order to certify (default: highest in the map)')
@click.option('--divfree', is_flag=True, help='Work modulo 1-loops')
@click.option('--scaled', is_flag=True, help='Read B-series coefficients and divide by symmetry orders')
@output_options
@click.pass_context
@handle_errors
def vp_check(ctx, coeffs, order, divfree, scaled, fmt, as_json, as_csv):
    """Volume-preservation certificate for a modified-field coefficient map"""
    cert = vp_certificate(_load_coefficients(coeffs), order, divfree, scaled, ctx.obj['settings'].threads)
    records = [{"order": k, "eta": eta} for k, eta in sorted(cert.eta.items())]
    lines = [f"η_{k} = {eta}" for k, eta in sorted(cert.eta.items())]
    if cert.feasible:
        lines.append(f"✅ volume-preserving up to order {cert.order}")
    else:
        lines.append(f"❌ obstruction at order {cert.failed_order}: {cert.witness}")
    _emit(_fmt(ctx, fmt, as_json, as_csv), records, lines, payload=cert.model_dump())
    if not cert.feasible:
        sys.exit(2)


def _load_field(path):
    try:
        with open(path, 'r') as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read vector field {path}: {e}") from e
    return PolyVectorField.from_payload(data)


@cli.command('eval')
@click.argument('combo')
@click.option('--field', 'field_path', type=click.Path(exists=True, dir_okay=False), help='JSON vector field')
@click.option('--dim', '-d', default=3, show_default=True, type=int, help='Dimension of a random field')
@click.option('--degree', default=2, show_default=True, type=int, help='Degree of a random field')
@click.option('--seed', default=0, show_default=True, type=int, help='Seed of a random field')
@click.option('--divfree', is_flag=True, help='Draw a divergence-free random field')
@click.option('--check-dh', is_flag=True, help='Check Div F(c) = F(d_H c) instead of printing F(c)')
@output_options
@click.pass_context
@handle_errors
def eval_cmd(ctx, combo, field_path, dim, degree, seed, divfree, check_dh, fmt, as_json, as_csv):
    """Elementary differential of a combination on a polynomial field"""
    if field_path:
        field = _load_field(field_path)
    else:
        field = random_divfree_field(dim, degree, seed) if divfree else random_field(dim, degree, seed)
    fmt = _fmt(ctx, fmt, as_json, as_csv)
    if check_dh:
        if not check_dH_identity(combo, field):
            raise VerificationError(f"Div F(c) != F(d_H c) on {field}")
        _emit(fmt, [{"identity": "ok"}], ["✅ Div F(c) = F(d_H c)"], payload={"identity": True, "field": field.to_payload()})
        return
    value = elementary_differential(combo, field)
    records = [
        {"index": ",".join(str(i + 1) for i in index), "value": str(poly.as_expr())}
        for index, poly in sorted(value.entries.items())
    ]
    lines = [f"[{r['index']}] {r['value']}" for r in records] or ["0"]
    _emit(fmt, records, lines, payload={"field": field.to_payload(), "rank": value.rank, "entries": records})


@cli.command('check-paper')
@click.option('--quick', is_flag=True, help='Lower orders and sample counts')
@click.option('--seed', default=0, show_default=True, type=int, help='Seed for the random identity suites')
@click.option('--log-file', default=None, help='Log file (default <state_dir>/check.log)')
@click.pass_context
@handle_errors
def check_paper(ctx, quick, seed, log_file):
    """Run the acceptance checks"""
    settings = ctx.obj['settings']
    click.echo(f"🚀 Running {'quick ' if quick else ''}acceptance checks...")
    try:
        if log_file is None:
            os.makedirs(settings.state_path, exist_ok=True)
        log_path = log_file or os.path.join(settings.state_path, "check.log")
        failures = status.run_checks_live(acceptance_checks(quick, settings.threads, seed), log_path)
    except OSError as e:
        click.echo(f"❌ {e}", err=True)
        sys.exit(1)
    if failures:
        click.echo(f"❌ {failures} check(s) failed")
        sys.exit(2)
    click.echo("✅ All checks passed")


@cli.group()
def cache():
    """Cached dimensions and ranks"""
    pass


@cache.command('show')
@output_options
@click.pass_context
@handle_errors
def cache_show(ctx, fmt, as_json, as_csv):
    """Show the cache summary"""
    summary = ctx.obj['state'].summary()
    records = [{"kind": k, "entries": v} for k, v in sorted(summary['by_kind'].items())]
    lines = [f"📁 {summary['state_file']}", f"Entries: {summary['entries']}"]
    lines += [f"  {r['kind']}: {r['entries']}" for r in records]
    if summary['last_updated']:
        lines.append(f"Last updated: {summary['last_updated']}")
    _emit(_fmt(ctx, fmt, as_json, as_csv), records, lines, payload=summary)


@cache.command('clear')
@click.pass_context
@handle_errors
def cache_clear(ctx):
    """Drop every cached entry"""
    removed = ctx.obj['state'].clear()
    click.echo(f"✅ Removed {removed} cached entries")


if __name__ == '__main__':
    cli()
