"""Command-line entry point: validate, compute, construct, verify, fixtures."""

from __future__ import annotations

import os
import sys
from pathlib import Path

import click

from . import verify as vf
from .complex import ComplexError, join
from .fixtures import ACTIONS, FIXTURES, UnknownFixture
from .ih import compute_ih
from .io import (ParseError, dumps, load_action, load_stratification, perversity_from_text,
                 stratification_to_json)
from .perversity import PerversityNotDefined
from .quotient import NotRegular, NotSimplicial, quotient, regularize
from .stratification import Filtration, derive_strata, validate_pseudomanifold
from .stratified import stratified_cone, stratified_product, stratified_suspension, subdivided

THREADS_ENV = "STRATIH_THREADS"

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _threads() -> int:
    """Thread count from the environment.  Jobs currently run serially either way."""
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise click.UsageError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None


def _load(path, fixture):
    if path is None and fixture is None:
        raise click.UsageError("give an input JSON path or --fixture NAME")
    if path is not None and fixture is not None:
        raise click.UsageError("give either an input path or --fixture, not both")
    return load_stratification(path, fixture)


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        click.echo(text, nl=False)


input_arg = click.argument("path", required=False, type=click.Path(dir_okay=False))
fixture_opt = click.option("--fixture", "-f", help="Built-in fixture name (see 'fixtures list').")
json_opt = click.option("--json", "as_json", is_flag=True, help="Machine-readable JSON output.")


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
def main() -> None:
    """Intersection homology of stratified simplicial complexes."""
    _threads()


@main.command("validate")
@input_arg
@fixture_opt
@json_opt
def cmd_validate(path, fixture, as_json):
    """Check the pseudomanifold axioms of a filtered complex."""
    st = _load(path, fixture)
    report = validate_pseudomanifold(st)
    if as_json:
        doc = report.to_json()
        doc["depth"] = st.depth()
        doc["strata"] = st.describe()
        click.echo(dumps(doc), nl=False)
    else:
        click.echo(f"complex {st.base.name or '-'}: dim {st.n}, f-vector {list(st.base.f_vector())}, "
                   f"{len(st.singular)} singular strata, depth {st.depth()}")
        click.echo(report.table())
        click.echo("PASS" if report.ok else "FAIL")
    sys.exit(EXIT_OK if report.ok else EXIT_FAIL)


@main.command("compute")
@input_arg
@fixture_opt
@click.option("--perversity", "-p", default="zero", show_default=True,
              help="zero | top | lower-middle | upper-middle | JSON object | .json file")
@click.option("--coefficients", "-c", type=click.Choice(["Z", "Q"]), default="Z", show_default=True)
@click.option("--subdivide", "-s", type=click.IntRange(0, 4), default=2, show_default=True,
              help="Barycentric subdivisions applied before computing.")
@json_opt
def cmd_compute(path, fixture, perversity, coefficients, subdivide, as_json):
    """Intersection homology for one perversity."""
    st = _load(path, fixture)
    p = perversity_from_text(st, perversity)
    h = compute_ih(p, coefficients, subdivide)
    if as_json:
        click.echo(dumps(h.to_json()), nl=False)
    else:
        click.echo(f"perversity {vf._pname(p)}, coefficients {coefficients}, {subdivide} subdivisions")
        click.echo(h.table())
        click.echo("groups: (" + ", ".join(h.groups()) + ")")


@main.command("construct")
@click.argument("kind", type=click.Choice(["cone", "suspension", "join", "product", "subdivide",
                                           "quotient"]))
@input_arg
@fixture_opt
@click.option("--apex", default="apex", show_default=True, help="Cone apex label.")
@click.option("--north", default="north", show_default=True)
@click.option("--south", default="south", show_default=True)
@click.option("--other", type=click.Path(dir_okay=False), help="Second join factor (JSON).")
@click.option("--other-fixture", help="Second join factor (fixture).")
@click.option("--times", type=click.IntRange(1, 4), default=1, show_default=True,
              help="Number of subdivisions for 'subdivide'.")
@click.option("--action", help="Action name (e.g. 'antipodal' with --fixture octahedron) or JSON file.")
@click.option("--output", "-o", type=click.Path(dir_okay=False), help="Write JSON here instead of stdout.")
def cmd_construct(kind, path, fixture, apex, north, south, other, other_fixture, times, action, output):
    """Build a new filtered complex and write it as JSON."""
    if kind == "quotient":
        if not action:
            raise click.UsageError("quotient needs --action")
        a = load_action(action, fixture)
        st = quotient(regularize(a)).strat
    else:
        st = _load(path, fixture)
        if kind == "cone":
            st = stratified_cone(st, apex)
        elif kind == "suspension":
            st = stratified_suspension(st, north, south)
        elif kind == "product":
            st = stratified_product(st).strat
        elif kind == "subdivide":
            st = subdivided(st, times)
        else:
            if (other is None) == (other_fixture is None):
                raise click.UsageError("join needs exactly one of --other or --other-fixture")
            second = load_stratification(other, other_fixture)
            st = derive_strata(Filtration.trivial(join(st.base, second.base)))
    _emit(dumps(stratification_to_json(st)), output)


@main.command("verify")
@click.argument("suite", type=click.Choice(sorted(vf.SUITES) + ["all"]))
@json_opt
@click.option("--timings", is_flag=True, help="Append runtimes (output is then not reproducible).")
def cmd_verify(suite, as_json, timings):
    """Run structural checks over the fixture matrix."""
    names = sorted(vf.SUITES) if suite == "all" else [suite]
    reports = []
    for name in names:
        reports.extend(vf.SUITES[name]())
    if as_json:
        click.echo(dumps({"reports": [r.to_json() for r in reports],
                          "passed": sum(r.passed for r in reports), "total": len(reports)}), nl=False)
    else:
        click.echo(vf.render(reports, timings=timings))
    sys.exit(EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL)


@main.group("fixtures")
def cmd_fixtures():
    """Built-in fixtures."""


@cmd_fixtures.command("list")
@json_opt
def cmd_fixtures_list(as_json):
    if as_json:
        doc = {"complexes": {n: f.description for n, f in FIXTURES.items()},
               "actions": {n: a.description for n, a in ACTIONS.items()}}
        click.echo(dumps(doc), nl=False)
        return
    width = max(map(len, list(FIXTURES) + list(ACTIONS)))
    click.echo("complexes:")
    for n, f in FIXTURES.items():
        flag = "  (counterexample)" if f.counterexample else ""
        click.echo(f"  {n.ljust(width)}  {f.description}{flag}")
    click.echo("actions:")
    for n, a in ACTIONS.items():
        click.echo(f"  {n.ljust(width)}  {a.description}")


def run(argv=None) -> int:
    """Invoke the CLI and map library errors to exit codes."""
    try:
        main.main(args=argv, prog_name="stratih", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_FAIL
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except click.exceptions.Abort:
        return EXIT_FAIL
    except (ParseError, UnknownFixture, PerversityNotDefined) as exc:
        click.echo(f"error: {exc.args[0] if isinstance(exc, KeyError) else exc}", err=True)
        return EXIT_USAGE
    except (ComplexError, NotRegular, NotSimplicial, ValueError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_FAIL
    return EXIT_OK


def entry() -> None:
    sys.exit(run())
