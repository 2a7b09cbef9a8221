"""
Command-line entry points

Results go to stdout, diagnostics to stderr. Exit status: 0 success,
1 diagnostics, 2 usage error.
"""

import logging
from typing import List, Optional

import click

from cli.parser import parse_concept, parse_ontology, parse_parties, parse_weights
from cli.render import render_evaluations, render_expr, render_hierarchy, render_ranking
from errors import MatchmakerError, UnknownParty
from schemas import PartyRecord, WeightTable
from services import inference, matchmaker, reasoner
from services.concepts import Ontology
from utils import load_source

logger = logging.getLogger(__name__)

EXIT_DIAGNOSTICS = 1

existing_file = click.Path(exists=True, dir_okay=False, readable=True)
output_format = click.Choice(["tsv", "json"])


class _Session:
    """Tracks the file being read so diagnostics can name it"""

    def __init__(self):
        self.current_path: Optional[str] = None

    def load_ontology(self, path: str) -> Ontology:
        self.current_path = path
        ont = parse_ontology(load_source(path, "ontology"))
        for warning in ont.diagnostics:
            click.echo(warning.format(path), err=True)
        return ont

    def load_parties(self, path: str, ont: Ontology) -> List[PartyRecord]:
        self.current_path = path
        return parse_parties(load_source(path, "parties"), ont)

    def load_weights(self, path: Optional[str], ont: Ontology) -> WeightTable:
        if path is None:
            return WeightTable()
        self.current_path = path
        return parse_weights(load_source(path, "weights"), ont)

    def arguments(self) -> None:
        self.current_path = "<argument>"


def _fail(ctx: click.Context, session: _Session, error: MatchmakerError) -> None:
    logger.debug(f"Command failed: {error}")
    click.echo(error.to_diagnostic().format(session.current_path), err=True)
    ctx.exit(EXIT_DIAGNOSTICS)


def _find_party(parties: List[PartyRecord], name: str, kind: str) -> PartyRecord:
    for party in parties:
        if party.name == name:
            if party.kind != kind:
                raise UnknownParty(f"'{name}' is declared as {party.kind}, expected {kind}",
                                   details={"name": name}, line=party.line, column=1)
            return party
    raise UnknownParty(f"no {kind} named '{name}'", details={"name": name})


@click.group()
@click.option("--verbose", is_flag=True, help="Log progress at INFO level on stderr.")
def cli(verbose: bool):
    """Rank offers against a demand over an EL++ ontology."""
    if verbose:
        logging.getLogger().setLevel(logging.INFO)


@cli.command()
@click.option("--ontology", "ontology_path", required=True, type=existing_file)
@click.option("--parties", "parties_path", required=True, type=existing_file)
@click.option("--demand", required=True, help="Name of the demand to rank against.")
@click.option("--weights", "weights_path", type=existing_file, help="Lines 'ROLE WEIGHT'.")
@click.option("--format", "fmt", type=output_format, default="tsv", show_default=True)
@click.option("--explain", is_flag=True, help="Include the per-pair, per-component trace.")
@click.pass_context
def rank(ctx, ontology_path, parties_path, demand, weights_path, fmt, explain):
    """Rank every offer of a parties file against one demand."""
    session = _Session()
    try:
        ont = session.load_ontology(ontology_path)
        parties = session.load_parties(parties_path, ont)
        weights = session.load_weights(weights_path, ont)
        session.current_path = parties_path
        target = _find_party(parties, demand, "demand")
        offers = [party for party in parties if party.kind == "offer"]
        result = matchmaker.rank(target, offers, weights, ont)
    except MatchmakerError as e:
        _fail(ctx, session, e)
    click.echo(render_ranking(result, fmt, explain), nl=False)


@cli.command()
@click.option("--ontology", "ontology_path", required=True, type=existing_file)
@click.option("--parties", "parties_path", required=True, type=existing_file)
@click.option("--demand", required=True)
@click.option("--offer", required=True)
@click.option("--format", "fmt", type=output_format, default="tsv", show_default=True)
@click.pass_context
def compare(ctx, ontology_path, parties_path, demand, offer, fmt):
    """Show zone, LCS, Rest and Miss of one offer per component."""
    session = _Session()
    try:
        ont = session.load_ontology(ontology_path)
        parties = session.load_parties(parties_path, ont)
        target = _find_party(parties, demand, "demand")
        candidate = _find_party(parties, offer, "offer")
        evaluations = [matchmaker.evaluate_component(role, ont, target, candidate)
                       for role in ont.component_roles]
    except MatchmakerError as e:
        _fail(ctx, session, e)
    click.echo(render_evaluations(evaluations, fmt), nl=False)


def _pair_command(ctx, ontology_path: str, first: str, second: str):
    session = _Session()
    try:
        ont = session.load_ontology(ontology_path)
        session.arguments()
        return session, ont, parse_concept(first, ont), parse_concept(second, ont)
    except MatchmakerError as e:
        _fail(ctx, session, e)


@cli.command()
@click.option("--ontology", "ontology_path", required=True, type=existing_file)
@click.argument("c")
@click.argument("d")
@click.pass_context
def subsumes(ctx, ontology_path, c, d):
    """Print whether C ⊑ D holds."""
    _, ont, left, right = _pair_command(ctx, ontology_path, c, d)
    click.echo("true" if reasoner.subsumes(left, right, ont) else "false")


@cli.command()
@click.option("--ontology", "ontology_path", required=True, type=existing_file)
@click.argument("c")
@click.argument("d")
@click.pass_context
def equiv(ctx, ontology_path, c, d):
    """Print whether C ≡ D holds."""
    _, ont, left, right = _pair_command(ctx, ontology_path, c, d)
    click.echo("true" if reasoner.equivalent(left, right, ont) else "false")


@cli.command()
@click.option("--ontology", "ontology_path", required=True, type=existing_file)
@click.argument("c")
@click.argument("d")
@click.pass_context
def lcs(ctx, ontology_path, c, d):
    """Print the least common subsumer of C and D."""
    session, ont, left, right = _pair_command(ctx, ontology_path, c, d)
    try:
        click.echo(render_expr(inference.lcs(left, right, ont)))
    except MatchmakerError as e:
        _fail(ctx, session, e)


@cli.command()
@click.option("--ontology", "ontology_path", required=True, type=existing_file)
@click.argument("c")
@click.argument("d")
@click.pass_context
def diff(ctx, ontology_path, c, d):
    """Print the semantic difference C ⊖ D (requires C ⊑ D)."""
    session, ont, left, right = _pair_command(ctx, ontology_path, c, d)
    try:
        click.echo(render_expr(inference.semantic_difference(left, right, ont)))
    except MatchmakerError as e:
        _fail(ctx, session, e)


@cli.command()
@click.option("--ontology", "ontology_path", required=True, type=existing_file)
@click.pass_context
def classify(ctx, ontology_path):
    """Print the named-concept hierarchy as 'sub A B' lines."""
    session = _Session()
    try:
        ont = session.load_ontology(ontology_path)
    except MatchmakerError as e:
        _fail(ctx, session, e)
    click.echo(render_hierarchy(reasoner.hierarchy(ont)), nl=False)


def cli_main(args: Optional[List[str]] = None) -> int:
    """Run the command line and return its exit status"""
    try:
        status = cli.main(args=args, prog_name="matchmaker", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.exceptions.Abort:
        return EXIT_DIAGNOSTICS
    return status if isinstance(status, int) else 0
