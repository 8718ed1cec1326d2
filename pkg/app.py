import logging
import sys
from functools import wraps

import click
from dotenv import load_dotenv

load_dotenv()

from commutation import settings
from commutation.contextuality import (
    ContextualWord,
    classify_z2,
    compatibility_graph,
    find_pattern,
    is_cluster_graph,
    parse_bracketing,
    search_contextual_word,
    to_dot,
    value_assignment,
    verify_contextual_word,
)
from commutation.darboux import darboux_form, decide_darboux, standard_form
from commutation.group import GroupContext, evaluate, to_normal_form
from commutation.history import format_trace
from commutation.json_utils import dumps, load_matrix, matrix_to_json
from commutation.model import CommutationError
from commutation.representation import dense_to_json, represent, to_dense
from commutation.rewrite import format_normal_form, normalize, parse_word, reduce_word

logger = logging.getLogger("commutation.cli")

EXIT_ANSWERED = 0
EXIT_INVALID = 2
EXIT_EXHAUSTED = 3

REDUCTION_WARNING = (
    "the matrix was reduced by a change of generators; a contextual word for the "
    "reduced matrix need not correspond to one over the original generators"
)


def emit(payload):
    click.echo(dumps(payload))


def json_command(func):
    """Print the command's payload as JSON; module errors become {error, detail} with exit 2."""
    @wraps(func)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            result = func(*args, **kwargs)
        except CommutationError as e:
            logger.error("⚠ %s", e)
            emit(e.to_json())
            ctx.exit(EXIT_INVALID)
        payload, code = result if isinstance(result, tuple) else (result, EXIT_ANSWERED)
        if isinstance(payload, str):
            click.echo(payload, nl=False)
        else:
            emit(payload)
        if code:
            ctx.exit(code)
    return wrapper


matrix_option = click.option(
    "--matrix", "matrix_path", required=True, type=click.Path(dir_okay=False),
    help="Commutator matrix JSON file: {\"d\", \"labels\", \"mu\"}.",
)


@click.group()
@click.option("--verbose", is_flag=True, help="Log progress to stderr.")
def cli(verbose):
    """Exact tools for commutation groups over Z_d."""
    level = logging.INFO if verbose else getattr(logging, settings.LOG_LEVEL.upper(), logging.WARNING)
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s")


# --- WORDS ---

@cli.command("normalize")
@matrix_option
@click.option("--word", default="", help="Word such as \"J1 a b^2\"; empty is the identity.")
@click.option("--trace", is_flag=True, help="Include every rewrite step.")
@json_command
def normalize_cmd(matrix_path, word, trace):
    """Normal form of a word."""
    mu = load_matrix(matrix_path)
    letters = parse_word(word, mu)
    nf = normalize(letters, mu)
    out = {"phase": nf.phase, "exponents": list(nf.exponents), "normal_form": format_normal_form(nf, mu)}
    if trace:
        events = []
        reduce_word(letters, mu, trace=events)
        out["trace"] = [e.to_json() for e in events]
        logger.info("trace:\n%s", format_trace(events))
    return out


@cli.command()
@matrix_option
@click.option("--left", required=True)
@click.option("--right", required=True)
@json_command
def equal(matrix_path, left, right):
    """Whether two words denote the same group element."""
    mu = load_matrix(matrix_path)
    u, v = normalize(parse_word(left, mu), mu), normalize(parse_word(right, mu), mu)
    return {"equal": u == v, "left": format_normal_form(u, mu), "right": format_normal_form(v, mu)}


@cli.command("check-word")
@matrix_option
@click.option("--bracketing", required=True, help="Bracketed word such as \"((ab)(dc))((ca)(bd))\".")
@click.option("--word", default=None, help="Optional flat word the bracketing must spell.")
@json_command
def check_word(matrix_path, bracketing, word):
    """Whether a bracketed word is contextual, with its phase."""
    mu = load_matrix(matrix_path)
    letters = parse_word(word, mu) if word is not None else None
    return verify_contextual_word(letters, parse_bracketing(bracketing, mu), mu).to_json()


# --- CONTEXTUALITY ---

@cli.command()
@matrix_option
@click.option("--max-len", type=int, default=None, help="Longest word to try.")
@json_command
def search(matrix_path, max_len):
    """Breadth-first search for a contextual word."""
    mu = load_matrix(matrix_path)
    max_len = settings.SEARCH_MAX_LEN if max_len is None else max_len
    found = search_contextual_word(mu, max_len)
    if found is None:
        return {"status": "exhausted", "max_len": max_len}, EXIT_EXHAUSTED
    return {"status": "found", **found.to_json(mu)}


@cli.command()
@matrix_option
@json_command
def assign(matrix_path):
    """Value assignment on C(mu), or the word that rules one out."""
    mu = load_matrix(matrix_path)
    result = value_assignment(mu)
    if isinstance(result, ContextualWord):
        return {"status": "contextual", "witness": result.to_json(mu)}
    return {"status": "non-contextual", "assignment": result.to_json()}


@cli.command()
@matrix_option
@json_command
def classify(matrix_path):
    """Decide contextuality over Z_2 with a certificate."""
    mu = load_matrix(matrix_path)
    return classify_z2(mu).to_json(mu)


@cli.command()
@matrix_option
@click.option("--format", "fmt", type=click.Choice(["json", "dot"]), default="json")
@json_command
def graph(matrix_path, fmt):
    """Compatibility graph of the non-central elements of C(mu)."""
    mu = load_matrix(matrix_path)
    g = compatibility_graph(mu)
    if fmt == "dot":
        return to_dot(g)
    position = {v: i for i, v in enumerate(g.vertices)}
    edges = sorted(sorted((position[u], position[v])) for u, v in g.graph.edges())
    pattern = find_pattern(g)
    return {
        "vertices": [format_normal_form(to_normal_form(v), mu) for v in g.vertices],
        "edges": edges,
        "cluster": is_cluster_graph(g),
        "pattern": pattern.kind.value if pattern else None,
    }


# --- NORMAL FORMS ---

@cli.command()
@matrix_option
@click.option("--standard", is_flag=True, help="Stop at the tridiagonal standard form.")
@click.option("--emit-basis", is_flag=True, help="Include the base change U.")
@json_command
def darboux(matrix_path, standard, emit_basis):
    """Cogredient reduction of mu."""
    mu = load_matrix(matrix_path)
    reduced = standard_form(mu) if standard else darboux_form(mu)
    out = {"form": "standard" if standard else "darboux", "result": matrix_to_json(reduced.result)}
    if emit_basis:
        out["basis"] = reduced.basis.tolist()
    return out


@cli.command()
@matrix_option
@click.option("--reduce", "reduce_first", is_flag=True, help="Bring mu to Darboux form first.")
@click.option("--emit-basis", is_flag=True, help="Include the base change U when reducing.")
@json_command
def decide(matrix_path, reduce_first, emit_basis):
    """Relative-parity decision for a matrix in Darboux form."""
    mu = load_matrix(matrix_path)
    reduced = None
    if reduce_first:
        reduced = darboux_form(mu)
        logger.warning("⚠ %s", REDUCTION_WARNING)
        mu = reduced.result
    out = decide_darboux(mu).to_json(mu)
    if reduced is not None:
        out["warning"] = REDUCTION_WARNING
        out["reduced"] = matrix_to_json(reduced.result)
        if emit_basis:
            out["basis"] = reduced.basis.tolist()
    return out


# --- REPRESENTATION ---

@cli.command("represent")
@matrix_option
@click.option("--element", default="", help="Word naming the group element.")
@click.option("--dense", is_flag=True, help="Include the dense matrix as [re, im] pairs.")
@json_command
def represent_cmd(matrix_path, element, dense):
    """Weyl operator of a group element."""
    mu = load_matrix(matrix_path)
    g = evaluate(parse_word(element, mu), GroupContext(mu))
    op = represent(g)
    out = op.to_json()
    if dense:
        out["dense"] = dense_to_json(to_dense(op))
    return out


def main(argv=None):
    try:
        rv = cli.main(args=argv, prog_name="commutation", standalone_mode=False)
    except click.ClickException as e:
        emit({"error": "usage", "detail": e.format_message()})
        return EXIT_INVALID
    except click.Abort:
        return EXIT_INVALID
    return rv if isinstance(rv, int) else EXIT_ANSWERED


if __name__ == '__main__':
    sys.exit(main())
