import pytest

from markup_infer.ingest.nodes import assemble_nodes
from markup_infer.ingest.nquads import read_nquads
from markup_infer.vocab import load_vocabulary

PAGE = "https://gdssummits.com/nghealthcare/us/"
SUMMIT_NODE = "_:node3957c770b4f7c0bd1a17805dd8ca406"

SUMMIT_NODE_QUADS = f"""\
{SUMMIT_NODE} <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://schema.org/BusinessEvent> <{PAGE}> .
{SUMMIT_NODE} <http://schema.org/Event/name> "NG Healthcare Summit US"@en <{PAGE}> .
{SUMMIT_NODE} <http://schema.org/Event/location> "Omni Barton Creek Resort & Spa, Austin, Texas"@en <{PAGE}> .
"""

SUMMIT_PAGE_QUADS = f"""\
_:nodea9ff152514bcfb63c2714bc1336b2b3 <http://schema.org/Organization/url> <http://www.gdsinternational.com> <{PAGE}> .
_:node4ccbf7f34c95f14168f5fdb47b73ab <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://schema.org/BusinessEvent> <{PAGE}> .
"""


@pytest.fixture(scope="session")
def vocab():
    return load_vocabulary()


@pytest.fixture
def example_page():
    """(node of the first example, all nodes on its page)."""
    quads, report = read_nquads((SUMMIT_NODE_QUADS + SUMMIT_PAGE_QUADS).encode())
    assert report.skipped == 0
    nodes = assemble_nodes(quads)
    node = next(n for n in nodes if n.subject == SUMMIT_NODE)
    return node, nodes


def synthetic_dataset(spec, vocab):
    """Generate, cleanse and label a synthetic corpus."""
    from markup_infer.cleansing import cleanse_quads
    from markup_infer.dataset import build_event_dataset
    from markup_infer.synthetic import generate_synthetic_corpus

    quads, gold = generate_synthetic_corpus(spec)
    nodes = assemble_nodes(cleanse_quads(quads, vocab, "drop")[0])
    return build_event_dataset(nodes, vocab, head_classes=list(spec.classes)), gold


def flatten(by_class):
    return [i for c in sorted(by_class) for i in by_class[c]]


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
