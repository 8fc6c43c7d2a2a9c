from .domains import DomainParts, extract_pld_tld
from .nodes import CorpusStats, NodeRecord, Statement, assemble_nodes, pages, profile_corpus
from .nquads import ErrorPolicy, NQuadsSyntaxError, ParseReport, Quad, Term, parse_nquads, read_nquads

__all__ = [
    "CorpusStats", "DomainParts", "ErrorPolicy", "NQuadsSyntaxError", "NodeRecord",
    "ParseReport", "Quad", "Statement", "Term", "assemble_nodes", "extract_pld_tld",
    "pages", "parse_nquads", "profile_corpus", "read_nquads",
]
