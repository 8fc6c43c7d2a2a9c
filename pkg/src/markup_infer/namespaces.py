"""IRI constants shared across the package."""

SCHEMA = "http://schema.org/"
RDF_TYPE = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type"

EVENT = SCHEMA + "Event"
MOVIE = SCHEMA + "Movie"
GENRE = SCHEMA + "genre"
NAME = SCHEMA + "name"


def compact(iri: str) -> str:
    """Shorten schema.org and rdf:type IRIs to their ``s:`` / ``rdf:`` forms."""
    if iri == RDF_TYPE:
        return "rdf:type"
    if iri.startswith(SCHEMA):
        return "s:" + iri[len(SCHEMA):]
    return iri


def local_name(iri: str) -> str:
    return iri.rstrip("/").rsplit("/", 1)[-1].rsplit("#", 1)[-1]
