"""Prediction tasks: which nodes, which root type, which target property."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .namespaces import EVENT, GENRE, MOVIE

OTHER = "Other"


@dataclass(frozen=True)
class Task:
    name: str
    root_type: str
    target_property: Optional[str] = None
    genre: Optional[str] = None

    @property
    def is_genre(self) -> bool:
        return self.genre is not None

    @property
    def excluded_predicates(self) -> frozenset:
        return frozenset([self.target_property]) if self.target_property else frozenset()


EVENTS = Task("events", EVENT)


def genre_task(genre: str) -> Task:
    return Task(f"genre:{genre}", MOVIE, GENRE, genre)


def parse_task(name: str) -> Task:
    if name == "events":
        return EVENTS
    if name.startswith("genre:") and len(name) > 6:
        return genre_task(name[6:])
    if name == "movies":
        return Task("movies", MOVIE, GENRE)
    raise ValueError(f"unknown task {name!r}; expected 'events' or 'genre:<name>'")
