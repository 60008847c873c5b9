import io
import logging
import os
import re
from dataclasses import dataclass
from typing import Dict, List, Optional, TextIO, Union

from ..graph.core import DirectedGraph

logger = logging.getLogger(__name__)

_TOKEN_SEPARATOR = re.compile(r'[\s,]+')


class EdgeListFormatError(ValueError):
    """a line of the edge list does not hold exactly two tokens"""

    def __init__(self, line_number: int, line: str, message: Optional[str] = None):
        self.line_number = line_number
        self.line = line
        if message is None:
            message = f'line {line_number}: expected two tokens "source target", got {line.strip()!r}'
        super().__init__(message)


@dataclass
class IngestionReport:
    arcs_read: int = 0
    arcs_kept: int = 0
    self_loops: int = 0
    duplicates: int = 0
    skipped_lines: int = 0  # comments and blank lines

    @property
    def dropped(self) -> int:
        return self.self_loops + self.duplicates


class EdgeListReader:
    """
    Read an influence network from a plain edge list.

    Each non-comment line holds `source target`, separated by whitespace or a comma
    (or by a custom delimiter), meaning an arc source -> target in the direction of
    influence. Raw citation dumps list citing -> cited; set reverse=True for those.
    Node ids are handed out in first-seen order, which keeps reloads identical.
    """

    def __init__(self,
                 delimiter: Optional[str] = None,
                 comment_prefix: str = '#',
                 reverse: bool = False):
        if delimiter is not None and not delimiter:
            raise ValueError('the delimiter cannot be an empty string')
        self.delimiter = delimiter
        self.comment_prefix = comment_prefix
        self.reverse = reverse
        self.report = IngestionReport()

    def _tokenize(self, line: str) -> List[str]:
        if self.delimiter is None:
            return [token for token in _TOKEN_SEPARATOR.split(line.strip()) if token]
        return [token.strip() for token in line.strip().split(self.delimiter)]

    def read(self, stream: TextIO) -> DirectedGraph:
        self.report = IngestionReport()
        ids: Dict[str, int] = {}
        seen_arcs = set()
        sources, targets = [], []

        for line_number, line in enumerate(stream, start=1):
            stripped = line.strip()
            if not stripped or (self.comment_prefix and stripped.startswith(self.comment_prefix)):
                self.report.skipped_lines += 1
                continue

            tokens = self._tokenize(stripped)
            if len(tokens) != 2 or not all(tokens):
                raise EdgeListFormatError(line_number, line)

            source, target = tokens
            if self.reverse:
                source, target = target, source
            for label in (source, target):
                if label not in ids:
                    ids[label] = len(ids)
            self.report.arcs_read += 1

            if source == target:
                self.report.self_loops += 1
                continue
            arc = (ids[source], ids[target])
            if arc in seen_arcs:
                self.report.duplicates += 1
                continue
            seen_arcs.add(arc)
            sources.append(arc[0])
            targets.append(arc[1])

        if not ids:
            raise ValueError('the edge list does not contain any arcs')

        self.report.arcs_kept = len(sources)
        if self.report.dropped:
            logger.warning(f'dropped {self.report.self_loops} self-loop(s) and '
                           f'{self.report.duplicates} duplicate arc(s) while reading the edge list')
        logger.info(f'read {len(ids)} nodes and {len(sources)} arcs '
                    f'({self.report.skipped_lines} comment or blank line(s) skipped)')
        return DirectedGraph(list(ids), sources, targets)

    def read_path(self, path: Union[str, os.PathLike]) -> DirectedGraph:
        with open(path, encoding='utf-8') as handle:
            return self.read(handle)


def load_edge_list(source: Union[str, os.PathLike, TextIO],
                   delimiter: Optional[str] = None,
                   comment_prefix: str = '#',
                   reverse: bool = False) -> DirectedGraph:
    """
    the source can be a path or an open text stream
    >>> g = load_edge_list(io.StringIO('a b\\na b\\na a\\n'))
    >>> g.n, g.m
    (2, 1)
    """
    reader = EdgeListReader(delimiter=delimiter, comment_prefix=comment_prefix, reverse=reverse)
    if isinstance(source, (str, os.PathLike)):
        return reader.read_path(source)
    return reader.read(source)


def write_edge_list(graph: DirectedGraph, stream: TextIO, delimiter: str = ' ') -> None:
    """write the arcs as `source target` lines in influence direction, sorted by node id"""
    sources, targets = graph.arcs()
    for source, target in zip(sources.tolist(), targets.tolist()):
        stream.write(f'{graph.label_of(source)}{delimiter}{graph.label_of(target)}\n')


def dumps_edge_list(graph: DirectedGraph) -> str:
    buffer = io.StringIO()
    write_edge_list(graph, buffer)
    return buffer.getvalue()
