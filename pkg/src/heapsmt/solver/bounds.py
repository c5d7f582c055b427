"""Enumeration bounds that are large enough to contain a model whenever one exists.

Heap sizes and addresses.  Every constraint on sizes and addresses is a
difference constraint x >= y + w, with w = 1 for strict order, validity and
allocation, w = i for nth address i, and w = 0 otherwise.  The least
solution gives each node the weight of the longest path from zero.  Only
the first edge out of zero can carry an nth weight, and every later edge
adds at most 1.  So no value exceeds max_nth + #nodes, where the nodes are
the address terms plus one size per free heap and per allocation.  Empty
heaps have size zero and writes keep the size, so neither adds a node.
Skolem addresses for heap disequalities count as address terms.

Objects.  Let S be the set of values denoted by object terms, including
reads, defObj and the two read-backs of each heap disequality.  Every other
value occurs only in heap cells.  Renaming all of those to one fresh value
preserves every literal.  Reads and object equalities see only S, and a heap
disequality keeps its own witness cell, whose two reads lie in S.  So
|S| + 1 values suffice, and |S| when no heap term occurs at all.
"""

from __future__ import annotations

from ..semantics import Bounds
from .fragment import AllocEq, Alternatives, Conjunction, Nth, Purified, purify


def _walk(cs):
    for c in cs:
        if isinstance(c, Alternatives):
            for b in c.branches:
                yield from _walk(b)
        else:
            yield c


def model_bound(conj: Conjunction | Purified) -> Bounds:
    p = conj if isinstance(conj, Purified) else purify(conj)
    flat = list(_walk(p.constraints))
    max_nth = max((c.index for c in flat if isinstance(c, Nth)), default=0)
    n_alloc = sum(1 for c in flat if isinstance(c, AllocEq))
    null_nodes = {c.a for c in flat if isinstance(c, Nth) and c.index == 0}
    n_addr = len([a for a in p.addrs if a not in null_nodes])
    n_free_heaps = len(p.heap_consts) + len(p.pair_consts)
    h = max_nth + n_addr + n_alloc + n_free_heaps
    objects = len(p.objs) + (1 if p.heaps else 0)
    return Bounds(heap_size=h, objects=max(objects, 1), address=h)
