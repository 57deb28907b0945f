"""Observation classes, beliefs and belief update."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .arena import SYS
from .game import ProductGame

__all__ = [
    "ContradictionError",
    "ObservationModel",
    "observation_model",
    "obs",
    "initial_belief",
    "update_system",
    "update_env",
    "alpha_oracle",
    "ENV_ACTION",
]

ENV_ACTION = "-"


class ContradictionError(RuntimeError):
    """An observation is inconsistent with the current belief."""


@dataclass
class ObservationModel:
    class_of: list  # state -> class id
    classes: list  # class id -> frozenset of states

    @classmethod
    def from_labels(cls, labels: Sequence) -> "ObservationModel":
        """Group states carrying equal (hashable) observation labels."""
        ids: dict = {}
        class_of = []
        members: list = []
        for q, lab in enumerate(labels):
            c = ids.get(lab)
            if c is None:
                c = ids[lab] = len(members)
                members.append([])
            members[c].append(q)
            class_of.append(c)
        return cls(class_of, [frozenset(m) for m in members])


def observation_model(g: ProductGame) -> ObservationModel:
    """States are equivalent iff they observe the same predicates with equal values."""
    labels = []
    for q in range(len(g.owner)):
        mask = g.observable_preds(q)
        val = g.valuation(q)
        labels.append((mask, tuple(val[i] for i in sorted(mask))))
    return ObservationModel.from_labels(labels)


def obs(om: ObservationModel, q: int) -> int:
    return om.class_of[q]


def initial_belief(g: ProductGame, om: ObservationModel) -> frozenset:
    """Candidate initial states the system cannot tell apart from ``q0``."""
    c = om.class_of[g.q0]
    return frozenset(q for q in g.initial if om.class_of[q] == c)


def update_system(g: ProductGame, om: ObservationModel, belief, a: int, o: int) -> frozenset:
    cls = om.classes[o]
    out = set()
    for q in belief:
        t = g.succ[q].get(a)
        if t is not None and t in cls:
            out.add(t)
    if not out:
        raise ContradictionError(f"no state of the belief reaches observation {o} under action {a}")
    return frozenset(out)


def update_env(g: ProductGame, om: ObservationModel, belief, o: int) -> frozenset:
    cls = om.classes[o]
    out = set()
    for q in belief:
        for t in g.succ[q].values():
            if t in cls:
                out.add(t)
    if not out:
        raise ContradictionError(f"no environment move from the belief yields observation {o}")
    return frozenset(out)


def _obs_action(g: ProductGame, a: int):
    return a if g.action_owner[a] == SYS else ENV_ACTION


def alpha_oracle(g: ProductGame, om: ObservationModel, prefix: Sequence) -> frozenset:
    """Belief by definition: last states of every prefix with the same observations.

    ``prefix`` alternates states and actions, ``[q0, a0, q1, ..., qn]``.
    Every candidate prefix is enumerated explicitly, so the cost is
    exponential in the length; meant for cross-checking only.
    """
    if len(prefix) % 2 != 1:
        raise ValueError("a prefix must start and end with a state")
    target = [om.class_of[prefix[0]]]
    for i in range(1, len(prefix), 2):
        target.append(_obs_action(g, prefix[i]))
        target.append(om.class_of[prefix[i + 1]])
    paths = [[q] for q in g.initial if om.class_of[q] == target[0]]
    for i in range(1, len(target), 2):
        want_act, want_cls = target[i], target[i + 1]
        extended = []
        for path in paths:
            for a, t in sorted(g.succ[path[-1]].items()):
                if _obs_action(g, a) == want_act and om.class_of[t] == want_cls:
                    extended.append(path + [a, t])
        paths = extended
    return frozenset(p[-1] for p in paths)
