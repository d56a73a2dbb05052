"""Teacher construction from a chronological set of student snapshots."""

from dataclasses import dataclass
from functools import reduce

from .core import ema_update, weight_average
from .exceptions import InvalidInputError

DEFAULT_EMA_ALPHA = 0.99


@dataclass(frozen=True)
class StudentEnsemble:
    spec: object
    students: tuple

    def __post_init__(self):
        students = tuple(self.students)
        if not students:
            raise InvalidInputError("a student ensemble needs at least one model")
        if any(s.spec != self.spec for s in students):
            raise InvalidInputError("all students must share the ensemble spec")
        object.__setattr__(self, "students", students)

    @classmethod
    def from_snapshots(cls, snapshots):
        if not len(snapshots):
            raise InvalidInputError("snapshot set is empty")
        return cls(snapshots.students[0].spec, snapshots.students)

    def __len__(self):
        return len(self.students)


@dataclass(frozen=True)
class Teacher:
    model: object
    construction: str
    alpha: float = None


def build_teacher_ewa(ensemble):
    """Teacher whose weights are the plain mean of the student weights."""
    if not len(ensemble.students):
        raise InvalidInputError("empty ensemble")
    w = weight_average([s.weights for s in ensemble.students])
    return Teacher(ensemble.students[0].with_weights(w), "ewa")


def build_teacher_ema(ensemble, alpha=DEFAULT_EMA_ALPHA):
    """Fold an exponential moving average over students in order.

    Starts from the first student; ``alpha`` weights the running average.
    """
    if not 0.0 <= alpha <= 1.0:
        raise InvalidInputError(f"alpha must lie in [0, 1], got {alpha}")
    if not len(ensemble.students):
        raise InvalidInputError("empty ensemble")
    ws = [s.weights for s in ensemble.students]
    w = reduce(lambda prev, new: ema_update(prev, new, alpha), ws[1:], ws[0])
    return Teacher(ensemble.students[0].with_weights(w), "ema", float(alpha))


def build_teacher(ensemble, construction="ewa", alpha=DEFAULT_EMA_ALPHA):
    if construction == "ewa":
        return build_teacher_ewa(ensemble)
    if construction == "ema":
        return build_teacher_ema(ensemble, alpha)
    raise InvalidInputError(f"unknown teacher construction {construction!r}")
