"""2D primitives: points, circle-circle intersection, collinearity.

Everything here is a pure function on plain floats, so the rest of the
package can call into it from any context without locking. Tolerances are
relative and deliberately tight (1e-9): noiseless runs must stay exact
while ordinary floating-point jitter is absorbed.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Union

# Relative tolerance for classifying tangent / coincident circles.
TANGENCY_RTOL = 1e-9

# Default relative tolerance for the collinearity predicate.
COLLINEAR_TOL = 1e-6


class Point(NamedTuple):
    """A 2D coordinate in meters."""

    x: float
    y: float


class CandidatePair(NamedTuple):
    """The (up to) two positions consistent with two range measurements.

    ``coincident`` is True for tangent circles, where both slots hold the
    single touching point.
    """

    p1: Point
    p2: Point
    coincident: bool = False


class _NoIntersection:
    __slots__ = ()

    def __repr__(self) -> str:
        return "NO_INTERSECTION"


class _InfiniteIntersection:
    __slots__ = ()

    def __repr__(self) -> str:
        return "INFINITE_INTERSECTION"


#: Circles are disjoint or nested: no position satisfies both ranges.
NO_INTERSECTION = _NoIntersection()

#: Circles coincide: every point on the circle satisfies both ranges.
INFINITE_INTERSECTION = _InfiniteIntersection()

CircleIntersection = Union[CandidatePair, _NoIntersection, _InfiniteIntersection]


def distance(a: Point, b: Point) -> float:
    """Euclidean distance between two points, in meters."""
    return math.hypot(a[0] - b[0], a[1] - b[1])


def circle_intersection(
    c1: Point, r1: float, c2: Point, r2: float
) -> CircleIntersection:
    """Intersect two circles.

    Returns a ``CandidatePair`` holding the two intersection points (a
    coincident pair for tangency), ``NO_INTERSECTION`` for disjoint or
    nested circles, or ``INFINITE_INTERSECTION`` when the circles coincide
    within tolerance. The first candidate is always the one on the left of
    the directed segment c1 -> c2, which makes the ordering deterministic.

    Both non-pair results are ordinary values, not errors: callers treat
    them as "this node cannot be placed from these two ranges".
    """
    if r1 <= 0 or r2 <= 0:
        raise ValueError(f"circle radii must be positive, got {r1} and {r2}")
    tol = TANGENCY_RTOL * max(r1, r2)
    dx = c2[0] - c1[0]
    dy = c2[1] - c1[1]
    d = math.hypot(dx, dy)

    if d <= tol:
        if abs(r1 - r2) <= tol:
            return INFINITE_INTERSECTION
        return NO_INTERSECTION  # concentric, different radii

    if abs(d - (r1 + r2)) <= tol:
        # External tangency: the touching point sits between the centers.
        t = r1 / d
        p = Point(c1[0] + t * dx, c1[1] + t * dy)
        return CandidatePair(p, p, coincident=True)

    if abs(d - abs(r1 - r2)) <= tol:
        # Internal tangency: on the far side of the smaller circle.
        t = r1 / d if r1 >= r2 else -r1 / d
        p = Point(c1[0] + t * dx, c1[1] + t * dy)
        return CandidatePair(p, p, coincident=True)

    if d > r1 + r2 or d < abs(r1 - r2):
        return NO_INTERSECTION

    # Transversal case: foot of the radical axis plus symmetric offsets.
    a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d)
    h_sq = r1 * r1 - a * a
    h = math.sqrt(h_sq) if h_sq > 0.0 else 0.0
    ux, uy = dx / d, dy / d
    bx, by = c1[0] + a * ux, c1[1] + a * uy
    # Left normal of c1->c2 gives p1 a positive cross product.
    p1 = Point(bx - h * uy, by + h * ux)
    p2 = Point(bx + h * uy, by - h * ux)
    return CandidatePair(p1, p2, coincident=False)


def are_collinear(a: Point, b: Point, c: Point, tol: float = COLLINEAR_TOL) -> bool:
    """Whether three points are collinear within a relative tolerance.

    Compares twice the triangle area |cross(b-a, c-a)| against
    ``tol * max(1, longest pairwise distance)``, so the test behaves like a
    perpendicular-offset threshold of roughly ``tol`` meters at unit scale.
    """
    cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    scale = max(1.0, distance(a, b), distance(a, c), distance(b, c))
    return abs(cross) <= tol * scale
