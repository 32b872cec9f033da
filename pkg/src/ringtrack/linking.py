"""Frame-to-frame cost graph construction and minimum-cost path extraction.

Edges connect objects in consecutive frames only, so the graph is a forward
DAG layered by frame index; shortest paths per source are computed with a
layer-ordered Dijkstra relaxation.
"""

from dataclasses import dataclass, field

import numpy as np

from .detection import DetectedObject
from .errors import NoDominantAngleError

ANGLE_BIN_DEG = 2.0
N_ANGLE_BINS = int(360.0 / ANGLE_BIN_DEG)
# below this dominant angle the ratio cost is near-singular; rotate by 90 deg
ROTATE_BELOW_DEG = 5.0


@dataclass(frozen=True)
class GraphWeights:
    """User-facing linking parameters.

    distance_weight / radius_weight / angle_weight scale the three edge cost
    terms; max_distance caps how far an object may travel between frames;
    objects with a diameter below min_diameter never enter the graph; paths
    shorter than min_track_length objects are not reported.
    """

    distance_weight: float = 1.0
    radius_weight: float = 1.0
    angle_weight: float = 2.0
    max_distance: float = 50.0
    min_diameter: float = 2.5
    min_track_length: int = 5

    def __post_init__(self):
        if self.distance_weight < 0 or self.radius_weight < 0 or self.angle_weight < 0:
            raise ValueError("cost weights must be nonnegative")
        if self.distance_weight == 0 and self.radius_weight == 0 and self.angle_weight == 0:
            raise ValueError("at least one cost weight must be positive")
        if self.max_distance <= 0:
            raise ValueError(f"max_distance must be positive, got {self.max_distance}")
        if self.min_track_length < 2:
            raise ValueError(f"min_track_length must be >= 2, got {self.min_track_length}")


@dataclass
class LinkEdge:
    """Candidate connection between objects in adjacent frames.

    src/dst are indices into the flattened object list (frame-major order).
    """

    src: int
    dst: int
    distance: float
    radius_dev: float
    angle_deg: float
    angle_cost: float = 0.0
    cost: float = 0.0


@dataclass(frozen=True)
class DominantAngle:
    """Mode of the distance-weighted displacement-angle histogram, mod 180."""

    angle_deg: float
    histogram: np.ndarray = field(repr=False)


def linkable(obj: DetectedObject, weights: GraphWeights) -> bool:
    return 2.0 * obj.radius >= weights.min_diameter


def flatten_objects(
    objects_by_frame: list[list[DetectedObject]],
) -> tuple[list[DetectedObject], np.ndarray]:
    """Flatten per-frame object lists; returns (objects, frame index array)."""
    flat = [obj for frame_objects in objects_by_frame for obj in frame_objects]
    frames = np.array([obj.frame for obj in flat], dtype=np.int64)
    return flat, frames


def build_edges(
    objects_by_frame: list[list[DetectedObject]],
    weights: GraphWeights,
) -> list[LinkEdge]:
    """All candidate links between consecutive frames within max_distance."""
    flat, _ = flatten_objects(objects_by_frame)
    offsets = np.cumsum([0] + [len(fr) for fr in objects_by_frame])
    edges: list[LinkEdge] = []
    for m in range(len(objects_by_frame) - 1):
        for i, src in enumerate(objects_by_frame[m]):
            if not linkable(src, weights):
                continue
            for j, dst in enumerate(objects_by_frame[m + 1]):
                if not linkable(dst, weights):
                    continue
                dx = dst.x - src.x
                dy = dst.y - src.y
                s = float(np.hypot(dx, dy))
                if s > weights.max_distance:
                    continue
                edges.append(
                    LinkEdge(
                        src=int(offsets[m] + i),
                        dst=int(offsets[m + 1] + j),
                        distance=s,
                        radius_dev=abs(src.radius / dst.radius - 1.0),
                        angle_deg=float(np.degrees(np.arctan2(dy, dx)) % 360.0),
                    )
                )
    return edges


def dominant_angle(edges: list[LinkEdge]) -> DominantAngle:
    """Most frequent displacement angle, weighted by edge length.

    Angles accumulate into 2-degree bins centered on even degrees; the
    winning bin center is reduced mod 180 (travel direction sign is unknown
    before linking). Ties go to the smaller bin center.
    """
    if not edges:
        raise NoDominantAngleError("cannot compute a dominant angle without edges")
    histogram = np.zeros(N_ANGLE_BINS, dtype=np.float64)
    for edge in edges:
        idx = int(round(edge.angle_deg / ANGLE_BIN_DEG)) % N_ANGLE_BINS
        histogram[idx] += edge.distance
    center = float(np.argmax(histogram)) * ANGLE_BIN_DEG
    return DominantAngle(angle_deg=center % 180.0, histogram=histogram)


def angle_deviation(angle_deg: float, dominant: DominantAngle) -> float:
    """|angle / dominant - 1| with both reduced mod 180.

    A dominant angle near zero would blow the ratio up, so both angles are
    rotated by 90 degrees in that regime before dividing.
    """
    phi = dominant.angle_deg
    folded = angle_deg % 180.0
    if phi < ROTATE_BELOW_DEG:
        folded = (folded + 90.0) % 180.0
        phi = phi + 90.0
    return abs(folded / phi - 1.0)


def edge_cost(edge: LinkEdge, dominant: DominantAngle | None, weights: GraphWeights) -> float:
    """Weighted sum of the distance, radius and angle terms.

    The distance term is normalized by max_distance so all three terms are
    dimensionless and the configured weights act as pure ratios.
    """
    cost = weights.distance_weight * (edge.distance / weights.max_distance)
    cost += weights.radius_weight * edge.radius_dev
    if weights.angle_weight > 0.0:
        if dominant is None:
            raise NoDominantAngleError("angle cost requested but no dominant angle given")
        edge.angle_cost = angle_deviation(edge.angle_deg, dominant)
        cost += weights.angle_weight * edge.angle_cost
    edge.cost = cost
    return cost


def apply_costs(
    edges: list[LinkEdge],
    dominant: DominantAngle | None,
    weights: GraphWeights,
) -> None:
    for edge in edges:
        edge_cost(edge, dominant, weights)


def link_dijkstra(
    objects_by_frame: list[list[DetectedObject]],
    edges: list[LinkEdge],
    weights: GraphWeights,
) -> list[list[DetectedObject]]:
    """Extract exclusive minimum-cost forward paths.

    Sources are taken in frame-major order (first frame first, then any
    object not already claimed by an earlier path). Per source, the cheapest
    path to the farthest reachable frame is claimed; cost ties prefer the
    lower cost at that frame, remaining ties the lexicographically smaller
    node index sequence. Claimed objects leave the pool immediately; claimed
    paths shorter than min_track_length are dropped from the output.
    """
    flat, frames = flatten_objects(objects_by_frame)
    n = len(flat)
    out_edges: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for edge in edges:
        out_edges[edge.src].append((edge.dst, edge.cost))
    for adj in out_edges:
        adj.sort()

    claimed = np.zeros(n, dtype=bool)
    paths: list[list[DetectedObject]] = []

    for source in range(n):
        if claimed[source] or not linkable(flat[source], weights):
            continue
        dist: dict[int, float] = {source: 0.0}
        best_path: dict[int, tuple[int, ...]] = {source: (source,)}
        # layer-ordered relaxation; node ids are frame-major so ascending id
        # order processes each frame before the next
        frontier = [source]
        reached = [source]
        while frontier:
            next_frontier: list[int] = []
            for u in frontier:
                du = dist[u]
                pu = best_path[u]
                for v, cost in out_edges[u]:
                    if claimed[v]:
                        continue
                    cand_dist = du + cost
                    cand_path = pu + (v,)
                    if v not in dist:
                        dist[v] = cand_dist
                        best_path[v] = cand_path
                        next_frontier.append(v)
                        reached.append(v)
                    elif cand_dist < dist[v] or (
                        cand_dist == dist[v] and cand_path < best_path[v]
                    ):
                        dist[v] = cand_dist
                        best_path[v] = cand_path
            frontier = next_frontier

        target = min(
            reached,
            key=lambda v: (-int(frames[v]), dist[v], best_path[v]),
        )
        chosen = best_path[target]
        for v in chosen:
            claimed[v] = True
        if len(chosen) >= weights.min_track_length:
            paths.append([flat[v] for v in chosen])
    return paths
