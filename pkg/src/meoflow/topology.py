"""Per-slot capacity graph: feeder links, ring ISLs, serving-GS policy.

A slot graph holds the feeder-link capacity of every visible
satellite/station pair (rain already applied), the ISL capacity of every
ring-neighbor pair, and the bookkeeping the allocator needs: which
station each satellite downloads to under the active policy, which
stations are reachable through one ISL hop, and which satellites are
isolated (no feeder link and no neighbor with one) this slot.

Policies:
    best-capacity: each satellite keeps only its highest-capacity feeder
        link (ties broken toward the lowest station index); all other
        feeder edges are masked to zero.  This models one steerable
        gateway antenna per satellite.
    lp-fractional: every visible feeder edge stays; the optimizer may
        split a satellite's download across stations.

Ring neighbors are assumed mutually visible; line-of-sight occlusion
between satellites is not modeled.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Mapping, Optional, Sequence

import numpy as np

from .channel import (
    FeederLinkParams,
    IslParams,
    RainModelParams,
    fl_capacity_bps,
    isl_capacity_bps,
)
from .geometry import SlotGeometry, ring_neighbors

POLICY_BEST_CAPACITY = "best-capacity"
POLICY_LP_FRACTIONAL = "lp-fractional"
POLICIES = (POLICY_BEST_CAPACITY, POLICY_LP_FRACTIONAL)


@dataclass(frozen=True)
class SlotGraph:
    """Capacities and adjacency for one time slot.

    fl_capacity_bps: (K, I), zero where invisible or masked by policy.
    isl_capacity_bps: (K, K), zero off the ring or when ISLs are disabled.
    neighbors: ring adjacency per satellite.
    serving_gs: chosen station per satellite (None when the policy keeps
        all edges, or the satellite sees nothing).
    reachable_gs: stations reachable through exactly one ISL hop,
        destination for relayed traffic.
    isolated: satellites with no feeder link and no usable neighbor path.
    """

    slot_index: int
    fl_capacity_bps: np.ndarray
    isl_capacity_bps: np.ndarray
    neighbors: tuple[tuple[int, ...], ...]
    serving_gs: tuple[Optional[int], ...]
    reachable_gs: tuple[tuple[int, ...], ...]
    isolated: tuple[int, ...]

    @property
    def satellite_count(self) -> int:
        return self.fl_capacity_bps.shape[0]

    @property
    def station_count(self) -> int:
        return self.fl_capacity_bps.shape[1]


def _derive_reachability(fl, isl, neighbors):
    k = fl.shape[0]
    reachable = []
    isolated = []
    for s in range(k):
        via = sorted(
            {
                j
                for n in neighbors[s]
                if isl[s, n] > 0.0
                for j in np.nonzero(fl[n] > 0.0)[0]
            }
        )
        reachable.append(tuple(int(j) for j in via))
        if not np.any(fl[s] > 0.0) and not via:
            isolated.append(s)
    return tuple(reachable), tuple(isolated)


def select_serving_gs(graph: SlotGraph, policy: str = POLICY_BEST_CAPACITY) -> SlotGraph:
    """Apply the serving-station policy, re-deriving reachability.

    best-capacity masks every non-serving feeder edge to zero;
    lp-fractional returns the graph with serving_gs cleared.
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}")
    if policy == POLICY_LP_FRACTIONAL:
        reachable, isolated = _derive_reachability(graph.fl_capacity_bps, graph.isl_capacity_bps, graph.neighbors)
        return replace(graph, serving_gs=(None,) * graph.satellite_count, reachable_gs=reachable, isolated=isolated)

    fl = graph.fl_capacity_bps.copy()
    serving: list[Optional[int]] = []
    for k in range(graph.satellite_count):
        row = fl[k]
        if not np.any(row > 0.0):
            serving.append(None)
            continue
        best = int(np.argmax(row))  # argmax takes the lowest index on ties
        serving.append(best)
        keep = row[best]
        row[:] = 0.0
        row[best] = keep
    reachable, isolated = _derive_reachability(fl, graph.isl_capacity_bps, graph.neighbors)
    return replace(graph, fl_capacity_bps=fl, serving_gs=tuple(serving), reachable_gs=reachable, isolated=isolated)


def build_slot_graph(
    geometry: SlotGeometry,
    fl_params: FeederLinkParams,
    isl_params: IslParams,
    rain_model: RainModelParams,
    rain_rates_mm_h: Optional[Sequence[float]] = None,
    gs_altitudes_km: Optional[Sequence[float]] = None,
    policy: str = POLICY_BEST_CAPACITY,
    isl_enabled: bool = True,
) -> SlotGraph:
    """Capacity graph for one slot.

    rain_rates_mm_h gives the rain rate over each station for this slot
    (0 = clear); gs_altitudes_km thins the rain layer per site.  With
    isl_enabled=False all ISL capacities are forced to zero, which is the
    no-ISL baseline arm.
    """
    k, i = geometry.distances_fl_km.shape
    rates = np.zeros(i) if rain_rates_mm_h is None else np.asarray(rain_rates_mm_h, dtype=float)
    alts = np.zeros(i) if gs_altitudes_km is None else np.asarray(gs_altitudes_km, dtype=float)
    if rates.shape != (i,) or alts.shape != (i,):
        raise ValueError("per-station arrays must have one entry per station")

    fl = np.zeros((k, i))
    for s in range(k):
        for j in range(i):
            if not geometry.visible[s, j]:
                continue
            fl[s, j] = fl_capacity_bps(
                float(geometry.distances_fl_km[s, j]),
                float(geometry.elevations_deg[s, j]),
                float(rates[j]),
                fl_params,
                rain_model,
                gs_altitude_km=float(alts[j]),
            )

    neighbors = ring_neighbors(k)
    isl = np.zeros((k, k))
    if isl_enabled:
        for s in range(k):
            for n in neighbors[s]:
                isl[s, n] = isl_capacity_bps(float(geometry.distances_isl_km[s, n]), isl_params)

    graph = SlotGraph(
        slot_index=geometry.slot_index,
        fl_capacity_bps=fl,
        isl_capacity_bps=isl,
        neighbors=neighbors,
        serving_gs=(None,) * k,
        reachable_gs=((),) * k,
        isolated=(),
    )
    return select_serving_gs(graph, policy)
