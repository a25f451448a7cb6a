//! Flood propagation engines: pure, probabilistic, and relay-restricted
//! rebroadcasting over one sampled snapshot.
//!
//! Propagation is a synchronous-rounds walk over the directed link graph.
//! The source transmits at hop 0; a node that first receives a copy at hop
//! h may retransmit exactly once, at hop h (its copy then arrives at hop
//! h+1). Who retransmits is the only difference between the engines. All
//! frontiers are handled as sets, so outcomes are independent of iteration
//! order, and the only randomness (the forwarding coins of the
//! probabilistic engine) is drawn up front, one coin per node per flood.

use rand::Rng;

use crate::error::SimError;
use crate::geometry::NetworkSnapshot;
use crate::mpr::RelayAssignment;

/// Hop value marking a node no copy ever reached.
pub const UNREACHED: u16 = u16::MAX;

/// Result of one flood. `rx`/`tx` are sorted and exclude the source; `hops`
/// is indexed by node id (0 for the source, `UNREACHED` where no copy
/// arrived).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FloodOutcome {
    pub source: u32,
    pub rx: Vec<u32>,
    pub tx: Vec<u32>,
    pub hops: Vec<u16>,
}

impl FloodOutcome {
    pub fn rx_count(&self) -> usize {
        self.rx.len()
    }

    pub fn tx_count(&self) -> usize {
        self.tx.len()
    }
}

/// One delivered copy: `tx` transmitted at hop `hop - 1`, `rx` heard it at
/// hop `hop`. Late copies (to nodes that already received earlier) are
/// included; they are what the relay rule ignores.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceEvent {
    pub hop: u16,
    pub tx: u32,
    pub rx: u32,
}

enum Policy<'a> {
    /// Every receiver retransmits.
    All,
    /// Receiver v retransmits iff its pre-drawn coin says so.
    Coin(&'a [bool]),
    /// Receiver v retransmits iff at least one transmitter it first heard
    /// from selected v as a relay.
    Relay(&'a RelayAssignment),
}

fn propagate(
    snapshot: &NetworkSnapshot,
    source: u32,
    policy: Policy<'_>,
    mut trace: Option<&mut Vec<TraceEvent>>,
) -> FloodOutcome {
    let n = snapshot.node_count();
    assert!((source as usize) < n, "source id out of range");

    let mut hops = vec![UNREACHED; n];
    hops[source as usize] = 0;
    let mut forwards = vec![false; n];
    // Transmitters of the current round; the source always transmits.
    let mut frontier: Vec<u32> = vec![source];
    let mut hop: u16 = 0;

    while !frontier.is_empty() {
        let next_hop = hop + 1;
        let mut fresh: Vec<u32> = Vec::new();
        for &u in &frontier {
            for &v in &snapshot.out[u as usize] {
                if let Some(events) = trace.as_deref_mut() {
                    events.push(TraceEvent {
                        hop: next_hop,
                        tx: u,
                        rx: v,
                    });
                }
                if hops[v as usize] == UNREACHED {
                    hops[v as usize] = next_hop;
                    fresh.push(v);
                }
                // Only first-reception-hop copies can trigger forwarding;
                // the source (hop 0) never re-forwards.
                if hops[v as usize] == next_hop {
                    match policy {
                        Policy::All => forwards[v as usize] = true,
                        Policy::Coin(coins) => forwards[v as usize] = coins[v as usize],
                        Policy::Relay(assignment) => {
                            if assignment.relay_sets[u as usize]
                                .relays
                                .binary_search(&v)
                                .is_ok()
                            {
                                forwards[v as usize] = true;
                            }
                        }
                    }
                }
            }
        }
        // Sorted frontiers make trace output canonical; outcomes do not
        // depend on the order either way.
        fresh.sort_unstable();
        frontier = fresh
            .into_iter()
            .filter(|&v| forwards[v as usize])
            .collect();
        hop = next_hop;
    }

    let mut rx = Vec::new();
    let mut tx = Vec::new();
    for v in 0..n as u32 {
        if v == source {
            continue;
        }
        if hops[v as usize] != UNREACHED {
            rx.push(v);
            if forwards[v as usize] {
                tx.push(v);
            }
        }
    }
    FloodOutcome {
        source,
        rx,
        tx,
        hops,
    }
}

/// Pure flooding: every node rebroadcasts once upon first reception.
pub fn flood_pure(snapshot: &NetworkSnapshot, source: u32) -> FloodOutcome {
    propagate(snapshot, source, Policy::All, None)
}

pub fn flood_pure_traced(
    snapshot: &NetworkSnapshot,
    source: u32,
    events: &mut Vec<TraceEvent>,
) -> FloodOutcome {
    propagate(snapshot, source, Policy::All, Some(events))
}

/// Probabilistic flooding: upon first reception a node rebroadcasts with
/// probability `p_r`. One coin per node is drawn up front (in node order),
/// so the outcome is a pure function of the stream. `p_r = 1` reproduces
/// `flood_pure` exactly and `p_r = 0` never forwards; the source transmits
/// regardless.
pub fn flood_probabilistic(
    snapshot: &NetworkSnapshot,
    source: u32,
    p_r: f64,
    rng: &mut impl Rng,
) -> FloodOutcome {
    let coins: Vec<bool> = (0..snapshot.node_count())
        .map(|_| rng.gen::<f64>() < p_r)
        .collect();
    propagate(snapshot, source, Policy::Coin(&coins), None)
}

pub fn flood_probabilistic_traced(
    snapshot: &NetworkSnapshot,
    source: u32,
    p_r: f64,
    rng: &mut impl Rng,
    events: &mut Vec<TraceEvent>,
) -> FloodOutcome {
    let coins: Vec<bool> = (0..snapshot.node_count())
        .map(|_| rng.gen::<f64>() < p_r)
        .collect();
    propagate(snapshot, source, Policy::Coin(&coins), Some(events))
}

/// Relay-restricted flooding: a node that first receives at hop h
/// retransmits iff at least one hop-(h-1) transmitter that reached it had
/// selected it as a relay. Rejects assignments built for a different node
/// set than the snapshot's.
pub fn flood_mpr(
    snapshot: &NetworkSnapshot,
    assignment: &RelayAssignment,
    source: u32,
) -> Result<FloodOutcome, SimError> {
    check_assignment(snapshot, assignment)?;
    Ok(propagate(snapshot, source, Policy::Relay(assignment), None))
}

pub fn flood_mpr_traced(
    snapshot: &NetworkSnapshot,
    assignment: &RelayAssignment,
    source: u32,
    events: &mut Vec<TraceEvent>,
) -> Result<FloodOutcome, SimError> {
    check_assignment(snapshot, assignment)?;
    Ok(propagate(
        snapshot,
        source,
        Policy::Relay(assignment),
        Some(events),
    ))
}

fn check_assignment(
    snapshot: &NetworkSnapshot,
    assignment: &RelayAssignment,
) -> Result<(), SimError> {
    if assignment.node_count() != snapshot.node_count() {
        return Err(SimError::AssignmentMismatch {
            assignment_nodes: assignment.node_count(),
            snapshot_nodes: snapshot.node_count(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_neighbor_tables, place_nodes, sample_links, NodePosition};
    use crate::mpr::{assign_relays, MprHeuristic};
    use crate::rng::{stream, Purpose};

    fn positions_at(coords: &[(f64, f64)]) -> Vec<NodePosition> {
        coords
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| NodePosition {
                node_id: i as u32,
                x,
                y,
            })
            .collect()
    }

    fn snapshot_of(coords: &[(f64, f64)], radius: f64) -> NetworkSnapshot {
        let pos = positions_at(coords);
        sample_links(
            &pos,
            radius,
            1.0,
            0,
            &mut stream(1, Purpose::DiscoveryLinks, 0, 0),
        )
    }

    #[test]
    fn isolated_source_floods_nothing() {
        let snap = snapshot_of(&[(0.0, 0.0), (500.0, 500.0)], 100.0);
        let out = flood_pure(&snap, 0);
        assert!(out.rx.is_empty() && out.tx.is_empty());
        assert_eq!(out.hops, vec![0, UNREACHED]);
    }

    #[test]
    fn star_center_flood_needs_no_relays() {
        // Four leaves around a center, leaves out of range of each other.
        // The center's two-hop set is empty, so its relay set is empty and
        // no leaf forwards.
        let star = [
            (0.0, 0.0),
            (140.0, 0.0),
            (-140.0, 0.0),
            (0.0, 140.0),
            (0.0, -140.0),
        ];
        let snap = snapshot_of(&star, 150.0);
        let tables = build_neighbor_tables(&snap);
        for leaf in 1..5 {
            assert_eq!(
                tables.two_hop[leaf].len(),
                3,
                "each leaf sees the other three leaves two hops away"
            );
        }
        assert!(tables.two_hop[0].is_empty());
        let assignment = assign_relays(&snap, &tables, MprHeuristic::Branching, 100);
        let out = flood_mpr(&snap, &assignment, 0).unwrap();
        assert_eq!(out.rx.len(), 4);
        assert!(out.tx.is_empty());
    }

    #[test]
    fn chain_relay_flood_forwards_only_the_middle() {
        let snap = snapshot_of(&[(0.0, 0.0), (150.0, 0.0), (300.0, 0.0)], 200.0);
        let tables = build_neighbor_tables(&snap);
        let assignment = assign_relays(&snap, &tables, MprHeuristic::Branching, 100);
        let out = flood_mpr(&snap, &assignment, 0).unwrap();
        assert_eq!(out.rx, vec![1, 2]);
        assert_eq!(out.tx, vec![1]);
        assert_eq!(out.hops, vec![0, 1, 2]);
    }

    #[test]
    fn pure_flood_transmits_from_every_receiver() {
        let pos = place_nodes(
            &crate::config::SimConfig {
                n: 50,
                ..Default::default()
            },
            &mut stream(5, Purpose::Placement, 0, 0),
        );
        let snap = sample_links(
            &pos,
            250.0,
            0.8,
            0,
            &mut stream(5, Purpose::TransmissionLinks, 0, 0),
        );
        let out = flood_pure(&snap, 7);
        assert_eq!(out.rx, out.tx);
    }

    #[test]
    fn probabilistic_coin_one_equals_pure() {
        let pos = place_nodes(
            &crate::config::SimConfig {
                n: 60,
                ..Default::default()
            },
            &mut stream(6, Purpose::Placement, 0, 0),
        );
        let snap = sample_links(
            &pos,
            220.0,
            0.7,
            0,
            &mut stream(6, Purpose::TransmissionLinks, 0, 0),
        );
        for source in [0u32, 13, 59] {
            let pure = flood_pure(&snap, source);
            let prob = flood_probabilistic(
                &snap,
                source,
                1.0,
                &mut stream(6, Purpose::ForwardCoins, 0, source as u64),
            );
            assert_eq!(pure, prob);
        }
    }

    #[test]
    fn probabilistic_coin_zero_reaches_only_direct_neighbors() {
        let pos = place_nodes(
            &crate::config::SimConfig {
                n: 60,
                ..Default::default()
            },
            &mut stream(8, Purpose::Placement, 0, 0),
        );
        let snap = sample_links(
            &pos,
            220.0,
            0.9,
            0,
            &mut stream(8, Purpose::TransmissionLinks, 0, 0),
        );
        let out = flood_probabilistic(&snap, 3, 0.0, &mut stream(8, Purpose::ForwardCoins, 0, 3));
        assert!(out.tx.is_empty());
        assert_eq!(out.rx, snap.out[3]);
    }

    #[test]
    fn two_hop_delivery_rate_matches_forwarding_probability() {
        // Chain s -> a -> b: b receives iff a's coin comes up. Over many
        // independently seeded floods the hit rate concentrates at p_r.
        let snap = snapshot_of(&[(0.0, 0.0), (150.0, 0.0), (300.0, 0.0)], 200.0);
        let trials = 10_000;
        let mut hits = 0;
        for t in 0..trials {
            let out =
                flood_probabilistic(&snap, 0, 0.8, &mut stream(99, Purpose::ForwardCoins, t, 0));
            if out.hops[2] != UNREACHED {
                hits += 1;
            }
        }
        let rate = hits as f64 / trials as f64;
        assert!((rate - 0.8).abs() <= 0.02, "rate={rate}");
    }

    #[test]
    fn mismatched_assignment_is_rejected() {
        let big = snapshot_of(&[(0.0, 0.0), (100.0, 0.0), (200.0, 0.0)], 150.0);
        let small = snapshot_of(&[(0.0, 0.0), (100.0, 0.0)], 150.0);
        let tables = build_neighbor_tables(&small);
        let assignment = assign_relays(&small, &tables, MprHeuristic::Greedy, 100);
        let err = flood_mpr(&big, &assignment, 0).unwrap_err();
        assert_eq!(
            err,
            SimError::AssignmentMismatch {
                assignment_nodes: 2,
                snapshot_nodes: 3
            }
        );
    }

    #[test]
    fn trace_records_every_delivery() {
        let snap = snapshot_of(&[(0.0, 0.0), (150.0, 0.0), (300.0, 0.0)], 200.0);
        let mut events = Vec::new();
        let out = flood_pure_traced(&snap, 0, &mut events);
        assert_eq!(out.rx, vec![1, 2]);
        // hop1: 0->1; hop2: 1->0 (late copy to the source's slot is a real
        // delivery), 1->2; hop3: 2->1 late copy.
        assert_eq!(
            events,
            vec![
                TraceEvent {
                    hop: 1,
                    tx: 0,
                    rx: 1
                },
                TraceEvent {
                    hop: 2,
                    tx: 1,
                    rx: 0
                },
                TraceEvent {
                    hop: 2,
                    tx: 1,
                    rx: 2
                },
                TraceEvent {
                    hop: 3,
                    tx: 2,
                    rx: 1
                },
            ]
        );
    }

    #[test]
    fn relay_flood_economy_and_containment() {
        for seed in 0..20u64 {
            let pos = place_nodes(
                &crate::config::SimConfig {
                    n: 80,
                    ..Default::default()
                },
                &mut stream(seed, Purpose::Placement, 0, 0),
            );
            let snap = sample_links(
                &pos,
                200.0,
                0.75,
                0,
                &mut stream(seed, Purpose::TransmissionLinks, 0, 0),
            );
            let tables = build_neighbor_tables(&snap);
            let assignment = assign_relays(&snap, &tables, MprHeuristic::Branching, 10_000);
            for source in [0u32, 40, 79] {
                let pure = flood_pure(&snap, source);
                let mpr = flood_mpr(&snap, &assignment, source).unwrap();
                assert!(mpr.tx.len() <= pure.tx.len());
                assert!(mpr.rx.iter().all(|v| pure.rx.contains(v)));
                assert!(mpr.tx.iter().all(|v| mpr.rx.contains(v)));
            }
        }
    }
}
