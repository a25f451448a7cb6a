//! A deterministic 7x7 lattice scenario, used as a worked example on the
//! command line and as a known-answer fixture in tests.
//!
//! Nodes sit on integer coordinates with unit spacing; the radius 1.5
//! links each node to its eight surrounding neighbors (1 and sqrt(2) are
//! in range, 2 is not). Links are sampled at `p_c = 1`, so the scenario is
//! exactly reproducible and every quantity below has a single correct
//! value.

use std::fmt::Write as _;

use crate::flood::{flood_mpr, flood_pure, FloodOutcome};
use crate::geometry::{build_neighbor_tables, sample_links, NetworkSnapshot, NodePosition};
use crate::mpr::{
    assign_relays, brute_force_min_cover, mandatory_relays, CoverInstance, MprHeuristic, RelaySet,
};
use crate::rng::{stream, Purpose};

pub const GRID_SIDE: u32 = 7;
pub const GRID_RADIUS: f64 = 1.5;
pub const GRID_CENTER: u32 = 24;

/// 49 nodes at (col, row) for id = row * 7 + col.
pub fn grid_positions() -> Vec<NodePosition> {
    let mut positions = Vec::with_capacity((GRID_SIDE * GRID_SIDE) as usize);
    for row in 0..GRID_SIDE {
        for col in 0..GRID_SIDE {
            positions.push(NodePosition {
                node_id: row * GRID_SIDE + col,
                x: f64::from(col),
                y: f64::from(row),
            });
        }
    }
    positions
}

/// Everything the fixture computes for the center node and its flood.
#[derive(Clone, Debug)]
pub struct GridFixtureReport {
    pub snapshot: NetworkSnapshot,
    pub one_hop: Vec<u32>,
    pub two_hop: Vec<u32>,
    pub mandatory: Vec<u32>,
    pub greedy: RelaySet,
    pub branching: RelaySet,
    pub brute: Vec<u32>,
    pub pure_flood: FloodOutcome,
    pub relay_flood: FloodOutcome,
    /// Transmitters first reached within two hops of the source; the
    /// transmissions spent covering the source's own neighborhood.
    pub pure_tx_within_two_hops: usize,
    pub relay_tx_within_two_hops: usize,
}

pub fn run_grid_fixture() -> GridFixtureReport {
    let positions = grid_positions();
    // p_c = 1 draws nothing from the stream; the seed is irrelevant.
    let snapshot = sample_links(
        &positions,
        GRID_RADIUS,
        1.0,
        0,
        &mut stream(0, Purpose::DiscoveryLinks, 0, 0),
    );
    let tables = build_neighbor_tables(&snapshot);
    let instance = CoverInstance::from_tables(&snapshot, &tables, GRID_CENTER);
    let mandatory = mandatory_relays(&instance);
    let greedy = crate::mpr::greedy_mpr(&instance);
    let branching = crate::mpr::ompr_select(&instance, 10_000);
    let brute = brute_force_min_cover(&instance)
        .expect("8 candidates is within oracle range")
        .relays;

    let assignment = assign_relays(&snapshot, &tables, MprHeuristic::Branching, 10_000);
    let pure_flood = flood_pure(&snapshot, GRID_CENTER);
    let relay_flood =
        flood_mpr(&snapshot, &assignment, GRID_CENTER).expect("assignment built from snapshot");

    let within = |out: &FloodOutcome| {
        out.tx
            .iter()
            .filter(|&&v| out.hops[v as usize] <= 2)
            .count()
    };
    let pure_tx_within_two_hops = within(&pure_flood);
    let relay_tx_within_two_hops = within(&relay_flood);

    GridFixtureReport {
        snapshot,
        one_hop: tables.one_hop[GRID_CENTER as usize].clone(),
        two_hop: tables.two_hop[GRID_CENTER as usize].clone(),
        mandatory,
        greedy,
        branching,
        brute,
        pure_flood,
        relay_flood,
        pure_tx_within_two_hops,
        relay_tx_within_two_hops,
    }
}

impl GridFixtureReport {
    pub fn render(&self) -> String {
        let mut s = String::new();
        let ids = |v: &[u32]| {
            v.iter()
                .map(|id| id.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(
            s,
            "7x7 unit lattice, radius {GRID_RADIUS}, source node {GRID_CENTER} (center)"
        )
        .unwrap();
        writeln!(
            s,
            "one-hop neighbors ({}): {}",
            self.one_hop.len(),
            ids(&self.one_hop)
        )
        .unwrap();
        writeln!(
            s,
            "two-hop targets   ({}): {}",
            self.two_hop.len(),
            ids(&self.two_hop)
        )
        .unwrap();
        writeln!(
            s,
            "mandatory relays  ({}): {}",
            self.mandatory.len(),
            ids(&self.mandatory)
        )
        .unwrap();
        writeln!(
            s,
            "greedy relay set  ({}): {}",
            self.greedy.relays.len(),
            ids(&self.greedy.relays)
        )
        .unwrap();
        writeln!(
            s,
            "branching relay set ({}; sets explored: {}): {}",
            self.branching.relays.len(),
            self.branching.sets_explored,
            ids(&self.branching.relays)
        )
        .unwrap();
        writeln!(
            s,
            "exhaustive minimum ({}): {}",
            self.brute.len(),
            ids(&self.brute)
        )
        .unwrap();
        writeln!(
            s,
            "pure flood:  rx {} tx {} (tx within two hops {})",
            self.pure_flood.rx_count(),
            self.pure_flood.tx_count(),
            self.pure_tx_within_two_hops
        )
        .unwrap();
        writeln!(
            s,
            "relay flood: rx {} tx {} (tx within two hops {})",
            self.relay_flood.rx_count(),
            self.relay_flood.tx_count(),
            self.relay_tx_within_two_hops
        )
        .unwrap();
        s
    }
}
