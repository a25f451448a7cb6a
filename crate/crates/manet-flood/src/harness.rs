//! Experiment driver: repeats route-discovery floods over a mobile
//! topology and aggregates reach and cost metrics per `p_c` grid point.
//!
//! Each run is a sequence of loops. Loop 0 uses the initial placement;
//! every later loop moves each node one mobility step. Within a loop, one
//! flood is launched from every node in turn and two ratios are recorded
//! per flood, both normalized by the `n - 1` potential receivers: the
//! fraction reached (RCH) and the fraction that retransmitted (RET). Loop
//! means are averaged across loops; spreads are sample standard
//! deviations over the per-loop means.
//!
//! Loops and sources are processed with rayon, but every reduction runs
//! serially in index order, so results are bitwise identical regardless
//! of thread count.

use rayon::prelude::*;

use crate::config::{Algorithm, RelayKnowledge, RunSetup, SimConfig};
use crate::error::SimError;
use crate::flood::{
    flood_mpr, flood_mpr_traced, flood_probabilistic, flood_probabilistic_traced, flood_pure,
    flood_pure_traced, FloodOutcome, TraceEvent,
};
use crate::geometry::{
    build_neighbor_tables, place_nodes, sample_links, step_mobility, NeighborTables,
    NetworkSnapshot, NodePosition,
};
use crate::mpr::{assign_relays, MprHeuristic, RelayAssignment};
use crate::rng::{stream, Purpose};

/// Time between topology refreshes: the span a node takes to cover three
/// quarters of its transmission radius.
pub fn pause_time(cfg: &SimConfig) -> Result<f64, SimError> {
    if cfg.speed == 0.0 {
        return Err(SimError::ZeroSpeed);
    }
    Ok(0.75 * cfg.radius / cfg.speed)
}

/// Number of loops: the explicit override if set, otherwise how many whole
/// pause intervals fit into the simulated time (at least one).
pub fn loop_count(cfg: &SimConfig) -> Result<u32, SimError> {
    if let Some(loops) = cfg.loops {
        return Ok(loops);
    }
    let tau = pause_time(cfg)?;
    Ok(((cfg.t_sim / tau).floor() as u32).max(1))
}

/// Node positions for every loop. Entry 0 is the initial placement; entry
/// l is entry l-1 advanced by one mobility step.
pub fn trajectory(cfg: &SimConfig, loops: u32) -> Vec<Vec<NodePosition>> {
    let mut per_loop = Vec::with_capacity(loops as usize);
    per_loop.push(place_nodes(
        cfg,
        &mut stream(cfg.master_seed, Purpose::Placement, 0, 0),
    ));
    for l in 1..loops {
        let next = step_mobility(
            per_loop.last().expect("loop 0 pushed above"),
            cfg,
            &mut stream(cfg.master_seed, Purpose::Mobility, u64::from(l), 0),
        );
        per_loop.push(next);
    }
    per_loop
}

/// The two link realizations a loop runs on. Under stale relay knowledge
/// they are independent draws at the same positions and `p_c`; under fresh
/// knowledge the discovery realization is reused for transmission.
pub fn loop_links(
    cfg: &SimConfig,
    positions: &[NodePosition],
    loop_index: u32,
) -> (NetworkSnapshot, NetworkSnapshot) {
    let discovery = sample_links(
        positions,
        cfg.radius,
        cfg.p_c,
        u64::from(loop_index),
        &mut stream(
            cfg.master_seed,
            Purpose::DiscoveryLinks,
            u64::from(loop_index),
            0,
        ),
    );
    let transmission = match cfg.relay_knowledge {
        RelayKnowledge::Fresh => discovery.clone(),
        RelayKnowledge::Stale => sample_links(
            positions,
            cfg.radius,
            cfg.p_c,
            u64::from(loop_index),
            &mut stream(
                cfg.master_seed,
                Purpose::TransmissionLinks,
                u64::from(loop_index),
                0,
            ),
        ),
    };
    (discovery, transmission)
}

fn heuristic_of(algorithm: Algorithm) -> Option<MprHeuristic> {
    match algorithm {
        Algorithm::Pure | Algorithm::Probabilistic => None,
        Algorithm::GreedyMpr => Some(MprHeuristic::Greedy),
        Algorithm::Ompr => Some(MprHeuristic::Branching),
    }
}

fn flood_from(
    cfg: &SimConfig,
    transmission: &NetworkSnapshot,
    assignment: Option<&RelayAssignment>,
    algorithm: Algorithm,
    loop_index: u32,
    source: u32,
) -> Result<FloodOutcome, SimError> {
    match algorithm {
        Algorithm::Pure => Ok(flood_pure(transmission, source)),
        Algorithm::Probabilistic => Ok(flood_probabilistic(
            transmission,
            source,
            cfg.p_r,
            &mut stream(
                cfg.master_seed,
                Purpose::ForwardCoins,
                u64::from(loop_index),
                u64::from(source),
            ),
        )),
        Algorithm::GreedyMpr | Algorithm::Ompr => flood_mpr(
            transmission,
            assignment.expect("relay algorithms build an assignment"),
            source,
        ),
    }
}

/// Per-loop aggregates: mean reach and retransmission ratios over all
/// sources, plus relay-selection effort counters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoopStats {
    pub rch: f64,
    pub ret: f64,
    pub relay_sets_explored: u64,
    pub cap_hits: u64,
}

/// Runs every source's flood for one loop and aggregates the ratios.
pub fn run_loop(
    cfg: &SimConfig,
    positions: &[NodePosition],
    algorithm: Algorithm,
    loop_index: u32,
) -> Result<LoopStats, SimError> {
    let n = positions.len();
    if n < 2 {
        return Err(SimError::TooFewNodes(n));
    }
    let (discovery, transmission) = loop_links(cfg, positions, loop_index);

    let (assignment, relay_sets_explored, cap_hits) = match heuristic_of(algorithm) {
        None => (None, 0, 0),
        Some(heuristic) => {
            let tables = build_neighbor_tables(&discovery);
            let assignment = assign_relays(&discovery, &tables, heuristic, cfg.branch_cap);
            let explored: u64 = assignment.relay_sets.iter().map(|r| r.sets_explored).sum();
            let caps = assignment.relay_sets.iter().filter(|r| r.cap_hit).count() as u64;
            (Some(assignment), explored, caps)
        }
    };

    let counts: Result<Vec<(usize, usize)>, SimError> = (0..n as u32)
        .into_par_iter()
        .map(|source| {
            let out = flood_from(
                cfg,
                &transmission,
                assignment.as_ref(),
                algorithm,
                loop_index,
                source,
            )?;
            Ok((out.rx_count(), out.tx_count()))
        })
        .collect();
    let counts = counts?;

    let per_node = (n - 1) as f64;
    let mut rx_sum = 0.0;
    let mut tx_sum = 0.0;
    for &(rx, tx) in &counts {
        rx_sum += rx as f64 / per_node;
        tx_sum += tx as f64 / per_node;
    }
    Ok(LoopStats {
        rch: rx_sum / n as f64,
        ret: tx_sum / n as f64,
        relay_sets_explored,
        cap_hits,
    })
}

/// One sweep cell: an algorithm at one `p_c`, aggregated over all loops.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub algorithm: Algorithm,
    pub p_c: f64,
    pub rch_mean: f64,
    pub rch_stddev: f64,
    pub ret_mean: f64,
    pub ret_stddev: f64,
    pub loops: u32,
    pub sources: u32,
    /// Mean relay sets explored per node per loop (0 for non-relay
    /// algorithms).
    pub avg_mpr_sets: f64,
    pub cap_hits: u64,
}

fn mean_and_stddev(values: &[f64]) -> (f64, f64) {
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0);
    (mean, var.sqrt())
}

/// Runs all loops of one cell. The trajectory is computed fresh here so a
/// cell is a pure function of its config.
pub fn run_cell(cfg: &SimConfig, algorithm: Algorithm) -> Result<SweepRow, SimError> {
    if cfg.n < 2 {
        return Err(SimError::TooFewNodes(cfg.n));
    }
    let loops = loop_count(cfg)?;
    let per_loop_positions = trajectory(cfg, loops);

    let stats: Result<Vec<LoopStats>, SimError> = per_loop_positions
        .par_iter()
        .enumerate()
        .map(|(l, positions)| run_loop(cfg, positions, algorithm, l as u32))
        .collect();
    let stats = stats?;

    let rch: Vec<f64> = stats.iter().map(|s| s.rch).collect();
    let ret: Vec<f64> = stats.iter().map(|s| s.ret).collect();
    let (rch_mean, rch_stddev) = mean_and_stddev(&rch);
    let (ret_mean, ret_stddev) = mean_and_stddev(&ret);
    let explored: u64 = stats.iter().map(|s| s.relay_sets_explored).sum();
    let cap_hits: u64 = stats.iter().map(|s| s.cap_hits).sum();

    Ok(SweepRow {
        algorithm,
        p_c: cfg.p_c,
        rch_mean,
        rch_stddev,
        ret_mean,
        ret_stddev,
        loops,
        sources: cfg.n as u32,
        avg_mpr_sets: explored as f64 / (f64::from(loops) * cfg.n as f64),
        cap_hits,
    })
}

/// A completed sweep: one row per (algorithm, grid point), algorithm-major
/// with `p_c` ascending within each algorithm.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub setup: RunSetup,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn row(&self, algorithm: Algorithm, p_c: f64) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.algorithm == algorithm && (r.p_c - p_c).abs() < 1e-12)
    }
}

pub fn run_sweep(setup: &RunSetup) -> Result<SweepResult, SimError> {
    let mut rows = Vec::with_capacity(setup.algorithms.len() * setup.p_c_grid.len());
    for &algorithm in &setup.algorithms {
        for &p_c in &setup.p_c_grid {
            let cfg = SimConfig {
                p_c,
                ..setup.config.clone()
            };
            rows.push(run_cell(&cfg, algorithm)?);
        }
    }
    Ok(SweepResult {
        setup: setup.clone(),
        rows,
    })
}

/// Everything recorded about loop 0 of one cell when tracing is on.
#[derive(Clone, Debug)]
pub struct CellTrace {
    pub algorithm: Algorithm,
    pub p_c: f64,
    pub loop_index: u32,
    pub discovery: NetworkSnapshot,
    pub transmission: NetworkSnapshot,
    pub tables: NeighborTables,
    pub assignment: Option<RelayAssignment>,
    pub floods: Vec<(u32, FloodOutcome, Vec<TraceEvent>)>,
}

/// Re-runs loop 0 of a cell with per-delivery tracing. Serial; produces
/// the same outcomes as the untraced path because floods depend only on
/// their input streams.
pub fn trace_cell(cfg: &SimConfig, algorithm: Algorithm) -> Result<CellTrace, SimError> {
    if cfg.n < 2 {
        return Err(SimError::TooFewNodes(cfg.n));
    }
    let positions = place_nodes(cfg, &mut stream(cfg.master_seed, Purpose::Placement, 0, 0));
    let (discovery, transmission) = loop_links(cfg, &positions, 0);
    let tables = build_neighbor_tables(&discovery);
    let assignment =
        heuristic_of(algorithm).map(|h| assign_relays(&discovery, &tables, h, cfg.branch_cap));

    let mut floods = Vec::with_capacity(cfg.n);
    for source in 0..cfg.n as u32 {
        let mut events = Vec::new();
        let outcome = match algorithm {
            Algorithm::Pure => flood_pure_traced(&transmission, source, &mut events),
            Algorithm::Probabilistic => flood_probabilistic_traced(
                &transmission,
                source,
                cfg.p_r,
                &mut stream(cfg.master_seed, Purpose::ForwardCoins, 0, u64::from(source)),
                &mut events,
            ),
            Algorithm::GreedyMpr | Algorithm::Ompr => flood_mpr_traced(
                &transmission,
                assignment
                    .as_ref()
                    .expect("relay algorithms build an assignment"),
                source,
                &mut events,
            )?,
        };
        floods.push((source, outcome, events));
    }
    Ok(CellTrace {
        algorithm,
        p_c: cfg.p_c,
        loop_index: 0,
        discovery,
        transmission,
        tables,
        assignment,
        floods,
    })
}
