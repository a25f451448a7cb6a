//! Output rendering: results CSV, plot-ready rate tables, the run
//! manifest, and the optional trace bundle.
//!
//! Every renderer builds a `String` from already-computed data, so output
//! bytes are a pure function of the sweep result and identical across
//! runs and thread counts. The manifest uses the same `key = value`
//! grammar the config parser reads; feeding it back in reproduces the
//! run.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use crate::geometry::{NeighborTables, NetworkSnapshot};
use crate::harness::{loop_count, pause_time, CellTrace, SweepResult};
use crate::mpr::{brute_force_min_cover, greedy_mpr, ompr_select, CoverInstance};

pub const RESULTS_FILE: &str = "results.csv";
pub const RCH_FILE: &str = "rch_vs_pc.dat";
pub const RET_FILE: &str = "ret_vs_pc.dat";
pub const MANIFEST_FILE: &str = "manifest.txt";

pub fn results_csv(result: &SweepResult) -> String {
    let mut s = String::from(
        "algorithm,p_c,rch_mean,rch_stddev,ret_mean,ret_stddev,loops,sources,avg_mpr_sets,cap_hits\n",
    );
    for row in &result.rows {
        writeln!(
            s,
            "{},{:.2},{:.6},{:.6},{:.6},{:.6},{},{},{:.6},{}",
            row.algorithm,
            row.p_c,
            row.rch_mean,
            row.rch_stddev,
            row.ret_mean,
            row.ret_stddev,
            row.loops,
            row.sources,
            row.avg_mpr_sets,
            row.cap_hits
        )
        .unwrap();
    }
    s
}

fn rates_dat(result: &SweepResult, pick: impl Fn(&crate::harness::SweepRow) -> f64) -> String {
    let algs = &result.setup.algorithms;
    let mut s = String::from("# p_c");
    for alg in algs {
        write!(s, " {alg}").unwrap();
    }
    s.push('\n');
    for &p_c in &result.setup.p_c_grid {
        write!(s, "{p_c:.2}").unwrap();
        for &alg in algs {
            let row = result
                .row(alg, p_c)
                .expect("sweep covers the full algorithm x grid product");
            write!(s, " {:.6}", pick(row)).unwrap();
        }
        s.push('\n');
    }
    s
}

/// Reach ratio per grid point, one column per algorithm.
pub fn rch_dat(result: &SweepResult) -> String {
    rates_dat(result, |r| r.rch_mean)
}

/// Retransmission ratio per grid point, one column per algorithm.
pub fn ret_dat(result: &SweepResult) -> String {
    rates_dat(result, |r| r.ret_mean)
}

pub fn manifest_text(result: &SweepResult) -> String {
    let setup = &result.setup;
    let c = &setup.config;
    let mut s = String::from("# run manifest; feed back via --config to reproduce\n");
    writeln!(s, "version = {}", env!("CARGO_PKG_VERSION")).unwrap();
    writeln!(s, "n = {}", c.n).unwrap();
    writeln!(s, "area_width = {:?}", c.area_width).unwrap();
    writeln!(s, "area_height = {:?}", c.area_height).unwrap();
    writeln!(s, "radius = {:?}", c.radius).unwrap();
    writeln!(s, "speed = {:?}", c.speed).unwrap();
    writeln!(s, "p_r = {:?}", c.p_r).unwrap();
    writeln!(s, "t_sim = {:?}", c.t_sim).unwrap();
    writeln!(s, "master_seed = {}", c.master_seed).unwrap();
    writeln!(s, "branch_cap = {}", c.branch_cap).unwrap();
    if let Some(loops) = c.loops {
        writeln!(s, "loops = {loops}").unwrap();
    }
    writeln!(s, "relay_knowledge = {}", c.relay_knowledge.label()).unwrap();
    let grid = &setup.p_c_grid;
    writeln!(s, "p_c_min = {:?}", grid.first().unwrap()).unwrap();
    writeln!(s, "p_c_max = {:?}", grid.last().unwrap()).unwrap();
    let step = if grid.len() > 1 {
        ((grid[1] - grid[0]) * 1e9).round() / 1e9
    } else {
        1.0
    };
    writeln!(s, "p_c_step = {step:?}").unwrap();
    let labels: Vec<&str> = setup.algorithms.iter().map(|a| a.label()).collect();
    writeln!(s, "algorithms = {}", labels.join(", ")).unwrap();
    if let (Ok(tau), Ok(loops)) = (pause_time(c), loop_count(c)) {
        writeln!(s, "# pause time {tau:?}, {loops} loops per cell").unwrap();
    }
    s
}

/// Writes the four standard output files into `dir`, creating it first.
pub fn write_outputs(dir: &Path, result: &SweepResult) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(RESULTS_FILE), results_csv(result))?;
    fs::write(dir.join(RCH_FILE), rch_dat(result))?;
    fs::write(dir.join(RET_FILE), ret_dat(result))?;
    fs::write(dir.join(MANIFEST_FILE), manifest_text(result))?;
    Ok(())
}

pub fn snapshot_text(snapshot: &NetworkSnapshot) -> String {
    let links: usize = snapshot.out.iter().map(Vec::len).sum();
    let mut s = format!(
        "# loop {} p_c {:?}: {} nodes, {} directed links\n",
        snapshot.loop_index,
        snapshot.p_c_used,
        snapshot.node_count(),
        links
    );
    for p in &snapshot.positions {
        writeln!(s, "node {} {:?} {:?}", p.node_id, p.x, p.y).unwrap();
    }
    for (from, outs) in snapshot.out.iter().enumerate() {
        for &to in outs {
            writeln!(s, "link {from} {to}").unwrap();
        }
    }
    s
}

/// Per-node relay selection diagnostics over one discovery realization:
/// neighborhood sizes, both heuristics' set sizes, search effort, and the
/// exhaustive minimum where it is computable ("-" where the candidate set
/// is too large to enumerate).
pub fn relay_diag_text(
    snapshot: &NetworkSnapshot,
    tables: &NeighborTables,
    branch_cap: u64,
) -> String {
    let mut s = String::from("node n1 n2 greedy branching explored cap exact\n");
    for center in 0..snapshot.node_count() as u32 {
        let instance = CoverInstance::from_tables(snapshot, tables, center);
        let greedy = greedy_mpr(&instance);
        let branching = ompr_select(&instance, branch_cap);
        let exact = match brute_force_min_cover(&instance) {
            Ok(set) => set.relays.len().to_string(),
            Err(_) => "-".to_string(),
        };
        writeln!(
            s,
            "{} {} {} {} {} {} {} {}",
            center,
            tables.one_hop[center as usize].len(),
            tables.two_hop[center as usize].len(),
            greedy.relays.len(),
            branching.relays.len(),
            branching.sets_explored,
            if branching.cap_hit { 1 } else { 0 },
            exact
        )
        .unwrap();
    }
    s
}

pub fn trace_text(trace: &CellTrace) -> String {
    let mut s = format!(
        "# {} p_c {:?} loop {}: one flood per source, events as hop/tx/rx\n",
        trace.algorithm, trace.p_c, trace.loop_index
    );
    for (source, outcome, events) in &trace.floods {
        writeln!(
            s,
            "flood source={} rx={} tx={}",
            source,
            outcome.rx_count(),
            outcome.tx_count()
        )
        .unwrap();
        for e in events {
            writeln!(s, "{} {} {}", e.hop, e.tx, e.rx).unwrap();
        }
    }
    s
}

/// Writes the trace bundle for one cell: the per-flood event log, both
/// link realizations, and (for relay algorithms) the selection
/// diagnostics computed on the discovery realization.
pub fn write_trace_bundle(dir: &Path, trace: &CellTrace, branch_cap: u64) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    let tag = format!("{}_pc{:.2}", trace.algorithm, trace.p_c);
    fs::write(dir.join(format!("trace_{tag}.txt")), trace_text(trace))?;
    fs::write(
        dir.join(format!("discovery_{tag}.txt")),
        snapshot_text(&trace.discovery),
    )?;
    fs::write(
        dir.join(format!("transmission_{tag}.txt")),
        snapshot_text(&trace.transmission),
    )?;
    if trace.assignment.is_some() {
        fs::write(
            dir.join(format!("relays_{tag}.txt")),
            relay_diag_text(&trace.discovery, &trace.tables, branch_cap),
        )?;
    }
    Ok(())
}
