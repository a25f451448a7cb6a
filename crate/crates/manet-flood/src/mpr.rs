//! Relay-set selection: the greedy multipoint-relay heuristic, the
//! tie-branching variant that keeps the smallest of all greedy outcomes, and
//! an exhaustive minimum-cover search used as a test oracle.

use std::collections::{HashSet, VecDeque};

use crate::bitset::BitSet;
use crate::error::SimError;
use crate::geometry::{NeighborTables, NetworkSnapshot};

/// One node's set-cover problem: choose relays among its one-hop neighbors
/// (`candidates`) so that every two-hop neighbor (`targets`) is covered.
/// Candidate `y` covers target `z` iff the directed link y -> z exists in
/// the snapshot the instance was built from.
#[derive(Clone, Debug)]
pub struct CoverInstance {
    pub center: u32,
    /// Sorted node ids of N1(center).
    pub candidates: Vec<u32>,
    /// Sorted node ids of N2(center).
    pub targets: Vec<u32>,
    /// Per candidate (parallel to `candidates`): mask over target indices.
    pub covers: Vec<BitSet>,
}

impl CoverInstance {
    /// Builds the instance for `center` from a snapshot and its tables.
    /// Every target is covered by at least one candidate by construction of
    /// the two-hop table.
    pub fn from_tables(snapshot: &NetworkSnapshot, tables: &NeighborTables, center: u32) -> Self {
        let candidates = tables.one_hop[center as usize].clone();
        let targets = tables.two_hop[center as usize].clone();
        let covers = candidates
            .iter()
            .map(|&y| {
                let mut mask = BitSet::new(targets.len());
                for (ti, &z) in targets.iter().enumerate() {
                    if snapshot.has_link(y, z) {
                        mask.insert(ti);
                    }
                }
                mask
            })
            .collect();
        CoverInstance {
            center,
            candidates,
            targets,
            covers,
        }
    }
}

/// A computed relay set plus selection diagnostics. `sets_explored` counts
/// the candidate sets the selection generated (1 for the plain greedy path;
/// the number of enumerated subsets for the exhaustive search). `cap_hit`
/// reports that tie branching was truncated by the cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelaySet {
    pub center: u32,
    /// Sorted relay node ids.
    pub relays: Vec<u32>,
    pub sets_explored: u64,
    pub cap_hit: bool,
}

/// Relay sets for every node of a snapshot plus the inverse map: node `y`
/// forwards floods of neighbor `x` iff `y` is in `relay_sets[x].relays`,
/// equivalently `x` is in `selectors[y]`.
#[derive(Clone, Debug)]
pub struct RelayAssignment {
    pub relay_sets: Vec<RelaySet>,
    pub selectors: Vec<Vec<u32>>,
}

impl RelayAssignment {
    pub fn node_count(&self) -> usize {
        self.relay_sets.len()
    }
}

/// Which selection heuristic an assignment runs per node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MprHeuristic {
    /// Single greedy pass, ties broken by smallest id.
    Greedy,
    /// Greedy with branching on every tie; smallest completed set wins.
    Branching,
}

/// Candidates that are the only coverer of some target. Every valid cover
/// must contain them, so both heuristics seed with this set.
pub fn mandatory_relays(instance: &CoverInstance) -> Vec<u32> {
    let mut mandatory = Vec::new();
    for ti in 0..instance.targets.len() {
        let mut coverers = instance
            .covers
            .iter()
            .enumerate()
            .filter(|(_, mask)| mask.contains(ti));
        if let (Some((ci, _)), None) = (coverers.next(), coverers.next()) {
            let id = instance.candidates[ci];
            if !mandatory.contains(&id) {
                mandatory.push(id);
            }
        }
    }
    mandatory.sort_unstable();
    mandatory
}

// Shared state of one branch: the chosen relays (as sorted candidate
// indices) and the targets they do not yet cover. `uncovered` is fully
// determined by `chosen`, so `chosen` alone identifies the state.
#[derive(Clone)]
struct BranchState {
    chosen: Vec<usize>,
    uncovered: BitSet,
}

impl BranchState {
    fn seed(instance: &CoverInstance) -> Self {
        let mandatory = mandatory_relays(instance);
        let mut uncovered = BitSet::full(instance.targets.len());
        let chosen: Vec<usize> = mandatory
            .iter()
            .map(|id| {
                instance
                    .candidates
                    .binary_search(id)
                    .expect("mandatory relay is a candidate")
            })
            .collect();
        for &ci in &chosen {
            uncovered.subtract(&instance.covers[ci]);
        }
        BranchState { chosen, uncovered }
    }

    fn add(&mut self, instance: &CoverInstance, ci: usize) {
        let slot = self.chosen.binary_search(&ci).unwrap_err();
        self.chosen.insert(slot, ci);
        self.uncovered.subtract(&instance.covers[ci]);
    }

    /// All candidates achieving the maximum number of newly covered targets,
    /// ascending by index. The maximum is positive for valid instances with
    /// uncovered targets left.
    fn best_gain_ties(&self, instance: &CoverInstance) -> Vec<usize> {
        let mut best = 0usize;
        let mut ties = Vec::new();
        for ci in 0..instance.candidates.len() {
            if self.chosen.binary_search(&ci).is_ok() {
                continue;
            }
            let gain = instance.covers[ci].intersection_count(&self.uncovered);
            if gain > best {
                best = gain;
                ties.clear();
                ties.push(ci);
            } else if gain == best && gain > 0 {
                ties.push(ci);
            }
        }
        ties
    }

    fn relays(&self, instance: &CoverInstance) -> Vec<u32> {
        // chosen is sorted by candidate index and candidates are sorted by
        // id, so the result is sorted by id.
        self.chosen
            .iter()
            .map(|&ci| instance.candidates[ci])
            .collect()
    }
}

/// Greedy cover: seed with the mandatory relays, then repeatedly add the
/// candidate covering the most still-uncovered targets (smallest id on
/// ties) until everything is covered.
pub fn greedy_mpr(instance: &CoverInstance) -> RelaySet {
    let mut state = BranchState::seed(instance);
    while !state.uncovered.is_empty() {
        let ties = state.best_gain_ties(instance);
        assert!(!ties.is_empty(), "instance has an uncoverable target");
        state.add(instance, ties[0]);
    }
    RelaySet {
        center: instance.center,
        relays: state.relays(instance),
        sets_explored: 1,
        cap_hit: false,
    }
}

/// Branching cover selection. Runs the greedy loop, but whenever K > 1
/// candidates tie for maximum gain, the current set continues with the
/// smallest-id one and K-1 sibling sets are spawned for the others. All sets
/// complete greedily; the smallest completed set wins, ties resolved by
/// lexicographic id order.
///
/// Two safeguards keep the branch tree finite: sibling sets identical to an
/// already generated set are merged (identical relay sets cover identical
/// targets, so their futures coincide), and once `branch_cap` sets have been
/// generated no further siblings are spawned (`cap_hit` reports this; live
/// sets still complete). The greedy trajectory is always among the branches,
/// so the result is never larger than `greedy_mpr`'s.
pub fn ompr_select(instance: &CoverInstance, branch_cap: u64) -> RelaySet {
    assert!(branch_cap >= 1);
    let seed = BranchState::seed(instance);
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    seen.insert(seed.chosen.clone());
    let mut worklist: VecDeque<BranchState> = VecDeque::new();
    worklist.push_back(seed);

    let mut generated: u64 = 1;
    let mut cap_hit = false;
    let mut best: Option<Vec<u32>> = None;

    while let Some(mut state) = worklist.pop_front() {
        // Drive this branch to completion (or until it merges into a state
        // another branch already produced).
        loop {
            if state.uncovered.is_empty() {
                let relays = state.relays(instance);
                let better = match &best {
                    None => true,
                    Some(b) => (relays.len(), &relays) < (b.len(), b),
                };
                if better {
                    best = Some(relays);
                }
                break;
            }
            let ties = state.best_gain_ties(instance);
            assert!(!ties.is_empty(), "instance has an uncoverable target");
            for &ci in &ties[1..] {
                if generated >= branch_cap {
                    cap_hit = true;
                    continue;
                }
                let mut sibling = state.clone();
                sibling.add(instance, ci);
                if seen.insert(sibling.chosen.clone()) {
                    generated += 1;
                    worklist.push_back(sibling);
                }
            }
            state.add(instance, ties[0]);
            if !seen.insert(state.chosen.clone()) {
                break; // merged into an identical branch
            }
        }
    }

    RelaySet {
        center: instance.center,
        relays: best.expect("at least the seed branch completes"),
        sets_explored: generated,
        cap_hit,
    }
}

/// Exhaustive minimum cover over all 2^|candidates| subsets; the guard keeps
/// that tractable. Ties resolve to the lexicographically smallest id list.
/// `sets_explored` reports the number of enumerated subsets.
pub fn brute_force_min_cover(instance: &CoverInstance) -> Result<RelaySet, SimError> {
    const LIMIT: usize = 20;
    let k = instance.candidates.len();
    if k > LIMIT {
        return Err(SimError::OracleTooLarge {
            got: k,
            limit: LIMIT,
        });
    }
    let full = BitSet::full(instance.targets.len());
    let mut best: Option<Vec<u32>> = None;
    for mask in 0u32..(1u32 << k) {
        if let Some(b) = &best {
            if (mask.count_ones() as usize) > b.len() {
                continue;
            }
        }
        let mut covered = BitSet::new(instance.targets.len());
        for ci in 0..k {
            if mask & (1 << ci) != 0 {
                covered.union_with(&instance.covers[ci]);
            }
        }
        if covered != full {
            continue;
        }
        let relays: Vec<u32> = (0..k)
            .filter(|ci| mask & (1 << ci) != 0)
            .map(|ci| instance.candidates[ci])
            .collect();
        let better = match &best {
            None => true,
            Some(b) => (relays.len(), &relays) < (b.len(), b),
        };
        if better {
            best = Some(relays);
        }
    }
    Ok(RelaySet {
        center: instance.center,
        relays: best.expect("the full candidate set covers all targets"),
        sets_explored: 1u64 << k,
        cap_hit: false,
    })
}

/// Runs the chosen heuristic for every node and builds the inverse selector
/// map. Relay knowledge is global and instantaneous: all sets are computed
/// from the same tables before any flood consults them.
pub fn assign_relays(
    snapshot: &NetworkSnapshot,
    tables: &NeighborTables,
    heuristic: MprHeuristic,
    branch_cap: u64,
) -> RelayAssignment {
    let n = snapshot.node_count();
    let relay_sets: Vec<RelaySet> = (0..n as u32)
        .map(|x| {
            let instance = CoverInstance::from_tables(snapshot, tables, x);
            match heuristic {
                MprHeuristic::Greedy => greedy_mpr(&instance),
                MprHeuristic::Branching => ompr_select(&instance, branch_cap),
            }
        })
        .collect();
    let mut selectors = vec![Vec::new(); n];
    for set in &relay_sets {
        for &y in &set.relays {
            selectors[y as usize].push(set.center);
        }
    }
    // Center ids are visited in ascending order, so each list is sorted.
    RelayAssignment {
        relay_sets,
        selectors,
    }
}
