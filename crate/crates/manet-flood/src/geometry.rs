//! Node placement, mobility stepping, noisy link sampling, and neighbor
//! tables: the world model every algorithm runs against.

use rand::Rng;

use crate::config::SimConfig;

/// A node's location. `node_id` always equals the index of the entry in the
/// list it lives in.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodePosition {
    pub node_id: u32,
    pub x: f64,
    pub y: f64,
}

/// One mobility loop's world: positions plus the sampled directed link
/// graph. `(i -> j) in links` means a transmission by `i` is received by
/// `j`; at `p_c < 1` the relation may be asymmetric.
#[derive(Clone, Debug)]
pub struct NetworkSnapshot {
    pub positions: Vec<NodePosition>,
    /// Per-node sorted out-neighbor lists.
    pub out: Vec<Vec<u32>>,
    pub p_c_used: f64,
    pub loop_index: u64,
}

impl NetworkSnapshot {
    pub fn node_count(&self) -> usize {
        self.out.len()
    }

    pub fn has_link(&self, from: u32, to: u32) -> bool {
        self.out[from as usize].binary_search(&to).is_ok()
    }
}

/// Strict one- and two-hop neighbor sets per node, derived from a snapshot's
/// directed links. Entries are sorted; N1 and N2 are disjoint and exclude
/// the node itself.
#[derive(Clone, Debug)]
pub struct NeighborTables {
    pub one_hop: Vec<Vec<u32>>,
    pub two_hop: Vec<Vec<u32>>,
}

/// Places `config.n` nodes uniformly over the area.
pub fn place_nodes(config: &SimConfig, rng: &mut impl Rng) -> Vec<NodePosition> {
    (0..config.n as u32)
        .map(|node_id| NodePosition {
            node_id,
            x: rng.gen::<f64>() * config.area_width,
            y: rng.gen::<f64>() * config.area_height,
        })
        .collect()
}

/// Reflects a coordinate back into [0, max]. The walk step is normally
/// shorter than the area, but fold repeatedly so oversized steps still land
/// inside.
fn reflect(mut c: f64, max: f64) -> f64 {
    debug_assert!(max > 0.0);
    loop {
        if c < 0.0 {
            c = -c;
        } else if c > max {
            c = 2.0 * max - c;
        } else {
            return c;
        }
    }
}

/// Moves every node a distance of `u * tau = 0.75 * R` in an independent
/// uniform random heading, reflecting at the area boundary. At zero speed
/// positions are returned unchanged (and the stream is not consumed).
pub fn step_mobility(
    positions: &[NodePosition],
    config: &SimConfig,
    rng: &mut impl Rng,
) -> Vec<NodePosition> {
    if config.speed == 0.0 {
        return positions.to_vec();
    }
    // u cancels out of u * (0.75 * R / u); keep the product form anyway so a
    // future pause-time change stays correct in one place.
    let step = config.speed * (0.75 * config.radius / config.speed);
    positions
        .iter()
        .map(|p| {
            let heading = rng.gen::<f64>() * std::f64::consts::TAU;
            NodePosition {
                node_id: p.node_id,
                x: reflect(p.x + step * heading.cos(), config.area_width),
                y: reflect(p.y + step * heading.sin(), config.area_height),
            }
        })
        .collect()
}

/// Samples the directed link graph: for every ordered in-range pair (i, j)
/// a uniform draw xi is taken and the link i -> j is included iff
/// `xi <= p_c`. The range test `d <= R` is inclusive. At `p_c = 1` links are
/// included without consuming randomness, so the graph is exactly the
/// symmetric unit-disk graph of the positions.
///
/// Draws happen in row-major pair order and only for in-range pairs, so two
/// samplings from identically keyed streams see the same xi per pair
/// regardless of `p_c`; the link set at a higher `p_c` is then a superset of
/// the link set at a lower one.
pub fn sample_links(
    positions: &[NodePosition],
    radius: f64,
    p_c: f64,
    loop_index: u64,
    rng: &mut impl Rng,
) -> NetworkSnapshot {
    let n = positions.len();
    let r2 = radius * radius;
    let mut out = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let dx = positions[i].x - positions[j].x;
            let dy = positions[i].y - positions[j].y;
            if dx * dx + dy * dy > r2 {
                continue;
            }
            if p_c >= 1.0 || rng.gen::<f64>() <= p_c {
                out[i].push(j as u32);
            }
        }
    }
    NetworkSnapshot {
        positions: positions.to_vec(),
        out,
        p_c_used: p_c,
        loop_index,
    }
}

/// Builds per-node neighbor tables from a snapshot:
/// N1(x) = direct out-neighbors, N2(x) = out-neighbors of N1(x) minus N1(x)
/// and x itself.
pub fn build_neighbor_tables(snapshot: &NetworkSnapshot) -> NeighborTables {
    let n = snapshot.node_count();
    let mut two_hop = Vec::with_capacity(n);
    let mut mark = vec![false; n];
    for x in 0..n {
        for &y in &snapshot.out[x] {
            for &z in &snapshot.out[y as usize] {
                mark[z as usize] = true;
            }
        }
        mark[x] = false;
        for &y in &snapshot.out[x] {
            mark[y as usize] = false;
        }
        // Ascending scan keeps the list sorted.
        let mut n2 = Vec::new();
        for (z, m) in mark.iter_mut().enumerate() {
            if *m {
                n2.push(z as u32);
                *m = false;
            }
        }
        two_hop.push(n2);
    }
    NeighborTables {
        one_hop: snapshot.out.clone(),
        two_hop,
    }
}
