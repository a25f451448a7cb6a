//! Run configuration: the simulation parameters, the `p_c` sweep grid, and
//! a small line-oriented `key = value` file format for both.
//!
//! The same grammar is used for input configs and for the manifest the run
//! writes next to its results, so a manifest can be fed straight back in to
//! reproduce a run.

use std::fmt;
use std::str::FromStr;

use crate::error::ConfigError;

/// Flooding discipline selected for a sweep.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// Every receiver rebroadcasts once.
    Pure,
    /// Every receiver rebroadcasts with probability `p_r`.
    Probabilistic,
    /// Only relays rebroadcast; relay sets chosen by the greedy cover.
    GreedyMpr,
    /// Only relays rebroadcast; relay sets chosen by the branching search.
    Ompr,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::Pure,
        Algorithm::Probabilistic,
        Algorithm::GreedyMpr,
        Algorithm::Ompr,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Algorithm::Pure => "pure",
            Algorithm::Probabilistic => "prob",
            Algorithm::GreedyMpr => "greedy-mpr",
            Algorithm::Ompr => "ompr",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pure" => Ok(Algorithm::Pure),
            "prob" => Ok(Algorithm::Probabilistic),
            "greedy-mpr" => Ok(Algorithm::GreedyMpr),
            "ompr" => Ok(Algorithm::Ompr),
            other => Err(format!(
                "unknown algorithm {other:?} (expected pure, prob, greedy-mpr, or ompr)"
            )),
        }
    }
}

/// Which link realization relay sets are computed from.
///
/// `Stale` resamples the links between the table-building phase and the
/// flood phase of each loop (same positions, same `p_c`), modeling relay
/// choices made from previously collected neighborhood reports. `Fresh`
/// computes relay sets on the very realization the flood runs over. At
/// `p_c = 1` both coincide.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RelayKnowledge {
    #[default]
    Stale,
    Fresh,
}

impl RelayKnowledge {
    pub fn label(self) -> &'static str {
        match self {
            RelayKnowledge::Stale => "stale",
            RelayKnowledge::Fresh => "fresh",
        }
    }
}

impl FromStr for RelayKnowledge {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "stale" => Ok(RelayKnowledge::Stale),
            "fresh" => Ok(RelayKnowledge::Fresh),
            other => Err(format!(
                "unknown relay knowledge {other:?} (expected stale or fresh)"
            )),
        }
    }
}

/// Parameters of one simulation cell. `p_c` is the reception probability
/// the cell runs at; sweeps clone this struct per grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    pub n: usize,
    pub area_width: f64,
    pub area_height: f64,
    pub radius: f64,
    pub speed: f64,
    pub p_r: f64,
    pub p_c: f64,
    pub t_sim: f64,
    pub master_seed: u64,
    pub branch_cap: u64,
    /// Overrides the loop count derived from `t_sim` and the pause time.
    pub loops: Option<u32>,
    pub relay_knowledge: RelayKnowledge,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n: 100,
            area_width: 1000.0,
            area_height: 1000.0,
            radius: 200.0,
            speed: 5.0,
            p_r: 0.8,
            p_c: 1.0,
            t_sim: 300.0,
            master_seed: 1,
            branch_cap: 10_000,
            loops: None,
            relay_knowledge: RelayKnowledge::Stale,
        }
    }
}

/// A full sweep request: the cell parameters plus the `p_c` grid and the
/// algorithms to run at each grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSetup {
    pub config: SimConfig,
    pub p_c_grid: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
}

impl Default for RunSetup {
    fn default() -> Self {
        RunSetup {
            config: SimConfig::default(),
            p_c_grid: pc_grid(0.5, 1.0, 0.1),
            algorithms: vec![Algorithm::Pure, Algorithm::Probabilistic, Algorithm::Ompr],
        }
    }
}

/// Expands `min..=max` in increments of `step`, rounding each point to nine
/// decimals so grids specified in decimal fractions land on exact values
/// (0.5 + 5 * 0.1 compares equal to 1.0).
pub fn pc_grid(min: f64, max: f64, step: f64) -> Vec<f64> {
    let mut grid = Vec::new();
    let mut k = 0u32;
    loop {
        let v = min + f64::from(k) * step;
        if v > max + 1e-9 {
            break;
        }
        grid.push((v * 1e9).round() / 1e9);
        k += 1;
    }
    grid
}

impl RunSetup {
    /// Parses the `key = value` format. Lines are independent; `#` starts a
    /// comment; blank lines are skipped. Unknown keys and malformed values
    /// are errors with the offending line number.
    pub fn parse(text: &str) -> Result<RunSetup, ConfigError> {
        let mut setup = RunSetup::default();
        let mut p_c_min = 0.5;
        let mut p_c_max = 1.0;
        let mut p_c_step = 0.1;

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let content = content.trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError::Malformed {
                    line,
                    text: content.to_string(),
                });
            };
            let key = key.trim();
            let value = value.trim();

            macro_rules! parse_as {
                ($ty:ty) => {
                    value.parse::<$ty>().map_err(|e| ConfigError::BadValue {
                        line,
                        key: key.to_string(),
                        value: value.to_string(),
                        reason: e.to_string(),
                    })?
                };
            }

            match key {
                "n" => setup.config.n = parse_as!(usize),
                "area_width" => setup.config.area_width = parse_as!(f64),
                "area_height" => setup.config.area_height = parse_as!(f64),
                "radius" => setup.config.radius = parse_as!(f64),
                "speed" => setup.config.speed = parse_as!(f64),
                "p_r" => setup.config.p_r = parse_as!(f64),
                "t_sim" => setup.config.t_sim = parse_as!(f64),
                "master_seed" => setup.config.master_seed = parse_as!(u64),
                "branch_cap" => setup.config.branch_cap = parse_as!(u64),
                "loops" => setup.config.loops = Some(parse_as!(u32)),
                "relay_knowledge" => setup.config.relay_knowledge = parse_as!(RelayKnowledge),
                "p_c_min" => p_c_min = parse_as!(f64),
                "p_c_max" => p_c_max = parse_as!(f64),
                "p_c_step" => p_c_step = parse_as!(f64),
                "algorithms" => {
                    let mut algs = Vec::new();
                    for part in value.split(',') {
                        let part = part.trim();
                        if part.is_empty() {
                            continue;
                        }
                        let alg =
                            part.parse::<Algorithm>()
                                .map_err(|reason| ConfigError::BadValue {
                                    line,
                                    key: key.to_string(),
                                    value: value.to_string(),
                                    reason,
                                })?;
                        if !algs.contains(&alg) {
                            algs.push(alg);
                        }
                    }
                    setup.algorithms = algs;
                }
                // Accepted so manifests round-trip; the value carries no
                // semantics today.
                "version" => {}
                other => {
                    return Err(ConfigError::UnknownKey {
                        line,
                        key: other.to_string(),
                    });
                }
            }
        }

        validate_grid_spec(p_c_min, p_c_max, p_c_step)?;
        setup.p_c_grid = pc_grid(p_c_min, p_c_max, p_c_step);
        setup.validate()?;
        Ok(setup)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let c = &self.config;
        let range = |key: &str, reason: String| ConfigError::OutOfRange {
            key: key.to_string(),
            reason,
        };
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if c.n < 2 {
            return Err(range("n", format!("need at least 2 nodes, got {}", c.n)));
        }
        if !positive(c.area_width) || !positive(c.area_height) {
            return Err(range(
                "area_width/area_height",
                "area dimensions must be positive and finite".to_string(),
            ));
        }
        if !positive(c.radius) {
            return Err(range(
                "radius",
                "transmission radius must be positive and finite".to_string(),
            ));
        }
        if c.speed < 0.0 || !c.speed.is_finite() {
            return Err(range(
                "speed",
                "speed must be non-negative and finite".to_string(),
            ));
        }
        if c.speed == 0.0 && c.loops.is_none() {
            return Err(range(
                "speed",
                "speed 0 leaves the loop count undefined; set loops explicitly".to_string(),
            ));
        }
        if !(0.0..=1.0).contains(&c.p_r) {
            return Err(range("p_r", format!("must lie in [0, 1], got {}", c.p_r)));
        }
        if !positive(c.t_sim) {
            return Err(range(
                "t_sim",
                "simulated time must be positive and finite".to_string(),
            ));
        }
        if c.branch_cap == 0 {
            return Err(range(
                "branch_cap",
                "branch cap must be at least 1".to_string(),
            ));
        }
        if c.loops == Some(0) {
            return Err(range("loops", "loop count must be at least 1".to_string()));
        }
        if self.p_c_grid.is_empty() {
            return Err(range("p_c_min/p_c_max", "empty p_c grid".to_string()));
        }
        for &p in &self.p_c_grid {
            if !(0.0..=1.0).contains(&p) {
                return Err(range("p_c", format!("grid value {p} outside [0, 1]")));
            }
        }
        if self.algorithms.is_empty() {
            return Err(range(
                "algorithms",
                "at least one algorithm required".to_string(),
            ));
        }
        Ok(())
    }
}

pub(crate) fn validate_grid_spec(min: f64, max: f64, step: f64) -> Result<(), ConfigError> {
    let range = |reason: String| ConfigError::OutOfRange {
        key: "p_c_min/p_c_max/p_c_step".to_string(),
        reason,
    };
    if !(0.0..=1.0).contains(&min) || !(0.0..=1.0).contains(&max) {
        return Err(range(format!(
            "grid bounds [{min}, {max}] must lie in [0, 1]"
        )));
    }
    if min > max {
        return Err(range(format!("p_c_min {min} exceeds p_c_max {max}")));
    }
    if step <= 0.0 || !step.is_finite() {
        return Err(range(format!(
            "p_c_step must be positive and finite, got {step}"
        )));
    }
    Ok(())
}
