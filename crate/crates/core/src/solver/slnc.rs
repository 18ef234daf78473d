//! Empirical check of sequential local non-constancy.
//!
//! The simplex is covered by the cells of a coarse grid of diameter at most
//! `epsilon`. In each cover cell the sample points with residual below `eta`
//! form a cluster; for an economy whose near-equilibria concentrate, every
//! cluster shrinks as `eta` is halved. A cluster that does not shrink is
//! evidence against the property. No finite sample can confirm it.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{SolverConfig, SolverError};
use crate::economy::{self, ExcessDemand};
use crate::simplex_grid::{GridCell, GridVertex, Subdivision};

/// Sample spacing relative to the smallest `eta`.
const SAMPLES_PER_ETA: f64 = 32.0;
/// Upper bound on the number of sample points.
const SAMPLE_LIMIT: u128 = 1 << 22;
const CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlncCell {
    pub cell: GridCell,
    /// points below each threshold, coarsest first
    pub counts: Vec<usize>,
    /// max-norm cluster diameter at each threshold
    pub diameters: Vec<f64>,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlncReport {
    pub epsilon: f64,
    pub etas: Vec<f64>,
    pub cover_m: u32,
    pub sample_m: u32,
    /// cover cells with a nonempty cluster at the largest threshold
    pub cells: Vec<SlncCell>,
    pub flagged: usize,
    pub verdict: String,
}

impl SlncReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Bounding box of a point set, per coordinate.
#[derive(Clone)]
struct Cluster {
    count: usize,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Cluster {
    fn new(goods: usize) -> Self {
        Self {
            count: 0,
            lo: vec![f64::INFINITY; goods],
            hi: vec![f64::NEG_INFINITY; goods],
        }
    }

    fn add(&mut self, p: &[f64]) {
        self.count += 1;
        for ((lo, hi), x) in self.lo.iter_mut().zip(self.hi.iter_mut()).zip(p) {
            *lo = lo.min(*x);
            *hi = hi.max(*x);
        }
    }

    /// Max-norm diameter: the largest coordinate spread.
    fn diameter(&self) -> f64 {
        if self.count == 0 {
            return 0.0;
        }
        self.lo.iter().zip(&self.hi).map(|(lo, hi)| hi - lo).fold(0.0, f64::max)
    }
}

pub fn slnc_diagnostic<E: ExcessDemand + ?Sized>(econ: &E, cfg: &SolverConfig) -> Result<SlncReport, SolverError> {
    if [cfg.slnc_epsilon, cfg.slnc_eta].iter().any(|x| x.is_nan() || *x <= 0.0) {
        return Err(SolverError::InvalidConfig("slnc_eta and slnc_epsilon must be positive".into()));
    }
    let n = econ.goods() - 1;
    let etas: Vec<f64> = (0..=cfg.slnc_halvings).map(|h| cfg.slnc_eta / 2f64.powi(h as i32)).collect();
    let cover_m = (1.0 / cfg.slnc_epsilon).ceil().max(1.0) as u32;
    let cover = Subdivision::new(n, cover_m).map_err(crate::sperner_search::SearchError::from)?;

    let eta_min = *etas.last().expect("at least one threshold");
    let mut factor = ((SAMPLES_PER_ETA / (eta_min * f64::from(cover_m))).ceil() as u32).max(1);
    while factor > 1 && binomial(u128::from(cover_m * factor) + n as u128, n as u128) > SAMPLE_LIMIT {
        factor = (factor * 3 / 4).max(1);
    }
    let sample_m = cover_m * factor;
    let sample = Subdivision::new(n, sample_m).map_err(crate::sperner_search::SearchError::from)?;

    // (cover cell, point, residual) for every sample point below the largest eta
    let hits: Vec<(GridCell, Vec<f64>, f64)> = cfg.exec.flat_map_chunks(sample.vertex_count(), CHUNK, |start, end| {
        sample
            .vertex_range(start, end)
            .into_iter()
            .filter_map(|v: GridVertex| {
                let p: Vec<f64> = v.0.iter().map(|&k| f64::from(k) / f64::from(sample_m)).collect();
                let r = economy::equilibrium_residual(econ, &p).ok()?;
                (r < etas[0]).then(|| (cover.cell_of_refined_vertex(&v, factor), p, r))
            })
            .collect()
    });

    let mut clusters: BTreeMap<GridCell, Vec<Cluster>> = BTreeMap::new();
    for (cell, p, r) in &hits {
        let levels = clusters
            .entry(cell.clone())
            .or_insert_with(|| vec![Cluster::new(n + 1); etas.len()]);
        for (cluster, eta) in levels.iter_mut().zip(&etas) {
            if r < eta {
                cluster.add(p);
            }
        }
    }

    let cells: Vec<SlncCell> = clusters
        .into_iter()
        .map(|(cell, levels)| {
            let diameters: Vec<f64> = levels.iter().map(Cluster::diameter).collect();
            let flagged = diameters.windows(2).any(|w| w[0] > 0.0 && w[1] >= w[0]);
            SlncCell {
                cell,
                counts: levels.iter().map(|c| c.count).collect(),
                diameters,
                flagged,
            }
        })
        .collect();
    let flagged = cells.iter().filter(|c| c.flagged).count();
    let verdict = if flagged == 0 {
        "no evidence against sequential local non-constancy".to_string()
    } else {
        format!("evidence against sequential local non-constancy in {flagged} cover cells")
    };
    Ok(SlncReport {
        epsilon: cfg.slnc_epsilon,
        etas,
        cover_m,
        sample_m,
        cells,
        flagged,
        verdict,
    })
}
