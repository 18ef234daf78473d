//! Approximate equilibria by refining Sperner labelings.
//!
//! At each resolution every grid vertex gets the label the price map induces
//! there, path following finds a fully labeled cell, and a candidate price is
//! read off that cell. The mesh is refined geometrically until the candidate
//! clears all markets to within `tol`.

mod slnc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::economy::{self, EconomyError, ExcessDemand};
use crate::exec::Execution;
use crate::labeling::{induced_label, Labeling};
use crate::simplex_grid::{GridCell, GridVertex, Subdivision};
use crate::sperner_search::{path_follow, SearchError};

pub use slnc::{slnc_diagnostic, SlncCell, SlncReport};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid solver config: {0}")]
    InvalidConfig(String),
    #[error("labeling failed at vertex {vertex:?}: {source}")]
    LabelingFailed { vertex: Vec<u32>, source: EconomyError },
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Economy(#[from] EconomyError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub m_start: u32,
    pub m_max: u32,
    pub growth: u32,
    pub tol: f64,
    pub slnc_eta: f64,
    pub slnc_epsilon: f64,
    /// how many times `slnc_eta` is halved
    pub slnc_halvings: u32,
    #[serde(skip)]
    pub exec: Execution,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            m_start: 4,
            m_max: 4096,
            growth: 2,
            tol: 1e-6,
            slnc_eta: 1e-2,
            slnc_epsilon: 0.34,
            slnc_halvings: 4,
            exec: Execution::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |msg: &str| Err(SolverError::InvalidConfig(msg.to_string()));
        if self.m_start < 1 {
            return bad("m_start must be at least 1");
        }
        if self.m_max < self.m_start {
            return bad("m_max must be at least m_start");
        }
        if self.growth < 2 {
            return bad("growth must be at least 2");
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return bad("tol must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceEntry {
    pub m: u32,
    pub cell: GridCell,
    pub candidate: Vec<f64>,
    pub residual: f64,
    pub walras: f64,
    pub tail_diameter: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquilibriumReport {
    pub prices: Vec<f64>,
    pub residual: f64,
    pub walras: f64,
    pub converged: bool,
    pub tail_diameter: f64,
    pub trace: Vec<TraceEntry>,
}

impl EquilibriumReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// One `m,residual,walras,tail_diameter` row per refinement level.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,residual,walras,tail_diameter\n");
        for t in &self.trace {
            out.push_str(&format!("{},{:e},{:e},{:e}\n", t.m, t.residual, t.walras, t.tail_diameter));
        }
        out
    }
}

fn grid_point(v: &GridVertex, m: u32) -> Vec<f64> {
    v.0.iter().map(|&k| f64::from(k) / f64::from(m)).collect()
}

/// Label of grid vertex `v` under the labeling induced by the price map.
///
/// For economies undefined at zero prices, a boundary vertex is evaluated at
/// `(1 - kappa) v + kappa b` with `b` the simplex barycenter, which keeps
/// every price at least `1/(2m)`; the label is still taken from the support
/// of `v` so the labeling stays proper.
pub fn vertex_label<E: ExcessDemand + ?Sized>(econ: &E, v: &GridVertex, m: u32) -> Result<usize, EconomyError> {
    let p = grid_point(v, m);
    let on_boundary = v.0.contains(&0);
    if !(econ.needs_interior() && on_boundary) {
        let phi = economy::price_map(econ, &p)?;
        if let Ok(label) = induced_label(&p, &phi) {
            return Ok(label);
        }
        return Ok(closest_support_label(v, &p, &phi));
    }
    let goods = p.len() as f64;
    let kappa = (goods / (2.0 * f64::from(m))).min(0.5);
    let shifted: Vec<f64> = p.iter().map(|x| (1.0 - kappa) * x + kappa / goods).collect();
    let shifted = economy::normalize_prices(&shifted)?;
    let phi = economy::price_map(econ, &shifted)?;
    Ok(v.support()
        .find(|&i| phi[i] <= shifted[i])
        .unwrap_or_else(|| closest_support_label(v, &shifted, &phi)))
}

/// The support index where `phi` gains least over `p`.
fn closest_support_label(v: &GridVertex, p: &[f64], phi: &[f64]) -> usize {
    v.support()
        .min_by(|&i, &j| (phi[i] - p[i]).total_cmp(&(phi[j] - p[j])))
        .expect("grid vertex has nonempty support")
}

pub fn label_grid<E: ExcessDemand + ?Sized>(econ: &E, sub: Subdivision, exec: Execution) -> Result<Labeling, SolverError> {
    let m = sub.resolution();
    Labeling::from_fn(sub, exec, |v| {
        vertex_label(econ, v, m).map_err(|source| SolverError::LabelingFailed {
            vertex: v.0.clone(),
            source,
        })
    })
}

/// Max pairwise max-norm distance among the last three candidates, and the
/// last candidate. A single candidate has tail diameter zero.
pub fn cauchy_extract(trace: &[Vec<f64>]) -> (Vec<f64>, f64) {
    let last = trace.last().expect("trace is nonempty").clone();
    let tail = &trace[trace.len().saturating_sub(3)..];
    let mut diameter: f64 = 0.0;
    for (i, a) in tail.iter().enumerate() {
        for b in &tail[i + 1..] {
            diameter = diameter.max(economy::max_norm(a, b));
        }
    }
    (last, diameter)
}

struct Candidate {
    point: Vec<f64>,
    residual: f64,
    walras: f64,
}

fn score<E: ExcessDemand + ?Sized>(econ: &E, point: Vec<f64>) -> Option<Candidate> {
    let f = economy::evaluate(econ, &point).ok()?;
    let walras = point.iter().zip(f.iter()).map(|(a, b)| a * b).sum::<f64>().abs();
    Some(Candidate {
        residual: economy::residual_of_demand(&f),
        walras,
        point,
    })
}

/// Point where the affine interpolant of `f` through the cell vertices comes
/// closest to zero. The fully labeled cell need not contain the root, so
/// points up to one cell width outside are accepted; the result must still
/// be a price vector.
fn linear_root<E: ExcessDemand + ?Sized>(econ: &E, vertices: &[Vec<f64>]) -> Option<Vec<f64>> {
    let values = vertices
        .iter()
        .map(|v| economy::evaluate(econ, v).ok())
        .collect::<Option<Vec<_>>>()?;
    let goods = values[0].len();
    let d = vertices.len() - 1;
    let a = DMatrix::from_fn(goods, d, |i, k| values[k + 1][i] - values[0][i]);
    let b = DVector::from_fn(goods, |i, _| -values[0][i]);
    let mu = a.svd(true, true).solve(&b, 1e-14).ok()?;
    let lambda0 = 1.0 - mu.sum();
    if lambda0 < -1.0 || mu.iter().any(|&x| x < -1.0) {
        return None;
    }
    let mut point = vertices[0].iter().map(|x| lambda0 * x).collect::<Vec<_>>();
    for (k, w) in mu.iter().enumerate() {
        for (pi, x) in point.iter_mut().zip(&vertices[k + 1]) {
            *pi += w * x;
        }
    }
    if point.iter().any(|&x| x < 0.0) {
        return None;
    }
    economy::normalize_prices(&point).ok()
}

/// Candidate price read off a fully labeled cell: the barycenter, or the
/// root of the cell's affine interpolant of `f` when that clears markets
/// better.
fn cell_candidate<E: ExcessDemand + ?Sized>(econ: &E, sub: &Subdivision, cell: &GridCell) -> Result<Candidate, SolverError> {
    let m = sub.resolution();
    let vertices: Vec<Vec<f64>> = sub
        .cell_grid_vertices(cell)
        .map_err(SearchError::from)?
        .iter()
        .map(|v| grid_point(v, m))
        .collect();
    let k = vertices.len() as f64;
    let mut bary = vec![0.0; vertices[0].len()];
    for v in &vertices {
        for (b, x) in bary.iter_mut().zip(v) {
            *b += x / k;
        }
    }
    let bary = economy::normalize_prices(&bary)?;
    let f = economy::evaluate(econ, &bary)?;
    let mut best = Candidate {
        residual: economy::residual_of_demand(&f),
        walras: bary.iter().zip(f.iter()).map(|(a, b)| a * b).sum::<f64>().abs(),
        point: bary,
    };
    if let Some(root) = linear_root(econ, &vertices).and_then(|p| score(econ, p)) {
        if root.residual < best.residual {
            best = root;
        }
    }
    Ok(best)
}

pub fn solve<E: ExcessDemand + ?Sized>(econ: &E, cfg: &SolverConfig) -> Result<EquilibriumReport, SolverError> {
    cfg.validate()?;
    let n = econ.goods() - 1;
    let mut trace: Vec<TraceEntry> = Vec::new();
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    let mut m = cfg.m_start;
    loop {
        let sub = Subdivision::new(n, m).map_err(SearchError::from)?;
        let lab = label_grid(econ, sub, cfg.exec)?;
        let cell = path_follow(&lab)?.cells.remove(0);
        let cand = cell_candidate(econ, &sub, &cell)?;
        candidates.push(cand.point.clone());
        let (_, tail_diameter) = cauchy_extract(&candidates);
        let done = cand.residual <= cfg.tol;
        trace.push(TraceEntry {
            m,
            cell,
            candidate: cand.point,
            residual: cand.residual,
            walras: cand.walras,
            tail_diameter,
        });
        let next = m.checked_mul(cfg.growth).filter(|&next| next <= cfg.m_max);
        match next {
            Some(next) if !done => m = next,
            _ => break,
        }
    }
    let last = trace.last().expect("at least one level");
    Ok(EquilibriumReport {
        prices: last.candidate.clone(),
        residual: last.residual,
        walras: last.walras,
        converged: last.residual <= cfg.tol,
        tail_diameter: last.tail_diameter,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::economy::{equilibrium_residual, price_map, CobbDouglas, TableEconomy};

    fn two_good_equilibrium(a: [f64; 2], b: [f64; 2]) -> f64 {
        // market for good 0: a0 p0 + b0 p1 = p0, so p0 / p1 = b0 / a1
        b[0] / (b[0] + a[1])
    }

    #[test]
    fn induced_label_of_symmetric_price_map() {
        let e = CobbDouglas::symmetric();
        let p = [0.5, 0.5];
        let phi = price_map(&e, &p).unwrap();
        assert_eq!(phi, p.to_vec());
        assert_eq!(induced_label(&p, &phi).unwrap(), 0);
        // at (3/4, 1/4) good 1 is in excess demand, so phi_0 < p_0
        assert_eq!(vertex_label(&e, &GridVertex(vec![3, 1]), 4).unwrap(), 0);
        assert_eq!(vertex_label(&e, &GridVertex(vec![1, 3]), 4).unwrap(), 1);
    }

    #[test]
    fn boundary_labels_are_proper() {
        let e = CobbDouglas::new(vec![
            crate::economy::Consumer {
                alpha: vec![0.2, 0.3, 0.5],
                endowment: vec![1.0, 0.0, 2.0],
            },
            crate::economy::Consumer {
                alpha: vec![0.6, 0.2, 0.2],
                endowment: vec![0.0, 1.0, 0.5],
            },
        ])
        .unwrap();
        for m in [1, 2, 5] {
            let lab = label_grid(&e, Subdivision::new(2, m).unwrap(), Execution::Sequential).unwrap();
            assert!(lab.is_proper(), "m = {m}");
        }
    }

    #[test]
    fn symmetric_converges_to_half() {
        let r = solve(&CobbDouglas::symmetric(), &SolverConfig::default()).unwrap();
        assert!(r.converged);
        assert!((r.prices[0] - 0.5).abs() <= 1e-6);
        assert!(r.walras <= 1e-12);
        let sub = Subdivision::new(1, r.trace.last().unwrap().m).unwrap();
        assert!(r.tail_diameter <= crate::scalar::Coord::to_f64(&sub.mesh_diameter()));
    }

    #[test]
    fn asymmetric_two_good_matches_closed_form() {
        for (a, b) in [([0.75, 0.25], [0.25, 0.75]), ([0.6, 0.4], [0.3, 0.7]), ([0.2, 0.8], [0.9, 0.1])] {
            let e = CobbDouglas::two_good(a, b);
            let r = solve(&e, &SolverConfig::default()).unwrap();
            let p0 = two_good_equilibrium(a, b);
            assert!(r.converged, "{a:?} {b:?}: {:?}", r.residual);
            assert!((r.prices[0] - p0).abs() <= 1e-6, "{} vs {p0}", r.prices[0]);
            let phi = price_map(&e, &r.prices).unwrap();
            assert!(economy::max_norm(&phi, &r.prices) <= 2.0 * 1e-6);
            assert!(r.residual <= r.trace[0].residual);
        }
    }

    #[test]
    fn small_m_max_reports_non_convergence() {
        let cfg = SolverConfig {
            m_start: 2,
            m_max: 2,
            ..SolverConfig::default()
        };
        let e = CobbDouglas::two_good([0.6, 0.4], [0.3, 0.7]);
        let r = solve(&e, &cfg).unwrap();
        assert!(!r.converged);
        assert_eq!(r.trace.len(), 1);
        assert_eq!(r.tail_diameter, 0.0);
    }

    #[test]
    fn three_goods_residual_falls() {
        let e = CobbDouglas::new(vec![
            crate::economy::Consumer {
                alpha: vec![0.5, 0.25, 0.25],
                endowment: vec![1.0, 0.0, 0.0],
            },
            crate::economy::Consumer {
                alpha: vec![0.2, 0.3, 0.5],
                endowment: vec![0.0, 1.0, 1.0],
            },
        ])
        .unwrap();
        let cfg = SolverConfig {
            m_max: 256,
            ..SolverConfig::default()
        };
        let r = solve(&e, &cfg).unwrap();
        assert!(r.residual <= r.trace[0].residual);
        assert!(r.residual <= 1e-4, "{}", r.residual);
        assert_eq!(r.residual, equilibrium_residual(&e, &r.prices).unwrap());
    }

    #[test]
    fn cauchy_extract_conventions() {
        assert_eq!(cauchy_extract(&[vec![0.3, 0.7]]), (vec![0.3, 0.7], 0.0));
        let same = vec![vec![0.5, 0.5]; 4];
        assert_eq!(cauchy_extract(&same).1, 0.0);
        let t = vec![vec![0.0, 1.0], vec![0.4, 0.6], vec![0.5, 0.5], vec![0.45, 0.55]];
        assert!((cauchy_extract(&t).1 - 0.1).abs() < 1e-15);
    }

    #[test]
    fn table_economy_solves_without_interior_shift() {
        let e = TableEconomy::from_fn(Subdivision::new(1, 8).unwrap(), |p| {
            // equilibrium at the grid point p0 = 3/8; f1 = -p0 f0 / p1
            vec![(3.0 - 8.0 * p[0]) * p[1], -p[0] * (3.0 - 8.0 * p[0])]
        })
        .unwrap();
        let r = solve(&e, &SolverConfig::default()).unwrap();
        assert!(r.converged);
        assert!((r.prices[0] - 0.375).abs() < 1e-6);
    }

    #[test]
    fn report_json_and_csv() {
        let cfg = SolverConfig {
            m_max: 16,
            ..SolverConfig::default()
        };
        let r = solve(&CobbDouglas::two_good([0.6, 0.4], [0.3, 0.7]), &cfg).unwrap();
        let again = solve(&CobbDouglas::two_good([0.6, 0.4], [0.3, 0.7]), &cfg).unwrap();
        assert_eq!(r.to_json(), again.to_json());
        assert_eq!(EquilibriumReport::from_json(&r.to_json()).unwrap(), r);
        let csv = r.to_csv();
        assert_eq!(csv.lines().count(), r.trace.len() + 1);
        assert!(csv.starts_with("m,residual,walras,tail_diameter"));
    }

    #[test]
    fn config_validation() {
        let ok = SolverConfig::default();
        assert!(ok.validate().is_ok());
        for bad in [
            SolverConfig { m_start: 0, ..ok.clone() },
            SolverConfig { m_max: 1, ..ok.clone() },
            SolverConfig { growth: 1, ..ok.clone() },
            SolverConfig { tol: 0.0, ..ok.clone() },
        ] {
            assert!(matches!(bad.validate(), Err(SolverError::InvalidConfig(_))));
        }
    }
}
