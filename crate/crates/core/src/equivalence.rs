//! From a proper labeling to an economy whose equilibria sit in fully
//! labeled cells.
//!
//! A vertex with label `l` is pushed by `tau` away from `e_l`: coordinate `l`
//! loses `tau` and every other coordinate gains `tau / n`. Extending that
//! affinely over each cell gives a map `phi` of the simplex into itself, and
//! `g(p) = phi(p) - mu(p) p` with `mu(p) = (p . phi(p)) / (p . p)` satisfies
//! Walras law exactly. On a cell missing label `i`, `phi_i(r) - r_i = tau / n`
//! everywhere, so a point where every `phi_j - p_j` is below `tau / n` lies
//! only in fully labeled cells.

use std::collections::HashMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::economy::{self, EconomyError, ExcessDemand};
use crate::labeling::{induced_label, LabelError, Labeling, Violation};
use crate::scalar::{rational_from_f64, Coord, Rational};
use crate::simplex_grid::{BarycentricPoint, GridCell, GridError, GridVertex, Subdivision};
use crate::solver::SolverConfig;
use crate::sperner_search::{follow_doors, SearchError};

#[derive(Debug, Error)]
pub enum EquivalenceError {
    #[error("labeling is not proper ({} violations)", .0.len())]
    ImproperLabeling(Vec<Violation>),
    #[error("certified point {point:?} lies in {cell}, which is not fully labeled")]
    NotFullyLabeled { cell: GridCell, point: Vec<String> },
    #[error("no certified equilibrium up to resolution {m_max}")]
    NotConverged { m_max: u32 },
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Label(#[from] LabelError),
    #[error(transparent)]
    Economy(#[from] EconomyError),
}

fn require_proper(lab: &Labeling) -> Result<(), EquivalenceError> {
    let violations = lab.validate_proper();
    if violations.is_empty() {
        Ok(())
    } else {
        Err(EquivalenceError::ImproperLabeling(violations))
    }
}

/// Half the smallest labeled coordinate over all grid vertices.
pub fn choose_tau(lab: &Labeling) -> Result<Rational, EquivalenceError> {
    require_proper(lab)?;
    let m = lab.sub().resolution();
    let k_min = lab.iter().map(|(v, l)| v.0[l]).min().expect("grid has vertices");
    Ok(Rational::from_grid(u64::from(k_min), 2 * u64::from(m)))
}

/// The piecewise-linear map a labeling induces.
#[derive(Debug, Clone)]
pub struct LabelInducedMap {
    lab: Labeling,
    tau: Rational,
}

impl LabelInducedMap {
    pub fn new(lab: Labeling) -> Result<Self, EquivalenceError> {
        let tau = choose_tau(&lab)?;
        Ok(Self { lab, tau })
    }

    pub fn labeling(&self) -> &Labeling {
        &self.lab
    }

    pub fn tau(&self) -> &Rational {
        &self.tau
    }

    /// The image of a grid vertex.
    pub fn vertex_image(&self, v: &GridVertex) -> Result<BarycentricPoint, EquivalenceError> {
        let label = self.lab.label(v)?;
        let m = u64::from(self.lab.sub().resolution());
        let n = self.lab.sub().dim();
        let up = &self.tau / Rational::from_integer(n.into());
        let coords = v
            .0
            .iter()
            .enumerate()
            .map(|(j, &k)| {
                let x = Rational::from_grid(u64::from(k), m);
                if j == label {
                    x - &self.tau
                } else {
                    x + &up
                }
            })
            .collect();
        Ok(BarycentricPoint::new(coords)?)
    }

    /// `phi(p)`: the affine extension over whichever cell contains `p`.
    pub fn eval(&self, p: &BarycentricPoint) -> Result<BarycentricPoint, EquivalenceError> {
        let sub = self.lab.sub();
        if p.dim() != sub.dim() {
            return Err(GridError::WrongLength {
                expected: sub.dim() + 1,
                found: p.coords().len(),
            }
            .into());
        }
        let (cell, weights) = sub.kuhn_cell(p);
        let mut out = vec![Rational::zero(); sub.dim() + 1];
        for (v, w) in sub.cell_grid_vertices(&cell)?.iter().zip(&weights) {
            if w.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(self.vertex_image(v)?.coords()) {
                *o += w * x;
            }
        }
        Ok(BarycentricPoint::new(out)?)
    }
}

pub fn build_map(lab: Labeling) -> Result<LabelInducedMap, EquivalenceError> {
    LabelInducedMap::new(lab)
}

/// `g(p) = phi(p) - mu(p) p`.
#[derive(Debug, Clone)]
pub struct InducedExcessDemand {
    map: LabelInducedMap,
}

impl InducedExcessDemand {
    pub fn new(map: LabelInducedMap) -> Self {
        Self { map }
    }

    pub fn map(&self) -> &LabelInducedMap {
        &self.map
    }

    pub fn mu(&self, p: &BarycentricPoint) -> Result<Rational, EquivalenceError> {
        let phi = self.map.eval(p)?;
        Ok(mu_of(p.coords(), phi.coords()))
    }

    fn eval_exact(&self, p: &[Rational]) -> Result<Vec<Rational>, EquivalenceError> {
        let p = BarycentricPoint::new(p.to_vec())?;
        let phi = self.map.eval(&p)?;
        let mu = mu_of(p.coords(), phi.coords());
        Ok(phi.coords().iter().zip(p.coords()).map(|(f, x)| f - &mu * x).collect())
    }
}

fn mu_of(p: &[Rational], phi: &[Rational]) -> Rational {
    let num: Rational = p.iter().zip(phi).map(|(a, b)| a * b).sum();
    let den: Rational = p.iter().map(|a| a * a).sum();
    num / den
}

pub fn induced_excess_demand(map: LabelInducedMap) -> InducedExcessDemand {
    InducedExcessDemand::new(map)
}

fn to_economy_error(e: EquivalenceError) -> EconomyError {
    match e {
        EquivalenceError::Economy(e) => e,
        EquivalenceError::Grid(e) => EconomyError::Grid(e),
        other => EconomyError::Invalid(other.to_string()),
    }
}

impl ExcessDemand<Rational> for InducedExcessDemand {
    fn goods(&self) -> usize {
        self.map.lab.sub().dim() + 1
    }

    fn excess_demand(&self, p: &[Rational]) -> Result<Vec<Rational>, EconomyError> {
        self.eval_exact(p).map_err(to_economy_error)
    }
}

/// Float access for the generic solver: prices are converted exactly to
/// rationals and renormalized, so the sum need only be one up to rounding.
impl ExcessDemand<f64> for InducedExcessDemand {
    fn goods(&self) -> usize {
        self.map.lab.sub().dim() + 1
    }

    fn excess_demand(&self, p: &[f64]) -> Result<Vec<f64>, EconomyError> {
        let exact = p
            .iter()
            .map(|&x| rational_from_f64(x).ok_or(EconomyError::NonFinite { good: 0 }))
            .collect::<Result<Vec<_>, _>>()?;
        let exact = economy::normalize_prices(&exact)?;
        let g = self.eval_exact(&exact).map_err(to_economy_error)?;
        Ok(g.iter().map(Coord::to_f64).collect())
    }
}

/// The lexicographically first cell of `sub` containing `p`.
pub fn locate_cell(sub: &Subdivision, p: &BarycentricPoint) -> Result<GridCell, GridError> {
    sub.locate_cell(p)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateBound {
    /// `max_j (phi_j(p) - p_j)` at the equilibrium candidate
    #[serde(with = "crate::scalar::serde_rational")]
    pub residual: Rational,
    /// `tau / n`, the gap every cell missing a label has
    #[serde(with = "crate::scalar::serde_rational")]
    pub bound: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub fully_labeled_cell: GridCell,
    #[serde(with = "crate::scalar::serde_rational_vec")]
    pub equilibrium: Vec<Rational>,
    #[serde(with = "crate::scalar::serde_rational")]
    pub tau: Rational,
    pub certificate: CertificateBound,
    /// resolution of the refined grid the equilibrium was found on
    pub resolution: u32,
}

impl Certificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// `max_j (phi_j(p) - p_j)`.
pub fn displacement(map: &LabelInducedMap, p: &BarycentricPoint) -> Result<Rational, EquivalenceError> {
    let phi = map.eval(p)?;
    Ok(phi
        .coords()
        .iter()
        .zip(p.coords())
        .map(|(f, x)| f - x)
        .max()
        .expect("at least two coordinates"))
}

/// Finds a fully labeled cell of `lab` by solving the induced economy in exact
/// arithmetic on refinements `m, m g, m g^2, ...` of the labeling's grid and
/// certifying the result.
pub fn sperner_via_equilibrium(lab: &Labeling, cfg: &SolverConfig) -> Result<Certificate, EquivalenceError> {
    let map = build_map(lab.clone())?;
    let econ = induced_excess_demand(map);
    let sub = *lab.sub();
    let n = sub.dim();
    let bound = econ.map().tau() / Rational::from_integer(n.into());
    let m_max = cfg.m_max.max(sub.resolution());
    let growth = cfg.growth.max(2);

    let mut fine_m = sub.resolution();
    loop {
        let fine = Subdivision::new(n, fine_m)?;
        let mut memo: HashMap<GridVertex, usize> = HashMap::new();
        let (cell, _) = follow_doors(&fine, |v: &GridVertex| -> Result<usize, EquivalenceError> {
            if let Some(&l) = memo.get(v) {
                return Ok(l);
            }
            let p = BarycentricPoint::from_vertex(v, fine_m);
            let psi = economy::price_map(&econ, p.coords())?;
            let l = induced_label(p.coords(), &psi)?;
            memo.insert(v.clone(), l);
            Ok(l)
        })?;
        let candidate = fine.cell_barycenter(&cell)?;
        let residual = displacement(econ.map(), &candidate)?;
        if residual < bound {
            let located = locate_cell(&sub, &candidate)?;
            if !lab.is_fully_labeled(&located)? {
                return Err(EquivalenceError::NotFullyLabeled {
                    cell: located,
                    point: candidate.coords().iter().map(crate::scalar::format_rational).collect(),
                });
            }
            return Ok(Certificate {
                fully_labeled_cell: located,
                equilibrium: candidate.into_coords(),
                tau: econ.map().tau().clone(),
                certificate: CertificateBound { residual, bound },
                resolution: fine_m,
            });
        }
        match fine_m.checked_mul(growth).filter(|&next| next <= m_max) {
            Some(next) => fine_m = next,
            None => return Err(EquivalenceError::NotConverged { m_max }),
        }
    }
}

/// Relabels a cell's vertices so vertex `i` carries label `i`. Only defined
/// for fully labeled cells.
pub fn vertices_by_label(lab: &Labeling, cell: &GridCell) -> Result<Vec<GridVertex>, EquivalenceError> {
    let sub = lab.sub();
    let mut out: Vec<Option<GridVertex>> = vec![None; sub.dim() + 1];
    for v in sub.cell_grid_vertices(cell)? {
        let l = lab.label(&v)?;
        out[l] = Some(v);
    }
    out.into_iter()
        .map(|v| {
            v.ok_or_else(|| EquivalenceError::NotFullyLabeled {
                cell: cell.clone(),
                point: Vec::new(),
            })
        })
        .collect()
}

/// Whether `p` is a fixed point of `phi`.
pub fn is_fixed_point(map: &LabelInducedMap, p: &BarycentricPoint) -> Result<bool, EquivalenceError> {
    Ok(map.eval(p)? == *p)
}

/// `sum_j phi_j(p)`; exactly one for every simplex point.
pub fn image_sum(map: &LabelInducedMap, p: &BarycentricPoint) -> Result<Rational, EquivalenceError> {
    Ok(map.eval(p)?.coords().iter().sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sperner_search::enumerate_fully_labeled;
    use num_bigint::BigInt;
    use num_traits::One;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(BigInt::from(a), BigInt::from(b))
    }

    fn point(xs: &[(i64, i64)]) -> BarycentricPoint {
        BarycentricPoint::new(xs.iter().map(|&(a, b)| q(a, b)).collect()).unwrap()
    }

    /// n = 1, m = 2, labels 0, 0, 1 going from e0 to e1.
    fn segment() -> Labeling {
        Labeling::from_labels(Subdivision::new(1, 2).unwrap(), vec![1, 0, 0]).unwrap()
    }

    fn vertex_labeling(n: usize) -> Labeling {
        let sub = Subdivision::new(n, 1).unwrap();
        let labels = sub.vertices().map(|v| v.0.iter().position(|&k| k == 1).unwrap()).collect();
        Labeling::from_labels(sub, labels).unwrap()
    }

    #[test]
    fn tau_examples() {
        assert_eq!(choose_tau(&segment()).unwrap(), q(1, 4));
        assert_eq!(choose_tau(&vertex_labeling(2)).unwrap(), q(1, 2));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for m in 1..=6 {
            let lab = Labeling::random_proper(Subdivision::new(2, m).unwrap(), &mut rng);
            assert!(choose_tau(&lab).unwrap() >= q(1, 2 * i64::from(m)));
        }
        let improper = Labeling::from_labels(Subdivision::new(1, 1).unwrap(), vec![0, 1]).unwrap();
        assert!(matches!(choose_tau(&improper), Err(EquivalenceError::ImproperLabeling(_))));
    }

    #[test]
    fn vertex_images_follow_the_push_rule() {
        let map = build_map(segment()).unwrap();
        // (1/2, 1/2) has label 0: loses 1/4 on coordinate 0
        let img = map.vertex_image(&GridVertex(vec![1, 1])).unwrap();
        assert_eq!(img.coords(), &[q(1, 4), q(3, 4)]);
        let img = map.vertex_image(&GridVertex(vec![0, 2])).unwrap();
        assert_eq!(img.coords(), &[q(1, 4), q(3, 4)]);
        let img = map.vertex_image(&GridVertex(vec![2, 0])).unwrap();
        assert_eq!(img.coords(), &[q(3, 4), q(1, 4)]);
    }

    #[test]
    fn missing_label_gap_is_tau_over_n() {
        let map = build_map(segment()).unwrap();
        // the cell from (1, 0) to (1/2, 1/2) carries only label 0
        let b = point(&[(3, 4), (1, 4)]);
        let phi = map.eval(&b).unwrap();
        assert_eq!(&phi.coords()[1] - &b.coords()[1], q(1, 4));
    }

    #[test]
    fn g_at_a_non_fully_labeled_barycenter_by_hand() {
        let econ = induced_excess_demand(build_map(segment()).unwrap());
        // p = (3/4, 1/4); phi = average of (3/4, 1/4) and (1/4, 3/4) = (1/2, 1/2)
        // mu = (3/8 + 1/8) / (9/16 + 1/16) = 4/5
        // g = (1/2 - 3/5, 1/2 - 1/5) = (-1/10, 3/10)
        let p = [q(3, 4), q(1, 4)];
        assert_eq!(econ.mu(&point(&[(3, 4), (1, 4)])).unwrap(), q(4, 5));
        assert_eq!(economy::evaluate(&econ, &p).unwrap().0, vec![q(-1, 10), q(3, 10)]);
        assert_eq!(economy::walras_residual(&econ, &p).unwrap(), q(0, 1));
    }

    #[test]
    fn fixed_point_means_zero_excess_demand() {
        let lab = segment();
        let econ = induced_excess_demand(build_map(lab.clone()).unwrap());
        let cell = enumerate_fully_labeled(&lab).unwrap().cells[0].clone();
        let b = lab.sub().cell_barycenter(&cell).unwrap();
        assert!(is_fixed_point(econ.map(), &b).unwrap());
        assert_eq!(econ.mu(&b).unwrap(), Rational::one());
        assert!(economy::evaluate(&econ, b.coords()).unwrap().iter().all(Zero::is_zero));
    }

    #[test]
    fn boundary_points_are_pushed_inward() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (n, m) in [(1, 4), (2, 4), (3, 3)] {
            let lab = Labeling::random_proper(Subdivision::new(n, m).unwrap(), &mut rng);
            let map = build_map(lab.clone()).unwrap();
            for v in lab.sub().vertices() {
                let p = BarycentricPoint::from_vertex(&v, m);
                let phi = map.eval(&p).unwrap();
                assert_eq!(image_sum(&map, &p).unwrap(), Rational::one());
                for (i, &k) in v.0.iter().enumerate() {
                    if k == 0 {
                        assert!(phi.coords()[i] > p.coords()[i]);
                    }
                }
            }
        }
    }

    #[test]
    fn pipeline_examples() {
        let lab = segment();
        let cert = sperner_via_equilibrium(&lab, &SolverConfig::default()).unwrap();
        assert_eq!(enumerate_fully_labeled(&lab).unwrap().cells, vec![cert.fully_labeled_cell.clone()]);
        assert!(cert.certificate.residual < cert.certificate.bound);
        assert_eq!(Certificate::from_json(&cert.to_json()).unwrap(), cert);
        assert!(cert.to_json().contains("\"tau\": \"1/4\""));

        let lab = vertex_labeling(2);
        let cert = sperner_via_equilibrium(&lab, &SolverConfig::default()).unwrap();
        assert_eq!(cert.fully_labeled_cell, lab.sub().cells().next().unwrap());
    }

    #[test]
    fn pipeline_agrees_with_enumeration_on_random_labelings() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for (n, m) in [(1, 5), (2, 3), (2, 4), (3, 2)] {
            for _ in 0..4 {
                let lab = Labeling::random_proper(Subdivision::new(n, m).unwrap(), &mut rng);
                let cert = sperner_via_equilibrium(&lab, &SolverConfig::default()).unwrap();
                let all = enumerate_fully_labeled(&lab).unwrap().cells;
                assert!(all.contains(&cert.fully_labeled_cell));
            }
        }
    }

    #[test]
    fn barycenter_of_relabeled_fully_labeled_cell_is_fixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let lab = Labeling::random_proper(Subdivision::new(2, 5).unwrap(), &mut rng);
        let map = build_map(lab.clone()).unwrap();
        for cell in enumerate_fully_labeled(&lab).unwrap().cells {
            let ordered = vertices_by_label(&lab, &cell).unwrap();
            let pts: Vec<_> = ordered.iter().map(|v| BarycentricPoint::from_vertex(v, 5)).collect();
            let b = BarycentricPoint::barycenter(&pts);
            assert_eq!(map.eval(&b).unwrap(), b);
        }
    }

    proptest! {
        #[test]
        fn walras_law_is_exact(seed in 0u64..1000, raw in prop::collection::vec(0i64..50, 3)) {
            prop_assume!(raw.iter().any(|&x| x > 0));
            let lab = Labeling::random_proper(Subdivision::new(2, 3).unwrap(), &mut ChaCha8Rng::seed_from_u64(seed));
            let econ = induced_excess_demand(build_map(lab).unwrap());
            let p = economy::normalize_prices(&raw.iter().map(|&x| q(x, 1)).collect::<Vec<_>>()).unwrap();
            prop_assert_eq!(economy::walras_residual(&econ, &p).unwrap(), q(0, 1));
        }
    }
}
