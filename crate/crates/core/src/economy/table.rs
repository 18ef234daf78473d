use super::{EconomyError, ExcessDemand, WALRAS_TOL};
use crate::simplex_grid::{GridVertex, Subdivision};

/// Excess demand sampled at the vertices of a grid and extended by
/// barycentric interpolation.
///
/// Interpolation alone does not preserve Walras law inside a cell, so the
/// interpolated vector is projected onto `{f : p . f = 0}`. At grid vertices
/// the projection is the identity up to rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct TableEconomy {
    sub: Subdivision,
    /// indexed by vertex rank
    values: Vec<Vec<f64>>,
}

impl TableEconomy {
    pub fn new<I>(sub: Subdivision, entries: I) -> Result<Self, EconomyError>
    where
        I: IntoIterator<Item = (GridVertex, Vec<f64>)>,
    {
        let goods = sub.dim() + 1;
        let mut values: Vec<Option<Vec<f64>>> = vec![None; sub.vertex_count()];
        for (vertex, f) in entries {
            let rank = sub.vertex_rank(&vertex)?;
            if f.len() != goods {
                return Err(EconomyError::WrongGoodCount {
                    expected: goods,
                    found: f.len(),
                });
            }
            if let Some(good) = f.iter().position(|x| !x.is_finite()) {
                return Err(EconomyError::NonFinite { good });
            }
            let m = f64::from(sub.resolution());
            let residual: f64 = vertex.0.iter().zip(&f).map(|(&k, fi)| f64::from(k) / m * fi).sum();
            if residual.abs() > WALRAS_TOL {
                return Err(EconomyError::WalrasViolation {
                    vertex: vertex.0,
                    residual: residual.abs(),
                });
            }
            if values[rank].replace(f).is_some() {
                return Err(EconomyError::Invalid(format!("vertex {:?} listed twice", vertex.0)));
            }
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(rank, f)| {
                f.ok_or_else(|| EconomyError::Invalid(format!("no value for vertex {:?}", sub.vertex_at(rank).0)))
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { sub, values })
    }

    /// Samples `f` at every grid vertex.
    pub fn from_fn<F>(sub: Subdivision, f: F) -> Result<Self, EconomyError>
    where
        F: Fn(&[f64]) -> Vec<f64>,
    {
        let m = f64::from(sub.resolution());
        let entries: Vec<_> = sub
            .vertices()
            .map(|v| {
                let p: Vec<f64> = v.0.iter().map(|&k| f64::from(k) / m).collect();
                let value = f(&p);
                (v, value)
            })
            .collect();
        Self::new(sub, entries)
    }

    /// No trade anywhere: `f = 0`, so every price is an equilibrium.
    pub fn zero(n: usize, m: u32) -> Result<Self, EconomyError> {
        Self::from_fn(Subdivision::new(n, m)?, |p| vec![0.0; p.len()])
    }

    pub fn sub(&self) -> &Subdivision {
        &self.sub
    }

    pub fn entries(&self) -> impl Iterator<Item = (GridVertex, &[f64])> + '_ {
        self.sub.vertices().zip(self.values.iter().map(Vec::as_slice))
    }
}

impl ExcessDemand<f64> for TableEconomy {
    fn goods(&self) -> usize {
        self.sub.dim() + 1
    }

    fn excess_demand(&self, p: &[f64]) -> Result<Vec<f64>, EconomyError> {
        let (cell, weights) = self.sub.locate_f64(p);
        let mut f = vec![0.0; self.goods()];
        for (v, w) in self.sub.cell_grid_vertices(&cell)?.iter().zip(&weights) {
            let value = &self.values[self.sub.rank_unchecked(&v.0)];
            for (fi, x) in f.iter_mut().zip(value) {
                *fi += w * x;
            }
        }
        let pf: f64 = p.iter().zip(&f).map(|(a, b)| a * b).sum();
        let pp: f64 = p.iter().map(|a| a * a).sum();
        for (fi, pi) in f.iter_mut().zip(p) {
            *fi -= pi * pf / pp;
        }
        Ok(f)
    }
}
