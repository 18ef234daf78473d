use super::{EconomyError, ExcessDemand};

#[derive(Debug, Clone, PartialEq)]
pub struct Consumer {
    /// expenditure shares, summing to one
    pub alpha: Vec<f64>,
    pub endowment: Vec<f64>,
}

/// Pure exchange among Cobb-Douglas consumers. Consumer `k` spends the share
/// `alpha_{k,i}` of its wealth `p . omega_k` on good `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CobbDouglas {
    consumers: Vec<Consumer>,
    supply: Vec<f64>,
}

const SHARE_TOL: f64 = 1e-12;

impl CobbDouglas {
    pub fn new(consumers: Vec<Consumer>) -> Result<Self, EconomyError> {
        let goods = consumers
            .first()
            .map(|c| c.alpha.len())
            .ok_or_else(|| EconomyError::Invalid("no consumers".into()))?;
        if goods < 2 {
            return Err(EconomyError::Invalid("need at least two goods".into()));
        }
        let mut supply = vec![0.0; goods];
        for (k, c) in consumers.iter().enumerate() {
            if c.alpha.len() != goods || c.endowment.len() != goods {
                return Err(EconomyError::Invalid(format!("consumer {k} does not list {goods} goods")));
            }
            if c.alpha.iter().chain(&c.endowment).any(|x| !x.is_finite() || *x < 0.0) {
                return Err(EconomyError::Invalid(format!(
                    "consumer {k} has a negative or non-finite entry"
                )));
            }
            let share: f64 = c.alpha.iter().sum();
            if (share - 1.0).abs() > SHARE_TOL {
                return Err(EconomyError::Invalid(format!("shares of consumer {k} sum to {share}")));
            }
            for (s, w) in supply.iter_mut().zip(&c.endowment) {
                *s += w;
            }
        }
        if let Some(i) = supply.iter().position(|&s| s <= 0.0) {
            return Err(EconomyError::Invalid(format!("nobody is endowed with good {i}")));
        }
        Ok(Self { consumers, supply })
    }

    /// Two consumers with equal shares, each owning one unit of one good.
    pub fn symmetric() -> Self {
        Self::two_good([0.5, 0.5], [0.5, 0.5])
    }

    /// Two goods; consumer A owns one unit of good 0 and has shares `a`,
    /// consumer B owns one unit of good 1 and has shares `b`.
    pub fn two_good(a: [f64; 2], b: [f64; 2]) -> Self {
        Self::new(vec![
            Consumer {
                alpha: a.to_vec(),
                endowment: vec![1.0, 0.0],
            },
            Consumer {
                alpha: b.to_vec(),
                endowment: vec![0.0, 1.0],
            },
        ])
        .expect("valid two-good economy")
    }

    pub fn consumers(&self) -> &[Consumer] {
        &self.consumers
    }
}

impl ExcessDemand<f64> for CobbDouglas {
    fn goods(&self) -> usize {
        self.supply.len()
    }

    fn excess_demand(&self, p: &[f64]) -> Result<Vec<f64>, EconomyError> {
        if let Some(good) = p.iter().position(|&x| x <= 0.0) {
            return Err(EconomyError::ZeroPriceSingular { good });
        }
        let mut f: Vec<f64> = self.supply.iter().map(|s| -s).collect();
        for c in &self.consumers {
            let wealth: f64 = p.iter().zip(&c.endowment).map(|(a, b)| a * b).sum();
            for ((fi, ai), pi) in f.iter_mut().zip(&c.alpha).zip(p) {
                *fi += ai * wealth / pi;
            }
        }
        Ok(f)
    }

    fn needs_interior(&self) -> bool {
        true
    }
}
