//! Sperner labelings of a subdivision: construction, validation, the labeling
//! induced by a self-map of the simplex, and the JSON labeling file.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Execution;
use crate::scalar::Coord;
use crate::simplex_grid::{GridCell, GridError, GridVertex, Subdivision};

#[derive(Debug, Error)]
pub enum LabelError {
    #[error("vertex {0:?} has no label")]
    MissingLabel(Vec<u32>),
    #[error("vertex {0:?} is labeled more than once")]
    DuplicateVertex(Vec<u32>),
    #[error("label {label} at vertex {vertex:?} is outside 0..={n}")]
    LabelOutOfRange { vertex: Vec<u32>, label: usize, n: usize },
    #[error("expected {expected} labels, found {found}")]
    WrongCount { expected: usize, found: usize },
    #[error("map image is not a simplex point: {0}")]
    MapLeavesSimplex(String),
    #[error("no coordinate satisfies the selection rule")]
    NoAdmissibleLabel,
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("labeling file: {0}")]
    Json(#[from] serde_json::Error),
}

/// Which labeling rule a vertex breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpernerRule {
    /// Unit vertex `e_k` must carry label `k`.
    UnitVertex,
    /// A vertex on a face must carry the label of a vertex of that face.
    Face,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub vertex: GridVertex,
    pub label: usize,
    pub rule: SpernerRule,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rule = match self.rule {
            SpernerRule::UnitVertex => "unit vertex must carry its own index",
            SpernerRule::Face => "label must index a positive coordinate",
        };
        write!(f, "vertex {:?} labeled {}: {}", self.vertex.0, self.label, rule)
    }
}

/// A total map from grid vertices to labels in `0..=n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Labeling {
    sub: Subdivision,
    /// indexed by vertex rank
    labels: Vec<u16>,
}

impl Labeling {
    /// Labels listed in vertex rank (lexicographic) order.
    pub fn from_labels(sub: Subdivision, labels: Vec<usize>) -> Result<Self, LabelError> {
        let expected = sub.vertex_count();
        if labels.len() != expected {
            return Err(LabelError::WrongCount {
                expected,
                found: labels.len(),
            });
        }
        let n = sub.dim();
        if let Some(rank) = labels.iter().position(|&l| l > n) {
            return Err(LabelError::LabelOutOfRange {
                vertex: sub.vertex_at(rank).0,
                label: labels[rank],
                n,
            });
        }
        Ok(Self {
            sub,
            labels: labels.into_iter().map(|l| l as u16).collect(),
        })
    }

    pub fn from_pairs<I>(sub: Subdivision, pairs: I) -> Result<Self, LabelError>
    where
        I: IntoIterator<Item = (GridVertex, usize)>,
    {
        let mut labels: Vec<Option<u16>> = vec![None; sub.vertex_count()];
        for (vertex, label) in pairs {
            let rank = sub.vertex_rank(&vertex)?;
            if label > sub.dim() {
                return Err(LabelError::LabelOutOfRange {
                    vertex: vertex.0,
                    label,
                    n: sub.dim(),
                });
            }
            if labels[rank].replace(label as u16).is_some() {
                return Err(LabelError::DuplicateVertex(vertex.0));
            }
        }
        let labels = labels
            .into_iter()
            .enumerate()
            .map(|(rank, l)| l.ok_or_else(|| LabelError::MissingLabel(sub.vertex_at(rank).0)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { sub, labels })
    }

    /// Labels every vertex with `f`, data-parallel over vertex ranges.
    pub fn from_fn<E, F>(sub: Subdivision, exec: Execution, f: F) -> Result<Self, E>
    where
        E: Send,
        F: Fn(&GridVertex) -> Result<usize, E> + Sync + Send,
    {
        let labels = exec.try_flat_map_chunks(sub.vertex_count(), 2048, |start, end| {
            sub.vertex_range(start, end)
                .iter()
                .map(|v| f(v).map(|l| l as u16))
                .collect()
        })?;
        debug_assert!(labels.iter().all(|&l| usize::from(l) <= sub.dim()));
        Ok(Self { sub, labels })
    }

    /// A uniformly random proper labeling: each vertex gets a label drawn from
    /// its positive coordinates.
    pub fn random_proper<R: Rng + ?Sized>(sub: Subdivision, rng: &mut R) -> Self {
        let labels = sub
            .vertices()
            .map(|v| {
                let support: Vec<usize> = v.support().collect();
                support[rng.gen_range(0..support.len())] as u16
            })
            .collect();
        Self { sub, labels }
    }

    pub fn sub(&self) -> &Subdivision {
        &self.sub
    }

    pub fn label(&self, v: &GridVertex) -> Result<usize, GridError> {
        Ok(usize::from(self.labels[self.sub.vertex_rank(v)?]))
    }

    pub(crate) fn label_unchecked(&self, v: &GridVertex) -> usize {
        usize::from(self.labels[self.sub.rank_unchecked(&v.0)])
    }

    /// `(vertex, label)` pairs in lexicographic vertex order.
    pub fn iter(&self) -> impl Iterator<Item = (GridVertex, usize)> + '_ {
        self.sub.vertices().zip(self.labels.iter().map(|&l| usize::from(l)))
    }

    /// Every vertex breaking a Sperner rule; empty iff the labeling is proper.
    pub fn validate_proper(&self) -> Vec<Violation> {
        self.iter()
            .filter(|(v, l)| v.0[*l] == 0)
            .map(|(vertex, label)| {
                let rule = if vertex.support().count() == 1 {
                    SpernerRule::UnitVertex
                } else {
                    SpernerRule::Face
                };
                Violation { vertex, label, rule }
            })
            .collect()
    }

    pub fn is_proper(&self) -> bool {
        self.iter().all(|(v, l)| v.0[l] > 0)
    }

    /// Labels of a cell's vertices in chain order.
    pub fn cell_labels(&self, cell: &GridCell) -> Result<Vec<usize>, GridError> {
        Ok(self
            .sub
            .cell_grid_vertices(cell)?
            .iter()
            .map(|v| self.label_unchecked(v))
            .collect())
    }

    /// Whether the cell's labels are exactly `{0, ..., d}` for a `d`-cell.
    pub fn is_fully_labeled(&self, cell: &GridCell) -> Result<bool, GridError> {
        Ok(is_complete(&self.cell_labels(cell)?))
    }

    pub fn to_file(&self) -> LabelingFile {
        LabelingFile {
            n: self.sub.dim(),
            m: self.sub.resolution(),
            labels: self
                .iter()
                .map(|(vertex, label)| LabelEntry { vertex, label })
                .collect(),
        }
    }

    pub fn from_file(file: LabelingFile) -> Result<Self, LabelError> {
        let sub = Subdivision::new(file.n, file.m)?;
        Self::from_pairs(sub, file.labels.into_iter().map(|e| (e.vertex, e.label)))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("labeling serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, LabelError> {
        Self::from_file(serde_json::from_str(text)?)
    }
}

/// Whether `labels` is a permutation of `0..labels.len()`.
pub(crate) fn is_complete(labels: &[usize]) -> bool {
    let mut seen = vec![false; labels.len()];
    labels
        .iter()
        .all(|&l| l < seen.len() && !std::mem::replace(&mut seen[l], true))
}

/// On-disk labeling: `(n, m)` and the vertex-to-label pairs. Geometry is
/// rebuilt from `(n, m)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelingFile {
    pub n: usize,
    pub m: u32,
    pub labels: Vec<LabelEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelEntry {
    pub vertex: GridVertex,
    pub label: usize,
}

fn check_image<T: Coord>(p: &[T], image: &[T]) -> Result<(), LabelError> {
    if image.len() != p.len() {
        return Err(LabelError::MapLeavesSimplex(format!(
            "{} coordinates for a point with {}",
            image.len(),
            p.len()
        )));
    }
    if let Some(i) = image.iter().position(|x| *x < T::zero()) {
        return Err(LabelError::MapLeavesSimplex(format!("coordinate {i} is negative")));
    }
    let sum = image.iter().fold(T::zero(), |acc, x| acc + x.clone());
    if !T::is_unit_sum(&sum) {
        return Err(LabelError::MapLeavesSimplex(format!("coordinates sum to {sum:?}")));
    }
    Ok(())
}

/// The label a self-map `phi` induces at `p`: the smallest `i` with `p_i > 0`
/// and `phi_i(p) <= p_i`. Ties go to the lowest index.
pub fn induced_label<T: Coord>(p: &[T], image: &[T]) -> Result<usize, LabelError> {
    check_image(p, image)?;
    p.iter()
        .zip(image)
        .position(|(pi, fi)| *pi > T::zero() && fi <= pi)
        .ok_or(LabelError::NoAdmissibleLabel)
}
