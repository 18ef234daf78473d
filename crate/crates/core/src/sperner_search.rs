//! Finding fully labeled cells.
//!
//! [`enumerate_fully_labeled`] scans every cell and is the ground truth.
//! [`path_follow`] walks door to door: starting at `e_0`, it moves through
//! cells of the face spanned by `e_0..e_k` whose facets carry labels
//! `{0, ..., k-1}`, climbs to the next face whenever it reaches a cell
//! labeled `{0, ..., k}`, and drops back down when a door lies on the lower
//! face. Every node on that walk except its two ends has exactly two
//! neighbours, so it ends at a fully labeled top cell.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec::Execution;
use crate::labeling::{is_complete, Labeling, Violation};
use crate::simplex_grid::{GridCell, GridError, GridVertex, Subdivision};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("labeling is not proper ({} violations)", .0.len())]
    ImproperLabeling(Vec<Violation>),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("path following left the admissible cells at {0}")]
    Stuck(GridCell),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Enumerate,
    PathFollow,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchResult {
    pub strategy: Strategy,
    /// cells examined (enumeration) or entered (path following)
    pub visited: u64,
    pub cells: Vec<GridCell>,
}

impl SearchResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("search result serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

fn require_proper(lab: &Labeling) -> Result<(), SearchError> {
    let violations = lab.validate_proper();
    if violations.is_empty() {
        Ok(())
    } else {
        Err(SearchError::ImproperLabeling(violations))
    }
}

/// All fully labeled top cells, in lexicographic cell order.
pub fn enumerate_fully_labeled(lab: &Labeling) -> Result<SearchResult, SearchError> {
    enumerate_fully_labeled_with(lab, Execution::default())
}

pub fn enumerate_fully_labeled_with(lab: &Labeling, exec: Execution) -> Result<SearchResult, SearchError> {
    require_proper(lab)?;
    let sub = *lab.sub();
    let visited = sub.cell_count() as u64;
    let cells = exec.flat_map_chunks(sub.vertex_count(), 256, |start, end| {
        sub.cells_in_base_range(start, end)
            .into_iter()
            .filter(|cell| {
                let labels: Vec<usize> = sub
                    .cell_grid_vertices(cell)
                    .expect("enumerated cells are valid")
                    .iter()
                    .map(|v| lab.label_unchecked(v))
                    .collect();
                is_complete(&labels)
            })
            .collect()
    });
    Ok(SearchResult {
        strategy: Strategy::Enumerate,
        visited,
        cells,
    })
}

/// One fully labeled top cell, found by door-to-door path following.
pub fn path_follow(lab: &Labeling) -> Result<SearchResult, SearchError> {
    require_proper(lab)?;
    let (cell, visited) = follow_doors(lab.sub(), |v| Ok::<_, SearchError>(lab.label_unchecked(v)))?;
    Ok(SearchResult {
        strategy: Strategy::PathFollow,
        visited,
        cells: vec![cell],
    })
}

/// Path following over an arbitrary label source, which must obey the
/// Sperner face rule on every vertex it is asked about. Returns the cell and
/// the number of cells entered.
pub(crate) fn follow_doors<E, F>(sub: &Subdivision, mut label: F) -> Result<(GridCell, u64), E>
where
    F: FnMut(&GridVertex) -> Result<usize, E>,
    E: From<SearchError>,
{
    let n = sub.dim();
    let m = sub.resolution();
    let mut origin = vec![0u32; n + 1];
    origin[0] = m;
    let start = GridCell {
        base: GridVertex(origin),
        perm: Vec::new(),
    };
    // each cell of each face is entered at most twice
    let budget: u64 = (1..=n as u32)
        .map(|d| u64::from(m).saturating_pow(d).saturating_mul(4))
        .fold(16u64, u64::saturating_add);

    let mut visited = 0u64;
    let mut cell = sub.lift(&start);
    let mut entry = 0usize;
    loop {
        visited += 1;
        if visited > budget {
            return Err(SearchError::Stuck(cell).into());
        }
        let verts = sub.cell_grid_vertices(&cell).map_err(SearchError::from)?;
        let labels = verts.iter().map(&mut label).collect::<Result<Vec<_>, E>>()?;
        let k = cell.dim();
        let fresh = labels[entry];
        if fresh == k {
            if k == n {
                return Ok((cell, visited));
            }
            cell = sub.lift(&cell);
            entry = 0;
            continue;
        }
        if fresh > k {
            return Err(SearchError::Stuck(cell).into());
        }
        let mut exit = (0..=k)
            .find(|&j| j != entry && labels[j] == fresh)
            .ok_or_else(|| SearchError::Stuck(cell.clone()))?;
        // leave through the facet opposite `exit`, descending while that
        // facet lies on the lower face
        loop {
            if let Some((next, entered)) = sub.pivot(&cell, exit) {
                cell = next;
                entry = entered;
                break;
            }
            let lower = match (exit, sub.lower(&cell)) {
                (0, Some(f)) if f.dim() >= 1 => f,
                _ => return Err(SearchError::Stuck(cell).into()),
            };
            let lower_labels = sub
                .cell_grid_vertices(&lower)
                .map_err(SearchError::from)?
                .iter()
                .map(&mut label)
                .collect::<Result<Vec<_>, E>>()?;
            let top = lower.dim();
            exit = lower_labels
                .iter()
                .position(|&l| l == top)
                .ok_or_else(|| SearchError::Stuck(lower.clone()))?;
            cell = lower;
            visited += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sub(n: usize, m: u32) -> Subdivision {
        Subdivision::new(n, m).unwrap()
    }

    /// Labels given in order of decreasing first coordinate, `e_0` first.
    fn segment(m: u32, labels_from_e0: &[usize]) -> Labeling {
        let mut rank_order = labels_from_e0.to_vec();
        rank_order.reverse();
        Labeling::from_labels(sub(1, m), rank_order).unwrap()
    }

    fn cell_points(s: &Subdivision, c: &GridCell) -> Vec<Vec<u32>> {
        s.cell_grid_vertices(c).unwrap().into_iter().map(|v| v.0).collect()
    }

    #[test]
    fn segment_examples() {
        let lab = segment(2, &[0, 0, 1]);
        let found = enumerate_fully_labeled(&lab).unwrap();
        assert_eq!(found.cells.len(), 1);
        let mut pts = cell_points(lab.sub(), &found.cells[0]);
        pts.sort();
        assert_eq!(pts, vec![vec![0, 2], vec![1, 1]]);

        let lab = segment(3, &[0, 1, 0, 1]);
        let all = enumerate_fully_labeled(&lab).unwrap();
        assert_eq!(all.cells.len(), 3);
        assert_eq!(all.visited, 3);
        let path = path_follow(&lab).unwrap();
        assert!(all.cells.contains(&path.cells[0]));
        // walking from e_0 the first door is the leftmost cell
        assert_eq!(path.cells[0], all.cells[2]);
    }

    /// Hand-checked m = 2 labeling in which only the centre triangle is
    /// fully labeled.
    #[test]
    fn m2_triangle_matches_hand_enumeration() {
        let s = sub(2, 2);
        let chosen = |v: &GridVertex| -> usize {
            match v.0.as_slice() {
                [2, 0, 0] => 0,
                [0, 2, 0] => 1,
                [0, 0, 2] => 2,
                [1, 1, 0] => 1,
                [1, 0, 1] => 0,
                [0, 1, 1] => 2,
                _ => unreachable!(),
            }
        };
        let lab = Labeling::from_fn(s, Execution::Sequential, |v| Ok::<_, ()>(chosen(v))).unwrap();
        assert!(lab.is_proper());
        // brute force over the four triangles by their vertex sets
        let mut expected = Vec::new();
        for cell in s.cells() {
            let mut ls: Vec<usize> = s.cell_grid_vertices(&cell).unwrap().iter().map(chosen).collect();
            ls.sort();
            if ls == vec![0, 1, 2] {
                expected.push(cell);
            }
        }
        // corner e0 {e0, (1,1,0), (1,0,1)} = {0,1,0}: no; centre {(1,1,0),(1,0,1),(0,1,1)} = {1,0,2}: yes
        // corner e1 {(1,1,0), e1, (0,1,1)} = {1,1,2}: no; corner e2 {(1,0,1),(0,1,1),e2} = {0,2,2}: no
        assert_eq!(expected.len(), 1);
        let centre: Vec<Vec<u32>> = {
            let mut c = cell_points(&s, &expected[0]);
            c.sort();
            c
        };
        assert_eq!(centre, vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]);
        assert_eq!(enumerate_fully_labeled(&lab).unwrap().cells, expected);
        assert_eq!(path_follow(&lab).unwrap().cells, expected);
    }

    #[test]
    fn improper_labeling_is_rejected() {
        let lab = segment(2, &[1, 0, 1]);
        assert!(matches!(enumerate_fully_labeled(&lab), Err(SearchError::ImproperLabeling(v)) if v.len() == 1));
        assert!(matches!(path_follow(&lab), Err(SearchError::ImproperLabeling(_))));
    }

    #[test]
    fn path_follow_lands_in_enumeration_small_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (n, m, runs) in [(2, 6, 100), (3, 4, 25), (4, 3, 10)] {
            for _ in 0..runs {
                let lab = Labeling::random_proper(sub(n, m), &mut rng);
                let all = enumerate_fully_labeled(&lab).unwrap();
                assert_eq!(all.cells.len() % 2, 1);
                let found = path_follow(&lab).unwrap();
                assert!(all.cells.contains(&found.cells[0]));
                assert!(lab.is_fully_labeled(&found.cells[0]).unwrap());
            }
        }
    }

    #[test]
    fn sequential_and_parallel_enumeration_are_identical() {
        let lab = Labeling::random_proper(sub(3, 7), &mut ChaCha8Rng::seed_from_u64(3));
        let a = enumerate_fully_labeled_with(&lab, Execution::Sequential).unwrap();
        let b = enumerate_fully_labeled_with(&lab, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        let mut sorted = a.cells.clone();
        sorted.sort();
        assert_eq!(sorted, a.cells);
    }

    #[test]
    fn deterministic_visit_counts_and_json() {
        let lab = Labeling::random_proper(sub(2, 9), &mut ChaCha8Rng::seed_from_u64(5));
        let a = path_follow(&lab).unwrap();
        let b = path_follow(&lab).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_json(), b.to_json());
        assert_eq!(SearchResult::from_json(&a.to_json()).unwrap(), a);
        assert!(a.to_json().contains("\"path_follow\""));
    }

    #[test]
    fn one_cell_simplex() {
        for n in 1..=4 {
            let lab = Labeling::random_proper(sub(n, 1), &mut ChaCha8Rng::seed_from_u64(0));
            let all = enumerate_fully_labeled(&lab).unwrap();
            assert_eq!(all.cells.len(), 1);
            assert_eq!(path_follow(&lab).unwrap().cells, all.cells);
        }
    }
}
