//! Negativity, neighbor-projected negativity and the device entanglement
//! graph.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::counts::{bitstring_to_index, index_to_bitstring};
use crate::density::{hermitian_eigen, CMatrix, EIGEN_ZERO_TOL};
use crate::topology::{DeviceTopology, Edge};

/// Neighbor outcomes less likely than this are not analyzed.
pub const PROJECTION_CUTOFF: f64 = 1e-6;
/// Negativities closer than this count as equal when choosing the best
/// projection; the earlier outcome wins.
pub const TIE_TOL: f64 = 1e-12;
pub const MAX_NEGATIVITY: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error("expected a {expected}x{expected} matrix, got {rows}x{cols}")]
    Dimension { rows: usize, cols: usize, expected: usize },
    #[error("projected negativity needs 2 to 5 qubits, matrix dimension is {0}")]
    Size(usize),
    #[error("no result for topology edge {0}")]
    MissingEdge(Edge),
    #[error("edge {0} is not in the topology")]
    UnknownEdge(Edge),
    #[error("edge {0} has more than one result")]
    DuplicateEdge(Edge),
    #[error("neighbor outcome {0:?} does not match the matrix")]
    Outcome(String),
}

/// Partial transpose of a two-qubit matrix with respect to the second qubit.
pub fn partial_transpose(rho: &CMatrix) -> Result<CMatrix, AnalysisError> {
    if rho.nrows() != 4 || rho.ncols() != 4 {
        return Err(AnalysisError::Dimension { rows: rho.nrows(), cols: rho.ncols(), expected: 4 });
    }
    Ok(CMatrix::from_fn(4, 4, |r, c| {
        let (a, b) = (r >> 1, r & 1);
        let (a2, b2) = (c >> 1, c & 1);
        rho[((a << 1) | b2, (a2 << 1) | b)]
    }))
}

/// `Σ (|λ| - λ) / 2` over the partial-transpose eigenvalues, with
/// eigenvalues within [`EIGEN_ZERO_TOL`] of zero ignored. Not clamped.
pub fn raw_negativity(rho: &CMatrix) -> Result<f64, AnalysisError> {
    let pt = partial_transpose(rho)?;
    let (values, _) = hermitian_eigen(&pt);
    Ok(values.iter().filter(|l| l.abs() > EIGEN_ZERO_TOL).map(|&l| (l.abs() - l) / 2.0).sum())
}

/// Two-qubit negativity clamped to `[0, 0.5]`.
pub fn negativity(rho: &CMatrix) -> Result<f64, AnalysisError> {
    Ok(raw_negativity(rho)?.clamp(0.0, MAX_NEGATIVITY))
}

/// Outcome of projecting the neighbors onto one Z-basis string.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    pub outcome: String,
    pub probability: f64,
    pub negativity: f64,
    pub raw_negativity: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectedNegativity {
    /// Largest clamped negativity over the analyzed projections, 0 if none.
    pub value: f64,
    /// Neighbor outcome achieving `value`; `None` if every branch was skipped.
    pub best: Option<String>,
    pub probability: f64,
    /// Analyzed projections in outcome order.
    pub table: Vec<Projection>,
    pub skipped: usize,
}

fn neighbor_count(rho: &CMatrix) -> Result<usize, AnalysisError> {
    let dim = rho.nrows();
    if rho.ncols() != dim || !dim.is_power_of_two() || !(4..=32).contains(&dim) {
        return Err(AnalysisError::Size(dim));
    }
    Ok(dim.trailing_zeros() as usize - 2)
}

fn pair_block(rho: &CMatrix, m: usize, outcome: usize) -> CMatrix {
    CMatrix::from_fn(4, 4, |r, c| rho[((r << m) | outcome, (c << m) | outcome)])
}

/// Normalized pair state after projecting the neighbors onto `outcome`, a
/// bit string over the neighbors; `None` if the outcome has zero weight.
pub fn projected_pair_state(rho: &CMatrix, outcome: &str) -> Result<Option<CMatrix>, AnalysisError> {
    let m = neighbor_count(rho)?;
    let index = bitstring_to_index(outcome)
        .filter(|_| outcome.len() == m)
        .ok_or_else(|| AnalysisError::Outcome(outcome.into()))?;
    let block = pair_block(rho, m, index);
    let probability = block.trace().re;
    Ok((probability > 0.0).then(|| block.unscale(probability)))
}

/// Project the neighbors (every qubit after the first two) onto each
/// Z-basis outcome, renormalize and take the pair's negativity; return the
/// largest.
pub fn max_projected_negativity(rho: &CMatrix) -> Result<ProjectedNegativity, AnalysisError> {
    let m = neighbor_count(rho)?;
    let mut result = ProjectedNegativity { value: 0.0, best: None, probability: 0.0, table: Vec::new(), skipped: 0 };
    for outcome in 0..1usize << m {
        let block = pair_block(rho, m, outcome);
        let probability = block.trace().re;
        if probability < PROJECTION_CUTOFF {
            result.skipped += 1;
            continue;
        }
        let raw = raw_negativity(&block.unscale(probability))?;
        let value = raw.clamp(0.0, MAX_NEGATIVITY);
        let label = index_to_bitstring(outcome, m);
        if result.best.is_none() || value > result.value + TIE_TOL {
            result.value = value;
            result.best = Some(label.clone());
            result.probability = probability;
        }
        result.table.push(Projection { outcome: label, probability, negativity: value, raw_negativity: raw });
    }
    Ok(result)
}

/// Per-edge outcome of the certification.
#[derive(Clone, Debug, PartialEq)]
pub struct PairResult {
    pub edge: Edge,
    pub negativity: f64,
    pub lower: f64,
    pub upper: f64,
    pub best_projection: Option<String>,
    pub projection_probability: f64,
    pub entangled: bool,
}

impl PairResult {
    /// The entangled flag is set iff `lower > 0`.
    pub fn new(edge: Edge, estimate: &ProjectedNegativity, lower: f64, upper: f64) -> Self {
        PairResult {
            edge,
            negativity: estimate.value,
            lower,
            upper,
            best_projection: estimate.best.clone(),
            projection_probability: estimate.probability,
            entangled: lower > 0.0,
        }
    }
}

/// Device qubits joined by the edges certified as entangled.
#[derive(Clone, Debug, PartialEq)]
pub struct EntanglementGraph {
    n_qubits: usize,
    edges: Vec<(Edge, f64)>,
}

impl EntanglementGraph {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Entangled edges with their negativity.
    pub fn edges(&self) -> &[(Edge, f64)] {
        &self.edges
    }

    /// True iff one component contains every qubit.
    pub fn spans_device(&self) -> bool {
        connected_components(self).first().is_some_and(|c| c.len() == self.n_qubits)
    }
}

/// Keep the entangled edges; requires exactly one result per topology edge.
pub fn build_entanglement_graph(
    results: &[PairResult],
    topology: &DeviceTopology,
) -> Result<EntanglementGraph, AnalysisError> {
    let mut seen = vec![false; topology.edges().len()];
    for r in results {
        let slot = topology.edges().binary_search(&r.edge).map_err(|_| AnalysisError::UnknownEdge(r.edge))?;
        if seen[slot] {
            return Err(AnalysisError::DuplicateEdge(r.edge));
        }
        seen[slot] = true;
    }
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(AnalysisError::MissingEdge(topology.edges()[i]));
    }
    let mut edges: Vec<_> = results.iter().filter(|r| r.entangled).map(|r| (r.edge, r.negativity)).collect();
    edges.sort_by_key(|(e, _)| *e);
    Ok(EntanglementGraph { n_qubits: topology.n_qubits(), edges })
}

fn find(parent: &mut [usize], mut v: usize) -> usize {
    while parent[v] != v {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    v
}

/// Components as sorted vertex lists, largest first; equal sizes are
/// ordered by smallest vertex.
pub fn connected_components(graph: &EntanglementGraph) -> Vec<Vec<usize>> {
    let n = graph.n_qubits;
    let mut parent: Vec<usize> = (0..n).collect();
    for (e, _) in &graph.edges {
        let (a, b) = (find(&mut parent, e.a), find(&mut parent, e.b));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in 0..n {
        let root = find(&mut parent, v);
        groups[root].push(v);
    }
    let mut components: Vec<_> = groups.into_iter().filter(|g| !g.is_empty()).collect();
    components.sort_by(|a, b| b.len().cmp(&a.len()).then(a[0].cmp(&b[0])));
    components
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn bell() -> CMatrix {
        let mut m = CMatrix::zeros(4, 4);
        for (r, c) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            m[(r, c)] = Complex64::new(0.5, 0.0);
        }
        m
    }

    #[test]
    fn bell_partial_transpose() {
        let pt = partial_transpose(&bell()).unwrap();
        let (values, _) = hermitian_eigen(&pt);
        assert!((values[0] + 0.5).abs() < 1e-12);
        assert_eq!(partial_transpose(&pt).unwrap(), bell());
        assert!((negativity(&bell()).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn projected_pair_state_selects_the_neighbor_branch() {
        let mut zero = CMatrix::zeros(2, 2);
        zero[(0, 0)] = Complex64::new(1.0, 0.0);
        let rho = crate::density::kron(&bell(), &zero);
        assert_eq!(projected_pair_state(&rho, "0").unwrap(), Some(bell()));
        assert_eq!(projected_pair_state(&rho, "1").unwrap(), None);
        assert!(projected_pair_state(&rho, "01").is_err());
        assert_eq!(projected_pair_state(&bell(), "").unwrap(), Some(bell()));
    }

    #[test]
    fn product_and_mixed_states_are_unchanged() {
        let mut zero = CMatrix::zeros(4, 4);
        zero[(0, 0)] = Complex64::new(1.0, 0.0);
        assert_eq!(partial_transpose(&zero).unwrap(), zero);
        let mixed = CMatrix::from_diagonal_element(4, 4, Complex64::new(0.25, 0.0));
        assert_eq!(partial_transpose(&mixed).unwrap(), mixed);
        assert_eq!(negativity(&mixed).unwrap(), 0.0);
        assert!(partial_transpose(&CMatrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn mixed_four_qubit_state_has_no_projected_negativity() {
        let mixed = CMatrix::from_diagonal_element(16, 16, Complex64::new(1.0 / 16.0, 0.0));
        let r = max_projected_negativity(&mixed).unwrap();
        assert_eq!(r.value, 0.0);
        assert_eq!(r.best.as_deref(), Some("00"));
        assert_eq!(r.table.len(), 4);
        assert!(r.table.iter().all(|p| p.negativity == 0.0));
    }

    #[test]
    fn degenerate_state_skips_every_branch() {
        let r = max_projected_negativity(&CMatrix::zeros(8, 8)).unwrap();
        assert_eq!((r.value, r.best, r.skipped), (0.0, None, 2));
    }

    #[test]
    fn components_sorted_by_size() {
        let t = DeviceTopology::new("path", 5, [(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let flags = [true, false, true, true];
        let results: Vec<_> = t
            .edges()
            .iter()
            .zip(flags)
            .map(|(&edge, entangled)| PairResult {
                edge,
                negativity: 0.4,
                lower: if entangled { 0.3 } else { 0.0 },
                upper: 0.5,
                best_projection: None,
                projection_probability: 1.0,
                entangled,
            })
            .collect();
        let g = build_entanglement_graph(&results, &t).unwrap();
        assert_eq!(connected_components(&g), vec![vec![2, 3, 4], vec![0, 1]]);
        assert!(!g.spans_device());
        assert_eq!(build_entanglement_graph(&results[1..], &t), Err(AnalysisError::MissingEdge(Edge::new(0, 1))));
    }
}
