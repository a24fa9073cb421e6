//! Device connectivity graphs and CZ layer scheduling.
//!
//! Heavy-hexagon lattices are generated from a count of hexagon rows and
//! columns. Qubits are numbered row-major: the first long row left to right,
//! then the connector qubits below it left to right, then the next long row,
//! and so on. With four rows of two hexagons this reproduces the 65-qubit
//! Hummingbird numbering.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::num::NonZeroUsize;

/// An undirected coupling between two qubits, stored with `a < b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
}

impl Edge {
    /// Normalized edge; the endpoints may be given in either order.
    pub fn new(p: usize, q: usize) -> Self {
        if p <= q {
            Edge { a: p, b: q }
        } else {
            Edge { a: q, b: p }
        }
    }

    pub fn contains(&self, q: usize) -> bool {
        self.a == q || self.b == q
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TopologyError {
    #[error("topology must contain at least one qubit")]
    Empty,
    #[error("edge ({0}, {1}) is a self-loop")]
    SelfLoop(usize, usize),
    #[error("edge ({a}, {b}) references a qubit outside 0..{n_qubits}")]
    OutOfRange { a: usize, b: usize, n_qubits: usize },
    #[error("edge ({0}, {1}) appears more than once")]
    Duplicate(usize, usize),
    #[error("topology is disconnected ({components} components; qubit {unreached} unreachable from qubit 0)")]
    Disconnected { components: usize, unreached: usize },
    #[error("schedule does not cover the topology: {0}")]
    ScheduleMismatch(String),
}

/// Validated qubit-connectivity graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviceTopology {
    name: String,
    n_qubits: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<usize>>,
}

impl DeviceTopology {
    /// Validate and build a topology. Edges are given as raw endpoint pairs
    /// so that self-loops and reversed duplicates can be reported as given.
    pub fn new<I>(name: impl Into<String>, n_qubits: usize, edges: I) -> Result<Self, TopologyError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n_qubits == 0 {
            return Err(TopologyError::Empty);
        }
        let mut normalized = Vec::new();
        for (p, q) in edges {
            if p == q {
                return Err(TopologyError::SelfLoop(p, q));
            }
            if p >= n_qubits || q >= n_qubits {
                return Err(TopologyError::OutOfRange { a: p, b: q, n_qubits });
            }
            normalized.push(Edge::new(p, q));
        }
        normalized.sort();
        if let Some(w) = normalized.windows(2).find(|w| w[0] == w[1]) {
            return Err(TopologyError::Duplicate(w[0].a, w[0].b));
        }

        let mut adjacency = vec![Vec::new(); n_qubits];
        for e in &normalized {
            adjacency[e.a].push(e.b);
            adjacency[e.b].push(e.a);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }

        let topology = DeviceTopology { name: name.into(), n_qubits, edges: normalized, adjacency };
        let components = topology.component_labels();
        let count = components.iter().copied().max().map_or(0, |m| m + 1);
        if count > 1 {
            let unreached = components.iter().position(|&c| c != 0).unwrap_or(0);
            return Err(TopologyError::Disconnected { components: count, unreached });
        }
        Ok(topology)
    }

    /// The five-qubit heavy-hexagon unit cell: qubit 3 couples to 1, 2 and 4,
    /// and qubit 2 continues to qubit 0.
    pub fn unit_cell() -> Self {
        DeviceTopology::new("unit-cell", 5, [(0, 2), (1, 3), (2, 3), (3, 4)]).expect("unit cell is a valid tree")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Edges in ascending order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn contains_edge(&self, edge: Edge) -> bool {
        self.edges.binary_search(&edge).is_ok()
    }

    /// Neighbors of `q` in ascending order.
    pub fn neighbors(&self, q: usize) -> &[usize] {
        &self.adjacency[q]
    }

    pub fn degree(&self, q: usize) -> usize {
        self.adjacency[q].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Qubits measured for the local tomography of `edge`: the pair itself,
    /// followed by every other neighbor of either endpoint in ascending order.
    pub fn pair_neighborhood(&self, edge: Edge) -> Vec<usize> {
        let mut extra: Vec<usize> = self.adjacency[edge.a]
            .iter()
            .chain(&self.adjacency[edge.b])
            .copied()
            .filter(|&q| !edge.contains(q))
            .collect();
        extra.sort_unstable();
        extra.dedup();
        let mut qubits = vec![edge.a, edge.b];
        qubits.extend(extra);
        qubits
    }

    /// Proper two-coloring of the qubits, if the graph is bipartite.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let mut side: Vec<Option<bool>> = vec![None; self.n_qubits];
        let mut queue = VecDeque::new();
        for start in 0..self.n_qubits {
            if side[start].is_some() {
                continue;
            }
            side[start] = Some(false);
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                let sv = side[v].unwrap_or(false);
                for &w in &self.adjacency[v] {
                    match side[w] {
                        None => {
                            side[w] = Some(!sv);
                            queue.push_back(w);
                        }
                        Some(sw) if sw == sv => return None,
                        Some(_) => {}
                    }
                }
            }
        }
        Some(side.into_iter().map(|s| s.unwrap_or(false)).collect())
    }

    pub fn is_bipartite(&self) -> bool {
        self.bipartition().is_some()
    }

    /// Component index of every qubit, numbered in order of first appearance.
    fn component_labels(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.n_qubits];
        let mut next = 0;
        let mut stack = Vec::new();
        for start in 0..self.n_qubits {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = next;
            stack.push(start);
            while let Some(v) = stack.pop() {
                for &w in &self.adjacency[v] {
                    if label[w] == usize::MAX {
                        label[w] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        label
    }
}

/// Generate a heavy-hexagon lattice of `rows` hexagon rows with `cols`
/// hexagons per row.
///
/// Alternate hexagon rows are offset by half a cell. For two or more rows
/// the first and last long rows are extended by one qubit toward the wider
/// interior rows, as on IBM devices. `(1, 1)` is a single 12-qubit heavy
/// hexagon and `(4, 2)` is the 65-qubit, 72-coupler layout.
pub fn generate_heavy_hex(rows: NonZeroUsize, cols: NonZeroUsize) -> DeviceTopology {
    let rows = rows.get();
    let cols = cols.get();
    let offset = |hex_row: usize| 2 * (hex_row % 2);
    let width = 4 * cols;

    // Column span of every long row.
    let mut spans = Vec::with_capacity(rows + 1);
    for long_row in 0..=rows {
        let touching = [long_row.checked_sub(1), (long_row < rows).then_some(long_row)];
        let mut lo = usize::MAX;
        let mut hi = 0;
        for hex_row in touching.into_iter().flatten() {
            lo = lo.min(offset(hex_row));
            hi = hi.max(offset(hex_row) + width);
        }
        if rows >= 2 && (long_row == 0 || long_row == rows) {
            lo = lo.saturating_sub(1);
            if hi < width + 2 {
                hi += 1;
            }
        }
        spans.push((lo, hi));
    }

    let mut index = 0;
    let mut row_start = Vec::with_capacity(rows + 1);
    let mut connector_start = Vec::with_capacity(rows);
    for (long_row, &(lo, hi)) in spans.iter().enumerate() {
        row_start.push(index);
        index += hi - lo + 1;
        if long_row < rows {
            connector_start.push(index);
            index += cols + 1;
        }
    }
    let n_qubits = index;
    let qubit_at = |long_row: usize, col: usize| row_start[long_row] + col - spans[long_row].0;

    let mut edges = Vec::new();
    for (long_row, &(lo, hi)) in spans.iter().enumerate() {
        for col in lo..hi {
            edges.push((qubit_at(long_row, col), qubit_at(long_row, col + 1)));
        }
    }
    for (hex_row, &start) in connector_start.iter().enumerate().take(rows) {
        for j in 0..=cols {
            let col = offset(hex_row) + 4 * j;
            let connector = start + j;
            edges.push((qubit_at(hex_row, col), connector));
            edges.push((connector, qubit_at(hex_row + 1, col)));
        }
    }

    DeviceTopology::new(format!("heavy-hex-{rows}x{cols}"), n_qubits, edges)
        .expect("generated heavy-hex lattice is valid")
}

/// CZ gates grouped into parallel layers. Each layer is a matching.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CzSchedule {
    layers: Vec<Vec<Edge>>,
}

impl CzSchedule {
    /// Build a schedule from explicit layers, checking that it is a valid
    /// edge coloring of `topology`.
    pub fn from_layers(topology: &DeviceTopology, layers: Vec<Vec<Edge>>) -> Result<Self, TopologyError> {
        let schedule = CzSchedule { layers };
        schedule.validate(topology)?;
        Ok(schedule)
    }

    pub fn layers(&self) -> &[Vec<Edge>] {
        &self.layers
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Check that every layer is a matching and that the layers partition
    /// the topology's edge set.
    pub fn validate(&self, topology: &DeviceTopology) -> Result<(), TopologyError> {
        let mut seen = Vec::new();
        for (i, layer) in self.layers.iter().enumerate() {
            let mut used = vec![false; topology.n_qubits()];
            for e in layer {
                if !topology.contains_edge(*e) {
                    return Err(TopologyError::ScheduleMismatch(format!(
                        "layer {i} contains {e}, which is not a coupling"
                    )));
                }
                for q in [e.a, e.b] {
                    if used[q] {
                        return Err(TopologyError::ScheduleMismatch(format!("qubit {q} appears twice in layer {i}")));
                    }
                    used[q] = true;
                }
                seen.push(*e);
            }
        }
        seen.sort();
        if seen != topology.edges() {
            return Err(TopologyError::ScheduleMismatch(format!(
                "schedule has {} gates for {} couplings",
                seen.len(),
                topology.edges().len()
            )));
        }
        Ok(())
    }
}

/// Schedule the CZ gates of the native-graph-state circuit.
///
/// Bipartite graphs get an optimal coloring with max-degree colors via
/// alternating-path (Kempe chain) swaps. Other graphs are colored with at
/// most max-degree + 1 colors (Misra-Gries). Edges are processed in
/// ascending order, so the result is deterministic.
pub fn schedule_cz_layers(topology: &DeviceTopology) -> CzSchedule {
    let slots = if topology.is_bipartite() { kempe_coloring(topology) } else { misra_gries_coloring(topology) };
    let n_colors = slots.first().map_or(0, Vec::len);
    let mut layers = vec![Vec::new(); n_colors];
    for e in topology.edges() {
        let color = slots[e.a].iter().position(|&w| w == Some(e.b)).expect("every edge is colored");
        layers[color].push(*e);
    }
    layers.retain(|l| !l.is_empty());
    CzSchedule { layers }
}

/// `slots[v][c]` is the neighbor joined to `v` by the edge of color `c`.
type ColorSlots = Vec<Vec<Option<usize>>>;

fn first_free(slots: &ColorSlots, v: usize) -> usize {
    slots[v].iter().position(Option::is_none).expect("a free color exists at every vertex")
}

fn set_color(slots: &mut ColorSlots, u: usize, v: usize, c: usize) {
    slots[u][c] = Some(v);
    slots[v][c] = Some(u);
}

fn clear_color(slots: &mut ColorSlots, u: usize, v: usize, c: usize) {
    slots[u][c] = None;
    slots[v][c] = None;
}

/// Swap colors `first`/`second` along the alternating path that leaves
/// `start` on a `first`-colored edge.
fn flip_alternating_path(slots: &mut ColorSlots, start: usize, first: usize, second: usize) {
    let mut path = Vec::new();
    let mut at = start;
    let mut color = first;
    while let Some(next) = slots[at][color] {
        path.push((at, next, color));
        at = next;
        color = if color == first { second } else { first };
    }
    for &(u, v, c) in &path {
        clear_color(slots, u, v, c);
    }
    for &(u, v, c) in &path {
        let swapped = if c == first { second } else { first };
        set_color(slots, u, v, swapped);
    }
}

fn kempe_coloring(topology: &DeviceTopology) -> ColorSlots {
    let delta = topology.max_degree();
    let mut slots: ColorSlots = vec![vec![None; delta]; topology.n_qubits()];
    for e in topology.edges() {
        let (u, v) = (e.a, e.b);
        let a = first_free(&slots, u);
        let b = first_free(&slots, v);
        if slots[v][a].is_some() {
            // The a/b chain from v cannot reach u in a bipartite graph.
            flip_alternating_path(&mut slots, v, a, b);
        }
        set_color(&mut slots, u, v, a);
    }
    slots
}

fn misra_gries_coloring(topology: &DeviceTopology) -> ColorSlots {
    let n_colors = topology.max_degree() + 1;
    let mut slots: ColorSlots = vec![vec![None; n_colors]; topology.n_qubits()];
    let color_of = |slots: &ColorSlots, u: usize, v: usize| slots[u].iter().position(|&w| w == Some(v));

    for e in topology.edges() {
        let x = e.a;
        // Maximal fan of x starting at the uncolored edge (x, e.b).
        let mut fan = vec![e.b];
        loop {
            let last = *fan.last().unwrap_or(&e.b);
            let next = (0..n_colors)
                .filter(|&c| slots[last][c].is_none())
                .filter_map(|c| slots[x][c])
                .find(|w| !fan.contains(w));
            match next {
                Some(w) => fan.push(w),
                None => break,
            }
        }
        let c = first_free(&slots, x);
        let d = first_free(&slots, *fan.last().unwrap_or(&e.b));
        if slots[x][d].is_some() {
            flip_alternating_path(&mut slots, x, d, c);
        }

        let is_fan_prefix = |slots: &ColorSlots, end: usize| {
            (0..end).all(|i| match color_of(slots, x, fan[i + 1]) {
                Some(col) => slots[fan[i]][col].is_none(),
                None => false,
            })
        };
        let pivot = (0..fan.len())
            .find(|&j| slots[fan[j]][d].is_none() && is_fan_prefix(&slots, j))
            .expect("Misra-Gries pivot exists");

        for i in 0..pivot {
            let col = color_of(&slots, x, fan[i + 1]).expect("fan edges are colored");
            clear_color(&mut slots, x, fan[i + 1], col);
            set_color(&mut slots, x, fan[i], col);
        }
        set_color(&mut slots, x, fan[pivot], d);
    }
    slots
}
