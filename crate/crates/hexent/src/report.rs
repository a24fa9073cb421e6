//! Per-edge records, summary statistics and the report files.

use std::fmt::Write as _;
use std::path::Path;

use hexent_core::analysis::{build_entanglement_graph, connected_components, PairResult, MAX_NEGATIVITY};
use hexent_core::certify::PairCertificate;
use hexent_core::topology::{CzSchedule, DeviceTopology, Edge};
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::formats::{write_json, write_text, MatrixDoc, TopologyDoc};
use crate::pipeline::EdgeMatrices;

/// Certification outcome of one edge under one analysis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub edge: [usize; 2],
    pub qrem: bool,
    /// The pair followed by its neighbors.
    pub qubits: Vec<usize>,
    pub negativity: f64,
    pub lower: f64,
    pub upper: f64,
    pub entangled: bool,
    /// Neighbor outcome of the best projection.
    pub best_projection: Option<String>,
    pub projection_probability: f64,
    pub replicates: usize,
    /// Replicates with zero negativity, left out of the bias estimate.
    pub zero_replicates: usize,
    pub bootstrap_mean: f64,
    pub bias_shift: f64,
    pub uncorrected_lower: f64,
    pub uncorrected_upper: f64,
}

impl EdgeRecord {
    pub fn new(qrem: bool, qubits: &[usize], cert: &PairCertificate) -> Self {
        let b = &cert.bootstrap;
        EdgeRecord {
            edge: [cert.result.edge.a, cert.result.edge.b],
            qrem,
            qubits: qubits.to_vec(),
            negativity: cert.result.negativity,
            lower: cert.result.lower,
            upper: cert.result.upper,
            entangled: cert.result.entangled,
            best_projection: cert.result.best_projection.clone(),
            projection_probability: cert.result.projection_probability,
            replicates: b.replicates.len(),
            zero_replicates: b.replicates.iter().filter(|&&v| v == 0.0).count(),
            bootstrap_mean: b.nonzero_mean,
            bias_shift: b.shift,
            uncorrected_lower: b.raw_lower,
            uncorrected_upper: b.raw_upper,
        }
    }

    pub fn edge(&self) -> Edge {
        Edge::new(self.edge[0], self.edge[1])
    }

    fn pair_result(&self) -> PairResult {
        PairResult {
            edge: self.edge(),
            negativity: self.negativity,
            lower: self.lower,
            upper: self.upper,
            best_projection: self.best_projection.clone(),
            projection_probability: self.projection_probability,
            entangled: self.entangled,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Summary {
    pub edges: usize,
    pub entangled_pairs: usize,
    /// Mean of the per-edge negativities; `None` without edges.
    pub mean_negativity: Option<f64>,
    /// Population standard deviation of the per-edge negativities.
    pub stddev_negativity: Option<f64>,
    pub largest_component: usize,
    pub components: usize,
    pub spans_device: bool,
}

/// Summary statistics and entangled components of one analysis, computed
/// from its records in order.
pub fn summarize(records: &[EdgeRecord], topology: &DeviceTopology) -> Result<(Summary, Vec<Vec<usize>>)> {
    let results: Vec<PairResult> = records.iter().map(EdgeRecord::pair_result).collect();
    let graph = build_entanglement_graph(&results, topology).map_err(|e| Error::invalid("records", e))?;
    let components = connected_components(&graph);
    let n = records.len() as f64;
    let mean = (!records.is_empty()).then(|| records.iter().map(|r| r.negativity).sum::<f64>() / n);
    let stddev =
        mean.map(|m| (records.iter().map(|r| (r.negativity - m) * (r.negativity - m)).sum::<f64>() / n).sqrt());
    let summary = Summary {
        edges: records.len(),
        entangled_pairs: records.iter().filter(|r| r.entangled).count(),
        mean_negativity: mean,
        stddev_negativity: stddev,
        largest_component: components.first().map_or(0, Vec::len),
        components: components.len(),
        spans_device: graph.spans_device(),
    };
    Ok((summary, components))
}

/// Records of one analysis, with or without readout correction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Analysis {
    pub qrem: bool,
    pub records: Vec<EdgeRecord>,
    pub summary: Summary,
    /// Entangled components, largest first.
    pub components: Vec<Vec<usize>>,
}

impl Analysis {
    pub fn label(&self) -> &'static str {
        qrem_label(self.qrem)
    }

    /// Record with the highest negativity; the first one on ties.
    pub fn best(&self) -> Option<&EdgeRecord> {
        self.records.iter().fold(None, |best: Option<&EdgeRecord>, r| match best {
            Some(b) if b.negativity >= r.negativity => Some(b),
            _ => Some(r),
        })
    }
}

pub fn qrem_label(qrem: bool) -> &'static str {
    if qrem {
        "qrem_on"
    } else {
        "qrem_off"
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub seed: u64,
    pub version: String,
    pub started_unix: u64,
    pub elapsed_seconds: f64,
    pub mean_readout_rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentReport {
    pub topology: TopologyDoc,
    pub cz_layers: usize,
    pub analyses: Vec<Analysis>,
    pub config: ExperimentConfig,
    pub provenance: Provenance,
}

impl ExperimentReport {
    pub fn new(
        topology: &DeviceTopology,
        schedule: &CzSchedule,
        analyses: Vec<Analysis>,
        config: ExperimentConfig,
        provenance: Provenance,
    ) -> Self {
        ExperimentReport {
            topology: TopologyDoc::from_topology(topology),
            cz_layers: schedule.depth(),
            analyses,
            config,
            provenance,
        }
    }

    pub fn analysis(&self, qrem: bool) -> Option<&Analysis> {
        self.analyses.iter().find(|a| a.qrem == qrem)
    }

    /// Records of all analyses, uncorrected first.
    pub fn records(&self) -> Vec<&EdgeRecord> {
        self.analyses.iter().flat_map(|a| &a.records).collect()
    }
}

/// Summary entry of `summary.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryEntry {
    pub qrem: bool,
    #[serde(flatten)]
    pub summary: Summary,
}

/// Pair state of the best edge after its best neighbor projection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BestPairDoc {
    pub edge: [usize; 2],
    pub qrem: bool,
    pub negativity: f64,
    pub neighbors: Vec<usize>,
    pub projection: String,
    pub matrix: MatrixDoc,
}

pub fn edges_csv(records: &[&EdgeRecord]) -> String {
    let mut out = String::from("qrem,a,b,negativity,lower,upper,entangled,best_projection,projection_probability\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            if r.qrem { "on" } else { "off" },
            r.edge[0],
            r.edge[1],
            r.negativity,
            r.lower,
            r.upper,
            r.entangled,
            r.best_projection.as_deref().unwrap_or(""),
            r.projection_probability
        );
    }
    out
}

/// Graphviz description of one analysis: every qubit is a vertex; entangled
/// edges are drawn thick and blue near maximal negativity and thin and red
/// near zero, the rest light gray and dashed.
pub fn entanglement_dot(name: &str, n_qubits: usize, analysis: &Analysis) -> String {
    let mut out = format!("graph {name:?} {{\n  label=\"{name} {}\";\n  node [shape=circle];\n", analysis.label());
    for q in 0..n_qubits {
        let _ = writeln!(out, "  {q};");
    }
    for r in &analysis.records {
        let t = (r.negativity / MAX_NEGATIVITY).clamp(0.0, 1.0);
        let style = if r.entangled {
            let lerp = |lo: f64, hi: f64| (lo + (hi - lo) * t).round() as u8;
            format!(
                "color=\"#{:02x}{:02x}{:02x}\", penwidth={:.2}",
                lerp(214.0, 31.0),
                lerp(39.0, 119.0),
                lerp(40.0, 180.0),
                1.0 + 5.0 * t
            )
        } else {
            "color=\"#c8c8c8\", penwidth=1.00, style=dashed".to_string()
        };
        let _ = writeln!(
            out,
            "  {} -- {} [negativity={:.4}, lower={:.4}, label=\"{:.3}\", {style}];",
            r.edge[0], r.edge[1], r.negativity, r.lower, r.negativity
        );
    }
    out.push_str("}\n");
    out
}

/// Best-pair density matrices, one per analysis that has one.
pub fn best_pairs(report: &ExperimentReport, matrices: &[EdgeMatrices]) -> Vec<BestPairDoc> {
    report
        .analyses
        .iter()
        .filter_map(|a| {
            let best = a.best()?;
            let projection = best.best_projection.clone()?;
            let m = matrices.iter().find(|m| m.qrem == a.qrem && m.edge == best.edge())?;
            let pair = m.best_pair.as_ref()?;
            Some(BestPairDoc {
                edge: best.edge,
                qrem: a.qrem,
                negativity: best.negativity,
                neighbors: best.qubits[2..].to_vec(),
                projection,
                matrix: MatrixDoc::from_matrix(best.qubits[..2].to_vec(), pair),
            })
        })
        .collect()
}

/// Write `report.json`, `records.json`, `summary.json`, `edges.csv`, one
/// graph file per analysis and the best-pair density matrices.
pub fn emit_report(report: &ExperimentReport, matrices: &[EdgeMatrices], out: &Path) -> Result<()> {
    write_json(&out.join("report.json"), report)?;
    write_report_tables(report, out)?;
    for doc in best_pairs(report, matrices) {
        write_json(&out.join(format!("best_pair_{}.json", qrem_label(doc.qrem))), &doc)?;
    }
    Ok(())
}

/// The files derived from the records alone.
pub fn write_report_tables(report: &ExperimentReport, out: &Path) -> Result<()> {
    let records = report.records();
    write_json(&out.join("records.json"), &records)?;
    let summaries: Vec<SummaryEntry> =
        report.analyses.iter().map(|a| SummaryEntry { qrem: a.qrem, summary: a.summary.clone() }).collect();
    write_json(&out.join("summary.json"), &summaries)?;
    write_text(&out.join("edges.csv"), &edges_csv(&records))?;
    for a in &report.analyses {
        let dot = entanglement_dot(&report.topology.name, report.topology.n_qubits, a);
        write_text(&out.join(format!("entanglement_{}.dot", a.label())), &dot)?;
    }
    Ok(())
}

/// Regroup flat records by analysis and recompute their summaries.
pub fn analyses_from_records(records: Vec<EdgeRecord>, topology: &DeviceTopology) -> Result<Vec<Analysis>> {
    let modes: Vec<bool> = if records.is_empty() {
        vec![false]
    } else {
        [false, true].into_iter().filter(|&q| records.iter().any(|r| r.qrem == q)).collect()
    };
    modes
        .into_iter()
        .map(|qrem| {
            let group: Vec<EdgeRecord> = records.iter().filter(|r| r.qrem == qrem).cloned().collect();
            let (summary, components) = summarize(&group, topology)?;
            Ok(Analysis { qrem, records: group, summary, components })
        })
        .collect()
}
