//! Instrumentation registry. A `Metrics` value is threaded explicitly through
//! every call that runs a maxflow or an expander decomposition, so concurrent
//! runs never share counters.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metrics {
    pub maxflow_calls: u64,
    pub maxflow_vertices: u64,
    pub maxflow_edges: u64,
    pub ed_calls: u64,
    pub ed_vertices: u64,
    pub ed_edges: u64,
    pub isolating_cuts_calls: u64,
    pub remove_leaf_calls: u64,
    pub cut_threshold_calls: u64,
    pub detect_calls: u64,
    pub recursion_calls: u64,
    pub recursion_depth: u64,
    pub oracle_calls: u64,
}

impl Metrics {
    pub fn new() -> Metrics {
        Metrics::default()
    }

    pub fn record_maxflow(&mut self, vertices: usize, edges: usize) {
        self.maxflow_calls += 1;
        self.maxflow_vertices += vertices as u64;
        self.maxflow_edges += edges as u64;
    }

    pub fn record_ed(&mut self, vertices: usize, edges: usize) {
        self.ed_calls += 1;
        self.ed_vertices += vertices as u64;
        self.ed_edges += edges as u64;
    }

    pub fn enter_recursion(&mut self, depth: usize) {
        self.recursion_calls += 1;
        self.recursion_depth = self.recursion_depth.max(depth as u64);
    }

    /// Total maxflow plus expander-decomposition instance edges.
    pub fn total_instance_edges(&self) -> u64 {
        self.maxflow_edges + self.ed_edges
    }

    pub fn merge(&mut self, other: &Metrics) {
        self.maxflow_calls += other.maxflow_calls;
        self.maxflow_vertices += other.maxflow_vertices;
        self.maxflow_edges += other.maxflow_edges;
        self.ed_calls += other.ed_calls;
        self.ed_vertices += other.ed_vertices;
        self.ed_edges += other.ed_edges;
        self.isolating_cuts_calls += other.isolating_cuts_calls;
        self.remove_leaf_calls += other.remove_leaf_calls;
        self.cut_threshold_calls += other.cut_threshold_calls;
        self.detect_calls += other.detect_calls;
        self.recursion_calls += other.recursion_calls;
        self.recursion_depth = self.recursion_depth.max(other.recursion_depth);
        self.oracle_calls += other.oracle_calls;
    }
}

/// One line of the metrics report: counters plus the derived ratios used in
/// scaling studies. `wall_ms` is the only timing field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub command: String,
    pub n: usize,
    pub m: usize,
    #[serde(flatten)]
    pub counters: Metrics,
    pub total_instance_edges: u64,
    pub maxflow_edges_per_m: f64,
    pub instance_edges_per_m: f64,
    pub wall_ms: u64,
}

impl MetricsRecord {
    pub fn new(command: &str, n: usize, m: usize, counters: &Metrics, wall_ms: u64) -> MetricsRecord {
        let per_m = |x: u64| if m == 0 { 0.0 } else { x as f64 / m as f64 };
        MetricsRecord {
            command: command.to_string(),
            n,
            m,
            counters: counters.clone(),
            total_instance_edges: counters.total_instance_edges(),
            maxflow_edges_per_m: per_m(counters.maxflow_edges),
            instance_edges_per_m: per_m(counters.total_instance_edges()),
            wall_ms,
        }
    }
}
