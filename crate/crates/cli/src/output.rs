//! Deterministic text and CSV rendering.

use std::fmt::Write as _;

use ddsim::linalg::ComplexMatrix;
use ddsim::operators::{pauli, tensor, Axis};

use crate::config::ExperimentConfig;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// `# ddsim <version> | command=... | config_sha256=... | master_seed=... | trials=...`
pub fn header(command: &str, config: &ExperimentConfig) -> String {
    format!(
        "# ddsim {VERSION} | command={command} | config_sha256={} | master_seed={} | trials={}\n",
        config.source_hash, config.master_seed, config.trials
    )
}

/// 17 significant digits, enough to round-trip any f64.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone)]
pub struct CsvTable {
    columns: Vec<&'static str>,
    rows: Vec<String>,
}

impl CsvTable {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, cells: &[String]) {
        assert_eq!(cells.len(), self.columns.len(), "row width must match the header");
        self.rows.push(cells.join(","));
    }

    pub fn render(&self, preamble: &str) -> String {
        let mut out = String::from(preamble);
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(row);
            out.push('\n');
        }
        out
    }
}

/// Coefficients c_P = Tr(P·X)/2ⁿ of X on n qubits in lexicographic I < X < Y < Z
/// order, dropping those below `floor`.
pub fn pauli_decomposition(x: &ComplexMatrix, n_sites: usize, floor: f64) -> Vec<(String, f64, f64)> {
    const AXES: [(Axis, char); 4] = [(Axis::I, 'I'), (Axis::X, 'X'), (Axis::Y, 'Y'), (Axis::Z, 'Z')];
    let dim = x.dim() as f64;
    let mut out = Vec::new();
    for code in 0..4usize.pow(n_sites as u32) {
        let mut digits = vec![0usize; n_sites];
        let mut c = code;
        for d in digits.iter_mut().rev() {
            *d = c % 4;
            c /= 4;
        }
        let factors: Vec<ComplexMatrix> = digits.iter().map(|&d| pauli(AXES[d].0)).collect();
        let p = tensor(&factors).expect("non-empty factor list");
        let coeff = p.hs_inner(x) / dim;
        if coeff.norm() > floor {
            let name: String = digits.iter().map(|&d| AXES[d].1).collect();
            out.push((name, coeff.re, coeff.im));
        }
    }
    out
}

/// `i j re im` for every entry above `floor`.
pub fn nonzero_entries(x: &ComplexMatrix, floor: f64) -> String {
    let mut out = String::new();
    for i in 0..x.dim() {
        for j in 0..x.dim() {
            let z = x[(i, j)];
            if z.norm() > floor {
                let _ = writeln!(out, "{i} {j} {} {}", num(z.re), num(z.im));
            }
        }
    }
    out
}
