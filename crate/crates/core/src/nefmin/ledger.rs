//! Bookkeeping graph for the replacement criteria.

use serde::Serialize;

use super::CurveSet;
use crate::error::EngineError;

/// One accepted elimination.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LedgerRecord {
    /// The eliminated subset (sorted curve ids).
    pub subset: Vec<usize>,
    /// 2 or 3.
    pub criterion: u8,
    /// Pivot curve for criterion 2, or the curve in the subset for a criterion-3 edge.
    pub pivot: usize,
    /// Curves added as edge targets from the pivot.
    pub targets: Vec<usize>,
    /// For criterion 3, the divisor id used.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub divisor: Option<usize>,
}

/// Directed graph on curve ids. Insertions are all-or-nothing and refused when they
/// would close a directed cycle.
#[derive(Debug, Clone, Default)]
pub struct EliminationLedger {
    out: Vec<CurveSet>,
    pub records: Vec<LedgerRecord>,
}

impl EliminationLedger {
    pub fn new(curves: usize) -> Self {
        EliminationLedger {
            out: vec![CurveSet::EMPTY; curves],
            records: Vec::new(),
        }
    }

    pub fn edge_count(&self) -> usize {
        self.out.iter().map(|s| s.len()).sum()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut v = Vec::new();
        for (a, s) in self.out.iter().enumerate() {
            for b in s.ids() {
                v.push((a, b));
            }
        }
        v
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.out[a].contains(b)
    }

    /// Adds all edges or none. Self-loops count as cycles.
    pub fn try_insert(&mut self, edges: &[(usize, usize)]) -> Result<(), EngineError> {
        let saved = self.out.clone();
        for &(a, b) in edges {
            if a == b {
                return Err(EngineError::LedgerCycle { from: a, to: b });
            }
            self.out[a].insert(b);
        }
        if !self.is_acyclic() {
            self.out = saved;
            let (from, to) = edges[0];
            return Err(EngineError::LedgerCycle { from, to });
        }
        Ok(())
    }

    /// Kahn's algorithm over the whole graph.
    pub fn is_acyclic(&self) -> bool {
        let n = self.out.len();
        let mut indeg = vec![0usize; n];
        for s in &self.out {
            for b in s.ids() {
                indeg[b] += 1;
            }
        }
        let mut stack: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = stack.pop() {
            seen += 1;
            for b in self.out[v].ids() {
                indeg[b] -= 1;
                if indeg[b] == 0 {
                    stack.push(b);
                }
            }
        }
        seen == n
    }
}
