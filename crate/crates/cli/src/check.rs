use std::path::Path;

use serde::Serialize;

use crate::output::{read_trace_csv, TraceRow};
use crate::Result;

/// Result of auditing a finished trace file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceAudit {
    pub rows: usize,
    pub restarts: usize,
    pub total_backtracks: usize,
    pub violations: Vec<String>,
}

impl TraceAudit {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn audit_trace(path: &Path) -> Result<TraceAudit> {
    Ok(audit_rows(&read_trace_csv(path)?))
}

/// Row-level invariants every solver trace satisfies.
pub fn audit_rows(rows: &[TraceRow]) -> TraceAudit {
    let mut violations = Vec::new();
    let mut prev: Option<&TraceRow> = None;
    for r in rows {
        let at = r.k;
        if let Some(p) = prev {
            if r.k != p.k + 1 {
                violations.push(format!("k={at}: iteration counter jumps from {}", p.k));
            }
            if r.seconds < p.seconds {
                violations.push(format!("k={at}: wall clock decreases"));
            }
        }
        if !r.f.is_finite() {
            violations.push(format!("k={at}: objective is not finite"));
        }
        if !(r.l > 0.0 && r.l.is_finite()) {
            violations.push(format!("k={at}: L = {} is not positive", r.l));
        } else if (r.t * r.l - 1.0).abs() > 1e-9 {
            violations.push(format!("k={at}: t = {} is not 1/L", r.t));
        }
        if !(0.0..1.0).contains(&r.beta) {
            violations.push(format!("k={at}: beta = {} outside [0, 1)", r.beta));
        }
        if r.seconds < 0.0 {
            violations.push(format!("k={at}: negative wall clock"));
        }
        prev = Some(r);
    }
    TraceAudit {
        rows: rows.len(),
        restarts: rows.iter().filter(|r| r.restarted).count(),
        total_backtracks: rows.iter().map(|r| r.backtracks).sum(),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(k: usize) -> TraceRow {
        TraceRow {
            k,
            f: 1.0 / k as f64,
            rel_err: 0.0,
            l: 4.0,
            t: 0.25,
            backtracks: 1,
            beta: 0.5,
            restarted: k == 2,
            seconds: k as f64,
        }
    }

    #[test]
    fn clean_trace_passes() {
        let a = audit_rows(&[row(1), row(2), row(3)]);
        assert!(a.ok(), "{:?}", a.violations);
        assert_eq!((a.rows, a.restarts, a.total_backtracks), (3, 1, 3));
    }

    #[test]
    fn flags_each_violation() {
        let mut bad = vec![row(1), row(3)];
        bad[1].beta = 1.0;
        bad[1].t = 1.0;
        bad[1].seconds = 0.0;
        let a = audit_rows(&bad);
        assert_eq!(a.violations.len(), 4, "{:?}", a.violations);
    }
}
