//! Time-stamped objective records shared by every solver.
//!
//! CSV schema: header `outer_iter,wall_seconds,objective`, one row per
//! evaluation, floats written with 17 significant digits.

use std::io::Write;

use crate::error::Result;

pub const CSV_HEADER: &str = "outer_iter,wall_seconds,objective";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub iteration: usize,
    /// Elapsed time since the solver started, stamped before the objective
    /// is evaluated. Includes earlier evaluations.
    pub wall_seconds: f64,
    /// Same clock with all objective evaluations excluded.
    pub solver_seconds: f64,
    pub objective: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
}

impl Trace {
    pub fn push(&mut self, record: TraceRecord) {
        self.records.push(record);
    }

    pub fn first(&self) -> Option<&TraceRecord> {
        self.records.first()
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Smallest objective seen so far, record by record.
    pub fn best_so_far(&self) -> Vec<f64> {
        let mut best = f64::INFINITY;
        self.records
            .iter()
            .map(|r| {
                best = best.min(r.objective);
                best
            })
            .collect()
    }

    pub fn best_objective(&self) -> Option<f64> {
        self.best_so_far().last().copied()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{CSV_HEADER}")?;
        for r in &self.records {
            writeln!(
                out,
                "{},{:.16e},{:.16e}",
                r.iteration, r.wall_seconds, r.objective
            )?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)
            .expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ascii output")
    }
}
