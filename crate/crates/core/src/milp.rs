//! Mixed-integer model of the batching problem, written in CPLEX LP format.
//!
//! There are `n` batch slots. Variables: `NT_j` (job late), `X_j_b` (job in
//! slot), `c_j` (job completion), `Cb_b` (slot completion), `P_b` (slot
//! processing time). Rows, in emission order:
//!
//! | family   | count      | row                                     |
//! |----------|------------|-----------------------------------------|
//! | assign   | n          | `sum_b X_j_b = 1`                        |
//! | cap      | n          | `sum_j s_j X_j_b <= S`                   |
//! | pmax     | n^2        | `P_b - p_j X_j_b >= 0`                   |
//! | first    | 1          | `Cb_1 - P_1 = 0`                         |
//! | chain    | n - 1      | `Cb_b - Cb_{b-1} - P_b >= 0`             |
//! | link     | n^2        | `c_j - Cb_b - M X_j_b >= -M`             |
//! | late_ub  | n          | `c_j - M NT_j <= d_j`                    |
//! | late_lb  | n          | `c_j - M NT_j >= d_j + e - M`            |
//! | order    | n - 1      | optional: occupied slots precede empty ones |

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BatchSchedule, Instance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VarKind {
    Binary,
    Continuous,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub name: String,
    pub family: RowFamily,
    pub terms: Vec<(usize, i64)>,
    pub sense: Sense,
    pub rhs: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RowFamily {
    Assign,
    Capacity,
    BatchLength,
    FirstBatch,
    Chain,
    Link,
    LateUpper,
    LateLower,
    SlotOrder,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ModelOptions {
    /// Adds rows forcing occupied slots before empty ones.
    pub slot_order_cuts: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MilpModel {
    pub n: usize,
    pub big_m: i64,
    pub epsilon: i64,
    pub variables: Vec<Variable>,
    pub objective: Vec<(usize, i64)>,
    pub rows: Vec<Row>,
}

/// Variable index layout: `NT` block, then `X` (job-major), `c`, `Cb`, `P`.
#[derive(Clone, Copy, Debug)]
struct Layout {
    n: usize,
}

impl Layout {
    fn nt(self, j: usize) -> usize {
        j
    }
    fn x(self, j: usize, b: usize) -> usize {
        self.n + j * self.n + b
    }
    fn c(self, j: usize) -> usize {
        self.n + self.n * self.n + j
    }
    fn cb(self, b: usize) -> usize {
        2 * self.n + self.n * self.n + b
    }
    fn p(self, b: usize) -> usize {
        3 * self.n + self.n * self.n + b
    }
    fn count(self) -> usize {
        4 * self.n + self.n * self.n
    }
}

pub fn build_model(instance: &Instance) -> MilpModel {
    build_model_with(instance, ModelOptions::default())
}

pub fn build_model_with(instance: &Instance, options: ModelOptions) -> MilpModel {
    let n = instance.len();
    let jobs = instance.jobs();
    let l = Layout { n };
    let big_m = (instance.total_processing() + jobs.iter().map(|j| j.due).max().unwrap_or(0)) as i64;
    let epsilon = 1;

    let mut variables = Vec::with_capacity(l.count());
    for j in 1..=n {
        variables.push(Variable { name: format!("NT_{j}"), kind: VarKind::Binary });
    }
    for j in 1..=n {
        for b in 1..=n {
            variables.push(Variable { name: format!("X_{j}_{b}"), kind: VarKind::Binary });
        }
    }
    for (prefix, _) in [("c", 0), ("Cb", 1), ("P", 2)] {
        for i in 1..=n {
            variables.push(Variable { name: format!("{prefix}_{i}"), kind: VarKind::Continuous });
        }
    }

    let mut rows = Vec::new();
    let mut push = |name: String, family, terms, sense, rhs| rows.push(Row { name, family, terms, sense, rhs });
    for j in 0..n {
        push(format!("assign_{}", j + 1), RowFamily::Assign, (0..n).map(|b| (l.x(j, b), 1)).collect(), Sense::Eq, 1);
    }
    for b in 0..n {
        push(
            format!("cap_{}", b + 1),
            RowFamily::Capacity,
            (0..n).map(|j| (l.x(j, b), jobs[j].size as i64)).collect(),
            Sense::Le,
            instance.capacity() as i64,
        );
    }
    for (j, job) in jobs.iter().enumerate() {
        for b in 0..n {
            push(
                format!("pmax_{}_{}", j + 1, b + 1),
                RowFamily::BatchLength,
                vec![(l.p(b), 1), (l.x(j, b), -(job.processing as i64))],
                Sense::Ge,
                0,
            );
        }
    }
    push("first".into(), RowFamily::FirstBatch, vec![(l.cb(0), 1), (l.p(0), -1)], Sense::Eq, 0);
    for b in 1..n {
        push(
            format!("chain_{}", b + 1),
            RowFamily::Chain,
            vec![(l.cb(b), 1), (l.cb(b - 1), -1), (l.p(b), -1)],
            Sense::Ge,
            0,
        );
    }
    for j in 0..n {
        for b in 0..n {
            push(
                format!("link_{}_{}", j + 1, b + 1),
                RowFamily::Link,
                vec![(l.c(j), 1), (l.cb(b), -1), (l.x(j, b), -big_m)],
                Sense::Ge,
                -big_m,
            );
        }
    }
    for (j, job) in jobs.iter().enumerate() {
        push(
            format!("late_ub_{}", j + 1),
            RowFamily::LateUpper,
            vec![(l.c(j), 1), (l.nt(j), -big_m)],
            Sense::Le,
            job.due as i64,
        );
    }
    for (j, job) in jobs.iter().enumerate() {
        push(
            format!("late_lb_{}", j + 1),
            RowFamily::LateLower,
            vec![(l.c(j), 1), (l.nt(j), -big_m)],
            Sense::Ge,
            job.due as i64 + epsilon - big_m,
        );
    }
    if options.slot_order_cuts {
        for b in 1..n {
            let mut terms: Vec<(usize, i64)> = (0..n).map(|j| (l.x(j, b), 1)).collect();
            terms.extend((0..n).map(|j| (l.x(j, b - 1), -(n as i64))));
            push(format!("order_{}", b + 1), RowFamily::SlotOrder, terms, Sense::Le, 0);
        }
    }

    MilpModel { n, big_m, epsilon, variables, objective: (0..n).map(|j| (l.nt(j), 1)).collect(), rows }
}

impl MilpModel {
    pub fn binary_count(&self) -> usize {
        self.variables.iter().filter(|v| v.kind == VarKind::Binary).count()
    }

    pub fn continuous_count(&self) -> usize {
        self.variables.iter().filter(|v| v.kind == VarKind::Continuous).count()
    }

    pub fn rows_in(&self, family: RowFamily) -> usize {
        self.rows.iter().filter(|r| r.family == family).count()
    }

    /// Canonical LP text: objective, constraints in family order, bounds,
    /// binaries.
    pub fn to_lp_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "\\ batch scheduling, minimize tardy jobs");
        let _ = writeln!(out, "\\ n = {}, M = {}, e = {}", self.n, self.big_m, self.epsilon);
        out.push_str("Minimize\n");
        self.write_expr(&mut out, " obj:", &self.objective);
        out.push('\n');
        out.push_str("Subject To\n");
        for row in &self.rows {
            self.write_expr(&mut out, &format!(" {}:", row.name), &row.terms);
            let _ = writeln!(out, " {} {}", row.sense.symbol(), row.rhs);
        }
        out.push_str("Bounds\n");
        for v in self.variables.iter().filter(|v| v.kind == VarKind::Continuous) {
            let _ = writeln!(out, " {} >= 0", v.name);
        }
        out.push_str("Binaries\n");
        for chunk in self.variables.iter().filter(|v| v.kind == VarKind::Binary).collect::<Vec<_>>().chunks(10) {
            let names: Vec<&str> = chunk.iter().map(|v| v.name.as_str()).collect();
            let _ = writeln!(out, " {}", names.join(" "));
        }
        out.push_str("End\n");
        out
    }

    // Long expressions wrap onto continuation lines that never contain a colon.
    fn write_expr(&self, out: &mut String, label: &str, terms: &[(usize, i64)]) {
        out.push_str(label);
        for (i, &(var, coef)) in terms.iter().enumerate() {
            if i > 0 && i % 8 == 0 {
                out.push_str("\n  ");
            }
            let sign = if coef < 0 { '-' } else { '+' };
            let mag = coef.unsigned_abs();
            let name = &self.variables[var].name;
            if i == 0 && coef >= 0 {
                if mag == 1 {
                    let _ = write!(out, " {name}");
                } else {
                    let _ = write!(out, " {mag} {name}");
                }
            } else if mag == 1 {
                let _ = write!(out, " {sign} {name}");
            } else {
                let _ = write!(out, " {sign} {mag} {name}");
            }
        }
    }

    pub fn write_lp(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_lp_string())
            .map_err(|source| Error::Io { path: path.display().to_string(), source })
    }

    /// Maps a schedule to a variable assignment: batch `k` occupies slot `k`,
    /// unused slots are empty with zero length.
    pub fn encode(&self, instance: &Instance, schedule: &BatchSchedule) -> Vec<i64> {
        let l = Layout { n: self.n };
        let mut values = vec![0i64; l.count()];
        let mut clock = 0i64;
        for b in 0..self.n {
            let p = schedule.batch_processing().get(b).copied().unwrap_or(0) as i64;
            clock += p;
            values[l.p(b)] = p;
            values[l.cb(b)] = clock;
            if let Some(batch) = schedule.batches().get(b) {
                for &id in batch {
                    values[l.x(id.index(), b)] = 1;
                }
            }
        }
        for job in instance.jobs() {
            let j = job.id.index();
            values[l.c(j)] = schedule.completion_of(job.id) as i64;
            values[l.nt(j)] = schedule.is_tardy(job.id) as i64;
        }
        values
    }

    /// Names of rows violated by an assignment; empty when feasible.
    pub fn violated_rows(&self, values: &[i64]) -> Vec<String> {
        let mut bad: Vec<String> = self
            .rows
            .iter()
            .filter(|row| {
                let lhs: i64 = row.terms.iter().map(|&(v, c)| c * values[v]).sum();
                !match row.sense {
                    Sense::Le => lhs <= row.rhs,
                    Sense::Ge => lhs >= row.rhs,
                    Sense::Eq => lhs == row.rhs,
                }
            })
            .map(|row| row.name.clone())
            .collect();
        for (v, var) in self.variables.iter().enumerate() {
            let ok = match var.kind {
                VarKind::Binary => values[v] == 0 || values[v] == 1,
                VarKind::Continuous => values[v] >= 0,
            };
            if !ok {
                bad.push(format!("bound:{}", var.name));
            }
        }
        bad
    }

    pub fn objective_value(&self, values: &[i64]) -> i64 {
        self.objective.iter().map(|&(v, c)| c * values[v]).sum()
    }
}

/// Section counts read back from LP text.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LpSummary {
    pub objective_terms: usize,
    pub rows: usize,
    pub bounds: usize,
    pub binaries: usize,
    pub row_names: Vec<String>,
}

/// Minimal reader for the LP text produced by [`MilpModel::to_lp_string`].
pub fn parse_lp_summary(text: &str) -> std::result::Result<LpSummary, String> {
    #[derive(PartialEq)]
    enum Section {
        Head,
        Objective,
        Constraints,
        Bounds,
        Binaries,
        End,
    }
    let mut section = Section::Head;
    let mut summary = LpSummary::default();
    for line in text.lines() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('\\') {
            continue;
        }
        match trimmed.to_ascii_lowercase().as_str() {
            "minimize" => section = Section::Objective,
            "subject to" => section = Section::Constraints,
            "bounds" => section = Section::Bounds,
            "binaries" => section = Section::Binaries,
            "end" => section = Section::End,
            _ => match section {
                Section::Objective => {
                    let body = trimmed.split_once(':').map_or(trimmed, |(_, b)| b);
                    summary.objective_terms += body.split_whitespace().filter(|t| t.starts_with("NT_")).count();
                }
                Section::Constraints => {
                    if let Some((name, _)) = trimmed.split_once(':') {
                        summary.rows += 1;
                        summary.row_names.push(name.trim().to_string());
                    }
                }
                Section::Bounds => summary.bounds += 1,
                Section::Binaries => summary.binaries += trimmed.split_whitespace().count(),
                Section::Head | Section::End => return Err(format!("unexpected line `{trimmed}`")),
            },
        }
    }
    if section != Section::End {
        return Err("missing End".into());
    }
    Ok(summary)
}
