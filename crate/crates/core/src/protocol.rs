//! Triorthogonal distillation protocols.
//!
//! A protocol is an `m x n` binary matrix `G`: rows are logical qubits,
//! columns are commuting Z-type pi/8 rotations, each consuming one magic
//! state. Output rows come first. For T-type protocols the output rows are
//! exactly the odd-weight rows; CCZ-type protocols designate output triples
//! whose triple overlap is odd (that odd overlap is what synthesizes the CCZ
//! phase instead of independent T outputs).
//!
//! Fault analysis: a Z-type fault on the magic state consumed by column `c`
//! propagates through the injection gadget as the Pauli `Z` on every row in
//! that column's support. A fault pattern `e` over columns therefore applies
//! `Z` on the rows where `G e` is odd. It is detected when a check row is
//! hit, benign when `G e = 0`, and malignant when only output rows are hit.

use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::gf2::{BitMatrix, BitVec};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;

/// Largest column count for which fault enumeration sweeps all `2^n`
/// patterns; above this only weight-bounded enumeration is offered.
pub const FULL_ENUMERATION_LIMIT: usize = 24;

/// Default weight bound for protocols too wide for a full sweep.
pub const DEFAULT_WEIGHT_BOUND: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum ProtocolKind {
    /// Distills `|T>` states; outputs are the odd-weight rows.
    TState,
    /// Distills CCZ resource states; each triple of output rows listed here
    /// has odd triple overlap.
    Ccz { triples: Vec<[usize; 3]> },
}

/// An `m x n` protocol matrix with `k` output rows (stored first).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriorthogonalMatrix {
    pub name: String,
    rows: Vec<BitVec>,
    n: usize,
    k: usize,
    kind: ProtocolKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    RowWidth { row: usize, width: usize, expected: usize },
    OutputRowParity { row: usize, weight: usize },
    CheckRowParity { row: usize, weight: usize },
    OddRowCount { expected: usize, actual: usize },
    OddRowOrder { row: usize },
    PairOverlap { a: usize, b: usize, overlap: usize },
    TripleOverlap { a: usize, b: usize, c: usize, overlap: usize },
    CczTripleEven { triple: [usize; 3], overlap: usize },
    CczTripleRange { triple: [usize; 3] },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::RowWidth { row, width, expected } => {
                write!(f, "row {row} has width {width}, expected {expected}")
            }
            Violation::OutputRowParity { row, weight } => {
                write!(f, "output row {row} has even weight {weight}")
            }
            Violation::CheckRowParity { row, weight } => {
                write!(f, "check row {row} has odd weight {weight}")
            }
            Violation::OddRowCount { expected, actual } => {
                write!(f, "expected {expected} odd-weight rows, found {actual}")
            }
            Violation::OddRowOrder { row } => {
                write!(f, "odd-weight row {row} appears after an even-weight row")
            }
            Violation::PairOverlap { a, b, overlap } => {
                write!(f, "rows ({a},{b}) have odd pair overlap {overlap}")
            }
            Violation::TripleOverlap { a, b, c, overlap } => {
                write!(f, "rows ({a},{b},{c}) have odd triple overlap {overlap}")
            }
            Violation::CczTripleEven { triple, overlap } => {
                write!(
                    f,
                    "designated CCZ triple {triple:?} has even overlap {overlap}"
                )
            }
            Violation::CczTripleRange { triple } => {
                write!(f, "CCZ triple {triple:?} references non-output rows")
            }
        }
    }
}

/// Result of [`TriorthogonalMatrix::verify`]; empty iff the matrix is a
/// valid protocol of its declared kind.
#[derive(Debug, Clone, Default)]
pub struct VerificationReport {
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            write!(f, "valid")
        } else {
            for v in &self.violations {
                writeln!(f, "{v}")?;
            }
            Ok(())
        }
    }
}

impl TriorthogonalMatrix {
    pub fn new(
        name: impl Into<String>,
        rows: Vec<BitVec>,
        k: usize,
        kind: ProtocolKind,
    ) -> Result<Self> {
        let n = rows.first().map_or(0, BitVec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::ProtocolFormat("inconsistent row widths".into()));
        }
        if k > rows.len() {
            return Err(Error::ProtocolFormat(format!(
                "k={k} exceeds row count {}",
                rows.len()
            )));
        }
        Ok(Self {
            name: name.into(),
            rows,
            n,
            k,
            kind,
        })
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn col_count(&self) -> usize {
        self.n
    }

    pub fn output_count(&self) -> usize {
        self.k
    }

    pub fn kind(&self) -> &ProtocolKind {
        &self.kind
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn row(&self, i: usize) -> &BitVec {
        &self.rows[i]
    }

    pub fn is_output_row(&self, i: usize) -> bool {
        i < self.k
    }

    /// Support of column `c` as a row bitmask (`m <= 64`).
    pub fn column_mask(&self, c: usize) -> u64 {
        let mut mask = 0u64;
        for (r, row) in self.rows.iter().enumerate() {
            if row.get(c) {
                mask |= 1 << r;
            }
        }
        mask
    }

    pub fn as_matrix(&self) -> BitMatrix {
        BitMatrix::from_rows(self.rows.clone())
    }

    /// Checks the triorthogonality conditions of the declared kind and
    /// returns every violation found.
    pub fn verify(&self) -> VerificationReport {
        let mut report = VerificationReport::default();
        let m = self.rows.len();

        match &self.kind {
            ProtocolKind::TState => {
                let odd_rows: Vec<usize> = (0..m)
                    .filter(|&i| self.rows[i].popcount() % 2 == 1)
                    .collect();
                if odd_rows.len() != self.k {
                    report.violations.push(Violation::OddRowCount {
                        expected: self.k,
                        actual: odd_rows.len(),
                    });
                }
                for (i, row) in self.rows.iter().enumerate() {
                    let w = row.popcount();
                    if i < self.k && w % 2 == 0 {
                        report
                            .violations
                            .push(Violation::OutputRowParity { row: i, weight: w });
                    }
                    if i >= self.k && w % 2 == 1 {
                        report
                            .violations
                            .push(Violation::CheckRowParity { row: i, weight: w });
                    }
                }
            }
            ProtocolKind::Ccz { triples } => {
                // Output rows are positional; checks must still be even.
                for (i, row) in self.rows.iter().enumerate().skip(self.k) {
                    let w = row.popcount();
                    if w % 2 == 1 {
                        report
                            .violations
                            .push(Violation::CheckRowParity { row: i, weight: w });
                    }
                }
                for t in triples {
                    if t.iter().any(|&r| r >= self.k) {
                        report
                            .violations
                            .push(Violation::CczTripleRange { triple: *t });
                    }
                }
            }
        }

        for a in 0..m {
            for b in (a + 1)..m {
                let overlap = self.rows[a].and_popcount(&self.rows[b]);
                if overlap % 2 == 1 {
                    report
                        .violations
                        .push(Violation::PairOverlap { a, b, overlap });
                }
            }
        }

        let designated: Vec<[usize; 3]> = match &self.kind {
            ProtocolKind::TState => Vec::new(),
            ProtocolKind::Ccz { triples } => triples
                .iter()
                .map(|t| {
                    let mut s = *t;
                    s.sort_unstable();
                    s
                })
                .collect(),
        };
        for a in 0..m {
            for b in (a + 1)..m {
                for c in (b + 1)..m {
                    let overlap = self.rows[a].and3_popcount(&self.rows[b], &self.rows[c]);
                    let is_designated = designated.contains(&[a, b, c]);
                    if is_designated && overlap % 2 == 0 {
                        report.violations.push(Violation::CczTripleEven {
                            triple: [a, b, c],
                            overlap,
                        });
                    }
                    if !is_designated && overlap % 2 == 1 {
                        report.violations.push(Violation::TripleOverlap {
                            a,
                            b,
                            c,
                            overlap,
                        });
                    }
                }
            }
        }

        report
    }

    /// Exhaustively classifies fault patterns up to weight `w_max`.
    pub fn enumerate_faults(&self, w_max: usize, exec: Exec) -> Result<FaultPolynomial> {
        enumerate_faults(self, w_max, exec)
    }

    pub fn footprint(&self) -> WorkingProfile {
        WorkingProfile::of(self)
    }

    pub fn phase_profile(&self) -> PhaseProfile {
        PhaseProfile::of(self)
    }
}

// ---------------------------------------------------------------------------
// Fault enumeration
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeightCounts {
    pub detected: u64,
    pub benign: u64,
    pub malignant: u64,
}

impl WeightCounts {
    pub fn total(&self) -> u64 {
        self.detected + self.benign + self.malignant
    }
}

/// Classified fault pattern counts by weight, with the derived suppression
/// order `t` (smallest malignant weight) and prefactor `c` (malignant count
/// at weight `t`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultPolynomial {
    pub n: usize,
    pub w_max: usize,
    /// Indexed by weight `0..=w_max`.
    pub counts: Vec<WeightCounts>,
    pub t: Option<usize>,
    pub c: u64,
    /// True when `w_max == n`, i.e. every one of the `2^n` patterns was seen.
    pub exhaustive: bool,
}

impl FaultPolynomial {
    /// Probability that an i.i.d. Z-fault pattern with per-column rate `z`
    /// escapes detection (fires no check row).
    pub fn accept_probability(&self, z: f64) -> f64 {
        self.weighted_sum(z, |wc| (wc.benign + wc.malignant) as f64)
    }

    /// Probability of an undetected output-flipping pattern.
    pub fn malignant_probability(&self, z: f64) -> f64 {
        self.weighted_sum(z, |wc| wc.malignant as f64)
    }

    /// Output error rate conditioned on acceptance.
    pub fn output_error(&self, z: f64) -> f64 {
        let a = self.accept_probability(z);
        if a == 0.0 {
            0.0
        } else {
            self.malignant_probability(z) / a
        }
    }

    fn weighted_sum(&self, z: f64, f: impl Fn(&WeightCounts) -> f64) -> f64 {
        let mut sum = 0.0;
        for (w, wc) in self.counts.iter().enumerate() {
            let coeff = f(wc);
            if coeff != 0.0 {
                sum += coeff * z.powi(w as i32) * (1.0 - z).powi((self.n - w) as i32);
            }
        }
        sum
    }
}

/// Row syndrome of a fault pattern, packed into a u64 (one bit per row).
#[inline]
fn classify(synd: u64, check_mask: u64) -> usize {
    if synd & check_mask != 0 {
        0 // detected
    } else if synd == 0 {
        1 // benign
    } else {
        2 // malignant
    }
}

pub fn enumerate_faults(
    g: &TriorthogonalMatrix,
    w_max: usize,
    exec: Exec,
) -> Result<FaultPolynomial> {
    let n = g.col_count();
    if w_max > n {
        return Err(Error::DimensionMismatch(format!(
            "w_max={w_max} exceeds column count {n}"
        )));
    }
    if n > FULL_ENUMERATION_LIMIT && w_max > 8 {
        return Err(Error::Compile(format!(
            "weight bound {w_max} too large for n={n}; full enumeration caps at n={FULL_ENUMERATION_LIMIT}"
        )));
    }
    let col_synd: Vec<u64> = (0..n).map(|c| g.column_mask(c)).collect();
    let check_mask: u64 = ((1u64 << g.row_count()) - 1) & !((1u64 << g.output_count()) - 1);

    let counts = if n <= FULL_ENUMERATION_LIMIT && w_max == n {
        full_sweep(&col_synd, check_mask, n, exec)
    } else {
        bounded_sweep(&col_synd, check_mask, n, w_max, exec)
    };

    let t = counts
        .iter()
        .enumerate()
        .find(|(_, wc)| wc.malignant > 0)
        .map(|(w, _)| w);
    let c = t.map_or(0, |t| counts[t].malignant);
    Ok(FaultPolynomial {
        n,
        w_max,
        counts,
        t,
        c,
        exhaustive: w_max == n,
    })
}

/// Gray-code sweep over all `2^n` patterns, split into prefix blocks for
/// parallelism. The syndrome is updated with one XOR per visited pattern.
fn full_sweep(col_synd: &[u64], check_mask: u64, n: usize, exec: Exec) -> Vec<WeightCounts> {
    let low_bits = n.min(14);
    let high_bits = n - low_bits;
    let prefixes: Vec<u64> = (0..(1u64 << high_bits)).collect();

    let blocks = exec::map_collect(exec, prefixes, |prefix| {
        let mut counts = vec![WeightCounts::default(); n + 1];
        let mut synd = 0u64;
        for c in 0..high_bits {
            if (prefix >> c) & 1 == 1 {
                synd ^= col_synd[low_bits + c];
            }
        }
        let base_weight = prefix.count_ones() as usize;
        let mut gray = 0u64;
        let mut weight = base_weight;
        // Pattern 0 of the low block.
        bump(&mut counts[weight], classify(synd, check_mask));
        for i in 1u64..(1u64 << low_bits) {
            let bit = i.trailing_zeros() as usize;
            gray ^= 1 << bit;
            synd ^= col_synd[bit];
            if (gray >> bit) & 1 == 1 {
                weight += 1;
            } else {
                weight -= 1;
            }
            bump(&mut counts[weight], classify(synd, check_mask));
        }
        counts
    });

    merge_counts(blocks, n + 1)
}

/// Enumerates all column subsets of weight `<= w_max`, parallelized over the
/// first chosen column.
fn bounded_sweep(
    col_synd: &[u64],
    check_mask: u64,
    n: usize,
    w_max: usize,
    exec: Exec,
) -> Vec<WeightCounts> {
    let mut counts = vec![WeightCounts::default(); w_max + 1];
    bump(&mut counts[0], 1); // empty pattern is benign
    if w_max == 0 {
        return counts;
    }
    let firsts: Vec<usize> = (0..n).collect();
    let blocks = exec::map_collect(exec, firsts, |first| {
        let mut counts = vec![WeightCounts::default(); w_max + 1];
        let mut stack_cols = Vec::with_capacity(w_max);
        stack_cols.push(first);
        descend(
            col_synd,
            check_mask,
            w_max,
            &mut stack_cols,
            col_synd[first],
            &mut counts,
        );
        counts
    });
    let merged = merge_counts(blocks, w_max + 1);
    for w in 1..=w_max {
        counts[w] = merged[w];
    }
    counts
}

fn descend(
    col_synd: &[u64],
    check_mask: u64,
    w_max: usize,
    cols: &mut Vec<usize>,
    synd: u64,
    counts: &mut [WeightCounts],
) {
    bump(&mut counts[cols.len()], classify(synd, check_mask));
    if cols.len() == w_max {
        return;
    }
    let start = cols.last().unwrap() + 1;
    for next in start..col_synd.len() {
        cols.push(next);
        descend(col_synd, check_mask, w_max, cols, synd ^ col_synd[next], counts);
        cols.pop();
    }
}

#[inline]
fn bump(wc: &mut WeightCounts, class: usize) {
    match class {
        0 => wc.detected += 1,
        1 => wc.benign += 1,
        _ => wc.malignant += 1,
    }
}

fn merge_counts(blocks: Vec<Vec<WeightCounts>>, len: usize) -> Vec<WeightCounts> {
    let mut out = vec![WeightCounts::default(); len];
    for block in blocks {
        for (acc, b) in out.iter_mut().zip(block) {
            acc.detected += b.detected;
            acc.benign += b.benign;
            acc.malignant += b.malignant;
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Working profile (footprint)
// ---------------------------------------------------------------------------

/// Active-row intervals and the peak count of simultaneously working rows.
///
/// Row `i` works on column `j` when `j >= f_i` and either the row is an
/// output (outputs stay live once initialized) or `j <= l_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkingProfile {
    pub first_ones: Vec<Option<usize>>,
    pub last_ones: Vec<Option<usize>>,
    /// Rows working at each column.
    pub working_sets: Vec<Vec<usize>>,
    pub peak: usize,
    pub peak_column: usize,
}

impl WorkingProfile {
    pub fn of(g: &TriorthogonalMatrix) -> Self {
        let m = g.row_count();
        let n = g.col_count();
        let first_ones: Vec<Option<usize>> = (0..m).map(|i| g.row(i).first_one()).collect();
        let last_ones: Vec<Option<usize>> = (0..m).map(|i| g.row(i).last_one()).collect();
        let mut working_sets = Vec::with_capacity(n);
        let mut peak = 0;
        let mut peak_column = 0;
        for j in 0..n {
            let mut set = Vec::new();
            for i in 0..m {
                let Some(f) = first_ones[i] else { continue };
                if j < f {
                    continue;
                }
                let live = if g.is_output_row(i) {
                    true
                } else {
                    j <= last_ones[i].unwrap()
                };
                if live {
                    set.push(i);
                }
            }
            if set.len() > peak {
                peak = set.len();
                peak_column = j;
            }
            working_sets.push(set);
        }
        Self {
            first_ones,
            last_ones,
            working_sets,
            peak,
            peak_column,
        }
    }
}

// ---------------------------------------------------------------------------
// Ideal output phase profile
// ---------------------------------------------------------------------------

/// Column-count combinatorics of `G` reduced to the phase polynomial of the
/// ideal protocol output.
///
/// Running every rotation on `|+>^m` yields the diagonal phase
/// `phi(x) = -(pi/4) sum_i N_i x_i + (pi/2) sum_{i<j} N_ij x_i x_j
///           - pi sum_{i<j<k} N_ijk x_i x_j x_k`
/// where `N` counts columns supported on the given row set (higher-order
/// terms vanish mod 2 pi). Check rows decouple from the state exactly when
/// `N_r = 0 (mod 8)` and every pair involving a check satisfies
/// `N = 0 (mod 4)` (triples are even by triorthogonality); the residual
/// polynomial on output rows defines the target resource state.
#[derive(Debug, Clone)]
pub struct PhaseProfile {
    pub k: usize,
    /// `N_i mod 8` for output rows.
    pub linear: Vec<u8>,
    /// `N_ij mod 4` for output pairs `(i, j)`, `i < j`.
    pub quadratic: Vec<(usize, usize, u8)>,
    /// `N_ijk mod 2` for output triples, only odd ones listed.
    pub cubic: Vec<(usize, usize, usize)>,
    /// Check rows whose decoupling conditions fail (weight mod 8, or a pair
    /// with odd multiple-of-2 overlap). Empty for schedulable protocols.
    pub dirty_checks: Vec<String>,
}

impl PhaseProfile {
    pub fn of(g: &TriorthogonalMatrix) -> Self {
        let m = g.row_count();
        let k = g.output_count();
        let mut dirty = Vec::new();
        for r in k..m {
            let w = g.row(r).popcount();
            if w % 8 != 0 {
                dirty.push(format!("check row {r} weight {w} != 0 mod 8"));
            }
        }
        for a in 0..m {
            for b in (a + 1)..m {
                if a >= k || b >= k {
                    let o = g.row(a).and_popcount(g.row(b));
                    if o % 4 != 0 {
                        dirty.push(format!("pair ({a},{b}) overlap {o} != 0 mod 4"));
                    }
                }
            }
        }
        for a in 0..m {
            for b in (a + 1)..m {
                for c in (b + 1)..m {
                    if (a >= k || b >= k || c >= k)
                        && g.row(a).and3_popcount(g.row(b), g.row(c)) % 2 == 1
                    {
                        dirty.push(format!("triple ({a},{b},{c}) has odd overlap"));
                    }
                }
            }
        }

        let linear = (0..k).map(|i| (g.row(i).popcount() % 8) as u8).collect();
        let mut quadratic = Vec::new();
        for i in 0..k {
            for j in (i + 1)..k {
                let o = (g.row(i).and_popcount(g.row(j)) % 4) as u8;
                if o != 0 {
                    quadratic.push((i, j, o));
                }
            }
        }
        let mut cubic = Vec::new();
        for i in 0..k {
            for j in (i + 1)..k {
                for l in (j + 1)..k {
                    if g.row(i).and3_popcount(g.row(j), g.row(l)) % 2 == 1 {
                        cubic.push((i, j, l));
                    }
                }
            }
        }
        Self {
            k,
            linear,
            quadratic,
            cubic,
            dirty_checks: dirty,
        }
    }

    /// True when check rows decouple cleanly, i.e. the ideal run accepts
    /// with probability 1 and the output is the pure target state.
    pub fn is_schedulable(&self) -> bool {
        self.dirty_checks.is_empty()
    }

    /// Phase of basis state `x` (bitmask over output rows) in units of pi/4.
    pub fn phase_units(&self, x: u64) -> u8 {
        let mut units: u32 = 0;
        for (i, &ni) in self.linear.iter().enumerate() {
            if (x >> i) & 1 == 1 {
                // -(pi/4) N_i
                units += 8 - u32::from(ni);
            }
        }
        for &(i, j, nij) in &self.quadratic {
            if (x >> i) & 1 == 1 && (x >> j) & 1 == 1 {
                // +(pi/2) N_ij
                units += 2 * u32::from(nij);
            }
        }
        for &(i, j, l) in &self.cubic {
            if (x >> i) & 1 == 1 && (x >> j) & 1 == 1 && (x >> l) & 1 == 1 {
                // -pi per odd triple
                units += 4;
            }
        }
        (units % 8) as u8
    }
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

/// Parses the protocol text format:
///
/// ```text
/// # optional comments; directives: "# name: ...", "# kind: ccz",
/// # "# triples: 0,1,2 3,4,5"
/// m n k
/// <m lines of n characters from {0,1}, output rows first>
/// ```
pub fn parse_protocol(text: &str, validate: bool) -> Result<TriorthogonalMatrix> {
    let mut name = String::from("unnamed");
    let mut kind = ProtocolKind::TState;
    let mut triples: Vec<[usize; 3]> = Vec::new();
    let mut is_ccz = false;
    let mut header: Option<(usize, usize, usize)> = None;
    let mut rows: Vec<BitVec> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(v) = comment.strip_prefix("name:") {
                name = v.trim().to_string();
            } else if let Some(v) = comment.strip_prefix("kind:") {
                match v.trim() {
                    "ccz" => is_ccz = true,
                    "t" => is_ccz = false,
                    other => {
                        return Err(Error::ProtocolFormat(format!(
                            "line {}: unknown kind '{other}'",
                            lineno + 1
                        )))
                    }
                }
            } else if let Some(v) = comment.strip_prefix("triples:") {
                for group in v.trim().split_whitespace() {
                    let idx: Vec<usize> = group
                        .split(',')
                        .map(|s| {
                            s.parse::<usize>().map_err(|_| {
                                Error::ProtocolFormat(format!(
                                    "line {}: bad triple '{group}'",
                                    lineno + 1
                                ))
                            })
                        })
                        .collect::<Result<_>>()?;
                    if idx.len() != 3 {
                        return Err(Error::ProtocolFormat(format!(
                            "line {}: triple '{group}' must have 3 entries",
                            lineno + 1
                        )));
                    }
                    triples.push([idx[0], idx[1], idx[2]]);
                }
            }
            continue;
        }
        if header.is_none() {
            let parts: Vec<usize> = line
                .split_whitespace()
                .map(|s| {
                    s.parse::<usize>().map_err(|_| {
                        Error::ProtocolFormat(format!("line {}: bad header", lineno + 1))
                    })
                })
                .collect::<Result<_>>()?;
            if parts.len() != 3 {
                return Err(Error::ProtocolFormat(format!(
                    "line {}: header must be 'm n k'",
                    lineno + 1
                )));
            }
            header = Some((parts[0], parts[1], parts[2]));
            continue;
        }
        let (_, n, _) = header.unwrap();
        if line.len() != n {
            return Err(Error::ProtocolFormat(format!(
                "line {}: row has {} columns, expected {n}",
                lineno + 1,
                line.len()
            )));
        }
        let bits: Vec<bool> = line
            .chars()
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::ProtocolFormat(format!(
                    "line {}: invalid character '{ch}'",
                    lineno + 1
                ))),
            })
            .collect::<Result<_>>()?;
        rows.push(BitVec::from_bools(&bits));
    }

    let Some((m, _n, k)) = header else {
        return Err(Error::ProtocolFormat("empty protocol file".into()));
    };
    if rows.len() != m {
        return Err(Error::ProtocolFormat(format!(
            "expected {m} rows, found {}",
            rows.len()
        )));
    }
    if m > 64 {
        return Err(Error::ProtocolFormat(format!(
            "row count {m} exceeds supported maximum 64"
        )));
    }
    if is_ccz {
        kind = ProtocolKind::Ccz { triples };
    }
    let g = TriorthogonalMatrix::new(name, rows, k, kind)?;
    if validate {
        let report = g.verify();
        if !report.is_valid() {
            return Err(Error::NotTriorthogonal(report.to_string()));
        }
    }
    Ok(g)
}

pub fn format_protocol(g: &TriorthogonalMatrix) -> String {
    let mut out = String::new();
    out.push_str(&format!("# name: {}\n", g.name));
    if let ProtocolKind::Ccz { triples } = g.kind() {
        out.push_str("# kind: ccz\n");
        if !triples.is_empty() {
            let groups: Vec<String> = triples
                .iter()
                .map(|t| format!("{},{},{}", t[0], t[1], t[2]))
                .collect();
            out.push_str(&format!("# triples: {}\n", groups.join(" ")));
        }
    }
    out.push_str(&format!(
        "{} {} {}\n",
        g.row_count(),
        g.col_count(),
        g.output_count()
    ));
    for row in g.rows() {
        for c in 0..g.col_count() {
            out.push(if row.get(c) { '1' } else { '0' });
        }
        out.push('\n');
    }
    out
}

pub fn load_protocol(path: &Path, validate: bool) -> Result<TriorthogonalMatrix> {
    let text = std::fs::read_to_string(path)?;
    parse_protocol(&text, validate)
}

pub fn save_protocol(g: &TriorthogonalMatrix, path: &Path) -> Result<()> {
    std::fs::write(path, format_protocol(g))?;
    Ok(())
}

/// Built-in protocol data shipped with the crate.
pub mod presets {
    use super::*;

    pub const FIFTEEN_TO_ONE: &str = include_str!("../data/protocols/15to1.txt");
    pub const TWENTY_TO_FOUR: &str = include_str!("../data/protocols/20to4.txt");
    pub const EIGHT_TO_CCZ: &str = include_str!("../data/protocols/8toccz.txt");
    pub const FORTY_NINE_TO_ONE: &str = include_str!("../data/protocols/49to1.txt");
    pub const SIXTY_FOUR_TO_TWO_CCZ: &str = include_str!("../data/protocols/64to2ccz.txt");

    pub const NAMES: &[&str] = &["15-to-1", "20-to-4", "8-to-ccz", "49-to-1", "64-to-2ccz"];

    /// Looks a preset up by name; returns the parsed, validated matrix.
    pub fn by_name(name: &str) -> Result<TriorthogonalMatrix> {
        let text = match name {
            "15-to-1" | "15to1" => FIFTEEN_TO_ONE,
            "20-to-4" | "20to4" => TWENTY_TO_FOUR,
            "8-to-ccz" | "8toccz" => EIGHT_TO_CCZ,
            "49-to-1" | "49to1" => FORTY_NINE_TO_ONE,
            "64-to-2ccz" | "64to2ccz" => SIXTY_FOUR_TO_TWO_CCZ,
            other => {
                return Err(Error::Config(format!(
                    "unknown protocol preset '{other}' (available: {})",
                    NAMES.join(", ")
                )))
            }
        };
        parse_protocol(text, true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_row() -> TriorthogonalMatrix {
        TriorthogonalMatrix::new(
            "unit",
            vec![BitVec::from_indices(1, &[0])],
            1,
            ProtocolKind::TState,
        )
        .unwrap()
    }

    #[test]
    fn single_one_row_is_valid() {
        let g = single_row();
        assert!(g.verify().is_valid());
        assert_eq!(g.output_count(), 1);
    }

    #[test]
    fn duplicate_odd_rows_are_invalid() {
        let g = TriorthogonalMatrix::new(
            "bad",
            vec![BitVec::from_indices(1, &[0]), BitVec::from_indices(1, &[0])],
            2,
            ProtocolKind::TState,
        )
        .unwrap();
        let report = g.verify();
        assert!(!report.is_valid());
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::PairOverlap { overlap: 1, .. })));
    }

    #[test]
    fn fifteen_to_one_is_valid() {
        let g = presets::by_name("15-to-1").unwrap();
        assert_eq!(g.row_count(), 5);
        assert_eq!(g.col_count(), 15);
        assert_eq!(g.output_count(), 1);
        assert!(g.verify().is_valid());
    }

    /// Direct per-pattern loop, independent of the Gray-code sweep.
    fn enumeration_oracle(g: &TriorthogonalMatrix) -> Vec<WeightCounts> {
        let n = g.col_count();
        let cols: Vec<u64> = (0..n).map(|c| g.column_mask(c)).collect();
        let check_mask: u64 =
            ((1u64 << g.row_count()) - 1) & !((1u64 << g.output_count()) - 1);
        let mut counts = vec![WeightCounts::default(); n + 1];
        for pattern in 0u64..(1 << n) {
            let mut synd = 0u64;
            for (c, cm) in cols.iter().enumerate() {
                if (pattern >> c) & 1 == 1 {
                    synd ^= cm;
                }
            }
            let w = pattern.count_ones() as usize;
            bump(&mut counts[w], classify(synd, check_mask));
        }
        counts
    }

    #[test]
    fn fifteen_to_one_has_35_weight3_malignant() {
        let g = presets::by_name("15-to-1").unwrap();
        let poly = g.enumerate_faults(15, Exec::default()).unwrap();
        assert_eq!(poly.t, Some(3));
        assert_eq!(poly.c, 35);
        assert_eq!(poly.counts, enumeration_oracle(&g));
        // No malignant patterns below t; totals are binomials.
        for w in 0..3 {
            assert_eq!(poly.counts[w].malignant, 0);
        }
        for (w, wc) in poly.counts.iter().enumerate() {
            let binom = (0..w).fold(1u64, |acc, i| acc * (15 - i) as u64 / (i + 1) as u64);
            assert_eq!(wc.total(), binom, "weight {w}");
        }
    }

    #[test]
    fn weight_zero_is_benign() {
        let g = single_row();
        let poly = g.enumerate_faults(0, Exec::Sequential).unwrap();
        assert_eq!(poly.counts[0].benign, 1);
        assert_eq!(poly.counts[0].total(), 1);
    }

    #[test]
    fn bounded_matches_full_on_15to1() {
        let g = presets::by_name("15-to-1").unwrap();
        let full = g.enumerate_faults(15, Exec::Sequential).unwrap();
        let bounded = g.enumerate_faults(4, Exec::Sequential).unwrap();
        for w in 0..=4 {
            assert_eq!(full.counts[w], bounded.counts[w]);
        }
    }

    #[test]
    fn w_max_too_large_is_error() {
        let g = single_row();
        assert!(g.enumerate_faults(2, Exec::Sequential).is_err());
    }

    #[test]
    fn footprint_of_15to1_is_5() {
        let g = presets::by_name("15-to-1").unwrap();
        assert_eq!(g.footprint().peak, 5);
    }

    #[test]
    fn footprint_all_ones() {
        let rows = vec![
            BitVec::from_indices(4, &[0, 1, 2, 3]),
            BitVec::from_indices(4, &[0, 1, 2, 3]),
        ];
        let g = TriorthogonalMatrix::new("allones", rows, 0, ProtocolKind::TState).unwrap();
        assert_eq!(g.footprint().peak, 2);
    }

    #[test]
    fn footprint_ignores_zero_rows_and_keeps_outputs_live() {
        let rows = vec![
            BitVec::from_indices(4, &[0]),    // output: live from col 0 onward
            BitVec::from_indices(4, &[1, 2]), // check: live on [1,2]
            BitVec::zeros(4),                 // empty check: never live
        ];
        let g = TriorthogonalMatrix::new("mix", rows, 1, ProtocolKind::TState).unwrap();
        let p = g.footprint();
        assert_eq!(p.working_sets[0], vec![0]);
        assert_eq!(p.working_sets[1], vec![0, 1]);
        assert_eq!(p.working_sets[3], vec![0]);
        assert_eq!(p.peak, 2);
    }

    #[test]
    fn phase_profile_15to1_is_clean_t_output() {
        let g = presets::by_name("15-to-1").unwrap();
        let prof = g.phase_profile();
        assert!(prof.is_schedulable(), "{:?}", prof.dirty_checks);
        // Output row weight 7: phase exp(i pi/4 x), the |T> state.
        assert_eq!(prof.phase_units(0), 0);
        assert_eq!(prof.phase_units(1), 1);
    }

    #[test]
    fn roundtrip_preserves_bits() {
        let g = presets::by_name("15-to-1").unwrap();
        let text = format_protocol(&g);
        let g2 = parse_protocol(&text, true).unwrap();
        assert_eq!(g, g2);
    }

    #[test]
    fn empty_file_is_error() {
        assert!(parse_protocol("", true).is_err());
        assert!(parse_protocol("# just a comment\n", true).is_err());
    }

    #[test]
    fn malformed_rows_are_errors() {
        assert!(parse_protocol("1 3 1\n10\n", true).is_err());
        assert!(parse_protocol("1 3 1\n1a0\n", true).is_err());
        assert!(parse_protocol("2 3 1\n101\n", true).is_err());
    }

    #[test]
    fn validation_can_be_disabled() {
        let text = "2 1 2\n1\n1\n";
        assert!(parse_protocol(text, true).is_err());
        assert!(parse_protocol(text, false).is_ok());
    }
}
