//! Exact `P(A wins)` from the conditional-probability recurrence.
//!
//! The sub-instance `(i, j)` is the suffix pair `(a_i.., b_j..)`. The leading
//! A and leading B collide first:
//!
//! ```text
//! f(i, j) = a_i/(a_i+b_j) · f(i, j+1) + b_j/(a_i+b_j) · f(i+1, j)
//! f(i, n) = 1 for i < m        f(m, j) = 0 for j < n
//! ```
//!
//! Evaluation is bottom-up over the grid, so there is no recursion depth to
//! worry about for large `m + n`.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::rational::{Probability, Rational};

/// Full memo table for one instance, `(m+1)·(n+1)` entries.
///
/// `(m, n)` (both suffixes empty) is never reached by the recurrence and is
/// stored as `None`.
#[derive(Debug, Clone)]
pub struct DpTable {
    m: usize,
    n: usize,
    cells: Vec<Option<Rational>>,
}

impl DpTable {
    pub fn build(inst: &Instance) -> Self {
        let (a, b) = (inst.a(), inst.b());
        let (m, n) = (a.len(), b.len());
        let width = n + 1;
        let mut cells = vec![None; (m + 1) * width];
        for i in (0..=m).rev() {
            for j in (0..=n).rev() {
                let value = match (i == m, j == n) {
                    (true, true) => None,
                    (false, true) => Some(Rational::one()),
                    (true, false) => Some(Rational::zero()),
                    (false, false) => {
                        let total = &a[i] + &b[j];
                        let a_survives = cells[i * width + j + 1].as_ref().expect("filled");
                        let b_survives = cells[(i + 1) * width + j].as_ref().expect("filled");
                        Some((&a[i] * a_survives + &b[j] * b_survives) / total)
                    }
                };
                cells[i * width + j] = value;
            }
        }
        Self { m, n, cells }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn len(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize, j: usize) -> Option<&Rational> {
        if i > self.m || j > self.n {
            return None;
        }
        self.cells[i * (self.n + 1) + j].as_ref()
    }

    pub fn value(&self) -> Option<&Rational> {
        self.get(0, 0)
    }
}

/// Exact `P(A wins)` for the instance. Uses `O(n)` working memory by keeping
/// a single row of the table.
pub fn p_a_wins_recursive(inst: &Instance) -> Result<Probability> {
    let (a, b) = (inst.a(), inst.b());
    match (a.is_empty(), b.is_empty()) {
        (true, true) => return Err(Error::EmptyInstance),
        (false, true) => return Ok(Probability::one()),
        (true, false) => return Ok(Probability::zero()),
        _ => {}
    }
    let n = b.len();
    // row[j] = f(i+1, j); starts at i = m - 1 with f(m, j) = 0, f(m, n) unused.
    let mut row: Vec<Rational> = vec![Rational::zero(); n + 1];
    for ai in a.iter().rev() {
        let mut next = vec![Rational::zero(); n + 1];
        next[n] = Rational::one();
        for j in (0..n).rev() {
            let bj = &b[j];
            next[j] = (ai * &next[j + 1] + bj * &row[j]) / (ai + bj);
        }
        row = next;
    }
    Probability::new(row.swap_remove(0))
}

/// `a1^n / ∏ (a1 + b_j)`: the single-A closed form.
pub fn p_a_wins_single_a(a1: &Rational, b: &[Rational]) -> Probability {
    let value = b
        .iter()
        .fold(Rational::one(), |acc, bj| acc * a1 / (a1 + bj));
    Probability::new(value).expect("product of ratios in (0, 1]")
}
