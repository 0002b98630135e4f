//! Partition combinatorics of Springer fibres: orbit and fibre dimensions,
//! Kostka–Foulkes polynomials by charge, and the graded character of the
//! fibre cohomology as a Schur expansion.
//!
//! Grading convention: the coefficient of `q^i` counts `H^{2i}`. With it the
//! graded multiplicity of `χ^λ` in `H•(B_μ)` is the cocharge polynomial
//! `K̃_{λμ}(q) = q^{n(μ)} K_{λμ}(q⁻¹)`. This is the normalization for which
//! `q = 1` gives the Kostka number, degree 0 carries only the trivial
//! representation and the top degree `b_μ` carries only `χ^μ`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nilorbit::GradedPartition;
pub use crate::partition::Partition;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpringerError {
    #[error("partitions {lambda} and {mu} have different weights")]
    WeightMismatch { lambda: Partition, mu: Partition },
    #[error("partition {mu} does not have weight {n}")]
    NotAPartitionOf { mu: Partition, n: usize },
}

/// Polynomial in `q` as ascending integer coefficients, without trailing zeros.
pub type QPoly = Vec<u64>;

fn trim(mut p: QPoly) -> QPoly {
    while p.last() == Some(&0) {
        p.pop();
    }
    p
}

/// Value of a `q`-polynomial at `q = 1`.
pub fn at_one(p: &[u64]) -> u64 {
    p.iter().sum()
}

/// `dim O_μ = n² − Σ_k (2k−1) μ_k`.
pub fn orbit_dim(mu: &Partition, n: usize) -> Result<usize, SpringerError> {
    if mu.weight() != n {
        return Err(SpringerError::NotAPartitionOf { mu: mu.clone(), n });
    }
    let s: usize = mu.parts().iter().enumerate().map(|(k, &m)| (2 * k + 1) * m).sum();
    Ok(n * n - s)
}

/// `b_μ = Σ_k (k−1) μ_k`, the dimension of the Springer fibre.
pub fn springer_fibre_dim(mu: &Partition) -> usize {
    mu.n_statistic()
}

/// A semistandard tableau stored by rows.
pub type Tableau = Vec<Vec<usize>>;

/// All semistandard tableaux of shape `λ` and content `μ`, built by adding
/// one horizontal strip per letter.
pub fn semistandard_tableaux(lambda: &Partition, mu: &Partition) -> Vec<Tableau> {
    fn rec(lambda: &[usize], mu: &[usize], letter: usize, t: &mut Tableau, out: &mut Vec<Tableau>) {
        if letter == mu.len() {
            if t.iter().map(Vec::len).eq(lambda.iter().copied()) {
                out.push(t.clone());
            }
            return;
        }
        let old: Vec<usize> = t.iter().map(Vec::len).collect();
        strip(lambda, mu, letter, &old, 0, mu[letter], t, out);
    }
    // Distributes the `left` remaining copies of `letter` over rows `row..`.
    #[allow(clippy::too_many_arguments)]
    fn strip(
        lambda: &[usize],
        mu: &[usize],
        letter: usize,
        old: &[usize],
        row: usize,
        left: usize,
        t: &mut Tableau,
        out: &mut Vec<Tableau>,
    ) {
        if left == 0 {
            rec(lambda, mu, letter + 1, t, out);
            return;
        }
        if row == lambda.len() {
            return;
        }
        let cap = if row == 0 { lambda[0] } else { lambda[row].min(old[row - 1]) };
        let room = cap.saturating_sub(old[row]);
        for k in (0..=room.min(left)).rev() {
            t[row].extend(std::iter::repeat_n(letter + 1, k));
            strip(lambda, mu, letter, old, row + 1, left - k, t, out);
            let keep = t[row].len() - k;
            t[row].truncate(keep);
        }
    }
    if lambda.weight() != mu.weight() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut t: Tableau = vec![Vec::new(); lambda.len()];
    rec(lambda.parts(), mu.parts(), 0, &mut t, &mut out);
    out
}

/// Reading word: rows from bottom to top, each left to right.
pub fn reading_word(t: &Tableau) -> Vec<usize> {
    t.iter().rev().flatten().copied().collect()
}

/// Charge of a word whose content is a partition.
///
/// Repeatedly extracts a standard subword: start at the rightmost unused 1
/// and scan leftwards cyclically for 2, 3, …; every wrap past the left end
/// raises the index by one. The charge is the sum of indices.
pub fn charge(word: &[usize]) -> usize {
    let mut used = vec![false; word.len()];
    let mut total = 0;
    loop {
        let Some(mut pos) = (0..word.len()).rev().find(|&i| !used[i] && word[i] == 1) else {
            return total;
        };
        used[pos] = true;
        let mut index = 0;
        let mut letter = 2;
        loop {
            let left = (0..pos).rev().find(|&i| !used[i] && word[i] == letter);
            let next = match left {
                Some(i) => Some(i),
                None => {
                    let wrapped = (pos + 1..word.len()).rev().find(|&i| !used[i] && word[i] == letter);
                    if wrapped.is_some() {
                        index += 1;
                    }
                    wrapped
                }
            };
            let Some(i) = next else { break };
            used[i] = true;
            total += index;
            pos = i;
            letter += 1;
        }
    }
}

/// `K_{λμ}(q) = Σ_T q^{charge(T)}` over semistandard tableaux of shape `λ`
/// and content `μ`.
pub fn kostka_foulkes(lambda: &Partition, mu: &Partition) -> Result<QPoly, SpringerError> {
    if lambda.weight() != mu.weight() {
        return Err(SpringerError::WeightMismatch { lambda: lambda.clone(), mu: mu.clone() });
    }
    let mut p: QPoly = Vec::new();
    for t in semistandard_tableaux(lambda, mu) {
        let c = charge(&reading_word(&t));
        if p.len() <= c {
            p.resize(c + 1, 0);
        }
        p[c] += 1;
    }
    Ok(trim(p))
}

/// `q^{n(μ)} K_{λμ}(q⁻¹)`.
pub fn cocharge_kostka_foulkes(lambda: &Partition, mu: &Partition) -> Result<QPoly, SpringerError> {
    let k = kostka_foulkes(lambda, mu)?;
    let top = mu.n_statistic();
    let mut p = vec![0; top + 1];
    for (i, &c) in k.iter().enumerate() {
        p[top - i] += c;
    }
    Ok(trim(p))
}

/// `Σ_λ c_λ(q) s_λ` over partitions of `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymFunPoly {
    pub n: usize,
    pub terms: Vec<SymFunTerm>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymFunTerm {
    pub lambda: Partition,
    pub poly_q: QPoly,
}

impl SymFunPoly {
    /// Coefficient of `s_λ`, empty when absent.
    pub fn coefficient(&self, lambda: &Partition) -> QPoly {
        self.terms.iter().find(|t| &t.lambda == lambda).map(|t| t.poly_q.clone()).unwrap_or_default()
    }

    /// Largest `q`-degree present.
    pub fn degree(&self) -> Option<usize> {
        self.terms.iter().map(|t| t.poly_q.len() - 1).max()
    }

    /// Partitions whose coefficient has a nonzero `q^i` term.
    pub fn in_degree(&self, i: usize) -> Vec<Partition> {
        self.terms.iter().filter(|t| t.poly_q.get(i).is_some_and(|&c| c > 0)).map(|t| t.lambda.clone()).collect()
    }
}

/// Graded character of `H•(B_μ)`, in the convention of the module docs.
pub fn macdonald_value(mu: &Partition, n: usize) -> Result<SymFunPoly, SpringerError> {
    if mu.weight() != n {
        return Err(SpringerError::NotAPartitionOf { mu: mu.clone(), n });
    }
    let mut terms = Vec::new();
    for lambda in Partition::all(n) {
        let poly_q = cocharge_kostka_foulkes(&lambda, mu)?;
        if !poly_q.is_empty() {
            terms.push(SymFunTerm { lambda, poly_q });
        }
    }
    Ok(SymFunPoly { n, terms })
}

/// `(1^{M₀} 2^{M₁} …)` with `M_s` the number of parts equal to `s+1` over all levels.
pub fn forget_grading(gp: &GradedPartition) -> Partition {
    let top = gp.per_level.iter().map(|p| p.part(0)).max().unwrap_or(0);
    let mults: Vec<usize> = (1..=top).map(|k| gp.per_level.iter().map(|p| p.multiplicity(k)).sum()).collect();
    Partition::from_multiplicities(&mults)
}
