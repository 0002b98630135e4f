//! Sparse multivariate polynomials with rational coefficients.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num::{One, Zero};

use crate::exactlin::{Mat, Scalar};

/// Exponent vector of a monomial.
pub type Exps = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exps, Scalar>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Scalar) -> Self {
        Poly::monomial(nvars, vec![0; nvars], c)
    }

    pub fn one(nvars: usize) -> Self {
        Poly::constant(nvars, Scalar::one())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Poly::monomial(nvars, e, Scalar::one())
    }

    pub fn monomial(nvars: usize, exps: Exps, c: Scalar) -> Self {
        assert_eq!(exps.len(), nvars, "monomial: exponent length mismatch");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        Poly { nvars, terms }
    }

    /// `Σ cᵢ Xᵢ`.
    pub fn linear(coeffs: &[Scalar]) -> Self {
        let n = coeffs.len();
        coeffs.iter().enumerate().fold(Poly::zero(n), |acc, (i, c)| acc + Poly::var(n, i).scale(c))
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exps, Scalar)>) -> Self {
        let mut p = Poly::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "from_terms: exponent length mismatch");
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Exps, c: Scalar) {
        use std::collections::btree_map::Entry;
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Exps, Scalar> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, e: &[u32]) -> Scalar {
        self.terms.get(e).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            Some(d) => degs.all(|x| x == d),
            None => true,
        }
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    pub fn pow(&self, k: u32) -> Poly {
        (0..k).fold(Poly::one(self.nvars), |acc, _| &acc * self)
    }

    pub fn eval(&self, x: &[Scalar]) -> Scalar {
        assert_eq!(x.len(), self.nvars, "eval: point dimension mismatch");
        let mut acc = Scalar::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    m *= xi;
                }
            }
            acc += m;
        }
        acc
    }

    /// Part of degree exactly `k`.
    pub fn homogeneous_part(&self, k: u32) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().filter(|(e, _)| e.iter().sum::<u32>() == k).map(|(e, c)| (e.clone(), c.clone())).collect(),
        }
    }

    /// `Σ_k F_k · L^{deg-k}` for the degree-`k` parts `F_k` of `self`.
    pub fn homogenize(&self, l: &Poly, deg: u32) -> Poly {
        assert!(self.degree().unwrap_or(0) <= deg, "homogenize: target degree below polynomial degree");
        let mut out = Poly::zero(self.nvars);
        for k in 0..=deg {
            let part = self.homogeneous_part(k);
            if !part.is_zero() {
                out = out + &part * &l.pow(deg - k);
            }
        }
        out
    }

    /// Symmetric Gram matrix of a quadratic form (`x^T G x = self`).
    pub fn quadratic_matrix(&self) -> Mat {
        let n = self.nvars;
        let half = Scalar::new(1.into(), 2.into());
        let mut g = Mat::zeros(n, n);
        for (e, c) in &self.terms {
            let idx: Vec<usize> = e.iter().enumerate().flat_map(|(i, &k)| std::iter::repeat_n(i, k as usize)).collect();
            match idx.as_slice() {
                [i, j] if i == j => g.set(*i, *i, g.get(*i, *i) + c),
                [i, j] => {
                    let h = c * &half;
                    g.set(*i, *j, g.get(*i, *j) + &h);
                    g.set(*j, *i, g.get(*j, *i) + &h);
                }
                _ => panic!("quadratic_matrix: polynomial is not a quadratic form"),
            }
        }
        g
    }
}

/// All exponent vectors in `n` variables of total degree `k`, lexicographically decreasing.
pub fn monomials_of_degree(n: usize, k: u32) -> Vec<Exps> {
    if n == 0 {
        return if k == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in (0..=k).rev() {
        for mut rest in monomials_of_degree(n - 1, k - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, other: Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars, "poly add: variable count mismatch");
        for (e, c) in other.terms {
            self.add_term(e, c);
        }
        self
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, other: Poly) -> Poly {
        self + (-other)
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly { nvars: self.nvars, terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect() }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars, "poly mul: variable count mismatch");
        let mut out = Poly::zero(self.nvars);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let e: Exps = a.iter().zip(b).map(|(i, j)| i + j).collect();
                out.add_term(e, x * y);
            }
        }
        out
    }
}
