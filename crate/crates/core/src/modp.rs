//! Arithmetic modulo the Mersenne prime `2^61 - 1`, used to find candidate
//! bases quickly before exact verification.

use num::{Integer, ToPrimitive};

use crate::exactlin::{Mat, Scalar};

pub const P: u64 = (1 << 61) - 1;

pub fn add(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= P {
        s - P
    } else {
        s
    }
}

pub fn sub(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + P - b
    }
}

pub fn mul(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % P as u128) as u64
}

pub fn pow(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul(r, a);
        }
        a = mul(a, a);
        e >>= 1;
    }
    r
}

pub fn inv(a: u64) -> u64 {
    pow(a, P - 2)
}

/// Image of a rational number, or `None` if its denominator is divisible by `P`.
pub fn reduce(x: &Scalar) -> Option<u64> {
    let p = num::BigInt::from(P);
    let num = x.numer().mod_floor(&p).to_u64()?;
    let den = x.denom().mod_floor(&p).to_u64()?;
    if den == 0 {
        return None;
    }
    Some(mul(num, inv(den)))
}

/// Square matrix over the field with `P` elements, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModMat {
    n: usize,
    data: Vec<u64>,
}

impl ModMat {
    pub fn from_mat(m: &Mat) -> Option<ModMat> {
        assert_eq!(m.rows(), m.cols(), "ModMat requires a square matrix");
        let data = m.flat().iter().map(reduce).collect::<Option<Vec<_>>>()?;
        Some(ModMat { n: m.rows(), data })
    }

    pub fn flat(&self) -> &[u64] {
        &self.data
    }

    fn product(&self, other: &ModMat) -> Vec<u64> {
        let n = self.n;
        let mut out = vec![0u64; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0 {
                    continue;
                }
                for j in 0..n {
                    let b = other.data[k * n + j];
                    if b != 0 {
                        out[i * n + j] = add(out[i * n + j], mul(a, b));
                    }
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &ModMat) -> ModMat {
        let ab = self.product(other);
        let ba = other.product(self);
        ModMat { n: self.n, data: ab.iter().zip(&ba).map(|(&x, &y)| sub(x, y)).collect() }
    }
}

/// Incremental row echelon form over `F_P`.
#[derive(Clone, Debug)]
pub struct ModEchelon {
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl ModEchelon {
    pub fn new() -> Self {
        ModEchelon { rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn insert(&mut self, v: &[u64]) -> bool {
        let mut v = v.to_vec();
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            let f = v[c];
            if f == 0 {
                continue;
            }
            for (x, &r) in v.iter_mut().zip(row).skip(c) {
                if r != 0 {
                    *x = sub(*x, mul(f, r));
                }
            }
        }
        let Some(c) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let s = inv(v[c]);
        for x in v.iter_mut().skip(c) {
            *x = mul(*x, s);
        }
        self.rows.push(v);
        self.pivots.push(c);
        true
    }
}
