//! Sparse multivariate polynomials over machine floats, keyed by exponent
//! multi-indices aligned with a variable list.

use nalgebra::{DMatrix, DVector};
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Poly {
    terms: BTreeMap<Vec<u32>, f64>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly {
            terms: BTreeMap::new(),
        }
    }

    /// The constant 1 over `n` variables.
    pub fn one(n: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(vec![0u32; n], 1.0);
        Poly { terms }
    }

    pub fn from_map(terms: BTreeMap<Vec<u32>, f64>) -> Self {
        Poly { terms }
    }

    pub fn to_map(&self) -> BTreeMap<Vec<u32>, f64> {
        self.terms.clone()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn get(&self, key: &[u32]) -> f64 {
        self.terms.get(key).copied().unwrap_or(0.0)
    }

    pub fn add_term(&mut self, key: Vec<u32>, coeff: f64) {
        let entry = self.terms.entry(key).or_insert(0.0);
        *entry += coeff;
    }

    pub fn add_scaled(&mut self, other: &Poly, factor: f64) {
        for (key, &coeff) in &other.terms {
            self.add_term(key.clone(), coeff * factor);
        }
    }

    pub fn scaled(&self, factor: f64) -> Poly {
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(k, &c)| (k.clone(), c * factor))
                .collect(),
        }
    }

    /// Exponent convolution.
    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ka, &ca) in &self.terms {
            for (kb, &cb) in &other.terms {
                let key: Vec<u32> = ka.iter().zip(kb).map(|(a, b)| a + b).collect();
                out.add_term(key, ca * cb);
            }
        }
        out
    }

    /// Product of two polynomials living in a common `n`-variable space:
    /// `self` occupies the first `self_dim` slots, `other`'s variable `r`
    /// sits at `other_pos[r]`.
    pub fn product_embedded(
        a: &Poly,
        a_dim: usize,
        b: &Poly,
        b_pos: &[usize],
        n: usize,
    ) -> Poly {
        let mut out = Poly::zero();
        for (ka, &ca) in &a.terms {
            for (kb, &cb) in &b.terms {
                let mut key = vec![0u32; n];
                key[..a_dim].copy_from_slice(ka);
                for (r, &e) in kb.iter().enumerate() {
                    key[b_pos[r]] += e;
                }
                out.add_term(key, ca * cb);
            }
        }
        out
    }

    /// Drops coefficients below `rel * max|coeff|` (and exact zeros).
    pub fn prune(&mut self, rel: f64) {
        let max = self
            .terms
            .values()
            .fold(0.0_f64, |acc, &c| acc.max(c.abs()));
        if max == 0.0 {
            self.terms.clear();
            return;
        }
        let cutoff = rel * max;
        self.terms.retain(|_, c| c.abs() > cutoff);
    }

    /// Largest exponent of variable `idx` across all terms.
    pub fn max_exponent(&self, idx: usize) -> u32 {
        self.terms.keys().map(|k| k[idx]).max().unwrap_or(0)
    }

    /// Splits into `(power of variable idx, polynomial over the remaining
    /// variables)` groups; the returned keys have variable `idx` removed.
    pub fn split_by_variable(&self, idx: usize) -> BTreeMap<u32, Poly> {
        let mut groups: BTreeMap<u32, Poly> = BTreeMap::new();
        for (key, &coeff) in &self.terms {
            let power = key[idx];
            let mut rest: Vec<u32> = Vec::with_capacity(key.len() - 1);
            rest.extend_from_slice(&key[..idx]);
            rest.extend_from_slice(&key[idx + 1..]);
            groups.entry(power).or_insert_with(Poly::zero).add_term(rest, coeff);
        }
        groups
    }

    /// Substitutes each variable `i` by the linear form `sum_j inv[i][j] v_j`
    /// and expands.
    pub fn substitute_rows(&self, inv: &DMatrix<f64>) -> Poly {
        let n = inv.nrows();
        // linear form of each original variable as a polynomial
        let rows: Vec<Poly> = (0..n)
            .map(|i| {
                let mut p = Poly::zero();
                for j in 0..n {
                    let c = inv[(i, j)];
                    if c != 0.0 {
                        let mut key = vec![0u32; n];
                        key[j] = 1;
                        p.add_term(key, c);
                    }
                }
                p
            })
            .collect();
        let mut out = Poly::zero();
        for (key, &coeff) in &self.terms {
            let mut term = Poly::one(n);
            for (i, &e) in key.iter().enumerate() {
                for _ in 0..e {
                    term = term.mul(&rows[i]);
                }
            }
            out.add_scaled(&term, coeff);
        }
        out
    }

    /// Partially evaluates variable `idx` at `value`, removing it from the
    /// exponent keys.
    pub fn evaluate_variable(&self, idx: usize, value: f64) -> Poly {
        let mut out = Poly::zero();
        for (key, &coeff) in &self.terms {
            let mut rest: Vec<u32> = Vec::with_capacity(key.len() - 1);
            rest.extend_from_slice(&key[..idx]);
            rest.extend_from_slice(&key[idx + 1..]);
            out.add_term(rest, coeff * value.powi(key[idx] as i32));
        }
        out
    }

    pub fn eval(&self, point: &DVector<f64>) -> f64 {
        self.terms
            .iter()
            .map(|(key, &coeff)| {
                coeff
                    * key
                        .iter()
                        .enumerate()
                        .map(|(i, &e)| point[i].powi(e as i32))
                        .product::<f64>()
            })
            .sum()
    }
}
