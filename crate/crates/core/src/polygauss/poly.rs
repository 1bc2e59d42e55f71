//! Sparse real multivariate polynomials and their Gaussian expectations.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};

use nalgebra::{Complex, DMatrix, DVector};

/// `Σ c_β x^β` keyed by exponent vectors.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u8>, f64>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// The coordinate `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, 1.0);
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u8>, f64)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent length must match variable count");
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u8>, &f64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, exponent: Vec<u8>, c: f64) {
        if c == 0.0 {
            return;
        }
        match self.terms.entry(exponent) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0.0 {
                    o.remove();
                }
            }
        }
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|e| e.iter().map(|&x| x as usize).sum()).max().unwrap_or(0)
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut p = Self::zero(self.nvars);
        if c != 0.0 {
            p.terms = self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect();
        }
        p
    }

    pub fn add_scaled(&mut self, other: &Poly, c: f64) {
        assert_eq!(self.nvars, other.nvars);
        for (e, v) in &other.terms {
            self.add_term(e.clone(), v * c);
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        assert_eq!(self.nvars, other.nvars);
        let mut acc: BTreeMap<Vec<u8>, f64> = BTreeMap::new();
        for (e1, v1) in &self.terms {
            for (e2, v2) in &other.terms {
                let e: Vec<u8> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_insert(0.0) += v1 * v2;
            }
        }
        let mut p = Poly { nvars: self.nvars, terms: acc };
        p.prune(0.0);
        p
    }

    /// Drops coefficients with `|c| ≤ rel · max|c|` (exact zeros when `rel = 0`).
    pub fn prune(&mut self, rel: f64) {
        let cut = rel * self.max_abs();
        self.terms.retain(|_, v| v.abs() > cut);
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let deg = self.degree();
        let powers: Vec<Vec<f64>> = x
            .iter()
            .map(|&xi| {
                let mut p = Vec::with_capacity(deg + 1);
                let mut acc = 1.0;
                for _ in 0..=deg {
                    p.push(acc);
                    acc *= xi;
                }
                p
            })
            .collect();
        self.terms
            .iter()
            .map(|(e, c)| c * e.iter().enumerate().map(|(i, &k)| powers[i][k as usize]).product::<f64>())
            .sum()
    }

    pub fn eval_complex(&self, x: &[Complex<f64>]) -> Complex<f64> {
        let deg = self.degree();
        let powers: Vec<Vec<Complex<f64>>> = x
            .iter()
            .map(|&xi| {
                let mut p = Vec::with_capacity(deg + 1);
                let mut acc = Complex::new(1.0, 0.0);
                for _ in 0..=deg {
                    p.push(acc);
                    acc *= xi;
                }
                p
            })
            .collect();
        let mut total = Complex::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut m = Complex::new(*c, 0.0);
            for (i, &k) in e.iter().enumerate() {
                m *= powers[i][k as usize];
            }
            total += m;
        }
        total
    }

    /// `P(L x + d)` as a polynomial in `x`, where `L` is `nvars × k`.
    pub fn substitute(&self, l: &DMatrix<f64>, d: &DVector<f64>) -> Poly {
        assert_eq!(l.nrows(), self.nvars);
        assert_eq!(d.len(), self.nvars);
        let k = l.ncols();
        let deg = self.degree();
        // powers[i][e] = (ℓ_i(x))^e
        let mut powers: Vec<Vec<Poly>> = Vec::with_capacity(self.nvars);
        for i in 0..self.nvars {
            let mut lin = Poly::constant(k, d[i]);
            for j in 0..k {
                lin.add_scaled(&Poly::var(k, j), l[(i, j)]);
            }
            let max_e = self.terms.keys().map(|e| e[i] as usize).max().unwrap_or(0).min(deg);
            let mut row = vec![Poly::constant(k, 1.0)];
            for e in 1..=max_e {
                let next = row[e - 1].mul(&lin);
                row.push(next);
            }
            powers.push(row);
        }
        let mut out = Poly::zero(k);
        for (e, c) in &self.terms {
            let mut m = Poly::constant(k, *c);
            for (i, &ei) in e.iter().enumerate() {
                if ei > 0 {
                    m = m.mul(&powers[i][ei as usize]);
                }
            }
            out.add_scaled(&m, 1.0);
        }
        out
    }

    /// Renames variables: variable `i` of `self` becomes variable `map[i]` of a
    /// polynomial in `nvars` variables.
    pub fn embed(&self, nvars: usize, map: &[usize]) -> Poly {
        assert_eq!(map.len(), self.nvars);
        let mut out = Poly::zero(nvars);
        for (e, c) in &self.terms {
            let mut ne = vec![0u8; nvars];
            for (i, &ei) in e.iter().enumerate() {
                ne[map[i]] += ei;
            }
            out.add_term(ne, *c);
        }
        out
    }

    /// Integrates the trailing `nvars − keep` variables against `N(0, cov)`,
    /// leaving a polynomial in the leading `keep` variables.
    pub fn integrate_tail(&self, keep: usize, cov: &DMatrix<f64>) -> Poly {
        let tail = self.nvars - keep;
        assert_eq!(cov.nrows(), tail);
        let mut moments = GaussianMoments::new(cov.clone());
        let mut out = Poly::zero(keep);
        for (e, c) in &self.terms {
            let m = moments.get(&e[keep..]);
            if m != 0.0 {
                out.add_term(e[..keep].to_vec(), c * m);
            }
        }
        out
    }

    /// `E[P(W)]` for `W ~ N(0, cov)`.
    pub fn expectation(&self, cov: &DMatrix<f64>) -> f64 {
        let p = self.integrate_tail(0, cov);
        p.terms.values().sum()
    }
}

/// Memoized centred Gaussian moments `E[w^β]` by Isserlis' recursion
/// `E[w_i w^β] = Σ_j C_ij β_j E[w^{β − e_j}]`.
pub struct GaussianMoments {
    cov: DMatrix<f64>,
    memo: HashMap<Vec<u8>, f64>,
}

impl GaussianMoments {
    pub fn new(cov: DMatrix<f64>) -> Self {
        Self { cov, memo: HashMap::new() }
    }

    pub fn get(&mut self, beta: &[u8]) -> f64 {
        let total: usize = beta.iter().map(|&b| b as usize).sum();
        if total == 0 {
            return 1.0;
        }
        if total % 2 == 1 {
            return 0.0;
        }
        if let Some(v) = self.memo.get(beta) {
            return *v;
        }
        let i = beta.iter().position(|&b| b > 0).unwrap();
        let mut rest = beta.to_vec();
        rest[i] -= 1;
        let mut acc = 0.0;
        for j in 0..rest.len() {
            if rest[j] == 0 || self.cov[(i, j)] == 0.0 {
                continue;
            }
            let mult = rest[j] as f64;
            rest[j] -= 1;
            acc += self.cov[(i, j)] * mult * self.get(&rest);
            rest[j] += 1;
        }
        self.memo.insert(beta.to_vec(), acc);
        acc
    }
}
