//! Univariate and bivariate complex polynomials.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::linalg::{self, CMatrix, C64};

/// Σ c_ij z1^i z2^j.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BivariatePoly {
    pub coeffs: BTreeMap<(usize, usize), C64>,
}

impl BivariatePoly {
    pub fn eval(&self, z1: C64, z2: C64) -> C64 {
        self.coeffs
            .iter()
            .map(|(&(i, j), &c)| c * z1.powu(i as u32) * z2.powu(j as u32))
            .sum()
    }

    /// (∂p/∂z1, ∂p/∂z2).
    pub fn gradient(&self, z1: C64, z2: C64) -> (C64, C64) {
        let mut d1 = C64::new(0.0, 0.0);
        let mut d2 = C64::new(0.0, 0.0);
        for (&(i, j), &c) in &self.coeffs {
            if i > 0 {
                d1 += c * (i as f64) * z1.powu(i as u32 - 1) * z2.powu(j as u32);
            }
            if j > 0 {
                d2 += c * (j as f64) * z1.powu(i as u32) * z2.powu(j as u32 - 1);
            }
        }
        (d1, d2)
    }

    pub fn total_degree(&self) -> usize {
        self.coeffs.keys().map(|&(i, j)| i + j).max().unwrap_or(0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.values().fold(0.0, |a, c| a.max(c.norm()))
    }

    pub fn coeff(&self, i: usize, j: usize) -> C64 {
        self.coeffs.get(&(i, j)).copied().unwrap_or_default()
    }

    /// Sum of |c_ij| |z1|^i |z2|^j, the natural scale of |p(z1, z2)|.
    pub fn term_scale(&self, z1: C64, z2: C64) -> f64 {
        self.coeffs
            .iter()
            .map(|(&(i, j), c)| c.norm() * z1.norm().powi(i as i32) * z2.norm().powi(j as i32))
            .sum()
    }

    /// max |a_ij − b_ij| / max(max|a|, max|b|).
    pub fn relative_distance(&self, other: &BivariatePoly) -> f64 {
        let mut keys: Vec<_> = self.coeffs.keys().chain(other.coeffs.keys()).copied().collect();
        keys.sort();
        keys.dedup();
        let diff = keys
            .iter()
            .map(|&(i, j)| (self.coeff(i, j) - other.coeff(i, j)).norm())
            .fold(0.0, f64::max);
        linalg::rel(diff, self.max_abs_coeff().max(other.max_abs_coeff()))
    }

    /// Coefficients of a polynomial of degree ≤ `deg` in each variable from its
    /// values on the (deg+1)-th roots of unity (inverse 2D DFT). Components below
    /// `chop`·max|c| are set to zero and vanishing terms dropped.
    pub fn interpolate<F>(deg: usize, chop: f64, mut f: F) -> Result<Self>
    where
        F: FnMut(C64, C64) -> Result<C64>,
    {
        let n = deg + 1;
        let nodes: Vec<C64> = (0..n)
            .map(|k| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64))
            .collect();
        let mut vals = vec![vec![C64::new(0.0, 0.0); n]; n];
        for a in 0..n {
            for b in 0..n {
                vals[a][b] = f(nodes[a], nodes[b])?;
            }
        }
        let mut raw = BTreeMap::new();
        for i in 0..n {
            for j in 0..n {
                let mut s = C64::new(0.0, 0.0);
                for a in 0..n {
                    for b in 0..n {
                        s += vals[a][b] * nodes[(a * i) % n].conj() * nodes[(b * j) % n].conj();
                    }
                }
                raw.insert((i, j), s / (n * n) as f64);
            }
        }
        let big = raw.values().fold(0.0_f64, |acc: f64, c: &C64| acc.max(c.norm()));
        let cut = chop * big;
        let coeffs = raw
            .into_iter()
            .filter_map(|(k, c)| {
                let re = if c.re.abs() <= cut { 0.0 } else { c.re };
                let im = if c.im.abs() <= cut { 0.0 } else { c.im };
                (re != 0.0 || im != 0.0).then_some((k, C64::new(re, im)))
            })
            .collect();
        Ok(Self { coeffs })
    }

    /// Restriction to the line z1 = a + b t, z2 = c + d t.
    pub fn restrict(&self, a: C64, b: C64, c: C64, d: C64) -> UnivariatePoly {
        let l1 = UnivariatePoly::new(vec![a, b]);
        let l2 = UnivariatePoly::new(vec![c, d]);
        let mut out = UnivariatePoly::new(vec![]);
        for (&(i, j), &coef) in &self.coeffs {
            let term = l1.pow(i).mul(&l2.pow(j)).scale(coef);
            out = out.add(&term);
        }
        out
    }
}

/// Σ c_k t^k with ascending coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct UnivariatePoly {
    pub coeffs: Vec<C64>,
}

impl UnivariatePoly {
    pub fn new(coeffs: Vec<C64>) -> Self {
        Self { coeffs }
    }

    pub fn eval(&self, t: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * t + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.coeffs.len().max(o.coeffs.len());
        Self::new(
            (0..n)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or_default()
                        + o.coeffs.get(k).copied().unwrap_or_default()
                })
                .collect(),
        )
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return Self::new(vec![]);
        }
        let mut c = vec![C64::new(0.0, 0.0); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Self::new(c)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut r = Self::new(vec![C64::new(1.0, 0.0)]);
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |a, c| a.max(c.norm()))
    }

    /// Drops leading coefficients below `rel_tol`·max|c|.
    pub fn trimmed(&self, rel_tol: f64) -> Self {
        let cut = rel_tol * self.max_abs_coeff();
        let mut c = self.coeffs.clone();
        while let Some(last) = c.last() {
            if last.norm() <= cut {
                c.pop();
            } else {
                break;
            }
        }
        Self::new(c)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Roots via companion-matrix eigenvalues, polished by Newton steps.
    pub fn roots(&self) -> Result<Vec<C64>> {
        let p = self.trimmed(0.0);
        let d = match p.degree() {
            None | Some(0) => return Ok(Vec::new()),
            Some(d) => d,
        };
        let lead = p.coeffs[d];
        let mut comp = CMatrix::zeros(d, d);
        for k in 1..d {
            comp[(k, k - 1)] = C64::new(1.0, 0.0);
        }
        for k in 0..d {
            comp[(k, d - 1)] = -p.coeffs[k] / lead;
        }
        let mut roots = linalg::eigenvalues(&comp)?;
        let dp = p.derivative();
        for r in roots.iter_mut() {
            for _ in 0..4 {
                let v = p.eval(*r);
                let dv = dp.eval(*r);
                if dv.norm() == 0.0 {
                    break;
                }
                let cand = *r - v / dv;
                if p.eval(cand).norm() < v.norm() {
                    *r = cand;
                } else {
                    break;
                }
            }
        }
        Ok(roots)
    }
}
