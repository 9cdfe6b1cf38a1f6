//! Sparse real multivariate polynomials.

use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: f64) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, 1.0);
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Vec<u32>, f64)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars);
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: f64) {
        if c == 0.0 {
            return;
        }
        let slot = self.terms.entry(exps).or_insert(0.0);
        *slot += c;
        if *slot == 0.0 {
            self.terms.retain(|_, v| *v != 0.0);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.terms.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut p = self.clone();
        for (e, &c) in &other.terms {
            p.add_term(e.clone(), c);
        }
        p
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_terms(self.nvars, self.terms.iter().map(|(e, &c)| (e.clone(), c * s)))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut p = Self::zero(self.nvars);
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                p.add_term(e, ca * cb);
            }
        }
        p
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::constant(self.nvars, 1.0);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, &c)| {
                c * e
                    .iter()
                    .zip(x)
                    .map(|(&p, &xi)| xi.powi(p as i32))
                    .product::<f64>()
            })
            .sum()
    }

    /// Replaces variable `i` by `subs[i]`, all of which share one variable set.
    pub fn compose(&self, subs: &[Poly]) -> Poly {
        assert_eq!(subs.len(), self.nvars);
        let nv = subs.first().map_or(0, |s| s.nvars);
        let mut out = Poly::zero(nv);
        for (e, &c) in &self.terms {
            let mut t = Poly::constant(nv, c);
            for (i, &p) in e.iter().enumerate() {
                if p > 0 {
                    t = t.mul(&subs[i].pow(p));
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// ∂/∂x_i.
    pub fn derivative(&self, i: usize) -> Poly {
        Poly::from_terms(
            self.nvars,
            self.terms.iter().filter(|(e, _)| e[i] > 0).map(|(e, &c)| {
                let mut e2 = e.clone();
                e2[i] -= 1;
                (e2, c * e[i] as f64)
            }),
        )
    }
}
