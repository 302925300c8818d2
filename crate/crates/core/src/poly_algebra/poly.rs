//! Sparse multivariate polynomials over `Q`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::rat::{fmt_q, qi, to_f64, Q};

/// Sparse exponent vector: sorted `(variable, exponent)` pairs, exponents > 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Mono(pub Vec<(u16, u16)>);

impl Mono {
    pub fn one() -> Self {
        Mono(Vec::new())
    }

    pub fn var(i: usize) -> Self {
        Mono(vec![(i as u16, 1)])
    }

    pub fn from_dense(e: &[u32]) -> Self {
        Mono(e.iter().enumerate().filter(|(_, &x)| x > 0).map(|(i, &x)| (i as u16, x as u16)).collect())
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e as u32).sum()
    }

    pub fn exp(&self, var: usize) -> u32 {
        self.0.iter().find(|&&(v, _)| v as usize == var).map_or(0, |&(_, e)| e as u32)
    }

    pub fn weighted_degree(&self, w: &[u32]) -> u32 {
        self.0.iter().map(|&(v, e)| w[v as usize] * e as u32).sum()
    }

    pub fn mul(&self, o: &Mono) -> Mono {
        let mut out = Vec::with_capacity(self.0.len() + o.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() || j < o.0.len() {
            match (self.0.get(i), o.0.get(j)) {
                (Some(&(a, x)), Some(&(b, y))) if a == b => {
                    out.push((a, x + y));
                    i += 1;
                    j += 1;
                }
                (Some(&(a, x)), Some(&(b, _))) if a < b => {
                    out.push((a, x));
                    i += 1;
                }
                (Some(_), Some(&(b, y))) => {
                    out.push((b, y));
                    j += 1;
                }
                (Some(&t), None) => {
                    out.push(t);
                    i += 1;
                }
                (None, Some(&t)) => {
                    out.push(t);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        Mono(out)
    }

    /// `self / o` if `o` divides `self`.
    pub fn div(&self, o: &Mono) -> Option<Mono> {
        let mut out = self.0.clone();
        for &(v, e) in &o.0 {
            let slot = out.iter_mut().find(|(w, _)| *w == v)?;
            if slot.1 < e {
                return None;
            }
            slot.1 -= e;
        }
        out.retain(|&(_, e)| e > 0);
        Some(Mono(out))
    }

    pub fn dense(&self, n: usize) -> Vec<u32> {
        let mut d = vec![0; n];
        for &(v, e) in &self.0 {
            d[v as usize] = e as u32;
        }
        d
    }

    pub fn max_var(&self) -> Option<usize> {
        self.0.last().map(|&(v, _)| v as usize)
    }
}

impl Ord for Mono {
    /// Graded lexicographic with `x0 > x1 > …`.
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree().cmp(&o.degree()).then_with(|| {
            let (mut i, mut j) = (0, 0);
            loop {
                match (self.0.get(i), o.0.get(j)) {
                    (None, None) => return Ordering::Equal,
                    (Some(_), None) => return Ordering::Greater,
                    (None, Some(_)) => return Ordering::Less,
                    (Some(&(a, x)), Some(&(b, y))) => {
                        if a != b {
                            // lower variable present only on one side wins
                            return if a < b { Ordering::Greater } else { Ordering::Less };
                        }
                        if x != y {
                            return x.cmp(&y);
                        }
                        i += 1;
                        j += 1;
                    }
                }
            }
        })
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    pub terms: BTreeMap<Mono, Q>,
}

impl Poly {
    pub fn constant(c: Q) -> Self {
        let mut p = Poly::default();
        if !c.is_zero() {
            p.terms.insert(Mono::one(), c);
        }
        p
    }

    pub fn var(i: usize) -> Self {
        Self::monomial(Mono::var(i), Q::one())
    }

    pub fn monomial(m: Mono, c: Q) -> Self {
        let mut p = Poly::default();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Mono, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn add_scaled(&mut self, o: &Poly, s: &Q) {
        if s.is_zero() {
            return;
        }
        for (m, c) in &o.terms {
            self.add_term(m.clone(), c * s);
        }
    }

    pub fn scale(&self, s: &Q) -> Poly {
        if s.is_zero() {
            return Poly::default();
        }
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect() }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    /// `Some(d)` if every monomial has weighted degree `d`.
    pub fn weighted_homogeneous_degree(&self, w: &[u32]) -> Option<u32> {
        let mut it = self.terms.keys().map(|m| m.weighted_degree(w));
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut r = Poly::constant(Q::one());
        for _ in 0..e {
            r = &r * self;
        }
        r
    }

    pub fn derivative(&self, var: usize) -> Poly {
        let mut out = Poly::default();
        for (m, c) in &self.terms {
            let e = m.exp(var);
            if e == 0 {
                continue;
            }
            let nm = m.div(&Mono::var(var)).unwrap();
            out.add_term(nm, c * qi(e as i64));
        }
        out
    }

    /// `∂^β`, `β` given sparsely.
    pub fn derivative_multi(&self, beta: &Mono) -> Poly {
        let mut out = Poly::default();
        for (m, c) in &self.terms {
            let Some(nm) = m.div(beta) else { continue };
            let mut f = c.clone();
            for &(v, b) in &beta.0 {
                let e = m.exp(v as usize);
                for t in 0..b as u32 {
                    f *= qi((e - t) as i64);
                }
            }
            out.add_term(nm, f);
        }
        out
    }

    pub fn eval(&self, x: &[Q]) -> Q {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut v = c.clone();
                for &(i, e) in &m.0 {
                    for _ in 0..e {
                        v *= &x[i as usize];
                    }
                }
                v
            })
            .sum()
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| to_f64(c) * m.0.iter().map(|&(i, e)| x[i as usize].powi(e as i32)).product::<f64>())
            .sum()
    }

    /// Replace variable `i` by `subs[i]` for every variable appearing.
    pub fn substitute(&self, subs: &[Poly]) -> Poly {
        let mut cache: Vec<Vec<Poly>> = vec![Vec::new(); subs.len()];
        let mut out = Poly::default();
        for (m, c) in &self.terms {
            let mut t = Poly::constant(c.clone());
            for &(v, e) in &m.0 {
                let v = v as usize;
                let pw = &mut cache[v];
                while pw.len() <= e as usize {
                    let next = match pw.last() {
                        None => Poly::constant(Q::one()),
                        Some(last) => last * &subs[v],
                    };
                    pw.push(next);
                }
                t = &t * &pw[e as usize];
            }
            out = out + t;
        }
        out
    }

    /// Canonical text with the given variable names: graded-lex descending,
    /// `num/den` coefficients.
    pub fn render(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| {
                let mut s = fmt_q(c);
                for &(v, e) in &m.0 {
                    let name = names.get(v as usize).cloned().unwrap_or_else(|| format!("v{v}"));
                    if e == 1 {
                        s.push_str(&format!("*{name}"));
                    } else {
                        s.push_str(&format!("*{name}^{e}"));
                    }
                }
                s
            })
            .collect();
        parts.join(" + ")
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&[]))
    }
}

impl Zero for Poly {
    fn zero() -> Self {
        Poly::default()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, o: &Poly) -> Poly {
        let mut r = self.clone();
        r.add_scaled(o, &Q::one());
        r
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, o: Poly) -> Poly {
        if self.terms.len() < o.terms.len() {
            return o + self;
        }
        for (m, c) in o.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, o: &Poly) -> Poly {
        let mut r = self.clone();
        r.add_scaled(o, &-Q::one());
        r
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, o: Poly) -> Poly {
        &self - &o
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Q::one())
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, o: &Poly) -> Poly {
        let mut out = Poly::default();
        for (a, x) in &self.terms {
            for (b, y) in &o.terms {
                out.add_term(a.mul(b), x * y);
            }
        }
        out
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, o: Poly) -> Poly {
        &self * &o
    }
}
