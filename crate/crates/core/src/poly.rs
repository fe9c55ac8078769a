//! Sparse multivariate polynomials and rational chart functions.
//!
//! Variable layout for a chart of dimension d: indices 0..d hold the
//! holomorphic coordinates z_i, indices d..2d their conjugates. A
//! `PhaseFunction` is a numerator polynomial divided by (1 + |z|^2)^m,
//! the only denominator the calculus ever produces.

use std::collections::BTreeMap;

use crate::scalar::{C64, Coeff};

/// Exponent vector with graded-lexicographic order (total degree first).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mono(pub Vec<u16>);

impl Mono {
    pub fn unit(nvars: usize) -> Self {
        Mono(vec![0; nvars])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        Mono(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn checked_div(&self, other: &Mono) -> Option<Mono> {
        let mut out = Vec::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            out.push(a.checked_sub(*b)?);
        }
        Some(Mono(out))
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct Poly<C: Coeff> {
    pub nvars: usize,
    pub terms: BTreeMap<Mono, C>,
}

impl<C: Coeff> Poly<C> {
    pub fn zero(nvars: usize) -> Self {
        Poly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        let mut p = Poly::zero(nvars);
        p.add_term(Mono::unit(nvars), c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Mono, c: C) {
        debug_assert_eq!(m.0.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.neg());
        }
        out
    }

    pub fn neg(&self) -> Self {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c.neg());
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = Poly::zero(self.nvars);
        if c.is_zero() {
            return out;
        }
        for (m, v) in &self.terms {
            let p = v.mul(c);
            if !p.is_zero() {
                out.terms.insert(m.clone(), p);
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Poly::zero(self.nvars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.mul(cb));
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Poly::constant(self.nvars, C::one());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Conjugate of the underlying chart function: swap each variable with
    /// its conjugate partner and conjugate the coefficients.
    pub fn conj_swap(&self) -> Self {
        let half = self.nvars / 2;
        debug_assert_eq!(half * 2, self.nvars);
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut e = vec![0u16; self.nvars];
            for i in 0..half {
                e[i] = m.0[half + i];
                e[half + i] = m.0[i];
            }
            out.terms.insert(Mono(e), c.conj());
        }
        out
    }

    /// Variable swap without coefficient conjugation (formal z -> conj z).
    pub fn swap_halves(&self) -> Self {
        let half = self.nvars / 2;
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let mut e = vec![0u16; self.nvars];
            for i in 0..half {
                e[i] = m.0[half + i];
                e[half + i] = m.0[i];
            }
            out.terms.insert(Mono(e), c.clone());
        }
        out
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut me = m.clone();
            me.0[var] = e - 1;
            out.add_term(me, c.mul(&C::from_rat(&crate::scalar::rat_int(e as i64))));
        }
        out
    }

    /// Re-embed into a wider variable space, placing variable i at offset+i.
    pub fn embed(&self, total_vars: usize, offset: usize) -> Self {
        let mut out = Poly::zero(total_vars);
        for (m, c) in &self.terms {
            let mut e = vec![0u16; total_vars];
            e[offset..offset + self.nvars].copy_from_slice(&m.0);
            out.terms.insert(Mono(e), c.clone());
        }
        out
    }

    pub fn map_coeff<B: Coeff>(&self, f: impl Fn(&C) -> B) -> Poly<B> {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            let b = f(c);
            if !b.is_zero() {
                out.terms.insert(m.clone(), b);
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.abs()).fold(0.0, f64::max)
    }

    pub fn eval(&self, point: &[C64]) -> C64 {
        debug_assert_eq!(point.len(), self.nvars);
        let mut acc = C64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = c.to_c64();
            for (v, &e) in point.iter().zip(&m.0) {
                t *= v.powi(e as i32);
            }
            acc += t;
        }
        acc
    }

    /// Division by a divisor whose graded-lex leading coefficient is one.
    /// Returns (quotient, remainder); no remainder term is divisible by the
    /// divisor's leading monomial, which makes the remainder canonical.
    pub fn div_rem_monic(&self, divisor: &Self) -> (Self, Self) {
        let (lt_m, lt_c) = divisor
            .terms
            .last_key_value()
            .expect("divisor must be nonzero");
        assert!(
            lt_c.sub(&C::one()).is_zero(),
            "divisor leading coefficient must be one"
        );
        let tail: Vec<(&Mono, &C)> = divisor
            .terms
            .iter()
            .filter(|(m, _)| *m != lt_m)
            .collect();
        let mut work = self.terms.clone();
        let mut quot = Poly::zero(self.nvars);
        let mut rem = Poly::zero(self.nvars);
        while let Some((m, c)) = work.pop_last() {
            if c.is_zero() {
                continue;
            }
            match m.checked_div(lt_m) {
                Some(qm) => {
                    for (tm, tc) in &tail {
                        let key = qm.mul(tm);
                        let delta = c.mul(tc).neg();
                        match work.entry(key) {
                            std::collections::btree_map::Entry::Vacant(e) => {
                                if !delta.is_zero() {
                                    e.insert(delta);
                                }
                            }
                            std::collections::btree_map::Entry::Occupied(mut e) => {
                                let s = e.get().add(&delta);
                                if s.is_zero() {
                                    e.remove();
                                } else {
                                    *e.get_mut() = s;
                                }
                            }
                        }
                    }
                    quot.add_term(qm, c);
                }
                None => rem.add_term(m, c),
            }
        }
        (quot, rem)
    }

    /// 1 + sum_i x_i * x_{d+i} over 2d variables: the chart denominator.
    pub fn one_plus_pair_sum(dim: usize) -> Self {
        let nvars = 2 * dim;
        let mut p = Poly::constant(nvars, C::one());
        for i in 0..dim {
            let mut e = vec![0u16; nvars];
            e[i] = 1;
            e[dim + i] = 1;
            p.add_term(Mono(e), C::one());
        }
        p
    }
}

/// Rational chart function numerator / (1 + |z|^2)^denom_pow.
#[derive(Clone, PartialEq, Debug)]
pub struct PhaseFunction<C: Coeff> {
    pub dim: usize,
    pub denom_pow: u32,
    pub num: Poly<C>,
}

impl<C: Coeff> PhaseFunction<C> {
    pub fn zero(dim: usize) -> Self {
        PhaseFunction {
            dim,
            denom_pow: 0,
            num: Poly::zero(2 * dim),
        }
    }

    pub fn constant(dim: usize, c: C) -> Self {
        PhaseFunction {
            dim,
            denom_pow: 0,
            num: Poly::constant(2 * dim, c),
        }
    }

    /// c * z^hol * conj(z)^anti / (1+|z|^2)^denom.
    pub fn from_term(dim: usize, hol: &[u16], anti: &[u16], c: C, denom: u32) -> Self {
        let mut e = vec![0u16; 2 * dim];
        e[..dim].copy_from_slice(hol);
        e[dim..].copy_from_slice(anti);
        let mut num = Poly::zero(2 * dim);
        num.add_term(Mono(e), c);
        PhaseFunction {
            dim,
            denom_pow: denom,
            num,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Rewrite with a larger denominator power (numerator multiplied out).
    pub fn raised_to_denom(&self, m: u32) -> Self {
        assert!(m >= self.denom_pow);
        if m == self.denom_pow {
            return self.clone();
        }
        let shell = Poly::<C>::one_plus_pair_sum(self.dim).pow(m - self.denom_pow);
        PhaseFunction {
            dim: self.dim,
            denom_pow: m,
            num: self.num.mul(&shell),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let m = self.denom_pow.max(other.denom_pow);
        let a = self.raised_to_denom(m);
        let b = other.raised_to_denom(m);
        PhaseFunction {
            dim: self.dim,
            denom_pow: m,
            num: a.num.add(&b.num),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        PhaseFunction {
            dim: self.dim,
            denom_pow: self.denom_pow,
            num: self.num.neg(),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        PhaseFunction {
            dim: self.dim,
            denom_pow: self.denom_pow,
            num: self.num.scale(c),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        PhaseFunction {
            dim: self.dim,
            denom_pow: self.denom_pow + other.denom_pow,
            num: self.num.mul(&other.num),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        PhaseFunction {
            dim: self.dim,
            denom_pow: self.denom_pow * k,
            num: self.num.pow(k),
        }
    }

    pub fn mul_poly(&self, p: &Poly<C>) -> Self {
        PhaseFunction {
            dim: self.dim,
            denom_pow: self.denom_pow,
            num: self.num.mul(p),
        }
    }

    pub fn conj(&self) -> Self {
        PhaseFunction {
            dim: self.dim,
            denom_pow: self.denom_pow,
            num: self.num.conj_swap(),
        }
    }

    /// Reduce the denominator power as far as division by 1+|z|^2 allows:
    /// exactly for rational coefficients, up to the coefficient ring's
    /// relative remainder tolerance for floating ones.
    pub fn canonicalize(&mut self) {
        if self.num.is_zero() {
            self.denom_pow = 0;
            return;
        }
        let shell = Poly::<C>::one_plus_pair_sum(self.dim);
        while self.denom_pow > 0 && !self.num.is_zero() {
            let (q, r) = self.num.div_rem_monic(&shell);
            let acceptable = match C::division_tol() {
                None => r.is_zero(),
                Some(tol) => r.max_abs() <= tol * self.num.max_abs().max(f64::MIN_POSITIVE),
            };
            if !acceptable {
                break;
            }
            self.num = q;
            self.denom_pow -= 1;
        }
        if self.num.is_zero() {
            self.denom_pow = 0;
        }
    }

    /// d/dz_i, with the quotient rule absorbed into denom_pow + 1.
    pub fn d_z(&self, i: usize) -> Self {
        self.derivative_impl(i, false)
    }

    /// d/d conj(z_i).
    pub fn d_zbar(&self, i: usize) -> Self {
        self.derivative_impl(i, true)
    }

    fn derivative_impl(&self, i: usize, conjugated: bool) -> Self {
        let var = if conjugated { self.dim + i } else { i };
        let partner = if conjugated { i } else { self.dim + i };
        let shell = Poly::<C>::one_plus_pair_sum(self.dim);
        let dnum = self.num.derivative(var).mul(&shell);
        let mut partner_mono = vec![0u16; 2 * self.dim];
        partner_mono[partner] = 1;
        let mut correction = Poly::zero(2 * self.dim);
        correction.add_term(
            Mono(partner_mono),
            C::from_rat(&crate::scalar::rat_int(self.denom_pow as i64)),
        );
        PhaseFunction {
            dim: self.dim,
            denom_pow: self.denom_pow + 1,
            num: dnum.sub(&self.num.mul(&correction)),
        }
    }

    /// Holomorphic-minus-antiholomorphic exponent difference, when it is the
    /// same for every term.
    pub fn charge(&self) -> Option<Vec<i32>> {
        let mut charge: Option<Vec<i32>> = None;
        for m in self.num.terms.keys() {
            let c: Vec<i32> = (0..self.dim)
                .map(|i| m.0[i] as i32 - m.0[self.dim + i] as i32)
                .collect();
            match &charge {
                None => charge = Some(c),
                Some(prev) if *prev == c => {}
                Some(_) => return None,
            }
        }
        charge
    }

    pub fn eval(&self, z: &[C64]) -> C64 {
        debug_assert_eq!(z.len(), self.dim);
        let mut point = Vec::with_capacity(2 * self.dim);
        point.extend_from_slice(z);
        point.extend(z.iter().map(|v| v.conj()));
        let num = self.num.eval(&point);
        let s: f64 = z.iter().map(|v| v.norm_sqr()).sum();
        num / (1.0 + s).powi(self.denom_pow as i32)
    }

    pub fn map_coeff<B: Coeff>(&self, f: impl Fn(&C) -> B) -> PhaseFunction<B> {
        PhaseFunction {
            dim: self.dim,
            denom_pow: self.denom_pow,
            num: self.num.map_coeff(f),
        }
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.num.max_abs()
    }
}

impl PhaseFunction<crate::scalar::CRat> {
    pub fn eval_exact(&self, z: &[crate::scalar::CRat]) -> crate::scalar::CRat {
        use crate::scalar::{CRat, Rat};
        use num_traits::{One, Zero};
        debug_assert_eq!(z.len(), self.dim);
        let mut point: Vec<CRat> = z.to_vec();
        point.extend(z.iter().map(|v| Coeff::conj(v)));
        let mut acc = CRat::new(Rat::zero(), Rat::zero());
        for (m, c) in &self.num.terms {
            let mut t = c.clone();
            for (v, &e) in point.iter().zip(&m.0) {
                for _ in 0..e {
                    t = &t * v;
                }
            }
            acc = &acc + &t;
        }
        let mut s = Rat::one();
        for v in z {
            s += v.norm_sqr();
        }
        let mut den = Rat::one();
        for _ in 0..self.denom_pow {
            den *= &s;
        }
        CRat::new(&acc.re / &den, &acc.im / &den)
    }
}
