//! Chart geometry: points, overlaps, the invariant measure, the
//! Laplace operator, and the chart Poisson bracket.

use std::collections::BTreeMap;
use std::sync::Mutex;

use num_traits::{One, Zero};

use crate::combinatorics::factorial;
use crate::poly::{Mono, PhaseFunction, Poly};
use crate::scalar::{C64, CRat, Coeff, Rat};
use crate::{Error, Result};

/// Affine chart point z in C^{D-1}.
#[derive(Clone, PartialEq, Debug)]
pub struct PhasePoint(pub Vec<C64>);

impl PhasePoint {
    pub fn origin(chart_dim: usize) -> Self {
        PhasePoint(vec![C64::new(0.0, 0.0); chart_dim])
    }

    pub fn chart_dim(&self) -> usize {
        self.0.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Exact chart point with rational real and imaginary parts.
#[derive(Clone, PartialEq, Debug)]
pub struct RatPoint(pub Vec<CRat>);

impl RatPoint {
    pub fn to_float(&self) -> PhasePoint {
        PhasePoint(self.0.iter().map(crate::scalar::crat_to_c64).collect())
    }

    pub fn norm_sqr(&self) -> Rat {
        let mut s = Rat::zero();
        for z in &self.0 {
            s += z.norm_sqr();
        }
        s
    }
}

/// Squared-modulus overlap of the unit rays through z and w:
/// |1 + <z, w>|^2 / ((1+|z|^2)(1+|w|^2)), a number in [0, 1].
pub fn overlap_q(z: &PhasePoint, w: &PhasePoint) -> f64 {
    assert_eq!(z.chart_dim(), w.chart_dim());
    let mut inner = C64::new(1.0, 0.0);
    for (a, b) in z.0.iter().zip(&w.0) {
        inner += a.conj() * b;
    }
    inner.norm_sqr() / ((1.0 + z.norm_sqr()) * (1.0 + w.norm_sqr()))
}

pub fn overlap_q_exact(z: &RatPoint, w: &RatPoint) -> Rat {
    let mut inner = CRat::new(Rat::one(), Rat::zero());
    for (a, b) in z.0.iter().zip(&w.0) {
        inner = &inner + &(Coeff::conj(a) * b.clone());
    }
    inner.norm_sqr() / ((Rat::one() + z.norm_sqr()) * (Rat::one() + w.norm_sqr()))
}

/// The overlap Q(., w) with the second slot pinned at an exact point,
/// as a chart function of the free slot.
pub fn overlap_function(w: &RatPoint) -> PhaseFunction<CRat> {
    let dim = w.0.len();
    let mut left = Poly::<CRat>::constant(2 * dim, Coeff::one());
    let mut right = Poly::<CRat>::constant(2 * dim, Coeff::one());
    for (i, wi) in w.0.iter().enumerate() {
        let mut eb = vec![0u16; 2 * dim];
        eb[dim + i] = 1;
        left.add_term(Mono(eb), wi.clone());
        let mut eh = vec![0u16; 2 * dim];
        eh[i] = 1;
        right.add_term(Mono(eh), Coeff::conj(wi));
    }
    let scale = CRat::new((Rat::one() + w.norm_sqr()).recip(), Rat::zero());
    PhaseFunction {
        dim,
        denom_pow: 1,
        num: left.mul(&right).scale(&scale),
    }
}

/// Moment of the normalized invariant measure on the chart:
/// integral of prod_i |z_i|^{2 k_i} / (1+|z|^2)^m equals
/// (D-1)! (prod_i k_i!) (m - K)! / (m + D - 1)!  with K = sum k_i.
/// Requires m >= K; the integral diverges otherwise.
pub fn haar_moment(k: &[u32], m: u32) -> Result<Rat> {
    let d = k.len() + 1;
    let ktot: u32 = k.iter().sum();
    if m < ktot {
        return Err(Error::DivergentIntegral(format!(
            "moment degree {ktot} exceeds denominator power {m}"
        )));
    }
    let mut num = factorial(d as u64 - 1);
    for &ki in k {
        num *= factorial(ki as u64);
    }
    num *= factorial((m - ktot) as u64);
    let den = factorial(m as u64 + d as u64 - 1);
    Ok(Rat::new(num, den))
}

/// Invariant-measure integral of a monomial z^hol conj(z)^anti / (1+|z|^2)^m.
/// Vanishes unless hol = anti, but phase cancellation only applies while the
/// integral converges absolutely: |hol| + |anti| <= 2m + 1.
pub fn haar_monomial(hol: &[u16], anti: &[u16], m: u32) -> Result<Rat> {
    let dh: u32 = hol.iter().map(|&e| e as u32).sum();
    let da: u32 = anti.iter().map(|&e| e as u32).sum();
    if hol == anti {
        let k: Vec<u32> = hol.iter().map(|&e| e as u32).collect();
        return haar_moment(&k, m);
    }
    if dh + da > 2 * m + 1 {
        return Err(Error::DivergentIntegral(format!(
            "unmatched monomial of total degree {} against denominator power {m}",
            dh + da
        )));
    }
    Ok(Rat::zero())
}

/// Exact invariant-measure integral of a chart function.
pub fn haar_integrate(f: &PhaseFunction<CRat>) -> Result<CRat> {
    let dim = f.dim;
    let mut acc = CRat::new(Rat::zero(), Rat::zero());
    for (mono, c) in &f.num.terms {
        let w = haar_monomial(&mono.0[..dim], &mono.0[dim..], f.denom_pow)?;
        if !w.is_zero() {
            acc = &acc + &(c.clone() * CRat::new(w, Rat::zero()));
        }
    }
    Ok(acc)
}

/// Floating `haar_monomial` with a process-wide memo of matched moments.
pub fn haar_monomial_f64(hol: &[u16], anti: &[u16], m: u32) -> Result<f64> {
    if hol != anti {
        return haar_monomial(hol, anti, m).map(|_| 0.0);
    }
    static CACHE: Mutex<BTreeMap<(Vec<u16>, u32), f64>> = Mutex::new(BTreeMap::new());
    let mut key: Vec<u16> = hol.to_vec();
    key.sort_unstable();
    let mut cache = CACHE.lock().unwrap();
    if let Some(&v) = cache.get(&(key.clone(), m)) {
        return Ok(v);
    }
    let v = crate::scalar::rat_to_f64(&haar_monomial(hol, anti, m)?);
    cache.insert((key, m), v);
    Ok(v)
}

/// Floating variant of `haar_integrate`.
pub fn haar_integrate_f64(f: &PhaseFunction<C64>) -> Result<C64> {
    let dim = f.dim;
    let mut acc = C64::new(0.0, 0.0);
    for (mono, c) in &f.num.terms {
        let w = haar_monomial_f64(&mono.0[..dim], &mono.0[dim..], f.denom_pow)?;
        if w != 0.0 {
            acc += c * w;
        }
    }
    Ok(acc)
}

/// Laplace operator of the chart metric:
/// L f = (1+|z|^2) sum_{ij} (delta_ij + z_i conj(z_j)) d^2 f / dz_i d conj(z_j).
/// Level-n eigenfunctions satisfy L f = -n (n + D - 1) f.
pub fn laplacian<C: Coeff>(f: &PhaseFunction<C>) -> PhaseFunction<C> {
    let dim = f.dim;
    let shell = Poly::<C>::one_plus_pair_sum(dim);
    let mut acc = PhaseFunction::zero(dim);
    for j in 0..dim {
        let fj = f.d_zbar(j);
        for i in 0..dim {
            let fij = fj.d_z(i);
            let mut factor = Poly::zero(2 * dim);
            if i == j {
                factor.add_term(Mono::unit(2 * dim), C::one());
            }
            let mut e = vec![0u16; 2 * dim];
            e[i] += 1;
            e[dim + j] += 1;
            factor.add_term(Mono(e), C::one());
            acc = acc.add(&fij.mul_poly(&factor));
        }
    }
    let mut out = acc.mul_poly(&shell);
    out.canonicalize();
    out
}

/// Chart Poisson bracket
/// {f, g} = i (1+|z|^2) sum_{ij} (delta_ij + conj(z_i) z_j)
///          (df/d conj(z_i) dg/dz_j - dg/d conj(z_i) df/dz_j).
/// Normalized so that N times the bracket of leading symbols matches the
/// large-N commutator scaling of collective observables.
pub fn poisson_bracket<C: Coeff>(f: &PhaseFunction<C>, g: &PhaseFunction<C>) -> PhaseFunction<C> {
    assert_eq!(f.dim, g.dim);
    let dim = f.dim;
    let fz: Vec<_> = (0..dim).map(|j| f.d_z(j)).collect();
    let fzb: Vec<_> = (0..dim).map(|i| f.d_zbar(i)).collect();
    let gz: Vec<_> = (0..dim).map(|j| g.d_z(j)).collect();
    let gzb: Vec<_> = (0..dim).map(|i| g.d_zbar(i)).collect();
    let mut acc = PhaseFunction::zero(dim);
    for i in 0..dim {
        for j in 0..dim {
            let mut term = fzb[i].mul(&gz[j]).sub(&gzb[i].mul(&fz[j]));
            let mut factor = Poly::zero(2 * dim);
            if i == j {
                factor.add_term(Mono::unit(2 * dim), C::one());
            }
            let mut e = vec![0u16; 2 * dim];
            e[j] += 1;
            e[dim + i] += 1;
            factor.add_term(Mono(e), C::one());
            term = term.mul_poly(&factor);
            acc = acc.add(&term);
        }
    }
    let shell = Poly::<C>::one_plus_pair_sum(dim);
    let mut out = acc.mul_poly(&shell).scale(&C::imag_one());
    out.canonicalize();
    out
}
