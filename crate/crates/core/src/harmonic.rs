//! Level kernels in the overlap variable, projection of chart functions
//! onto Laplace eigenspaces, and exact orthonormal eigenbases.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{factorial, level_dim, ModelParams};
use crate::geometry::{haar_integrate, haar_moment, overlap_q, PhasePoint};
use crate::poly::{Mono, PhaseFunction, Poly};
use crate::scalar::{crat_real, crat_to_c64, rat_to_f64, C64, CRat, Coeff, Rat};
use crate::{Error, Result};

/// Reproducing kernel of one Laplace eigenspace, as a polynomial with
/// exact rational coefficients in the overlap q between the two slots.
/// Normalized so that the value at q = 1 is the eigenspace dimension.
#[derive(Clone, PartialEq, Debug)]
pub struct LambdaKernel {
    pub d_levels: usize,
    pub level: u32,
    coeffs: Vec<Rat>,
}

impl LambdaKernel {
    pub fn new(d_levels: usize, level: u32) -> Self {
        assert!(d_levels >= 2, "kernel needs at least two levels");
        let n = level as i64;
        let d = d_levels as i64;
        // Terminating hypergeometric series in q; the ratio of successive
        // coefficients is (k-n)(n+d-1+k)/(k+1)^2.
        let mut series = vec![Rat::one()];
        for k in 0..n {
            let next = series[k as usize].clone()
                * Rat::new(BigInt::from((k - n) * (n + d - 1 + k)), BigInt::from((k + 1) * (k + 1)));
            series.push(next);
        }
        // Its value at q = 1 is (-1)^n binom(n+d-2, n); rescale to tilde_d.
        let at_one: Rat = series.iter().cloned().sum();
        let tilde_d = Rat::from_integer(BigInt::from(level_dim(d_levels, level)));
        let scale = tilde_d / at_one;
        let coeffs = series.into_iter().map(|c| c * scale.clone()).collect();
        LambdaKernel { d_levels, level, coeffs }
    }

    /// Coefficients of q^0 .. q^level.
    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn eval_rat(&self, q: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * q.clone() + c.clone();
        }
        acc
    }

    pub fn eval_f64(&self, q: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * q + rat_to_f64(c);
        }
        acc
    }
}

/// Kernel of the model's top level evaluated at a given overlap.
pub fn kernel_value(params: &ModelParams, q: f64) -> f64 {
    LambdaKernel::new(params.d_levels, params.n_particles).eval_f64(q)
}

/// All multi-indices over `dim` slots with total degree exactly `total`.
fn indices_exact(dim: usize, total: u32) -> Vec<Vec<u16>> {
    if dim == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in indices_exact(dim - 1, total - first) {
            rest.insert(0, first as u16);
            out.push(rest);
        }
    }
    out
}

/// All multi-indices with total degree at most `total`, grouped by degree.
fn indices_up_to(dim: usize, total: u32) -> Vec<Vec<u16>> {
    (0..=total).flat_map(|t| indices_exact(dim, t)).collect()
}

fn falling(j: u32, a: u32) -> BigInt {
    if a > j {
        return BigInt::zero();
    }
    factorial(j as u64) / factorial((j - a) as u64)
}

fn degree(idx: &[u16]) -> u32 {
    idx.iter().map(|&e| e as u32).sum()
}

/// Multinomial expansion coefficient of the paired term in (1 + <z, w>)^j:
/// j! / ((j - |mu|)! prod mu_i!).
fn pair_power_coeff(j: u32, mu: &[u16]) -> Rat {
    let mut num = falling(j, degree(mu));
    if num.is_zero() {
        return Rat::zero();
    }
    let mut den = BigInt::one();
    for &e in mu {
        den *= factorial(e as u64);
    }
    num = num / den;
    Rat::from_integer(num)
}

/// Orthogonal projection onto the level-n Laplace eigenspace:
/// integrates the kernel at `level` against f in the second slot.
/// The projection preserves each term's charge; the output denominator
/// power is the level (before canonical reduction).
pub fn kernel_project<C: Coeff>(level: u32, f: &PhaseFunction<C>) -> Result<PhaseFunction<C>> {
    let dim = f.dim;
    let kern = LambdaKernel::new(dim + 1, level);
    let m = f.denom_pow;
    let shell = Poly::<C>::one_plus_pair_sum(dim);
    let mut shell_pows = vec![Poly::constant(2 * dim, C::one())];
    for _ in 0..level {
        shell_pows.push(shell_pows.last().unwrap().mul(&shell));
    }
    let mut acc = Poly::zero(2 * dim);
    for (mono, coeff) in &f.num.terms {
        let beta = &mono.0[..dim];
        let gamma = &mono.0[dim..];
        for (j, bj) in kern.coeffs().iter().enumerate() {
            let j = j as u32;
            if bj.is_zero() {
                continue;
            }
            for mu in indices_up_to(dim, j) {
                // The second-slot integral forces nu = mu + beta - gamma.
                let mut nu = Vec::with_capacity(dim);
                let mut ok = true;
                for i in 0..dim {
                    let v = mu[i] as i32 + beta[i] as i32 - gamma[i] as i32;
                    if v < 0 {
                        ok = false;
                        break;
                    }
                    nu.push(v as u16);
                }
                if !ok || degree(&nu) > j {
                    continue;
                }
                let a_mu = pair_power_coeff(j, &mu);
                let a_nu = pair_power_coeff(j, &nu);
                if a_mu.is_zero() || a_nu.is_zero() {
                    continue;
                }
                let matched: Vec<u32> = (0..dim).map(|i| (beta[i] + mu[i]) as u32).collect();
                let moment = haar_moment(&matched, j + m)?;
                if moment.is_zero() {
                    continue;
                }
                let scalar = C::from_rat(&(bj.clone() * a_mu * a_nu * moment));
                let weight = C::mul(coeff, &scalar);
                let mut e = vec![0u16; 2 * dim];
                e[..dim].copy_from_slice(&nu);
                e[dim..].copy_from_slice(&mu);
                let out_mono = Mono(e);
                for (sm, sc) in &shell_pows[(level - j) as usize].terms {
                    acc.add_term(sm.mul(&out_mono), C::mul(sc, &weight));
                }
            }
        }
    }
    let mut out = PhaseFunction { dim, denom_pow: level, num: acc };
    out.canonicalize();
    Ok(out)
}

/// Prebasis labels (k, l) at a level: all pairs of multi-indices where at
/// least one side has full degree. Ordered by (deg k, k, deg l, l).
pub fn prebasis_indices(dim: usize, level: u32) -> Vec<(Vec<u16>, Vec<u16>)> {
    let mut out = Vec::new();
    for k in indices_up_to(dim, level) {
        for l in indices_up_to(dim, level) {
            if degree(&k) == level || degree(&l) == level {
                out.push((k.clone(), l));
            }
        }
    }
    out.sort_by_key(|(k, l)| (degree(k), k.clone(), degree(l), l.clone()));
    out
}

/// Componentwise ranges 0..=mins[i].
fn boxed_indices(mins: &[u16]) -> Vec<Vec<u16>> {
    let mut out = vec![vec![]];
    for &m in mins {
        let mut next = Vec::new();
        for base in &out {
            for v in 0..=m {
                let mut b = base.clone();
                b.push(v);
                next.push(b);
            }
        }
        out = next;
    }
    out
}

fn multi_binomial(k: &[u16], s: &[u16]) -> BigInt {
    let mut acc = BigInt::one();
    for (&ki, &si) in k.iter().zip(s) {
        acc *= crate::combinatorics::binomial(ki as u64, si as u64);
    }
    acc
}

/// Mixed derivative of the level kernel in the pinned slot at the origin,
/// labeled by the multi-index pair (k, l). Exact rational coefficients;
/// pure charge l - k; an exact eigenfunction of the chart Laplacian.
pub fn prebasis_function(dim: usize, level: u32, k: &[u16], l: &[u16]) -> PhaseFunction<CRat> {
    let kern = LambdaKernel::new(dim + 1, level);
    let shell = Poly::<CRat>::one_plus_pair_sum(dim);
    let mut shell_pows = vec![Poly::constant(2 * dim, Coeff::one())];
    for _ in 0..level {
        shell_pows.push(shell_pows.last().unwrap().mul(&shell));
    }
    let mins: Vec<u16> = k.iter().zip(l).map(|(&a, &b)| a.min(b)).collect();
    let mut acc = Poly::zero(2 * dim);
    for (j, cj) in kern.coeffs().iter().enumerate() {
        let j = j as u32;
        if cj.is_zero() {
            continue;
        }
        for sigma in boxed_indices(&mins) {
            let kk: Vec<u16> = k.iter().zip(&sigma).map(|(&a, &s)| a - s).collect();
            let ll: Vec<u16> = l.iter().zip(&sigma).map(|(&a, &s)| a - s).collect();
            let fk = falling(j, degree(&kk));
            let fl = falling(j, degree(&ll));
            if fk.is_zero() || fl.is_zero() {
                continue;
            }
            let s_tot = degree(&sigma);
            let shell_mix = if s_tot == 0 {
                BigInt::one()
            } else if j == 0 {
                BigInt::zero()
            } else {
                let sign = if s_tot % 2 == 0 { BigInt::one() } else { -BigInt::one() };
                let mut v = crate::combinatorics::binomial((j + s_tot - 1) as u64, s_tot as u64)
                    * factorial(s_tot as u64)
                    * sign;
                for &e in &sigma {
                    v *= factorial(e as u64);
                }
                v
            };
            if shell_mix.is_zero() {
                continue;
            }
            let scalar = cj.clone()
                * Rat::from_integer(
                    multi_binomial(k, &sigma) * multi_binomial(l, &sigma) * fk * fl * shell_mix,
                );
            let mut e = vec![0u16; 2 * dim];
            e[..dim].copy_from_slice(&ll);
            e[dim..].copy_from_slice(&kk);
            let out_mono = Mono(e);
            for (sm, sc) in &shell_pows[(level - j as u32) as usize].terms {
                acc.add_term(sm.mul(&out_mono), sc.clone() * crat_real(scalar.clone()));
            }
        }
    }
    let mut out = PhaseFunction { dim, denom_pow: level, num: acc };
    out.canonicalize();
    out
}

/// One orthogonalized eigenfunction: exact coefficients plus its exact
/// squared norm under the normalized invariant measure.
#[derive(Clone, PartialEq, Debug)]
pub struct HarmonicFunction {
    pub label: (Vec<u16>, Vec<u16>),
    pub phi: PhaseFunction<CRat>,
    pub norm2: Rat,
}

impl HarmonicFunction {
    /// Unit-norm floating form.
    pub fn psi_f64(&self) -> PhaseFunction<C64> {
        let s = 1.0 / rat_to_f64(&self.norm2).sqrt();
        self.phi.map_coeff(crat_to_c64).scale(&C64::new(s, 0.0))
    }

    pub fn eval_psi(&self, z: &PhasePoint) -> C64 {
        self.phi.eval(&z.0) / rat_to_f64(&self.norm2).sqrt()
    }
}

/// Orthogonal eigenbasis of one Laplace level, built once per (D, n).
#[derive(Clone, PartialEq, Debug)]
pub struct HarmonicBasis {
    pub d_levels: usize,
    pub level: u32,
    pub functions: Vec<HarmonicFunction>,
}

pub fn build_harmonic_basis(d_levels: usize, level: u32) -> Result<HarmonicBasis> {
    if d_levels < 2 {
        return Err(Error::InvalidParams(format!("d_levels = {d_levels}, need >= 2")));
    }
    let dim = d_levels - 1;
    let labels = prebasis_indices(dim, level);
    let raw: Vec<PhaseFunction<CRat>> = labels
        .iter()
        .map(|(k, l)| prebasis_function(dim, level, k, l))
        .collect();

    // Group by charge; the measure kills every cross-charge pairing, so
    // blockwise elimination equals global elimination in the stored order.
    let mut blocks: BTreeMap<Vec<i32>, Vec<usize>> = BTreeMap::new();
    for (t, (k, l)) in labels.iter().enumerate() {
        let charge: Vec<i32> = l.iter().zip(k).map(|(&a, &b)| a as i32 - b as i32).collect();
        blocks.entry(charge).or_default().push(t);
    }

    let mut out: Vec<Option<HarmonicFunction>> = vec![None; labels.len()];
    for members in blocks.values() {
        let size = members.len();
        let mut gram = vec![vec![Rat::zero(); size]; size];
        for p in 0..size {
            for q in p..size {
                let prod = raw[members[p]].conj().mul(&raw[members[q]]);
                let g = haar_integrate(&prod)?;
                if !g.im.is_zero() {
                    return Err(Error::InvalidParams(format!(
                        "gram entry ({p},{q}) at level {level} has nonzero imaginary part"
                    )));
                }
                gram[p][q] = g.re.clone();
                gram[q][p] = g.re;
            }
        }
        // Exact triangular elimination over the prebasis coordinates.
        let mut coeffs: Vec<Vec<Rat>> = Vec::with_capacity(size);
        let mut norms: Vec<Rat> = Vec::with_capacity(size);
        for jj in 0..size {
            let mut c = vec![Rat::zero(); size];
            c[jj] = Rat::one();
            for ii in 0..jj {
                // <phi_ii, psi~_jj> over the exact gram entries.
                let mut inner = Rat::zero();
                for t in 0..size {
                    if !coeffs[ii][t].is_zero() {
                        inner += coeffs[ii][t].clone() * gram[t][jj].clone();
                    }
                }
                if inner.is_zero() {
                    continue;
                }
                let r = inner / norms[ii].clone();
                for t in 0..size {
                    let delta = r.clone() * coeffs[ii][t].clone();
                    c[t] -= delta;
                }
            }
            let mut norm2 = Rat::zero();
            for t in 0..size {
                if !c[t].is_zero() {
                    norm2 += c[t].clone() * gram[t][jj].clone();
                }
            }
            if norm2 <= Rat::zero() {
                return Err(Error::GramSingular { level, index: members[jj] });
            }
            coeffs.push(c);
            norms.push(norm2);
        }
        for jj in 0..size {
            let mut phi = PhaseFunction::zero(dim);
            for t in 0..size {
                if !coeffs[jj][t].is_zero() {
                    phi = phi.add(&raw[members[t]].scale(&crat_real(coeffs[jj][t].clone())));
                }
            }
            phi.canonicalize();
            out[members[jj]] = Some(HarmonicFunction {
                label: labels[members[jj]].clone(),
                phi,
                norm2: norms[jj].clone(),
            });
        }
    }

    let functions: Vec<HarmonicFunction> = out.into_iter().map(|f| f.unwrap()).collect();
    let expected = level_dim(d_levels, level);
    if functions.len() as u64 != expected {
        return Err(Error::DimensionMismatch(format!(
            "level {level} built {} functions, expected {expected}",
            functions.len()
        )));
    }
    Ok(HarmonicBasis { d_levels, level, functions })
}

static BASIS_CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<HarmonicBasis>>>> = OnceLock::new();

fn basis_cache() -> &'static Mutex<HashMap<(usize, u32), Arc<HarmonicBasis>>> {
    BASIS_CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Memoized access; bases are immutable and shared.
pub fn harmonic_basis(d_levels: usize, level: u32) -> Result<Arc<HarmonicBasis>> {
    if let Some(b) = basis_cache().lock().unwrap().get(&(d_levels, level)) {
        return Ok(b.clone());
    }
    let built = Arc::new(build_harmonic_basis(d_levels, level)?);
    basis_cache().lock().unwrap().insert((d_levels, level), built.clone());
    Ok(built)
}

/// Install a deserialized basis so later lookups skip the exact rebuild.
/// An already-shared basis wins; the returned Arc is the live entry.
pub fn seed_harmonic_basis(basis: HarmonicBasis) -> Arc<HarmonicBasis> {
    let key = (basis.d_levels, basis.level);
    basis_cache()
        .lock()
        .unwrap()
        .entry(key)
        .or_insert_with(|| Arc::new(basis))
        .clone()
}

impl HarmonicBasis {
    /// Pointwise defect of the completeness identity at two chart points:
    /// |sum_j conj(psi_j(z)) psi_j(w) - K_level(Q(z, w))|.
    pub fn reproducing_check(&self, z: &PhasePoint, w: &PhasePoint) -> f64 {
        let mut acc = C64::new(0.0, 0.0);
        for f in &self.functions {
            let fz = f.psi_f64().eval(&z.0);
            let fw = f.psi_f64().eval(&w.0);
            acc += fz.conj() * fw;
        }
        let kern = LambdaKernel::new(self.d_levels, self.level);
        (acc - kern.eval_f64(overlap_q(z, w))).norm()
    }
}

#[derive(Serialize, Deserialize)]
struct TermDto {
    expo: Vec<u16>,
    re: String,
    im: String,
}

#[derive(Serialize, Deserialize)]
struct FunctionDto {
    label_k: Vec<u16>,
    label_l: Vec<u16>,
    #[serde(rename = "denomPow")]
    denom_pow: u32,
    terms: Vec<TermDto>,
    norm2: String,
}

#[derive(Serialize, Deserialize)]
struct BasisDto {
    #[serde(rename = "D")]
    d: usize,
    n: u32,
    tilde_d_n: u64,
    #[serde(rename = "orderingVersion")]
    ordering_version: u32,
    #[serde(rename = "precisionBits")]
    precision_bits: u32,
    functions: Vec<FunctionDto>,
}

const ORDERING_VERSION: u32 = 1;

impl HarmonicBasis {
    pub fn to_json(&self) -> String {
        let dto = BasisDto {
            d: self.d_levels,
            n: self.level,
            tilde_d_n: level_dim(self.d_levels, self.level),
            ordering_version: ORDERING_VERSION,
            // Coefficients are exact rationals, not truncated floats.
            precision_bits: 0,
            functions: self
                .functions
                .iter()
                .map(|f| FunctionDto {
                    label_k: f.label.0.clone(),
                    label_l: f.label.1.clone(),
                    denom_pow: f.phi.denom_pow,
                    terms: f
                        .phi
                        .num
                        .terms
                        .iter()
                        .map(|(m, c)| TermDto {
                            expo: m.0.clone(),
                            re: c.re.to_string(),
                            im: c.im.to_string(),
                        })
                        .collect(),
                    norm2: f.norm2.to_string(),
                })
                .collect(),
        };
        serde_json::to_string(&dto).expect("serialization is total")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let dto: BasisDto =
            serde_json::from_str(text).map_err(|e| Error::InvalidParams(e.to_string()))?;
        if dto.ordering_version != ORDERING_VERSION || dto.precision_bits != 0 {
            return Err(Error::InvalidParams(format!(
                "unsupported cache layout: ordering {} precision {}",
                dto.ordering_version, dto.precision_bits
            )));
        }
        let dim = dto.d - 1;
        let parse = |s: &str| -> Result<Rat> {
            s.parse::<Rat>()
                .map_err(|e| Error::InvalidParams(format!("bad rational '{s}': {e}")))
        };
        let mut functions = Vec::with_capacity(dto.functions.len());
        for f in dto.functions {
            let mut num = Poly::zero(2 * dim);
            for t in f.terms {
                num.add_term(Mono(t.expo), CRat::new(parse(&t.re)?, parse(&t.im)?));
            }
            functions.push(HarmonicFunction {
                label: (f.label_k, f.label_l),
                phi: PhaseFunction { dim, denom_pow: f.denom_pow, num },
                norm2: parse(&f.norm2)?,
            });
        }
        if functions.len() as u64 != level_dim(dto.d, dto.n) {
            return Err(Error::DimensionMismatch("cached basis has wrong count".into()));
        }
        Ok(HarmonicBasis { d_levels: dto.d, level: dto.n, functions })
    }
}
