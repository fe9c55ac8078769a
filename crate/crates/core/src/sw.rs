//! Operator-valued phase-space kernels and the calculus they generate:
//! multipole operator bases, the s-family of kernels, quasi-probability
//! transforms, density reconstruction, heat transport between family
//! members, and star/bracket products.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::combinatorics::{multinomial_rat, tau_weight, FockIndex, ModelParams};
use crate::geometry::{haar_integrate, haar_integrate_f64, overlap_q, PhasePoint};
use crate::harmonic::{harmonic_basis, kernel_project, LambdaKernel};
use crate::poly::{Mono, PhaseFunction, Poly};
use crate::scalar::{crat_to_c64, rat_to_f64, C64, CRat, Coeff, Rat};
use crate::states::StateVector;
use crate::{Error, Result};

/// Complex matrix over the symmetric occupancy basis, rows and columns in
/// descending lexicographic occupancy order.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    pub params: ModelParams,
    dim: usize,
    data: Vec<C64>,
}

impl OperatorMatrix {
    pub fn zeros(params: &ModelParams) -> Self {
        let dim = params.fock_dim();
        OperatorMatrix {
            params: params.clone(),
            dim,
            data: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(params: &ModelParams) -> Self {
        let mut m = Self::zeros(params);
        for a in 0..m.dim {
            m.set(a, a, C64::new(1.0, 0.0));
        }
        m
    }

    pub fn maximally_mixed(params: &ModelParams) -> Self {
        let mut m = Self::identity(params);
        let d = m.dim as f64;
        for v in &mut m.data {
            *v /= d;
        }
        m
    }

    /// Rank-one projector onto a (normalized) state.
    pub fn pure(psi: &StateVector) -> Self {
        let mut m = Self::zeros(&psi.params);
        for a in 0..m.dim {
            for b in 0..m.dim {
                m.set(a, b, psi.amplitudes[a] * psi.amplitudes[b].conj());
            }
        }
        m
    }

    pub fn fock_projector(params: &ModelParams, index: usize) -> Self {
        let mut m = Self::zeros(params);
        m.set(index, index, C64::new(1.0, 0.0));
        m
    }

    /// Bilinear generator a_i^dag a_j acting on occupancy vectors.
    pub fn generator(params: &ModelParams, i: usize, j: usize) -> Result<Self> {
        if i >= params.d_levels || j >= params.d_levels {
            return Err(Error::InvalidParams(format!(
                "generator indices ({i}, {j}) exceed the level count {}",
                params.d_levels
            )));
        }
        let occ = params.fock_indices();
        let mut positions: HashMap<Vec<u32>, usize> = HashMap::new();
        for (idx, f) in occ.iter().enumerate() {
            positions.insert(f.0.clone(), idx);
        }
        let mut m = Self::zeros(params);
        for (col, f) in occ.iter().enumerate() {
            if f.0[j] == 0 {
                continue;
            }
            if i == j {
                m.set(col, col, C64::new(f.0[i] as f64, 0.0));
                continue;
            }
            let mut target = f.0.clone();
            target[j] -= 1;
            target[i] += 1;
            let row = positions[&target];
            let value = ((f.0[j] as f64) * (f.0[i] as f64 + 1.0)).sqrt();
            m.set(row, col, C64::new(value, 0.0));
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, a: usize, b: usize) -> C64 {
        self.data[a * self.dim + b]
    }

    pub fn set(&mut self, a: usize, b: usize, v: C64) {
        self.data[a * self.dim + b] = v;
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut m = self.clone();
        for (v, w) in m.data.iter_mut().zip(&other.data) {
            *v += w;
        }
        m
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut m = self.clone();
        for (v, w) in m.data.iter_mut().zip(&other.data) {
            *v -= w;
        }
        m
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut m = self.clone();
        for v in &mut m.data {
            *v *= c;
        }
        m
    }

    pub fn matmul(&self, other: &Self) -> Self {
        let d = self.dim;
        let mut m = Self::zeros(&self.params);
        for a in 0..d {
            for k in 0..d {
                let lhs = self.get(a, k);
                if lhs.norm_sqr() == 0.0 {
                    continue;
                }
                for b in 0..d {
                    m.data[a * d + b] += lhs * other.get(k, b);
                }
            }
        }
        m
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut m = Self::zeros(&self.params);
        for a in 0..d {
            for b in 0..d {
                m.set(a, b, self.get(b, a).conj());
            }
        }
        m
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|a| self.get(a, a)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(v, w)| (v - w).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }
}

/// D=2 spin triple (J_x, J_y, J_z) built from the bilinear generators.
pub fn spin_observables(
    params: &ModelParams,
) -> Result<(OperatorMatrix, OperatorMatrix, OperatorMatrix)> {
    if params.d_levels != 2 {
        return Err(Error::InvalidParams(
            "spin triple requires a two-level system".into(),
        ));
    }
    let raise = OperatorMatrix::generator(params, 0, 1)?;
    let lower = OperatorMatrix::generator(params, 1, 0)?;
    let n0 = OperatorMatrix::generator(params, 0, 0)?;
    let n1 = OperatorMatrix::generator(params, 1, 1)?;
    let half = C64::new(0.5, 0.0);
    let jx = raise.add(&lower).scale(half);
    let jy = raise.sub(&lower).scale(C64::new(0.0, -0.5));
    let jz = n0.sub(&n1).scale(half);
    Ok((jx, jy, jz))
}

fn tau_f64(params: &ModelParams, n: u32) -> f64 {
    rat_to_f64(&tau_weight(params, n))
}

fn tau_powf(params: &ModelParams, n: u32, e: f64) -> f64 {
    tau_f64(params, n).powf(e)
}

/// Scalar tau_{N,n}^{-(s+1)/2} carried by level n in the s-family.
pub fn family_scale(params: &ModelParams, n: u32, s: f64) -> f64 {
    tau_powf(params, n, -(s + 1.0) * 0.5)
}

/// z^a conj(z)^b / (1+|z|^2)^N for a pair of occupancy labels; the entry
/// symbol of the coherent projector before multiplicity weights.
fn coherent_pair_symbol(params: &ModelParams, a: &FockIndex, b: &FockIndex) -> PhaseFunction<CRat> {
    let hol: Vec<u16> = a.reduced().iter().map(|&k| k as u16).collect();
    let anti: Vec<u16> = b.reduced().iter().map(|&k| k as u16).collect();
    PhaseFunction::from_term(
        params.chart_dim(),
        &hol,
        &anti,
        Coeff::one(),
        params.n_particles,
    )
}

/// One exact eigenspace component of a pair entry symbol, with its float
/// image. The sqrt-multiplicity weights are not folded in.
pub struct KernelBlock {
    pub exact: PhaseFunction<CRat>,
    pub float: PhaseFunction<C64>,
}

/// Level-graded kernel family for one (D, N). Entry symbols are projected
/// exactly on first use and memoized, so every real s is assembled from the
/// same blocks by scalar powers of tau and sparse operators never pay for
/// pairs they do not touch.
pub struct SWKernel {
    pub params: ModelParams,
    occ: Vec<FockIndex>,
    weights: Vec<f64>,
    taus: Vec<f64>,
    blocks: Mutex<HashMap<(usize, usize, usize), Arc<KernelBlock>>>,
}

impl SWKernel {
    fn new(params: &ModelParams) -> Self {
        let occ = params.fock_indices();
        let weights = occ
            .iter()
            .map(|f| rat_to_f64(&multinomial_rat(&f.0)).sqrt())
            .collect();
        let taus = (0..=params.n_particles).map(|n| tau_f64(params, n)).collect();
        SWKernel {
            params: params.clone(),
            occ,
            weights,
            taus,
            blocks: Mutex::new(HashMap::new()),
        }
    }

    pub fn level_count(&self) -> usize {
        self.taus.len()
    }

    pub fn tau(&self, n: usize) -> f64 {
        self.taus[n]
    }

    pub fn weight(&self, a: usize) -> f64 {
        self.weights[a]
    }

    /// Eigenspace component of the (a, b) entry symbol at level n. A pair
    /// whose charge exceeds what the level carries is zero without
    /// projection; label order (a, b) with a > b mirrors by conjugation.
    pub fn block(&self, n: usize, a: usize, b: usize) -> Arc<KernelBlock> {
        let key = (n, a, b);
        if let Some(hit) = self.blocks.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let computed = self.compute_block(n, a, b);
        self.blocks
            .lock()
            .unwrap()
            .entry(key)
            .or_insert(computed)
            .clone()
    }

    fn compute_block(&self, n: usize, a: usize, b: usize) -> Arc<KernelBlock> {
        let dim = self.params.chart_dim();
        if a > b {
            let mirror = self.block(n, b, a);
            let exact = mirror.exact.conj();
            let float = exact.map_coeff(crat_to_c64);
            return Arc::new(KernelBlock { exact, float });
        }
        let ra = self.occ[a].reduced();
        let rb = self.occ[b].reduced();
        let mut pos = 0u32;
        let mut neg = 0u32;
        for i in 0..dim {
            if ra[i] > rb[i] {
                pos += ra[i] - rb[i];
            } else {
                neg += rb[i] - ra[i];
            }
        }
        // Level n holds numerator degrees at most n on each side, so a pair
        // with more signed charge than that projects to zero.
        let exact = if pos > n as u32 || neg > n as u32 {
            PhaseFunction::zero(dim)
        } else {
            let pair = coherent_pair_symbol(&self.params, &self.occ[a], &self.occ[b]);
            kernel_project(n as u32, &pair).expect("projection of a finite pair symbol")
        };
        let float = exact.map_coeff(crat_to_c64);
        Arc::new(KernelBlock { exact, float })
    }

    /// Weighted level block sqrt(m_a m_b) C_n[a,b](z) as a matrix.
    pub fn weighted_block_at(&self, n: usize, z: &PhasePoint) -> OperatorMatrix {
        let d = self.weights.len();
        let mut m = OperatorMatrix::zeros(&self.params);
        for a in 0..d {
            for b in a..d {
                let mut v =
                    self.block(n, a, b).float.eval(&z.0) * (self.weights[a] * self.weights[b]);
                if a == b {
                    // Diagonal entry symbols are real; drop rounding residue.
                    v = C64::new(v.re, 0.0);
                }
                m.set(a, b, v);
                if a != b {
                    m.set(b, a, v.conj());
                }
            }
        }
        m
    }

    /// Kernel member at parameter s; Hermitian by mirrored assembly.
    pub fn assemble(&self, s: f64, z: &PhasePoint) -> OperatorMatrix {
        let d = self.weights.len();
        let scales: Vec<f64> = (0..self.level_count())
            .map(|n| self.taus[n].powf(-(s + 1.0) * 0.5))
            .collect();
        let mut m = OperatorMatrix::zeros(&self.params);
        for a in 0..d {
            for b in a..d {
                let mut acc = C64::new(0.0, 0.0);
                for (n, scale) in scales.iter().enumerate() {
                    acc += self.block(n, a, b).float.eval(&z.0) * scale;
                }
                acc *= self.weights[a] * self.weights[b];
                if a == b {
                    acc = C64::new(acc.re, 0.0);
                }
                m.set(a, b, acc);
                if a != b {
                    m.set(b, a, acc.conj());
                }
            }
        }
        m
    }

    /// Force projection of every upper-triangle entry block at every level.
    pub fn materialize_blocks(&self) {
        let d = self.weights.len();
        for n in 0..self.level_count() {
            for a in 0..d {
                for b in a..d {
                    self.block(n, a, b);
                }
            }
        }
    }
}

#[derive(Serialize, Deserialize)]
struct BlockTermDto {
    expo: Vec<u16>,
    re: String,
    im: String,
}

#[derive(Serialize, Deserialize)]
struct BlockDto {
    n: usize,
    a: usize,
    b: usize,
    #[serde(rename = "denomPow")]
    denom_pow: u32,
    terms: Vec<BlockTermDto>,
}

#[derive(Serialize, Deserialize)]
struct KernelDto {
    #[serde(rename = "D")]
    d: usize,
    #[serde(rename = "N")]
    n: u32,
    #[serde(rename = "orderingVersion")]
    ordering_version: u32,
    blocks: Vec<BlockDto>,
}

const KERNEL_ORDERING_VERSION: u32 = 1;

impl SWKernel {
    /// Serialize the nonzero upper-triangle blocks with exact rational
    /// coefficients. Mirror and zero blocks are cheap to rebuild, so they
    /// are not stored. Output bytes are stable for a given (D, N).
    pub fn to_json(&self) -> String {
        self.materialize_blocks();
        let map = self.blocks.lock().unwrap();
        let mut keys: Vec<(usize, usize, usize)> = map
            .iter()
            .filter(|(&(_, a, b), block)| a <= b && !block.exact.is_zero())
            .map(|(&k, _)| k)
            .collect();
        keys.sort();
        let blocks = keys
            .into_iter()
            .map(|(n, a, b)| {
                let block = &map[&(n, a, b)];
                BlockDto {
                    n,
                    a,
                    b,
                    denom_pow: block.exact.denom_pow,
                    terms: block
                        .exact
                        .num
                        .terms
                        .iter()
                        .map(|(m, c)| BlockTermDto {
                            expo: m.0.clone(),
                            re: c.re.to_string(),
                            im: c.im.to_string(),
                        })
                        .collect(),
                }
            })
            .collect();
        let dto = KernelDto {
            d: self.params.d_levels,
            n: self.params.n_particles,
            ordering_version: KERNEL_ORDERING_VERSION,
            blocks,
        };
        serde_json::to_string(&dto).expect("serialization is total")
    }

    /// Rebuild a kernel family with its stored blocks pre-installed.
    /// Absent blocks are recomputed on demand, so a partial store stays
    /// correct; stored labels outside the family are rejected.
    pub fn from_json(text: &str) -> Result<Self> {
        let dto: KernelDto =
            serde_json::from_str(text).map_err(|e| Error::InvalidParams(e.to_string()))?;
        if dto.ordering_version != KERNEL_ORDERING_VERSION {
            return Err(Error::InvalidParams(format!(
                "unsupported kernel cache layout: ordering {}",
                dto.ordering_version
            )));
        }
        let params = ModelParams::new(dto.d, dto.n)?;
        let kern = SWKernel::new(&params);
        let dim = params.chart_dim();
        let fock = kern.weights.len();
        let parse = |s: &str| -> Result<Rat> {
            s.parse::<Rat>()
                .map_err(|e| Error::InvalidParams(format!("bad rational '{s}': {e}")))
        };
        let mut map = kern.blocks.lock().unwrap();
        for b in dto.blocks {
            if b.n >= kern.taus.len() || b.a > b.b || b.b >= fock {
                return Err(Error::InvalidParams(format!(
                    "stored block ({}, {}, {}) is outside the family",
                    b.n, b.a, b.b
                )));
            }
            let mut num = Poly::zero(2 * dim);
            for t in b.terms {
                if t.expo.len() != 2 * dim {
                    return Err(Error::DimensionMismatch(
                        "stored block term has wrong arity".into(),
                    ));
                }
                num.add_term(Mono(t.expo), CRat::new(parse(&t.re)?, parse(&t.im)?));
            }
            let exact = PhaseFunction { dim, denom_pow: b.denom_pow, num };
            let float = exact.map_coeff(crat_to_c64);
            map.insert((b.n, b.a, b.b), Arc::new(KernelBlock { exact, float }));
        }
        drop(map);
        Ok(kern)
    }
}

static SW_CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<SWKernel>>>> = OnceLock::new();

/// Shared kernel family for one (D, N); created once, then reused, with
/// blocks accumulating across uses.
pub fn sw_kernel_for(params: &ModelParams) -> Result<Arc<SWKernel>> {
    let cache = SW_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (params.d_levels, params.n_particles);
    let mut map = cache.lock().unwrap();
    Ok(map
        .entry(key)
        .or_insert_with(|| Arc::new(SWKernel::new(params)))
        .clone())
}

/// Install a deserialized kernel family as the shared instance for its
/// (D, N). An already-shared family wins; the returned Arc is live.
pub fn seed_sw_kernel(kern: SWKernel) -> Arc<SWKernel> {
    let cache = SW_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (kern.params.d_levels, kern.params.n_particles);
    cache
        .lock()
        .unwrap()
        .entry(key)
        .or_insert_with(|| Arc::new(kern))
        .clone()
}

/// Kernel member at parameter s evaluated at z.
pub fn sw_kernel(params: &ModelParams, s: f64, z: &PhasePoint) -> Result<OperatorMatrix> {
    Ok(sw_kernel_for(params)?.assemble(s, z))
}

/// Member of the s-family of phase-space functions attached to an operator.
/// Levels hold the eigenspace components of the overlap symbol; the member
/// parameter s enters only through scalar powers of tau at evaluation.
#[derive(Clone, Debug)]
pub struct QuasiDistribution {
    pub params: ModelParams,
    pub s: f64,
    pub source: OperatorMatrix,
    pub hermitian_source: bool,
    levels: Option<Vec<PhaseFunction<C64>>>,
}

/// Overlap symbol sum_{a,b} rho_ab sqrt(m_a m_b) conj(z)^a z^b / (1+|z|^2)^N;
/// the row label rides on the conjugated monomial.
#[cfg(test)]
fn overlap_symbol(rho: &OperatorMatrix) -> PhaseFunction<C64> {
    let params = &rho.params;
    let dim = params.chart_dim();
    let occ = params.fock_indices();
    let weights: Vec<f64> = occ
        .iter()
        .map(|f| rat_to_f64(&multinomial_rat(&f.0)).sqrt())
        .collect();
    let mut sym = PhaseFunction::<C64>::from_term(
        dim,
        &vec![0; dim],
        &vec![0; dim],
        C64::new(0.0, 0.0),
        params.n_particles,
    );
    for a in 0..rho.dim() {
        for b in 0..rho.dim() {
            let c = rho.get(a, b) * (weights[a] * weights[b]);
            if c.norm_sqr() == 0.0 {
                continue;
            }
            let hol: Vec<u16> = occ[b].reduced().iter().map(|&k| k as u16).collect();
            let anti: Vec<u16> = occ[a].reduced().iter().map(|&k| k as u16).collect();
            sym = sym.add(&PhaseFunction::from_term(
                dim,
                &hol,
                &anti,
                c,
                params.n_particles,
            ));
        }
    }
    sym
}

/// F^(s) of an operator: the level components of its overlap symbol with
/// the family scalars applied at evaluation time. Levels are combined from
/// the exactly projected matrix-unit blocks, so the level split carries no
/// projection rounding; a matrix entry only perturbs its own levels.
pub fn quasi_distribution(rho: &OperatorMatrix, s: f64) -> Result<QuasiDistribution> {
    let kern = sw_kernel_for(&rho.params)?;
    let d = rho.dim();
    let mut scale = 0.0f64;
    let mut entries = Vec::new();
    for a in 0..d {
        for b in 0..d {
            let c = rho.get(a, b) * (kern.weight(a) * kern.weight(b));
            if c.norm_sqr() > 0.0 {
                scale = scale.max(c.norm());
                entries.push((a, b, c));
            }
        }
    }
    let mut levels = Vec::with_capacity(rho.params.n_particles as usize + 1);
    for n in 0..=rho.params.n_particles as usize {
        let mut level = PhaseFunction::<C64>::zero(rho.params.chart_dim());
        // The overlap symbol of the unit at (a, b) is the stored pair
        // block with the roles swapped: row b, column a.
        for &(a, b, c) in &entries {
            level = level.add(&kern.block(n, b, a).float.scale(&c));
        }
        // Coefficients at rounding scale are an exact zero of the
        // operator's multipole content; keeping them would inject noise
        // that later tau powers amplify.
        let peak = level
            .num
            .terms
            .values()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
        if peak <= 1e-13 * scale {
            level = PhaseFunction::zero(rho.params.chart_dim());
        } else {
            level.canonicalize();
        }
        levels.push(level);
    }
    Ok(QuasiDistribution {
        params: rho.params.clone(),
        s,
        source: rho.clone(),
        hermitian_source: rho.is_hermitian(1e-10),
        levels: Some(levels),
    })
}

impl QuasiDistribution {
    pub fn eval(&self, z: &PhasePoint) -> C64 {
        match &self.levels {
            Some(levels) => {
                let mut acc = C64::new(0.0, 0.0);
                for (n, level) in levels.iter().enumerate() {
                    acc += level.eval(&z.0) * family_scale(&self.params, n as u32, self.s);
                }
                acc
            }
            None => {
                let kern = sw_kernel_for(&self.params).expect("kernel family built");
                self.source.matmul(&kern.assemble(self.s, z)).trace()
            }
        }
    }

    pub fn eval_real(&self, z: &PhasePoint) -> f64 {
        self.eval(z).re
    }

    pub fn levels(&self) -> Result<&[PhaseFunction<C64>]> {
        self.levels.as_deref().ok_or(Error::MissingSymbolicForm)
    }

    /// Single rational form with all family scalars folded in.
    pub fn symbolic(&self) -> Result<PhaseFunction<C64>> {
        let levels = self.levels()?;
        let mut acc = PhaseFunction::<C64>::zero(self.params.chart_dim());
        for (n, level) in levels.iter().enumerate() {
            let w = family_scale(&self.params, n as u32, self.s);
            acc = acc.add(&level.scale(&C64::new(w, 0.0)));
        }
        acc.canonicalize();
        Ok(acc)
    }

    /// Same distribution restricted to pointwise trace evaluation.
    pub fn without_symbolic(&self) -> Self {
        let mut f = self.clone();
        f.levels = None;
        f
    }

    /// Transport to another family member; the level components are shared,
    /// only the evaluation scalars change.
    pub fn with_s(&self, s: f64) -> Self {
        let mut f = self.clone();
        f.s = s;
        f
    }
}

/// Recover the operator from one family member by integrating it against
/// the opposite member of the kernel family.
pub fn reconstruct_density(f: &QuasiDistribution) -> Result<OperatorMatrix> {
    let sym = f.symbolic()?;
    let kern = sw_kernel_for(&f.params)?;
    let d = f.params.fock_dim();
    let dn = d as f64;
    let mut rho = OperatorMatrix::zeros(&f.params);
    for a in 0..d {
        for b in 0..d {
            let mut acc = C64::new(0.0, 0.0);
            for n in 0..kern.level_count() {
                let prod = sym.mul(&kern.block(n, a, b).float);
                let integral = haar_integrate_f64(&prod)?;
                acc += integral * tau_powf(&f.params, n as u32, (f.s - 1.0) * 0.5);
            }
            rho.set(a, b, acc * (dn * kern.weight(a) * kern.weight(b)));
        }
    }
    Ok(rho)
}

/// Two-point transport kernel between family members s and s_prime.
pub fn heat_kernel(
    params: &ModelParams,
    s: f64,
    s_prime: f64,
    z: &PhasePoint,
    z_prime: &PhasePoint,
) -> f64 {
    let q = overlap_q(z, z_prime);
    let mut acc = 0.0;
    for n in 0..=params.n_particles {
        let k = LambdaKernel::new(params.d_levels, n).eval_f64(q);
        acc += tau_powf(params, n, (s_prime - s) * 0.5) * k;
    }
    acc / params.fock_dim() as f64
}

/// Transport a distribution to the member s_to by explicit integration
/// against the two-point kernel (levelwise eigenspace projection of the
/// assembled symbol), rather than by rescaling stored levels.
pub fn heat_smooth(f: &QuasiDistribution, s_to: f64) -> Result<QuasiDistribution> {
    let g = f.symbolic()?;
    let mut levels = Vec::with_capacity(f.params.n_particles as usize + 1);
    for n in 0..=f.params.n_particles {
        let p = kernel_project(n, &g)?;
        let w = tau_powf(&f.params, n, (f.s + 1.0) * 0.5);
        levels.push(p.scale(&C64::new(w, 0.0)));
    }
    Ok(QuasiDistribution {
        params: f.params.clone(),
        s: s_to,
        source: f.source.clone(),
        hermitian_source: f.hermitian_source,
        levels: Some(levels),
    })
}

/// Max-norm residual of the flow equation in s: the s-derivative of the
/// kernel member must match minus half the log-tau-weighted block sum.
/// The derivative is taken by central finite difference with step 1e-6.
pub fn sw_heat_equation_check(params: &ModelParams, s: f64) -> Result<f64> {
    let kern = sw_kernel_for(params)?;
    let dim = params.chart_dim();
    let h = 1e-6;
    let mut worst: f64 = 0.0;
    for seed in [0.3_f64, -0.45] {
        let coords: Vec<C64> = (0..dim)
            .map(|i| C64::new(seed + 0.1 * i as f64, -seed * 0.5 + 0.07 * i as f64))
            .collect();
        let z = PhasePoint(coords);
        let plus = kern.assemble(s + h, &z);
        let minus = kern.assemble(s - h, &z);
        let fd = plus.sub(&minus).scale(C64::new(0.5 / h, 0.0));
        let mut analytic = OperatorMatrix::zeros(params);
        for n in 0..kern.level_count() {
            let w = -0.5 * kern.tau(n).ln() * family_scale(params, n as u32, s);
            analytic = analytic.add(&kern.weighted_block_at(n, &z).scale(C64::new(w, 0.0)));
        }
        worst = worst.max(fd.sub(&analytic).max_abs());
    }
    Ok(worst)
}

/// F^(s) of the operator product of the two sources.
pub fn star_product(
    fa: &QuasiDistribution,
    fb: &QuasiDistribution,
    s: f64,
) -> Result<QuasiDistribution> {
    if fa.params != fb.params {
        return Err(Error::InvalidParams(
            "star product requires matching system parameters".into(),
        ));
    }
    let product = fa.source.matmul(&fb.source);
    quasi_distribution(&product, s)
}

/// Verification path for the star product: both factors are first recovered
/// from their phase-space forms by exact integration, so the result flows
/// through the double-integral composition rather than the stored sources.
pub fn star_product_reconstructed(
    fa: &QuasiDistribution,
    fb: &QuasiDistribution,
    s: f64,
) -> Result<QuasiDistribution> {
    if fa.params != fb.params {
        return Err(Error::InvalidParams(
            "star product requires matching system parameters".into(),
        ));
    }
    let a = reconstruct_density(fa)?;
    let b = reconstruct_density(fb)?;
    quasi_distribution(&a.matmul(&b), s)
}

/// -i times the star commutator of two s=0 members.
pub fn moyal_bracket(
    fa: &QuasiDistribution,
    fb: &QuasiDistribution,
) -> Result<QuasiDistribution> {
    if fa.s != 0.0 || fb.s != 0.0 {
        return Err(Error::InvalidParams(
            "bracket is defined between s = 0 members".into(),
        ));
    }
    if fa.params != fb.params {
        return Err(Error::InvalidParams(
            "bracket requires matching system parameters".into(),
        ));
    }
    let comm = fa.source.commutator(&fb.source);
    quasi_distribution(&comm.scale(C64::new(0.0, -1.0)), 0.0)
}

/// Multipole operator for eigenspace level n and basis label j (1-indexed
/// within the level).
pub fn fano_operator(params: &ModelParams, n: u32, j: usize) -> Result<OperatorMatrix> {
    if n > params.n_particles {
        return Err(Error::InvalidParams(format!(
            "level {n} exceeds the particle number {}",
            params.n_particles
        )));
    }
    let basis = harmonic_basis(params.d_levels, n)?;
    if j == 0 || j > basis.functions.len() {
        return Err(Error::InvalidParams(format!(
            "label {j} outside 1..={} at level {n}",
            basis.functions.len()
        )));
    }
    let f = &basis.functions[j - 1];
    let occ = params.fock_indices();
    let d = params.fock_dim();
    let dn = d as f64;
    let tau = tau_f64(params, n);
    let norm2 = rat_to_f64(&f.norm2);
    let mut m = OperatorMatrix::zeros(params);
    for a in 0..d {
        let m_a = rat_to_f64(&multinomial_rat(&occ[a].0));
        for b in 0..d {
            let m_b = rat_to_f64(&multinomial_rat(&occ[b].0));
            let pair = coherent_pair_symbol(params, &occ[a], &occ[b]);
            let r = haar_integrate(&f.phi.mul(&pair))?;
            let scale = (dn * m_a * m_b / (tau * norm2)).sqrt();
            m.set(a, b, crat_to_c64(&r) * scale);
        }
    }
    Ok(m)
}

/// Number of multipole labels at level n.
pub fn fano_count(params: &ModelParams, n: u32) -> Result<usize> {
    if n > params.n_particles {
        return Err(Error::InvalidParams(format!(
            "level {n} exceeds the particle number {}",
            params.n_particles
        )));
    }
    Ok(harmonic_basis(params.d_levels, n)?.functions.len())
}
