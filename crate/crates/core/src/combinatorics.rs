//! Model parameters, symmetric-sector bookkeeping, and the exact
//! rational weights entering every ordering-dependent expansion.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::sync::Mutex;

use crate::scalar::{rat_int, Rat};
use crate::{Error, Result};

/// An ensemble of `n_particles` identical `d_levels`-level systems,
/// restricted to the fully symmetric sector.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct ModelParams {
    pub d_levels: usize,
    pub n_particles: u32,
}

impl ModelParams {
    pub fn new(d_levels: usize, n_particles: u32) -> Result<Self> {
        if d_levels < 2 {
            return Err(Error::InvalidParams(format!(
                "need at least two levels, got {d_levels}"
            )));
        }
        Ok(ModelParams {
            d_levels,
            n_particles,
        })
    }

    /// Dimension of the chart (one less than the number of levels).
    pub fn chart_dim(&self) -> usize {
        self.d_levels - 1
    }

    /// Dimension of the symmetric sector: C(N + D - 1, N).
    pub fn fock_dim(&self) -> usize {
        binomial(self.n_particles as u64 + self.d_levels as u64 - 1, self.n_particles as u64)
            .to_usize()
            .expect("sector dimension fits usize")
    }

    /// Occupancy vectors in descending lexicographic order, the canonical
    /// basis ordering used everywhere (matrices, state vectors, caches).
    pub fn fock_indices(&self) -> Vec<FockIndex> {
        let mut out = Vec::with_capacity(self.fock_dim());
        let mut current = vec![0u32; self.d_levels];
        enumerate_occupancies(self.n_particles, self.d_levels, 0, &mut current, &mut out);
        out
    }
}

fn enumerate_occupancies(
    remaining: u32,
    levels: usize,
    pos: usize,
    current: &mut Vec<u32>,
    out: &mut Vec<FockIndex>,
) {
    if pos == levels - 1 {
        current[pos] = remaining;
        out.push(FockIndex(current.clone()));
        return;
    }
    for v in (0..=remaining).rev() {
        current[pos] = v;
        enumerate_occupancies(remaining - v, levels, pos + 1, current, out);
    }
}

/// Occupancy vector (n_0, ..., n_{D-1}) with sum N.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FockIndex(pub Vec<u32>);

impl FockIndex {
    pub fn new(params: &ModelParams, occ: Vec<u32>) -> Result<Self> {
        if occ.len() != params.d_levels {
            return Err(Error::DimensionMismatch(format!(
                "occupancy has {} entries, expected {}",
                occ.len(),
                params.d_levels
            )));
        }
        if occ.iter().sum::<u32>() != params.n_particles {
            return Err(Error::InvalidParams(format!(
                "occupancy sums to {}, expected {}",
                occ.iter().sum::<u32>(),
                params.n_particles
            )));
        }
        Ok(FockIndex(occ))
    }

    /// Chart exponents: the occupancies of levels 1..D.
    pub fn reduced(&self) -> &[u32] {
        &self.0[1..]
    }
}

static FACTORIALS: Mutex<Vec<BigInt>> = Mutex::new(Vec::new());

pub fn factorial(n: u64) -> BigInt {
    let mut table = FACTORIALS.lock().unwrap();
    if table.is_empty() {
        table.push(BigInt::one());
    }
    while table.len() <= n as usize {
        let next = table.last().unwrap() * BigInt::from(table.len());
        table.push(next);
    }
    table[n as usize].clone()
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    &factorial(n) / (&factorial(k) * &factorial(n - k))
}

/// N! / prod_i parts_i!.
pub fn multinomial(parts: &[u32]) -> BigInt {
    let n: u64 = parts.iter().map(|&p| p as u64).sum();
    let mut v = factorial(n);
    for &p in parts {
        v /= factorial(p as u64);
    }
    v
}

pub fn multinomial_rat(parts: &[u32]) -> Rat {
    Rat::from(multinomial(parts))
}

/// Laplacian eigenvalue at level n: n (n + D - 1).
pub fn laplace_eigenvalue(d_levels: usize, n: u32) -> u64 {
    n as u64 * (n as u64 + d_levels as u64 - 1)
}

/// Dimension of the level-n eigenspace: d_n^2 - d_{n-1}^2 in terms of the
/// symmetric-sector dimensions d_n = C(n + D - 1, n).
pub fn level_dim(d_levels: usize, n: u32) -> u64 {
    let dn = binomial(n as u64 + d_levels as u64 - 1, n as u64);
    if n == 0 {
        return 1;
    }
    let dprev = binomial(n as u64 - 1 + d_levels as u64 - 1, n as u64 - 1);
    (&dn * &dn - &dprev * &dprev)
        .to_u64()
        .expect("level dimension fits u64")
}

/// Exact expansion weight of the N-th overlap power over the level kernels;
/// zero for n > N.
pub fn inversion_weight(params: &ModelParams, n: u32) -> Rat {
    let tau = tau_weight(params, n);
    let dn = Rat::from(BigInt::from(params.fock_dim()));
    tau / dn
}

/// tau_{N,n} = prod_{i=0}^{n-1} (N - i) / prod_{j=1}^{n} (N + D - 1 + j).
/// Equals 1 at n = 0 and vanishes for n > N.
pub fn tau_weight(params: &ModelParams, n: u32) -> Rat {
    let nn = params.n_particles as i64;
    let dd = params.d_levels as i64;
    let mut num = Rat::one();
    let mut den = Rat::one();
    for i in 0..n as i64 {
        num *= rat_int(nn - i);
    }
    for j in 1..=n as i64 {
        den *= rat_int(nn + dd - 1 + j);
    }
    num / den
}

/// exp of the 1/N series of ln tau_{N,n}, truncated after `order` terms.
/// Supported orders: 1, 2, 3.
pub fn tau_series_approx(params: &ModelParams, n: u32, order: u32) -> Result<f64> {
    let sum = tau_log_series_partial(params, n, order)?;
    Ok(crate::scalar::rat_to_f64(&sum).exp())
}

/// Partial sum of the large-N series of ln tau_{N,n}, kept rational so
/// error measurements can subtract it without rounding.
pub fn tau_log_series_partial(params: &ModelParams, n: u32, order: u32) -> Result<Rat> {
    if !(1..=3).contains(&order) {
        return Err(Error::UnsupportedOrder(order));
    }
    let nn = rat_int(params.n_particles as i64);
    let d = params.d_levels as i64;
    let lam = rat_int(laplace_eigenvalue(params.d_levels, n) as i64);
    let mut sum = -&lam / &nn;
    if order >= 2 {
        sum += rat_int(d) * &lam / (rat_int(2) * &nn * &nn);
    }
    if order >= 3 {
        let core = rat_int(d * (2 * d - 1)) + &lam;
        sum -= &lam * core / (rat_int(6) * &nn * &nn * &nn);
    }
    Ok(sum)
}

/// ln tau_{N,n} as an exact rational partial sum of ln(1+u), u = tau - 1,
/// with the stated bound on the dropped tail. Valid whenever |u| < 1,
/// which holds for all N >= 1, n <= N.
pub fn tau_log_exact_series(params: &ModelParams, n: u32, terms: u32) -> (Rat, Rat) {
    let tau = tau_weight(params, n);
    let u = tau - Rat::one();
    let mut sum = Rat::zero();
    let mut upow = u.clone();
    for t in 1..=terms {
        let term = &upow / rat_int(t as i64);
        if t % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
        upow *= &u;
    }
    // |tail| <= |u|^{terms+1} / ((terms+1)(1-|u|)).
    let au = u.abs();
    let tail = upow.abs() / (rat_int(terms as i64 + 1) * (Rat::one() - au));
    (sum, tail)
}

/// Row lengths [N+n, N, ..., N, N-n] (with D-2 middle rows) of the invariant
/// subspaces appearing at level n, together with the level dimension.
pub fn cg_decomposition(params: &ModelParams) -> Vec<(Vec<u32>, u64)> {
    let nn = params.n_particles;
    (0..=nn)
        .map(|n| {
            let mut shape = Vec::with_capacity(params.d_levels);
            shape.push(nn + n);
            for _ in 0..params.d_levels.saturating_sub(2) {
                shape.push(nn);
            }
            shape.push(nn - n);
            (shape, level_dim(params.d_levels, n))
        })
        .collect()
}

/// Dimension of the unitary-group irrep with the given row lengths, padded
/// with zero rows to D: prod_{i<j} (h_i - h_j + j - i) / prod_{k<D} k!.
pub fn young_dim(shape: &[u32], d_levels: usize) -> Result<BigInt> {
    if shape.len() > d_levels {
        return Err(Error::InvalidParams(format!(
            "shape has {} rows, exceeding {} levels",
            shape.len(),
            d_levels
        )));
    }
    if shape.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::InvalidParams(
            "shape rows must be non-increasing".into(),
        ));
    }
    let mut h: Vec<i64> = shape.iter().map(|&x| x as i64).collect();
    h.resize(d_levels, 0);
    let mut num = BigInt::one();
    for i in 0..d_levels {
        for j in (i + 1)..d_levels {
            num *= BigInt::from(h[i] - h[j] + j as i64 - i as i64);
        }
    }
    let mut den = BigInt::one();
    for k in 1..d_levels {
        den *= factorial(k as u64);
    }
    Ok(num / den)
}
