//! Coherent states on the chart, parity-adapted cat superpositions,
//! and the direct overlap-squared distribution.

use num_traits::Zero;

use crate::combinatorics::{multinomial_rat, FockIndex, ModelParams};
use crate::geometry::PhasePoint;
use crate::scalar::{rat_to_f64, C64};
use crate::{Error, Result};

/// Pure state in the symmetric Fock basis, graded-lex index order.
#[derive(Clone, PartialEq, Debug)]
pub struct StateVector {
    pub params: ModelParams,
    pub amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Coherent-state amplitude at one occupancy:
/// sqrt(multinomial) z^reduced / (1+|z|^2)^(N/2).
pub fn fock_amplitude(params: &ModelParams, index: &FockIndex, z: &PhasePoint) -> C64 {
    let mut mono = C64::new(1.0, 0.0);
    for (&occ, zi) in index.reduced().iter().zip(&z.0) {
        mono *= zi.powu(occ);
    }
    let weight = rat_to_f64(&multinomial_rat(&index.0)).sqrt();
    let shell = (1.0 + z.norm_sqr()).powf(params.n_particles as f64 / 2.0);
    mono * weight / shell
}

pub fn coherent_state(params: &ModelParams, z: &PhasePoint) -> StateVector {
    assert_eq!(z.chart_dim(), params.chart_dim());
    let amplitudes = params
        .fock_indices()
        .iter()
        .map(|idx| fock_amplitude(params, idx, z))
        .collect();
    StateVector { params: params.clone(), amplitudes }
}

/// One parity sector of the coherent state: occupancies of the reduced
/// modes congruent to the parity bits mod 2.
#[derive(Clone, PartialEq, Debug)]
pub struct CatSpec {
    pub params: ModelParams,
    pub z: PhasePoint,
    pub parity: Vec<u8>,
}

impl CatSpec {
    pub fn new(params: ModelParams, z: PhasePoint, parity: Vec<u8>) -> Result<Self> {
        if parity.len() != params.chart_dim() || parity.iter().any(|&b| b > 1) {
            return Err(Error::InvalidParams(format!(
                "parity vector must be {} bits",
                params.chart_dim()
            )));
        }
        if z.chart_dim() != params.chart_dim() {
            return Err(Error::InvalidParams("point dimension mismatch".into()));
        }
        Ok(CatSpec { params, z, parity })
    }
}

/// Unnormalized parity projection of the coherent state. The sign-flip
/// superposition collapses to a congruence filter on occupancies.
fn parity_projection(spec: &CatSpec) -> Vec<C64> {
    let coh = coherent_state(&spec.params, &spec.z);
    spec.params
        .fock_indices()
        .iter()
        .zip(&coh.amplitudes)
        .map(|(idx, &a)| {
            let keep = idx
                .reduced()
                .iter()
                .zip(&spec.parity)
                .all(|(&occ, &bit)| occ % 2 == bit as u32);
            if keep { a } else { C64::zero() }
        })
        .collect()
}

/// Squared norm of the parity projection via the closed sign-flip sum,
/// 2^-(D-1) sum_e (-1)^(c.e) (1 + sum_i (-1)^(e_i)|z_i|^2)^N / (1+|z|^2)^N.
pub fn cat_norm_sqr(spec: &CatSpec) -> f64 {
    let dim = spec.params.chart_dim();
    let n = spec.params.n_particles;
    let mut total = 0.0;
    for pattern in 0..(1u32 << dim) {
        let mut sign = 1.0;
        let mut shell = 1.0;
        for i in 0..dim {
            let flipped = pattern >> i & 1 == 1;
            if flipped && spec.parity[i] == 1 {
                sign = -sign;
            }
            shell += if flipped { -1.0 } else { 1.0 } * spec.z.0[i].norm_sqr();
        }
        total += sign * shell.powi(n as i32);
    }
    total / (1u32 << dim) as f64 / (1.0 + spec.z.norm_sqr()).powi(n as i32)
}

const DEGENERATE_NORM_SQR: f64 = 1e-12;

pub fn cat_state(spec: &CatSpec) -> Result<StateVector> {
    let raw = parity_projection(spec);
    let norm_sqr: f64 = raw.iter().map(|a| a.norm_sqr()).sum();
    if norm_sqr <= DEGENERATE_NORM_SQR {
        return Err(Error::DegenerateCat(format!(
            "parity sector {:?} has squared norm {norm_sqr:.3e}",
            spec.parity
        )));
    }
    let scale = norm_sqr.sqrt();
    Ok(StateVector {
        params: spec.params.clone(),
        amplitudes: raw.into_iter().map(|a| a / scale).collect(),
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Sign {
    Plus,
    Minus,
}

/// Equal superposition of the even-weight (+) or odd-weight (-) parity
/// sectors. The sectors have disjoint Fock support, so the combination
/// of unit-norm cats stays unit-norm.
pub fn multimode_cat(params: &ModelParams, z: &PhasePoint, sign: Sign) -> Result<StateVector> {
    let dim = params.chart_dim();
    let want = match sign {
        Sign::Plus => 0,
        Sign::Minus => 1,
    };
    let mut sectors = Vec::new();
    for pattern in 0..(1u32 << dim) {
        if pattern.count_ones() % 2 == want {
            let parity: Vec<u8> = (0..dim).map(|i| (pattern >> i & 1) as u8).collect();
            sectors.push(cat_state(&CatSpec::new(params.clone(), z.clone(), parity)?)?);
        }
    }
    let scale = (sectors.len() as f64).sqrt();
    let mut amplitudes = vec![C64::zero(); params.fock_dim()];
    for s in sectors {
        for (acc, a) in amplitudes.iter_mut().zip(&s.amplitudes) {
            *acc += a / scale;
        }
    }
    Ok(StateVector { params: params.clone(), amplitudes })
}

/// Squared overlap with the coherent family: |<N,z | psi>|^2.
pub fn husimi(psi: &StateVector, z: &PhasePoint) -> f64 {
    let coh = coherent_state(&psi.params, z);
    coh.inner(psi).norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{overlap_q, RatPoint};
    use crate::scalar::{crat, rat};

    fn point(parts: &[(f64, f64)]) -> PhasePoint {
        PhasePoint(parts.iter().map(|&(re, im)| C64::new(re, im)).collect())
    }

    #[test]
    fn coherent_at_origin_is_the_top_fock_state() {
        let params = ModelParams::new(3, 2).unwrap();
        let cs = coherent_state(&params, &PhasePoint::origin(2));
        assert!((cs.amplitudes[0] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(cs.amplitudes[1..].iter().all(|a| a.norm() < 1e-15));
        assert_eq!(params.fock_indices()[0].0, vec![2, 0, 0]);
    }

    #[test]
    fn coherent_overlap_is_an_overlap_power() {
        let params = ModelParams::new(3, 3).unwrap();
        let z = point(&[(0.4, -0.2), (0.1, 0.9)]);
        let w = point(&[(-0.3, 0.5), (0.7, 0.0)]);
        let overlap = coherent_state(&params, &w).inner(&coherent_state(&params, &z));
        let q = overlap_q(&z, &w);
        assert!((overlap.norm_sqr() - q.powi(3)).abs() < 1e-13);
        assert!((coherent_state(&params, &z).norm() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn sphere_pair_amplitudes() {
        let params = ModelParams::new(2, 2).unwrap();
        let cs = coherent_state(&params, &point(&[(1.0, 0.0)]));
        let expect = [0.5, std::f64::consts::FRAC_1_SQRT_2, 0.5];
        for (a, e) in cs.amplitudes.iter().zip(expect) {
            assert!((a - C64::new(e, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn sphere_cat_norms_match_closed_form() {
        let params = ModelParams::new(2, 3).unwrap();
        let z = point(&[(0.6, 0.3)]);
        let s = z.norm_sqr();
        for (bit, sg) in [(0u8, 1.0), (1, -1.0)] {
            let spec = CatSpec::new(params.clone(), z.clone(), vec![bit]).unwrap();
            let direct: f64 = parity_projection(&spec).iter().map(|a| a.norm_sqr()).sum();
            // Projection carries a quarter of the two-branch norm
            // 2 [1 +/- ((1-|z|^2)/(1+|z|^2))^N].
            let branch = 2.0 * (1.0 + sg * ((1.0 - s) / (1.0 + s)).powi(3));
            assert!((4.0 * direct - branch).abs() < 1e-13);
            assert!((direct - cat_norm_sqr(&spec)).abs() < 1e-14);
        }
    }

    #[test]
    fn qutrit_sector_norm_example() {
        let params = ModelParams::new(3, 1).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let spec =
            CatSpec::new(params, point(&[(s, 0.0), (s, 0.0)]), vec![0, 0]).unwrap();
        let norm_sqr: f64 = parity_projection(&spec).iter().map(|a| a.norm_sqr()).sum();
        assert!((norm_sqr.sqrt() - s).abs() < 1e-14);
        assert!((norm_sqr - cat_norm_sqr(&spec)).abs() < 1e-14);
    }

    #[test]
    fn parity_sectors_decompose_the_coherent_state() {
        let params = ModelParams::new(3, 2).unwrap();
        let z = point(&[(0.8, -0.1), (0.2, 0.4)]);
        let mut total = 0.0;
        for pattern in 0..4u32 {
            let parity = vec![(pattern & 1) as u8, (pattern >> 1) as u8];
            let spec = CatSpec::new(params.clone(), z.clone(), parity).unwrap();
            total += parity_projection(&spec).iter().map(|a| a.norm_sqr()).sum::<f64>();
        }
        assert!((total - 1.0).abs() < 1e-13);
    }

    #[test]
    fn degenerate_sectors_are_rejected() {
        let params = ModelParams::new(2, 2).unwrap();
        let spec = CatSpec::new(params, PhasePoint::origin(1), vec![1]).unwrap();
        assert!(matches!(cat_state(&spec), Err(Error::DegenerateCat(_))));
    }

    #[test]
    fn even_cat_at_origin_limit() {
        let params = ModelParams::new(3, 2).unwrap();
        let spec = CatSpec::new(params.clone(), PhasePoint::origin(2), vec![0, 0]).unwrap();
        let cat = cat_state(&spec).unwrap();
        let origin = coherent_state(&params, &PhasePoint::origin(2));
        assert!((cat.inner(&origin).norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn multimode_cats_are_orthonormal() {
        let params = ModelParams::new(3, 2).unwrap();
        let z = point(&[(0.9, 0.2), (-0.5, 0.6)]);
        let plus = multimode_cat(&params, &z, Sign::Plus).unwrap();
        let minus = multimode_cat(&params, &z, Sign::Minus).unwrap();
        assert!((plus.norm() - 1.0).abs() < 1e-13);
        assert!((minus.norm() - 1.0).abs() < 1e-13);
        assert!(plus.inner(&minus).norm() < 1e-14);
    }

    #[test]
    fn sphere_multimode_reduces_to_single_sector() {
        let params = ModelParams::new(2, 3).unwrap();
        let z = point(&[(0.7, -0.4)]);
        let plus = multimode_cat(&params, &z, Sign::Plus).unwrap();
        let even = cat_state(&CatSpec::new(params, z, vec![0]).unwrap()).unwrap();
        assert_eq!(plus, even);
    }

    #[test]
    fn husimi_of_coherent_is_overlap_power() {
        let params = ModelParams::new(3, 4).unwrap();
        let w = point(&[(0.3, 0.3), (0.0, -0.6)]);
        let z = point(&[(-0.2, 0.1), (0.5, 0.5)]);
        let cs = coherent_state(&params, &w);
        assert!((husimi(&cs, &z) - overlap_q(&z, &w).powi(4)).abs() < 1e-13);
        assert!((husimi(&cs, &w) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn cat_husimi_invariant_under_sign_flips() {
        let params = ModelParams::new(3, 3).unwrap();
        let z0 = point(&[(0.8, 0.1), (0.3, -0.5)]);
        let spec = CatSpec::new(params.clone(), z0, vec![1, 0]).unwrap();
        let cat = cat_state(&spec).unwrap();
        let probe = point(&[(0.4, 0.7), (-0.9, 0.2)]);
        let base = husimi(&cat, &probe);
        for pattern in 1..4u32 {
            let flipped = PhasePoint(
                probe
                    .0
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| if pattern >> i & 1 == 1 { -v } else { v })
                    .collect(),
            );
            assert!((husimi(&cat, &flipped) - base).abs() < 1e-13);
        }
    }

    #[test]
    fn exact_rational_points_round_trip_through_floats() {
        let params = ModelParams::new(2, 2).unwrap();
        let zr = RatPoint(vec![crat(rat(1, 1), rat(0, 1))]);
        let cs = coherent_state(&params, &zr.to_float());
        assert!((cs.norm() - 1.0).abs() < 1e-15);
    }
}
