//! Acceptance suite: one test per numbered criterion, each printing a
//! single pass line with the measured figure of merit. Tolerances are
//! pinned as constants next to the checks that use them.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use quditphase::combinatorics::{cg_decomposition, multinomial_rat, ModelParams};
use quditphase::geometry::{overlap_q, PhasePoint, RatPoint};
use quditphase::harmonic::{harmonic_basis, LambdaKernel};
use quditphase::scalar::{crat_real, rat, rat_to_f64, C64, CRat, Rat};
use quditphase::states::{cat_state, coherent_state, husimi, CatSpec};
use quditphase::sw::{
    heat_kernel, heat_smooth, quasi_distribution, reconstruct_density, sw_kernel, sw_kernel_for,
    OperatorMatrix,
};
use quditphase::verify::{
    check_asymptotics, check_harmonic, check_negativity, check_semiclassical,
    check_sphere_bracket, check_tracing, check_young, collapse_is_exact,
};

/// Assembled kernels against the displayed closed-form matrices.
const TOL_ASSEMBLED: f64 = 1e-12;
/// Floating identities routed through the basis or integration layer.
const TOL_FLOAT: f64 = 1e-9;
/// Cat-state distribution grids against their displayed closed forms.
const TOL_CAT_GRID: f64 = 1e-10;

fn rational(rng: &mut ChaCha8Rng) -> Rat {
    let num = rng.gen_range(-9i64..=9);
    let den = rng.gen_range(1i64..=9);
    rat(num, den)
}

fn rational_point(rng: &mut ChaCha8Rng, dim: usize) -> Vec<CRat> {
    (0..dim)
        .map(|_| CRat::new(rational(rng), rational(rng)))
        .collect()
}

fn to_c64(z: &CRat) -> C64 {
    C64::new(rat_to_f64(&z.re), rat_to_f64(&z.im))
}

fn crat_conj(z: &CRat) -> CRat {
    CRat::new(z.re.clone(), -z.im.clone())
}

/// Projector entries v_a conj(v_b) / (1 + S) for v = (1, z_1, ..., z_{D-1}).
fn projector_entry_exact(z: &[CRat], a: usize, b: usize) -> CRat {
    let mut v = vec![CRat::new(Rat::from_integer(1.into()), Rat::zero())];
    v.extend_from_slice(z);
    let mut shell = Rat::from_integer(1.into());
    for c in z {
        shell += (c.clone() * crat_conj(c)).re;
    }
    v[a].clone() * crat_conj(&v[b]) / CRat::new(shell, Rat::zero())
}

#[test]
fn criterion_01_kernel_matches_displayed_closed_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;

    for d in [2usize, 3] {
        let params = ModelParams::new(d, 1).unwrap();
        let kern = sw_kernel_for(&params).unwrap();
        for _ in 0..20 {
            let zq = rational_point(&mut rng, d - 1);

            // Exact per-block equality: the uniform part is I/D and the
            // top part is the projector minus I/D, both rational at
            // rational points.
            for a in 0..d {
                for b in 0..d {
                    let uniform = if a == b {
                        crat_real(rat(1, d as i64))
                    } else {
                        CRat::new(Rat::zero(), Rat::zero())
                    };
                    assert_eq!(kern.block(0, a, b).exact.eval_exact(&zq), uniform);
                    let expected = projector_entry_exact(&zq, a, b) - uniform;
                    assert_eq!(
                        kern.block(1, a, b).exact.eval_exact(&zq),
                        expected,
                        "level-1 block ({a},{b}) deviates at D={d}"
                    );
                }
            }

            // Assembled members against the displayed matrices once the
            // irrational powers of 3 and 2 are attached.
            let zf: Vec<C64> = zq.iter().map(to_c64).collect();
            let shell = 1.0 + zf.iter().map(|c| c.norm_sqr()).sum::<f64>();
            for s in [-1.0f64, 0.0, 1.0] {
                let got = sw_kernel(&params, s, &PhasePoint(zf.clone())).unwrap();
                let want = if d == 2 {
                    let g = 3.0f64.powf((s + 1.0) * 0.5);
                    let z = zf[0];
                    [
                        vec![
                            C64::new((shell - g * (shell - 2.0)) / 2.0, 0.0),
                            z.conj() * g,
                        ],
                        vec![z * g, C64::new((shell + g * (shell - 2.0)) / 2.0, 0.0)],
                    ]
                    .concat()
                } else {
                    let h = 2.0f64.powf(-s);
                    let (z1, z2) = (zf[0], zf[1]);
                    let (r1, r2) = (z1.norm_sqr(), z2.norm_sqr());
                    vec![
                        C64::new((h + 4.0 + (h - 2.0) * (shell - 1.0)) / 6.0, 0.0),
                        z1.conj(),
                        z2.conj(),
                        z1,
                        C64::new(((h + 4.0) * r1 + (h - 2.0) * (1.0 + r2)) / 6.0, 0.0),
                        z1 * z2.conj(),
                        z2,
                        z2 * z1.conj(),
                        C64::new(((h + 4.0) * r2 + (h - 2.0) * (1.0 + r1)) / 6.0, 0.0),
                    ]
                };
                let scale = if d == 2 {
                    1.0 / shell
                } else {
                    2.0f64.powf(1.0 + s) / shell
                };
                for a in 0..d {
                    for b in 0..d {
                        let dev = (got.get(a, b) - want[a * d + b] * scale).norm();
                        worst = worst.max(dev);
                    }
                }
            }
        }
    }
    assert!(worst <= TOL_ASSEMBLED, "assembled deviation {worst:.2e}");
    println!(
        "criterion 01 kernel closed forms: PASS (blocks exact, assembled within {worst:.2e})"
    );
}

#[test]
fn criterion_02_tracing_and_standardization_sweep() {
    let mut details = Vec::new();
    for d in [2usize, 3] {
        for n in 0..=3u32 {
            let report = check_tracing(&ModelParams::new(d, n).unwrap()).unwrap();
            assert!(report.passed, "{}: {}", report.name, report.detail);
            details.push(format!("D={d} N={n} ok"));
        }
    }
    println!(
        "criterion 02 tracing sweep: PASS ({}; residuals within {TOL_FLOAT:.0e})",
        details.join(", ")
    );
}

#[test]
fn criterion_03_cat_state_middle_member_closed_forms() {
    let params = ModelParams::new(2, 2).unwrap();
    let root10 = 10.0f64.sqrt();
    let mut worst: f64 = 0.0;
    for parity in [0u8, 1] {
        let spec = CatSpec::new(
            params.clone(),
            PhasePoint(vec![C64::new(1.0, 0.0)]),
            vec![parity],
        )
        .unwrap();
        let rho = OperatorMatrix::pure(&cat_state(&spec).unwrap());
        let w = quasi_distribution(&rho, 0.0).unwrap();
        for ix in 0..41 {
            for iy in 0..41 {
                let x = -3.0 + 6.0 * ix as f64 / 40.0;
                let y = -3.0 + 6.0 * iy as f64 / 40.0;
                let r = x * x + y * y + 1.0;
                let expected = if parity == 0 {
                    (root10 + 2.0) / 6.0 - 2.0 * root10 * y * y / (r * r)
                } else {
                    2.0 * root10 / r - 2.0 * root10 / (r * r) - root10 / 3.0 + 1.0 / 3.0
                };
                let got = w.eval_real(&PhasePoint(vec![C64::new(x, y)]));
                worst = worst.max((got - expected).abs());
            }
        }
        let origin = w.eval_real(&PhasePoint(vec![C64::new(0.0, 0.0)]));
        let spot = if parity == 0 {
            (root10 + 2.0) / 6.0
        } else {
            (1.0 - root10) / 3.0
        };
        assert!(
            (origin - spot).abs() <= TOL_CAT_GRID,
            "origin value {origin} vs {spot}"
        );
    }
    assert!(worst <= TOL_CAT_GRID, "grid deviation {worst:.2e}");
    println!("criterion 03 cat closed forms: PASS (41x41 grid within {worst:.2e})");
}

#[test]
fn criterion_04_husimi_of_coherent_states() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let combos: Vec<(usize, u32)> = [2usize, 3]
        .iter()
        .flat_map(|&d| (1..=4u32).map(move |n| (d, n)))
        .collect();
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let (d, n) = combos[k % combos.len()];
        let params = ModelParams::new(d, n).unwrap();
        let dim = params.chart_dim();
        let sample = |rng: &mut ChaCha8Rng| {
            PhasePoint(
                (0..dim)
                    .map(|_| C64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)))
                    .collect(),
            )
        };
        let w = sample(&mut rng);
        let z = sample(&mut rng);
        let psi = coherent_state(&params, &w);
        let f = quasi_distribution(&OperatorMatrix::pure(&psi), -1.0).unwrap();
        let through_kernel = f.eval_real(&z);
        let q_power = overlap_q(&z, &w).powi(n as i32);
        let direct = husimi(&psi, &z);
        worst = worst.max((through_kernel - q_power).abs());
        worst = worst.max((direct - q_power).abs());
        worst = worst.max((through_kernel - direct).abs());
    }
    assert!(worst <= TOL_FLOAT, "worst deviation {worst:.2e}");
    println!("criterion 04 husimi consistency: PASS (50 pairs within {worst:.2e})");
}

#[test]
fn criterion_05_transport_collapse_and_cat_smoothing() {
    // Exact coefficientwise collapse of the (-1, 1) transport kernel to
    // the overlap power.
    for d in [2usize, 3] {
        for n in 0..=4u32 {
            let params = ModelParams::new(d, n).unwrap();
            assert!(collapse_is_exact(&params), "collapse fails at D={d} N={n}");
        }
    }

    // Pointwise agreement of the two-point kernel with the overlap power.
    let mut worst: f64 = 0.0;
    for (d, n) in [(2usize, 3u32), (3, 2)] {
        let params = ModelParams::new(d, n).unwrap();
        let dim = params.chart_dim();
        for seed in [0.25f64, -0.4, 0.9] {
            let z = PhasePoint(
                (0..dim)
                    .map(|i| C64::new(seed + 0.3 * i as f64, -0.2 * seed))
                    .collect(),
            );
            let zp = PhasePoint(
                (0..dim)
                    .map(|i| C64::new(-0.1 + 0.2 * i as f64, seed))
                    .collect(),
            );
            let k = heat_kernel(&params, -1.0, 1.0, &z, &zp);
            worst = worst.max((k - overlap_q(&z, &zp).powi(n as i32)).abs());
        }
    }

    // Smoothing the middle member of the N=2 cats down to the overlap
    // member reproduces the directly computed overlap member.
    for (d, z_seed) in [(2usize, vec![C64::new(1.0, 0.0)]), (3, vec![C64::new(0.7, 0.0), C64::new(0.4, 0.0)])] {
        let params = ModelParams::new(d, 2).unwrap();
        let dim = params.chart_dim();
        for parity in [0u8, 1] {
            let spec = CatSpec::new(
                params.clone(),
                PhasePoint(z_seed.clone()),
                vec![parity; dim],
            )
            .unwrap();
            let rho = OperatorMatrix::pure(&cat_state(&spec).unwrap());
            let middle = quasi_distribution(&rho, 0.0).unwrap();
            let smoothed = heat_smooth(&middle, -1.0).unwrap();
            let direct = quasi_distribution(&rho, -1.0).unwrap();
            for ix in 0..5 {
                for iy in 0..5 {
                    let z = PhasePoint(
                        (0..dim)
                            .map(|i| {
                                C64::new(
                                    -2.0 + ix as f64 + 0.1 * i as f64,
                                    -2.0 + iy as f64,
                                )
                            })
                            .collect(),
                    );
                    worst = worst.max((smoothed.eval(&z) - direct.eval(&z)).norm());
                }
            }
        }
    }
    assert!(worst <= TOL_FLOAT, "worst residual {worst:.2e}");
    println!(
        "criterion 05 transport kernel: PASS (collapse exact, smoothing within {worst:.2e})"
    );
}

#[test]
fn criterion_06_round_trip_reconstruction() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let combos: Vec<(usize, u32)> = [2usize, 3]
        .iter()
        .flat_map(|&d| (1..=3u32).map(move |n| (d, n)))
        .collect();
    let mut worst: f64 = 0.0;
    let mut count = 0usize;

    let round = |rho: &OperatorMatrix, worst: &mut f64| {
        for s in [-1.0, 0.0, 1.0] {
            let f = quasi_distribution(rho, s).unwrap();
            let back = reconstruct_density(&f).unwrap();
            *worst = worst.max(back.max_abs_diff(rho));
        }
    };

    for &(d, n) in &combos {
        let params = ModelParams::new(d, n).unwrap();
        for idx in 0..params.fock_dim() {
            round(&OperatorMatrix::fock_projector(&params, idx), &mut worst);
            count += 3;
        }
    }
    for k in 0..10 {
        let (d, n) = combos[k % combos.len()];
        let params = ModelParams::new(d, n).unwrap();
        let dim = params.fock_dim();
        let mut g = OperatorMatrix::zeros(&params);
        for a in 0..dim {
            for b in 0..dim {
                g.set(
                    a,
                    b,
                    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                );
            }
        }
        let mut rho = g.matmul(&g.adjoint());
        let tr = rho.trace().re;
        rho = rho.scale(C64::new(1.0 / tr, 0.0));
        round(&rho, &mut worst);
        count += 3;
    }
    assert!(worst <= TOL_FLOAT, "worst round-trip error {worst:.2e}");
    println!(
        "criterion 06 round-trip reconstruction: PASS ({count} rounds within {worst:.2e})"
    );
}

#[test]
fn criterion_07_harmonic_machinery() {
    for d in [2usize, 3] {
        for report in check_harmonic(d, 4).unwrap() {
            assert!(report.passed, "{}: {}", report.name, report.detail);
        }
    }

    // Reproducing identity, exactly, at rational point pairs: the
    // normalized basis sum at level n equals the level kernel at the
    // exact overlap.
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for d in [2usize, 3] {
        for n in 0..=4u32 {
            let basis = harmonic_basis(d, n).unwrap();
            let kern = LambdaKernel::new(d, n);
            for _ in 0..2 {
                let z = rational_point(&mut rng, d - 1);
                let w = rational_point(&mut rng, d - 1);
                let mut acc = CRat::new(Rat::zero(), Rat::zero());
                for f in &basis.functions {
                    let fz = f.phi.eval_exact(&z);
                    let fw = crat_conj(&f.phi.eval_exact(&w));
                    acc = acc + fz * fw / crat_real(f.norm2.clone());
                }
                let mut r = CRat::new(Rat::from_integer(1.into()), Rat::zero());
                for (zi, wi) in z.iter().zip(&w) {
                    r = r + zi.clone() * crat_conj(wi);
                }
                let mut sz = Rat::from_integer(1.into());
                let mut sw = Rat::from_integer(1.into());
                for zi in &z {
                    sz += (zi.clone() * crat_conj(zi)).re;
                }
                for wi in &w {
                    sw += (wi.clone() * crat_conj(wi)).re;
                }
                let q = (r.clone() * crat_conj(&r)).re / (sz * sw);
                assert_eq!(
                    acc,
                    crat_real(kern.eval_rat(&q)),
                    "reproducing identity not exact at D={d} n={n}"
                );
            }
        }
    }

    // Exact expansion of the overlap power across levels.
    for d in [2usize, 3] {
        for n in 0..=4u32 {
            assert!(collapse_is_exact(&ModelParams::new(d, n).unwrap()));
        }
    }
    println!("criterion 07 harmonic machinery: PASS (eigen, reproducing, expansion exact; counts match)");
}

#[test]
fn criterion_08_representation_bookkeeping() {
    for report in check_young(5, 8) {
        assert!(report.passed, "{}: {}", report.name, report.detail);
    }
    let dims: Vec<u64> = cg_decomposition(&ModelParams::new(3, 2).unwrap())
        .iter()
        .map(|(_, dim)| *dim)
        .collect();
    assert_eq!(dims, vec![1, 8, 27]);
    assert_eq!(dims.iter().sum::<u64>(), 36);
    println!("criterion 08 dimension bookkeeping: PASS (36 = 1 + 8 + 27; sums exact for D <= 5, N <= 8)");
}

#[test]
fn criterion_09_series_order_fits() {
    let reports = check_asymptotics(&[2, 3], 3).unwrap();
    for report in &reports {
        assert!(report.passed, "{}: {}", report.name, report.detail);
    }
    let gaps: Vec<String> = reports.iter().map(|r| r.detail.clone()).collect();
    println!(
        "criterion 09 series order fits: PASS (exponents within 0.2: {})",
        gaps.join("; ")
    );
}

#[test]
fn criterion_10_bracket_semiclassics() {
    let limit = check_semiclassical(&[4, 8, 16, 32]).unwrap();
    assert!(limit.passed, "{}", limit.detail);
    let sphere = check_sphere_bracket(20);
    assert!(sphere.passed, "{}", sphere.detail);
    println!(
        "criterion 10 bracket semiclassics: PASS ({}; {})",
        limit.detail, sphere.detail
    );
}

#[test]
fn criterion_11_grid_negativity() {
    let report = check_negativity(&[1, 3, 5]).unwrap();
    assert!(report.passed, "{}", report.detail);
    println!("criterion 11 grid negativity: PASS ({})", report.detail);
}

/// The multiplicity weights entering every kernel assembly are the
/// square roots of exact multinomials; spot-check their squares.
#[test]
fn multiplicity_weights_square_to_multinomials() {
    for (d, n) in [(2usize, 3u32), (3, 2)] {
        let params = ModelParams::new(d, n).unwrap();
        let kern = sw_kernel_for(&params).unwrap();
        for (a, occ) in params.fock_indices().iter().enumerate() {
            let m = rat_to_f64(&multinomial_rat(&occ.0));
            assert!((kern.weight(a) * kern.weight(a) - m).abs() < 1e-12 * m);
        }
    }
}

/// Keep the rational helpers honest: a rational phase point converts to
/// floats within rounding.
#[test]
fn rational_point_conversion_is_faithful() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let z = rational_point(&mut rng, 2);
    let _ = RatPoint(z.clone());
    for c in &z {
        let f = to_c64(c);
        assert!((f.re - rat_to_f64(&c.re)).abs() == 0.0);
        assert!((f.im - rat_to_f64(&c.im)).abs() == 0.0);
    }
}
