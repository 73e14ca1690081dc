//! Acceptance suite: one test per criterion, each pinning its tolerance.
//! Run with `cargo test -p foxh-cli --test acceptance` (the harness prints
//! one pass/fail line per criterion).

use std::time::Instant;

use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use foxh::gamma::{
    gamma_abs_estimate_ln, gamma_abs_estimate_vertical_with_exp_x, log_gamma, script_h,
    script_h_estimate, ContourSpec, Direction, EstimateAxis,
};
use foxh::oracle::{default_residue_radius, quadrature_eval, residue_check};
use foxh::params::{
    classify_existence, CaseTag, HParams, LoopSide, PoleFamily, RawParams,
};
use foxh::reductions::{bessel_k0, find_case};
use foxh::series::{
    coeff_log_a, coeff_log_b, coeff_simple_a, coeff_simple_b, evaluate, leading_term,
    pole_groups, ExpansionPoint,
};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn params(
    m: usize,
    n: usize,
    p: usize,
    q: usize,
    upper: Vec<[f64; 3]>,
    lower: Vec<[f64; 3]>,
) -> HParams {
    HParams::validate(&RawParams {
        m,
        n,
        p,
        q,
        upper,
        lower,
        rational: None,
    })
    .unwrap()
}

fn exp_params() -> HParams {
    params(1, 0, 0, 1, vec![], vec![[0.0, 0.0, 1.0]])
}

/// Criterion 1: the exponential reduction end to end.
/// evaluate of H^{1,0}_{0,1}[(0,1)] matches e^{-z} to 1e-10 relative at 20
/// points with |z| <= 5, in under a second.
#[test]
fn criterion_01_exponential_reduction() {
    const REL_TOL: f64 = 1e-10;
    let start = Instant::now();
    let h = exp_params();
    let mut rng = StdRng::seed_from_u64(1);
    for k in 0..20 {
        let z = if k < 10 {
            re(0.25 + 0.475 * k as f64) // 0.25 .. 4.525
        } else {
            Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0))
        };
        assert!(z.norm() <= 5.0);
        let expect = (-z).exp();
        let got = evaluate(&h, z, 1e-13).unwrap().value;
        assert!(
            (got - expect).norm() <= REL_TOL * expect.norm(),
            "z = {z}: {got} vs {expect}"
        );
    }
    assert!(start.elapsed().as_secs_f64() < 1.0, "runtime budget exceeded");
}

/// Criterion 2: the power-logarithmic path against the independent K_0
/// integral-representation oracle, 1e-8 relative at the four stated points,
/// in under two seconds.
#[test]
fn criterion_02_power_log_bessel_k() {
    const REL_TOL: f64 = 1e-8;
    let start = Instant::now();
    let h = params(2, 0, 0, 2, vec![], vec![[0.0, 0.0, 1.0], [0.0, 0.0, 1.0]]);
    for &z in &[0.04, 0.25, 1.0, 4.0] {
        let oracle = 2.0 * bessel_k0(2.0 * re(z).sqrt());
        let got = evaluate(&h, re(z), 1e-13).unwrap().value;
        assert!(
            (got - oracle).norm() <= REL_TOL * oracle.norm(),
            "z = {z}: {got} vs {oracle}"
        );
    }
    assert!(start.elapsed().as_secs_f64() < 2.0, "runtime budget exceeded");
}

/// Criterion 3: degeneracy of the Leibniz coefficients. Over >= 50
/// randomized simple-pole parameter sets, the order-1 log-coefficient equals
/// the simple-pole coefficient to 1e-12 relative for all shifts <= 5, in
/// both families.
#[test]
fn criterion_03_degeneracy_randomized() {
    const REL_TOL: f64 = 1e-12;
    let mut rng = StdRng::seed_from_u64(42);
    let mut sets = 0usize;
    while sets < 50 {
        let m = rng.gen_range(1..=3usize);
        let n = rng.gen_range(0..=2usize);
        let q = m + rng.gen_range(0..=1usize);
        let p = n + rng.gen_range(0..=1usize);
        // Lower values in (0, 1): their poles stay at Re <= 0. Upper values
        // below 1/2: upper poles stay at Re > 0, so separation holds.
        let lower: Vec<[f64; 3]> = (0..q)
            .map(|_| [rng.gen_range(0.05..0.95), 0.0, rng.gen_range(0.5..2.0)])
            .collect();
        let upper: Vec<[f64; 3]> = (0..p)
            .map(|_| [rng.gen_range(-1.0..0.4), 0.0, rng.gen_range(0.5..2.0)])
            .collect();
        let h = params(m, n, p, q, upper, lower);
        let st = foxh::params::analyze_pole_structure(&h, 8);
        if !(st.separation_ok && st.lower_all_simple && st.upper_all_simple) {
            continue; // continuous draws collide with probability zero
        }
        sets += 1;
        for fam in [PoleFamily::LowerB, PoleFamily::UpperA] {
            for g in pole_groups(&h, fam, 6 * h.family_len(fam) + 6) {
                if g.order() != 1 || g.indices[0].1 > 5 {
                    continue;
                }
                let (idx, shift) = g.indices[0];
                let (log_c, simple) = match fam {
                    PoleFamily::LowerB => (
                        coeff_log_b(&h, &g).unwrap(),
                        coeff_simple_b(&h, idx, shift).unwrap(),
                    ),
                    PoleFamily::UpperA => (
                        coeff_log_a(&h, &g).unwrap(),
                        coeff_simple_a(&h, idx, shift).unwrap(),
                    ),
                };
                assert_eq!(log_c.len(), 1);
                assert!(
                    (log_c[0] - simple).norm() <= REL_TOL * simple.norm().max(1e-300),
                    "set {sets} family {fam:?} idx {idx} shift {shift}"
                );
            }
        }
    }
}

/// Criterion 4: residue-oracle equivalence. Six fixed parameter sets
/// spanning simple, double, and triple pole orders in both families; the
/// coefficient formulas reconstruct the circle integrals at two z values to
/// 1e-8 relative (upper-family contributions carry the minus sign of the
/// right-loop residue sum).
#[test]
fn criterion_04_residue_oracle_equivalence() {
    const REL_TOL: f64 = 1e-8;
    let sets: Vec<(HParams, PoleFamily)> = vec![
        (exp_params(), PoleFamily::LowerB),
        (
            params(1, 1, 1, 1, vec![[0.5, 0.0, 1.0]], vec![[0.0, 0.0, 1.0]]),
            PoleFamily::LowerB,
        ),
        (
            params(2, 0, 0, 2, vec![], vec![[0.0, 0.0, 1.0], [1.0, 0.0, 1.0]]),
            PoleFamily::LowerB,
        ),
        (
            params(0, 2, 2, 0, vec![[1.0, 0.0, 1.0], [0.0, 0.0, 1.0]], vec![]),
            PoleFamily::UpperA,
        ),
        (
            params(
                3,
                0,
                0,
                3,
                vec![],
                vec![[0.0, 0.0, 1.0], [0.0, 0.0, 1.0], [0.0, 0.0, 1.0]],
            ),
            PoleFamily::LowerB,
        ),
        (
            params(
                0,
                3,
                3,
                0,
                vec![[1.0, 0.0, 1.0], [1.0, 0.0, 1.0], [1.0, 0.0, 1.0]],
                vec![],
            ),
            PoleFamily::UpperA,
        ),
    ];
    let mut orders_seen = std::collections::HashSet::new();
    for (h, fam) in &sets {
        for g in pole_groups(h, *fam, 12) {
            if g.indices.iter().map(|&(_, s)| s).min().unwrap() > 3 {
                continue;
            }
            orders_seen.insert((*fam, g.order()));
            let coeffs = match fam {
                PoleFamily::LowerB => coeff_log_b(h, &g).unwrap(),
                PoleFamily::UpperA => coeff_log_a(h, &g).unwrap(),
            };
            let family_sign = match fam {
                PoleFamily::LowerB => 1.0,
                PoleFamily::UpperA => -1.0,
            };
            let radius = default_residue_radius(h, &g);
            for &z in &[re(0.5), re(2.0)] {
                let res = residue_check(h, g.location, radius, z).unwrap();
                let lz = z.ln();
                let mut poly = Complex64::new(0.0, 0.0);
                let mut lp = Complex64::new(1.0, 0.0);
                for c in &coeffs {
                    poly += c * lp;
                    lp *= lz;
                }
                let reconstructed = (g.power() * lz).exp() * poly;
                assert!(
                    (reconstructed - family_sign * res).norm()
                        <= REL_TOL * (1.0 + res.norm()),
                    "family {fam:?} group at {} order {} z {z}: {reconstructed} vs {res}",
                    g.location,
                    g.order()
                );
            }
        }
    }
    for fam in [PoleFamily::LowerB, PoleFamily::UpperA] {
        for order in 1..=3usize {
            assert!(
                orders_seen.contains(&(fam, order)),
                "coverage gap: {fam:?} order {order}"
            );
        }
    }
}

/// Criterion 5: quadrature cross-check. evaluate agrees with the vertical
/// Mellin-Barnes quadrature to 1e-6 relative on four a_star > 0 parameter
/// sets at five z points each; two distinct valid contours agree to 1e-7.
#[test]
fn criterion_05_quadrature_cross_check() {
    const EVAL_TOL: f64 = 1e-6;
    const CONTOUR_TOL: f64 = 1e-7;
    let cases: Vec<(HParams, Vec<Complex64>, [f64; 2])> = vec![
        (
            exp_params(),
            vec![re(0.5), re(1.0), re(2.0), re(3.0), Complex64::new(1.0, 0.5)],
            [0.5, 2.0],
        ),
        (
            params(2, 0, 0, 2, vec![], vec![[0.0, 0.0, 1.0], [0.0, 0.0, 1.0]]),
            vec![re(0.04), re(0.25), re(1.0), re(4.0), Complex64::new(2.0, 1.0)],
            [0.5, 1.5],
        ),
        (
            params(1, 1, 1, 1, vec![[0.5, 0.0, 1.0]], vec![[0.0, 0.0, 1.0]]),
            vec![
                re(0.1),
                re(0.3),
                re(0.5),
                re(0.7),
                Complex64::new(0.2, 0.3),
            ],
            [0.2, 0.35],
        ),
        (
            params(1, 0, 0, 1, vec![], vec![[2.0, 0.0, 1.0]]),
            vec![re(0.5), re(1.0), re(2.0), re(4.0), Complex64::new(1.0, 1.0)],
            [0.5, -1.0],
        ),
    ];
    for (idx, (h, zs, sigmas)) in cases.iter().enumerate() {
        assert!(h.invariants().a_star > 0.0);
        for &z in zs {
            let series = evaluate(h, z, 1e-12).unwrap().value;
            let quad = quadrature_eval(h, z, &ContourSpec::vertical(sigmas[0]))
                .unwrap()
                .value;
            assert!(
                (series - quad).norm() <= EVAL_TOL * (1.0 + quad.norm()),
                "set {idx} z {z}: series {series} vs quadrature {quad}"
            );
            let quad2 = quadrature_eval(h, z, &ContourSpec::vertical(sigmas[1]))
                .unwrap()
                .value;
            assert!(
                (quad - quad2).norm() <= CONTOUR_TOL * (1.0 + quad.norm()),
                "set {idx} z {z}: contours disagree: {quad} vs {quad2}"
            );
        }
    }
}

/// Criterion 6: the vertical Gamma-modulus estimate. The ratio
/// |Gamma(0.7+iy)| / estimate sits in [0.99, 1.01] at |y| = 50 and in
/// [0.999, 1.001] at |y| = 500; the variant carrying an extra e^{-x} misses
/// the band by a factor of about e^{0.7}.
#[test]
fn criterion_06_vertical_gamma_estimate() {
    let x = 0.7;
    for &(y_abs, lo, hi) in &[(50.0, 0.99, 1.01), (500.0, 0.999, 1.001)] {
        for sign in [1.0, -1.0] {
            let y: f64 = sign * y_abs;
            let ln_exact = log_gamma(Complex64::new(x, y)).unwrap().re;
            let ln_est = gamma_abs_estimate_ln(x, y, EstimateAxis::VerticalLimit).unwrap();
            let ratio = (ln_exact - ln_est).exp();
            assert!(
                ratio > lo && ratio < hi,
                "y = {y}: ratio {ratio} outside [{lo}, {hi}]"
            );
        }
    }
    // The e^{-x}-bearing form fails the band by ~e^{0.7} = 2.0138.
    let y = 50.0;
    let exact = log_gamma(Complex64::new(x, y)).unwrap().re.exp();
    let with_exp_x = gamma_abs_estimate_vertical_with_exp_x(x, y).unwrap();
    let bad_ratio = exact / with_exp_x;
    assert!(bad_ratio > 1.01 || bad_ratio < 0.99);
    assert!((bad_ratio / x.exp() - 1.0).abs() < 0.01, "{bad_ratio}");
}

/// Criterion 7: horizontal integrand estimates. For three fixed parameter
/// sets the ratio |scriptH(t + i sigma)| / growth(|t|) lies in [0.9, 1.1]
/// at half-integer |t| in {30.5, 40.5, 60.5}, in both directions.
#[test]
fn criterion_07_script_h_estimate_bands() {
    let sets: Vec<(HParams, f64)> = vec![
        (exp_params(), 1.0),
        (
            params(
                1,
                1,
                2,
                2,
                vec![[0.25, -1.0, 1.0], [0.25, 1.0, 1.0]],
                vec![[0.25, 1.0, 1.0], [0.25, -1.0, 1.0]],
            ),
            0.0,
        ),
        (
            params(2, 0, 0, 2, vec![], vec![[-0.25, 0.0, 1.0], [0.25, 0.0, 1.0]]),
            1.5,
        ),
    ];
    for (idx, (h, sigma)) in sets.iter().enumerate() {
        for direction in [Direction::PlusInfinity, Direction::MinusInfinity] {
            let est = script_h_estimate(h, *sigma, direction);
            for &t_abs in &[30.5f64, 40.5, 60.5] {
                let t = match direction {
                    Direction::PlusInfinity => t_abs,
                    Direction::MinusInfinity => -t_abs,
                };
                let v = script_h(h, Complex64::new(t, *sigma)).unwrap().norm();
                let ratio = v / est.growth(t_abs);
                assert!(
                    (0.9..=1.1).contains(&ratio),
                    "set {idx} dir {direction:?} t {t}: ratio {ratio}"
                );
            }
        }
    }
}

/// Criterion 8: the existence truth table. All six convergence cases, the
/// boundary rule Re(mu) < -1 in both the granting and refusing direction,
/// z = 0, and wrong-contour requests.
#[test]
fn criterion_08_existence_truth_table() {
    let delta_pos = exp_params(); // Delta = 1
    let delta_neg = params(0, 1, 1, 0, vec![[1.0, 0.0, 1.0]], vec![]); // Delta = -1
    let delta_zero = params(1, 1, 1, 1, vec![[0.5, 0.0, 1.0]], vec![[0.0, 0.0, 1.0]]); // mu = -1/2
    let delta_zero_mu = params(1, 0, 1, 1, vec![[2.0, 0.0, 1.0]], vec![[0.0, 0.0, 1.0]]); // mu = -2

    struct Row {
        h: &'static str,
        z: Complex64,
        request: Option<LoopSide>,
        exists: bool,
        case: Option<CaseTag>,
        boundary: bool,
    }
    let table = [
        // Left loop, Delta > 0, any z != 0.
        Row { h: "pos", z: re(1.0), request: Some(LoopSide::Left), exists: true, case: Some(CaseTag::LeftAllZ), boundary: false },
        Row { h: "pos", z: Complex64::new(-3.0, 7.0), request: None, exists: true, case: Some(CaseTag::LeftAllZ), boundary: false },
        Row { h: "pos", z: re(1.0), request: Some(LoopSide::Right), exists: false, case: None, boundary: false },
        // Left loop, Delta = 0, 0 < |z| < delta.
        Row { h: "zero", z: re(0.5), request: Some(LoopSide::Left), exists: true, case: Some(CaseTag::LeftInsideDisk), boundary: false },
        Row { h: "zero", z: re(0.5), request: Some(LoopSide::Right), exists: false, case: None, boundary: false },
        // Left loop, Delta = 0, |z| = delta, Re(mu) < -1.
        Row { h: "zeromu", z: re(1.0), request: Some(LoopSide::Left), exists: true, case: Some(CaseTag::LeftBoundary), boundary: true },
        Row { h: "zero", z: re(1.0), request: Some(LoopSide::Left), exists: false, case: None, boundary: true },
        // Right loop, Delta < 0, any z != 0.
        Row { h: "neg", z: re(2.0), request: Some(LoopSide::Right), exists: true, case: Some(CaseTag::RightAllZ), boundary: false },
        Row { h: "neg", z: re(2.0), request: Some(LoopSide::Left), exists: false, case: None, boundary: false },
        // Right loop, Delta = 0, |z| > delta.
        Row { h: "zero", z: re(2.0), request: Some(LoopSide::Right), exists: true, case: Some(CaseTag::RightOutsideDisk), boundary: false },
        Row { h: "zero", z: re(2.0), request: Some(LoopSide::Left), exists: false, case: None, boundary: false },
        // Right loop, Delta = 0, |z| = delta, Re(mu) < -1.
        Row { h: "zeromu", z: re(-1.0), request: Some(LoopSide::Right), exists: true, case: Some(CaseTag::RightBoundary), boundary: true },
        Row { h: "zero", z: re(1.0), request: Some(LoopSide::Right), exists: false, case: None, boundary: true },
        // z = 0 never exists.
        Row { h: "pos", z: re(0.0), request: None, exists: false, case: None, boundary: false },
        Row { h: "zeromu", z: re(0.0), request: Some(LoopSide::Left), exists: false, case: None, boundary: false },
    ];
    for (i, row) in table.iter().enumerate() {
        let h = match row.h {
            "pos" => &delta_pos,
            "neg" => &delta_neg,
            "zero" => &delta_zero,
            "zeromu" => &delta_zero_mu,
            _ => unreachable!(),
        };
        // z = 0 short-circuits before the boundary tolerance applies.
        let v = classify_existence(h, row.z, row.request);
        assert_eq!(v.exists, row.exists, "row {i}");
        assert_eq!(v.case, row.case, "row {i}");
        assert_eq!(v.boundary_case, row.boundary, "row {i}");
    }
    // The requested-contour invariants of the two unconditional cases.
    for &z in &[re(0.1), re(5.0), Complex64::new(-2.0, 0.7)] {
        assert!(classify_existence(&delta_pos, z, Some(LoopSide::Left)).exists);
        assert!(classify_existence(&delta_neg, z, Some(LoopSide::Right)).exists);
    }
}

/// Criterion 9: leading-term decay. Four cases covering the simple and
/// coincident corollaries about zero and infinity; a two-point check at
/// |z| in {1e-3, 1e-4} (or {1e3, 1e4}) confirms exponent and log-power.
#[test]
fn criterion_09_leading_term_decay() {
    struct Case {
        h: HParams,
        regime: ExpansionPoint,
        zs: [f64; 2],
        expect_log_power: u32,
        expect_exponent: Complex64,
        expect_coeff: Complex64,
    }
    let cases = vec![
        // Simple poles about zero: e^{-z} -> 1.
        Case {
            h: exp_params(),
            regime: ExpansionPoint::Zero,
            zs: [1e-3, 1e-4],
            expect_log_power: 0,
            expect_exponent: re(0.0),
            expect_coeff: re(1.0),
        },
        // Simple poles about infinity: e^{-1/z} -> 1.
        Case {
            h: params(0, 1, 1, 0, vec![[1.0, 0.0, 1.0]], vec![]),
            regime: ExpansionPoint::Infinity,
            zs: [1e3, 1e4],
            expect_log_power: 0,
            expect_exponent: re(0.0),
            expect_coeff: re(1.0),
        },
        // Coincident poles about zero: 2K_0(2 sqrt z) ~ -log z.
        Case {
            h: params(2, 0, 0, 2, vec![], vec![[0.0, 0.0, 1.0], [0.0, 0.0, 1.0]]),
            regime: ExpansionPoint::Zero,
            zs: [1e-3, 1e-4],
            expect_log_power: 1,
            expect_exponent: re(0.0),
            expect_coeff: re(-1.0),
        },
        // Coincident poles about infinity: 2K_0(2/sqrt z) ~ +log z.
        Case {
            h: params(0, 2, 2, 0, vec![[1.0, 0.0, 1.0], [1.0, 0.0, 1.0]], vec![]),
            regime: ExpansionPoint::Infinity,
            zs: [1e3, 1e4],
            expect_log_power: 1,
            expect_exponent: re(0.0),
            expect_coeff: re(1.0),
        },
    ];
    for (i, c) in cases.iter().enumerate() {
        let t = leading_term(&c.h, c.regime).unwrap();
        assert_eq!(t.log_power, c.expect_log_power, "case {i}");
        assert!((t.exponent - c.expect_exponent).norm() < 1e-12, "case {i}");
        assert!(
            (t.coefficient - c.expect_coeff).norm() < 1e-10,
            "case {i}: {}",
            t.coefficient
        );
        let rel_resid = |zv: f64| -> f64 {
            let z = re(zv);
            let lz = z.ln();
            let term = t.coefficient * (t.exponent * lz).exp() * lz.powu(t.log_power);
            let val = evaluate(&c.h, z, 1e-13).unwrap().value;
            (val - term).norm() / term.norm()
        };
        let r1 = rel_resid(c.zs[0]);
        let r2 = rel_resid(c.zs[1]);
        assert!(r1 < 0.25, "case {i}: first-point residual {r1}");
        assert!(r2 < r1, "case {i}: residual not decreasing ({r1} -> {r2})");
        assert!(r2 <= 0.8 * r1, "case {i}: decay too slow ({r1} -> {r2})");
    }
}

/// Criterion 10: CLI determinism. Identical invocations over the full
/// corpus (plus selftest and an expansion dump) produce byte-identical
/// output.
#[test]
fn criterion_10_cli_determinism() {
    let bin = env!("CARGO_BIN_EXE_foxh");
    let run_once = || -> Vec<u8> {
        let mut all = Vec::new();
        for case in foxh::reductions::corpus() {
            let raw = serde_json::to_string(&case.params.to_raw()).unwrap();
            let zs: Vec<String> = case
                .reference_points
                .iter()
                .map(|(z, _)| format!("[{},{}]", z.re, z.im))
                .collect();
            let out = std::process::Command::new(bin)
                .args(["eval", "--params-json", &raw, "--z", &zs.join(",")])
                .output()
                .unwrap();
            assert!(
                out.status.success(),
                "{}: {}",
                case.id,
                String::from_utf8_lossy(&out.stdout)
            );
            all.extend_from_slice(&out.stdout);
            let out = std::process::Command::new(bin)
                .args(["expand", "--params-json", &raw, "--max-shift", "6"])
                .output()
                .unwrap();
            assert!(out.status.success());
            all.extend_from_slice(&out.stdout);
            let out = std::process::Command::new(bin)
                .args([
                    "classify",
                    "--params-json",
                    &raw,
                    "--z",
                    "0.5",
                    "--verbose",
                ])
                .output()
                .unwrap();
            assert!(out.status.success());
            all.extend_from_slice(&out.stdout);
        }
        let out = std::process::Command::new(bin).arg("selftest").output().unwrap();
        assert!(out.status.success());
        all.extend_from_slice(&out.stdout);
        all
    };
    let first = run_once();
    let second = run_once();
    assert!(!first.is_empty());
    assert_eq!(first, second, "CLI output differs between identical runs");
}

/// Beyond the numbered criteria: the corpus invariant that ties the CLI's
/// selftest to the library (kept here so the acceptance target exercises
/// find_case and the published validity grids directly).
#[test]
fn corpus_validity_grids_within_tolerance() {
    for case in foxh::reductions::corpus() {
        let found = find_case(&case.id).unwrap();
        for &(z, _) in &found.reference_points {
            let closed = found.closed_form(z).unwrap();
            let got = evaluate(&found.params, z, 1e-12).unwrap().value;
            assert!(
                (got - closed).norm() <= 1e-9 * (1.0 + closed.norm()),
                "{} at {z}",
                case.id
            );
        }
    }
}
