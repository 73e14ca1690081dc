//! Structural stress tests beyond the corpus: interleaved pole families,
//! complex parameters, non-unit weights with fractional powers off the
//! positive axis, and mixed simple/coincident expansions. Reference values
//! are frozen from 25-digit computations of the named closed forms.

use num_complex::Complex64;

use foxh::gamma::ContourSpec;
use foxh::oracle::quadrature_eval;
use foxh::params::{HParams, PoleFamily, RawParams};
use foxh::series::{evaluate, expand_near_zero, pole_groups};

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

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn interleaved_simple_families_match_closed_form() {
    // Two unit-weight factors offset by 1/2: the pole sequences alternate
    // along the negative axis, and the sum telescopes to
    // sqrt(pi) z^{-1/4} e^{-2 sqrt z}.
    let h = params(2, 0, 0, 2, vec![], vec![[0.25, 0.0, 1.0], [-0.25, 0.0, 1.0]]);
    let refs = [
        (c(0.3, 0.0), c(0.80084571095014163, 0.0)),
        (c(1.7, 0.0), c(0.11440928028869777, 0.0)),
        (c(0.5, 0.4), c(0.33516885033382507, -0.28140795941513159)),
    ];
    for &(z, expect) in &refs {
        let got = evaluate(&h, z, 1e-13).unwrap().value;
        assert!(
            (got - expect).norm() <= 1e-10 * (1.0 + expect.norm()),
            "z = {z}: {got} vs {expect}"
        );
    }
    // Groups really do alternate between the two factors.
    let first_four = pole_groups(&h, PoleFamily::LowerB, 4);
    let owners: Vec<usize> = first_four.iter().map(|g| g.indices[0].0).collect();
    assert_eq!(owners, vec![1, 0, 1, 0]);
}

#[test]
fn conjugate_complex_parameters_give_real_values() {
    // A conjugate pair of complex parameters: the value on the positive
    // axis is real (a modified Bessel function of imaginary order).
    let h = params(
        2,
        0,
        0,
        2,
        vec![],
        vec![[0.25, 0.3, 1.0], [0.25, -0.3, 1.0]],
    );
    let refs = [
        (c(0.5, 0.0), 0.36381719331572651),
        (c(2.0, 0.0), 0.095396399902480359),
    ];
    for &(z, expect) in &refs {
        let got = evaluate(&h, z, 1e-13).unwrap().value;
        assert!(
            (got.re - expect).abs() <= 1e-10 * (1.0 + expect.abs()),
            "z = {z}: {got} vs {expect}"
        );
        assert!(got.im.abs() < 1e-12, "imaginary residue at {z}: {got}");
    }
    // And the independent quadrature agrees.
    let q = quadrature_eval(&h, c(0.5, 0.0), &ContourSpec::vertical(0.5))
        .unwrap()
        .value;
    assert!((q.re - refs[0].1).abs() < 1e-7);
}

#[test]
fn fractional_powers_use_principal_branch_off_axis() {
    // H^{1,0}_{0,1}[(1/4,1/2)](z) = 2 sqrt(z) e^{-z^2} with the principal
    // square root; checked at complex arguments in both half-planes.
    let h = params(1, 0, 0, 1, vec![], vec![[0.25, 0.0, 0.5]]);
    let refs = [
        (c(-1.0, 0.2), c(-0.22949692173327967, 0.73849344716112406)),
        (c(0.3, -1.1), c(6.5450457307197841, 0.050580211695456187)),
    ];
    for &(z, expect) in &refs {
        let got = evaluate(&h, z, 1e-13).unwrap().value;
        assert!(
            (got - expect).norm() <= 1e-10 * (1.0 + expect.norm()),
            "z = {z}: {got} vs {expect}"
        );
    }
}

#[test]
fn mixed_simple_and_coincident_groups_cross_check_quadrature() {
    // Double poles at the integers, simple poles at the half-integers: the
    // expansion mixes plain and logarithmic terms, and the independent
    // line quadrature must agree (a_star = 3).
    let h = params(
        3,
        0,
        0,
        3,
        vec![],
        vec![[0.0, 0.0, 1.0], [0.0, 0.0, 1.0], [0.5, 0.0, 1.0]],
    );
    let groups = pole_groups(&h, PoleFamily::LowerB, 4);
    assert!(groups.iter().any(|g| g.order() == 2));
    assert!(groups.iter().any(|g| g.order() == 1));
    let exp = expand_near_zero(&h, 2).unwrap();
    assert!(exp.terms.iter().any(|t| t.log_power == 1));
    assert!(exp
        .terms
        .iter()
        .any(|t| t.log_power == 0 && (t.power.re - 0.5).abs() < 1e-12));
    for &z in &[c(0.4, 0.0), c(1.3, 0.0), c(0.5, 0.5)] {
        let series = evaluate(&h, z, 1e-12).unwrap().value;
        let quad = quadrature_eval(&h, z, &ContourSpec::vertical(0.4))
            .unwrap()
            .value;
        assert!(
            (series - quad).norm() <= 1e-7 * (1.0 + quad.norm()),
            "z = {z}: {series} vs {quad}"
        );
    }
}

#[test]
fn complex_parameters_cross_check_quadrature() {
    // Fully complex parameter set on both sides, validated purely by the
    // two independent evaluation routes agreeing. Delta = 0, delta = 1, so
    // the series converges inside the unit disk.
    let h = params(
        1,
        1,
        1,
        1,
        vec![[0.4, 0.7, 1.0]],
        vec![[0.2, -0.4, 1.0]],
    );
    assert!(h.invariants().a_star > 0.0);
    for &z in &[c(0.4, 0.0), c(0.3, 0.3), c(-0.5, 0.2)] {
        let series = evaluate(&h, z, 1e-12).unwrap().value;
        let quad = quadrature_eval(&h, z, &ContourSpec::vertical(0.2))
            .unwrap()
            .value;
        assert!(
            (series - quad).norm() <= 1e-7 * (1.0 + quad.norm()),
            "z = {z}: {series} vs {quad}"
        );
    }
}

#[test]
fn quadrature_rejects_zero_argument() {
    let h = params(1, 0, 0, 1, vec![], vec![[0.0, 0.0, 1.0]]);
    let err = quadrature_eval(&h, c(0.0, 0.0), &ContourSpec::vertical(1.0)).unwrap_err();
    assert_eq!(err.kind(), "ZeroArgument");
}

/// Broad randomized consistency sweep (slower; run with `-- --ignored`):
/// on random parameter sets whose pole families are separated by a vertical
/// line, the residue series and the line quadrature must agree wherever
/// both apply.
#[test]
#[ignore]
fn randomized_series_quadrature_sweep() {
    let mut state = 0x1234_5678_9abc_def0u64;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut checked = 0usize;
    let mut attempts = 0usize;
    while checked < 60 && attempts < 2000 {
        attempts += 1;
        let m = 1 + (next() * 2.0) as usize;
        let n = (next() * 2.0) as usize;
        let q = m + (next() * 1.5) as usize;
        let p = n + (next() * 1.5) as usize;
        let lower: Vec<[f64; 3]> = (0..q)
            .map(|_| [0.05 + 0.9 * next(), 0.0, 0.5 + 1.5 * next()])
            .collect();
        let upper: Vec<[f64; 3]> = (0..p)
            .map(|_| [-0.5 + 0.9 * next(), 0.0, 0.5 + 1.5 * next()])
            .collect();
        let h = params(m, n, p, q, upper, lower);
        let inv = h.invariants();
        if inv.a_star <= 0.5 {
            continue;
        }
        let st = foxh::params::analyze_pole_structure(&h, 8);
        if !st.separation_ok {
            continue;
        }
        let sigma0 = match foxh::oracle::auto_vertical_abscissa(&h) {
            Ok(s) => s,
            Err(_) => continue,
        };
        // Pick z inside whatever domain the classification grants.
        let z = if inv.delta_is_zero() {
            c(0.3 * inv.delta_small + 0.4 * inv.delta_small * next(), 0.0)
        } else if inv.delta_cap > 0.0 {
            c(0.2 + 2.0 * next(), 0.0)
        } else {
            c(1.5 + 3.0 * next(), 0.0)
        };
        if !foxh::params::classify_existence(&h, z, None).exists {
            continue;
        }
        let series = match evaluate(&h, z, 1e-12) {
            Ok(r) => r.value,
            Err(foxh::Error::NoConvergence(_)) => continue,
            Err(e) => panic!("evaluate failed on set {attempts}: {e}"),
        };
        let quad = match quadrature_eval(&h, z, &ContourSpec::vertical(sigma0)) {
            Ok(r) => r.value,
            Err(foxh::Error::SlowDecay(_)) => continue,
            Err(e) => panic!("quadrature failed on set {attempts}: {e}"),
        };
        assert!(
            (series - quad).norm() <= 1e-6 * (1.0 + quad.norm()),
            "set {attempts} (m={m},n={n},p={p},q={q}) at z={z}: {series} vs {quad}"
        );
        checked += 1;
    }
    assert!(checked >= 50, "only {checked} sets exercised");
}
