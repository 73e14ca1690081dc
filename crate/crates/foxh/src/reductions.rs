//! A fixed corpus of instances with independently known closed forms, used
//! as end-to-end ground truth.
//!
//! The corpus ships as JSON (id, parameters, validity, frozen reference
//! points) plus closed-form evaluators keyed by id. The Bessel references
//! are computed from integral representations that share no code with the
//! series evaluator or the Mellin-Barnes oracles.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::params::{HParams, RawParams};

/// Domain on which a corpus case's closed form (and the identity defining
/// it) is valid.
#[derive(Debug, Clone, PartialEq)]
pub enum CaseValidity {
    AllZ,
    NonzeroZ,
    InsideDisk { radius: f64 },
    /// Everything except the closed negative real axis (branch cut of the
    /// square root feeding K_0).
    OffNegativeAxis,
}

impl CaseValidity {
    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            CaseValidity::AllZ => true,
            CaseValidity::NonzeroZ => z != Complex64::new(0.0, 0.0),
            CaseValidity::InsideDisk { radius } => z.norm() < *radius,
            CaseValidity::OffNegativeAxis => !(z.im == 0.0 && z.re <= 0.0),
        }
    }
}

/// One corpus entry.
#[derive(Debug, Clone)]
pub struct KnownCase {
    pub id: String,
    pub params: HParams,
    pub validity: CaseValidity,
    pub provenance: String,
    /// (z, reference value) pairs frozen from high-precision computation.
    pub reference_points: Vec<(Complex64, Complex64)>,
}

impl KnownCase {
    /// The closed-form value at z (validity-checked).
    pub fn closed_form(&self, z: Complex64) -> Result<Complex64> {
        if !self.validity.contains(z) {
            return Err(Error::OutOfDomain(format!(
                "z = {z} outside the validity domain of case {:?}",
                self.id
            )));
        }
        Ok(match self.id.as_str() {
            "exp" => (-z).exp(),
            "power_exp" => z * z * (-z).exp(),
            "bessel_j0" => bessel_j0(2.0 * z.sqrt()),
            "bessel_k" => 2.0 * bessel_k0(2.0 * z.sqrt()),
            "exp_mirror" => (-1.0 / z).exp(),
            "sqrt_binom" => {
                std::f64::consts::PI.sqrt() / (Complex64::new(1.0, 0.0) + z).sqrt()
            }
            other => return Err(Error::UnknownCase(other.into())),
        })
    }
}

#[derive(Deserialize)]
struct RawCase {
    id: String,
    params: RawParams,
    validity: RawValidity,
    provenance: String,
    reference_points: Vec<[f64; 4]>,
}

#[derive(Deserialize)]
struct RawValidity {
    kind: String,
    #[serde(default)]
    radius: Option<f64>,
}

static CORPUS: OnceLock<Vec<KnownCase>> = OnceLock::new();

/// The corpus, parsed once from the embedded JSON.
pub fn corpus() -> &'static [KnownCase] {
    CORPUS.get_or_init(|| {
        let raw: Vec<RawCase> =
            serde_json::from_str(include_str!("../data/corpus.json")).expect("corpus JSON");
        raw.into_iter()
            .map(|c| {
                let validity = match c.validity.kind.as_str() {
                    "all_z" => CaseValidity::AllZ,
                    "nonzero_z" => CaseValidity::NonzeroZ,
                    "inside_disk" => CaseValidity::InsideDisk {
                        radius: c.validity.radius.expect("radius"),
                    },
                    "off_negative_axis" => CaseValidity::OffNegativeAxis,
                    other => panic!("unknown validity kind {other:?}"),
                };
                KnownCase {
                    id: c.id,
                    params: HParams::validate(&c.params).expect("corpus params"),
                    validity,
                    provenance: c.provenance,
                    reference_points: c
                        .reference_points
                        .iter()
                        .map(|p| (Complex64::new(p[0], p[1]), Complex64::new(p[2], p[3])))
                        .collect(),
                }
            })
            .collect()
    })
}

pub fn find_case(id: &str) -> Result<&'static KnownCase> {
    corpus()
        .iter()
        .find(|c| c.id == id)
        .ok_or_else(|| Error::UnknownCase(id.into()))
}

/// Closed-form value of the corpus case `id` at z.
pub fn known_case_value(id: &str, z: Complex64) -> Result<Complex64> {
    find_case(id)?.closed_form(z)
}

/// Positive nodes/weights of 16-point Gauss-Legendre on (-1, 1); local copy
/// so the reference integrals stay independent of the oracle module.
const GL_NODES: [f64; 8] = [
    0.0950125098376374,
    0.2816035507792589,
    0.4580167776572274,
    0.6178762444026438,
    0.7554044083550030,
    0.8656312023878318,
    0.9445750230732326,
    0.9894009349916499,
];
const GL_WEIGHTS: [f64; 8] = [
    0.1894506104550685,
    0.1826034150449236,
    0.1691565193950025,
    0.1495959888165767,
    0.1246289712555339,
    0.0951585116824928,
    0.0622535239386479,
    0.0271524594117541,
];

/// K_0 by its integral representation: the integral over t >= 0 of
/// e^{-x cosh t}, for Re(x) > 0. Truncated where the integrand underflows,
/// composite 16-point Gauss panels of length <= 1/4.
pub fn bessel_k0(x: Complex64) -> Complex64 {
    assert!(x.re > 0.0, "K_0 integral needs Re(x) > 0");
    let t_max = (750.0 / x.re).acosh().max(1.0);
    let panels = (t_max / 0.25).ceil() as usize;
    let h = t_max / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for (xi, w) in GL_NODES.iter().zip(GL_WEIGHTS.iter()) {
            let dt = xi * 0.5 * h;
            for t in [mid + dt, mid - dt] {
                acc += w * (-x * t.cosh()).exp();
            }
        }
    }
    acc * 0.5 * h
}

/// J_0 by its integral representation: (1/pi) times the integral over
/// (0, pi) of cos(x sin theta). The integrand is smooth and pi-periodic, so
/// the trapezoid sum converges spectrally; the node count doubles until two
/// sums agree.
pub fn bessel_j0(x: Complex64) -> Complex64 {
    let mut n = 32usize;
    let mut prev: Option<Complex64> = None;
    loop {
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let theta = std::f64::consts::PI * (k as f64 + 0.5) / n as f64;
            acc += (x * theta.sin()).cos();
        }
        let estimate = acc / n as f64;
        if let Some(p) = prev {
            if (estimate - p).norm() <= 1e-13 * (1.0 + estimate.norm()) || n >= 4096 {
                return estimate;
            }
        }
        prev = Some(estimate);
        n *= 2;
    }
}
