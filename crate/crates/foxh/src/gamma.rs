//! Complex log-Gamma, polygamma, the integrand factor of the defining
//! Mellin-Barnes integral, and its asymptotic modulus estimates.
//!
//! `log_gamma` is the principal branch (real on the positive axis, branch
//! cut along the non-positive reals), computed by recurrence shift to
//! Re(z) >= 10 followed by the Stirling series with ten Bernoulli terms.
//! Target accuracy is ~1e-13 relative away from the poles.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::HParams;

const LOG_TWO_PI_HALF: f64 = 0.918_938_533_204_672_74; // ln(2*pi)/2
const SHIFT_THRESHOLD: f64 = 10.0;

/// B_{2k} / (2k (2k-1)) for k = 1..=10, the Stirling series coefficients.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43_867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

/// B_{2k} for k = 1..=10.
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43_867.0 / 798.0,
    -174_611.0 / 330.0,
];

/// Whether z sits on a pole of Gamma (a non-positive integer), within the
/// absolute tolerance used throughout the kernel.
pub fn is_gamma_pole(z: Complex64) -> bool {
    z.re <= 0.5 && z.im.abs() < 1e-12 && (z.re - z.re.round()).abs() < 1e-12
}

/// Principal-branch log Gamma. `exp(log_gamma(z))` equals Gamma(z); the
/// imaginary part is continuous off the negative real axis.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if is_gamma_pole(z) {
        return Err(Error::PoleOfGamma(z));
    }
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.re < SHIFT_THRESHOLD {
        shift += w.ln();
        w += 1.0;
    }
    let lw = w.ln();
    let mut series = Complex64::new(0.0, 0.0);
    let w2 = w * w;
    let mut wpow = w;
    for c in STIRLING {
        series += c / wpow;
        wpow *= w2;
    }
    Ok((w - 0.5) * lw - w + LOG_TWO_PI_HALF + series - shift)
}

/// Gamma itself; overflows to infinity for large arguments as f64 does.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    Ok(log_gamma(z)?.exp())
}

/// Reciprocal Gamma, entire: returns exactly zero at the poles of Gamma.
pub fn recip_gamma(z: Complex64) -> Complex64 {
    if is_gamma_pole(z) {
        return Complex64::new(0.0, 0.0);
    }
    match log_gamma(z) {
        Ok(lg) => (-lg).exp(),
        Err(_) => Complex64::new(0.0, 0.0),
    }
}

/// psi^{(order)}(z): digamma and its derivatives, by recurrence shift plus
/// the differentiated Stirling series.
pub fn polygamma(order: u32, z: Complex64) -> Result<Complex64> {
    if is_gamma_pole(z) {
        return Err(Error::PoleOfGamma(z));
    }
    let r = order as i32;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut w = z;
    // psi^{(r)}(z) = psi^{(r)}(z+1) - (-1)^r r! z^{-r-1}
    let sign = if r % 2 == 0 { 1.0 } else { -1.0 };
    let rfact: f64 = (1..=r as u64).map(|k| k as f64).product();
    while w.re < SHIFT_THRESHOLD {
        acc -= sign * rfact * w.powi(-r - 1);
        w += 1.0;
    }
    let tail = if order == 0 {
        let mut s = w.ln() - 0.5 / w;
        let w2 = w * w;
        let mut wpow = w2;
        for (k, b) in BERNOULLI.iter().enumerate() {
            s -= b / ((2 * (k + 1)) as f64 * wpow);
            wpow *= w2;
        }
        s
    } else {
        // (-1)^{r-1} [ (r-1)! w^{-r} + r!/2 w^{-r-1}
        //              + sum_k B_{2k} (2k+r-1)!/(2k)! w^{-2k-r} ]
        let lead_sign = if (r - 1) % 2 == 0 { 1.0 } else { -1.0 };
        let rm1fact: f64 = (1..r as u64).map(|k| k as f64).product();
        let mut s = rm1fact * w.powi(-r) + 0.5 * rfact * w.powi(-r - 1);
        for (k, b) in BERNOULLI.iter().enumerate() {
            let two_k = 2 * (k + 1) as i32;
            // (2k+r-1)! / (2k)!
            let ratio: f64 = ((two_k + 1)..=(two_k + r - 1)).map(|v| v as f64).product();
            s += b * ratio * w.powi(-two_k - r);
        }
        lead_sign * s
    };
    Ok(tail + acc)
}

/// Direction of a horizontal asymptotic estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    PlusInfinity,
    MinusInfinity,
}

/// Which limit the Gamma modulus estimate describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateAxis {
    /// |x| -> infinity along a horizontal line (y fixed).
    HorizontalLimit,
    /// |y| -> infinity along a vertical line (x fixed).
    VerticalLimit,
}

/// Asymptotic estimate of |Gamma(x + iy)|.
///
/// Horizontal: sqrt(2 pi) |x|^{x-1/2} e^{-x - pi (1 - sign x)|y|/2}; the
/// |y| makes the x < 0 branch conjugate-symmetric. Vertical:
/// sqrt(2 pi) |y|^{x-1/2} e^{-pi |y|/2}, the classical handbook form
/// (|Gamma(1/2+iy)|^2 = pi/cosh(pi y) pins it down; an extra e^{-x} factor
/// would be off by exactly e^{-x}).
pub fn gamma_abs_estimate(x: f64, y: f64, axis: EstimateAxis) -> Result<f64> {
    Ok(gamma_abs_estimate_ln(x, y, axis)?.exp())
}

/// Natural log of [`gamma_abs_estimate`]; the modulus itself underflows f64
/// already around |y| ~ 450 on vertical lines.
pub fn gamma_abs_estimate_ln(x: f64, y: f64, axis: EstimateAxis) -> Result<f64> {
    let ln_sqrt_two_pi = 0.5 * (2.0 * std::f64::consts::PI).ln();
    match axis {
        EstimateAxis::HorizontalLimit => {
            if x < 0.0 && y == 0.0 {
                return Err(Error::DomainError(
                    "horizontal estimate needs y != 0 when x < 0".into(),
                ));
            }
            if x == 0.0 {
                return Err(Error::DomainError("horizontal estimate needs x != 0".into()));
            }
            let sign = if x > 0.0 { 1.0 } else { -1.0 };
            Ok(ln_sqrt_two_pi + (x - 0.5) * x.abs().ln()
                - x
                - std::f64::consts::PI * (1.0 - sign) * y.abs() / 2.0)
        }
        EstimateAxis::VerticalLimit => {
            if y == 0.0 {
                return Err(Error::DomainError("vertical estimate needs y != 0".into()));
            }
            Ok(ln_sqrt_two_pi + (x - 0.5) * y.abs().ln() - std::f64::consts::PI * y.abs() / 2.0)
        }
    }
}

/// The obsolete vertical form carrying an extra e^{-x}; kept as a named
/// diagnostic so tests can demonstrate that it misses the true modulus by
/// the factor e^{x}.
pub fn gamma_abs_estimate_vertical_with_exp_x(x: f64, y: f64) -> Result<f64> {
    Ok(gamma_abs_estimate(x, y, EstimateAxis::VerticalLimit)? * (-x).exp())
}

/// Argument of one Gamma factor of the integrand at the point s.
pub(crate) fn factor_argument(params: &HParams, factor: Factor, s: Complex64) -> Complex64 {
    match factor {
        Factor::LowerNum(j) => {
            let g = &params.lower()[j];
            g.value + g.weight * s
        }
        Factor::UpperNum(i) => {
            let g = &params.upper()[i];
            Complex64::new(1.0, 0.0) - g.value - g.weight * s
        }
        Factor::LowerDen(i) => {
            let g = &params.upper()[i];
            g.value + g.weight * s
        }
        Factor::UpperDen(j) => {
            let g = &params.lower()[j];
            Complex64::new(1.0, 0.0) - g.value - g.weight * s
        }
    }
}

/// One Gamma factor of the integrand, identified by its role.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Factor {
    /// Gamma(b_j + beta_j s), j < m (numerator).
    LowerNum(usize),
    /// Gamma(1 - a_i - alpha_i s), i < n (numerator).
    UpperNum(usize),
    /// Gamma(a_i + alpha_i s), n <= i < p (denominator).
    LowerDen(usize),
    /// Gamma(1 - b_j - beta_j s), m <= j < q (denominator).
    UpperDen(usize),
}

pub(crate) fn numerator_factors(params: &HParams) -> Vec<Factor> {
    (0..params.m())
        .map(Factor::LowerNum)
        .chain((0..params.n()).map(Factor::UpperNum))
        .collect()
}

pub(crate) fn denominator_factors(params: &HParams) -> Vec<Factor> {
    (params.n()..params.p())
        .map(Factor::LowerDen)
        .chain((params.m()..params.q()).map(Factor::UpperDen))
        .collect()
}

/// The integrand factor: the ratio of the four Gamma products at s.
/// Numerator poles raise `AtPole`; denominator poles contribute a zero
/// through the reciprocal-Gamma path, so the result is an exact 0 there.
pub fn script_h(params: &HParams, s: Complex64) -> Result<Complex64> {
    let mut log_sum = Complex64::new(0.0, 0.0);
    for f in numerator_factors(params) {
        let w = factor_argument(params, f, s);
        if is_gamma_pole(w) {
            return Err(Error::AtPole(s));
        }
        log_sum += log_gamma(w)?;
    }
    for f in denominator_factors(params) {
        let w = factor_argument(params, f, s);
        if is_gamma_pole(w) {
            return Ok(Complex64::new(0.0, 0.0));
        }
        log_sum -= log_gamma(w)?;
    }
    Ok(log_sum.exp())
}

/// Asymptotic modulus estimate of the integrand factor along a horizontal
/// line, with the direction-specific prefactor (A toward +infinity, B toward
/// -infinity) assembled from the parameter arrays.
#[derive(Debug, Clone)]
pub struct ScriptHEstimate {
    pub prefactor: f64,
    pub direction: Direction,
    delta_cap: f64,
    log_delta_small: f64,
    re_mu: f64,
}

impl ScriptHEstimate {
    /// Evaluates the estimate at distance `t = |t|` along its direction.
    pub fn growth(&self, t: f64) -> f64 {
        debug_assert!(t > 0.0);
        let sign = match self.direction {
            Direction::PlusInfinity => -1.0,
            Direction::MinusInfinity => 1.0,
        };
        // A (e/t)^{-Delta t} delta^{t} t^{Re mu}   (t -> +inf)
        // B (e/t)^{+Delta t} delta^{-t} t^{Re mu}  (t -> -inf)
        let log_growth = sign * self.delta_cap * t * (1.0 - t.ln())
            - sign * t * self.log_delta_small
            + self.re_mu * t.ln();
        self.prefactor * log_growth.exp()
    }
}

/// Assembles the horizontal-asymptotic prefactor for the given ordinate
/// sigma and direction.
pub fn script_h_estimate(params: &HParams, sigma: f64, direction: Direction) -> ScriptHEstimate {
    let pi = std::f64::consts::PI;
    let m = params.m() as f64;
    let n = params.n() as f64;
    let p = params.p() as f64;
    let q = params.q() as f64;
    let mut log_c = (m + n - (p + q) / 2.0) * (2.0 * pi).ln() + (q - m - n);
    for g in params.lower() {
        log_c += (g.value.re - 0.5) * g.weight.ln() - g.value.re;
    }
    for g in params.upper() {
        log_c -= (g.value.re - 0.5) * g.weight.ln() - g.value.re;
    }
    match direction {
        Direction::PlusInfinity => {
            for g in &params.upper()[..params.n()] {
                log_c += pi * (sigma * g.weight + g.value.im);
            }
            for g in &params.lower()[params.m()..] {
                log_c -= pi * (sigma * g.weight + g.value.im);
            }
        }
        Direction::MinusInfinity => {
            for g in &params.upper()[params.n()..] {
                log_c += pi * (sigma * g.weight + g.value.im);
            }
            for g in &params.lower()[..params.m()] {
                log_c -= pi * (sigma * g.weight + g.value.im);
            }
        }
    }
    let inv = params.invariants();
    ScriptHEstimate {
        prefactor: log_c.exp(),
        direction,
        delta_cap: inv.delta_cap,
        log_delta_small: inv.delta_small.ln(),
        re_mu: inv.mu.re,
    }
}

/// Contour description used by the quadrature oracle and the CLI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContourSpec {
    /// Horizontal loop opening toward Re(s) = -infinity between the
    /// ordinates phi1 < phi2.
    LeftLoop { phi1: f64, phi2: f64 },
    /// Horizontal loop opening toward Re(s) = +infinity.
    RightLoop { phi1: f64, phi2: f64 },
    /// Vertical line Re(s) = sigma0, truncated at |Im(s)| = half_height.
    VerticalLine { sigma0: f64, half_height: f64 },
}

impl ContourSpec {
    pub fn vertical(sigma0: f64) -> Self {
        ContourSpec::VerticalLine {
            sigma0,
            half_height: 0.0, // grown adaptively by the oracle
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ContourSpec::LeftLoop { phi1, phi2 } | ContourSpec::RightLoop { phi1, phi2 } => {
                if phi1 < phi2 {
                    Ok(())
                } else {
                    Err(Error::ContourInvalid(format!(
                        "loop ordinates need phi1 < phi2, got {phi1} >= {phi2}"
                    )))
                }
            }
            ContourSpec::VerticalLine { half_height, .. } => {
                if half_height >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::ContourInvalid("negative half height".into()))
                }
            }
        }
    }
}
