//! Parameter model: the orders m, n, p, q and parameter arrays, the derived
//! invariants, pole enumeration and grouping, and the existence classifier.
//!
//! Pole-equality policy: when both parameters of a candidate pair carry exact
//! rational real parts, coincidence is decided exactly by cross-multiplication
//! (weights are finite doubles and therefore exact rationals already);
//! otherwise two poles coincide when their distance is at most
//! `POLE_EQ_TOL * (1 + |location|)`.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance of the floating-point pole-equality policy.
pub const POLE_EQ_TOL: f64 = 1e-12;

/// Default shift horizon for pole enumeration and series truncation.
pub const DEFAULT_MAX_SHIFT: u32 = 64;

fn rat(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}

/// One Gamma-factor parameter pair: `a_i` with weight `alpha_i`, or `b_j`
/// with weight `beta_j`. The weight is required to be positive. An exact
/// rational real part may be attached for exact pole arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaParam {
    pub value: Complex64,
    pub weight: f64,
    pub exact_re: Option<BigRational>,
}

impl GammaParam {
    pub fn new(value: Complex64, weight: f64) -> Self {
        GammaParam {
            value,
            weight,
            exact_re: None,
        }
    }

    /// Real part as an exact rational: the attached metadata if present,
    /// otherwise the exact rational value of the double itself.
    fn re_rational(&self) -> BigRational {
        self.exact_re.clone().unwrap_or_else(|| rat(self.value.re))
    }
}

/// The H-function parameter set.
///
/// `upper` holds the p pairs (a_i, alpha_i); its first `n` entries feed the
/// numerator factors `Gamma(1 - a_i - alpha_i s)`. `lower` holds the q pairs
/// (b_j, beta_j); its first `m` entries feed the numerator factors
/// `Gamma(b_j + beta_j s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HParams {
    m: usize,
    n: usize,
    p: usize,
    q: usize,
    upper: Vec<GammaParam>,
    lower: Vec<GammaParam>,
}

/// Raw JSON form: `{"m":..,"n":..,"p":..,"q":..,"upper":[[re,im,alpha],..],
/// "lower":[[re,im,beta],..],"rational":{"upper_re":[..],"lower_re":[..]}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawParams {
    pub m: usize,
    pub n: usize,
    pub p: usize,
    pub q: usize,
    #[serde(default)]
    pub upper: Vec<[f64; 3]>,
    #[serde(default)]
    pub lower: Vec<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rational: Option<RationalBlock>,
}

/// Optional exact real parts, entries like `"1/2"`, `"-3"`, or null.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RationalBlock {
    #[serde(default)]
    pub upper_re: Vec<Option<String>>,
    #[serde(default)]
    pub lower_re: Vec<Option<String>>,
}

fn parse_fraction(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::BadInput(format!("bad rational {t:?}")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::BadInput(format!("bad rational {t:?}")))?;
    if den.is_zero() {
        return Err(Error::BadInput(format!("zero denominator in {t:?}")));
    }
    Ok(BigRational::new(num, den))
}

impl HParams {
    /// Validates a raw parameter set against the structural constraints:
    /// 0 <= m <= q, 0 <= n <= p, positive weights, matching array lengths.
    pub fn validate(raw: &RawParams) -> Result<HParams> {
        if raw.m > raw.q {
            return Err(Error::OrderViolation(format!(
                "m = {} exceeds q = {}",
                raw.m, raw.q
            )));
        }
        if raw.n > raw.p {
            return Err(Error::OrderViolation(format!(
                "n = {} exceeds p = {}",
                raw.n, raw.p
            )));
        }
        if raw.upper.len() != raw.p {
            return Err(Error::LengthMismatch(format!(
                "upper has {} entries, expected p = {}",
                raw.upper.len(),
                raw.p
            )));
        }
        if raw.lower.len() != raw.q {
            return Err(Error::LengthMismatch(format!(
                "lower has {} entries, expected q = {}",
                raw.lower.len(),
                raw.q
            )));
        }
        let build = |entries: &[[f64; 3]], side: &str| -> Result<Vec<GammaParam>> {
            entries
                .iter()
                .enumerate()
                .map(|(i, e)| {
                    if !(e[2] > 0.0) || !e[2].is_finite() {
                        return Err(Error::NonPositiveWeight(format!(
                            "{side}[{i}] weight {} must be positive",
                            e[2]
                        )));
                    }
                    if !e[0].is_finite() || !e[1].is_finite() {
                        return Err(Error::BadInput(format!("{side}[{i}] is not finite")));
                    }
                    Ok(GammaParam::new(Complex64::new(e[0], e[1]), e[2]))
                })
                .collect()
        };
        let mut upper = build(&raw.upper, "upper")?;
        let mut lower = build(&raw.lower, "lower")?;
        if let Some(block) = &raw.rational {
            attach_exact(&mut upper, &block.upper_re, raw.p, "upper_re")?;
            attach_exact(&mut lower, &block.lower_re, raw.q, "lower_re")?;
        }
        Ok(HParams {
            m: raw.m,
            n: raw.n,
            p: raw.p,
            q: raw.q,
            upper,
            lower,
        })
    }

    pub fn from_json_str(s: &str) -> Result<HParams> {
        let raw: RawParams =
            serde_json::from_str(s).map_err(|e| Error::BadInput(format!("params JSON: {e}")))?;
        HParams::validate(&raw)
    }

    pub fn to_raw(&self) -> RawParams {
        let enc = |v: &[GammaParam]| {
            v.iter()
                .map(|g| [g.value.re, g.value.im, g.weight])
                .collect()
        };
        let has_exact =
            |v: &[GammaParam]| v.iter().any(|g| g.exact_re.is_some());
        let rational = if has_exact(&self.upper) || has_exact(&self.lower) {
            let enc_r = |v: &[GammaParam]| {
                v.iter()
                    .map(|g| g.exact_re.as_ref().map(|r| r.to_string()))
                    .collect()
            };
            Some(RationalBlock {
                upper_re: enc_r(&self.upper),
                lower_re: enc_r(&self.lower),
            })
        } else {
            None
        };
        RawParams {
            m: self.m,
            n: self.n,
            p: self.p,
            q: self.q,
            upper: enc(&self.upper),
            lower: enc(&self.lower),
            rational,
        }
    }

    /// Drops all exact rational metadata (float-only pole arithmetic).
    pub fn without_exact(mut self) -> HParams {
        for g in self.upper.iter_mut().chain(self.lower.iter_mut()) {
            g.exact_re = None;
        }
        self
    }

    pub fn m(&self) -> usize {
        self.m
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn p(&self) -> usize {
        self.p
    }
    pub fn q(&self) -> usize {
        self.q
    }
    pub fn upper(&self) -> &[GammaParam] {
        &self.upper
    }
    pub fn lower(&self) -> &[GammaParam] {
        &self.lower
    }

    /// Number of numerator factors in the given family.
    pub fn family_len(&self, family: PoleFamily) -> usize {
        match family {
            PoleFamily::LowerB => self.m,
            PoleFamily::UpperA => self.n,
        }
    }

    pub(crate) fn family_param(&self, family: PoleFamily, idx: usize) -> &GammaParam {
        match family {
            PoleFamily::LowerB => &self.lower[idx],
            PoleFamily::UpperA => &self.upper[idx],
        }
    }

    /// Swaps the roles of the upper and lower parameter arrays (and of m, n).
    /// The invariant Delta changes sign under this operation.
    pub fn role_swapped(&self) -> HParams {
        HParams {
            m: self.n,
            n: self.m,
            p: self.q,
            q: self.p,
            upper: self.lower.clone(),
            lower: self.upper.clone(),
        }
    }

    /// Exchanges the numerator and denominator Gamma products symmetrically:
    /// every parameter value v becomes 1 - v and the numerator blocks swap
    /// with the denominator blocks of the same side. The integrand factor of
    /// the result at -s is the reciprocal of the original at s.
    pub fn numerator_denominator_swapped(&self) -> HParams {
        let flip = |g: &GammaParam| GammaParam {
            value: Complex64::new(1.0 - g.value.re, -g.value.im),
            weight: g.weight,
            exact_re: g
                .exact_re
                .as_ref()
                .map(|r| BigRational::from_integer(BigInt::from(1)) - r),
        };
        let rotate = |v: &[GammaParam], head: usize| -> Vec<GammaParam> {
            v[head..].iter().chain(&v[..head]).map(flip).collect()
        };
        HParams {
            m: self.q - self.m,
            n: self.p - self.n,
            p: self.p,
            q: self.q,
            upper: rotate(&self.upper, self.n),
            lower: rotate(&self.lower, self.m),
        }
    }

    /// The standard argument inversion: H[params](z) = H[inverted](1/z).
    /// Each (a, alpha) becomes (1 - b, beta) and vice versa, with m and n
    /// (and p and q) exchanged.
    pub fn inverted(&self) -> HParams {
        let flip = |g: &GammaParam| GammaParam {
            value: Complex64::new(1.0 - g.value.re, -g.value.im),
            weight: g.weight,
            exact_re: g
                .exact_re
                .as_ref()
                .map(|r| BigRational::from_integer(BigInt::from(1)) - r),
        };
        HParams {
            m: self.n,
            n: self.m,
            p: self.q,
            q: self.p,
            upper: self.lower.iter().map(flip).collect(),
            lower: self.upper.iter().map(flip).collect(),
        }
    }

    /// Delta, delta, mu, and the vertical-decay exponent a_star.
    pub fn invariants(&self) -> Invariants {
        let sum_alpha: f64 = self.upper.iter().map(|g| g.weight).sum();
        let sum_beta: f64 = self.lower.iter().map(|g| g.weight).sum();
        let delta_cap = sum_beta - sum_alpha;
        // delta = prod alpha^{-alpha} * prod beta^{beta}, in log space.
        let log_delta: f64 = self.lower.iter().map(|g| g.weight * g.weight.ln()).sum::<f64>()
            - self.upper.iter().map(|g| g.weight * g.weight.ln()).sum::<f64>();
        let mu = self.lower.iter().map(|g| g.value).sum::<Complex64>()
            - self.upper.iter().map(|g| g.value).sum::<Complex64>()
            + Complex64::new((self.p as f64 - self.q as f64) / 2.0, 0.0);
        let a_star = self.upper[..self.n].iter().map(|g| g.weight).sum::<f64>()
            - self.upper[self.n..].iter().map(|g| g.weight).sum::<f64>()
            + self.lower[..self.m].iter().map(|g| g.weight).sum::<f64>()
            - self.lower[self.m..].iter().map(|g| g.weight).sum::<f64>();
        Invariants {
            delta_cap,
            delta_small: log_delta.exp(),
            mu,
            a_star,
            weight_scale: 1.0 + sum_alpha + sum_beta,
        }
    }

    /// True when every parameter of the family carries exact rational
    /// metadata, enabling all-shift congruence certification.
    fn family_exact(&self, family: PoleFamily) -> bool {
        (0..self.family_len(family)).all(|i| self.family_param(family, i).exact_re.is_some())
    }
}

fn attach_exact(
    params: &mut [GammaParam],
    entries: &[Option<String>],
    expect: usize,
    name: &str,
) -> Result<()> {
    if entries.is_empty() {
        return Ok(());
    }
    if entries.len() != expect {
        return Err(Error::LengthMismatch(format!(
            "rational.{name} has {} entries, expected {expect}",
            entries.len()
        )));
    }
    for (g, e) in params.iter_mut().zip(entries) {
        if let Some(s) = e {
            let r = parse_fraction(s)?;
            let approx = r.to_f64().unwrap_or(f64::NAN);
            if (approx - g.value.re).abs() > 1e-9 * (1.0 + approx.abs()) {
                return Err(Error::BadInput(format!(
                    "rational.{name} entry {s:?} disagrees with float real part {}",
                    g.value.re
                )));
            }
            g.exact_re = Some(r);
        }
    }
    Ok(())
}

/// The derived invariants of a parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct Invariants {
    /// Sum of the beta weights minus the sum of the alpha weights.
    pub delta_cap: f64,
    /// prod alpha_i^{-alpha_i} * prod beta_j^{beta_j}; always positive.
    pub delta_small: f64,
    /// sum b_j - sum a_i + (p - q)/2.
    pub mu: Complex64,
    /// Vertical-line decay exponent:
    /// sum_{i<=n} alpha - sum_{i>n} alpha + sum_{j<=m} beta - sum_{j>m} beta.
    pub a_star: f64,
    weight_scale: f64,
}

impl Invariants {
    /// Whether delta_cap is zero under the classification tolerance.
    pub fn delta_is_zero(&self) -> bool {
        self.delta_cap.abs() <= POLE_EQ_TOL * self.weight_scale
    }
}

/// Which numerator family a pole belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PoleFamily {
    /// Poles of Gamma(b_j + beta_j s), at -(b_j + l)/beta_j; generate the
    /// expansion near zero.
    LowerB,
    /// Poles of Gamma(1 - a_i - alpha_i s), at (1 - a_i + k)/alpha_i;
    /// generate the expansion near infinity.
    UpperA,
}

/// One pole (or pole group). `indices` lists the (factor index, shift) pairs
/// whose Gamma factors are singular at `location`; the group order is
/// `indices.len()`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pole {
    pub location: Complex64,
    pub family: PoleFamily,
    pub indices: Vec<(usize, u32)>,
}

impl Pole {
    pub fn order(&self) -> usize {
        self.indices.len()
    }

    /// The exponent of z contributed by this pole: -location.
    pub fn power(&self) -> Complex64 {
        -self.location
    }
}

/// Location of the pole with the given factor index and shift. When the
/// parameter carries an exact rational real part, the real coordinate is the
/// correctly-rounded value of the exact rational, so emitted exponents agree
/// bit-for-bit with rational arithmetic.
pub fn pole_location(params: &HParams, family: PoleFamily, idx: usize, shift: u32) -> Complex64 {
    let g = params.family_param(family, idx);
    if g.exact_re.is_some() {
        let re = pole_re_rational(params, family, idx, shift)
            .to_f64()
            .expect("finite rational");
        let im = -g.value.im / g.weight;
        return Complex64::new(re, im);
    }
    match family {
        PoleFamily::LowerB => -(g.value + shift as f64) / g.weight,
        PoleFamily::UpperA => (Complex64::new(1.0, 0.0) - g.value + shift as f64) / g.weight,
    }
}

/// Enumerates the ungrouped poles of one family with shift <= max_shift.
pub fn enumerate_poles(
    params: &HParams,
    family: PoleFamily,
    max_shift: u32,
) -> Vec<Pole> {
    let len = params.family_len(family);
    let mut out = Vec::with_capacity(len * (max_shift as usize + 1));
    for idx in 0..len {
        for shift in 0..=max_shift {
            out.push(Pole {
                location: pole_location(params, family, idx, shift),
                family,
                indices: vec![(idx, shift)],
            });
        }
    }
    out
}

/// Exact real part of a pole location as a rational, when available.
fn pole_re_rational(params: &HParams, family: PoleFamily, idx: usize, shift: u32) -> BigRational {
    let g = params.family_param(family, idx);
    let w = rat(g.weight);
    let re = g.re_rational();
    let s = BigRational::from_integer(BigInt::from(shift));
    match family {
        PoleFamily::LowerB => -(re + s) / w,
        PoleFamily::UpperA => (BigRational::from_integer(BigInt::from(1)) - re + s) / w,
    }
}

fn pole_im_rational(params: &HParams, family: PoleFamily, idx: usize) -> BigRational {
    let g = params.family_param(family, idx);
    -rat(g.value.im) / rat(g.weight)
}

/// Given the pole of `anchor_idx` at shift `anchor_shift`, decides whether
/// factor `other_idx` of the same family also has a pole there, and at which
/// shift. Exact when both factors carry rational metadata, tolerance-based
/// otherwise.
pub(crate) fn solve_membership(
    params: &HParams,
    family: PoleFamily,
    other_idx: usize,
    anchor_idx: usize,
    anchor_shift: u32,
) -> Option<u32> {
    if other_idx == anchor_idx {
        return Some(anchor_shift);
    }
    let ga = params.family_param(family, anchor_idx);
    let go = params.family_param(family, other_idx);
    let exact = ga.exact_re.is_some() && go.exact_re.is_some();
    if exact {
        if pole_im_rational(params, family, anchor_idx) != pole_im_rational(params, family, other_idx)
        {
            return None;
        }
        let loc_re = pole_re_rational(params, family, anchor_idx, anchor_shift);
        let w = rat(go.weight);
        let re = go.re_rational();
        let one = BigRational::from_integer(BigInt::from(1));
        // shift = -b - beta*s0 for LowerB; alpha*s0 + a - 1 for UpperA.
        let shift = match family {
            PoleFamily::LowerB => -re - w * loc_re,
            PoleFamily::UpperA => w * loc_re + re - one,
        };
        if shift.is_integer() && !shift.is_negative() {
            shift.to_integer().to_u32()
        } else {
            None
        }
    } else {
        let loc = pole_location(params, family, anchor_idx, anchor_shift);
        let shift_est = match family {
            PoleFamily::LowerB => -go.value - go.weight * loc,
            PoleFamily::UpperA => go.weight * loc + go.value - Complex64::new(1.0, 0.0),
        };
        let rounded = shift_est.re.round();
        if rounded < 0.0 || rounded > u32::MAX as f64 {
            return None;
        }
        let candidate = pole_location(params, family, other_idx, rounded as u32);
        if (candidate - loc).norm() <= POLE_EQ_TOL * (1.0 + loc.norm()) {
            Some(rounded as u32)
        } else {
            None
        }
    }
}

/// Groups the poles of one family with shifts up to `max_shift`.
/// Each (factor, shift) pair with shift <= max_shift lands in exactly one
/// group, so group orders over the horizon sum to family_len * (max_shift+1).
pub(crate) fn group_family(params: &HParams, family: PoleFamily, max_shift: u32) -> Vec<Pole> {
    let len = params.family_len(family);
    let mut assigned: HashSet<(usize, u32)> = HashSet::new();
    let mut groups = Vec::new();
    for idx in 0..len {
        for shift in 0..=max_shift {
            if assigned.contains(&(idx, shift)) {
                continue;
            }
            let mut indices = vec![(idx, shift)];
            assigned.insert((idx, shift));
            for other in idx + 1..len {
                if let Some(s2) = solve_membership(params, family, other, idx, shift) {
                    if s2 <= max_shift && !assigned.contains(&(other, s2)) {
                        indices.push((other, s2));
                        assigned.insert((other, s2));
                    }
                }
            }
            groups.push(Pole {
                location: pole_location(params, family, idx, shift),
                family,
                indices,
            });
        }
    }
    // Expansion order: ascending Re(power) = ascending Re(-location).
    groups.sort_by(|a, b| {
        (-a.location.re)
            .total_cmp(&(-b.location.re))
            .then(a.location.im.total_cmp(&b.location.im))
    });
    groups
}

/// Outcome of the within-family all-shift coincidence analysis.
struct FamilySimplicity {
    all_simple: bool,
    /// Whether `all_simple` is certified for every shift (not just the
    /// enumerated horizon).
    certified: bool,
    note: Option<String>,
}

/// Decides whether the pole progressions of factors i and j (same family)
/// intersect for ANY shifts, by congruence reasoning on exact rationals.
/// Returns the first intersection (shift_i, shift_j) if one exists.
fn progressions_intersect(
    bi: &BigRational,
    wi: &BigRational,
    bj: &BigRational,
    wj: &BigRational,
) -> Option<(BigInt, BigInt)> {
    // Poles coincide iff b_i + k = rho (b_j + l), rho = w_i / w_j.
    let rho = wi / wj;
    let d = &rho * bj - bi; // k = d + rho l
    let p = rho.numer().clone();
    let q = rho.denom().clone(); // rho reduced, p, q > 0
    let dq = &d * BigRational::from_integer(q.clone());
    if !dq.is_integer() {
        return None;
    }
    let dq = dq.to_integer();
    // Solve p*l ≡ -dq (mod q); gcd(p, q) = 1 after reduction.
    let pinv = mod_inverse(&p, &q)?;
    let target = ((-&dq) % &q + &q) % &q;
    let mut l = (target * pinv) % &q;
    if l.is_negative() {
        l += &q;
    }
    let mut k = (&p * &l + &dq) / &q;
    if k.is_negative() {
        // Each step of q in l adds p to k.
        let steps = (-&k + &p - 1u32) / &p;
        l += &steps * &q;
        k += steps * &p;
    }
    Some((k, l))
}

fn mod_inverse(a: &BigInt, modulus: &BigInt) -> Option<BigInt> {
    if modulus == &BigInt::from(1) {
        return Some(BigInt::zero());
    }
    // Extended Euclid.
    let (mut old_r, mut r) = (a.clone() % modulus, modulus.clone());
    let (mut old_s, mut s) = (BigInt::from(1), BigInt::zero());
    while !r.is_zero() {
        let qt = &old_r / &r;
        let tmp_r = &old_r - &qt * &r;
        old_r = std::mem::replace(&mut r, tmp_r);
        let tmp_s = &old_s - &qt * &s;
        old_s = std::mem::replace(&mut s, tmp_s);
    }
    if old_r != BigInt::from(1) {
        return None;
    }
    let mut inv = old_s % modulus;
    if inv.is_negative() {
        inv += modulus;
    }
    Some(inv)
}

fn family_simplicity(params: &HParams, family: PoleFamily, max_shift: u32) -> FamilySimplicity {
    let len = params.family_len(family);
    let exact = params.family_exact(family);
    let mut note = None;
    if exact {
        for i in 0..len {
            for j in i + 1..len {
                let gi = params.family_param(family, i);
                let gj = params.family_param(family, j);
                if pole_im_rational(params, family, i) != pole_im_rational(params, family, j) {
                    continue;
                }
                // Work with the Gamma-argument progressions: for LowerB the
                // pole sets are -(b_i+k)/w_i; coincidence across factors is
                // b_i + k = (w_i/w_j)(b_j + l). For UpperA substitute 1 - a.
                let (vi, vj) = match family {
                    PoleFamily::LowerB => (gi.re_rational(), gj.re_rational()),
                    PoleFamily::UpperA => {
                        let one = BigRational::from_integer(BigInt::from(1));
                        (one.clone() - gi.re_rational(), one - gj.re_rational())
                    }
                };
                if let Some((ki, lj)) =
                    progressions_intersect(&vi, &rat(gi.weight), &vj, &rat(gj.weight))
                {
                    return FamilySimplicity {
                        all_simple: false,
                        certified: true,
                        note: Some(format!(
                            "factors {i} and {j} coincide first at shifts ({ki}, {lj})"
                        )),
                    };
                }
            }
        }
        FamilySimplicity {
            all_simple: true,
            certified: true,
            note,
        }
    } else {
        // Horizon scan via grouping.
        let coincident = group_family(params, family, max_shift)
            .into_iter()
            .find(|g| g.order() > 1);
        match coincident {
            Some(g) => FamilySimplicity {
                all_simple: false,
                certified: true,
                note: Some(format!(
                    "coincidence found at {} (order {})",
                    g.location,
                    g.order()
                )),
            },
            None => {
                note = Some(format!(
                    "no rational metadata: simplicity verified up to shift {max_shift} only"
                ));
                FamilySimplicity {
                    all_simple: true,
                    certified: false,
                    note,
                }
            }
        }
    }
}

/// Checks the separation condition between the two families for ALL shifts.
/// The two progressions overlap in a finite real window, so this is always
/// decidable (exactly with rational metadata, by tolerance otherwise).
fn separation_holds(params: &HParams) -> (bool, Option<String>) {
    for j in 0..params.m {
        let gb = params.family_param(PoleFamily::LowerB, j);
        let start_low = -gb.value.re / gb.weight; // largest lower-pole Re
        for i in 0..params.n {
            let ga = params.family_param(PoleFamily::UpperA, i);
            let start_up = (1.0 - ga.value.re) / ga.weight; // smallest upper-pole Re
            if start_up > start_low + POLE_EQ_TOL * (1.0 + start_low.abs()) {
                continue;
            }
            let window = start_low - start_up;
            let lmax = (window * gb.weight).floor() as i64 + 1;
            for l in 0..=lmax.max(0) as u32 {
                let exact = gb.exact_re.is_some() && ga.exact_re.is_some();
                let hit = if exact {
                    if pole_im_rational(params, PoleFamily::LowerB, j)
                        != pole_im_rational(params, PoleFamily::UpperA, i)
                    {
                        false
                    } else {
                        let loc = pole_re_rational(params, PoleFamily::LowerB, j, l);
                        let one = BigRational::from_integer(BigInt::from(1));
                        let k = rat(ga.weight) * loc + ga.re_rational() - one;
                        k.is_integer() && !k.is_negative()
                    }
                } else {
                    let loc = pole_location(params, PoleFamily::LowerB, j, l);
                    let k = ga.weight * loc + ga.value - Complex64::new(1.0, 0.0);
                    let rounded = k.re.round();
                    rounded >= 0.0 && {
                        let cand =
                            pole_location(params, PoleFamily::UpperA, i, rounded as u32);
                        (cand - loc).norm() <= POLE_EQ_TOL * (1.0 + loc.norm())
                    }
                };
                if hit {
                    return (
                        false,
                        Some(format!(
                            "lower factor {j} shift {l} meets an upper pole at {}",
                            pole_location(params, PoleFamily::LowerB, j, l)
                        )),
                    );
                }
            }
        }
    }
    (true, None)
}

/// Grouped pole structure with the separation/simplicity flags.
#[derive(Debug, Clone)]
pub struct PoleStructure {
    pub lower_poles: Vec<Pole>,
    pub upper_poles: Vec<Pole>,
    /// Condition: no lower pole coincides with an upper pole (any shifts).
    pub separation_ok: bool,
    /// All lower poles simple; see `lower_certified` for the horizon caveat.
    pub lower_all_simple: bool,
    pub upper_all_simple: bool,
    /// Whether the simplicity flags are certified for all shifts (congruence
    /// reasoning on exact rationals, or a coincidence was actually found).
    pub lower_certified: bool,
    pub upper_certified: bool,
    pub diagnostics: Vec<String>,
}

/// Groups poles up to `max_shift`, decides the separation and simplicity
/// conditions, and certifies them for all shifts whenever the parameters
/// allow congruence reasoning.
pub fn analyze_pole_structure(params: &HParams, max_shift: u32) -> PoleStructure {
    let lower = group_family(params, PoleFamily::LowerB, max_shift);
    let upper = group_family(params, PoleFamily::UpperA, max_shift);
    let ls = family_simplicity(params, PoleFamily::LowerB, max_shift);
    let us = family_simplicity(params, PoleFamily::UpperA, max_shift);
    let (sep, sep_note) = separation_holds(params);
    let mut diagnostics = Vec::new();
    if let Some(nn) = ls.note {
        diagnostics.push(format!("lower: {nn}"));
    }
    if let Some(nn) = us.note {
        diagnostics.push(format!("upper: {nn}"));
    }
    if let Some(nn) = sep_note {
        diagnostics.push(format!("separation: {nn}"));
    }
    PoleStructure {
        lower_poles: lower,
        upper_poles: upper,
        separation_ok: sep,
        lower_all_simple: ls.all_simple,
        upper_all_simple: us.all_simple,
        lower_certified: ls.certified,
        upper_certified: us.certified,
        diagnostics,
    }
}

/// Distance from a pole group's location to the nearest numerator pole that
/// is not part of the group (either family, any shift). Conditioning
/// diagnostic: a small but nonzero distance means a Gamma factor of the
/// coefficient formula is evaluated near one of its poles.
pub(crate) fn nearest_other_pole_distance(params: &HParams, group: &Pole) -> f64 {
    let loc = group.location;
    let mut best = f64::INFINITY;
    let mut consider = |cand: Complex64, skip: bool| {
        if skip {
            return;
        }
        let d = (cand - loc).norm();
        if d > 0.0 && d < best {
            best = d;
        }
    };
    for fam in [PoleFamily::LowerB, PoleFamily::UpperA] {
        for idx in 0..params.family_len(fam) {
            let g = params.family_param(fam, idx);
            // Real-part solve for the closest shift, then probe neighbors.
            let est = match fam {
                PoleFamily::LowerB => -g.value.re - g.weight * loc.re,
                PoleFamily::UpperA => g.weight * loc.re + g.value.re - 1.0,
            };
            let center = est.round().max(0.0) as i64;
            for d in -1..=1i64 {
                let shift = center + d;
                if shift < 0 {
                    continue;
                }
                let shift = shift as u32;
                let is_member = group.family == fam
                    && group.indices.iter().any(|&(i, s)| i == idx && s == shift);
                consider(pole_location(params, fam, idx, shift), is_member);
            }
        }
    }
    best
}

/// Checks the separation condition, as a Result for the series operations.
pub(crate) fn require_separation(params: &HParams) -> Result<()> {
    let (ok, note) = separation_holds(params);
    if ok {
        Ok(())
    } else {
        Err(Error::SeparationViolated(
            note.unwrap_or_else(|| "pole families meet".into()),
        ))
    }
}

/// Requested integration contour.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopSide {
    Left,
    Right,
}

/// Contour reported by the existence classifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContourChoice {
    LeftLoop,
    RightLoop,
    Either,
    None,
}

impl ContourChoice {
    pub fn as_str(&self) -> &'static str {
        match self {
            ContourChoice::LeftLoop => "left_loop",
            ContourChoice::RightLoop => "right_loop",
            ContourChoice::Either => "either",
            ContourChoice::None => "none",
        }
    }
}

/// Which existence case grants convergence of the defining integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    /// Left loop, Delta > 0, any z != 0.
    LeftAllZ,
    /// Left loop, Delta = 0, 0 < |z| < delta.
    LeftInsideDisk,
    /// Left loop, Delta = 0, |z| = delta, Re(mu) < -1.
    LeftBoundary,
    /// Right loop, Delta < 0, any z != 0.
    RightAllZ,
    /// Right loop, Delta = 0, |z| > delta.
    RightOutsideDisk,
    /// Right loop, Delta = 0, |z| = delta, Re(mu) < -1.
    RightBoundary,
}

impl CaseTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            CaseTag::LeftAllZ => "left_loop_any_z",
            CaseTag::LeftInsideDisk => "left_loop_inside_delta_disk",
            CaseTag::LeftBoundary => "left_loop_on_delta_circle",
            CaseTag::RightAllZ => "right_loop_any_z",
            CaseTag::RightOutsideDisk => "right_loop_outside_delta_disk",
            CaseTag::RightBoundary => "right_loop_on_delta_circle",
        }
    }
}

/// Existence verdict for one (params, z) query.
#[derive(Debug, Clone, PartialEq)]
pub struct ExistenceVerdict {
    pub contour: ContourChoice,
    pub case: Option<CaseTag>,
    pub exists: bool,
    /// |z| = delta with Delta = 0 (whether or not existence is granted).
    pub boundary_case: bool,
}

impl ExistenceVerdict {
    fn no(boundary: bool) -> Self {
        ExistenceVerdict {
            contour: ContourChoice::None,
            case: None,
            exists: false,
            boundary_case: boundary,
        }
    }
}

/// Classifies existence of the defining integral for the given argument and
/// (optionally) a requested loop contour. Total: z = 0 yields a non-existent
/// verdict rather than an error.
pub fn classify_existence(
    params: &HParams,
    z: Complex64,
    requested: Option<LoopSide>,
) -> ExistenceVerdict {
    let inv = params.invariants();
    if z == Complex64::new(0.0, 0.0) {
        return ExistenceVerdict::no(false);
    }
    let delta_zero = inv.delta_is_zero();
    let az = z.norm();
    let on_boundary = delta_zero && (az - inv.delta_small).abs() <= POLE_EQ_TOL * (1.0 + inv.delta_small);
    let inside = delta_zero && !on_boundary && az < inv.delta_small;
    let outside = delta_zero && !on_boundary && az > inv.delta_small;
    let boundary_ok = inv.mu.re < -1.0;

    let left = |tag: CaseTag, boundary: bool| ExistenceVerdict {
        contour: ContourChoice::LeftLoop,
        case: Some(tag),
        exists: true,
        boundary_case: boundary,
    };
    let right = |tag: CaseTag, boundary: bool| ExistenceVerdict {
        contour: ContourChoice::RightLoop,
        case: Some(tag),
        exists: true,
        boundary_case: boundary,
    };

    match requested {
        Some(LoopSide::Left) => {
            if !delta_zero && inv.delta_cap > 0.0 {
                left(CaseTag::LeftAllZ, false)
            } else if inside {
                left(CaseTag::LeftInsideDisk, false)
            } else if on_boundary && boundary_ok {
                left(CaseTag::LeftBoundary, true)
            } else {
                ExistenceVerdict::no(on_boundary)
            }
        }
        Some(LoopSide::Right) => {
            if !delta_zero && inv.delta_cap < 0.0 {
                right(CaseTag::RightAllZ, false)
            } else if outside {
                right(CaseTag::RightOutsideDisk, false)
            } else if on_boundary && boundary_ok {
                right(CaseTag::RightBoundary, true)
            } else {
                ExistenceVerdict::no(on_boundary)
            }
        }
        None => {
            if !delta_zero {
                if inv.delta_cap > 0.0 {
                    left(CaseTag::LeftAllZ, false)
                } else {
                    right(CaseTag::RightAllZ, false)
                }
            } else if inside {
                left(CaseTag::LeftInsideDisk, false)
            } else if outside {
                right(CaseTag::RightOutsideDisk, false)
            } else if on_boundary && boundary_ok {
                ExistenceVerdict {
                    contour: ContourChoice::Either,
                    case: Some(CaseTag::LeftBoundary),
                    exists: true,
                    boundary_case: true,
                }
            } else {
                ExistenceVerdict::no(on_boundary)
            }
        }
    }
}
