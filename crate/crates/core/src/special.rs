//! Kummer functions `Φ(a; c; x)`, Pochhammer-type Γ-ratios, and the
//! logarithmic derivative `Ω(r; k, L)` of the coherent-state normalization.
//!
//! Sums are carried with a running power-of-two exponent so that large
//! arguments neither overflow nor lose the `e^{x}` prefactor of the Kummer
//! transformation.

use crate::error::{Error, Result};

/// Exponent step used when rescaling running sums.
const RESCALE_BITS: i64 = 512;

/// A real number stored as `value · 2^exp2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub value: f64,
    pub exp2: i64,
}

impl Scaled {
    pub fn to_f64(self) -> f64 {
        ldexp(self.value, self.exp2)
    }

    /// `ln |self|`; `-inf` for zero.
    pub fn ln_abs(self) -> f64 {
        self.value.abs().ln() + self.exp2 as f64 * std::f64::consts::LN_2
    }

    /// `self / other` as a plain float.
    pub fn ratio(self, other: Scaled) -> f64 {
        ldexp(self.value / other.value, self.exp2 - other.exp2)
    }
}

/// `x · 2^e` without intermediate overflow of the power.
pub(crate) fn ldexp(mut x: f64, mut e: i64) -> f64 {
    let step = 1000;
    while e > step {
        x *= pow2(step);
        e -= step;
        if x.is_infinite() {
            return x;
        }
    }
    while e < -step {
        x *= pow2(-step);
        e += step;
        if x == 0.0 {
            return x;
        }
    }
    x * pow2(e)
}

fn pow2(e: i64) -> f64 {
    debug_assert!((-1022..=1023).contains(&e));
    f64::from_bits(((e + 1023) as u64) << 52)
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }

    fn scale(&mut self, f: f64) {
        self.sum *= f;
        self.comp *= f;
    }
}

/// `Γ(2k + n) / Γ(2k)` as the product `Π_{j<n} (2k + j)`.
pub fn gamma_ratio(twok: f64, n: usize) -> f64 {
    (0..n).map(|j| twok + j as f64).product()
}

fn pochhammer_hits_zero(c: f64, terms: usize) -> Option<usize> {
    (0..terms).find(|&j| (c + j as f64).abs() <= 1e-12 * c.abs().max(1.0))
}

/// Terminating series `Φ(−L; c; x) = Σ_{j=0}^{L} (−L)_j/(c)_j · x^j/j!`
/// in scaled form.
pub fn kummer_terminating_scaled(l: usize, c: f64, x: f64) -> Result<Scaled> {
    if let Some(j) = pochhammer_hits_zero(c, l) {
        return Err(Error::domain(format!(
            "Pochhammer (c)_j vanishes at c + {j} = 0 (c = {c}, L = {l})"
        )));
    }
    // terms carry their own exponent; the sum is assembled at the end
    let mut terms: Vec<(f64, i64)> = Vec::with_capacity(l + 1);
    let (mut t, mut e) = (1.0f64, 0i64);
    terms.push((t, e));
    for j in 1..=l {
        let jf = j as f64;
        t *= (jf - 1.0 - l as f64) * x / ((c + jf - 1.0) * jf);
        if t == 0.0 {
            break;
        }
        if t.abs() > pow2(RESCALE_BITS) {
            t *= pow2(-RESCALE_BITS);
            e += RESCALE_BITS;
        } else if t.abs() < pow2(-RESCALE_BITS) {
            t *= pow2(RESCALE_BITS);
            e -= RESCALE_BITS;
        }
        terms.push((t, e));
    }
    let emax = terms.iter().map(|&(_, e)| e).max().unwrap_or(0);
    let mut aligned: Vec<f64> = terms.iter().map(|&(t, e)| ldexp(t, e - emax)).collect();
    aligned.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let mut acc = CompensatedSum::default();
    aligned.into_iter().for_each(|v| acc.add(v));
    Ok(Scaled { value: acc.value(), exp2: emax })
}

/// Terminating Kummer function `Φ(−L; c; x)`. Overflows to `±inf` only when
/// the value itself is outside the `f64` range.
pub fn kummer_terminating(l: usize, c: f64, x: f64) -> Result<f64> {
    kummer_terminating_scaled(l, c, x).map(Scaled::to_f64)
}

fn is_nonpositive_integer(c: f64) -> bool {
    c <= 0.0 && c.fract() == 0.0
}

/// Term cap for [`kummer_series`].
pub fn kummer_term_cap(a: f64, c: f64, x: f64) -> usize {
    (10.0 * (x.abs() + a.abs() + c.abs())) as usize + 1000
}

/// Ascending series for `x ≥ 0`, scaled.
fn ascending_scaled(a: f64, c: f64, x: f64, tol: f64) -> Result<Scaled> {
    debug_assert!(x >= 0.0);
    let cap = kummer_term_cap(a, c, x);
    let mut acc = CompensatedSum::default();
    acc.add(1.0);
    let mut t = 1.0f64;
    let mut e = 0i64;
    let mut small_run = 0;
    for j in 1..=cap {
        let jf = j as f64;
        let ratio = (a + jf - 1.0) * x / ((c + jf - 1.0) * jf);
        t *= ratio;
        acc.add(t);
        if acc.value().abs() > pow2(RESCALE_BITS) || t.abs() > pow2(RESCALE_BITS) {
            let f = pow2(-RESCALE_BITS);
            t *= f;
            acc.scale(f);
            e += RESCALE_BITS;
        }
        if t.abs() <= tol * acc.value().abs() && ratio.abs() < 1.0 {
            small_run += 1;
            if small_run >= 3 {
                return Ok(Scaled { value: acc.value(), exp2: e });
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::NoConvergence {
        what: "Kummer series",
        iterations: cap,
        partial: Scaled { value: acc.value(), exp2: e }.to_f64(),
    })
}

/// `e^{−r} Φ(a; c; r)` for `r ≥ 0`, summed as a scaled series so that large
/// `r` does not overflow.
pub fn kummer_exp_scaled(a: f64, c: f64, r: f64, tol: f64) -> Result<f64> {
    if r < 0.0 {
        return Err(Error::domain("kummer_exp_scaled needs r ≥ 0"));
    }
    let s = ascending_scaled(a, c, r, tol)?;
    if s.value == 0.0 {
        return Ok(0.0);
    }
    Ok(s.value.signum() * (s.ln_abs() - r).exp())
}

/// General Kummer function `Φ(a; c; x)`.
///
/// For `x ≥ 0` the ascending series is summed until three consecutive
/// decreasing terms fall below `tol · |partial sum|`. For `x < 0` the Kummer
/// transformation `Φ(a; c; x) = e^x Φ(c − a; c; −x)` is applied first.
pub fn kummer_series(a: f64, c: f64, x: f64, tol: f64) -> Result<f64> {
    if is_nonpositive_integer(c) {
        return Err(Error::domain(format!("Kummer function undefined for c = {c}")));
    }
    if !(tol > 0.0) {
        return Err(Error::domain("tolerance must be positive"));
    }
    if x >= 0.0 {
        ascending_scaled(a, c, x, tol).map(Scaled::to_f64)
    } else {
        kummer_exp_scaled(c - a, c, -x, tol)
    }
}

/// `Ω(r; k, L) = d/dr ln Φ(−L; 1−L−2k; r)`, evaluated as
/// `L/(L+2k−1) · Φ(1−L; 2−L−2k; r) / Φ(−L; 1−L−2k; r)`.
pub fn omega(r: f64, k: f64, l: usize) -> Result<f64> {
    if r < 0.0 || r.is_nan() {
        return Err(Error::domain(format!("Ω needs r ≥ 0, got {r}")));
    }
    if l == 0 {
        return Ok(0.0);
    }
    let lf = l as f64;
    let num = kummer_terminating_scaled(l - 1, 2.0 - lf - 2.0 * k, r)?;
    let den = kummer_terminating_scaled(l, 1.0 - lf - 2.0 * k, r)?;
    if den.value == 0.0 {
        return Err(Error::NoConvergence { what: "Ω denominator", iterations: l, partial: 0.0 });
    }
    Ok(lf / (lf + 2.0 * k - 1.0) * num.ratio(den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_ratio_examples() {
        assert_eq!(gamma_ratio(1.0, 4), 24.0);
        assert_eq!(gamma_ratio(3.7, 0), 1.0);
        assert_eq!(gamma_ratio(0.5, 2), 0.75);
    }

    #[test]
    fn terminating_examples() {
        assert_eq!(kummer_terminating(0, -2.5, 17.0).unwrap(), 1.0);
        let (c, x) = (-3.5, 0.8);
        assert_relative_eq!(kummer_terminating(1, c, x).unwrap(), 1.0 - x / c, max_relative = 1e-15);
        assert_relative_eq!(kummer_terminating(2, -3.0, 1.0).unwrap(), 11.0 / 6.0, max_relative = 1e-15);
    }

    #[test]
    fn terminating_rejects_vanishing_pochhammer() {
        // c = −1 is hit by (c)_2 = c(c+1)
        assert!(matches!(kummer_terminating(3, -1.0, 1.0), Err(Error::Domain(_))));
        // never visited: L = 1 only uses (c)_1 = c
        assert!(kummer_terminating(1, -1.0, 1.0).is_ok());
    }

    #[test]
    fn terminating_large_arguments() {
        // mpmath.hyp1f1(-200, 1-200-2, 50), dps = 40
        let v = kummer_terminating(200, -201.0, 50.0).unwrap();
        assert_relative_eq!(v, 3.894_977_785_157_452_4e21, max_relative = 1e-13);
        // mpmath.hyp1f1(-60, 1-60-0.5, 1e6)
        let v = kummer_terminating(60, -59.5, 1e6).unwrap();
        assert_relative_eq!(v, 1.653_459_307_109_047_1e279, max_relative = 1e-13);
        // value itself beyond f64; the scaled form still holds it
        let s = kummer_terminating_scaled(2000, 1.0 - 2000.0 - 2.0, 1e6).unwrap();
        assert!(s.value > 0.0 && s.ln_abs() > 700.0);
    }

    #[test]
    fn series_examples() {
        assert_eq!(kummer_series(2.3, 1.7, 0.0, 1e-16).unwrap(), 1.0);
        assert_relative_eq!(kummer_series(1.0, 1.0, 2.0, 1e-16).unwrap(), 2f64.exp(), max_relative = 1e-14);
    }

    #[test]
    fn series_transformation_against_direct_sum() {
        // direct alternating sum of Φ(4; 5; −3), computed independently
        let mut direct = 0.0;
        let mut t = 1.0;
        for j in 0..200 {
            direct += t;
            let jf = j as f64;
            t *= (4.0 + jf) * -3.0 / ((5.0 + jf) * (jf + 1.0));
        }
        let mut plus = 0.0;
        let mut t = 1.0;
        for j in 0..200 {
            plus += t;
            let jf = j as f64;
            t *= (1.0 + jf) * 3.0 / ((5.0 + jf) * (jf + 1.0));
        }
        let rhs = (-3f64).exp() * plus;
        assert_relative_eq!(direct, rhs, max_relative = 1e-12);
        assert_relative_eq!(kummer_series(4.0, 5.0, -3.0, 1e-16).unwrap(), rhs, max_relative = 1e-12);
    }

    #[test]
    fn series_large_negative_argument() {
        // mpmath.hyp1f1(5, 4.5, -100); Φ(14; 15; −r) = 14!/r^14 up to e^{−r}
        assert_relative_eq!(kummer_series(5.0, 4.5, -100.0, 1e-16).unwrap(), -3.547_458_846_715_015_8e-10, max_relative = 1e-11);
        assert_relative_eq!(kummer_series(14.0, 15.0, -1e4, 1e-16).unwrap(), 8.717_829_12e-46, max_relative = 1e-10);
    }

    #[test]
    fn series_errors() {
        assert!(matches!(kummer_series(1.0, -2.0, 1.0, 1e-15), Err(Error::Domain(_))));
        assert!(matches!(kummer_series(1.0, 2.0, 1.0, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn omega_at_zero_and_infinity() {
        assert_relative_eq!(omega(0.0, 1.5, 7).unwrap(), 7.0 / 9.0, max_relative = 1e-15);
        assert_eq!(omega(3.0, 1.0, 0).unwrap(), 0.0);
        assert!(omega(-1.0, 1.0, 3).is_err());
        // Ω ~ L / r for r → ∞
        let r = 1e8;
        assert_relative_eq!(r * omega(r, 1.0, 10).unwrap(), 10.0, max_relative = 1e-6);
    }

    #[test]
    fn omega_matches_finite_difference() {
        let (k, l, r, h) = (1.0, 10usize, 5.0, 1e-5);
        let c = 1.0 - l as f64 - 2.0 * k;
        let f = |x: f64| kummer_terminating(l, c, x).unwrap().ln();
        let fd = (f(r + h) - f(r - h)) / (2.0 * h);
        assert!((omega(r, k, l).unwrap() - fd).abs() < 1e-6);
    }
}
