//! Orthogonal polynomial recurrences, the t-Airy function and the atomic t-semicircular law.

pub use nalgebra::Complex;
use serde::Serialize;

use crate::combin::qt_integer;
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::moments::{dyck_moments, MomentSequence};
use crate::scalar::{Real, Scalar};

/// Monic polynomials `p_0..=p_K`, coefficients stored in increasing powers of `z`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolySeq<R> {
    polys: Vec<Vec<R>>,
}

impl<R: Scalar> PolySeq<R> {
    /// `z p_n = p_{n+1} + λ_n p_{n-1}` from `p_0 = 1`, `p_1 = z`.
    pub fn three_term(k: usize, mut lambda: impl FnMut(u32) -> R) -> Self {
        let mut polys: Vec<Vec<R>> = vec![vec![R::one()]];
        if k >= 1 {
            polys.push(vec![R::zero(), R::one()]);
        }
        for n in 1..k {
            let l = lambda(n as u32);
            let mut next = vec![R::zero(); n + 2];
            for (i, c) in polys[n].iter().enumerate() {
                next[i + 1] = c.clone();
            }
            for (i, c) in polys[n - 1].iter().enumerate() {
                next[i] = next[i].clone() - l.clone() * c.clone();
            }
            polys.push(next);
        }
        Self { polys }
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn coeffs(&self, n: usize) -> &[R] {
        &self.polys[n]
    }

    pub fn polys(&self) -> &[Vec<R>] {
        &self.polys
    }

    pub fn eval(&self, n: usize, z: &R) -> R {
        self.polys[n]
            .iter()
            .rev()
            .fold(R::zero(), |acc, c| acc * z.clone() + c.clone())
    }

    pub fn is_monic(&self) -> bool {
        self.polys
            .iter()
            .enumerate()
            .all(|(n, p)| p.len() == n + 1 && p[n] == R::one())
    }
}

/// `z H_n = H_{n+1} + [n]_{q,t} H_{n-1}`.
pub fn qt_hermite<R: Scalar>(k: usize, q: &R, t: &R) -> PolySeq<R> {
    PolySeq::three_term(k, |n| qt_integer(n, q, t))
}

/// `z U_n = U_{n+1} + t^{n-1} U_{n-1}`.
pub fn t_chebyshev<R: Scalar>(k: usize, t: &R) -> PolySeq<R> {
    PolySeq::three_term(k, |n| t.powu(n - 1))
}

/// Matrix `L(p_m p_n)` for the linear functional `L(z^k) = m_k`.
pub fn functional_gram<R: Scalar>(seq: &PolySeq<R>, moments: &MomentSequence<R>) -> Result<DenseMatrix<R>> {
    let k = seq.len();
    let needed = 2 * k.saturating_sub(1);
    if moments.max_order() < needed {
        return Err(Error::Invalid(format!(
            "moments known to order {} but {} are needed",
            moments.max_order(),
            needed
        )));
    }
    let mut out = DenseMatrix::zeros(k, k);
    for m in 0..k {
        for n in m..k {
            let mut acc = R::zero();
            for (i, a) in seq.coeffs(m).iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, b) in seq.coeffs(n).iter().enumerate() {
                    if b.is_zero() {
                        continue;
                    }
                    let mom = moments.get(i + j).expect("checked above");
                    if mom.is_zero() {
                        continue;
                    }
                    acc = acc + a.clone() * b.clone() * mom.clone();
                }
            }
            out[(m, n)] = acc.clone();
            out[(n, m)] = acc;
        }
    }
    Ok(out)
}

/// `L(H_m H_n)` for `m, n ≤ K`, with moments taken from the Dyck path recursion.
pub fn hermite_functional_gram<R: Scalar>(k: usize, q: &R, t: &R) -> Result<DenseMatrix<R>> {
    let seq = qt_hermite(k, q, t);
    let moments = MomentSequence::from_even(&dyck_moments(k, q, t));
    functional_gram(&seq, &moments)
}

/// `max_{m ≠ n ≤ K} |L(H_m H_n)|`.
pub fn orthogonality_check<R: Real>(k: usize, q: &R, t: &R) -> Result<R> {
    let g = hermite_functional_gram(k + 1, q, t)?;
    let mut worst = R::zero();
    for m in 0..g.rows() {
        for n in 0..g.cols() {
            if m != n && g[(m, n)].abs() > worst {
                worst = g[(m, n)].abs();
            }
        }
    }
    Ok(worst)
}

/// Value of the t-Airy series together with a bound on its total error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AiryEval {
    pub z: f64,
    pub t: f64,
    pub value: f64,
    /// Certified tail bound plus a floating-point rounding estimate.
    pub error_bound: f64,
    pub terms: usize,
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain(format!("t-Airy function needs 0 < t < 1, got t = {t}")));
    }
    Ok(())
}

struct SeriesSum<S> {
    value: S,
    deriv: S,
    tail: f64,
    abs_sum: f64,
    deriv_abs_sum: f64,
    terms: usize,
}

/// Sums `Σ a_n (-z)^n` and its derivative until the certified tail is below `tol`.
///
/// `|term_{n+1} / term_n| = |z| t^{2n+1} / (1 - t^{n+1})` decreases in `n`, so once the
/// ratio `r` drops below 1 the remaining terms are bounded by `|term_n| r / (1 - r)`.
/// The derivative terms carry an extra factor `(n+1)/n ≤ 2`.
fn series<S>(z: S, abs_z: f64, t: f64, tol: f64) -> SeriesSum<S>
where
    S: Copy + std::ops::Add<Output = S> + std::ops::Mul<Output = S> + std::ops::Mul<f64, Output = S> + std::ops::Neg<Output = S> + num_traits::One + num_traits::Zero,
{
    let minus_z = -z;
    let mut value = S::one();
    let mut deriv = S::zero();
    let mut coeff = 1.0f64; // t^{n²} / (t;t)_n
    let mut power = S::one(); // (-z)^n
    let mut abs_sum = 1.0;
    let mut deriv_abs_sum = 0.0;
    let mut n = 0usize;
    loop {
        let nf = n as f64;
        let ratio = abs_z * t.powf(2.0 * nf + 1.0) / (1.0 - t.powi(n as i32 + 1));
        let term_abs = coeff * abs_z.powi(n as i32);
        if ratio < 0.5 {
            let tail_value = term_abs * ratio / (1.0 - ratio);
            let deriv_tail = if abs_z > 0.0 { 2.0 * (nf + 1.0) * tail_value / abs_z } else { 0.0 };
            if tail_value.max(deriv_tail) < tol || term_abs == 0.0 {
                return SeriesSum {
                    value,
                    deriv,
                    tail: tail_value.max(deriv_tail),
                    abs_sum,
                    deriv_abs_sum,
                    terms: n + 1,
                };
            }
        }
        // advance to n + 1
        let next = n + 1;
        coeff *= t.powi(2 * next as i32 - 1) / (1.0 - t.powi(next as i32));
        let prev_power = power;
        power = power * minus_z;
        value = value + power * coeff;
        // d/dz (-z)^{n+1} = -(n+1) (-z)^n
        deriv = deriv + prev_power * (-(next as f64) * coeff);
        abs_sum += coeff * abs_z.powi(next as i32);
        deriv_abs_sum += next as f64 * coeff * abs_z.powi(n as i32);
        n = next;
        if n > 100_000 {
            return SeriesSum {
                value,
                deriv,
                tail: f64::INFINITY,
                abs_sum,
                deriv_abs_sum,
                terms: n + 1,
            };
        }
    }
}

/// Each term carries about `n` roundings from its coefficient and power, and the running
/// sum adds one per term.
fn rounding(abs_sum: f64, terms: usize) -> f64 {
    2.0 * terms as f64 * f64::EPSILON * abs_sum
}

/// `A_t(z) = Σ_n t^{n²} / ((1-t)⋯(1-t^n)) (-z)^n` by direct summation.
///
/// Fails when the bound (tail plus rounding on the partial sums) exceeds `tol`; for large
/// arguments use [`t_airy_lifted`].
pub fn t_airy(z: f64, t: f64, tol: f64) -> Result<AiryEval> {
    check_t(t)?;
    let s = series(z, z.abs(), t, tol.max(f64::MIN_POSITIVE));
    let bound = s.tail + rounding(s.abs_sum, s.terms);
    if bound.is_nan() || bound > tol {
        return Err(Error::Domain(format!(
            "direct summation of A_t({z}) at t = {t} cannot reach tolerance {tol:e} (error bound {bound:e})"
        )));
    }
    Ok(AiryEval {
        z,
        t,
        value: s.value,
        error_bound: bound,
        terms: s.terms,
    })
}

/// `A_t'(z)` from the term-wise differentiated series, with the same error accounting.
pub fn t_airy_derivative(z: f64, t: f64, tol: f64) -> Result<AiryEval> {
    check_t(t)?;
    let s = series(z, z.abs(), t, tol.max(f64::MIN_POSITIVE));
    let bound = s.tail + rounding(s.deriv_abs_sum, s.terms);
    if bound.is_nan() || bound > tol {
        return Err(Error::Domain(format!(
            "direct summation of A_t'({z}) at t = {t} cannot reach tolerance {tol:e} (error bound {bound:e})"
        )));
    }
    Ok(AiryEval {
        z,
        t,
        value: s.deriv,
        error_bound: bound,
        terms: s.terms,
    })
}

/// `A_t` on a complex argument by direct summation; `None` when rounding would dominate.
fn t_airy_complex(w: Complex<f64>, t: f64) -> Option<Complex<f64>> {
    let s = series(w, w.norm(), t, 1e-18);
    if rounding(s.abs_sum, s.terms) + s.tail > 1e-13 * s.value.norm().max(1e-300) {
        return None;
    }
    Some(s.value)
}

/// `A_t(x)`, `A_t(tx)` and `A_t'(x)`, all multiplied by the same positive factor `2^{-scale}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LiftedAiry {
    pub value: f64,
    pub shifted: f64,
    pub derivative: f64,
    pub scale: i32,
}

impl LiftedAiry {
    pub fn unscaled_value(&self) -> f64 {
        self.value * 2f64.powi(self.scale)
    }

    pub fn unscaled_derivative(&self) -> f64 {
        self.derivative * 2f64.powi(self.scale)
    }
}

const BASE_RADIUS: f64 = 0.5;
const RESCALE_BITS: i32 = 512;

/// Evaluates `A_t` at large arguments without cancellation.
///
/// With `f_k = A_t(t^k x)` and `d_k = A_t'(t^k x)` the identity `A(z) = A(tz) - tz A(t²z)` gives
///
/// `f_k = f_{k+1} - t^{k+1} x f_{k+2}`,
/// `d_k = t d_{k+1} - t f_{k+2} - t^{k+3} x d_{k+2}`,
///
/// run downwards from the first `K` with `|t^K x| ≤ 1/2`, where direct sums are exact
/// to rounding. Magnitudes are renormalised by powers of two as they grow.
pub fn t_airy_lifted(x: f64, t: f64) -> Result<LiftedAiry> {
    check_t(t)?;
    if !x.is_finite() {
        return Err(Error::Domain(format!("t-Airy argument must be finite, got {x}")));
    }
    let mut k = 0i32;
    while (x * t.powi(k)).abs() > BASE_RADIUS {
        k += 1;
    }
    let base = |y: f64| {
        let s = series(y, y.abs(), t, 1e-19);
        (s.value, s.deriv)
    };
    let (mut f1, mut d1) = base(x * t.powi(k)); // f_k, d_k
    let (mut f2, mut d2) = base(x * t.powi(k + 1)); // f_{k+1}, d_{k+1}
    let mut scale = 0i32;
    for j in (0..k).rev() {
        let tj = t.powi(j);
        let f0 = f1 - t * tj * x * f2;
        let d0 = t * d1 - t * f2 - t * t * t * tj * x * d2;
        f2 = f1;
        d2 = d1;
        f1 = f0;
        d1 = d0;
        let m = f1.abs().max(f2.abs()).max(d1.abs()).max(d2.abs());
        if m > 2f64.powi(RESCALE_BITS) {
            let s = 2f64.powi(-RESCALE_BITS);
            f1 *= s;
            f2 *= s;
            d1 *= s;
            d2 *= s;
            scale += RESCALE_BITS;
        }
    }
    Ok(LiftedAiry {
        value: f1,
        shifted: f2,
        derivative: d1,
        scale,
    })
}

/// Sign-change scanner over the zeros of `w ↦ A_t(w/t)`.
struct ZeroScanner {
    t: f64,
    w: f64,
    sign: f64,
}

const SCAN_RATIO: f64 = 1.01;
const SCAN_HORIZON: f64 = 1e250;

impl ZeroScanner {
    fn new(t: f64) -> Result<Self> {
        check_t(t)?;
        // atoms lie within 2/√(1-t), so no zero sits below (1-t)/4
        let w = (1.0 - t) / 8.0;
        let start = t_airy(w / t, t, 1e-10)?;
        if start.value <= start.error_bound {
            return Err(Error::RootSearch(format!(
                "A_t(w/t) is not positive at the scan start w = {w:e} (t = {t})"
            )));
        }
        Ok(Self { t, w, sign: 1.0 })
    }

    fn sign_at(&self, w: f64) -> Result<f64> {
        let v = t_airy_lifted(w / self.t, self.t)?.value;
        Ok(if v > 0.0 {
            1.0
        } else if v < 0.0 {
            -1.0
        } else {
            0.0
        })
    }

    fn next_zero(&mut self) -> Result<f64> {
        loop {
            let w_next = self.w * SCAN_RATIO;
            if w_next > SCAN_HORIZON {
                return Err(Error::RootSearch(format!(
                    "no sign change of A_t(w/t) found below w = {SCAN_HORIZON:e} (t = {})",
                    self.t
                )));
            }
            let s = self.sign_at(w_next)?;
            if s == 0.0 {
                self.w = w_next * (1.0 + 1e-12);
                self.sign = -self.sign;
                return Ok(w_next);
            }
            if s != self.sign {
                let root = self.bisect(self.w, w_next)?;
                self.w = w_next;
                self.sign = s;
                return Ok(root);
            }
            self.w = w_next;
        }
    }

    fn bisect(&self, mut lo: f64, mut hi: f64) -> Result<f64> {
        let s_lo = self.sign;
        while (hi - lo) > 1e-15 * hi {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            let s = self.sign_at(mid)?;
            if s == 0.0 {
                return Ok(mid);
            }
            if s == s_lo {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let root = 0.5 * (lo + hi);
        let at = t_airy_lifted(root / self.t, self.t)?;
        // residual relative to the local slope scale |x A'(x)|
        let x = root / self.t;
        let slope = (x * at.derivative).abs();
        if slope == 0.0 || at.value.abs() > 1e-10 * slope {
            return Err(Error::RootSearch(format!(
                "zero near w = {root:e} (t = {}) failed the residual check",
                self.t
            )));
        }
        Ok(root)
    }
}

/// First `count` zeros `z_1 < z_2 < …` of `A_t(z/t)`.
pub fn t_airy_zeros(t: f64, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::Invalid("count must be at least 1".into()));
    }
    let mut scan = ZeroScanner::new(t)?;
    (0..count).map(|_| scan.next_zero()).collect()
}

/// Symmetric atomic measure stored as `(location, mass)` pairs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscreteMeasure {
    pub atoms: Vec<(f64, f64)>,
}

impl DiscreteMeasure {
    pub fn total_mass(&self) -> f64 {
        // smallest masses first
        self.atoms.iter().rev().map(|a| a.1).sum()
    }

    pub fn mass_defect(&self) -> f64 {
        1.0 - self.total_mass()
    }

    pub fn moment(&self, k: u32) -> f64 {
        self.atoms.iter().rev().map(|&(x, m)| m * x.powi(k as i32)).sum()
    }

    pub fn cauchy_transform(&self, z: Complex<f64>) -> Complex<f64> {
        self.atoms
            .iter()
            .rev()
            .map(|&(x, m)| Complex::new(m, 0.0) / (z - x))
            .fold(Complex::new(0.0, 0.0), |a, b| a + b)
    }

    pub fn max_abs_location(&self) -> f64 {
        self.atoms.iter().map(|a| a.0.abs()).fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self) -> bool {
        self.atoms.chunks(2).all(|c| c.len() == 2 && c[0].0 == -c[1].0 && c[0].1 == c[1].1)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("location,mass\n");
        for (x, m) in &self.atoms {
            out.push_str(&format!("{x:.17e},{m:.17e}\n"));
        }
        out
    }
}

pub const MAX_MEASURE_T: f64 = 0.95;

/// `2/√(1-t)`: every atom of the t-semicircular law is expected inside this radius.
pub fn support_bound(t: f64) -> f64 {
    2.0 / (1.0 - t).sqrt()
}

fn check_measure_t(t: f64) -> Result<()> {
    if !(t > 0.0 && t <= MAX_MEASURE_T) {
        return Err(Error::Domain(format!(
            "t-semicircular measure is computed for 0 < t <= {MAX_MEASURE_T}, got t = {t}"
        )));
    }
    Ok(())
}

/// Atom pair for the zero `z` of `A_t(·/t)`: locations `±1/√z`, each with mass
/// `-t A_t(z) / (2 z A_t'(z/t))`.
fn atom(z: f64, t: f64) -> Result<(f64, f64)> {
    let lifted = t_airy_lifted(z / t, t)?;
    let mass = -t * lifted.shifted / (2.0 * z * lifted.derivative);
    if !mass.is_finite() || mass <= 0.0 {
        return Err(Error::Internal(format!("non-positive atom mass {mass:e} at zero {z:e} (t = {t})")));
    }
    Ok((1.0 / z.sqrt(), mass))
}

/// The `2·count` largest atoms of the t-semicircular law.
pub fn t_semicircular_measure(t: f64, count: usize) -> Result<DiscreteMeasure> {
    check_measure_t(t)?;
    let mut atoms = Vec::with_capacity(2 * count);
    for z in t_airy_zeros(t, count)? {
        let (x, m) = atom(z, t)?;
        atoms.push((x, m));
        atoms.push((-x, m));
    }
    Ok(DiscreteMeasure { atoms })
}

/// Adds atom pairs until `1 - Σ masses < defect_tol`.
pub fn t_semicircular_measure_adaptive(t: f64, defect_tol: f64, max_count: usize) -> Result<DiscreteMeasure> {
    check_measure_t(t)?;
    let mut scan = ZeroScanner::new(t)?;
    let mut atoms = Vec::new();
    let mut total = 0.0;
    for _ in 0..max_count {
        let (x, m) = atom(scan.next_zero()?, t)?;
        atoms.push((x, m));
        atoms.push((-x, m));
        total += 2.0 * m;
        if 1.0 - total < defect_tol {
            return Ok(DiscreteMeasure { atoms });
        }
    }
    Err(Error::RootSearch(format!(
        "mass defect {:e} still above {defect_tol:e} after {max_count} atom pairs (t = {t})",
        1.0 - total
    )))
}

/// `G(z) = (1/z) A_t(1/z²) / A_t(1/(z² t))`.
pub fn cauchy_transform(z: Complex<f64>, t: f64) -> Result<Complex<f64>> {
    check_measure_t(t)?;
    if z.norm() == 0.0 {
        return Err(Error::Domain("Cauchy transform is not defined at z = 0".into()));
    }
    let w = Complex::new(1.0, 0.0) / (z * z);
    let too_close = || Error::Domain(format!("z = {z} is too close to the spectrum for series evaluation"));
    let num = t_airy_complex(w, t).ok_or_else(too_close)?;
    let den = t_airy_complex(w / t, t).ok_or_else(too_close)?;
    if den.norm() < 1e-12 {
        return Err(Error::Domain(format!("denominator A_t(1/(z² t)) vanishes near z = {z}")));
    }
    Ok(num / (den * z))
}

/// Coefficients `c_0..=c_K` of `A_t(u) / A_t(u/t) = Σ c_n u^n`, so that `G(z) = Σ c_n z^{-2n-1}`.
pub fn cauchy_series<R: Real>(t: &R, k: usize) -> Result<Vec<R>> {
    if !(t.is_positive() && *t < R::one()) {
        return Err(Error::Domain("Cauchy series needs 0 < t < 1".into()));
    }
    // a_n = (-1)^n t^{n²}/(t;t)_n and b_n = a_n t^{-n}
    let mut a = Vec::with_capacity(k + 1);
    let mut b = Vec::with_capacity(k + 1);
    let mut poch = R::one();
    for n in 0..=k as u32 {
        if n > 0 {
            poch = poch * (R::one() - t.powu(n));
        }
        let sign = if n % 2 == 0 { R::one() } else { -R::one() };
        a.push(sign.clone() * t.powu(n * n) / poch.clone());
        b.push(sign * t.powu(n * n - n) / poch.clone());
    }
    let mut c: Vec<R> = Vec::with_capacity(k + 1);
    for n in 0..=k {
        let mut acc = a[n].clone();
        for i in 1..=n {
            acc = acc - b[i].clone() * c[n - i].clone();
        }
        c.push(acc);
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{t_catalan, t_catalan_value};
    use crate::poly::BivarPoly;
    use crate::scalar::rational;
    use num_rational::BigRational;

    #[test]
    fn hermite_examples() {
        let (q, t) = (BivarPoly::q(), BivarPoly::t());
        let h = qt_hermite(3, &q, &t);
        assert!(h.is_monic());
        assert_eq!(h.coeffs(2), &[BivarPoly::constant(-1), BivarPoly::zero(), BivarPoly::one()]);
        assert_eq!(h.coeffs(3)[1].to_string(), "-1 - q - t");
        let u = t_chebyshev(3, &t);
        assert_eq!(u.coeffs(3)[1].to_string(), "-1 - t");
        let u1: PolySeq<f64> = t_chebyshev(5, &1.0);
        // monic Chebyshev II at z = 2cos θ: U_n = sin((n+1)θ)/sin θ
        let th = 0.7f64;
        for n in 0..=5 {
            let expect = ((n as f64 + 1.0) * th).sin() / th.sin();
            assert!((u1.eval(n, &(2.0 * th.cos())) - expect).abs() < 1e-12);
        }
        for k in 0..=12 {
            assert_eq!(qt_hermite(k, &BivarPoly::zero(), &t), t_chebyshev(k, &t));
        }
    }

    use num_traits::{One, Zero};

    #[test]
    fn functional_examples() {
        let (q, t) = (BivarPoly::q(), BivarPoly::t());
        let g = hermite_functional_gram(3, &q, &t).unwrap();
        assert!(g[(0, 1)].is_zero());
        assert_eq!(g[(1, 1)], BivarPoly::one());
        assert_eq!(g[(2, 2)].to_string(), "q + t");
        let grid = [(rational(1, 3), rational(1, 2)), (rational(-1, 2), rational(3, 4)), (rational(0, 1), rational(1, 1))];
        for (q, t) in grid {
            assert_eq!(orthogonality_check(8, &q, &t).unwrap(), BigRational::zero());
        }
        assert!(orthogonality_check(8, &0.3, &0.7).unwrap() < 1e-10);
    }

    #[test]
    fn airy_examples() {
        let a = t_airy(0.0, 0.5, 1e-13).unwrap();
        assert_eq!(a.value, 1.0);
        let z = 1e-3;
        let a = t_airy(z, 0.5, 1e-13).unwrap();
        assert!((a.value - (1.0 - 0.5 * z / (1.0 - 0.5))).abs() < 1e-6);
        assert!(t_airy(1.0, 1.0, 1e-12).is_err());
        assert!(t_airy(1e12, 0.5, 1e-12).is_err());
        // derivative against a central difference
        let (x, h) = (0.8, 1e-5);
        let d = t_airy_derivative(x, 0.5, 1e-13).unwrap().value;
        let fd = (t_airy(x + h, 0.5, 1e-13).unwrap().value - t_airy(x - h, 0.5, 1e-13).unwrap().value) / (2.0 * h);
        assert!((d - fd).abs() < 1e-8);
    }

    #[test]
    fn lifting_matches_direct_sum() {
        for &t in &[0.3, 0.5, 0.7] {
            for &x in &[-3.0, 0.2, 1.7, 4.0, 9.5] {
                let lifted = t_airy_lifted(x, t).unwrap();
                let direct = t_airy(x, t, 1e-9).unwrap();
                assert!((lifted.unscaled_value() - direct.value).abs() <= direct.error_bound + 1e-13, "t={t} x={x}");
                let dd = t_airy_derivative(x, t, 1e-8).unwrap();
                assert!((lifted.unscaled_derivative() - dd.value).abs() <= dd.error_bound + 1e-12, "t={t} x={x}");
                let shifted = t_airy(t * x, t, 1e-9).unwrap();
                assert!((lifted.shifted * 2f64.powi(lifted.scale) - shifted.value).abs() <= shifted.error_bound + 1e-13);
            }
        }
    }

    #[test]
    fn zeros_examples() {
        let z = t_airy_zeros(0.5, 3).unwrap();
        assert_eq!(z.len(), 3);
        assert!(z[0] > 0.0 && z[0] < z[1] && z[1] < z[2]);
        for &w in &z {
            let v = t_airy(w / 0.5, 0.5, 1e-9).unwrap();
            assert!(v.value.abs() <= v.error_bound + 1e-10);
        }
        assert!(t_airy_zeros(0.5, 0).is_err());
    }

    #[test]
    fn measure_examples() {
        let m = t_semicircular_measure_adaptive(0.5, 1e-10, 200).unwrap();
        assert!(m.is_symmetric());
        assert!(m.mass_defect() < 1e-10 && m.mass_defect() > -1e-12);
        assert!((m.moment(4) - 1.5).abs() < 1e-8);
        for n in 0..=5 {
            assert!((m.moment(2 * n) - t_catalan_value(n as usize, &0.5)).abs() < 1e-8, "n = {n}");
        }
        assert!(m.max_abs_location() <= support_bound(0.5));
        assert!(t_semicircular_measure(0.97, 3).is_err());
    }

    #[test]
    fn cauchy_examples() {
        let t = 0.5;
        let z = Complex::new(1e4, 0.0);
        let g = cauchy_transform(z, t).unwrap();
        assert!(((g * z).re - 1.0).abs() < 1e-7);
        let c = cauchy_series(&t, 10).unwrap();
        assert!((c[1] - 1.0).abs() < 1e-14);
        assert!((c[2] - 1.5).abs() < 1e-14);
        let exact = cauchy_series(&rational(1, 2), 8).unwrap();
        for (n, cn) in exact.iter().enumerate() {
            let p = t_catalan(n);
            assert_eq!(*cn, p.eval_rational(&rational(0, 1), &rational(1, 2)));
        }
        let m = t_semicircular_measure_adaptive(t, 1e-12, 200).unwrap();
        for z in [Complex::new(3.5, 0.4), Complex::new(0.0, 3.0), Complex::new(-4.0, -1.0)] {
            let diff = (cauchy_transform(z, t).unwrap() - m.cauchy_transform(z)).norm();
            assert!(diff < 1e-8, "z = {z}: {diff:e}");
        }
    }
}
