//! Moments of the deformed Gaussian: Wick sums over pairings, weighted Dyck paths,
//! S-fractions, the Touchard–Riordan formula and the t-Catalan numbers.
//!
//! Every routine is generic over [`Scalar`], so the same code yields exact polynomials
//! (with `q`, `t` the formal variables of [`BivarPoly`]), exact rationals or doubles.

use crate::combin::{binomial, for_each_pair_partition, matching_class, EpsilonWord, PairPartition};
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::guard::Guards;
use crate::poly::BivarPoly;
use crate::scalar::{Real, Scalar};

/// Inner products `c[i][j] = ⟨h_i, h_j⟩` of the vectors entering a mixed moment.
#[derive(Clone, Debug, PartialEq)]
pub struct Covariance<R> {
    matrix: DenseMatrix<R>,
}

impl<R: Scalar> Covariance<R> {
    pub fn new(matrix: DenseMatrix<R>) -> Result<Self> {
        if !matrix.is_symmetric() {
            return Err(Error::Invalid("covariance matrix must be symmetric".into()));
        }
        Ok(Self { matrix })
    }

    /// Gram matrix of explicit one-particle vectors (real coordinates).
    pub fn from_vectors(vectors: &[Vec<R>]) -> Result<Self> {
        let k = vectors.len();
        let mut m = DenseMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                if vectors[i].len() != vectors[j].len() {
                    return Err(Error::Invalid("vectors have different dimensions".into()));
                }
                m[(i, j)] = vectors[i]
                    .iter()
                    .zip(&vectors[j])
                    .fold(R::zero(), |acc, (a, b)| acc + a.clone() * b.clone());
            }
        }
        Ok(Self { matrix: m })
    }

    /// All `k` vectors equal to one unit vector: every entry is 1.
    pub fn unit(k: usize) -> Self {
        let mut m = DenseMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                m[(i, j)] = R::one();
            }
        }
        Self { matrix: m }
    }

    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    pub fn get(&self, i: usize, j: usize) -> &R {
        &self.matrix[(i, j)]
    }

    /// Covariance of the reordered family `(h_{order[0]}, h_{order[1]}, …)`.
    pub fn reordered(&self, order: &[usize]) -> Self {
        let k = order.len();
        let mut m = DenseMatrix::zeros(k, k);
        for i in 0..k {
            for j in 0..k {
                m[(i, j)] = self.matrix[(order[i], order[j])].clone();
            }
        }
        Self { matrix: m }
    }
}

impl<R: Real> Covariance<R> {
    pub fn is_positive_semidefinite(&self) -> bool {
        let eig = nalgebra::SymmetricEigen::new(self.matrix.to_nalgebra());
        let scale = eig.eigenvalues.amax().max(1.0);
        eig.eigenvalues.iter().all(|&l| l >= -1e-12 * scale)
    }
}

fn pairing_weight<R: Scalar>(v: &PairPartition, cov: &Covariance<R>, q: &R, t: &R) -> R {
    let mut w = q.powu(v.crossings() as u32) * t.powu(v.nestings() as u32);
    for &(a, b) in v.pairs() {
        w = w * cov.get(a - 1, b - 1).clone();
    }
    w
}

/// `φ(a(h_1)^{ε(1)} ⋯ a(h_k)^{ε(k)})` as a sum over the pairings compatible with the word.
///
/// Pairings come from [`matching_class`] in action order and are mapped back to the
/// positions of the product before the covariance factors are read.
pub fn wick_mixed_moment<R: Scalar>(e: &EpsilonWord, cov: &Covariance<R>, q: &R, t: &R) -> Result<R> {
    let k = e.len();
    if cov.size() != k {
        return Err(Error::Invalid(format!(
            "covariance is {}x{} but the word has {k} letters",
            cov.size(),
            cov.size()
        )));
    }
    let mut acc = R::zero();
    for v in matching_class(e) {
        let original = PairPartition::new(v.pairs().iter().map(|&(a, b)| (k + 1 - b, k + 1 - a)))?;
        acc = acc + pairing_weight(&original, cov, q, t);
    }
    Ok(acc)
}

/// `φ(s(h_1) ⋯ s(h_n))`: the `(q,t)`-Wick sum over every pairing of `[n]`.
pub fn gaussian_moment<R: Scalar>(cov: &Covariance<R>, q: &R, t: &R, guards: &Guards) -> Result<R> {
    let n = cov.size();
    if n % 2 == 1 {
        return Ok(R::zero());
    }
    if n == 0 {
        return Ok(R::one());
    }
    let mut acc = R::zero();
    for_each_pair_partition(n / 2, guards, |v| {
        acc = acc.clone() + pairing_weight(v, cov, q, t);
    })?;
    Ok(acc)
}

/// `2n`-th moment of `s(h)`, `‖h‖ = 1`, as a sum over Dyck paths where a down step from
/// height `m` carries weight `[m]_{q,t}`.
pub fn dyck_moment<R: Scalar>(n: usize, q: &R, t: &R) -> R {
    let weights: Vec<R> = (1..=n as u32).map(|m| crate::combin::qt_integer(m, q, t)).collect();
    // paths[h] = total weight of prefixes ending at height h
    let mut paths = vec![R::zero(); n + 2];
    paths[0] = R::one();
    for step in 0..2 * n {
        let mut next = vec![R::zero(); n + 2];
        let max_h = step.min(2 * n - step).min(n);
        for h in 0..=max_h {
            if paths[h].is_zero() {
                continue;
            }
            if h < n {
                next[h + 1] = next[h + 1].clone() + paths[h].clone();
            }
            if h > 0 {
                next[h - 1] = next[h - 1].clone() + paths[h].clone() * weights[h - 1].clone();
            }
        }
        paths = next;
    }
    paths[0].clone()
}

/// Even moments `m_0, m_2, …, m_{2K}` from the Dyck path recursion.
pub fn dyck_moments<R: Scalar>(k: usize, q: &R, t: &R) -> Vec<R> {
    (0..=k).map(|n| dyck_moment(n, q, t)).collect()
}

/// Exact moment polynomial `Σ_V q^cross t^nest` from the Dyck recursion.
pub fn dyck_moment_poly(n: usize) -> BivarPoly {
    dyck_moment(n, &BivarPoly::q(), &BivarPoly::t())
}

/// Stieltjes continued fraction `1 / (1 - λ_1 z / (1 - λ_2 z / …))`.
#[derive(Clone, Debug, PartialEq)]
pub struct SFraction<R> {
    pub lambda: Vec<R>,
}

impl<R: Scalar> SFraction<R> {
    pub fn new(lambda: Vec<R>) -> Self {
        Self { lambda }
    }

    /// `λ_n = [n]_{q,t}`: the deformed Gaussian.
    pub fn qt_gaussian(depth: usize, q: &R, t: &R) -> Self {
        Self::new((1..=depth as u32).map(|n| crate::combin::qt_integer(n, q, t)).collect())
    }

    /// `λ_n = t^{n-1}`: the Rogers–Ramanujan fraction of the t-semicircular law.
    pub fn rogers_ramanujan(depth: usize, t: &R) -> Self {
        Self::new((0..depth as u32).map(|k| t.powu(k)).collect())
    }
}

impl<R: Real> SFraction<R> {
    pub fn is_admissible(&self) -> bool {
        self.lambda.iter().all(|l| !l.is_negative())
    }
}

/// Power series coefficients `c_0..=c_K` of an S-fraction.
///
/// The fraction is cut at depth `K` and folded bottom-up in truncated power series;
/// level `j` only enters at order `z^j`, so the cut does not affect `c_0..=c_K`.
pub fn sfraction_series<R: Scalar>(fr: &SFraction<R>, k: usize) -> Vec<R> {
    let depth = k.min(fr.lambda.len());
    let mut tail = vec![R::zero(); k + 1];
    tail[0] = R::one();
    for j in (0..depth).rev() {
        // tail <- 1 / (1 - λ_{j+1} z tail)
        let mut denom = vec![R::zero(); k + 1];
        for i in 0..k {
            denom[i + 1] = -(fr.lambda[j].clone() * tail[i].clone());
        }
        tail = invert_unit_series(&denom, k);
    }
    tail
}

/// Inverse of `1 + d(z)` (with `d[0]` ignored) truncated to degree `k`.
fn invert_unit_series<R: Scalar>(d: &[R], k: usize) -> Vec<R> {
    let mut inv = vec![R::zero(); k + 1];
    inv[0] = R::one();
    for n in 1..=k {
        let mut acc = R::zero();
        for i in 1..=n {
            if d[i].is_zero() {
                continue;
            }
            acc = acc + d[i].clone() * inv[n - i].clone();
        }
        inv[n] = -acc;
    }
    inv
}

/// Full moment sequence `m_0..=m_{2K}` with zero odd moments.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSequence<R> {
    pub values: Vec<R>,
}

impl<R: Scalar> MomentSequence<R> {
    pub fn from_even(even: &[R]) -> Self {
        let mut values = Vec::with_capacity(2 * even.len());
        for (i, m) in even.iter().enumerate() {
            values.push(m.clone());
            if i + 1 < even.len() {
                values.push(R::zero());
            }
        }
        Self { values }
    }

    pub fn even(&self, n: usize) -> &R {
        &self.values[2 * n]
    }

    pub fn get(&self, k: usize) -> Option<&R> {
        self.values.get(k)
    }

    /// Largest `k` with `m_k` available.
    pub fn max_order(&self) -> usize {
        self.values.len().saturating_sub(1)
    }
}

/// `(1-q)^{-n} Σ_{k=-n}^{n} (-1)^k q^{k(k-1)/2} C(2n, n+k)`, with exact division.
pub fn touchard_riordan(n: usize) -> Result<BivarPoly> {
    let mut numerator = BivarPoly::default();
    let n_i = n as i64;
    for k in -n_i..=n_i {
        let sign = if k.rem_euclid(2) == 0 { 1 } else { -1 };
        let exp = (k * (k - 1) / 2) as u32;
        let c = binomial(2 * n as u64, (n_i + k) as u64) * sign;
        numerator.add_term((exp, 0), c);
    }
    let mut p = numerator;
    for _ in 0..n {
        p = p.div_one_minus_q()?;
    }
    Ok(p)
}

/// Carlitz–Riordan `C_0..=C_n` from `C_m = Σ_{k=1}^m t^{k-1} C_{k-1} C_{m-k}`.
pub fn t_catalan_sequence(n: usize) -> Vec<BivarPoly> {
    let t = BivarPoly::t();
    let mut c: Vec<BivarPoly> = vec![BivarPoly::constant(1)];
    for m in 1..=n {
        let mut acc = BivarPoly::default();
        for k in 1..=m {
            acc += t.powu((k - 1) as u32) * (&c[k - 1] * &c[m - k]);
        }
        c.push(acc);
    }
    c
}

pub fn t_catalan(n: usize) -> BivarPoly {
    t_catalan_sequence(n).pop().expect("sequence is non-empty")
}

/// `C_n^{(t)}` evaluated numerically through the same recurrence.
pub fn t_catalan_value<R: Scalar>(n: usize, t: &R) -> R {
    let mut c: Vec<R> = vec![R::one()];
    for m in 1..=n {
        let mut acc = R::zero();
        for k in 1..=m {
            acc = acc + t.powu((k - 1) as u32) * c[k - 1].clone() * c[m - k].clone();
        }
        c.push(acc);
    }
    c[n].clone()
}

/// Non-crossing pairings of `[2n]`, built by splitting on the partner `β` of `1`:
/// `(1, β)` encloses a non-crossing pairing of `[2, β-1]` and precedes one of `[β+1, 2n]`.
pub fn non_crossing_pair_partitions(n: usize) -> Vec<PairPartition> {
    fn build(start: usize, pairs: usize) -> Vec<Vec<(usize, usize)>> {
        if pairs == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        for inner in 0..pairs {
            let beta = start + 2 * inner + 1;
            for a in build(start + 1, inner) {
                for b in build(beta + 1, pairs - 1 - inner) {
                    let mut v = Vec::with_capacity(pairs);
                    v.push((start, beta));
                    v.extend(a.iter().copied());
                    v.extend(b.iter().copied());
                    out.push(v);
                }
            }
        }
        out
    }
    build(1, n)
        .into_iter()
        .map(|v| PairPartition::new(v).expect("construction yields a perfect matching"))
        .collect()
}

/// `Σ_{V ∈ NC₂(2n)} t^nest(V)`.
pub fn t_catalan_by_enumeration(n: usize) -> BivarPoly {
    let mut p = BivarPoly::default();
    for v in non_crossing_pair_partitions(n) {
        debug_assert!(v.is_non_crossing());
        p.add_term((0, v.nestings() as u32), 1.into());
    }
    p
}

/// Four-point moments `(φ(s_1 s_2 s_3 s_4), φ(s_4 s_1 s_2 s_3))` from their Wick expansions.
pub fn traciality_gap<R: Scalar>(q: &R, t: &R, cov: &Covariance<R>) -> Result<(R, R)> {
    if cov.size() != 4 {
        return Err(Error::Invalid("traciality check needs exactly four vectors".into()));
    }
    let c = |i: usize, j: usize| cov.get(i - 1, j - 1).clone();
    let forward = c(1, 2) * c(3, 4) + t.clone() * c(1, 4) * c(2, 3) + q.clone() * c(1, 3) * c(2, 4);
    let rotated = c(4, 1) * c(2, 3) + t.clone() * c(4, 3) * c(1, 2) + q.clone() * c(4, 2) * c(1, 3);
    Ok((forward, rotated))
}
