//! Finite truncations of the `(q,t)`-Fock space.
//!
//! The basis is every tensor word `e_{i_1} ⊗ … ⊗ e_{i_n}` over `d` orthonormal one-particle
//! vectors with `0 <= n <= L`. Creation at level `L` is dropped, so identities involving
//! `a(f)*` are checked only on levels below `L`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::combin::{for_each_permutation, Letter};
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::guard::Guards;
use crate::scalar::Real;

/// Deformation parameters together with the one-particle dimension and the level cutoff.
#[derive(Clone, Debug, PartialEq)]
pub struct FockParams<R> {
    q: R,
    t: R,
    d: usize,
    level: usize,
}

impl<R: Real> FockParams<R> {
    /// Requires `|q| < t <= 1`, where the inner product is strictly positive.
    pub fn new(q: R, t: R, d: usize, level: usize) -> Result<Self> {
        Self::validate(&q, &t, d, level, false)?;
        Ok(Self { q, t, d, level })
    }

    /// Also admits the boundary `|q| = t`, where the form is only positive semi-definite.
    pub fn new_relaxed(q: R, t: R, d: usize, level: usize) -> Result<Self> {
        Self::validate(&q, &t, d, level, true)?;
        Ok(Self { q, t, d, level })
    }

    fn validate(q: &R, t: &R, d: usize, level: usize, relaxed: bool) -> Result<()> {
        if d == 0 || level == 0 {
            return Err(Error::Domain("d and the level cutoff must be positive".into()));
        }
        if !t.is_positive() || *t > R::one() {
            return Err(Error::Domain(format!("need 0 < t <= 1, got t = {}", t.to_f64())));
        }
        if q.is_one() && t.is_one() {
            return Err(Error::Domain(
                "q = t = 1 is the Bosonic case with unbounded operators".into(),
            ));
        }
        let ok = if relaxed { q.abs() <= *t } else { q.abs() < *t };
        if !ok {
            let rel = if relaxed { "<=" } else { "<" };
            return Err(Error::Domain(format!(
                "need |q| {rel} t, got q = {}, t = {}",
                q.to_f64(),
                t.to_f64()
            )));
        }
        Ok(())
    }

    pub fn q(&self) -> &R {
        &self.q
    }

    pub fn t(&self) -> &R {
        &self.t
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn level(&self) -> usize {
        self.level
    }
}

/// A basis tensor word; letters are 1-based indices of one-particle basis vectors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TensorWord(pub Vec<usize>);

impl TensorWord {
    pub fn vacuum() -> Self {
        Self(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for TensorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "Ω");
        }
        let parts: Vec<String> = self.0.iter().map(|i| format!("e{i}")).collect();
        write!(f, "{}", parts.join("⊗"))
    }
}

/// Enumerates the truncated basis: words ordered by length, then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Basis {
    d: usize,
    level: usize,
    offsets: Vec<usize>,
}

impl Basis {
    pub fn new(d: usize, level: usize) -> Self {
        let mut offsets = Vec::with_capacity(level + 2);
        let mut acc = 0usize;
        let mut size = 1usize;
        for _ in 0..=level {
            offsets.push(acc);
            acc += size;
            size *= d;
        }
        offsets.push(acc);
        Self { d, level, offsets }
    }

    pub fn len(&self) -> usize {
        self.offsets[self.level + 1]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn level_range(&self, n: usize) -> Range<usize> {
        self.offsets[n]..self.offsets[n + 1]
    }

    pub fn level_of(&self, idx: usize) -> usize {
        self.offsets.partition_point(|&o| o <= idx) - 1
    }

    pub fn index(&self, word: &[usize]) -> usize {
        let local = word.iter().fold(0usize, |acc, &l| acc * self.d + (l - 1));
        self.offsets[word.len()] + local
    }

    pub fn word(&self, idx: usize) -> TensorWord {
        let n = self.level_of(idx);
        let mut local = idx - self.offsets[n];
        let mut letters = vec![0; n];
        for slot in letters.iter_mut().rev() {
            *slot = local % self.d + 1;
            local /= self.d;
        }
        TensorWord(letters)
    }

    pub fn labels(&self) -> Vec<String> {
        (0..self.len()).map(|i| self.word(i).to_string()).collect()
    }
}

/// Gram matrix of the deformed inner product on one tensor level.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelGram<R> {
    pub level: usize,
    pub matrix: DenseMatrix<R>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PositivityReport {
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
    /// Eigenvalues at or below `1e-10 · ‖G‖` count as zero.
    pub tolerance: f64,
    pub is_positive_definite: bool,
    pub is_positive_semidefinite: bool,
}

impl<R: Real> LevelGram<R> {
    pub fn positivity(&self) -> PositivityReport {
        let eig = SymmetricEigen::new(self.matrix.to_nalgebra());
        let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        let max = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let tolerance = 1e-10 * min.abs().max(max.abs());
        PositivityReport {
            min_eigenvalue: min,
            max_eigenvalue: max,
            tolerance,
            is_positive_definite: min > tolerance,
            is_positive_semidefinite: min >= -tolerance,
        }
    }
}

/// Gram matrix of level `n`: entry `(w, v) = Σ_π q^inv(π) t^coinv(π) Π_k δ(w_k = v_{π(k)})`.
pub fn gram_matrix<R: Real>(params: &FockParams<R>, n: usize, guards: &Guards) -> Result<LevelGram<R>> {
    if n > params.level {
        return Err(Error::Invalid(format!("level {n} exceeds cutoff {}", params.level)));
    }
    let dim = params.d.checked_pow(n as u32).unwrap_or(usize::MAX);
    guards.check_dim(dim)?;
    let mut weights = Vec::new();
    for_each_permutation(n, guards, |pi| {
        let w = params.q.powu(pi.inversions() as u32) * params.t.powu(pi.coinversions() as u32);
        weights.push((pi.images().to_vec(), w));
    })?;

    let basis = Basis::new(params.d, n);
    let offset = basis.level_range(n).start;
    let mut matrix = DenseMatrix::zeros(dim, dim);
    let mut v = vec![0usize; n];
    for row in 0..dim {
        let w = basis.word(offset + row).0;
        for (pi, weight) in &weights {
            for k in 0..n {
                v[pi[k] - 1] = w[k];
            }
            let col = basis.index(&v) - offset;
            let cur = std::mem::replace(&mut matrix[(row, col)], R::zero());
            matrix[(row, col)] = cur + weight.clone();
        }
    }
    Ok(LevelGram { level: n, matrix })
}

/// Level-`n` Gram block from level `n-1` by expanding on the first letter of the row word:
/// `G_n[w, v] = Σ_k q^{k-1} t^{n-k} δ(w_1 = v_k) G_{n-1}[w_2…w_n, v without v_k]`.
///
/// Used by [`FockTruncation`] for levels whose `n!` permutation sum exceeds the guard.
pub fn gram_from_previous_level<R: Real>(
    params: &FockParams<R>,
    previous: &LevelGram<R>,
    guards: &Guards,
) -> Result<LevelGram<R>> {
    let n = previous.level + 1;
    let dim = params.d.checked_pow(n as u32).unwrap_or(usize::MAX);
    guards.check_dim(dim)?;
    let basis = Basis::new(params.d, n);
    let offset = basis.level_range(n).start;
    let prev_offset = basis.level_range(n - 1).start;
    let mut matrix = DenseMatrix::zeros(dim, dim);
    let mut rest = Vec::with_capacity(n);
    for row in 0..dim {
        let w = basis.word(offset + row).0;
        let tail = basis.index(&w[1..]) - prev_offset;
        for col in 0..dim {
            let v = basis.word(offset + col).0;
            let mut acc = R::zero();
            for k in 0..n {
                if v[k] != w[0] {
                    continue;
                }
                rest.clear();
                rest.extend(v[..k].iter().chain(&v[k + 1..]).copied());
                let sub = &previous.matrix[(tail, basis.index(&rest) - prev_offset)];
                if sub.is_zero() {
                    continue;
                }
                acc = acc + params.q.powu(k as u32) * params.t.powu((n - 1 - k) as u32) * sub.clone();
            }
            matrix[(row, col)] = acc;
        }
    }
    Ok(LevelGram { level: n, matrix })
}

/// Deformed inner product of two basis words by the defining recursion on the first letter.
pub fn inner_product_words<R: Real>(q: &R, t: &R, g: &[usize], h: &[usize]) -> R {
    if g.len() != h.len() {
        return R::zero();
    }
    let n = g.len();
    if n == 0 {
        return R::one();
    }
    let mut acc = R::zero();
    let mut rest = Vec::with_capacity(n - 1);
    for k in 0..n {
        if g[0] != h[k] {
            continue;
        }
        rest.clear();
        rest.extend(h[..k].iter().chain(&h[k + 1..]).copied());
        let coeff = q.powu(k as u32) * t.powu((n - 1 - k) as u32);
        acc = acc + coeff * inner_product_words(q, t, &g[1..], &rest);
    }
    acc
}

/// A finitely supported vector of the truncated Fock space with real amplitudes.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct FockVector<R> {
    amplitudes: BTreeMap<TensorWord, R>,
}

impl<R: Real> FockVector<R> {
    pub fn new() -> Self {
        Self {
            amplitudes: BTreeMap::new(),
        }
    }

    pub fn basis(word: &[usize]) -> Self {
        let mut v = Self::new();
        v.add(word, R::one());
        v
    }

    pub fn vacuum() -> Self {
        Self::basis(&[])
    }

    pub fn add(&mut self, word: &[usize], amp: R) {
        let key = TensorWord(word.to_vec());
        let cur = self.amplitudes.remove(&key).unwrap_or_else(R::zero) + amp;
        if !cur.is_zero() {
            self.amplitudes.insert(key, cur);
        }
    }

    pub fn with(mut self, word: &[usize], amp: R) -> Self {
        self.add(word, amp);
        self
    }

    pub fn amplitudes(&self) -> impl Iterator<Item = (&TensorWord, &R)> {
        self.amplitudes.iter()
    }

    pub fn max_len(&self) -> usize {
        self.amplitudes.keys().map(TensorWord::len).max().unwrap_or(0)
    }

    pub fn to_coords(&self, basis: &Basis) -> Vec<R> {
        let mut out = vec![R::zero(); basis.len()];
        for (w, a) in &self.amplitudes {
            out[basis.index(&w.0)] = a.clone();
        }
        out
    }

    pub fn from_coords(basis: &Basis, coords: &[R]) -> Self {
        let mut v = Self::new();
        for (i, a) in coords.iter().enumerate() {
            if !a.is_zero() {
                v.add(&basis.word(i).0, a.clone());
            }
        }
        v
    }
}

/// Inner product of two vectors, computed from the word recursion (no Gram matrix).
pub fn inner_product<R: Real>(params: &FockParams<R>, x: &FockVector<R>, y: &FockVector<R>) -> Result<R> {
    for v in [x, y] {
        if v.max_len() > params.level {
            return Err(Error::Truncation {
                reached: v.max_len(),
                level: params.level,
            });
        }
    }
    let mut acc = R::zero();
    for (g, a) in &x.amplitudes {
        for (h, b) in &y.amplitudes {
            if g.len() == h.len() {
                acc = acc + a.clone() * b.clone() * inner_product_words(&params.q, &params.t, &g.0, &h.0);
            }
        }
    }
    Ok(acc)
}

/// The truncated space: basis, per-level Gram blocks and operator constructors.
#[derive(Clone, Debug)]
pub struct FockTruncation<R> {
    params: FockParams<R>,
    basis: Basis,
    grams: Vec<LevelGram<R>>,
}

impl<R: Real> FockTruncation<R> {
    pub fn new(params: FockParams<R>, guards: &Guards) -> Result<Self> {
        let basis = Basis::new(params.d, params.level);
        guards.check_dim(basis.len())?;
        let mut grams: Vec<LevelGram<R>> = Vec::with_capacity(params.level + 1);
        for n in 0..=params.level {
            let g = if n <= guards.max_perm_n {
                gram_matrix(&params, n, guards)?
            } else {
                gram_from_previous_level(&params, &grams[n - 1], guards)?
            };
            grams.push(g);
        }
        Ok(Self { params, basis, grams })
    }

    pub fn params(&self) -> &FockParams<R> {
        &self.params
    }

    pub fn basis(&self) -> &Basis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn level_gram(&self, n: usize) -> &LevelGram<R> {
        &self.grams[n]
    }

    /// Block-diagonal Gram matrix over the whole truncated basis.
    pub fn full_gram(&self) -> DenseMatrix<R> {
        let mut g = DenseMatrix::zeros(self.dim(), self.dim());
        for (n, block) in self.grams.iter().enumerate() {
            let r = self.basis.level_range(n);
            for i in 0..r.len() {
                for j in 0..r.len() {
                    g[(r.start + i, r.start + j)] = block.matrix[(i, j)].clone();
                }
            }
        }
        g
    }

    /// `G · m`, applied level by level.
    pub fn gram_times(&self, m: &DenseMatrix<R>) -> DenseMatrix<R> {
        let mut out = DenseMatrix::zeros(m.rows(), m.cols());
        for (n, block) in self.grams.iter().enumerate() {
            let r = self.basis.level_range(n);
            for i in 0..r.len() {
                for k in 0..r.len() {
                    let g = &block.matrix[(i, k)];
                    if g.is_zero() {
                        continue;
                    }
                    for j in 0..m.cols() {
                        let x = &m[(r.start + k, j)];
                        if x.is_zero() {
                            continue;
                        }
                        let cur = std::mem::replace(&mut out[(r.start + i, j)], R::zero());
                        out[(r.start + i, j)] = cur + g.clone() * x.clone();
                    }
                }
            }
        }
        out
    }

    /// `xᵀ G y` for coordinate vectors.
    pub fn inner(&self, x: &[R], y: &[R]) -> R {
        let mut acc = R::zero();
        for (n, block) in self.grams.iter().enumerate() {
            let r = self.basis.level_range(n);
            for i in 0..r.len() {
                if x[r.start + i].is_zero() {
                    continue;
                }
                for j in 0..r.len() {
                    acc = acc + x[r.start + i].clone() * block.matrix[(i, j)].clone() * y[r.start + j].clone();
                }
            }
        }
        acc
    }

    fn check_vector(&self, f: &[R]) -> Result<()> {
        if f.len() != self.params.d {
            return Err(Error::Invalid(format!(
                "one-particle vector has {} coordinates, expected d = {}",
                f.len(),
                self.params.d
            )));
        }
        Ok(())
    }

    /// `a(f)*`: prepends `f`; words already at the cutoff level are sent to zero.
    pub fn creation_matrix(&self, f: &[R]) -> Result<DenseMatrix<R>> {
        self.check_vector(f)?;
        let dim = self.dim();
        let mut m = DenseMatrix::zeros(dim, dim);
        let mut word = Vec::with_capacity(self.params.level);
        for col in 0..self.basis.level_range(self.params.level).start {
            let w = self.basis.word(col).0;
            for (i, fi) in f.iter().enumerate() {
                if fi.is_zero() {
                    continue;
                }
                word.clear();
                word.push(i + 1);
                word.extend_from_slice(&w);
                m[(self.basis.index(&word), col)] = fi.clone();
            }
        }
        Ok(m)
    }

    /// `a(f)`: removes the `k`-th letter with weight `q^{k-1} t^{n-k} ⟨f, e_{h_k}⟩`.
    pub fn annihilation_matrix(&self, f: &[R]) -> Result<DenseMatrix<R>> {
        self.check_vector(f)?;
        let dim = self.dim();
        let (q, t) = (&self.params.q, &self.params.t);
        let mut m = DenseMatrix::zeros(dim, dim);
        let mut rest = Vec::with_capacity(self.params.level);
        for col in 1..dim {
            let h = self.basis.word(col).0;
            let n = h.len();
            for k in 0..n {
                let fk = &f[h[k] - 1];
                if fk.is_zero() {
                    continue;
                }
                rest.clear();
                rest.extend(h[..k].iter().chain(&h[k + 1..]).copied());
                let row = self.basis.index(&rest);
                let w = q.powu(k as u32) * t.powu((n - 1 - k) as u32) * fk.clone();
                let cur = std::mem::replace(&mut m[(row, col)], R::zero());
                m[(row, col)] = cur + w;
            }
        }
        Ok(m)
    }

    /// Field operator `s(f) = a(f) + a(f)*`.
    pub fn field_matrix(&self, f: &[R]) -> Result<DenseMatrix<R>> {
        Ok(self.annihilation_matrix(f)?.add(&self.creation_matrix(f)?))
    }

    /// `t^N`: diagonal with entry `t^{|w|}`.
    pub fn number_weight_matrix(&self) -> DenseMatrix<R> {
        let mut m = DenseMatrix::zeros(self.dim(), self.dim());
        for i in 0..self.dim() {
            m[(i, i)] = self.params.t.powu(self.basis.level_of(i) as u32);
        }
        m
    }

    fn unit(&self, i: usize) -> Vec<R> {
        let mut f = vec![R::zero(); self.params.d];
        f[i] = R::one();
        f
    }

    /// `max |⟨a(f)* ξ, η⟩ − ⟨ξ, a(f) η⟩|` over basis words with `|ξ| < L` and `f ∈ {e_i}`.
    pub fn check_adjoint(&self) -> Result<R> {
        let cutoff = self.basis.level_range(self.params.level).start;
        let mut worst = R::zero();
        for i in 0..self.params.d {
            let f = self.unit(i);
            let gc = self.gram_times(&self.creation_matrix(&f)?);
            let ga = self.gram_times(&self.annihilation_matrix(&f)?);
            for xi in 0..cutoff {
                for eta in 0..self.dim() {
                    // ⟨a* ξ, η⟩ = (G C)[η, ξ],  ⟨ξ, a η⟩ = (G A)[ξ, η]
                    let r = (gc[(eta, xi)].clone() - ga[(xi, eta)].clone()).abs();
                    if r > worst {
                        worst = r;
                    }
                }
            }
        }
        Ok(worst)
    }

    /// Entrywise residual of `a(f) a(g)* − q a(g)* a(f) − ⟨f,g⟩ t^N` on levels `< L`.
    pub fn check_commutation(&self, f: &[R], g: &[R]) -> Result<R> {
        let a_f = self.annihilation_matrix(f)?;
        let c_g = self.creation_matrix(g)?;
        let fg = f.iter().zip(g).fold(R::zero(), |acc, (a, b)| acc + a.clone() * b.clone());
        let lhs = a_f.matmul(&c_g);
        let twisted = c_g.matmul(&a_f).scale(&self.params.q);
        let rhs = self.number_weight_matrix().scale(&fg);
        let residual = lhs.sub(&twisted).sub(&rhs);
        let cutoff = self.basis.level_range(self.params.level).start;
        let mut worst = R::zero();
        for row in 0..self.dim() {
            for col in 0..cutoff {
                let r = residual[(row, col)].abs();
                if r > worst {
                    worst = r;
                }
            }
        }
        Ok(worst)
    }

    /// Commutation residual for every pair of basis vectors `(e_i, e_j)`.
    pub fn check_commutation_all(&self) -> Result<R> {
        let mut worst = R::zero();
        for i in 0..self.params.d {
            for j in 0..self.params.d {
                let r = self.check_commutation(&self.unit(i), &self.unit(j))?;
                if r > worst {
                    worst = r;
                }
            }
        }
        Ok(worst)
    }

    /// `⟨Ω, b_1 ⋯ b_k Ω⟩` for a word of creation (`Star`) and annihilation (`One`) operators.
    pub fn vacuum_moment(&self, word: &[(Vec<R>, Letter)]) -> Result<R> {
        let mut height = 0usize;
        for (_, letter) in word.iter().rev() {
            match letter {
                Letter::Star => {
                    height += 1;
                    if height > self.params.level {
                        return Err(Error::Truncation {
                            reached: height,
                            level: self.params.level,
                        });
                    }
                }
                Letter::One => height = height.saturating_sub(1),
            }
        }
        let mut v = vec![R::zero(); self.dim()];
        v[0] = R::one();
        for (f, letter) in word.iter().rev() {
            let m = match letter {
                Letter::Star => self.creation_matrix(f)?,
                Letter::One => self.annihilation_matrix(f)?,
            };
            v = m.matvec(&v);
        }
        // ⟨Ω, ·⟩ reads the vacuum coordinate (G_0 = 1, levels are orthogonal).
        Ok(v[0].clone())
    }

    /// `⟨Ω, s(h_1) ⋯ s(h_k) Ω⟩`.
    pub fn field_moment(&self, vectors: &[Vec<R>]) -> Result<R> {
        if vectors.len() > 2 * self.params.level {
            return Err(Error::Truncation {
                reached: vectors.len(),
                level: self.params.level,
            });
        }
        let mut v = vec![R::zero(); self.dim()];
        v[0] = R::one();
        for f in vectors.iter().rev() {
            v = self.field_matrix(f)?.matvec(&v);
        }
        Ok(v[0].clone())
    }
}

/// Case of the operator-norm formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum NormCase {
    /// `0 <= -q < t <= 1`: norm `‖f‖`.
    NonPositiveQ,
    /// `0 < q < t = 1`: norm `‖f‖ / √(1-q)`.
    TEqualsOne,
    /// `0 < q < t < 1`: norm `‖f‖ √[n*]_{q,t}`.
    Interior,
}

impl fmt::Display for NormCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormCase::NonPositiveQ => "0<=-q<t<=1",
            NormCase::TEqualsOne => "0<q<t=1",
            NormCase::Interior => "0<q<t<1",
        })
    }
}

/// `n* = ⌈(log(1-q) - log(1-t)) / (log t - log q)⌉`, the maximiser of `t^n - q^n`.
pub fn n_star(q: f64, t: f64) -> Result<u32> {
    if !(0.0 < q && q < t && t < 1.0) {
        return Err(Error::Domain(format!("n* needs 0 < q < t < 1, got q = {q}, t = {t}")));
    }
    let ratio = ((1.0 - q).ln() - (1.0 - t).ln()) / (t.ln() - q.ln());
    // At an integer ratio n and n + 1 tie; rounding noise must not push the ceiling up.
    let nearest = ratio.round();
    let n = if (ratio - nearest).abs() <= 1e-9 * ratio.abs().max(1.0) {
        nearest
    } else {
        ratio.ceil()
    };
    Ok(n.max(1.0) as u32)
}

/// Smallest maximiser of `t^n - q^n` over `n >= 1`, by direct scan.
pub fn n_star_scan(q: f64, t: f64) -> Result<u32> {
    if !(0.0 < q && q < t && t < 1.0) {
        return Err(Error::Domain(format!("n* needs 0 < q < t < 1, got q = {q}, t = {t}")));
    }
    let gap = |n: i32| t.powi(n) - q.powi(n);
    let mut n = 1;
    while gap(n + 1) > gap(n) * (1.0 + 1e-12) {
        n += 1;
    }
    Ok(n as u32)
}

/// Closed-form `‖a(f)‖` for a one-particle vector of norm `f_norm`.
pub fn theoretical_norm(q: f64, t: f64, f_norm: f64) -> Result<(f64, NormCase)> {
    if !(t > 0.0 && t <= 1.0) || q.abs() >= t {
        return Err(Error::Domain(format!(
            "the norm formula needs |q| < t <= 1, got q = {q}, t = {t}"
        )));
    }
    if q <= 0.0 {
        Ok((f_norm, NormCase::NonPositiveQ))
    } else if t == 1.0 {
        Ok((f_norm / (1.0 - q).sqrt(), NormCase::TEqualsOne))
    } else {
        let n = n_star(q, t)? as i32;
        let value = ((t.powi(n) - q.powi(n)) / (t - q)).sqrt();
        Ok((f_norm * value, NormCase::Interior))
    }
}

/// Largest singular value of `a(f)` in the deformed geometry, `‖G^{1/2} A G^{-1/2}‖₂`.
///
/// `A` maps level `n` to level `n-1`, so the norm is the maximum over the level blocks.
pub fn operator_norm(params: &FockParams<f64>, f: &[f64], guards: &Guards) -> Result<f64> {
    if params.q.abs() >= params.t {
        return Err(Error::Domain("operator norm needs |q| < t".into()));
    }
    let trunc = FockTruncation::new(params.clone(), guards)?;
    let a = trunc.annihilation_matrix(f)?.to_nalgebra();
    let roots: Vec<(DMatrix<f64>, DMatrix<f64>)> = (0..=params.level)
        .map(|n| gram_roots(&trunc.level_gram(n).matrix.to_nalgebra()))
        .collect::<Result<_>>()?;
    let mut norm = 0.0f64;
    for n in 1..=params.level {
        let rows = trunc.basis.level_range(n - 1);
        let cols = trunc.basis.level_range(n);
        let block = a.view((rows.start, cols.start), (rows.len(), cols.len())).into_owned();
        let b = &roots[n - 1].0 * block * &roots[n].1;
        let s = b.singular_values().max();
        norm = norm.max(s);
    }
    Ok(norm)
}

/// `(G^{1/2}, G^{-1/2})` for a symmetric positive definite Gram block.
fn gram_roots(g: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let eig = SymmetricEigen::new(g.clone());
    let max = eig.eigenvalues.amax();
    if eig.eigenvalues.iter().any(|&l| l <= 1e-12 * max) {
        return Err(Error::Domain("Gram block is not positive definite".into()));
    }
    let v = &eig.eigenvectors;
    let sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    let inv_sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    Ok((v * sqrt * v.transpose(), v * inv_sqrt * v.transpose()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combin::qt_factorial;
    use crate::scalar::rational;
    use num_rational::BigRational;
    use num_traits::Zero;

    fn params(q: f64, t: f64, d: usize, level: usize) -> FockParams<f64> {
        FockParams::new(q, t, d, level).unwrap()
    }

    #[test]
    fn parameter_validation() {
        assert!(FockParams::new(0.5, 0.5, 2, 2).is_err());
        assert!(FockParams::new_relaxed(0.5, 0.5, 2, 2).is_ok());
        assert!(FockParams::new_relaxed(1.0, 1.0, 2, 2).is_err());
        assert!(FockParams::new(0.0, 1.2, 2, 2).is_err());
        assert!(FockParams::new(0.0, 0.0, 2, 2).is_err());
        assert!(FockParams::new(-0.9, 0.8, 2, 2).is_err());
        assert!(FockParams::new(0.1, 0.8, 0, 2).is_err());
    }

    #[test]
    fn basis_indexing_round_trips() {
        let b = Basis::new(3, 3);
        assert_eq!(b.len(), 1 + 3 + 9 + 27);
        for i in 0..b.len() {
            assert_eq!(b.index(&b.word(i).0), i);
        }
        assert_eq!(b.word(0), TensorWord::vacuum());
        assert_eq!(b.level_of(4), 2);
        assert_eq!(b.word(5).to_string(), "e1⊗e2");
    }

    #[test]
    fn level_one_gram_is_identity() {
        let p = params(0.3, 0.7, 3, 2);
        let g = gram_matrix(&p, 1, &Guards::default()).unwrap();
        assert_eq!(g.matrix, DenseMatrix::identity(3));
    }

    #[test]
    fn level_two_gram_entries() {
        let p = FockParams::new(rational(1, 3), rational(2, 3), 2, 2).unwrap();
        let g = gram_matrix(&p, 2, &Guards::default()).unwrap();
        let b = Basis::new(2, 2);
        let off = b.level_range(2).start;
        let idx = |w: &[usize]| b.index(w) - off;
        let (q, t) = (rational(1, 3), rational(2, 3));
        assert_eq!(g.matrix[(idx(&[1, 2]), idx(&[1, 2]))], t);
        assert_eq!(g.matrix[(idx(&[1, 2]), idx(&[2, 1]))], q);
        assert_eq!(g.matrix[(idx(&[1, 1]), idx(&[1, 1]))], q.clone() + t.clone());
        assert!(g.matrix.is_symmetric());

        let sym = FockVector::basis(&[1, 2]).with(&[2, 1], rational(1, 1));
        let anti = FockVector::basis(&[1, 2]).with(&[2, 1], rational(-1, 1));
        assert_eq!(inner_product(&p, &sym, &sym).unwrap(), rational(2, 1) * (t.clone() + q.clone()));
        assert_eq!(inner_product(&p, &anti, &anti).unwrap(), rational(2, 1) * (t - q));
    }

    #[test]
    fn recursion_matches_gram_exactly() {
        let p = FockParams::new(rational(-1, 4), rational(3, 5), 2, 4).unwrap();
        let trunc = FockTruncation::new(p.clone(), &Guards::default()).unwrap();
        let b = trunc.basis();
        for i in 0..b.len() {
            for j in 0..b.len() {
                let (wi, wj) = (b.word(i), b.word(j));
                let rec = inner_product_words(p.q(), p.t(), &wi.0, &wj.0);
                let mut x = vec![BigRational::zero(); b.len()];
                let mut y = x.clone();
                x[i] = rational(1, 1);
                y[j] = rational(1, 1);
                assert_eq!(rec, trunc.inner(&x, &y), "{wi} vs {wj}");
            }
        }
    }

    #[test]
    fn level_recursion_matches_permutation_sum() {
        let g = Guards::default();
        let p = FockParams::new(rational(2, 7), rational(5, 6), 2, 5).unwrap();
        let mut prev = gram_matrix(&p, 0, &g).unwrap();
        for n in 1..=5 {
            let by_perm = gram_matrix(&p, n, &g).unwrap();
            let by_level = gram_from_previous_level(&p, &prev, &g).unwrap();
            assert_eq!(by_perm, by_level, "level {n}");
            prev = by_perm;
        }
    }

    #[test]
    fn vacuum_and_level_one_products() {
        let p = params(0.2, 0.9, 2, 3);
        let omega = FockVector::vacuum();
        assert_eq!(inner_product(&p, &omega, &omega).unwrap(), 1.0);
        let e1 = FockVector::basis(&[1]);
        let e2 = FockVector::basis(&[2]);
        assert_eq!(inner_product(&p, &e1, &e2).unwrap(), 0.0);
        assert_eq!(inner_product(&p, &e1, &e1).unwrap(), 1.0);
        assert_eq!(inner_product(&p, &e1, &omega).unwrap(), 0.0);
        let too_long = FockVector::basis(&[1, 1, 1, 1]);
        assert!(matches!(inner_product(&p, &too_long, &e1), Err(Error::Truncation { .. })));
    }

    #[test]
    fn power_norm_is_qt_factorial() {
        let (q, t) = (rational(1, 3), rational(3, 4));
        for n in 0..=5u32 {
            let w = vec![1; n as usize];
            assert_eq!(inner_product_words(&q, &t, &w, &w), qt_factorial(n, &q, &t));
        }
    }

    #[test]
    fn positivity_examples() {
        let g = Guards::default();
        let free = gram_matrix(&params(0.0, 1.0, 2, 3), 3, &g).unwrap().positivity();
        assert!((free.min_eigenvalue - 1.0).abs() < 1e-12 && (free.max_eigenvalue - 1.0).abs() < 1e-12);
        let pd = gram_matrix(&params(0.5, 0.8, 2, 2), 2, &g).unwrap().positivity();
        assert!(pd.is_positive_definite);
        // Boundary q = t: e1⊗e2 − e2⊗e1 is a null vector.
        let edge = FockParams::new_relaxed(0.8, 0.8, 2, 2).unwrap();
        let rep = gram_matrix(&edge, 2, &g).unwrap().positivity();
        assert!(!rep.is_positive_definite);
        assert!(rep.is_positive_semidefinite);
        assert!(rep.min_eigenvalue.abs() < 1e-12);
    }

    #[test]
    fn operator_actions() {
        let p = FockParams::new(rational(1, 5), rational(1, 2), 2, 3).unwrap();
        let trunc = FockTruncation::new(p, &Guards::default()).unwrap();
        let b = trunc.basis().clone();
        let e1 = vec![rational(1, 1), rational(0, 1)];
        let a = trunc.annihilation_matrix(&e1).unwrap();
        let c = trunc.creation_matrix(&e1).unwrap();
        let apply = |m: &DenseMatrix<BigRational>, w: &[usize]| {
            FockVector::from_coords(&b, &m.matvec(&FockVector::basis(w).to_coords(&b)))
        };
        assert_eq!(apply(&a, &[]), FockVector::new());
        assert_eq!(apply(&a, &[1]), FockVector::vacuum());
        assert_eq!(apply(&a, &[2]), FockVector::new());
        assert_eq!(apply(&a, &[2, 1]), FockVector::new().with(&[2], rational(1, 5)));
        assert_eq!(apply(&a, &[1, 2]), FockVector::new().with(&[2], rational(1, 2)));
        assert_eq!(apply(&c, &[]), FockVector::basis(&[1]));
        assert_eq!(apply(&c, &[2, 1]), FockVector::basis(&[1, 2, 1]));
        // Truncation: creation at the top level vanishes.
        assert_eq!(apply(&c, &[2, 1, 1]), FockVector::new());

        let tn = trunc.number_weight_matrix();
        assert_eq!(tn[(0, 0)], rational(1, 1));
        let top = b.index(&[1, 2, 2]);
        assert_eq!(tn[(top, top)], rational(1, 8));
        let free = FockTruncation::new(params(0.0, 1.0, 2, 3), &Guards::default()).unwrap();
        assert_eq!(free.number_weight_matrix(), DenseMatrix::identity(free.dim()));
    }

    #[test]
    fn adjointness_and_commutation() {
        let g = Guards::default();
        let free = FockTruncation::new(params(0.0, 1.0, 2, 3), &g).unwrap();
        assert_eq!(free.check_adjoint().unwrap(), 0.0);
        assert_eq!(free.check_commutation_all().unwrap(), 0.0);

        let float = FockTruncation::new(params(0.3, 0.7, 2, 4), &g).unwrap();
        assert!(float.check_adjoint().unwrap() <= 1e-12);
        let f2 = FockTruncation::new(params(0.4, 0.9, 2, 5), &g).unwrap();
        assert!(f2.check_commutation(&[1.0, 0.0], &[1.0, 0.0]).unwrap() <= 1e-12);

        let exact = FockTruncation::new(FockParams::new(rational(1, 3), rational(2, 3), 2, 4).unwrap(), &g).unwrap();
        assert!(exact.check_adjoint().unwrap().is_zero());
        assert!(exact.check_commutation_all().unwrap().is_zero());

        // Chakrabarti–Jagannathan: t = 1/p, a a* − q a* a = p^{-N}.
        let cj = FockTruncation::new(FockParams::new(rational(1, 4), rational(1, 3), 1, 5).unwrap(), &g).unwrap();
        assert!(cj.check_commutation(&[rational(1, 1)], &[rational(1, 1)]).unwrap().is_zero());
    }

    #[test]
    fn top_level_is_excluded_from_commutation() {
        // Without the truncation guard the relation fails on level L; make sure the check skips it.
        let g = Guards::default();
        let trunc = FockTruncation::new(params(0.4, 0.9, 1, 3), &g).unwrap();
        let a = trunc.annihilation_matrix(&[1.0]).unwrap();
        let c = trunc.creation_matrix(&[1.0]).unwrap();
        let m = a.matmul(&c);
        let top = trunc.dim() - 1;
        assert_eq!(m[(top, top)], 0.0);
        assert!(trunc.check_commutation(&[1.0], &[1.0]).unwrap() <= 1e-12);
    }

    #[test]
    fn n_star_examples() {
        assert_eq!(n_star(0.5, 0.8).unwrap(), 2);
        assert_eq!(n_star_scan(0.5, 0.8).unwrap(), 2);
        assert_eq!(n_star(1e-9, 0.7).unwrap(), 1);
        assert_eq!(n_star(0.1, 0.9).unwrap(), n_star_scan(0.1, 0.9).unwrap());
        assert!(n_star(0.8, 0.5).is_err());
        assert!(n_star(0.0, 0.5).is_err());
    }

    #[test]
    fn theoretical_norm_cases() {
        let (v, c) = theoretical_norm(-0.3, 0.5, 1.0).unwrap();
        assert_eq!((v, c), (1.0, NormCase::NonPositiveQ));
        let (v, c) = theoretical_norm(0.5, 1.0, 1.0).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-15 && c == NormCase::TEqualsOne);
        let (v, c) = theoretical_norm(0.5, 0.8, 1.0).unwrap();
        assert!((v - 1.3f64.sqrt()).abs() < 1e-15 && c == NormCase::Interior);
        assert!(theoretical_norm(0.5, 0.5, 1.0).is_err());
        assert!(theoretical_norm(0.5, 1.1, 1.0).is_err());
        assert_eq!(NormCase::TEqualsOne.to_string(), "0<q<t=1");
    }

    #[test]
    fn numeric_norm_matches_formula() {
        let g = Guards::default();
        let n = operator_norm(&params(0.5, 0.8, 1, 12), &[1.0], &g).unwrap();
        assert!((n - 1.3f64.sqrt()).abs() < 1e-10);
        // Same value with a second one-particle direction present.
        let n2 = operator_norm(&params(0.5, 0.8, 2, 5), &[1.0, 0.0], &g).unwrap();
        assert!((n2 - 1.3f64.sqrt()).abs() < 1e-10);
        let neg = operator_norm(&params(-0.3, 0.5, 2, 4), &[0.0, 1.0], &g).unwrap();
        assert!((neg - 1.0).abs() < 1e-10);
        // Scaling f scales the norm.
        let scaled = operator_norm(&params(0.5, 0.8, 1, 8), &[3.0], &g).unwrap();
        assert!((scaled - 3.0 * 1.3f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn vacuum_moments() {
        let trunc = FockTruncation::new(params(0.3, 0.6, 1, 4), &Guards::default()).unwrap();
        let e = vec![1.0];
        let m = trunc
            .vacuum_moment(&[(e.clone(), Letter::One), (e.clone(), Letter::Star)])
            .unwrap();
        assert_eq!(m, 1.0);
        let m = trunc
            .vacuum_moment(&[(e.clone(), Letter::Star), (e.clone(), Letter::One)])
            .unwrap();
        assert_eq!(m, 0.0);
        let m4 = trunc.field_moment(&vec![e.clone(); 4]).unwrap();
        assert!((m4 - (1.0 + 0.3 + 0.6)).abs() < 1e-14);
        let climb = vec![(e.clone(), Letter::Star); 5];
        assert!(matches!(trunc.vacuum_moment(&climb), Err(Error::Truncation { .. })));
    }
}
