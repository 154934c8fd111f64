//! Grunsky coefficients, the truncated Grunsky operator and its norm.
//!
//! For a germ `f(z) = z + b_0 + b_1/z + …` the coefficients `α_{mn}` come from
//!
//! ```text
//! log[(f(z) - f(ζ))/(z - ζ)] = -Σ α_{mn} z^{-m} ζ^{-n}
//! ```
//!
//! and the operator is `β_{mn} = √(mn) α_{mn}`. Its largest singular value on
//! the leading `N × N` block is a lower bound for the Grunsky norm `κ(f)`
//! which does not decrease as `N` grows.

use num_complex::Complex;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::scalar::{Cx, Real};
use crate::series::{BivariateSeries, ExteriorSeries, SeriesError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GrunskyError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("germ order {have} is too low for N = {n}; need K >= {need}")]
    InsufficientOrder { n: usize, need: usize, have: usize },
    #[error("truncation N must be at least 1")]
    EmptyTruncation,
    #[error("homotopy parameter with |s| = {modulus} leaves the closed unit disk")]
    OutsideDisk { modulus: f64 },
    #[error("certificate slack must be positive")]
    NonPositiveSlack,
}

pub type Result<T, E = GrunskyError> = std::result::Result<T, E>;

/// Row-major square matrix of complex entries, indices starting at 1.
#[derive(Debug, Clone, PartialEq)]
struct Square<T> {
    n: usize,
    data: Vec<Cx<T>>,
}

impl<T: Real> Square<T> {
    #[inline]
    fn at(&self, m: usize, n: usize) -> Cx<T> {
        self.data[(m - 1) * self.n + (n - 1)]
    }

    fn max_asymmetry(&self) -> T {
        let mut worst = T::zero();
        for m in 1..=self.n {
            for n in m + 1..=self.n {
                worst = worst.max((self.at(m, n) - self.at(n, m)).norm());
            }
        }
        worst
    }
}

/// `α_{mn}` for `1 <= m, n <= N`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrunskyCoefficients<T> {
    inner: Square<T>,
}

impl<T: Real> GrunskyCoefficients<T> {
    /// From row-major data of length `N²`.
    pub fn from_rows(n: usize, data: Vec<Cx<T>>) -> Result<Self> {
        if n == 0 {
            return Err(GrunskyError::EmptyTruncation);
        }
        assert_eq!(data.len(), n * n, "coefficient block must be N x N");
        Ok(Self {
            inner: Square { n, data },
        })
    }

    pub fn truncation(&self) -> usize {
        self.inner.n
    }

    /// `α_{mn}`, 1-based.
    pub fn get(&self, m: usize, n: usize) -> Cx<T> {
        self.inner.at(m, n)
    }

    pub fn max_asymmetry(&self) -> T {
        self.inner.max_asymmetry()
    }

    /// Leading `n × n` block.
    pub fn leading(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(GrunskyError::EmptyTruncation);
        }
        let n = n.min(self.truncation());
        let mut data = Vec::with_capacity(n * n);
        for i in 1..=n {
            for j in 1..=n {
                data.push(self.get(i, j));
            }
        }
        Self::from_rows(n, data)
    }

    /// `β_{mn} = √(mn) α_{mn}`.
    pub fn matrix(&self) -> GrunskyMatrix<T> {
        let n = self.truncation();
        let mut data = Vec::with_capacity(n * n);
        for i in 1..=n {
            for j in 1..=n {
                data.push(self.get(i, j) * (T::of(i) * T::of(j)).sqrt());
            }
        }
        GrunskyMatrix {
            inner: Square { n, data },
        }
    }
}

/// `β_{mn} = √(mn) α_{mn}`: complex symmetric, not Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct GrunskyMatrix<T> {
    inner: Square<T>,
}

impl<T: Real> GrunskyMatrix<T> {
    pub fn from_rows(n: usize, data: Vec<Cx<T>>) -> Result<Self> {
        if n == 0 {
            return Err(GrunskyError::EmptyTruncation);
        }
        assert_eq!(data.len(), n * n, "matrix must be N x N");
        Ok(Self {
            inner: Square { n, data },
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut data = vec![Cx::zero(); n * n];
        for i in 0..n {
            data[i * n + i] = Cx::new(T::one(), T::zero());
        }
        Self::from_rows(n, data)
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::from_rows(n, vec![Cx::zero(); n * n])
    }

    pub fn dim(&self) -> usize {
        self.inner.n
    }

    pub fn get(&self, m: usize, n: usize) -> Cx<T> {
        self.inner.at(m, n)
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Cx<T>]> {
        self.inner.data.chunks(self.inner.n)
    }

    pub fn max_asymmetry(&self) -> T {
        self.inner.max_asymmetry()
    }

    fn apply(&self, x: &[Cx<T>], out: &mut [Cx<T>]) {
        for (o, row) in out.iter_mut().zip(self.rows()) {
            *o = row
                .iter()
                .zip(x)
                .fold(Cx::zero(), |acc, (&a, &b)| acc + a * b);
        }
    }

    fn apply_adjoint(&self, y: &[Cx<T>], out: &mut [Cx<T>]) {
        out.iter_mut().for_each(|o| *o = Cx::zero());
        for (row, &yi) in self.rows().zip(y) {
            for (o, &a) in out.iter_mut().zip(row) {
                *o = *o + a.conj() * yi;
            }
        }
    }

    /// The bilinear form `Σ β_{mn} x_m x_n` (no conjugation).
    pub fn bilinear(&self, x: &[Cx<T>]) -> Cx<T> {
        let mut bx = vec![Cx::zero(); self.dim()];
        self.apply(x, &mut bx);
        bx.iter()
            .zip(x)
            .fold(Cx::zero(), |acc, (&a, &b)| acc + a * b)
    }
}

/// Extracts `α_{mn}`, `m, n <= N`, by expanding the two-point log kernel of
/// `f` as a box-truncated double series. Needs germ order `K >= 2N`.
pub fn grunsky_from_map<T: Real>(
    f: &ExteriorSeries<T>,
    n: usize,
) -> Result<GrunskyCoefficients<T>> {
    if n == 0 {
        return Err(GrunskyError::EmptyTruncation);
    }
    if f.order() < 2 * n {
        return Err(GrunskyError::InsufficientOrder {
            n,
            need: 2 * n,
            have: f.order(),
        });
    }
    let kernel = BivariateSeries::difference_quotient(f, n);
    let log = kernel.log1p()?;
    let mut data = Vec::with_capacity(n * n);
    for i in 1..=n {
        for j in 1..=n {
            data.push(-log.get(i, j));
        }
    }
    GrunskyCoefficients::from_rows(n, data)
}

/// `α_{mn} ↦ α_{mn} s^{m+n}`, the coefficients of `F_s(z) = s f(z/s)`.
pub fn grunsky_scale<T: Real>(
    alpha: &GrunskyCoefficients<T>,
    s: Cx<T>,
) -> Result<GrunskyCoefficients<T>> {
    if s.norm() > T::one() + T::tol(1e-14) {
        return Err(GrunskyError::OutsideDisk {
            modulus: s.norm().to_f64_lossy(),
        });
    }
    let n = alpha.truncation();
    let mut powers = Vec::with_capacity(n + 1);
    let mut p = Cx::new(T::one(), T::zero());
    for _ in 0..=n {
        powers.push(p);
        p = p * s;
    }
    let mut data = Vec::with_capacity(n * n);
    for i in 1..=n {
        for j in 1..=n {
            data.push(alpha.get(i, j) * powers[i] * powers[j]);
        }
    }
    GrunskyCoefficients::from_rows(n, data)
}

/// Power iteration parameters for the largest singular value.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerConfig<T> {
    pub rel_tol: T,
    pub max_iter: usize,
    pub seed: u64,
    /// Fresh random starts tried when an iterate collapses to zero.
    pub restarts: usize,
}

impl<T: Real> Default for PowerConfig<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::tol(1e-10),
            max_iter: 10_000,
            seed: 0x5eed_0001,
            restarts: 3,
        }
    }
}

/// Largest singular value with its right singular vector.
#[derive(Debug, Clone, PartialEq)]
pub struct GrunskyNorm<T> {
    pub value: T,
    /// Unit vector with `B^* B v = value² v`.
    pub right: Vec<Cx<T>>,
    pub iterations: usize,
    pub converged: bool,
}

fn normalize<T: Real>(v: &mut [Cx<T>]) -> T {
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt();
    if norm > T::zero() {
        v.iter_mut().for_each(|c| *c = *c / norm);
    }
    norm
}

fn random_unit<T: Real>(rng: &mut ChaCha8Rng, n: usize) -> Vec<Cx<T>> {
    let mut v: Vec<Cx<T>> = (0..n)
        .map(|_| {
            Complex::new(
                T::lit(rng.gen::<f64>() - 0.5),
                T::lit(rng.gen::<f64>() - 0.5),
            )
        })
        .collect();
    normalize(&mut v);
    v
}

/// Operator norm of the truncated Grunsky operator: the largest singular
/// value of `B`, from power iteration on `B^* B` with a seeded start.
pub fn grunsky_norm<T: Real>(b: &GrunskyMatrix<T>, config: &PowerConfig<T>) -> GrunskyNorm<T> {
    let n = b.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut bx = vec![Cx::zero(); n];
    let mut y = vec![Cx::zero(); n];
    let mut total = 0usize;

    for _attempt in 0..=config.restarts {
        let mut x = random_unit::<T>(&mut rng, n);
        let mut lambda = T::zero();
        for it in 0..config.max_iter {
            total += 1;
            b.apply(&x, &mut bx);
            b.apply_adjoint(&bx, &mut y);
            // Rayleigh quotient ‖Bx‖² and residual of B*B x - λ x.
            let rayleigh = bx.iter().map(|c| c.norm_sqr()).sum::<T>();
            let residual = y
                .iter()
                .zip(&x)
                .map(|(&yi, &xi)| (yi - xi * rayleigh).norm_sqr())
                .sum::<T>()
                .sqrt();
            let norm = normalize(&mut y);
            if norm == T::zero() {
                break;
            }
            std::mem::swap(&mut x, &mut y);
            let settled = (rayleigh - lambda).abs() <= config.rel_tol * rayleigh
                && residual <= config.rel_tol.sqrt() * rayleigh;
            lambda = rayleigh;
            if settled && it > 0 {
                return GrunskyNorm {
                    value: lambda.sqrt(),
                    right: x,
                    iterations: total,
                    converged: true,
                };
            }
        }
        if lambda > T::zero() {
            log::warn!(
                "grunsky_norm: no convergence after {} iterations",
                config.max_iter
            );
            return GrunskyNorm {
                value: lambda.sqrt(),
                right: x,
                iterations: total,
                converged: false,
            };
        }
    }
    // Every start collapsed: B = 0 to working precision.
    GrunskyNorm {
        value: T::zero(),
        right: {
            let mut e = vec![Cx::zero(); n];
            e[0] = Cx::new(T::one(), T::zero());
            e
        },
        iterations: total,
        converged: true,
    }
}

/// Outcome of checking the Grunsky inequality on a truncation.
#[derive(Debug, Clone, PartialEq)]
pub enum Certificate<T> {
    /// The inequality fails: `witness` is a unit vector with
    /// `|Σ β_{mn} x_m x_n| = form > 1`.
    NonUnivalent {
        norm: T,
        witness: Vec<Cx<T>>,
        form: T,
    },
    /// No violation visible at this truncation.
    Inconclusive { norm: T },
}

impl<T: Real> Certificate<T> {
    pub fn is_non_univalent(&self) -> bool {
        matches!(self, Certificate::NonUnivalent { .. })
    }

    pub fn norm(&self) -> T {
        match self {
            Certificate::NonUnivalent { norm, .. } | Certificate::Inconclusive { norm } => *norm,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Certificate::NonUnivalent { .. } => "non-univalent",
            Certificate::Inconclusive { .. } => "inconclusive",
        }
    }
}

pub const DEFAULT_SLACK: f64 = 1e-6;

/// Takagi vector for a complex symmetric `B` from a right singular vector:
/// `x` with `B x = σ x̄`, so that `xᵀ B x = σ`.
fn takagi_vector<T: Real>(b: &GrunskyMatrix<T>, right: &[Cx<T>], sigma: T) -> Vec<Cx<T>> {
    let n = b.dim();
    let mut u = vec![Cx::zero(); n];
    b.apply(right, &mut u);
    u.iter_mut().for_each(|c| *c = *c / sigma);
    // B v = σ u and B ū = σ v̄, so x = v + ū satisfies B x = σ x̄.
    let mut x: Vec<Cx<T>> = right.iter().zip(&u).map(|(&v, &w)| v + w.conj()).collect();
    if normalize(&mut x) <= T::tol(1e-8) {
        let i = Complex::new(T::zero(), T::one());
        x = right
            .iter()
            .zip(&u)
            .map(|(&v, &w)| (v - w.conj()) * i)
            .collect();
        normalize(&mut x);
    }
    x
}

/// Grunsky-inequality check on a truncated operator. A violation is only
/// claimed with an explicit witness whose bilinear form exceeds `1 + slack`.
pub fn univalence_certificate<T: Real>(
    b: &GrunskyMatrix<T>,
    slack: T,
    config: &PowerConfig<T>,
) -> Result<Certificate<T>> {
    if slack <= T::zero() {
        return Err(GrunskyError::NonPositiveSlack);
    }
    let norm = grunsky_norm(b, config);
    if norm.value > T::one() + slack {
        let witness = takagi_vector(b, &norm.right, norm.value);
        let form = b.bilinear(&witness).norm();
        if form > T::one() + slack {
            return Ok(Certificate::NonUnivalent {
                norm: norm.value,
                witness,
                form,
            });
        }
        log::warn!("certificate: norm exceeds bound but witness form {form} does not");
    }
    Ok(Certificate::Inconclusive { norm: norm.value })
}
