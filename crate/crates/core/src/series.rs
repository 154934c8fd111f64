//! Truncated power series with complex coefficients.
//!
//! Three representations live here:
//!
//! * [`TaylorSeries`]: `c_0 + c_1 x + … + c_K x^K`, the workhorse. The
//!   expansion variable is whatever the caller says it is; most of the crate
//!   uses `x = 1/z` around the point at infinity.
//! * [`ExteriorSeries`]: a normalized germ `f(z) = z + b_0 + b_1 z^{-1} + … +
//!   b_K z^{-K}` at infinity. The leading coefficient is 1 by construction.
//! * [`BivariateSeries`]: a box-truncated double series in `(u, v)`, used to
//!   expand the two-point logarithmic kernel of a germ.
//!
//! Every operation carries the truncation order explicitly: binary operations
//! truncate at the smaller order, and any non-finite coefficient is reported
//! as an error instead of being passed on.

use num_complex::Complex;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::scalar::{is_finite, real, Cx, Real};

/// Working order used when nothing else is requested.
pub const DEFAULT_ORDER: usize = 128;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("a series needs at least one coefficient")]
    Empty,
    #[error("non-finite coefficient at index {index}")]
    NonFinite { index: usize },
    #[error("log1p needs a vanishing constant term, got modulus {modulus:e}")]
    NonZeroConstant { modulus: f64 },
    #[error("series with zero constant term has no reciprocal")]
    NotInvertible,
    #[error("exterior germs need truncation order K >= 1, got {0}")]
    OrderTooLow(usize),
    #[error("homotopy parameter with |s| = {modulus} leaves the closed unit disk")]
    OutsideDisk { modulus: f64 },
    #[error("requested order {requested} exceeds available order {available}")]
    InsufficientOrder { requested: usize, available: usize },
}

pub type Result<T, E = SeriesError> = std::result::Result<T, E>;

fn check_finite<T: Real>(coeffs: &[Cx<T>]) -> Result<()> {
    match coeffs.iter().position(|c| !is_finite(*c)) {
        Some(index) => Err(SeriesError::NonFinite { index }),
        None => Ok(()),
    }
}

/// Truncated Cauchy product of two coefficient slices, keeping `len` terms.
pub(crate) fn convolve_into<T: Real>(a: &[Cx<T>], b: &[Cx<T>], out: &mut [Cx<T>]) {
    let len = out.len();
    for (i, &ai) in a.iter().enumerate().take(len) {
        if ai.is_zero() {
            continue;
        }
        for (j, &bj) in b.iter().enumerate().take(len - i) {
            out[i + j] = out[i + j] + ai * bj;
        }
    }
}

/// Truncated power series `c_0 + c_1 x + … + c_K x^K`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaylorSeries<T> {
    coeffs: Vec<Cx<T>>,
}

impl<T: Real> TaylorSeries<T> {
    /// Builds a series of order `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<Cx<T>>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(SeriesError::Empty);
        }
        check_finite(&coeffs)?;
        Ok(Self { coeffs })
    }

    /// Real coefficients, mostly for tests and examples.
    pub fn from_real(coeffs: &[T]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| real(c)).collect())
    }

    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![Cx::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = Cx::one();
        s
    }

    /// The expansion variable `x` itself.
    pub fn variable(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = Cx::one();
        }
        s
    }

    /// Truncation order `K`.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Cx<T>] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Cx<T>> {
        self.coeffs
    }

    /// Coefficient of `x^k`; `None` past the truncation order.
    pub fn coeff(&self, k: usize) -> Option<Cx<T>> {
        self.coeffs.get(k).copied()
    }

    /// Drops every term above `order`. Raising the order is not possible.
    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order > self.order() {
            return Err(SeriesError::InsufficientOrder {
                requested: order,
                available: self.order(),
            });
        }
        Ok(Self {
            coeffs: self.coeffs[..=order].to_vec(),
        })
    }

    fn finish(coeffs: Vec<Cx<T>>) -> Result<Self> {
        check_finite(&coeffs)?;
        Ok(Self { coeffs })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let k = self.order().min(other.order());
        Self::finish((0..=k).map(|i| self.coeffs[i] + other.coeffs[i]).collect())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let k = self.order().min(other.order());
        Self::finish((0..=k).map(|i| self.coeffs[i] - other.coeffs[i]).collect())
    }

    pub fn scale(&self, factor: Cx<T>) -> Result<Self> {
        Self::finish(self.coeffs.iter().map(|&c| c * factor).collect())
    }

    /// Cauchy product truncated at `min(K_a, K_b)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        let k = self.order().min(other.order());
        let mut out = vec![Cx::zero(); k + 1];
        convolve_into(&self.coeffs, &other.coeffs, &mut out);
        Self::finish(out)
    }

    /// Multiplicative inverse; needs a nonzero constant term.
    pub fn recip(&self) -> Result<Self> {
        let c0 = self.coeffs[0];
        if c0.is_zero() {
            return Err(SeriesError::NotInvertible);
        }
        let inv0 = c0.inv();
        let mut out: Vec<Cx<T>> = Vec::with_capacity(self.coeffs.len());
        out.push(inv0);
        for n in 1..self.coeffs.len() {
            let mut acc = Cx::<T>::zero();
            for j in 1..=n {
                acc = acc + self.coeffs[j] * out[n - j];
            }
            out.push(-acc * inv0);
        }
        Self::finish(out)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.recip()?)
    }

    /// Term-by-term derivative; the order drops by one.
    pub fn derivative(&self) -> Result<Self> {
        if self.order() == 0 {
            return Ok(Self::zero(0));
        }
        Self::finish(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * T::of(k))
                .collect(),
        )
    }

    /// `log(1 + g)` on the principal branch, `g = self`.
    ///
    /// Computed from `(1 + g) L' = g'`, which is the Mercator sum
    /// `Σ (-1)^{j+1} g^j / j` reorganized into an O(K²) recurrence.
    pub fn log1p(&self) -> Result<Self> {
        let g = &self.coeffs;
        if !g[0].is_zero() {
            return Err(SeriesError::NonZeroConstant {
                modulus: g[0].norm().to_f64_lossy(),
            });
        }
        let len = g.len();
        let mut out = vec![Cx::zero(); len];
        for n in 1..len {
            // n L_n = n g_n - Σ_{j=1}^{n-1} g_j (n-j) L_{n-j}
            let mut acc = g[n] * T::of(n);
            for j in 1..n {
                acc = acc - g[j] * out[n - j] * T::of(n - j);
            }
            out[n] = acc / T::of(n);
        }
        Self::finish(out)
    }

    /// `exp(self)` via `E' = g' E`.
    pub fn exp(&self) -> Result<Self> {
        let g = &self.coeffs;
        let len = g.len();
        let mut out = vec![Cx::zero(); len];
        out[0] = g[0].exp();
        for n in 1..len {
            let mut acc = Cx::<T>::zero();
            for j in 1..=n {
                acc = acc + g[j] * out[n - j] * T::of(j);
            }
            out[n] = acc / T::of(n);
        }
        Self::finish(out)
    }

    /// Horner evaluation at `x`.
    pub fn eval(&self, x: Cx<T>) -> Cx<T> {
        self.coeffs
            .iter()
            .rev()
            .fold(Cx::zero(), |acc, &c| acc * x + c)
    }
}

/// Normalized germ `f(z) = z + b_0 + b_1 z^{-1} + … + b_K z^{-K}` at infinity.
///
/// The leading coefficient `b_{-1} = 1` is implicit and cannot be changed.
#[derive(Debug, Clone, PartialEq)]
pub struct ExteriorSeries<T> {
    tail: Vec<Cx<T>>,
}

impl<T: Real> ExteriorSeries<T> {
    /// `tail[k]` is `b_k`; the truncation order is `tail.len() - 1` and must
    /// be at least 1.
    pub fn new(tail: Vec<Cx<T>>) -> Result<Self> {
        if tail.len() < 2 {
            return Err(SeriesError::OrderTooLow(tail.len().saturating_sub(1)));
        }
        check_finite(&tail)?;
        Ok(Self { tail })
    }

    /// `f(z) = z` at order `K`.
    pub fn identity(order: usize) -> Result<Self> {
        Self::new(vec![Cx::zero(); order + 1])
    }

    /// Builds a germ from `(k, b_k)` pairs, zero elsewhere.
    pub fn from_terms(order: usize, terms: &[(usize, Cx<T>)]) -> Result<Self> {
        let mut tail = vec![Cx::zero(); order + 1];
        for &(k, b) in terms {
            if k > order {
                return Err(SeriesError::InsufficientOrder {
                    requested: k,
                    available: order,
                });
            }
            tail[k] = b;
        }
        Self::new(tail)
    }

    pub fn order(&self) -> usize {
        self.tail.len() - 1
    }

    /// `b_k`, zero past the truncation order.
    pub fn coeff(&self, k: usize) -> Cx<T> {
        self.tail.get(k).copied().unwrap_or_else(Cx::zero)
    }

    /// `[b_0, …, b_K]`.
    pub fn tail(&self) -> &[Cx<T>] {
        &self.tail
    }

    pub fn truncate(&self, order: usize) -> Result<Self> {
        if order > self.order() {
            return Err(SeriesError::InsufficientOrder {
                requested: order,
                available: self.order(),
            });
        }
        Self::new(self.tail[..=order].to_vec())
    }

    /// Homotopy `F_s(z) = s f(z/s)`, i.e. `b_k ↦ b_k s^{k+1}`.
    pub fn scale_homotopy(&self, s: Cx<T>) -> Result<Self> {
        if s.norm() > T::one() + T::tol(1e-14) {
            return Err(SeriesError::OutsideDisk {
                modulus: s.norm().to_f64_lossy(),
            });
        }
        let mut power = s;
        let mut tail = Vec::with_capacity(self.tail.len());
        for &b in &self.tail {
            tail.push(b * power);
            power = power * s;
        }
        Self::new(tail)
    }

    /// `f(z)` from the truncated expansion.
    pub fn eval(&self, z: Cx<T>) -> Cx<T> {
        let u = z.inv();
        let tail = self
            .tail
            .iter()
            .rev()
            .fold(Cx::zero(), |acc, &b| acc * u + b);
        z + tail
    }

    /// `f'(z)` from the truncated expansion.
    pub fn eval_derivative(&self, z: Cx<T>) -> Cx<T> {
        let u = z.inv();
        let mut acc = Cx::<T>::zero();
        for (k, &b) in self.tail.iter().enumerate().skip(1).rev() {
            acc = acc * u + b * T::of(k);
        }
        // Σ_{k>=1} -k b_k u^{k+1} = -u^2 Σ k b_k u^{k-1}
        Cx::<T>::one() - acc * u * u
    }

    /// The derivatives `f'`, `f''`, `f'''` as Taylor series in `u = 1/z`,
    /// each truncated at `order`. Coefficients above `K + 1`, `K + 2`, `K + 3`
    /// respectively are left at zero.
    pub(crate) fn derivatives_in_inverse(&self, order: usize) -> [TaylorSeries<T>; 3] {
        let mut d1 = vec![Cx::zero(); order + 1];
        let mut d2 = vec![Cx::zero(); order + 1];
        let mut d3 = vec![Cx::zero(); order + 1];
        d1[0] = Cx::one();
        for (k, &b) in self.tail.iter().enumerate().skip(1) {
            let kf = T::of(k);
            let k1 = T::of(k + 1);
            let k2 = T::of(k + 2);
            if k < order {
                d1[k + 1] = -b * kf;
            }
            if k + 2 <= order {
                d2[k + 2] = b * kf * k1;
            }
            if k + 3 <= order {
                d3[k + 3] = -b * kf * k1 * k2;
            }
        }
        [
            TaylorSeries { coeffs: d1 },
            TaylorSeries { coeffs: d2 },
            TaylorSeries { coeffs: d3 },
        ]
    }
}

/// Box-truncated double series `Σ_{i,j <= N} c_{ij} u^i v^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct BivariateSeries<T> {
    order: usize,
    coeffs: Vec<Cx<T>>,
}

impl<T: Real> BivariateSeries<T> {
    pub fn zero(order: usize) -> Self {
        Self {
            order,
            coeffs: vec![Cx::zero(); (order + 1) * (order + 1)],
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Cx<T> {
        self.coeffs[i * (self.order + 1) + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: Cx<T>) {
        let n = self.order + 1;
        self.coeffs[i * n + j] = value;
    }

    fn row(&self, i: usize) -> &[Cx<T>] {
        let n = self.order + 1;
        &self.coeffs[i * n..(i + 1) * n]
    }

    /// The kernel `(f(z) - f(ζ))/(z - ζ) - 1` of a germ, in `u = 1/z`,
    /// `v = 1/ζ`.
    ///
    /// From `(z^{-k} - ζ^{-k})/(z - ζ) = -Σ_{i+j=k+1, i,j>=1} u^i v^j`.
    pub fn difference_quotient(f: &ExteriorSeries<T>, order: usize) -> Self {
        let mut g = Self::zero(order);
        for k in 1..=f.order() {
            let b = f.coeff(k);
            if b.is_zero() {
                continue;
            }
            for i in 1..=k.min(order) {
                let j = k + 1 - i;
                if j <= order {
                    let cur = g.get(i, j);
                    g.set(i, j, cur - b);
                }
            }
        }
        g
    }

    /// `log(1 + g)` with `g = self`, principal branch.
    ///
    /// Treats the double series as a series in `u` over truncated series in
    /// `v` and solves `(1 + g) ∂_u L = ∂_u g` row by row; the `u^0` row is a
    /// univariate logarithm.
    pub fn log1p(&self) -> Result<Self> {
        let n = self.order;
        let len = n + 1;
        if !self.get(0, 0).is_zero() {
            return Err(SeriesError::NonZeroConstant {
                modulus: self.get(0, 0).norm().to_f64_lossy(),
            });
        }
        // 1 + g restricted to u^0, inverted as a v-series.
        let mut head = self.row(0).to_vec();
        head[0] = Cx::one();
        let head_inv = TaylorSeries::new(head)?.recip()?;
        let head_log = TaylorSeries::new(self.row(0).to_vec())?.log1p()?;

        // ∂_u L coefficients, row k ↔ u^k.
        let mut dl: Vec<Vec<Cx<T>>> = Vec::with_capacity(n);
        let mut scratch = vec![Cx::zero(); len];
        for k in 0..n {
            // (∂_u g)_k = (k+1) g_{k+1}
            let kf = T::of(k + 1);
            for (s, &c) in scratch.iter_mut().zip(self.row(k + 1)) {
                *s = c * kf;
            }
            for j in 1..=k {
                let gj = self.row(j);
                let mut prod = vec![Cx::zero(); len];
                convolve_into(gj, &dl[k - j], &mut prod);
                for (s, p) in scratch.iter_mut().zip(prod) {
                    *s = *s - p;
                }
            }
            let mut row = vec![Cx::zero(); len];
            convolve_into(head_inv.coeffs(), &scratch, &mut row);
            dl.push(row);
        }

        let mut out = Self::zero(n);
        for (j, &c) in head_log.coeffs().iter().enumerate() {
            out.set(0, j, c);
        }
        for i in 1..=n {
            let inv = T::of(i).recip();
            for j in 0..len {
                out.set(i, j, dl[i - 1][j] * inv);
            }
        }
        check_finite(&out.coeffs)?;
        Ok(out)
    }

    /// Coefficients as `Complex` pairs, row-major.
    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    fn close(a: Cx<f64>, b: Cx<f64>, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    fn exp_series(order: usize, sign: f64) -> TaylorSeries<f64> {
        let mut c = Vec::with_capacity(order + 1);
        let mut fact = 1.0;
        for k in 0..=order {
            if k > 0 {
                fact *= k as f64;
            }
            c.push(real(sign.powi(k as i32) / fact));
        }
        TaylorSeries::new(c).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        let a = TaylorSeries::from_real(&[1.0, 1.0, 0.0, 0.0]).unwrap();
        let b = TaylorSeries::from_real(&[1.0, -1.0, 0.0, 0.0]).unwrap();
        let p = a.mul(&b).unwrap();
        assert_eq!(p, TaylorSeries::from_real(&[1.0, 0.0, -1.0, 0.0]).unwrap());
    }

    #[test]
    fn multiplicative_identity_and_order_propagation() {
        let a = TaylorSeries::new(vec![cx(1.0, 2.0), cx(-0.5, 0.25), cx(3.0, 0.0)]).unwrap();
        assert_eq!(a.mul(&TaylorSeries::one(2)).unwrap(), a);
        let short = TaylorSeries::one(1);
        assert_eq!(a.mul(&short).unwrap().order(), 1);
        assert_eq!(a.add(&short).unwrap().order(), 1);
    }

    #[test]
    fn exp_times_exp_minus_is_one() {
        // Direct convolution oracle: Σ_{i+j=n} (-1)^j / (i! j!) = (1-1)^n / n!.
        let k = 30;
        let p = exp_series(k, 1.0).mul(&exp_series(k, -1.0)).unwrap();
        assert!(close(p.coeffs()[0], real(1.0), 1e-15));
        for c in &p.coeffs()[1..] {
            assert!(c.norm() < 1e-15);
        }
    }

    #[test]
    fn log1p_mercator() {
        let g = TaylorSeries::variable(12);
        let l = g.log1p().unwrap();
        assert!(l.coeffs()[0].norm() == 0.0);
        for k in 1..=12 {
            let want = if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
            assert!(close(l.coeffs()[k], real(want), 1e-15), "k = {k}");
        }
        assert_eq!(
            TaylorSeries::<f64>::zero(5).log1p().unwrap(),
            TaylorSeries::zero(5)
        );
    }

    #[test]
    fn log1p_matches_power_sum_oracle() {
        // g = -u (a slice of -z/ζ): log(1 - u) = -Σ u^k / k, checked against
        // the literal sum Σ (-1)^{j+1} g^j / j.
        let order = 10;
        let g = TaylorSeries::variable(order).scale(real(-1.0)).unwrap();
        let fast = g.log1p().unwrap();
        let mut power = TaylorSeries::one(order);
        let mut slow = TaylorSeries::zero(order);
        for j in 1..=order {
            power = power.mul(&g).unwrap();
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            slow = slow
                .add(&power.scale(real(sign / j as f64)).unwrap())
                .unwrap();
        }
        for k in 0..=order {
            assert!(close(fast.coeffs()[k], slow.coeffs()[k], 1e-14));
            if k > 0 {
                assert!(close(fast.coeffs()[k], real(-1.0 / k as f64), 1e-14));
            }
        }
    }

    #[test]
    fn log1p_rejects_constant_term() {
        let g = TaylorSeries::from_real(&[0.5, 1.0]).unwrap();
        assert!(matches!(
            g.log1p(),
            Err(SeriesError::NonZeroConstant { .. })
        ));
    }

    #[test]
    fn non_finite_is_reported() {
        assert_eq!(
            TaylorSeries::from_real(&[1.0, f64::NAN]).unwrap_err(),
            SeriesError::NonFinite { index: 1 }
        );
        let big = TaylorSeries::from_real(&[1e200, 1e200]).unwrap();
        assert!(matches!(big.mul(&big), Err(SeriesError::NonFinite { .. })));
    }

    #[test]
    fn recip_and_derivative() {
        // 1/(1 - x) = Σ x^k
        let s = TaylorSeries::from_real(&[1.0, -1.0, 0.0, 0.0, 0.0]).unwrap();
        let r = s.recip().unwrap();
        for c in r.coeffs() {
            assert!(close(*c, real(1.0), 1e-15));
        }
        let d = r.derivative().unwrap();
        assert_eq!(d.order(), 3);
        assert!(close(d.coeffs()[3], real(4.0), 1e-15));
        assert_eq!(
            TaylorSeries::<f64>::zero(3).recip(),
            Err(SeriesError::NotInvertible)
        );
    }

    #[test]
    fn scale_homotopy_examples() {
        let f = ExteriorSeries::from_terms(6, &[(0, real(0.3)), (1, real(1.0)), (4, cx(0.0, 2.0))])
            .unwrap();
        assert_eq!(f.scale_homotopy(real(1.0)).unwrap(), f);
        assert_eq!(
            f.scale_homotopy(real(0.0)).unwrap(),
            ExteriorSeries::identity(6).unwrap()
        );
        // z + 1/z ↦ z + s^2/z
        let g = ExteriorSeries::from_terms(4, &[(1, real(1.0))]).unwrap();
        let s = cx(0.3, 0.4);
        let gs = g.scale_homotopy(s).unwrap();
        assert!(close(gs.coeff(1), s * s, 1e-15));
        assert!(gs.coeff(0).norm() == 0.0 && gs.coeff(2).norm() == 0.0);
        assert!(matches!(
            f.scale_homotopy(real(1.5)),
            Err(SeriesError::OutsideDisk { .. })
        ));
    }

    #[test]
    fn exterior_needs_order_one() {
        assert_eq!(
            ExteriorSeries::<f64>::new(vec![real(0.0)]).unwrap_err(),
            SeriesError::OrderTooLow(0)
        );
    }

    #[test]
    fn exterior_eval_matches_closed_form() {
        let f = ExteriorSeries::from_terms(3, &[(0, real(0.5)), (1, real(1.0))]).unwrap();
        let z = cx(1.3, -0.7);
        assert!(close(f.eval(z), z + 0.5 + z.inv(), 1e-14));
        assert!(close(
            f.eval_derivative(z),
            real(1.0) - z.inv() * z.inv(),
            1e-14
        ));
    }

    #[test]
    fn bivariate_log_of_product_kernel() {
        // g = -uv: log(1 - uv) = -Σ (uv)^k / k
        let n = 6;
        let mut g = BivariateSeries::zero(n);
        g.set(1, 1, real(-1.0));
        let l = g.log1p().unwrap();
        for i in 0..=n {
            for j in 0..=n {
                let want = if i == j && i > 0 {
                    -1.0 / i as f64
                } else {
                    0.0
                };
                assert!(close(l.get(i, j), real(want), 1e-14), "({i},{j})");
            }
        }
    }

    #[test]
    fn generic_over_f32() {
        let a = TaylorSeries::<f32>::from_real(&[1.0, 1.0, 0.0]).unwrap();
        let l = a.sub(&TaylorSeries::one(2)).unwrap().log1p().unwrap();
        assert!((l.coeffs()[2].re + 0.5).abs() < 1e-6);
    }
}
