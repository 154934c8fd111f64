//! Schwarzian derivatives and hyperbolic sup norms.
//!
//! Norm conventions are fixed here once for the whole crate:
//!
//! * interior disk: `‖φ‖ = sup_{|z|<1} (1 - |z|²)² |φ(z)|`,
//! * exterior disk: `‖φ‖ = sup_{|z|>1} (|z|² - 1)² |φ(z)|`.
//!
//! There is no extra factor 4 (that factor belongs to the half-plane model).
//! The two disk norms agree under `φ(z) ↦ z^{-4} φ(1/z)`.

use num_complex::Complex;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::scalar::{is_finite, real, unit, Cx, Real};
use crate::series::{ExteriorSeries, SeriesError, TaylorSeries};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SchwarzianError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("need matching pole/coefficient lists, got {poles} poles, {quadratic} quadratic and {residue} residue coefficients")]
    LengthMismatch {
        poles: usize,
        quadratic: usize,
        residue: usize,
    },
    #[error("a rational Schwarzian needs at least one pole")]
    NoPoles,
    #[error("pole {index} has modulus {modulus}, expected 1")]
    PoleOffCircle { index: usize, modulus: f64 },
    #[error("all double-pole coefficients vanish")]
    NoDoublePoles,
    #[error("non-finite coefficient data")]
    NonFinite,
    #[error("not O(z^-4) at infinity: decay residuals {residuals:?}")]
    DecayViolated { residuals: [f64; 3] },
    #[error("every grid point failed to evaluate")]
    NoValidGridPoints,
}

pub type Result<T, E = SchwarzianError> = std::result::Result<T, E>;

/// Something that can be evaluated pointwise. `None` (or a non-finite
/// value) marks a point where evaluation failed, typically a pole.
pub trait Evaluate<T: Real> {
    fn eval(&self, z: Cx<T>) -> Option<Cx<T>>;
}

impl<T: Real, F> Evaluate<T> for F
where
    F: Fn(Cx<T>) -> Option<Cx<T>>,
{
    fn eval(&self, z: Cx<T>) -> Option<Cx<T>> {
        self(z)
    }
}

/// A holomorphic function on the exterior disk that can drive the Schwarz
/// equation: it knows its expansion at infinity, its Taylor expansions at
/// finite points and how far away its singularities are.
pub trait SchwarzianSource<T: Real>: Evaluate<T> + Send + Sync {
    /// Coefficients `p_0, …, p_order` of `z^{-k}` at infinity.
    fn expansion_at_infinity(&self, order: usize) -> Vec<Cx<T>>;

    /// Highest order at which the expansion at infinity is exact data rather
    /// than zero padding. `None` means unlimited.
    fn exact_order(&self) -> Option<usize>;

    /// Coefficients of `s^k`, `k = 0..=order`, in `φ(z0 + scale·s)`. A scale
    /// near the singular distance keeps them of moderate size.
    fn taylor_at(&self, z0: Cx<T>, scale: T, order: usize) -> Vec<Cx<T>>;

    /// Distance from `z` to the nearest singularity.
    fn singular_distance(&self, z: Cx<T>) -> T;

    /// `Ok` when the function is `O(z^{-4})` at infinity.
    fn check_exterior_admissible(&self) -> Result<()>;

    /// Short label used in reports.
    fn describe(&self) -> String;
}

/// `r(z) = Σ c_j/(z - a_j)² + Σ c'_j/(z - a_j)` with every `|a_j| = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalSchwarzian<T> {
    poles: Vec<Cx<T>>,
    quadratic: Vec<Cx<T>>,
    residue: Vec<Cx<T>>,
    /// Expansion at infinity used for `|z| >= FAR_RADIUS`, where summing
    /// the partial fractions cancels badly.
    far: Vec<Cx<T>>,
}

const FAR_RADIUS: f64 = 3.0;
const FAR_TERMS: usize = 64;

/// Coefficients of `z^{-k}`, `k = 0..=order`, of the partial fractions.
fn laurent_at_infinity<T: Real>(
    poles: &[Cx<T>],
    quadratic: &[Cx<T>],
    residue: &[Cx<T>],
    order: usize,
) -> Vec<Cx<T>> {
    // 1/(z-a) = Σ_{k>=1} a^{k-1} z^{-k}, 1/(z-a)² = Σ_{k>=2} (k-1) a^{k-2} z^{-k}
    let mut p = vec![Cx::zero(); order + 1];
    for ((&a, &c), &d) in poles.iter().zip(quadratic).zip(residue) {
        let mut a_pow = Cx::one(); // a^{k-1}
        let mut a_prev = Cx::zero(); // a^{k-2}
        for (k, pk) in p.iter_mut().enumerate().skip(1) {
            *pk = *pk + d * a_pow;
            if k >= 2 {
                *pk = *pk + c * a_prev * T::of(k - 1);
            }
            a_prev = a_pow;
            a_pow = a_pow * a;
        }
    }
    p
}

impl<T: Real> RationalSchwarzian<T> {
    /// Poles must sit on the unit circle within `1e-12`, and at least one
    /// double-pole coefficient must be nonzero.
    pub fn new(poles: Vec<Cx<T>>, quadratic: Vec<Cx<T>>, residue: Vec<Cx<T>>) -> Result<Self> {
        if poles.len() != quadratic.len() || poles.len() != residue.len() {
            return Err(SchwarzianError::LengthMismatch {
                poles: poles.len(),
                quadratic: quadratic.len(),
                residue: residue.len(),
            });
        }
        if poles.is_empty() {
            return Err(SchwarzianError::NoPoles);
        }
        let all = poles.iter().chain(&quadratic).chain(&residue);
        if !all.clone().all(|z| is_finite(*z)) {
            return Err(SchwarzianError::NonFinite);
        }
        for (index, a) in poles.iter().enumerate() {
            if (a.norm() - T::one()).abs() > T::tol(1e-12) {
                return Err(SchwarzianError::PoleOffCircle {
                    index,
                    modulus: a.norm().to_f64_lossy(),
                });
            }
        }
        if quadratic.iter().map(|c| c.norm()).sum::<T>() <= T::zero() {
            return Err(SchwarzianError::NoDoublePoles);
        }
        let far = laurent_at_infinity(&poles, &quadratic, &residue, FAR_TERMS);
        Ok(Self {
            poles,
            quadratic,
            residue,
            far,
        })
    }

    /// Double poles only.
    pub fn double_poles(poles: Vec<Cx<T>>, quadratic: Vec<Cx<T>>) -> Result<Self> {
        let residue = vec![Cx::zero(); poles.len()];
        Self::new(poles, quadratic, residue)
    }

    pub fn poles(&self) -> &[Cx<T>] {
        &self.poles
    }

    pub fn quadratic(&self) -> &[Cx<T>] {
        &self.quadratic
    }

    pub fn residue(&self) -> &[Cx<T>] {
        &self.residue
    }

    pub fn len(&self) -> usize {
        self.poles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }

    /// `t · r`.
    pub fn scaled(&self, t: Cx<T>) -> Result<Self> {
        Self::new(
            self.poles.clone(),
            self.quadratic.iter().map(|&c| c * t).collect(),
            self.residue.iter().map(|&c| c * t).collect(),
        )
    }

    /// The coefficients of `z^{-1}`, `z^{-2}`, `z^{-3}` at infinity:
    /// `Σ c'_j`, `Σ (c_j + c'_j a_j)`, `Σ (2 c_j a_j + c'_j a_j²)`.
    pub fn decay_residuals(&self) -> [Cx<T>; 3] {
        let mut r = [Cx::zero(); 3];
        for ((&a, &c), &d) in self.poles.iter().zip(&self.quadratic).zip(&self.residue) {
            r[0] = r[0] + d;
            r[1] = r[1] + c + d * a;
            r[2] = r[2] + c * a * T::lit(2.0) + d * a * a;
        }
        r
    }

    pub fn nearest_pole_distance(&self, z: Cx<T>) -> T {
        self.poles
            .iter()
            .map(|&a| (z - a).norm())
            .fold(T::infinity(), T::min)
    }
}

/// Points closer than this to a pole are not evaluated.
pub const POLE_GUARD: f64 = 1e-8;

impl<T: Real> Evaluate<T> for RationalSchwarzian<T> {
    fn eval(&self, z: Cx<T>) -> Option<Cx<T>> {
        if z.norm() >= T::lit(FAR_RADIUS) {
            let u = z.inv();
            let acc = self
                .far
                .iter()
                .rev()
                .fold(Cx::zero(), |acc, &p| acc * u + p);
            return is_finite(acc).then_some(acc);
        }
        let mut acc = Cx::<T>::zero();
        for ((&a, &c), &d) in self.poles.iter().zip(&self.quadratic).zip(&self.residue) {
            let w = z - a;
            if w.norm() < T::lit(POLE_GUARD) {
                return None;
            }
            let inv = w.inv();
            acc = acc + (c * inv + d) * inv;
        }
        is_finite(acc).then_some(acc)
    }
}

impl<T: Real> SchwarzianSource<T> for RationalSchwarzian<T> {
    fn expansion_at_infinity(&self, order: usize) -> Vec<Cx<T>> {
        if order <= FAR_TERMS {
            return self.far[..=order].to_vec();
        }
        laurent_at_infinity(&self.poles, &self.quadratic, &self.residue, order)
    }

    fn exact_order(&self) -> Option<usize> {
        None
    }

    fn taylor_at(&self, z0: Cx<T>, scale: T, order: usize) -> Vec<Cx<T>> {
        // c/(d+σs)² = c d^{-2} Σ (j+1)(-σs/d)^j,  c'/(d+σs) = c' d^{-1} Σ (-σs/d)^j
        let mut out = vec![Cx::zero(); order + 1];
        for ((&a, &c), &cp) in self.poles.iter().zip(&self.quadratic).zip(&self.residue) {
            let d = z0 - a;
            let q = -d.inv() * scale;
            let inv = d.inv();
            let mut qj = inv; // d^{-1} (-σ/d)^0
            for (j, o) in out.iter_mut().enumerate() {
                // qj = d^{-1} (-σ/d)^j
                *o = *o + cp * qj + c * qj * inv * T::of(j + 1);
                qj = qj * q;
            }
        }
        out
    }

    fn singular_distance(&self, z: Cx<T>) -> T {
        self.nearest_pole_distance(z)
    }

    fn check_exterior_admissible(&self) -> Result<()> {
        let r = self.decay_residuals();
        let scale = self
            .quadratic
            .iter()
            .chain(&self.residue)
            .map(|c| c.norm())
            .fold(T::one(), T::max);
        if r.iter().any(|x| x.norm() > T::tol(1e-10) * scale) {
            return Err(SchwarzianError::DecayViolated {
                residuals: r.map(|x| x.norm().to_f64_lossy()),
            });
        }
        Ok(())
    }

    fn describe(&self) -> String {
        format!("rational({} poles)", self.poles.len())
    }
}

/// A function `Σ_{k=0}^{K} c_k z^{-k}` given by its truncated expansion at
/// infinity.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesAtInfinity<T> {
    series: TaylorSeries<T>,
}

impl<T: Real> SeriesAtInfinity<T> {
    pub fn new(series: TaylorSeries<T>) -> Self {
        Self { series }
    }

    /// The expansion in `u = 1/z`.
    pub fn series(&self) -> &TaylorSeries<T> {
        &self.series
    }

    pub fn order(&self) -> usize {
        self.series.order()
    }

    /// Coefficient of `z^{-k}`, zero past the truncation order.
    pub fn coeff(&self, k: usize) -> Cx<T> {
        self.series.coeff(k).unwrap_or_else(Cx::zero)
    }

    pub fn scaled(&self, t: Cx<T>) -> Result<Self> {
        Ok(Self::new(self.series.scale(t)?))
    }
}

impl<T: Real> Evaluate<T> for SeriesAtInfinity<T> {
    fn eval(&self, z: Cx<T>) -> Option<Cx<T>> {
        if z.is_zero() {
            return None;
        }
        let v = self.series.eval(z.inv());
        is_finite(v).then_some(v)
    }
}

impl<T: Real> SchwarzianSource<T> for SeriesAtInfinity<T> {
    fn expansion_at_infinity(&self, order: usize) -> Vec<Cx<T>> {
        (0..=order).map(|k| self.coeff(k)).collect()
    }

    fn exact_order(&self) -> Option<usize> {
        Some(self.order())
    }

    fn taylor_at(&self, z0: Cx<T>, scale: T, order: usize) -> Vec<Cx<T>> {
        // (z0 + σs)^{-k} = z0^{-k} Σ_j binom(-k, j) (σs/z0)^j
        let inv = z0.inv();
        let ratio = inv * scale;
        let mut out = vec![Cx::zero(); order + 1];
        let mut inv_k = Cx::one();
        for k in 0..=self.order() {
            let c = self.coeff(k);
            if !c.is_zero() {
                let mut term = c * inv_k;
                for (j, o) in out.iter_mut().enumerate() {
                    *o = *o + term;
                    // binom(-k, j+1)/binom(-k, j) = -(k + j)/(j + 1)
                    term = -term * ratio * T::of(k + j) / T::of(j + 1);
                }
            }
            inv_k = inv_k * inv;
        }
        out
    }

    fn singular_distance(&self, z: Cx<T>) -> T {
        z.norm()
    }

    fn check_exterior_admissible(&self) -> Result<()> {
        let r = [self.coeff(1), self.coeff(2), self.coeff(3)];
        let lead = self.coeff(0).norm();
        let scale = (0..=self.order())
            .map(|k| self.coeff(k).norm())
            .fold(T::one(), T::max);
        if lead > T::tol(1e-10) * scale || r.iter().any(|x| x.norm() > T::tol(1e-10) * scale) {
            return Err(SchwarzianError::DecayViolated {
                residuals: r.map(|x| x.norm().to_f64_lossy()),
            });
        }
        Ok(())
    }

    fn describe(&self) -> String {
        format!("series(order {})", self.order())
    }
}

/// Schwarzian `S_w = w'''/w' - (3/2)(w''/w')²` of a normalized germ, as a
/// series in `1/z`. For a germ of order `K` the result is exact through
/// `z^{-(K+3)}` and starts at `z^{-4}`.
pub fn schwarzian_of_series<T: Real>(w: &ExteriorSeries<T>) -> Result<SeriesAtInfinity<T>> {
    schwarzian_of_series_to(w, w.order() + 3)
}

/// As [`schwarzian_of_series`] with an explicit output order, which may not
/// exceed `K + 3`.
pub fn schwarzian_of_series_to<T: Real>(
    w: &ExteriorSeries<T>,
    order: usize,
) -> Result<SeriesAtInfinity<T>> {
    let available = w.order() + 3;
    if order > available {
        return Err(SeriesError::InsufficientOrder {
            requested: order,
            available,
        }
        .into());
    }
    let [d1, d2, d3] = w.derivatives_in_inverse(order);
    let inv = d1.recip()?;
    let ratio = d2.mul(&inv)?;
    let s = d3
        .mul(&inv)?
        .sub(&ratio.mul(&ratio)?.scale(real(T::lit(1.5)))?)?;
    // The z^0..z^{-3} terms vanish identically for a normalized germ; clear
    // the rounding residue so the leading order is structural.
    let mut coeffs = s.into_coeffs();
    for c in coeffs.iter_mut().take(4) {
        *c = Cx::zero();
    }
    Ok(SeriesAtInfinity::new(TaylorSeries::new(coeffs)?))
}

/// Which disk a norm is taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    Interior,
    Exterior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NormMethod {
    Grid,
    BoundaryFormula,
}

/// A hyperbolic sup norm together with how it was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperbolicNorm<T> {
    pub value: T,
    pub domain: Domain,
    pub method: NormMethod,
    /// Gain of the local refinement over the coarse grid maximum; a rough
    /// indicator of grid resolution. Zero for the boundary formula.
    pub grid_error: T,
    /// Where the maximum was found (a pole for the boundary formula).
    pub argmax: Option<Cx<T>>,
    /// Grid points skipped because evaluation failed.
    pub skipped: usize,
}

impl<T: Real> HyperbolicNorm<T> {
    /// Norm of `t φ` from the norm of `φ`.
    pub fn scaled(&self, t: T) -> Self {
        Self {
            value: self.value * t.abs(),
            grid_error: self.grid_error * t.abs(),
            ..self.clone()
        }
    }
}

/// Grid parameters for [`bnorm_grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    /// Radial ladder `1 - 2^{-j}`, `j = 1..=levels`.
    pub levels: u32,
    pub angular: usize,
    /// Rounds of alternating golden-section refinement in angle and radius.
    pub refine_rounds: usize,
    /// Golden-section iterations per one-dimensional search.
    pub golden_iters: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            levels: 20,
            angular: 4096,
            refine_rounds: 3,
            golden_iters: 60,
        }
    }
}

/// Radial parameter `s ∈ [0, 1)` and angle to a point in the chosen domain.
/// Exterior points are mirrors `e^{iθ}/s`; `s = 0` stands for a far circle.
fn grid_point<T: Real>(domain: Domain, s: T, theta: T) -> Cx<T> {
    match domain {
        Domain::Interior => unit(theta) * s,
        Domain::Exterior => {
            let s = s.max(T::lit(1e-4));
            unit(theta) / s
        }
    }
}

fn weight<T: Real>(domain: Domain, z: Cx<T>) -> T {
    let r2 = z.norm_sqr();
    let w = match domain {
        Domain::Interior => T::one() - r2,
        Domain::Exterior => r2 - T::one(),
    };
    w * w
}

fn weighted<T: Real, F: Evaluate<T> + ?Sized>(phi: &F, domain: Domain, z: Cx<T>) -> Option<T> {
    let v = phi.eval(z)?;
    if !is_finite(v) {
        return None;
    }
    let w = weight(domain, z) * v.norm();
    w.is_finite().then_some(w)
}

/// Golden-section search for a maximum of `f` on `[a, b]`.
fn golden_max<T: Real>(mut a: T, mut b: T, iters: usize, f: impl Fn(T) -> Option<T>) -> (T, T) {
    let inv_phi = (T::lit(5.0).sqrt() - T::one()) / T::lit(2.0);
    let eval = |x: T| f(x).unwrap_or(T::neg_infinity());
    let mut x1 = b - (b - a) * inv_phi;
    let mut x2 = a + (b - a) * inv_phi;
    let mut f1 = eval(x1);
    let mut f2 = eval(x2);
    for _ in 0..iters {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + (b - a) * inv_phi;
            f2 = eval(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - (b - a) * inv_phi;
            f1 = eval(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Grid maximization of the weighted modulus over the interior or exterior
/// disk, followed by golden-section refinement around the coarse argmax.
///
/// Failed evaluations (poles on the grid) are skipped and logged; if every
/// point fails the norm is an error.
pub fn bnorm_grid<T: Real, F: Evaluate<T> + ?Sized>(
    phi: &F,
    domain: Domain,
    config: &GridConfig,
) -> Result<HyperbolicNorm<T>> {
    let mut radii = vec![T::zero()];
    for j in 1..=config.levels {
        radii.push(T::one() - T::lit(2f64.powi(-(j as i32))));
    }
    let two_pi = T::TAU();
    let dtheta = two_pi / T::of(config.angular);

    let mut best: Option<(T, usize, usize)> = None;
    let mut skipped = 0usize;
    for (ri, &s) in radii.iter().enumerate() {
        // The center (or the far circle) is a single point for the interior.
        let count = if ri == 0 && domain == Domain::Interior {
            1
        } else {
            config.angular
        };
        for k in 0..count {
            let z = grid_point(domain, s, dtheta * T::of(k));
            match weighted(phi, domain, z) {
                Some(v) => {
                    if best.is_none_or(|(b, _, _)| v > b) {
                        best = Some((v, ri, k));
                    }
                }
                None => skipped += 1,
            }
        }
    }
    if skipped > 0 {
        log::debug!("bnorm_grid: skipped {skipped} grid points");
    }
    let (coarse, ri, k) = best.ok_or(SchwarzianError::NoValidGridPoints)?;

    let mut s_best = radii[ri];
    let mut theta_best = dtheta * T::of(k);
    let mut value = coarse;
    if coarse > T::zero() {
        let s_lo = if ri == 0 { T::zero() } else { radii[ri - 1] };
        let s_hi = radii.get(ri + 1).copied().unwrap_or(radii[ri]);
        let s_hi = if s_hi > radii[ri] {
            s_hi
        } else {
            radii[ri] + (T::one() - radii[ri]) / T::lit(2.0)
        };
        for _ in 0..config.refine_rounds {
            let (th, v) = golden_max(
                theta_best - dtheta,
                theta_best + dtheta,
                config.golden_iters,
                |th| weighted(phi, domain, grid_point(domain, s_best, th)),
            );
            if v > value {
                value = v;
                theta_best = th;
            }
            let (s, v) = golden_max(s_lo, s_hi, config.golden_iters, |s| {
                weighted(phi, domain, grid_point(domain, s, theta_best))
            });
            if v > value {
                value = v;
                s_best = s;
            }
        }
    }
    Ok(HyperbolicNorm {
        value,
        domain,
        method: NormMethod::Grid,
        grid_error: value - coarse,
        argmax: Some(grid_point(domain, s_best, theta_best)),
        skipped,
    })
}

/// The boundary value `limsup_{|z|→1}` of the weighted modulus of a rational
/// Schwarzian: only the double poles survive the weight, each contributing
/// its radial limit `4|c_j|`. The same value applies to both disks.
pub fn bnorm_rational_boundary<T: Real>(
    r: &RationalSchwarzian<T>,
    domain: Domain,
) -> HyperbolicNorm<T> {
    let (idx, c) = r.quadratic().iter().map(|c| c.norm()).enumerate().fold(
        (0, T::neg_infinity()),
        |acc, (i, c)| if c > acc.1 { (i, c) } else { acc },
    );
    HyperbolicNorm {
        value: c * T::lit(4.0),
        domain,
        method: NormMethod::BoundaryFormula,
        grid_error: T::zero(),
        argmax: Some(r.poles()[idx]),
        skipped: 0,
    }
}

/// Position of a norm value relative to the univalence thresholds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    /// Below 2: the Ahlfors–Weill ball, univalent with an explicit extension.
    InsideAwBall,
    /// Between 2 and 6 inclusive: neither sufficient nor necessary bound
    /// decides.
    IndeterminateBand,
    /// Above 6: violates the classical necessary bound for univalence.
    NonUnivalentByNorm,
}

impl Gate {
    pub fn as_str(&self) -> &'static str {
        match self {
            Gate::InsideAwBall => "inside-aw-ball",
            Gate::IndeterminateBand => "indeterminate-band",
            Gate::NonUnivalentByNorm => "certified-nonunivalent-by-norm",
        }
    }
}

pub const AW_RADIUS: f64 = 2.0;
pub const NECESSITY_BOUND: f64 = 6.0;

pub fn univalence_gate<T: Real>(value: T) -> Gate {
    if value < T::lit(AW_RADIUS) {
        Gate::InsideAwBall
    } else if value <= T::lit(NECESSITY_BOUND) {
        Gate::IndeterminateBand
    } else {
        Gate::NonUnivalentByNorm
    }
}

/// The rational Schwarzian of `z + 1/z`, handy as a fixture: double poles
/// `-3/2` at `±1`, residues `±3/2`.
pub fn joukowski_schwarzian<T: Real>() -> RationalSchwarzian<T> {
    let one: Complex<T> = Cx::one();
    let c = real(T::lit(-1.5));
    RationalSchwarzian::new(vec![one, -one], vec![c, c], vec![-c, c]).expect("fixed valid data")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    fn double_pole(c: Cx<f64>, a: Cx<f64>) -> RationalSchwarzian<f64> {
        RationalSchwarzian::double_poles(vec![a], vec![c]).unwrap()
    }

    #[test]
    fn mobius_germs_have_zero_schwarzian() {
        let id = ExteriorSeries::<f64>::identity(10).unwrap();
        let s = schwarzian_of_series(&id).unwrap();
        assert!(s.series().coeffs().iter().all(|c| c.norm() == 0.0));
        let shifted = ExteriorSeries::from_terms(10, &[(0, cx(2.0, -1.0))]).unwrap();
        let s = schwarzian_of_series(&shifted).unwrap();
        assert!(s.series().coeffs().iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn joukowski_series_schwarzian() {
        // Oracle: w' = 1 - u², w'' = 2u³, w''' = -6u⁴ with u = 1/z, so
        // S = -6u⁴/(1-u²) - 6u⁶/(1-u²)² = -6u⁴ - 12u⁶ - 18u⁸ - …
        // (coefficient of u^{2k+2} is -6k).
        let w = ExteriorSeries::from_terms(12, &[(1, real(1.0))]).unwrap();
        let s = schwarzian_of_series(&w).unwrap();
        assert_eq!(s.order(), 15);
        for k in 0..=15usize {
            let want = if k >= 4 && k % 2 == 0 {
                -6.0 * ((k - 2) / 2) as f64
            } else {
                0.0
            };
            assert!((s.coeff(k) - real(want)).norm() < 1e-12, "k = {k}");
        }
        // and the rational form agrees with it
        let r = joukowski_schwarzian::<f64>();
        let p = r.expansion_at_infinity(15);
        for k in 0..=15 {
            assert!((p[k] - s.coeff(k)).norm() < 1e-12);
        }
        r.check_exterior_admissible().unwrap();
    }

    #[test]
    fn schwarzian_of_scaled_germ_follows_chain_rule() {
        // S_{F_s}(z) = s^{-2} S_f(z/s): coefficient k scales by s^{k-2}.
        let f = ExteriorSeries::from_terms(
            10,
            &[
                (0, real(0.2)),
                (1, cx(0.3, 0.1)),
                (2, real(-0.1)),
                (5, cx(0.0, 0.05)),
            ],
        )
        .unwrap();
        let s = cx(0.6, -0.3);
        let sf = schwarzian_of_series(&f).unwrap();
        let sfs = schwarzian_of_series(&f.scale_homotopy(s).unwrap()).unwrap();
        for k in 4..=13 {
            let want = sf.coeff(k) * s.powu(k as u32 - 2);
            assert!((sfs.coeff(k) - want).norm() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn schwarzian_order_is_checked() {
        let w = ExteriorSeries::<f64>::identity(3).unwrap();
        assert!(schwarzian_of_series_to(&w, 7).is_err());
        assert!(schwarzian_of_series_to(&w, 6).is_ok());
    }

    #[test]
    fn rational_validation() {
        let one = real(1.0);
        assert!(matches!(
            RationalSchwarzian::double_poles(vec![cx(1.1, 0.0)], vec![one]),
            Err(SchwarzianError::PoleOffCircle { .. })
        ));
        assert_eq!(
            RationalSchwarzian::<f64>::new(vec![one], vec![Cx::zero()], vec![one]).unwrap_err(),
            SchwarzianError::NoDoublePoles
        );
        assert!(matches!(
            RationalSchwarzian::<f64>::new(vec![one], vec![one], vec![]),
            Err(SchwarzianError::LengthMismatch { .. })
        ));
        let r = double_pole(one, one);
        assert!(matches!(
            r.check_exterior_admissible(),
            Err(SchwarzianError::DecayViolated { .. })
        ));
    }

    #[test]
    fn taylor_expansion_matches_evaluation() {
        let r = joukowski_schwarzian::<f64>();
        let z0 = cx(1.4, 0.9);
        let coeffs = r.taylor_at(z0, 1.0, 30);
        let h = cx(0.05, -0.03);
        let approx = coeffs
            .iter()
            .rev()
            .fold(Cx::<f64>::zero(), |acc, &c| acc * h + c);
        assert!((approx - r.eval(z0 + h).unwrap()).norm() < 1e-13);

        let f = ExteriorSeries::from_terms(6, &[(1, real(0.5)), (3, cx(0.1, 0.2))]).unwrap();
        let s = schwarzian_of_series(&f).unwrap();
        let coeffs = s.taylor_at(z0, 1.0, 40);
        let approx = coeffs
            .iter()
            .rev()
            .fold(Cx::<f64>::zero(), |acc, &c| acc * h + c);
        assert!((approx - s.eval(z0 + h).unwrap()).norm() < 1e-13);

        let near = cx(1.0 + 1e-9, 0.0);
        let sigma = 1e-9;
        let coeffs = r.taylor_at(near, sigma, 60);
        assert!(coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite()));
        let s_half = cx(0.0, 0.5);
        let approx = coeffs
            .iter()
            .rev()
            .fold(Cx::<f64>::zero(), |acc, &c| acc * s_half + c);
        let z = near + s_half * sigma;
        let exact = r
            .poles()
            .iter()
            .zip(r.quadratic())
            .zip(r.residue())
            .fold(Cx::<f64>::zero(), |acc, ((&a, &c), &d)| {
                acc + (c / (z - a) + d) / (z - a)
            });
        assert!((approx - exact).norm() < 1e-12 * exact.norm());
    }

    #[test]
    fn grid_norm_basic_cases() {
        let cfg = GridConfig::default();
        let zero = |_z: Cx<f64>| Some(Cx::zero());
        assert_eq!(
            bnorm_grid(&zero, Domain::Interior, &cfg).unwrap().value,
            0.0
        );

        let c = cx(0.3, -0.4);
        let constant = move |_z: Cx<f64>| Some(c);
        let n = bnorm_grid(&constant, Domain::Interior, &cfg).unwrap();
        assert!((n.value - 0.5).abs() < 1e-15);
        assert_eq!(n.argmax, Some(Cx::zero()));

        // c/(z-1)² → 4|c| by radial approach
        let r = double_pole(c, real(1.0));
        let n = bnorm_grid(&r, Domain::Interior, &cfg).unwrap();
        assert!((n.value - 2.0).abs() / 2.0 < 1e-5, "{}", n.value);
        let b = bnorm_rational_boundary(&r, Domain::Interior);
        assert!((b.value - 2.0).abs() < 1e-15);
    }

    #[test]
    fn two_double_poles_and_first_order_parts() {
        let cfg = GridConfig::default();
        let r = RationalSchwarzian::<f64>::double_poles(
            vec![real(1.0), real(-1.0)],
            vec![real(1.0), real(2.0)],
        )
        .unwrap();
        assert_eq!(bnorm_rational_boundary(&r, Domain::Interior).value, 8.0);
        let g = bnorm_grid(&r, Domain::Interior, &cfg).unwrap();
        assert!((g.value - 8.0).abs() / 8.0 < 1e-4, "{}", g.value);

        // small first-order parts change neither value
        let r2 = RationalSchwarzian::<f64>::new(
            vec![real(1.0), real(-1.0)],
            vec![real(1.0), real(2.0)],
            vec![cx(0.1, 0.05), real(-0.2)],
        )
        .unwrap();
        assert_eq!(bnorm_rational_boundary(&r2, Domain::Interior).value, 8.0);
        let g2 = bnorm_grid(&r2, Domain::Interior, &cfg).unwrap();
        assert!((g2.value - 8.0).abs() / 8.0 < 1e-4, "{}", g2.value);
    }

    #[test]
    fn exterior_norm_of_joukowski() {
        let r = joukowski_schwarzian::<f64>();
        let n = bnorm_grid(&r, Domain::Exterior, &GridConfig::default()).unwrap();
        assert!((n.value - 6.0).abs() / 6.0 < 1e-4, "{}", n.value);
        assert_eq!(bnorm_rational_boundary(&r, Domain::Exterior).value, 6.0);
    }

    #[test]
    fn all_failed_points_is_an_error() {
        let never = |_z: Cx<f64>| None;
        assert_eq!(
            bnorm_grid(&never, Domain::Interior, &GridConfig::default()).unwrap_err(),
            SchwarzianError::NoValidGridPoints
        );
    }

    #[test]
    fn gates() {
        assert_eq!(univalence_gate(1.5), Gate::InsideAwBall);
        assert_eq!(univalence_gate(2.0), Gate::IndeterminateBand);
        assert_eq!(univalence_gate(6.0), Gate::IndeterminateBand);
        assert_eq!(univalence_gate(7.3), Gate::NonUnivalentByNorm);
    }
}
