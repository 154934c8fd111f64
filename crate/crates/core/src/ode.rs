//! Normalized solutions of the Schwarz equation `S_w = t φ` on `|z| > 1`.
//!
//! With `q = tφ/2`, the map is `w = u₁/u₂` where `u₁, u₂` solve
//! `u'' + q u = 0` and behave like `z` and `1` at infinity. Then
//! `w(∞) = ∞`, `w'(∞) = 1`, and the Wronskian `u₁'u₂ - u₁u₂'` is 1.
//!
//! Both solutions are expanded at infinity and summed on a start circle
//! `|z| = R₀`; from there they are continued inward along rays by Taylor
//! steps, each step limited by the distance to the nearest singularity of
//! `φ` and by the size of the truncated Taylor tail.

use num_complex::Complex;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::scalar::{is_finite, real, unit, Cx, Real};
use crate::schwarzian::{SchwarzianError, SchwarzianSource};
use crate::series::{ExteriorSeries, SeriesError, TaylorSeries};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error(transparent)]
    Schwarzian(#[from] SchwarzianError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("sample radius {rho} must exceed 1")]
    RadiusTooSmall { rho: f64 },
    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { got: usize, min: usize },
    #[error("u2 vanishes near z = {re} + {im}i: the map has a pole there")]
    PoleCrossed { re: f64, im: f64 },
    #[error("step size underflow near z = {re} + {im}i")]
    StepUnderflow { re: f64, im: f64 },
    #[error("step limit reached before z = {re} + {im}i")]
    StepLimit { re: f64, im: f64 },
    #[error("point z = {re} + {im}i is not in the exterior disk")]
    OutsideDomain { re: f64, im: f64 },
    #[error("germ order {requested} needs Schwarzian data through z^-{needed}, only z^-{available} is known")]
    OrderMismatch {
        requested: usize,
        needed: usize,
        available: usize,
    },
    #[error("samples {first} and {second} coincide")]
    DegenerateSamples { first: usize, second: usize },
    #[error("sample coordinates too large for exact orientation tests")]
    CoordinateOverflow,
}

pub type Result<T, E = OdeError> = std::result::Result<T, E>;

fn at<T: Real>(z: Cx<T>) -> (f64, f64) {
    (z.re.to_f64_lossy(), z.im.to_f64_lossy())
}

/// Minimum number of boundary samples.
pub const MIN_SAMPLES: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig<T> {
    /// Terms of the expansion at infinity used to initialize.
    pub series_order: usize,
    /// Radius of the circle where the expansion is summed.
    pub start_radius: T,
    /// Degree of each Taylor continuation step.
    pub taylor_order: usize,
    /// Step length as a fraction of the distance to the nearest singularity.
    pub step_fraction: T,
    /// Bound on the truncated Taylor tail per step.
    pub tolerance: T,
    pub max_steps: usize,
    /// `|u₂|` below this is treated as a pole of `w`.
    pub pole_tolerance: T,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            series_order: 40,
            start_radius: T::lit(4.0),
            taylor_order: 40,
            step_fraction: T::lit(0.5),
            tolerance: T::tol(1e-10),
            max_steps: 100_000,
            pole_tolerance: T::tol(1e-10),
        }
    }
}

/// `(u, u')` for both solutions.
#[derive(Debug, Clone, Copy, PartialEq)]
struct State<T> {
    u1: Cx<T>,
    du1: Cx<T>,
    u2: Cx<T>,
    du2: Cx<T>,
}

/// Map value and derivative at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapPoint<T> {
    pub z: Cx<T>,
    pub w: Cx<T>,
    pub dw: Cx<T>,
}

/// Coefficients of `u₂ = Σ d_i z^{-i}` and `u₁ = Σ e_i z^{1-i}` for
/// `u'' + q u = 0`, `q = Σ_{j>=4} q_j z^{-j}`, with `d_0 = e_0 = 1`,
/// `e_1 = 0`. `q` must hold coefficients through index `order + 2`.
fn solutions_at_infinity<T: Real>(q: &[Cx<T>], order: usize) -> (Vec<Cx<T>>, Vec<Cx<T>>) {
    let qj = |j: usize| q.get(j).copied().unwrap_or_else(Cx::zero);
    let mut d = vec![Cx::zero(); order + 1];
    let mut e = vec![Cx::zero(); order + 1];
    d[0] = Cx::one();
    e[0] = Cx::one();
    // (m-2)(m-1) d_{m-2} = -Σ_{j>=4} q_j d_{m-j}
    for m in 3..=order + 2 {
        let mut acc = Cx::<T>::zero();
        for j in 4..=m {
            acc = acc + qj(j) * d[m - j];
        }
        d[m - 2] = -acc / (T::of(m - 2) * T::of(m - 1));
    }
    // (m-1)(m-2) e_{m-1} = -Σ_{j>=4} q_j e_{m+1-j}
    for m in 3..=order + 1 {
        let mut acc = Cx::<T>::zero();
        for j in 4..=m + 1 {
            acc = acc + qj(j) * e[m + 1 - j];
        }
        e[m - 1] = -acc / (T::of(m - 1) * T::of(m - 2));
    }
    (e, d)
}

/// A solved Schwarz equation, evaluable anywhere in `|z| > 1`.
#[derive(Debug, Clone)]
pub struct SchwarzSolution<'a, T, S: ?Sized> {
    phi: &'a S,
    t: Cx<T>,
    half_t: Cx<T>,
    u1: Vec<Cx<T>>,
    u2: Vec<Cx<T>>,
    config: SolverConfig<T>,
}

impl<'a, T: Real, S: SchwarzianSource<T> + ?Sized> SchwarzSolution<'a, T, S> {
    /// Sets up `S_w = tφ`; `φ` must be `O(z^{-4})` at infinity.
    pub fn new(phi: &'a S, t: Cx<T>, config: SolverConfig<T>) -> Result<Self> {
        phi.check_exterior_admissible()?;
        let half_t = t / T::lit(2.0);
        let q: Vec<Cx<T>> = phi
            .expansion_at_infinity(config.series_order + 2)
            .into_iter()
            .map(|p| p * half_t)
            .collect();
        let (u1, u2) = solutions_at_infinity(&q, config.series_order);
        Ok(Self {
            phi,
            t,
            half_t,
            u1,
            u2,
            config,
        })
    }

    pub fn t(&self) -> Cx<T> {
        self.t
    }

    pub fn phi(&self) -> &S {
        self.phi
    }

    pub fn config(&self) -> &SolverConfig<T> {
        &self.config
    }

    fn state_from_series(&self, z: Cx<T>) -> State<T> {
        let inv = z.inv();
        let mut s = State {
            u1: Cx::zero(),
            du1: Cx::zero(),
            u2: Cx::zero(),
            du2: Cx::zero(),
        };
        // Horner on u = 1/z, highest index first.
        for i in (0..self.u2.len()).rev() {
            s.u2 = s.u2 * inv + self.u2[i];
            s.du2 = s.du2 * inv - self.u2[i] * T::of(i);
            s.u1 = s.u1 * inv + self.u1[i];
            s.du1 = s.du1 * inv + self.u1[i] * (T::one() - T::of(i));
        }
        // u₂' = Σ -i d_i z^{-i-1}, u₁ = z Σ e_i z^{-i}, u₁' = Σ (1-i) e_i z^{-i}
        s.du2 = s.du2 * inv;
        s.u1 = s.u1 * z;
        s
    }

    /// Taylor coefficients of a solution of `u'' + q u = 0` at `z0`.
    fn taylor_coeffs(&self, q: &[Cx<T>], u: Cx<T>, du: Cx<T>) -> Vec<Cx<T>> {
        let p = self.config.taylor_order;
        let mut c = vec![Cx::zero(); p + 1];
        c[0] = u;
        if p >= 1 {
            c[1] = du;
        }
        for k in 0..p.saturating_sub(1) {
            let mut acc = Cx::<T>::zero();
            for j in 0..=k {
                acc = acc + q[j] * c[k - j];
            }
            c[k + 2] = -acc / (T::of(k + 1) * T::of(k + 2));
        }
        c
    }

    fn tail_estimate(c: &[Cx<T>], h: T) -> T {
        let p = c.len() - 1;
        let hp = h.powi(p as i32);
        c[p].norm() * hp + c[p - 1].norm() * hp / h
    }

    fn advance(c: &[Cx<T>], h: Cx<T>) -> (Cx<T>, Cx<T>) {
        let mut u = Cx::zero();
        let mut du = Cx::zero();
        for (k, &ck) in c.iter().enumerate().rev() {
            u = u * h + ck;
            if k >= 1 {
                du = du * h + ck * T::of(k);
            }
        }
        (u, du)
    }

    fn continue_along(&self, mut z: Cx<T>, target: Cx<T>, mut s: State<T>) -> Result<State<T>> {
        let p = self.config.taylor_order.max(4);
        let mut steps = 0usize;
        loop {
            let remaining = (target - z).norm();
            if remaining <= T::epsilon() * (T::one() + target.norm()) {
                return Ok(s);
            }
            steps += 1;
            if steps > self.config.max_steps {
                let (re, im) = at(target);
                return Err(OdeError::StepLimit { re, im });
            }
            let dir = (target - z) / remaining;
            // Local variable s = (z' - z)/r, r the singular distance, keeps the
            // Taylor data O(1) however close the path runs to a singularity.
            let r = self.phi.singular_distance(z);
            let q: Vec<Cx<T>> = self
                .phi
                .taylor_at(z, r, p)
                .into_iter()
                .map(|c| c * self.half_t * r * r)
                .collect();
            let c1 = self.taylor_coeffs(&q, s.u1, s.du1 * r);
            let c2 = self.taylor_coeffs(&q, s.u2, s.du2 * r);
            let scale = T::one() + s.u1.norm().max(s.u2.norm());
            let mut h = remaining.min(self.config.step_fraction * r);
            let floor = T::epsilon() * T::lit(16.0) * (T::one() + z.norm());
            while Self::tail_estimate(&c1, h / r).max(Self::tail_estimate(&c2, h / r))
                > self.config.tolerance * scale
            {
                h = h / T::lit(2.0);
                if h < floor {
                    let (re, im) = at(z);
                    return Err(OdeError::StepUnderflow { re, im });
                }
            }
            let step = dir * h;
            let (u1, du1) = Self::advance(&c1, step / r);
            let (u2, du2) = Self::advance(&c2, step / r);
            s = State {
                u1,
                du1: du1 / r,
                u2,
                du2: du2 / r,
            };
            z = if h == remaining { target } else { z + step };
        }
    }

    fn state_at(&self, z: Cx<T>) -> Result<State<T>> {
        let r = z.norm();
        if !(r > T::one()) || !is_finite(z) {
            let (re, im) = at(z);
            return Err(OdeError::OutsideDomain { re, im });
        }
        let r0 = self.config.start_radius;
        if r >= r0 {
            return Ok(self.state_from_series(z));
        }
        let start = z * (r0 / r);
        self.continue_along(start, z, self.state_from_series(start))
    }

    /// `w(z)` and `w'(z)` by continuation along the ray through `z`.
    pub fn eval(&self, z: Cx<T>) -> Result<MapPoint<T>> {
        let s = self.state_at(z)?;
        if s.u2.norm() <= self.config.pole_tolerance * s.u1.norm() {
            let (re, im) = at(z);
            return Err(OdeError::PoleCrossed { re, im });
        }
        let inv = s.u2.inv();
        let w = s.u1 * inv;
        let dw = (s.du1 * s.u2 - s.u1 * s.du2) * inv * inv;
        if !is_finite(w) || !is_finite(dw) {
            let (re, im) = at(z);
            return Err(OdeError::PoleCrossed { re, im });
        }
        Ok(MapPoint { z, w, dw })
    }

    /// Samples `w(ρ e^{iθ_k})`, `θ_k = 2πk/M`. Rays are independent and are
    /// evaluated in parallel; the output order is by `k`.
    pub fn sample_circle(&self, rho: T, m: usize) -> Result<MapBoundarySamples<T>>
    where
        S: Sync,
    {
        if !(rho > T::one()) {
            return Err(OdeError::RadiusTooSmall {
                rho: rho.to_f64_lossy(),
            });
        }
        if m < MIN_SAMPLES {
            return Err(OdeError::TooFewSamples {
                got: m,
                min: MIN_SAMPLES,
            });
        }
        let step = T::TAU() / T::of(m);
        let samples = (0..m)
            .into_par_iter()
            .map(|k| self.eval(unit(step * T::of(k)) * rho).map(|p| p.w))
            .collect::<Result<Vec<_>>>()?;
        Ok(MapBoundarySamples {
            rho,
            samples,
            label: self.phi.describe(),
            t: self.t,
        })
    }
}

/// Image of the circle `|z| = ρ` under `w_t`, sampled at uniform angles.
#[derive(Debug, Clone, PartialEq)]
pub struct MapBoundarySamples<T> {
    pub rho: T,
    pub samples: Vec<Cx<T>>,
    /// Identifies the generating `φ`.
    pub label: String,
    pub t: Cx<T>,
}

impl<T: Real> MapBoundarySamples<T> {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn theta(&self, k: usize) -> T {
        T::TAU() * T::of(k) / T::of(self.samples.len())
    }

    /// Arbitrary closed curve sampled at `len` uniform parameters, for tests
    /// and synthetic checks.
    pub fn from_curve(len: usize, curve: impl Fn(T) -> Cx<T>) -> Self {
        let step = T::TAU() / T::of(len);
        Self {
            rho: T::one(),
            samples: (0..len).map(|k| curve(step * T::of(k))).collect(),
            label: "synthetic".to_string(),
            t: Cx::zero(),
        }
    }
}

/// Convenience: set up and sample in one go.
pub fn solve_schwarz<T: Real, S: SchwarzianSource<T> + ?Sized>(
    phi: &S,
    t: Cx<T>,
    rho: T,
    m: usize,
    config: SolverConfig<T>,
) -> Result<MapBoundarySamples<T>> {
    SchwarzSolution::new(phi, t, config)?.sample_circle(rho, m)
}

/// Number of nodes on each finite-difference circle.
const STENCIL_POINTS: usize = 32;

/// Maximum of `|S_w - tφ|` over `points` equally spaced points of
/// `|z| = ρ₀`, with `S_w` from finite differences of independently computed
/// map values. Derivatives use the trapezoidal Cauchy formula on a small
/// circle around each point (a high-order central difference on a circular
/// stencil of 32 nodes).
pub fn schwarzian_roundtrip<T: Real, S: SchwarzianSource<T> + ?Sized>(
    solution: &SchwarzSolution<'_, T, S>,
    rho0: T,
    points: usize,
) -> Result<T> {
    if !(rho0 > T::one()) {
        return Err(OdeError::RadiusTooSmall {
            rho: rho0.to_f64_lossy(),
        });
    }
    let radius = (rho0 - T::one()) / T::lit(4.0);
    let step = T::TAU() / T::of(points.max(1));
    let residuals = (0..points.max(1))
        .into_par_iter()
        .map(|k| -> Result<T> {
            let z0 = unit(step * T::of(k)) * rho0;
            let n = STENCIL_POINTS;
            let mut d = [Cx::zero(); 4];
            for j in 0..n {
                let e = unit(T::TAU() * T::of(j) / T::of(n));
                let w = solution.eval(z0 + e * radius)?.w;
                // w^{(k)}(z0) ≈ k!/(n r^k) Σ_j w(z_j) e^{-ikθ_j}
                let mut e_pow = Cx::one();
                for dk in d.iter_mut() {
                    *dk = *dk + w * e_pow.conj();
                    e_pow = e_pow * e;
                }
            }
            let n_t = T::of(n);
            let w1 = d[1] / (n_t * radius);
            let w2 = d[2] * T::lit(2.0) / (n_t * radius * radius);
            let w3 = d[3] * T::lit(6.0) / (n_t * radius * radius * radius);
            let ratio = w2 / w1;
            let s_w = w3 / w1 - ratio * ratio * T::lit(1.5);
            let target = solution
                .phi
                .eval(z0)
                .map(|p| p * solution.t)
                .unwrap_or_else(Cx::zero);
            Ok((s_w - target).norm())
        })
        .collect::<Result<Vec<T>>>()?;
    Ok(residuals.into_iter().fold(T::zero(), T::max))
}

/// Germ `w_t = z + b_0 + … + b_K z^{-K}` at infinity by series substitution
/// into `u'' + (t/2)φ u = 0` (with `b_0 = 0`).
pub fn germ_at_infinity<T: Real, S: SchwarzianSource<T> + ?Sized>(
    solution: &SchwarzSolution<'_, T, S>,
    order: usize,
) -> Result<ExteriorSeries<T>> {
    let needed = order + 3;
    if let Some(available) = solution.phi.exact_order() {
        if available < needed {
            return Err(OdeError::OrderMismatch {
                requested: order,
                needed,
                available,
            });
        }
    }
    let q: Vec<Cx<T>> = solution
        .phi
        .expansion_at_infinity(needed)
        .into_iter()
        .map(|p| p * solution.half_t)
        .collect();
    let (e, d) = solutions_at_infinity(&q, order + 1);
    // w = z (Σ e_i u^i)/(Σ d_i u^i); b_k is the u^{k+1} coefficient.
    let quotient = TaylorSeries::new(e)?.div(&TaylorSeries::new(d)?)?;
    let tail = quotient.coeffs()[1..].to_vec();
    Ok(ExteriorSeries::new(tail)?)
}

/// Result of the self-intersection test on a closed sampled curve.
#[derive(Debug, Clone, PartialEq)]
pub enum Injectivity<T> {
    Injective,
    /// Segments starting at samples `first` and `second` meet; `params` are
    /// the curve parameters (angles) of the crossing on each.
    SelfIntersecting {
        first: usize,
        second: usize,
        params: (T, T),
    },
}

impl<T> Injectivity<T> {
    pub fn is_injective(&self) -> bool {
        matches!(self, Injectivity::Injective)
    }
}

/// Coordinate resolution of the exact orientation tests.
pub const GRID_RESOLUTION: f64 = 1e-12;

type Pt = (i64, i64);

fn orient(a: Pt, b: Pt, c: Pt) -> i32 {
    let abx = (b.0 - a.0) as i128;
    let aby = (b.1 - a.1) as i128;
    let acx = (c.0 - a.0) as i128;
    let acy = (c.1 - a.1) as i128;
    let cross = abx * acy - aby * acx;
    cross.signum() as i32
}

fn on_segment(a: Pt, b: Pt, p: Pt) -> bool {
    p.0 >= a.0.min(b.0) && p.0 <= a.0.max(b.0) && p.1 >= a.1.min(b.1) && p.1 <= a.1.max(b.1)
}

fn segments_meet(a: Pt, b: Pt, c: Pt, d: Pt) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    if o1 != o2
        && o3 != o4
        && o1 * o2 <= 0
        && o3 * o4 <= 0
        && (o1 != 0 || o2 != 0)
        && (o3 != 0 || o4 != 0)
    {
        return true;
    }
    (o1 == 0 && on_segment(a, b, c))
        || (o2 == 0 && on_segment(a, b, d))
        || (o3 == 0 && on_segment(c, d, a))
        || (o4 == 0 && on_segment(c, d, b))
}

/// Parameter along `[a, b]` of the intersection with `[c, d]`, in floats.
fn crossing_param<T: Real>(a: Cx<T>, b: Cx<T>, c: Cx<T>, d: Cx<T>) -> T {
    let r = b - a;
    let s = d - c;
    let denom = r.re * s.im - r.im * s.re;
    if denom == T::zero() {
        return T::zero();
    }
    let ac = c - a;
    ((ac.re * s.im - ac.im * s.re) / denom)
        .max(T::zero())
        .min(T::one())
}

/// Sort-and-sweep self-intersection test on the closed polyline through the
/// samples, with exact orientation predicates on coordinates rounded to a
/// `1e-12` grid.
pub fn injectivity_test<T: Real>(samples: &MapBoundarySamples<T>) -> Result<Injectivity<T>> {
    let m = samples.len();
    if m < MIN_SAMPLES {
        return Err(OdeError::TooFewSamples {
            got: m,
            min: MIN_SAMPLES,
        });
    }
    let limit = 2f64.powi(62);
    let mut pts: Vec<Pt> = Vec::with_capacity(m);
    for z in &samples.samples {
        let x = z.re.to_f64_lossy() / GRID_RESOLUTION;
        let y = z.im.to_f64_lossy() / GRID_RESOLUTION;
        if !(x.abs() < limit && y.abs() < limit) {
            return Err(OdeError::CoordinateOverflow);
        }
        pts.push((x.round() as i64, y.round() as i64));
    }
    for i in 0..m {
        if pts[i] == pts[(i + 1) % m] {
            return Err(OdeError::DegenerateSamples {
                first: i,
                second: (i + 1) % m,
            });
        }
    }
    let seg = |i: usize| (pts[i], pts[(i + 1) % m]);
    let witness = |i: usize, j: usize| {
        let (a, b) = (samples.samples[i], samples.samples[(i + 1) % m]);
        let (c, d) = (samples.samples[j], samples.samples[(j + 1) % m]);
        let si = crossing_param(a, b, c, d);
        let sj = crossing_param(c, d, a, b);
        let (lo, hi) = if i < j { (i, j) } else { (j, i) };
        let (slo, shi) = if i < j { (si, sj) } else { (sj, si) };
        Injectivity::SelfIntersecting {
            first: lo,
            second: hi,
            params: (
                samples.theta(lo) + slo * samples.theta(1),
                samples.theta(hi) + shi * samples.theta(1),
            ),
        }
    };

    // Adjacent segments share a vertex; they only conflict when they fold
    // back onto each other.
    for i in 0..m {
        let (a, b) = seg(i);
        let (_, c) = seg((i + 1) % m);
        if orient(a, b, c) == 0 {
            let back = (b.0 - a.0) as i128 * (c.0 - b.0) as i128
                + (b.1 - a.1) as i128 * (c.1 - b.1) as i128;
            if back < 0 {
                return Ok(witness(i, (i + 1) % m));
            }
        }
    }

    let mut order: Vec<usize> = (0..m).collect();
    let min_x = |i: usize| {
        let (a, b) = seg(i);
        a.0.min(b.0)
    };
    let max_x = |i: usize| {
        let (a, b) = seg(i);
        a.0.max(b.0)
    };
    order.sort_by_key(|&i| (min_x(i), i));
    let mut active: Vec<usize> = Vec::new();
    for &i in &order {
        let x = min_x(i);
        active.retain(|&j| max_x(j) >= x);
        let (a, b) = seg(i);
        for &j in &active {
            let adjacent = (i + 1) % m == j || (j + 1) % m == i;
            if adjacent {
                continue;
            }
            let (c, d) = seg(j);
            if segments_meet(a, b, c, d) {
                return Ok(witness(i, j));
            }
        }
        active.push(i);
    }
    Ok(Injectivity::Injective)
}

/// Exterior turning angles of the closed polyline, one per vertex.
pub fn turning_angles<T: Real>(samples: &[Cx<T>]) -> Vec<T> {
    let m = samples.len();
    (0..m)
        .map(|i| {
            let prev = samples[(i + m - 1) % m];
            let cur = samples[i];
            let next = samples[(i + 1) % m];
            ((next - cur) * (cur - prev).conj()).arg()
        })
        .collect()
}

/// The `count` largest concentrations of turning, each summed over a window
/// of `±half_window` vertices. Returns `(vertex, total turning)` pairs in
/// vertex order.
pub fn corner_turning<T: Real>(
    samples: &[Cx<T>],
    count: usize,
    half_window: usize,
) -> Vec<(usize, T)> {
    let m = samples.len();
    let turn = turning_angles(samples);
    let window = |i: usize| -> T {
        (0..=2 * half_window)
            .map(|k| turn[(i + m + k - half_window) % m])
            .sum()
    };
    let mut idx: Vec<usize> = (0..m).collect();
    idx.sort_by(|&a, &b| {
        turn[b]
            .partial_cmp(&turn[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut picked: Vec<usize> = Vec::new();
    for i in idx {
        if picked.len() == count {
            break;
        }
        let far = picked.iter().all(|&p| {
            let d = i.abs_diff(p);
            d.min(m - d) > 2 * half_window
        });
        if far {
            picked.push(i);
        }
    }
    picked.sort_unstable();
    picked.into_iter().map(|i| (i, window(i))).collect()
}

/// `z + c/z` sampled exactly, for comparisons.
pub fn joukowski_samples<T: Real>(c: Complex<T>, rho: T, m: usize) -> MapBoundarySamples<T> {
    let mut s = MapBoundarySamples::from_curve(m, |th| {
        let z = unit(th) * rho;
        z + c / z
    });
    s.rho = rho;
    s.label = "joukowski".into();
    s.t = real(T::one());
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;
    use crate::schwarzian::{joukowski_schwarzian, RationalSchwarzian};

    fn cfg() -> SolverConfig<f64> {
        SolverConfig::default()
    }

    #[test]
    fn zero_parameter_gives_identity() {
        let phi = joukowski_schwarzian::<f64>();
        let sol = SchwarzSolution::new(&phi, Cx::zero(), cfg()).unwrap();
        let s = sol.sample_circle(1.5, 256).unwrap();
        for (k, w) in s.samples.iter().enumerate() {
            let z = unit(s.theta(k)) * 1.5;
            assert!((w - z).norm() < 1e-12);
        }
        let germ = germ_at_infinity(&sol, 8).unwrap();
        assert_eq!(germ, ExteriorSeries::identity(8).unwrap());
        assert!(schwarzian_roundtrip(&sol, 2.0, 16).unwrap() < 1e-9);
    }

    #[test]
    fn joukowski_is_recovered() {
        let phi = joukowski_schwarzian::<f64>();
        let sol = SchwarzSolution::new(&phi, real(1.0), cfg()).unwrap();
        let s = sol.sample_circle(2.0, 256).unwrap();
        let exact = joukowski_samples(real(1.0), 2.0, 256);
        for (a, b) in s.samples.iter().zip(&exact.samples) {
            assert!((a - b).norm() < 1e-8, "{a} vs {b}");
        }
        let germ = germ_at_infinity(&sol, 10).unwrap();
        for k in 0..=10 {
            let want = if k == 1 { 1.0 } else { 0.0 };
            assert!((germ.coeff(k) - real(want)).norm() < 1e-12);
        }
        let r = schwarzian_roundtrip(&sol, 2.0, 32).unwrap();
        assert!(r < 1e-6, "residual {r}");
    }

    #[test]
    fn near_boundary_evaluation_stays_accurate() {
        let phi = joukowski_schwarzian::<f64>();
        let sol = SchwarzSolution::new(&phi, real(1.0), cfg()).unwrap();
        for &z in &[cx(1.01, 0.0), cx(0.0, -1.001), cx(-1.005, 0.0)] {
            let p = sol.eval(z).unwrap();
            assert!((p.w - (z + z.inv())).norm() < 1e-8, "{z}");
        }
    }

    #[test]
    fn corner_prevertex_is_approached_without_overflow() {
        let spec = crate::polygon::PolygonSpec::regular(4);
        let phi = crate::polygon::circular_polygon_schwarzian::<f64>(&spec).unwrap();
        let sol = SchwarzSolution::new(&phi, real(1.0), cfg()).unwrap();
        let w: Vec<Cx<f64>> = [1e-6, 1e-8, 1e-10, 1e-12]
            .iter()
            .map(|e| sol.eval(cx(1.0 + e, 0.0)).unwrap().w)
            .collect();
        for p in &w {
            assert!(p.im.abs() < 1e-12);
        }
        assert!((w[2] - w[3]).norm() < (w[1] - w[2]).norm());
        assert!((w[2] - w[3]).norm() < 1e-10);
    }

    #[test]
    fn germ_is_linear_in_small_t() {
        // b_3 coefficient: one-sided difference quotient in t matches the
        // derivative obtained from a tiny t.
        let phi = joukowski_schwarzian::<f64>();
        let b = |t: f64| {
            let sol = SchwarzSolution::new(&phi, real(t), cfg()).unwrap();
            germ_at_infinity(&sol, 6).unwrap()
        };
        let (g1, g2) = (b(1e-4), b(2e-4));
        for k in 1..=3 {
            let slope1 = g1.coeff(k) / 1e-4;
            let slope2 = g2.coeff(k) / 2e-4;
            assert!((slope1 - slope2).norm() < 1e-3 * (1.0 + slope1.norm()));
        }
        // first-order: u1 ~ z - (t/2) p_4/(6 z^2)... b_1 = -(t/2) p_4 / 3 ... checked by sign
        assert!(g1.coeff(1).re > 0.0);
    }

    #[test]
    fn admissibility_is_required() {
        let phi = RationalSchwarzian::double_poles(vec![real(1.0)], vec![real(1.0)]).unwrap();
        assert!(matches!(
            SchwarzSolution::new(&phi, real(1.0), cfg()),
            Err(OdeError::Schwarzian(_))
        ));
    }

    #[test]
    fn sampling_preconditions() {
        let phi = joukowski_schwarzian::<f64>();
        let sol = SchwarzSolution::new(&phi, real(0.5), cfg()).unwrap();
        assert!(matches!(
            sol.sample_circle(1.0, 256),
            Err(OdeError::RadiusTooSmall { .. })
        ));
        assert!(matches!(
            sol.sample_circle(1.5, 100),
            Err(OdeError::TooFewSamples { .. })
        ));
        assert!(matches!(
            sol.eval(cx(0.5, 0.0)),
            Err(OdeError::OutsideDomain { .. })
        ));
    }

    #[test]
    fn circle_is_injective() {
        let s = MapBoundarySamples::from_curve(512, |th: f64| unit(th) * 1.3);
        assert_eq!(injectivity_test(&s).unwrap(), Injectivity::Injective);
    }

    #[test]
    fn figure_eight_self_intersects() {
        let s = MapBoundarySamples::from_curve(400, |th: f64| cx(th.sin(), (2.0 * th).sin() / 2.0));
        match injectivity_test(&s).unwrap() {
            Injectivity::SelfIntersecting { params, .. } => {
                // crossing at the origin: θ = 0 and θ = π
                let near = |x: f64, y: f64| {
                    let d = (x - y).rem_euclid(std::f64::consts::TAU);
                    d.min(std::f64::consts::TAU - d) < 0.05
                };
                assert!(near(params.0, 0.0) || near(params.0, std::f64::consts::PI));
                assert!(near(params.1, 0.0) || near(params.1, std::f64::consts::PI));
            }
            other => panic!("expected a crossing, got {other:?}"),
        }
    }

    #[test]
    fn repeated_samples_are_rejected() {
        let mut s = MapBoundarySamples::from_curve(300, |th: f64| unit(th));
        s.samples[10] = s.samples[11];
        assert!(matches!(
            injectivity_test(&s),
            Err(OdeError::DegenerateSamples { .. })
        ));
    }

    #[test]
    fn folded_back_curve_is_caught() {
        // a slit traversed there and back: z + 1/z on the unit circle
        let s = joukowski_samples(real(1.0), 1.0, 256);
        assert!(!injectivity_test(&s).unwrap().is_injective());
    }
}
